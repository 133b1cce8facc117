#pragma once

// Field dumps, hashes and the machine-readable run report.

#include "nozzle/config.hpp"
#include "nozzle/grid.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nozzle {

struct NamedField {
    std::string name;
    const ScalarField* field;
};

/// `%.17g`, so a value read back is bit-identical.
std::string format_double(double v);

/// CSV with header x1,x2,x3,<names>; one row per node, x3 fastest.
void write_fields_csv(std::ostream& out, const std::vector<NamedField>& fields);
void write_fields_csv(const std::string& path, const std::vector<NamedField>& fields);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
/// Hash of the raw little-endian doubles of a field.
std::uint64_t hash_field(const ScalarField& f);
std::string hash_file(const std::string& path);

/// JSON report: config echo, timings, histories, tables. Everything written to
/// stdout through `summary` is stored under "summary" as well.
class RunReport {
public:
    RunReport(std::string command, const RunConfig& config);

    nlohmann::json& data() { return doc_; }
    const nlohmann::json& data() const { return doc_; }

    /// Prints "key = value" to stdout and records it.
    void summary(const std::string& key, double value);
    void summary(const std::string& key, const std::string& value);
    /// Prints a preformatted table line and records it under "stdout_lines".
    void line(const std::string& text);

    void timing(const std::string& stage, double seconds);
    void add_output(const std::string& path);

    void write(const std::string& path) const;

private:
    nlohmann::json doc_;
};

/// Wall-clock stopwatch for stage timings.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace nozzle
