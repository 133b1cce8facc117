#include "nozzle/io.hpp"

#include "nozzle/errors.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nozzle {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_fields_csv(std::ostream& out, const std::vector<NamedField>& fields) {
    if (fields.empty()) throw Error("write_fields_csv: no fields");
    const Grid& g = fields.front().field->grid;
    for (const auto& f : fields)
        if (!(f.field->grid == g)) throw Error("write_fields_csv: field '" + f.name + "' on a different grid");
    out << "x1,x2,x3";
    for (const auto& f : fields) out << ',' << f.name;
    out << '\n';
    std::string row;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
            for (int k = 0; k < g.n3; ++k) {
                row = format_double(g.x1(i)) + ',' + format_double(g.x2(j)) + ',' + format_double(g.x3(k));
                for (const auto& f : fields) {
                    row += ',';
                    row += format_double((*f.field)(i, j, k));
                }
                row += '\n';
                out << row;
            }
}

void write_fields_csv(const std::string& path, const std::vector<NamedField>& fields) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    write_fields_csv(out, fields);
    if (!out) throw Error("write failed: " + path);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t hash_field(const ScalarField& f) {
    return fnv1a(std::string_view(reinterpret_cast<const char*>(f.values.data()), f.values.size() * sizeof(double)));
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a(ss.str()));
}

RunReport::RunReport(std::string command, const RunConfig& config) {
    doc_["command"] = std::move(command);
    doc_["config"] = echo_config(config);
    doc_["summary"] = nlohmann::json::object();
    doc_["stdout_lines"] = nlohmann::json::array();
    doc_["timings"] = nlohmann::json::object();
    doc_["outputs"] = nlohmann::json::object();
}

void RunReport::summary(const std::string& key, double value) {
    doc_["summary"][key] = value;
    std::cout << key << " = " << format_double(value) << '\n';
}

void RunReport::summary(const std::string& key, const std::string& value) {
    doc_["summary"][key] = value;
    std::cout << key << " = " << value << '\n';
}

void RunReport::line(const std::string& text) {
    doc_["stdout_lines"].push_back(text);
    std::cout << text << '\n';
}

void RunReport::timing(const std::string& stage, double seconds) { doc_["timings"][stage] = seconds; }

void RunReport::add_output(const std::string& path) { doc_["outputs"][path] = hash_file(path); }

void RunReport::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << doc_.dump(2) << '\n';
}

}  // namespace nozzle
