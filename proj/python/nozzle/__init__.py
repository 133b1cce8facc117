"""Steady subsonic nozzle flow solver."""

from ._nozzle import (
    BoundaryData,
    ConfigError,
    ConvergenceError,
    DomainError,
    GasModel,
    Grid,
    InfeasibleError,
    InvalidDataError,
    NozzleError,
    OutOfRangeError,
    boundary_family,
    critical_speed,
    density_from_speed,
    find_critical_theta,
    mass_flux,
    parse_config,
    run_euler,
    solve_potential,
    sound_speed,
    subsonic_speed_from_flux,
    truncated_density,
    verify_battery,
)

__all__ = [name for name in dir() if not name.startswith("_")]
