import math

import numpy as np
import pytest

import nozzle


def test_gas_scalars():
    gas = nozzle.GasModel()
    assert nozzle.critical_speed(gas, 1.5) == pytest.approx(1.0, rel=1e-12)
    assert nozzle.mass_flux(gas, 1.0, 1.5) == pytest.approx(1.0, rel=1e-14)
    q = nozzle.subsonic_speed_from_flux(gas, 0.5, 1.5)
    assert q == pytest.approx(0.347296355, rel=1e-8)
    assert nozzle.sound_speed(nozzle.GasModel(1.4, 1.0, 5.0), 1.0) == pytest.approx(math.sqrt(1.4))
    with pytest.raises(ValueError):
        nozzle.GasModel(0.9, 0.5, 1.5)
    with pytest.raises(nozzle.InfeasibleError):
        nozzle.subsonic_speed_from_flux(gas, 1.2, 1.5)


def test_uniform_potential():
    grid = nozzle.Grid(1.0, 9, 9, 9)
    data = nozzle.boundary_family(grid)
    sol = nozzle.solve_potential(nozzle.GasModel(), data, 0.5, 10)
    assert sol["u"].shape == (3, 9, 9, 9)
    assert np.max(np.abs(sol["u"][0] - 0.347296355)) < 1e-6
    assert np.max(np.abs(sol["u"][1:])) < 1e-10
    assert sol["max_mach"] == pytest.approx(0.28944452, abs=1e-6)


def test_invalid_data():
    grid = nozzle.Grid(1.0, 9, 9, 9)
    with pytest.raises(ValueError):
        nozzle.boundary_family(grid, a2=0.7, a3=0.5)


def test_euler_small_data():
    grid = nozzle.Grid(1.0, 9, 9, 9)
    data = nozzle.boundary_family(grid, eps_kappa=0.01, eps_b=0.01, theta_bar=0.5)
    sol = nozzle.run_euler(data)
    assert sol["converged"]
    assert len(sol["residuals"]) == 7
    assert np.min(sol["u"][0]) > 0


def test_config_roundtrip():
    echo = nozzle.parse_config("[grid]\nn = 9\n")
    assert "n1 = 9" in echo
    with pytest.raises(ValueError):
        nozzle.parse_config("[gas]\ngamma = 0.9\n")
