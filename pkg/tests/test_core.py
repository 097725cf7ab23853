"""Grids, containers, and the momentum-representation transform."""

import numpy as np
import pytest

from phasekit import (
    DegenerateInterval,
    InvariantViolation,
    NonPowerOfTwo,
    PhysicalConstants,
    StateSpec,
    Wavefunction,
    build_state,
    density_from_pure,
    from_momentum_representation,
    make_position_grid,
    momentum_grid_of,
    to_momentum_representation,
)

from conftest import linf


def test_grid_spacing_and_endpoints():
    g = make_position_grid(-8, 8, 16)
    assert g.dq == 1.0
    assert g.points[0] == -8.0
    assert g.points[-1] == 7.0


def test_grid_fine_spacing():
    assert make_position_grid(-8, 8, 256).dq == 0.0625


def test_degenerate_interval_rejected():
    with pytest.raises(DegenerateInterval):
        make_position_grid(0, 0, 16)


@pytest.mark.parametrize("n", [12, 4, 7, 0])
def test_bad_grid_sizes_rejected(n):
    with pytest.raises(NonPowerOfTwo):
        make_position_grid(-8, 8, n)


@pytest.mark.parametrize(
    "n,width,hbar,expected_dp",
    [
        (16, 16.0, 1.0, 2 * np.pi / 16),
        (256, 16.0, 1.0, 2 * np.pi / 16),
        (16, 16.0, 2.0, 4 * np.pi / 16),
    ],
)
def test_momentum_spacing(n, width, hbar, expected_dp):
    g = make_position_grid(-width / 2, width / 2, n)
    pg = momentum_grid_of(g, PhysicalConstants(hbar=hbar))
    assert pg.dp == pytest.approx(expected_dp, rel=1e-15)
    assert np.all(np.diff(pg.points) > 0)


def test_spectral_pairing_exact(grid, constants):
    pg = momentum_grid_of(grid, constants)
    assert abs(pg.dp * grid.dq * grid.n - 2 * np.pi * constants.hbar) < 1e-15


def test_momentum_grid_symmetric_about_zero(grid, constants):
    pg = momentum_grid_of(grid, constants)
    # symmetric up to the half-spacing convention: -p_max present, +p_max not
    assert pg.points[0] == -pg.p_max
    assert pg.points[grid.n // 2] == 0.0


def test_gaussian_momentum_representation(ground):
    # analytic Fourier oracle: the oscillator ground state maps to itself
    phi = to_momentum_representation(ground)
    pg = momentum_grid_of(ground.grid, ground.constants)
    expected = np.pi**-0.25 * np.exp(-pg.points**2 / 2)
    assert linf(phi, expected) < 1e-12


def test_momentum_round_trip_unitary(grid, constants):
    psi = build_state(StateSpec.from_string("cat:q0=2,p0=0,sigma=0.5"), grid)
    phi = to_momentum_representation(psi)
    back = from_momentum_representation(phi, grid, constants)
    assert linf(back, psi.samples) < 1e-10


def test_translation_leaves_momentum_modulus(grid):
    phi0 = to_momentum_representation(
        build_state(StateSpec.from_string("gauss:q0=0,p0=0,sigma=1"), grid)
    )
    phi1 = to_momentum_representation(
        build_state(StateSpec.from_string("gauss:q0=1,p0=0,sigma=1"), grid)
    )
    assert linf(np.abs(phi0), np.abs(phi1)) < 1e-10


@pytest.mark.parametrize(
    "spec",
    ["ho:n=0,omega=1", "ho:n=3,omega=1", "gauss:q0=1,p0=0.5,sigma=1", "cat:q0=2,p0=0,sigma=0.5"],
)
def test_parseval_for_factory_states(grid, constants, spec):
    psi = build_state(StateSpec.from_string(spec), grid)
    pg = momentum_grid_of(grid, constants)
    lhs = np.sum(np.abs(psi.samples) ** 2) * grid.dq
    rhs = np.sum(np.abs(to_momentum_representation(psi)) ** 2) * pg.dp
    assert abs(lhs - rhs) < 1e-10


def test_wavefunction_must_be_normalized(grid):
    samples = np.ones(grid.n, dtype=complex)
    with pytest.raises(InvariantViolation):
        Wavefunction(grid, samples)


def test_density_from_pure_is_rank_one(ground):
    rho = density_from_pure(ground)
    eig = rho.eigenvalues()
    assert eig[-1] == pytest.approx(1.0, abs=1e-10)
    assert abs(eig[-2]) < 1e-9
    assert rho.is_positive_semidefinite()


def test_containers_are_immutable(ground):
    with pytest.raises((ValueError, RuntimeError)):
        ground.samples[0] = 1.0


def test_constants_validation():
    with pytest.raises(InvariantViolation):
        PhysicalConstants(hbar=-1.0)
    with pytest.raises(InvariantViolation):
        PhysicalConstants(mass=0.0)
