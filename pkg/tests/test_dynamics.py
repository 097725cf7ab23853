"""Evolution equation, RK4 stepping, and the wave-picture oracle."""

import numpy as np
import pytest

from phasekit import (
    BoundaryLeak,
    EvolutionConfig,
    InvariantViolation,
    PolynomialPotential,
    StateSpec,
    StepTooLarge,
    WrongKind,
    build_state,
    density_from_pure,
    evolve_schrodinger_oracle,
    evolve_wigner,
    expect_phase_space,
    make_position_grid,
    momentum_grid_of,
    normalization,
    observable_pair,
    sn_from_density,
    to_momentum_representation,
    wigner_from_wavefunction,
    wigner_rhs,
)
from phasekit.dynamics import resolved_truncation

from conftest import linf

HARMONIC = PolynomialPotential((0.0, 0.0, 0.5))
QUARTIC_PURE = PolynomialPotential((0.0, 0.0, 0.0, 0.0, 1.0))
QUARTIC_SOFT = PolynomialPotential((0.0, 0.0, 0.0, 0.0, 0.1))
FREE = PolynomialPotential((0.0,))


@pytest.fixture(scope="module")
def wide():
    # evolution tests run on a wider, coarser grid: fast and clean of edge dust
    return make_position_grid(-10.0, 10.0, 128)


@pytest.fixture(scope="module")
def packet(wide):
    return build_state(StateSpec.from_string("gauss:q0=1,p0=0,sigma=1"), wide)


# ---------------------------------------------------------------------------
# potentials and configuration
# ---------------------------------------------------------------------------

def test_potential_evaluation_and_derivatives():
    v = PolynomialPotential((1.0, 0.0, 0.5, 0.0, 0.25))
    q = np.array([0.0, 1.0, 2.0])
    assert linf(v(q), 1 + 0.5 * q**2 + 0.25 * q**4) < 1e-14
    assert v.degree == 4
    assert linf(v.derivative(1)(q), q + q**3) < 1e-14
    assert v.derivative(5).coefficients == (0.0,)


def test_potential_degree_cap():
    with pytest.raises(InvariantViolation):
        PolynomialPotential(tuple(range(10)))


def test_config_validation():
    with pytest.raises(InvariantViolation):
        EvolutionConfig(dt=0.0, steps=10)
    with pytest.raises(InvariantViolation):
        EvolutionConfig(dt=1e-3, steps=0)
    with pytest.raises(InvariantViolation):
        EvolutionConfig(dt=1e-3, steps=10, truncation=-1)


def test_default_truncation_is_exact_for_degree():
    cfg = EvolutionConfig(dt=1e-3, steps=1)
    assert resolved_truncation(FREE, cfg) == 0
    assert resolved_truncation(HARMONIC, cfg) == 1
    assert resolved_truncation(QUARTIC_SOFT, cfg) == 2
    assert resolved_truncation(QUARTIC_SOFT, EvolutionConfig(dt=1e-3, steps=1, truncation=0)) == 0


# ---------------------------------------------------------------------------
# the right-hand side
# ---------------------------------------------------------------------------

def test_free_rhs_is_pure_streaming(packet, wide):
    W = wigner_from_wavefunction(packet)
    rhs = wigner_rhs(W, FREE, EvolutionConfig(dt=1e-3, steps=1))
    # independent streaming computation
    sigma = 2 * np.pi * np.fft.fftfreq(wide.n, d=wide.dq)
    sigma[wide.n // 2] = 0.0
    dWdq = np.fft.ifft(1j * sigma[:, None] * np.fft.fft(W.values, axis=0), axis=0)
    p = momentum_grid_of(wide, packet.constants).points
    assert linf(rhs, -p[None, :] * dWdq) < 1e-12


def test_harmonic_rhs_annihilates_ground_state(wide):
    ground = build_state(StateSpec.from_string("ho:n=0,omega=1"), wide)
    W = wigner_from_wavefunction(ground)
    rhs = wigner_rhs(W, HARMONIC, EvolutionConfig(dt=1e-3, steps=1))
    assert np.max(np.abs(rhs)) < 1e-8


def test_quartic_correction_term_against_finite_differences():
    # for V = q^4 the first correction is -hbar^2 q d^3W/dp^3; check one grid
    # point against a brute-force high-order fit of the p-derivative.  The
    # wide domain buys the momentum resolution the difference oracle needs.
    grid = make_position_grid(-16.0, 16.0, 256)
    ground = build_state(StateSpec.from_string("ho:n=0,omega=1"), grid)
    W = wigner_from_wavefunction(ground)
    cfg1 = EvolutionConfig(dt=1e-4, steps=1, truncation=1)
    cfg0 = EvolutionConfig(dt=1e-4, steps=1, truncation=0)
    term = wigner_rhs(W, QUARTIC_PURE, cfg1) - wigner_rhs(W, QUARTIC_PURE, cfg0)
    pgrid = momentum_grid_of(grid, ground.constants)
    j, k = 136, 132  # q = 1, p ~ 0.8
    window = slice(k - 6, k + 7)
    offsets = pgrid.points[window] - pgrid.points[k]  # centered: keeps the fit conditioned
    coeffs = np.polynomial.polynomial.polyfit(offsets, W.values[j, window].real, deg=9)
    third = 6.0 * coeffs[3]
    expected = -1.0 * grid.points[j] * third
    assert term[j, k].real == pytest.approx(expected, rel=1e-3)


def test_harmonic_series_terminates_after_first_term(packet):
    # V''' = 0, so the default truncation and the classical one run the same
    # code path, bitwise
    W = wigner_from_wavefunction(packet)
    a = wigner_rhs(W, HARMONIC, EvolutionConfig(dt=1e-3, steps=1))
    b = wigner_rhs(W, HARMONIC, EvolutionConfig(dt=1e-3, steps=1, truncation=0))
    assert np.array_equal(a, b)


def test_rhs_rejects_wrong_kind(packet):
    S = sn_from_density(density_from_pure(packet))
    with pytest.raises(WrongKind):
        wigner_rhs(S, FREE, EvolutionConfig(dt=1e-3, steps=1))


# ---------------------------------------------------------------------------
# evolve_wigner
# ---------------------------------------------------------------------------

def test_ground_state_is_stationary(wide):
    ground = build_state(StateSpec.from_string("ho:n=0,omega=1"), wide)
    W = wigner_from_wavefunction(ground)
    out = evolve_wigner(W, HARMONIC, EvolutionConfig(dt=1e-3, steps=500))
    assert linf(out.values, W.values) < 1e-6


def test_quarter_period_rotation(packet, wide, constants):
    W = wigner_from_wavefunction(packet)
    steps = 500
    cfg = EvolutionConfig(dt=(np.pi / 2) / steps, steps=steps)
    out = evolve_wigner(W, HARMONIC, cfg)
    sym_q, _ = observable_pair("q", wide, constants)
    sym_p, _ = observable_pair("p", wide, constants)
    assert abs(expect_phase_space(out, sym_q).real) < 1e-4
    assert expect_phase_space(out, sym_p).real == pytest.approx(-1.0, abs=1e-4)
    # conservation along the way
    assert abs(normalization(out) - 1.0) < 1e-6
    assert np.max(np.abs(out.values.imag)) <= 1e-8 * np.max(np.abs(out.values))


def test_free_ballistic_transport(wide):
    moving = build_state(StateSpec.from_string("gauss:q0=0,p0=1,sigma=1"), wide)
    W = wigner_from_wavefunction(moving)
    out = evolve_wigner(W, FREE, EvolutionConfig(dt=2e-3, steps=500))
    marginal = out.values.sum(axis=1).real
    peak = wide.points[int(np.argmax(marginal))]
    assert abs(peak - 1.0) <= wide.dq


def test_oracle_agreement_harmonic(packet, wide):
    cfg = EvolutionConfig(dt=1e-3, steps=500)
    evolved = evolve_wigner(wigner_from_wavefunction(packet), HARMONIC, cfg)
    oracle = wigner_from_wavefunction(evolve_schrodinger_oracle(packet, HARMONIC, cfg))
    assert linf(evolved.values, oracle.values) < 1e-4


def test_oracle_agreement_quartic_and_truncation_order(packet, wide):
    cfg1 = EvolutionConfig(dt=2.5e-4, steps=1000, truncation=1)
    cfg0 = EvolutionConfig(dt=2.5e-4, steps=1000, truncation=0)
    W0 = wigner_from_wavefunction(packet)
    oracle = wigner_from_wavefunction(evolve_schrodinger_oracle(packet, QUARTIC_SOFT, cfg1))
    err1 = linf(evolve_wigner(W0, QUARTIC_SOFT, cfg1).values, oracle.values)
    err0 = linf(evolve_wigner(W0, QUARTIC_SOFT, cfg0).values, oracle.values)
    assert err1 < 1e-3
    assert err1 < err0


def test_energy_conserved_under_evolution(packet, wide, constants):
    W = wigner_from_wavefunction(packet)
    cfg = EvolutionConfig(dt=2.5e-4, steps=1000, truncation=1)
    out = evolve_wigner(W, QUARTIC_SOFT, cfg)
    symbol, _ = observable_pair("H", wide, constants, QUARTIC_SOFT)
    e0 = expect_phase_space(W, symbol).real
    e1 = expect_phase_space(out, symbol).real
    elapsed = cfg.dt * cfg.steps
    assert abs(e1 - e0) / (abs(e0) * elapsed) < 1e-6


def test_step_bound_guard(packet):
    W = wigner_from_wavefunction(packet)
    with pytest.raises(StepTooLarge):
        evolve_wigner(W, HARMONIC, EvolutionConfig(dt=1.0, steps=1))
    # the bound is tunable
    out = evolve_wigner(
        W, HARMONIC, EvolutionConfig(dt=8e-3, steps=1), step_bound_factor=2.0
    )
    assert out.values.shape == W.values.shape


def test_boundary_monitor_aborts_wrapping_state():
    small = make_position_grid(-8.0, 8.0, 128)
    mover = build_state(StateSpec.from_string("gauss:q0=0,p0=3,sigma=1"), small)
    W = wigner_from_wavefunction(mover)
    with pytest.raises(BoundaryLeak):
        evolve_wigner(W, FREE, EvolutionConfig(dt=4e-3, steps=800))


def test_evolve_rejects_wrong_kind(packet):
    S = sn_from_density(density_from_pure(packet))
    with pytest.raises(WrongKind):
        evolve_wigner(S, FREE, EvolutionConfig(dt=1e-3, steps=1))


def test_on_step_reports_every_step(packet, wide):
    W = wigner_from_wavefunction(packet)
    seen = []
    evolve_wigner(
        W, FREE, EvolutionConfig(dt=1e-3, steps=5), on_step=lambda s, t, v: seen.append(s)
    )
    assert seen == [0, 1, 2, 3, 4, 5]


# ---------------------------------------------------------------------------
# the wave-picture oracle on its own
# ---------------------------------------------------------------------------

def test_eigenstate_modulus_is_stationary(wide):
    psi = build_state(StateSpec.from_string("ho:n=2,omega=1"), wide)
    out = evolve_schrodinger_oracle(psi, HARMONIC, EvolutionConfig(dt=1e-4, steps=10000))
    assert linf(np.abs(out.samples), np.abs(psi.samples)) < 1e-8
    assert abs(np.sum(np.abs(out.samples) ** 2) * wide.dq - 1.0) < 1e-9


def test_oracle_ehrenfest_oscillation(packet, wide):
    out = evolve_schrodinger_oracle(packet, HARMONIC, EvolutionConfig(dt=1e-4, steps=10000))
    q_mean = np.sum(wide.points * np.abs(out.samples) ** 2) * wide.dq
    assert q_mean == pytest.approx(np.cos(1.0), abs=1e-6)


def test_free_oracle_is_exact_momentum_phase(wide, constants):
    moving = build_state(StateSpec.from_string("gauss:q0=0,p0=1,sigma=1"), wide)
    t = 1.0
    out = evolve_schrodinger_oracle(moving, FREE, EvolutionConfig(dt=0.01, steps=100))
    phi0 = to_momentum_representation(moving)
    phi_t = to_momentum_representation(out)
    p = momentum_grid_of(wide, constants).points
    assert linf(phi_t, phi0 * np.exp(-1j * p**2 * t / 2)) < 1e-12
