"""Time evolution: the phase-space evolution equation and its wave oracle.

The Wigner distribution of a particle in a polynomial potential V obeys

    dW/dt = -(p/m) dW/dq
            + sum_{n=0}^{N} [(-1)^n (hbar/2)^(2n) / (2n+1)!]
              * V^(2n+1)(q) * d^(2n+1)W/dp^(2n+1)

with a real right-hand side; the n = 0 term alone is the classical
Liouville flow.  For degree-D potentials every term with 2n+1 > D vanishes
identically, so the series is exact once N >= ceil((D-1)/2) (the default).
Derivatives of W are spectral (periodic wrap, Nyquist mode zeroed for odd
orders); derivatives of V are analytic in the coefficients.

Published version of the sign/prefactor convention: it is validated against
the independent Schrodinger-picture oracle (Strang-split spectral stepping
of psi) rather than transcribed, see the oracle-agreement tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, factorial

import numpy as np

from .core import (
    Kind,
    PhaseSpaceDistribution,
    PhysicalConstants,
    Wavefunction,
    momentum_grid_of,
)
from .errors import BoundaryLeak, InvariantViolation, StepTooLarge, WrongKind

MAX_POTENTIAL_DEGREE = 8
# Evolved distributions carry transform-floor dust of a few 1e-9 at the
# domain edges even for perfectly resolved states; genuine wrap-around
# failures blow past this within a handful of steps.
EVOLUTION_EDGE_TOL = 1e-7


@dataclass(frozen=True)
class PolynomialPotential:
    """V(q) = sum_k coefficients[k] * q^k, degree <= 8."""

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) > MAX_POTENTIAL_DEGREE + 1:
            raise InvariantViolation(
                f"potential degree {len(coeffs) - 1} exceeds {MAX_POTENTIAL_DEGREE}"
            )
        if not all(np.isfinite(c) for c in coeffs):
            raise InvariantViolation("potential coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        for k in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[k] != 0.0:
                return k
        return 0

    def __call__(self, q: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(q, self.coefficients)

    def derivative(self, order: int) -> "PolynomialPotential":
        coeffs = np.polynomial.polynomial.polyder(self.coefficients, m=order)
        return PolynomialPotential(tuple(np.atleast_1d(coeffs)))


FREE_POTENTIAL = PolynomialPotential((0.0,))


@dataclass(frozen=True)
class EvolutionConfig:
    """Fixed-step evolution parameters; truncation None means exact series."""

    dt: float
    steps: int
    truncation: int | None = None
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    boundary_check_every: int = 100

    def __post_init__(self):
        if not self.dt > 0:
            raise InvariantViolation(f"dt must be positive, got {self.dt}")
        if self.steps < 1:
            raise InvariantViolation(f"steps must be >= 1, got {self.steps}")
        if self.truncation is not None and self.truncation < 0:
            raise InvariantViolation(f"truncation must be >= 0, got {self.truncation}")


def resolved_truncation(v: PolynomialPotential, cfg: EvolutionConfig) -> int:
    if cfg.truncation is not None:
        return cfg.truncation
    return max(0, ceil((v.degree - 1) / 2))


class _RhsOperator:
    """Precomputed spectral machinery for one (grid, potential, truncation)."""

    def __init__(self, dist: PhaseSpaceDistribution, v: PolynomialPotential, cfg):
        qgrid, pgrid = dist.qgrid, dist.pgrid
        constants = cfg.constants
        self.mass = constants.mass
        self.p_row = pgrid.points[None, :]
        sigma = 2.0 * np.pi * np.fft.fftfreq(qgrid.n, d=qgrid.dq)
        theta = 2.0 * np.pi * np.fft.fftfreq(pgrid.n, d=pgrid.dp)
        sigma[qgrid.n // 2] = 0.0  # odd-order spectral derivatives drop Nyquist
        theta[pgrid.n // 2] = 0.0
        self.i_sigma_col = (1j * sigma)[:, None]
        self.force_terms = []
        q = qgrid.points
        hbar = constants.hbar
        for n_term in range(resolved_truncation(v, cfg) + 1):
            order = 2 * n_term + 1
            dv = v.derivative(order)
            if all(c == 0.0 for c in dv.coefficients):
                continue
            coeff = (-1.0) ** n_term * (hbar / 2.0) ** (2 * n_term) / factorial(order)
            self.force_terms.append(
                (coeff * dv(q)[:, None], ((1j * theta) ** order)[None, :])
            )

    def __call__(self, values: np.ndarray) -> np.ndarray:
        dq_spec = np.fft.ifft(self.i_sigma_col * np.fft.fft(values, axis=0), axis=0)
        out = -(self.p_row / self.mass) * dq_spec
        if self.force_terms:
            spectrum_p = np.fft.fft(values, axis=1)
            for coeff_col, theta_pow in self.force_terms:
                out += coeff_col * np.fft.ifft(theta_pow * spectrum_p, axis=1)
        return out


def wigner_rhs(
    dist: PhaseSpaceDistribution, v: PolynomialPotential, cfg: EvolutionConfig
) -> np.ndarray:
    """Time derivative of the Wigner values (same shape as dist.values)."""
    if dist.kind is not Kind.WIGNER:
        raise WrongKind(f"evolution needs a Wigner distribution, got {dist.kind}")
    return _RhsOperator(dist, v, cfg)(dist.values)


def _check_step_bounds(dist, v, cfg, factor):
    qgrid, pgrid = dist.qgrid, dist.pgrid
    advective = qgrid.dq * cfg.constants.mass / pgrid.p_max
    bound = factor * advective
    grad_max = float(np.max(np.abs(v.derivative(1)(qgrid.points))))
    if grad_max > 0:
        bound = min(bound, factor * pgrid.dp / grad_max)
    if cfg.dt > bound:
        raise StepTooLarge(f"dt={cfg.dt:g} exceeds the step bound {bound:g}")


def _check_edges(values: np.ndarray, step: int):
    edge = max(
        float(np.max(np.abs(values[0, :]))),
        float(np.max(np.abs(values[-1, :]))),
        float(np.max(np.abs(values[:, 0]))),
        float(np.max(np.abs(values[:, -1]))),
    )
    if edge > EVOLUTION_EDGE_TOL:
        raise BoundaryLeak(
            f"evolved distribution reached edge amplitude {edge:.3e} "
            f"> {EVOLUTION_EDGE_TOL:.0e} at step {step}"
        )


def evolve_wigner(
    dist0: PhaseSpaceDistribution,
    v: PolynomialPotential,
    cfg: EvolutionConfig,
    on_step=None,
    step_bound_factor: float = 1.0,
) -> PhaseSpaceDistribution:
    """Classical RK4 stepping of :func:`wigner_rhs` for cfg.steps steps.

    ``on_step(index, time, values)`` is invoked after every step with the raw
    value array (index 0, t=0 reports the initial state).  The edge monitor
    runs every ``cfg.boundary_check_every`` steps.
    """
    if dist0.kind is not Kind.WIGNER:
        raise WrongKind(f"evolution needs a Wigner distribution, got {dist0.kind}")
    _check_step_bounds(dist0, v, cfg, step_bound_factor)
    rhs = _RhsOperator(dist0, v, cfg)
    values = dist0.values.astype(complex)
    dt = cfg.dt
    if on_step is not None:
        on_step(0, 0.0, values)
    for step in range(1, cfg.steps + 1):
        k1 = rhs(values)
        k2 = rhs(values + 0.5 * dt * k1)
        k3 = rhs(values + 0.5 * dt * k2)
        k4 = rhs(values + dt * k3)
        values = values + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % cfg.boundary_check_every == 0 or step == cfg.steps:
            _check_edges(values, step)
        if on_step is not None:
            on_step(step, step * dt, values)
    return PhaseSpaceDistribution(
        Kind.WIGNER, dist0.qgrid, dist0.pgrid, values, dist0.constants
    )


def evolve_schrodinger_oracle(
    psi0: Wavefunction, v: PolynomialPotential, cfg: EvolutionConfig
) -> Wavefunction:
    """Strang-split spectral propagator; independent ground truth.

    Each step applies exp(-i V dt / 2 hb), a full kinetic step in the
    momentum representation, and exp(-i V dt / 2 hb) again; the norm is
    preserved to round-off.
    """
    grid, constants = psi0.grid, psi0.constants
    hbar, mass = constants.hbar, constants.mass
    pgrid = momentum_grid_of(grid, constants)
    p_slots = np.fft.ifftshift(pgrid.points)
    half_v = np.exp(-0.5j * v(grid.points) * cfg.dt / hbar)
    kinetic = np.exp(-0.5j * p_slots**2 * cfg.dt / (mass * hbar))
    samples = psi0.samples.copy()
    for _ in range(cfg.steps):
        samples = half_v * samples
        samples = np.fft.ifft(kinetic * np.fft.fft(samples))
        samples = half_v * samples
    return Wavefunction(grid, samples, constants)
