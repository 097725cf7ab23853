"""Grids, state containers and the position<->momentum spectral transform.

Conventions (code units, hbar = m = 1 by default):

* position grid: q_j = q_min + j*dq, j = 0..n-1, dq = (q_max - q_min)/n.
  The right endpoint is excluded; all transforms treat the interval as
  periodic, so states must decay at the edges.
* momentum grid: p_k = 2*pi*hbar*k/(n*dq) for k = -n/2 .. n/2-1, stored
  ascending.  The pairing dp*dq*n = 2*pi*hbar holds exactly and realizes
  <q|p> = (2*pi*hbar)^(-1/2) * exp(i p q / hbar) as a discrete unitary.
* integrals are plain Riemann sums (spectrally accurate for smooth
  periodic/decaying integrands on these grids).

Everything here is an immutable value; functions are pure and safe to call
from any number of threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateInterval,
    InvariantViolation,
    NonPowerOfTwo,
)

NORMALIZATION_TOL = 1e-9
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-9


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar and the particle mass, in code units."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0 and np.isfinite(self.hbar)):
            raise InvariantViolation(f"hbar must be positive, got {self.hbar}")
        if not (self.mass > 0 and np.isfinite(self.mass)):
            raise InvariantViolation(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class PositionGrid:
    q_min: float
    q_max: float
    n: int

    def __post_init__(self):
        if self.q_max <= self.q_min:
            raise DegenerateInterval(
                f"need q_max > q_min, got [{self.q_min}, {self.q_max}]"
            )
        n = self.n
        if n < 8 or (n & (n - 1)) != 0:
            raise NonPowerOfTwo(f"n must be a power of two >= 8, got {n}")

    @property
    def dq(self) -> float:
        return (self.q_max - self.q_min) / self.n

    @property
    def points(self) -> np.ndarray:
        return self.q_min + self.dq * np.arange(self.n)


@dataclass(frozen=True)
class MomentumGrid:
    """Momentum samples paired to a PositionGrid: dp*dq*n = 2*pi*hbar exactly."""

    n: int
    dp: float

    @property
    def points(self) -> np.ndarray:
        return self.dp * (np.arange(self.n) - self.n // 2)

    @property
    def p_max(self) -> float:
        return self.dp * (self.n // 2)


def make_position_grid(q_min: float, q_max: float, n: int) -> PositionGrid:
    """Uniform periodic position grid with n a power of two (n >= 8)."""
    return PositionGrid(float(q_min), float(q_max), int(n))


def momentum_grid_of(grid: PositionGrid, constants: PhysicalConstants) -> MomentumGrid:
    """The spectrally paired momentum grid of a position grid."""
    dp = 2.0 * np.pi * constants.hbar / (grid.n * grid.dq)
    return MomentumGrid(n=grid.n, dp=dp)


def _frozen_array(values, dtype) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Wavefunction:
    """Complex samples psi(q_j) on a PositionGrid, normalized to sum |psi|^2 dq = 1."""

    grid: PositionGrid
    samples: np.ndarray
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        samples = _frozen_array(self.samples, complex)
        if samples.shape != (self.grid.n,):
            raise InvariantViolation(
                f"samples shape {samples.shape} does not match grid n={self.grid.n}"
            )
        norm = np.sum(np.abs(samples) ** 2) * self.grid.dq
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise InvariantViolation(
                f"wavefunction norm deviates from 1 by {abs(norm - 1.0):.3e}"
            )
        object.__setattr__(self, "samples", samples)

    def edge_amplitude(self) -> float:
        """Largest |psi| on the outermost sample of either edge."""
        return float(max(abs(self.samples[0]), abs(self.samples[-1])))


@dataclass(frozen=True)
class DensityMatrix:
    """<q_i| rho |q_j> on a PositionGrid pair; Hermitian with unit trace."""

    grid: PositionGrid
    elements: np.ndarray
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        elements = _frozen_array(self.elements, complex)
        n = self.grid.n
        if elements.shape != (n, n):
            raise InvariantViolation(
                f"elements shape {elements.shape} does not match grid n={n}"
            )
        herm = np.max(np.abs(elements - elements.conj().T))
        if herm > HERMITICITY_TOL:
            raise InvariantViolation(f"hermiticity residual {herm:.3e} > {HERMITICITY_TOL}")
        trace = np.trace(elements).real * self.grid.dq
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"trace deviates from 1 by {abs(trace - 1.0):.3e}")
        object.__setattr__(self, "elements", elements)

    def eigenvalues(self) -> np.ndarray:
        """Operator eigenvalues (ascending); the dq weight makes them sum to 1."""
        return np.linalg.eigvalsh(self.elements) * self.grid.dq

    def is_positive_semidefinite(self, tol: float = 1e-9) -> bool:
        """On-demand PSD check: smallest operator eigenvalue >= -tol."""
        return bool(self.eigenvalues()[0] >= -tol)


class Kind(enum.Enum):
    WIGNER = "wigner"
    SOBOUTI_NASIRI = "sn"


@dataclass(frozen=True)
class PhaseSpaceDistribution:
    """Complex q x p grid of distribution values, tagged Wigner or Sobouti-Nasiri.

    The container itself performs no numerical validation (time derivatives
    and scaled copies share this shape); the transform constructors and the
    verification suite check normalization and, for the Wigner kind, reality.
    """

    kind: Kind
    qgrid: PositionGrid
    pgrid: MomentumGrid
    values: np.ndarray
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        values = _frozen_array(self.values, complex)
        if values.shape != (self.qgrid.n, self.pgrid.n):
            raise InvariantViolation(
                f"values shape {values.shape} does not match grids "
                f"({self.qgrid.n}, {self.pgrid.n})"
            )
        object.__setattr__(self, "values", values)


def to_momentum_representation(psi: Wavefunction) -> np.ndarray:
    """phi(p_k) = (2*pi*hbar)^(-1/2) * sum_j exp(-i p_k q_j / hbar) psi_j dq.

    Unitary: sum |phi|^2 dp = sum |psi|^2 dq exactly (Parseval).
    """
    grid, hbar = psi.grid, psi.constants.hbar
    pgrid = momentum_grid_of(grid, psi.constants)
    spectrum = np.fft.fftshift(np.fft.fft(psi.samples))
    phase = np.exp(-1j * pgrid.points * grid.q_min / hbar)
    return grid.dq / np.sqrt(2.0 * np.pi * hbar) * phase * spectrum


def from_momentum_representation(
    phi: np.ndarray, grid: PositionGrid, constants: PhysicalConstants
) -> np.ndarray:
    """Inverse of :func:`to_momentum_representation` (returns raw samples)."""
    hbar = constants.hbar
    pgrid = momentum_grid_of(grid, constants)
    phase = np.exp(1j * pgrid.points * grid.q_min / hbar)
    spectrum = np.fft.ifftshift(phase * np.asarray(phi, dtype=complex))
    return pgrid.dp / np.sqrt(2.0 * np.pi * hbar) * grid.n * np.fft.ifft(spectrum)
