"""Phase-space distributions: Wigner, Sobouti-Nasiri, and the map between them.

Discrete realizations on the periodic grid (hb = hbar):

* Wigner, from the centered matrix element,

      W(q_j, p_k) = dq/(2 pi hb) * sum_m <q_j - y/2| rho |q_j + y/2>
                    * exp(i p_k y / hb),        y = m dq,  m = -n/2 .. n/2-1

  Half-integer shifts q_j +- y/2 are exact points of a doubled-resolution
  grid obtained by spectral interpolation (zero padding), so the reality of
  W is limited only by round-off, not by interpolation error.  The single
  unpaired Nyquist term m = -n/2 is symmetrized (its conjugate partner lies
  just outside the window), which makes the m-sum exactly Hermitian.

* Sobouti-Nasiri, from the asymmetric matrix element,

      P(q_j, p_k) = dq/(2 pi hb) * sum_m <q_j| rho |q_j + y> exp(i p_k y / hb)

  Here y = m dq needs whole-grid shifts only and the m-sum runs over one
  full period, so the transform is an exact DFT of the matrix rows.  For a
  pure state it factorizes as (2 pi hb)^(-1/2) psi(q) conj(phi(p))
  exp(-i p q / hb), which the tests use as an oracle.

* The two are related by a unitary half-shear: in the double Fourier
  representation (frequencies sigma, theta conjugate to q, p) the Wigner
  values are exp(SHEAR_SIGN * i hb sigma theta / 2) times the Sobouti-Nasiri
  ones.  The sign is a convention coupled to the transform orientation; it
  is pinned by the cross-validation against the centered transform and
  frozen below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    Kind,
    MomentumGrid,
    PhaseSpaceDistribution,
    PhysicalConstants,
    PositionGrid,
    Wavefunction,
    momentum_grid_of,
)
from .errors import BoundaryLeak, InvariantViolation, WrongKind
from .states import BOUNDARY_AMPLITUDE_TOL

# Sign of the exponent in the Sobouti-Nasiri -> Wigner multiplier
# exp(SHEAR_SIGN * 0.5j * hbar * sigma * theta); +1 breaks the path
# equivalence with the centered transform (see test_shear_sign).
SHEAR_SIGN = -1.0

MARGINAL_IMAG_TOL = 1e-9
MARGINAL_NEGATIVE_TOL = 1e-9
MARGINAL_SUM_TOL = 1e-7


def _refine(samples: np.ndarray) -> np.ndarray:
    """Spectral interpolation onto the doubled grid (Nyquist bin split)."""
    n = samples.size
    spectrum = np.fft.fft(samples)
    padded = np.zeros(2 * n, dtype=complex)
    padded[: n // 2] = spectrum[: n // 2]
    padded[2 * n - (n // 2 - 1):] = spectrum[n // 2 + 1:]
    padded[n // 2] = 0.5 * spectrum[n // 2]
    padded[2 * n - n // 2] = 0.5 * spectrum[n // 2]
    return 2.0 * np.fft.ifft(padded)


def _refine_matrix(elements: np.ndarray) -> np.ndarray:
    """Doubled-grid interpolation of a kernel, one axis at a time."""
    n = elements.shape[0]

    def pad(spec: np.ndarray, axis: int) -> np.ndarray:
        shape = list(spec.shape)
        shape[axis] = 2 * n
        out = np.zeros(shape, dtype=complex)
        src = np.moveaxis(spec, axis, 0)
        dst = np.moveaxis(out, axis, 0)
        dst[: n // 2] = src[: n // 2]
        dst[2 * n - (n // 2 - 1):] = src[n // 2 + 1:]
        dst[n // 2] = 0.5 * src[n // 2]
        dst[2 * n - n // 2] = 0.5 * src[n // 2]
        return out

    spec = np.fft.fft2(elements)
    return 4.0 * np.fft.ifft2(pad(pad(spec, 0), 1))


def _signed_slots(n: int) -> np.ndarray:
    """FFT slot -> signed index: 0..n/2-1, then -n/2..-1."""
    k = np.arange(n)
    return np.where(k < n // 2, k, k - n)


def _wigner_rows_to_distribution(rows, grid, constants) -> PhaseSpaceDistribution:
    n = grid.n
    rows[:, n // 2] = rows[:, n // 2].real  # symmetrize the unpaired Nyquist term
    values = (grid.dq / (2.0 * np.pi * constants.hbar)) * n * np.fft.ifft(rows, axis=1)
    values = np.fft.fftshift(values, axes=1)
    return PhaseSpaceDistribution(
        Kind.WIGNER, grid, momentum_grid_of(grid, constants), values, constants
    )


def wigner_from_wavefunction(psi: Wavefunction) -> PhaseSpaceDistribution:
    """Wigner distribution of a pure state (real up to round-off)."""
    edge = psi.edge_amplitude()
    if edge > BOUNDARY_AMPLITUDE_TOL:
        raise BoundaryLeak(
            f"wavefunction edge amplitude {edge:.3e} > {BOUNDARY_AMPLITUDE_TOL:.0e}"
        )
    n = psi.grid.n
    fine = _refine(psi.samples)
    j2 = 2 * np.arange(n)[:, None]
    m = _signed_slots(n)[None, :]
    rows = np.conj(fine[(j2 + m) % (2 * n)]) * fine[(j2 - m) % (2 * n)]
    return _wigner_rows_to_distribution(rows, psi.grid, psi.constants)


def wigner_from_density(rho: DensityMatrix) -> PhaseSpaceDistribution:
    """Wigner distribution of a (possibly mixed) density matrix."""
    n = rho.grid.n
    fine = _refine_matrix(rho.elements)
    j2 = 2 * np.arange(n)[:, None]
    m = _signed_slots(n)[None, :]
    rows = fine[(j2 - m) % (2 * n), (j2 + m) % (2 * n)]
    return _wigner_rows_to_distribution(rows, rho.grid, rho.constants)


def sn_from_density(rho: DensityMatrix) -> PhaseSpaceDistribution:
    """Sobouti-Nasiri distribution: generically complex, same marginals."""
    grid, constants = rho.grid, rho.constants
    n = grid.n
    j = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    rows = rho.elements[j, (j + m) % n]
    values = (grid.dq / (2.0 * np.pi * constants.hbar)) * n * np.fft.ifft(rows, axis=1)
    values = np.fft.fftshift(values, axes=1)
    return PhaseSpaceDistribution(
        Kind.SOBOUTI_NASIRI, grid, momentum_grid_of(grid, constants), values, constants
    )


def shear_multiplier(
    qgrid: PositionGrid, pgrid: MomentumGrid, hbar: float, sign: float = SHEAR_SIGN
) -> np.ndarray:
    sigma = 2.0 * np.pi * np.fft.fftfreq(qgrid.n, d=qgrid.dq)
    theta = 2.0 * np.pi * np.fft.fftfreq(pgrid.n, d=pgrid.dp)
    return np.exp(sign * 0.5j * hbar * np.outer(sigma, theta))


def apply_shear(values: np.ndarray, qgrid, pgrid, hbar, sign=SHEAR_SIGN) -> np.ndarray:
    """Multiply the double spectral transform by the half-shear phase."""
    return np.fft.ifft2(np.fft.fft2(values) * shear_multiplier(qgrid, pgrid, hbar, sign))


def sn_to_wigner(psn: PhaseSpaceDistribution) -> PhaseSpaceDistribution:
    """Unitary map from the Sobouti-Nasiri distribution to the Wigner one."""
    if psn.kind is not Kind.SOBOUTI_NASIRI:
        raise WrongKind(f"expected a Sobouti-Nasiri distribution, got {psn.kind}")
    values = apply_shear(psn.values, psn.qgrid, psn.pgrid, psn.constants.hbar)
    return PhaseSpaceDistribution(
        Kind.WIGNER, psn.qgrid, psn.pgrid, values, psn.constants
    )


@dataclass(frozen=True)
class MarginalVector:
    """A probability density on one of the two axes."""

    grid: PositionGrid | MomentumGrid
    values: np.ndarray

    @property
    def spacing(self) -> float:
        return self.grid.dq if isinstance(self.grid, PositionGrid) else self.grid.dp


def _as_marginal(raw: np.ndarray, grid, spacing: float) -> MarginalVector:
    imag = float(np.max(np.abs(raw.imag)))
    if imag > MARGINAL_IMAG_TOL:
        raise InvariantViolation(f"marginal imaginary residual {imag:.3e}")
    values = raw.real
    low = float(values.min())
    if low < -MARGINAL_NEGATIVE_TOL:
        raise InvariantViolation(f"marginal negative excursion {low:.3e}")
    total = float(values.sum() * spacing)
    if abs(total - 1.0) > MARGINAL_SUM_TOL:
        raise InvariantViolation(f"marginal sum deviates from 1 by {abs(total - 1.0):.3e}")
    return MarginalVector(grid=grid, values=values)


def momentum_marginal(dist: PhaseSpaceDistribution) -> MarginalVector:
    """Integrate out q.  Holds for both kinds (the shared marginal assumption)."""
    raw = dist.values.sum(axis=0) * dist.qgrid.dq
    return _as_marginal(raw, dist.pgrid, dist.pgrid.dp)


def position_marginal(dist: PhaseSpaceDistribution) -> MarginalVector:
    """Integrate out p; equals |psi|^2 (pure) or the diagonal of rho."""
    raw = dist.values.sum(axis=1) * dist.pgrid.dp
    return _as_marginal(raw, dist.qgrid, dist.qgrid.dq)


def momentum_density_oracle(rho: DensityMatrix) -> MarginalVector:
    """<p_k| rho |p_k> via the unitary momentum transform of both indices.

    Independent ground truth for :func:`momentum_marginal`.
    """
    grid, constants = rho.grid, rho.constants
    pgrid = momentum_grid_of(grid, constants)
    hbar = constants.hbar
    transform = (grid.dq / np.sqrt(2.0 * np.pi * hbar)) * np.exp(
        -1j * np.outer(pgrid.points, grid.points) / hbar
    )
    rho_p = transform @ rho.elements @ transform.conj().T
    return _as_marginal(np.diag(rho_p), pgrid, pgrid.dp)


def normalization(dist: PhaseSpaceDistribution) -> complex:
    """sum of values * dq * dp (should be 1 for a distribution)."""
    return complex(dist.values.sum() * dist.qgrid.dq * dist.pgrid.dp)
