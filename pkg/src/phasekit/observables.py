"""Weyl symbols of operator kernels and phase-space averaging.

The symbol of an operator A-hat is the centered transform without the
1/(2 pi hbar) prefactor,

    A(q_j, p_k) = sum_y <q_j - y/2| A |q_j + y/2> exp(i p_k y / hbar) dy,

computed here as the asymmetric (Kirkwood-type) row transform followed by
the exact half-shear multiplier, the same unitary that maps the
Sobouti-Nasiri distribution to the Wigner one.  This route needs no matrix
interpolation, so delta-like kernels (identity, q-hat, any V(q-hat)) come
out exact, and it is algebraically invertible: :func:`kernel_from_symbol`
undoes it to round-off.

Expectation values then follow from the averaging rule
<A> = sum dist * symbol * dq * dp, with Tr(rho A) dq^2 as the independent
trace oracle.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    DensityMatrix,
    MomentumGrid,
    PhaseSpaceDistribution,
    PhysicalConstants,
    PositionGrid,
    momentum_grid_of,
)
from .dynamics import PolynomialPotential
from .errors import GridMismatch, InvariantViolation
from .transforms import apply_shear, shear_multiplier


@dataclass(frozen=True)
class OperatorKernel:
    """<q_i| A |q_j> on a position grid; Hermiticity is not required."""

    grid: PositionGrid
    elements: np.ndarray

    def __post_init__(self):
        elements = np.array(self.elements, dtype=complex)
        n = self.grid.n
        if elements.shape != (n, n):
            raise InvariantViolation(
                f"kernel shape {elements.shape} does not match grid n={n}"
            )
        if not np.isfinite(elements).all():
            raise InvariantViolation("kernel entries must be finite")
        elements.setflags(write=False)
        object.__setattr__(self, "elements", elements)


@dataclass(frozen=True)
class WeylSymbol:
    qgrid: PositionGrid
    pgrid: MomentumGrid
    values: np.ndarray


def _asymmetric_symbol(kernel: OperatorKernel) -> np.ndarray:
    """dy-weighted row transform sum_y <q_j| A |q_j + y> exp(i p_k y / hbar)."""
    n = kernel.grid.n
    j = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    rows = kernel.elements[j, (j + m) % n]
    return np.fft.fftshift(kernel.grid.dq * n * np.fft.ifft(rows, axis=1), axes=1)


def weyl_symbol_of_kernel(
    a: OperatorKernel, constants: PhysicalConstants
) -> WeylSymbol:
    """Phase-space symbol of an operator kernel (no 1/(2 pi hbar) prefactor)."""
    pgrid = momentum_grid_of(a.grid, constants)
    values = apply_shear(_asymmetric_symbol(a), a.grid, pgrid, constants.hbar)
    return WeylSymbol(a.grid, pgrid, values)


def kernel_from_symbol(symbol: WeylSymbol, constants: PhysicalConstants) -> OperatorKernel:
    """Exact inverse of :func:`weyl_symbol_of_kernel`."""
    grid, pgrid = symbol.qgrid, symbol.pgrid
    n = grid.n
    undone = np.fft.ifft2(
        np.fft.fft2(symbol.values)
        / shear_multiplier(grid, pgrid, constants.hbar)
    )
    rows = np.fft.fft(np.fft.ifftshift(undone, axes=1), axis=1) / (n * grid.dq)
    elements = np.zeros((n, n), dtype=complex)
    j = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    elements[j, (j + m) % n] = rows
    return OperatorKernel(grid, elements)


# ---------------------------------------------------------------------------
# kernels of the standard observables
# ---------------------------------------------------------------------------

def identity_kernel(grid: PositionGrid) -> OperatorKernel:
    """delta(q_i - q_j) -> delta_ij / dq."""
    return OperatorKernel(grid, np.eye(grid.n) / grid.dq)


def position_kernel(grid: PositionGrid) -> OperatorKernel:
    return OperatorKernel(grid, np.diag(grid.points) / grid.dq)


def potential_kernel(grid: PositionGrid, v: PolynomialPotential) -> OperatorKernel:
    return OperatorKernel(grid, np.diag(v(grid.points).astype(complex)) / grid.dq)


def _circulant_from_momentum_values(grid, constants, p_values) -> np.ndarray:
    # <q_i| f(p-hat) |q_j> built spectrally: f sampled on the momentum grid,
    # transformed back to a circulant position kernel.
    column = np.fft.ifft(np.fft.ifftshift(p_values)) / grid.dq
    i = np.arange(grid.n)[:, None]
    j = np.arange(grid.n)[None, :]
    return column[(i - j) % grid.n]


def momentum_kernel(grid: PositionGrid, constants: PhysicalConstants) -> OperatorKernel:
    pgrid = momentum_grid_of(grid, constants)
    return OperatorKernel(grid, _circulant_from_momentum_values(grid, constants, pgrid.points))


def kinetic_kernel(grid: PositionGrid, constants: PhysicalConstants) -> OperatorKernel:
    pgrid = momentum_grid_of(grid, constants)
    values = pgrid.points**2 / (2.0 * constants.mass)
    return OperatorKernel(grid, _circulant_from_momentum_values(grid, constants, values))


def hamiltonian_kernel(
    grid: PositionGrid, v: PolynomialPotential, constants: PhysicalConstants
) -> OperatorKernel:
    elements = kinetic_kernel(grid, constants).elements + potential_kernel(grid, v).elements
    return OperatorKernel(grid, elements)


# ---------------------------------------------------------------------------
# closed-form symbols
# ---------------------------------------------------------------------------

class BuiltinObservable(enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"
    KINETIC = "kinetic"
    POTENTIAL = "potential"
    HAMILTONIAN = "hamiltonian"


def builtin_symbol(
    name: BuiltinObservable,
    qgrid: PositionGrid,
    pgrid: MomentumGrid,
    constants: PhysicalConstants,
    v: PolynomialPotential | None = None,
) -> WeylSymbol:
    """Analytic symbol on the grid, bypassing the kernel transform."""
    q_col = qgrid.points[:, None]
    p_row = pgrid.points[None, :]
    ones_q = np.ones((qgrid.n, 1))
    ones_p = np.ones((1, pgrid.n))
    if name is BuiltinObservable.POSITION:
        values = q_col * ones_p
    elif name is BuiltinObservable.MOMENTUM:
        values = ones_q * p_row
    elif name is BuiltinObservable.KINETIC:
        values = ones_q * (p_row**2 / (2.0 * constants.mass))
    elif name is BuiltinObservable.POTENTIAL:
        values = v(q_col) * ones_p
    elif name is BuiltinObservable.HAMILTONIAN:
        values = p_row**2 / (2.0 * constants.mass) + v(q_col)
    else:  # pragma: no cover
        raise ValueError(name)
    return WeylSymbol(qgrid, pgrid, values.astype(complex))


def observable_pair(
    name: str,
    grid: PositionGrid,
    constants: PhysicalConstants,
    v: PolynomialPotential | None = None,
) -> tuple[WeylSymbol, OperatorKernel]:
    """Matched (symbol, kernel) pair for the observables q, p, q2, H."""
    pgrid = momentum_grid_of(grid, constants)
    if name == "q":
        return (
            builtin_symbol(BuiltinObservable.POSITION, grid, pgrid, constants),
            position_kernel(grid),
        )
    if name == "p":
        return (
            builtin_symbol(BuiltinObservable.MOMENTUM, grid, pgrid, constants),
            momentum_kernel(grid, constants),
        )
    if name == "q2":
        square = PolynomialPotential((0.0, 0.0, 1.0))
        return (
            builtin_symbol(BuiltinObservable.POTENTIAL, grid, pgrid, constants, square),
            potential_kernel(grid, square),
        )
    if name == "H":
        if v is None:
            raise ValueError("observable H needs a potential")
        return (
            builtin_symbol(BuiltinObservable.HAMILTONIAN, grid, pgrid, constants, v),
            hamiltonian_kernel(grid, v, constants),
        )
    raise ValueError(f"unknown observable {name!r}")


# ---------------------------------------------------------------------------
# averaging
# ---------------------------------------------------------------------------

def expect_phase_space(dist: PhaseSpaceDistribution, symbol: WeylSymbol) -> complex:
    """<A> = sum dist * symbol * dq * dp (works for either distribution kind)."""
    if dist.qgrid != symbol.qgrid or dist.pgrid != symbol.pgrid:
        raise GridMismatch("distribution and symbol live on different grids")
    return complex(
        np.sum(dist.values * symbol.values) * dist.qgrid.dq * dist.pgrid.dp
    )


def expect_operator_oracle(rho: DensityMatrix, a: OperatorKernel) -> complex:
    """Tr(rho A) with the dq^2 measure; ground truth for the averaging rule."""
    if rho.grid != a.grid:
        raise GridMismatch("density matrix and kernel live on different grids")
    return complex(np.einsum("ij,ji->", rho.elements, a.elements) * rho.grid.dq**2)
