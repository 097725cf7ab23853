"""Analytic test-state factory: oscillator eigenstates, Gaussian packets, cats.

All states come with closed-form Wigner / momentum-space counterparts, which
is what makes them usable as oracles elsewhere.  Oscillator levels are built
with the stable two-term Hermite-function recurrence

    psi_0 = (m w / pi hbar)^(1/4) exp(-xi^2/2),      xi = q sqrt(m w / hbar)
    psi_k = sqrt(2/k) xi psi_{k-1} - sqrt((k-1)/k) psi_{k-2}

renormalized on the grid at every step, so high levels neither overflow nor
accumulate drift.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .core import (
    DensityMatrix,
    PhysicalConstants,
    PositionGrid,
    Wavefunction,
)
from .errors import BoundaryLeak, GridMismatch, InvalidSpec, WeightMismatch

# Edge amplitude a state may carry before it is rejected as not fitting the
# grid.  Oscillator levels up to ~9 pass on the default (-8, 8, 256) grid.
BOUNDARY_AMPLITUDE_TOL = 1e-7

# Seed for all randomized-but-reproducible mixtures used by checks.
DEFAULT_MIXTURE_SEED = 1024

_KINDS = ("ho", "gauss", "cat")


@dataclass(frozen=True)
class StateSpec:
    """Parametric description of a factory state.

    Canonical textual forms (the CLI syntax):
        "ho:n=2,omega=1"
        "gauss:q0=1,p0=0,sigma=1"
        "cat:q0=2,p0=0,sigma=0.5"
    """

    kind: str
    level: int = 0
    omega: float = 1.0
    q0: float = 0.0
    p0: float = 0.0
    sigma: float = 1.0
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidSpec(f"unknown state kind {self.kind!r}")
        if self.kind == "ho":
            if self.level < 0:
                raise InvalidSpec(f"oscillator level must be >= 0, got {self.level}")
            if not self.omega > 0:
                raise InvalidSpec(f"omega must be positive, got {self.omega}")
        else:
            if not self.sigma > 0:
                raise InvalidSpec(f"sigma must be positive, got {self.sigma}")

    def to_string(self) -> str:
        if self.kind == "ho":
            return f"ho:n={self.level},omega={self.omega:g}"
        return f"{self.kind}:q0={self.q0:g},p0={self.p0:g},sigma={self.sigma:g}"

    @classmethod
    def from_string(cls, text: str, constants: PhysicalConstants | None = None) -> "StateSpec":
        constants = constants or PhysicalConstants()
        m = re.fullmatch(r"(\w+):(.*)", text.strip())
        if not m:
            raise InvalidSpec(f"cannot parse state spec {text!r}")
        kind, body = m.group(1), m.group(2)
        params = {}
        for item in body.split(","):
            kv = re.fullmatch(r"\s*(\w+)\s*=\s*([^\s]+)\s*", item)
            if not kv:
                raise InvalidSpec(f"cannot parse parameter {item!r} in {text!r}")
            params[kv.group(1)] = kv.group(2)
        try:
            if kind == "ho":
                return cls(
                    kind="ho",
                    level=int(params.pop("n")),
                    omega=float(params.pop("omega", 1.0)),
                    constants=constants,
                    **_reject_leftovers(params, text),
                )
            if kind in ("gauss", "cat"):
                return cls(
                    kind=kind,
                    q0=float(params.pop("q0", 0.0)),
                    p0=float(params.pop("p0", 0.0)),
                    sigma=float(params.pop("sigma", 1.0)),
                    constants=constants,
                    **_reject_leftovers(params, text),
                )
        except (KeyError, ValueError) as exc:
            raise InvalidSpec(f"bad parameters in state spec {text!r}: {exc}") from exc
        raise InvalidSpec(f"unknown state kind {kind!r}")


def _reject_leftovers(params: dict, text: str) -> dict:
    if params:
        raise InvalidSpec(f"unknown parameters {sorted(params)} in state spec {text!r}")
    return {}


def _normalized(samples: np.ndarray, dq: float) -> np.ndarray:
    return samples / np.sqrt(np.sum(np.abs(samples) ** 2) * dq)


def ho_eigenstates(
    grid: PositionGrid,
    max_level: int,
    omega: float = 1.0,
    constants: PhysicalConstants | None = None,
) -> list[Wavefunction]:
    """Oscillator eigenstates 0..max_level via the normalized recurrence."""
    constants = constants or PhysicalConstants()
    xi = grid.points * np.sqrt(constants.mass * omega / constants.hbar)
    dq = grid.dq
    levels = [_normalized(np.exp(-(xi**2) / 2.0).astype(complex), dq)]
    for k in range(1, max_level + 1):
        prev2 = levels[k - 2] if k >= 2 else 0.0
        raw = np.sqrt(2.0 / k) * xi * levels[k - 1] - np.sqrt((k - 1) / k) * prev2
        levels.append(_normalized(raw, dq))
    return [Wavefunction(grid, v, constants) for v in levels]


def _gaussian_branch(grid, q0, p0, sigma, hbar) -> np.ndarray:
    q = grid.points
    return np.exp(-((q - q0) ** 2) / (2.0 * sigma**2)) * np.exp(1j * p0 * (q - q0) / hbar)


def build_state(spec: StateSpec, grid: PositionGrid) -> Wavefunction:
    """Sample a factory state on the grid, enforcing edge decay."""
    constants = spec.constants
    dq = grid.dq
    if spec.kind == "ho":
        psi = ho_eigenstates(grid, spec.level, spec.omega, constants)[spec.level]
        samples = psi.samples
    elif spec.kind == "gauss":
        samples = _normalized(
            _gaussian_branch(grid, spec.q0, spec.p0, spec.sigma, constants.hbar), dq
        )
    else:  # cat: even superposition of branches at +,- (q0, p0)
        plus = _gaussian_branch(grid, spec.q0, spec.p0, spec.sigma, constants.hbar)
        minus = _gaussian_branch(grid, -spec.q0, -spec.p0, spec.sigma, constants.hbar)
        samples = _normalized(plus + minus, dq)
    edge = max(abs(samples[0]), abs(samples[-1]))
    if edge > BOUNDARY_AMPLITUDE_TOL:
        raise BoundaryLeak(
            f"state {spec.to_string()!r} has edge amplitude {edge:.3e} "
            f"> {BOUNDARY_AMPLITUDE_TOL:.0e}; use a wider grid"
        )
    return Wavefunction(grid, samples, constants)


def density_from_pure(psi: Wavefunction) -> DensityMatrix:
    """Rank-one density matrix psi_i conj(psi_j)."""
    return DensityMatrix(
        psi.grid, np.outer(psi.samples, np.conj(psi.samples)), psi.constants
    )


def density_mixture(weights, states: list[Wavefunction]) -> DensityMatrix:
    """Convex combination of rank-one densities for states on one grid."""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(states):
        raise WeightMismatch(
            f"{len(weights)} weights for {len(states)} states"
        )
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise WeightMismatch(
            f"weights must be >= 0 and sum to 1 (sum deviates by "
            f"{abs(weights.sum() - 1.0):.3e})"
        )
    grid, constants = states[0].grid, states[0].constants
    for s in states[1:]:
        if s.grid != grid or s.constants != constants:
            raise GridMismatch("mixture states must share one grid and constants")
    elements = np.zeros((grid.n, grid.n), dtype=complex)
    for w, s in zip(weights, states):
        elements += w * np.outer(s.samples, np.conj(s.samples))
    return DensityMatrix(grid, elements, constants)


def seeded_level_mixtures(
    grid: PositionGrid,
    count: int,
    max_level: int = 4,
    seed: int = DEFAULT_MIXTURE_SEED,
    omega: float = 1.0,
    constants: PhysicalConstants | None = None,
) -> list[DensityMatrix]:
    """Reproducible random mixtures of oscillator levels 0..max_level."""
    constants = constants or PhysicalConstants()
    rng = np.random.default_rng(seed)
    states = ho_eigenstates(grid, max_level, omega, constants)
    mixtures = []
    for _ in range(count):
        w = rng.random(max_level + 1)
        mixtures.append(density_mixture(w / w.sum(), states))
    return mixtures
