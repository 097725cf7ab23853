"""Delimited output, distribution round-tripping, and the run manifest.

Distribution CSV contract (byte-exact): ``#``-prefixed header lines with
keys kind, nq, np, qmin, qmax, hbar, mass, then one ``q,p,re,im`` row per
grid point, q-major with p ascending, floats printed with 17 significant
digits (lossless for doubles).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (
    Kind,
    PhaseSpaceDistribution,
    PhysicalConstants,
    make_position_grid,
    momentum_grid_of,
)
from .transforms import MarginalVector


def fmt(x: float) -> str:
    return f"{x:.17g}"


def write_distribution_csv(path, dist: PhaseSpaceDistribution) -> None:
    grid, pgrid = dist.qgrid, dist.pgrid
    header = [
        f"# kind={dist.kind.value}",
        f"# nq={grid.n}",
        f"# np={pgrid.n}",
        f"# qmin={fmt(grid.q_min)}",
        f"# qmax={fmt(grid.q_max)}",
        f"# hbar={fmt(dist.constants.hbar)}",
        f"# mass={fmt(dist.constants.mass)}",
    ]
    q = grid.points
    p = pgrid.points
    lines = header + [
        f"{fmt(q[j])},{fmt(p[k])},{fmt(v.real)},{fmt(v.imag)}"
        for j, row in enumerate(dist.values)
        for k, v in enumerate(row)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_distribution_csv(path) -> PhaseSpaceDistribution:
    meta = {}
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
        else:
            rows.append(line)
    try:
        kind = Kind(meta["kind"])
        nq, np_ = int(meta["nq"]), int(meta["np"])
        constants = PhysicalConstants(float(meta["hbar"]), float(meta["mass"]))
        grid = make_position_grid(float(meta["qmin"]), float(meta["qmax"]), nq)
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad distribution header in {path}: {exc}") from exc
    if np_ != nq:
        raise ValueError(f"nq={nq} and np={np_} must match")
    if len(rows) != nq * np_:
        raise ValueError(f"expected {nq * np_} data rows, found {len(rows)}")
    data = np.array([[float(x) for x in row.split(",")] for row in rows])
    values = (data[:, 2] + 1j * data[:, 3]).reshape(nq, np_)
    return PhaseSpaceDistribution(
        kind, grid, momentum_grid_of(grid, constants), values, constants
    )


def write_marginal_csv(path, marginal: MarginalVector) -> None:
    if hasattr(marginal.grid, "points"):
        axis = marginal.grid.points
    else:  # pragma: no cover
        raise ValueError("marginal grid has no sample points")
    lines = [f"{fmt(x)},{fmt(v)}" for x, v in zip(axis, marginal.values)]
    Path(path).write_text("\n".join(lines) + "\n")


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """Everything needed to reproduce and audit one CLI run."""

    command: str
    state_spec: str | None = None
    grid: tuple | None = None
    constants: dict = field(default_factory=dict)
    potential: list | None = None
    evolution: dict | None = None
    tolerances: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    def add_output(self, path) -> None:
        path = Path(path)
        self.outputs.append({"path": path.name, "sha256": sha256_of(path)})

    def add_check(self, name: str, passed: bool, residual: float, tolerance: float):
        self.checks.append(
            {
                "name": name,
                "status": "pass" if passed else "fail",
                "residual": float(residual),
                "tolerance": float(tolerance),
            }
        )

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "state_spec": self.state_spec,
            "grid": list(self.grid) if self.grid is not None else None,
            "constants": self.constants,
            "potential": self.potential,
            "evolution": self.evolution,
            "tolerances": self.tolerances,
            "outputs": self.outputs,
            "checks": self.checks,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        grid = data.get("grid")
        return cls(
            command=data["command"],
            state_spec=data.get("state_spec"),
            grid=tuple(grid) if grid is not None else None,
            constants=data.get("constants", {}),
            potential=data.get("potential"),
            evolution=data.get("evolution"),
            tolerances=data.get("tolerances", {}),
            outputs=data.get("outputs", []),
            checks=data.get("checks", []),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls.from_dict(json.loads(text))

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())
