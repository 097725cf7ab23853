"""Figure rendering for the CLI report path (files only, Agg backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import Kind, PhaseSpaceDistribution


def save_distribution_figure(dist: PhaseSpaceDistribution, path, title: str = "") -> None:
    q = dist.qgrid.points
    p = dist.pgrid.points
    complex_valued = dist.kind is Kind.SOBOUTI_NASIRI
    ncols = 2 if complex_valued else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5.2 * ncols, 4.2), squeeze=False)
    panels = [("Re", dist.values.real)]
    if complex_valued:
        panels.append(("Im", dist.values.imag))
    for ax, (label, vals) in zip(axes[0], panels):
        vmax = np.max(np.abs(vals))
        mesh = ax.pcolormesh(
            q, p, vals.T, shading="nearest", cmap="RdBu_r", vmin=-vmax, vmax=vmax
        )
        fig.colorbar(mesh, ax=ax)
        ax.set_xlabel("q")
        ax.set_ylabel("p")
        ax.set_title(f"{label} {title}".strip())
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_marginals_figure(position, momentum, oracles, path) -> None:
    """Two marginal panels with their independent oracles overlaid."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, marginal, oracle, label in (
        (axes[0], position, oracles["position"], "q"),
        (axes[1], momentum, oracles["momentum"], "p"),
    ):
        x = marginal.grid.points
        ax.plot(x, marginal.values, label="marginal")
        ax.plot(x, oracle, "--", label="oracle")
        ax.set_xlabel(label)
        ax.set_ylabel("density")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_evolution_figure(times, norm_err, energies, reality, path) -> None:
    fig, axes = plt.subplots(1, 3, figsize=(13, 3.6))
    axes[0].plot(times, norm_err)
    axes[0].set_ylabel("|norm - 1|")
    axes[1].plot(times, energies)
    axes[1].set_ylabel("<H>")
    axes[2].plot(times, reality)
    axes[2].set_ylabel("max |Im| / max |W|")
    for ax in axes:
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
