"""Command-line front end.

Subcommands build factory states, emit distributions / marginals /
expectation values / evolutions as CSV + JSON (with rendered figures next to
the delimited output), and run the verification suite.  Exit codes: 0 ok,
1 failed check, 2 usage error, 3 numerical guard tripped (boundary leak or
oversized time step).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .core import (
    PhaseSpaceDistribution,
    PhysicalConstants,
    make_position_grid,
    momentum_grid_of,
)
from .dynamics import (
    EvolutionConfig,
    PolynomialPotential,
    evolve_schrodinger_oracle,
    evolve_wigner,
    resolved_truncation,
)
from .errors import BoundaryLeak, InvalidSpec, PhasekitError, StepTooLarge, WrongKind
from .io import RunManifest, read_distribution_csv, write_distribution_csv, write_marginal_csv
from .observables import expect_operator_oracle, expect_phase_space, observable_pair
from .states import StateSpec, build_state, density_from_pure
from .transforms import (
    momentum_density_oracle,
    momentum_marginal,
    normalization,
    position_marginal,
    sn_from_density,
    sn_to_wigner,
    wigner_from_density,
    wigner_from_wavefunction,
)
from .verify import DEFAULT_GRID, DEFAULT_TOLERANCES, format_report, run_verification

OUTDIR_ENV = "PHASEKIT_OUTDIR"


class UsageError(Exception):
    pass


def _parse_grid(text) -> tuple:
    try:
        a, b, n = text.split(",")
        return float(a), float(b), int(n)
    except ValueError as exc:
        raise UsageError(f"--grid expects 'qmin,qmax,n', got {text!r}") from exc


def _parse_potential(text) -> list:
    try:
        return [float(c) for c in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--potential expects 'c0,c1,...', got {text!r}") from exc


def _load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc


class Run:
    """Resolved options (flags over config over defaults) plus output helpers."""

    def __init__(self, args):
        self.args = args
        self.config = _load_config(args.config) if getattr(args, "config", None) else {}
        grid_spec = (
            _parse_grid(args.grid)
            if getattr(args, "grid", None)
            else tuple(self.config.get("grid", DEFAULT_GRID))
        )
        self.grid = make_position_grid(*grid_spec)
        cfg_constants = self.config.get("constants", {})
        hbar = args.hbar if args.hbar is not None else cfg_constants.get("hbar", 1.0)
        mass = args.mass if args.mass is not None else cfg_constants.get("mass", 1.0)
        self.constants = PhysicalConstants(float(hbar), float(mass))
        self.tolerances = dict(DEFAULT_TOLERANCES)
        self.tolerances.update(self.config.get("tolerances", {}))
        outdir = args.outdir or os.environ.get(OUTDIR_ENV) or "phasekit_out"
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.figures = not getattr(args, "no_figure", False)

    def state_spec(self) -> StateSpec:
        text = getattr(self.args, "state", None) or self.config.get("state_spec")
        if not text:
            raise UsageError("missing --state")
        return StateSpec.from_string(text, self.constants)

    def potential(self, default: str | None = None) -> PolynomialPotential:
        text = getattr(self.args, "potential", None)
        if text is not None:
            return PolynomialPotential(tuple(_parse_potential(text)))
        if self.config.get("potential") is not None:
            return PolynomialPotential(tuple(self.config["potential"]))
        if default is not None:
            return PolynomialPotential(tuple(_parse_potential(default)))
        raise UsageError("missing --potential")

    def manifest(self, command: str, **extra) -> RunManifest:
        return RunManifest(
            command=command,
            grid=(self.grid.q_min, self.grid.q_max, self.grid.n),
            constants={"hbar": self.constants.hbar, "mass": self.constants.mass},
            tolerances=self.tolerances,
            **extra,
        )

    def finish(self, manifest: RunManifest) -> int:
        manifest_path = self.outdir / "manifest.json"
        manifest.write(manifest_path)
        failed = [c for c in manifest.checks if c["status"] != "pass"]
        for c in manifest.checks:
            print(
                f"[{c['status']}] {c['name']}: residual={c['residual']:.6e} "
                f"tol={c['tolerance']:g}"
            )
        print(f"wrote {manifest_path}")
        return 1 if failed else 0


def _distribution_for(run: Run, which: str):
    spec = run.state_spec()
    psi = build_state(spec, run.grid)
    if which == "wigner":
        dist = wigner_from_wavefunction(psi)
    else:
        dist = sn_from_density(density_from_pure(psi))
    return spec, psi, dist


def _record_distribution_checks(manifest, run, dist):
    norm = normalization(dist)
    manifest.add_check(
        "normalization", abs(norm - 1.0) <= run.tolerances["normalization"],
        abs(norm - 1.0), run.tolerances["normalization"],
    )
    if dist.kind.value == "wigner":
        reality = float(np.max(np.abs(dist.values.imag)) / np.max(np.abs(dist.values)))
        manifest.add_check(
            "reality", reality <= run.tolerances["reality"],
            reality, run.tolerances["reality"],
        )


def cmd_distribution(run: Run, which: str) -> int:
    spec, _, dist = _distribution_for(run, which)
    manifest = run.manifest(which, state_spec=spec.to_string())
    csv_path = run.outdir / f"{which}.csv"
    write_distribution_csv(csv_path, dist)
    manifest.add_output(csv_path)
    if run.figures:
        from .plotting import save_distribution_figure

        fig_path = run.outdir / f"{which}.png"
        save_distribution_figure(dist, fig_path, title=f"{which} {spec.to_string()}")
        manifest.add_output(fig_path)
    _record_distribution_checks(manifest, run, dist)
    return run.finish(manifest)


def cmd_convert(run: Run) -> int:
    source = Path(run.args.infile)
    dist = read_distribution_csv(source)
    wigner = sn_to_wigner(dist)
    manifest = run.manifest("convert")
    manifest.grid = (dist.qgrid.q_min, dist.qgrid.q_max, dist.qgrid.n)
    manifest.constants = {"hbar": dist.constants.hbar, "mass": dist.constants.mass}
    csv_path = run.outdir / "converted.csv"
    write_distribution_csv(csv_path, wigner)
    manifest.add_output(csv_path)
    if run.figures:
        from .plotting import save_distribution_figure

        fig_path = run.outdir / "converted.png"
        save_distribution_figure(wigner, fig_path, title=f"wigner from {source.name}")
        manifest.add_output(fig_path)
    _record_distribution_checks(manifest, run, wigner)
    return run.finish(manifest)


def cmd_marginals(run: Run) -> int:
    which = run.args.dist
    spec, psi, dist = _distribution_for(run, which)
    manifest = run.manifest("marginals", state_spec=spec.to_string())
    pos = position_marginal(dist)
    mom = momentum_marginal(dist)
    rho = density_from_pure(psi)
    pos_oracle = np.abs(psi.samples) ** 2
    mom_oracle = momentum_density_oracle(rho).values
    tol = run.tolerances["marginal"]
    res_pos = float(np.max(np.abs(pos.values - pos_oracle)))
    res_mom = float(np.max(np.abs(mom.values - mom_oracle)))
    manifest.add_check("position_marginal_vs_oracle", res_pos <= tol, res_pos, tol)
    manifest.add_check("momentum_marginal_vs_oracle", res_mom <= tol, res_mom, tol)
    for name, marginal in (("position", pos), ("momentum", mom)):
        path = run.outdir / f"marginal_{name}.csv"
        write_marginal_csv(path, marginal)
        manifest.add_output(path)
    if run.figures:
        from .plotting import save_marginals_figure

        fig_path = run.outdir / "marginals.png"
        save_marginals_figure(
            pos, mom, {"position": pos_oracle, "momentum": mom_oracle}, fig_path
        )
        manifest.add_output(fig_path)
    return run.finish(manifest)


def cmd_expect(run: Run) -> int:
    spec = run.state_spec()
    psi = build_state(spec, run.grid)
    observable = run.args.observable
    v = run.potential() if observable == "H" else None
    symbol, kernel = observable_pair(observable, run.grid, run.constants, v)
    rho = density_from_pure(psi)
    dist = (
        wigner_from_wavefunction(psi)
        if run.args.dist == "wigner"
        else sn_from_density(rho)
    )
    value = expect_phase_space(dist, symbol)
    truth = expect_operator_oracle(rho, kernel)
    residual = abs(value - truth)
    tol = run.tolerances["averaging"]
    manifest = run.manifest(
        "expect",
        state_spec=spec.to_string(),
        potential=list(v.coefficients) if v is not None else None,
    )
    payload = {
        "observable": observable,
        "dist": run.args.dist,
        "phase_space": {"re": value.real, "im": value.imag},
        "trace_oracle": {"re": truth.real, "im": truth.imag},
        "residual": residual,
        "tolerance": tol,
    }
    out_path = run.outdir / "expect.json"
    out_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    manifest.add_output(out_path)
    manifest.add_check("averaging_vs_trace", residual <= tol, residual, tol)
    print(f"<{observable}> = {value.real:.12g} (trace oracle {truth.real:.12g})")
    return run.finish(manifest)


def cmd_evolve(run: Run) -> int:
    spec = run.state_spec()
    psi = build_state(spec, run.grid)
    v = run.potential(default="0")
    evo = self_evolution_config(run, v)
    dist0 = wigner_from_wavefunction(psi)
    symbol_h, _ = observable_pair("H", run.grid, run.constants, v)
    manifest = run.manifest(
        "evolve",
        state_spec=spec.to_string(),
        potential=list(v.coefficients),
        evolution={
            "dt": evo.dt,
            "steps": evo.steps,
            "truncation": resolved_truncation(v, evo),
        },
    )
    save_every = run.args.save_every
    dq_dp = run.grid.dq * momentum_grid_of(run.grid, run.constants).dp
    h_vals = symbol_h.values
    log = {"t": [], "norm_err": [], "energy": [], "reality": []}
    snapshots = []

    def on_step(step, t, values):
        norm = np.sum(values) * dq_dp
        log["t"].append(t)
        log["norm_err"].append(abs(norm - 1.0))
        log["energy"].append(float(np.sum(values * h_vals).real * dq_dp))
        log["reality"].append(
            float(np.max(np.abs(values.imag)) / np.max(np.abs(values)))
        )
        if save_every and step % save_every == 0 and step not in (0, evo.steps):
            snapshots.append((step, values.copy()))

    final = evolve_wigner(dist0, v, evo, on_step=on_step)
    for step, values in snapshots:
        path = run.outdir / f"snapshot_{step:06d}.csv"
        snap = PhaseSpaceDistribution(
            final.kind, final.qgrid, final.pgrid, values, final.constants
        )
        write_distribution_csv(path, snap)
        manifest.add_output(path)
    final_path = run.outdir / "final.csv"
    write_distribution_csv(final_path, final)
    manifest.add_output(final_path)
    conserved_path = run.outdir / "conserved.csv"
    lines = [
        f"{t:.17g},{ne:.17g},{en:.17g},{re:.17g}"
        for t, ne, en, re in zip(
            log["t"], log["norm_err"], log["energy"], log["reality"]
        )
    ]
    conserved_path.write_text("\n".join(lines) + "\n")
    manifest.add_output(conserved_path)

    elapsed = evo.dt * evo.steps
    tol = run.tolerances["conservation"]
    norm_drift = log["norm_err"][-1] / elapsed
    energy_drift = abs(log["energy"][-1] - log["energy"][0]) / (
        abs(log["energy"][0]) * elapsed
    )
    manifest.add_check("norm_conservation", norm_drift <= tol, norm_drift, tol)
    manifest.add_check("energy_conservation", energy_drift <= tol, energy_drift, tol)
    if run.args.oracle:
        oracle_dist = wigner_from_wavefunction(evolve_schrodinger_oracle(psi, v, evo))
        err = float(np.max(np.abs(final.values - oracle_dist.values)))
        otol = run.tolerances["quartic_oracle"]
        manifest.add_check("oracle_agreement", err <= otol, err, otol)
    if run.figures:
        from .plotting import save_distribution_figure, save_evolution_figure

        save_evolution_figure(
            log["t"], log["norm_err"], log["energy"], log["reality"],
            run.outdir / "evolve_conserved.png",
        )
        manifest.add_output(run.outdir / "evolve_conserved.png")
        save_distribution_figure(
            final, run.outdir / "evolve_final.png", title=f"t={elapsed:g}"
        )
        manifest.add_output(run.outdir / "evolve_final.png")
    return run.finish(manifest)


def self_evolution_config(run: Run, v: PolynomialPotential) -> EvolutionConfig:
    cfg = run.config.get("evolution", {})
    dt = run.args.dt if run.args.dt is not None else cfg.get("dt")
    steps = run.args.steps if run.args.steps is not None else cfg.get("steps")
    if dt is None or steps is None:
        raise UsageError("evolve needs --dt and --steps (flags or config)")
    truncation = (
        run.args.truncation
        if run.args.truncation is not None
        else cfg.get("truncation")
    )
    return EvolutionConfig(
        dt=float(dt),
        steps=int(steps),
        truncation=truncation if truncation is None else int(truncation),
        constants=run.constants,
    )


def cmd_verify(run: Run) -> int:
    results = run_verification(run.grid, run.constants, run.tolerances)
    report = format_report(results)
    report_path = run.outdir / "verify_report.txt"
    report_path.write_text(report)
    manifest = run.manifest("verify")
    manifest.add_output(report_path)
    for r in results:
        manifest.add_check(r.name, r.passed, r.residual, r.tolerance)
    manifest.write(run.outdir / "manifest.json")
    sys.stdout.write(report)
    print(f"wrote {report_path}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasekit",
        description="Phase-space quasi-probability toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, state=True):
        p.add_argument("--grid", help="qmin,qmax,n (default -8,8,256)")
        p.add_argument("--hbar", type=float, default=None)
        p.add_argument("--mass", type=float, default=None)
        p.add_argument("--outdir", default=None, help=f"default ${OUTDIR_ENV} or phasekit_out")
        p.add_argument("--config", default=None, help="JSON config (RunManifest keys)")
        p.add_argument("--no-figure", action="store_true", help="skip PNG rendering")
        if state:
            p.add_argument("--state", help='e.g. "ho:n=0,omega=1"')

    for name in ("wigner", "sn"):
        common(sub.add_parser(name, help=f"emit the {name} distribution as CSV"))

    p = sub.add_parser("convert", help="map a Sobouti-Nasiri CSV to a Wigner CSV")
    common(p, state=False)
    p.add_argument("--in", dest="infile", required=True)

    p = sub.add_parser("marginals", help="marginal densities plus oracle residuals")
    common(p)
    p.add_argument("--dist", choices=("wigner", "sn"), default="wigner")

    p = sub.add_parser("expect", help="phase-space average vs trace oracle")
    common(p)
    p.add_argument("--observable", choices=("q", "p", "q2", "H"), required=True)
    p.add_argument("--potential", help="c0,c1,... (needed for H)")
    p.add_argument("--dist", choices=("wigner", "sn"), default="wigner")

    p = sub.add_parser("evolve", help="integrate the Wigner evolution equation")
    common(p)
    p.add_argument("--potential", help="c0,c1,...")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--truncation", type=int, default=None)
    p.add_argument("--save-every", type=int, default=0, help="snapshot stride (0: final only)")
    p.add_argument("--oracle", action="store_true", help="compare against the wave oracle")

    common(sub.add_parser("verify", help="run the full invariant suite"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = Run(args)
        if args.command in ("wigner", "sn"):
            return cmd_distribution(run, args.command)
        if args.command == "convert":
            return cmd_convert(run)
        if args.command == "marginals":
            return cmd_marginals(run)
        if args.command == "expect":
            return cmd_expect(run)
        if args.command == "evolve":
            return cmd_evolve(run)
        if args.command == "verify":
            return cmd_verify(run)
        raise UsageError(f"unknown command {args.command}")  # pragma: no cover
    except (UsageError, InvalidSpec, WrongKind, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BoundaryLeak, StepTooLarge) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3
    except PhasekitError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
