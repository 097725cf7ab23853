"""Command-line surface: outputs, formats, manifests, exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

from phasekit.cli import main
from phasekit.io import RunManifest, read_distribution_csv, sha256_of


def run_cli(tmp_path, *args):
    return main([*args, "--outdir", str(tmp_path), "--no-figure"])


def load_manifest(tmp_path):
    return RunManifest.from_json((tmp_path / "manifest.json").read_text())


def test_wigner_command_csv_contract(tmp_path):
    assert run_cli(tmp_path, "wigner", "--state", "ho:n=1,omega=1") == 0
    csv_path = tmp_path / "wigner.csv"
    lines = csv_path.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert "# kind=wigner" in header
    assert "# nq=256" in header
    assert "# hbar=1" in header
    rows = [l for l in lines if not l.startswith("#")]
    assert len(rows) == 256 * 256
    # q-major ordering: the origin row sits in the middle
    q0p0 = rows[128 * 256 + 128].split(",")
    assert float(q0p0[0]) == 0.0 and float(q0p0[1]) == 0.0
    assert float(q0p0[2]) == pytest.approx(-1 / np.pi, abs=1e-6)


def test_wigner_output_is_deterministic(tmp_path):
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    for d in (a_dir, b_dir):
        assert run_cli(d, "wigner", "--state", "gauss:q0=1,p0=0.5,sigma=1") == 0
    assert (a_dir / "wigner.csv").read_bytes() == (b_dir / "wigner.csv").read_bytes()


def test_manifest_lists_outputs_with_valid_hashes(tmp_path):
    assert run_cli(tmp_path, "sn", "--state", "ho:n=0,omega=1") == 0
    manifest = load_manifest(tmp_path)
    assert manifest.command == "sn"
    assert manifest.outputs
    for entry in manifest.outputs:
        assert sha256_of(tmp_path / entry["path"]) == entry["sha256"]
    # round trip is lossless
    again = RunManifest.from_dict(manifest.to_dict())
    assert again.to_json() == manifest.to_json()


def test_sn_csv_round_trips_exactly(tmp_path):
    assert run_cli(tmp_path, "sn", "--state", "cat:q0=2,p0=0,sigma=0.5") == 0
    dist = read_distribution_csv(tmp_path / "sn.csv")
    assert np.max(np.abs(dist.values.imag)) > 0.01
    # rewrite and compare bytes
    from phasekit.io import write_distribution_csv

    write_distribution_csv(tmp_path / "again.csv", dist)
    assert (tmp_path / "again.csv").read_bytes() == (tmp_path / "sn.csv").read_bytes()


def test_convert_matches_direct_wigner(tmp_path):
    sn_dir, w_dir, c_dir = tmp_path / "s", tmp_path / "w", tmp_path / "c"
    assert run_cli(sn_dir, "sn", "--state", "ho:n=2,omega=1") == 0
    assert run_cli(w_dir, "wigner", "--state", "ho:n=2,omega=1") == 0
    assert run_cli(c_dir, "convert", "--in", str(sn_dir / "sn.csv")) == 0
    converted = read_distribution_csv(c_dir / "converted.csv")
    direct = read_distribution_csv(w_dir / "wigner.csv")
    assert converted.kind.value == "wigner"
    assert np.max(np.abs(converted.values - direct.values)) < 1e-8


def test_convert_rejects_wigner_input(tmp_path):
    w_dir = tmp_path / "w"
    assert run_cli(w_dir, "wigner", "--state", "ho:n=0,omega=1") == 0
    assert run_cli(tmp_path, "convert", "--in", str(w_dir / "wigner.csv")) == 2


def test_marginals_outputs_and_checks(tmp_path):
    assert run_cli(tmp_path, "marginals", "--state", "ho:n=0,omega=1", "--dist", "sn") == 0
    for name in ("marginal_position.csv", "marginal_momentum.csv"):
        rows = (tmp_path / name).read_text().splitlines()
        assert len(rows) == 256
        x, v = rows[128].split(",")
        assert float(v) == pytest.approx(np.pi**-0.5, abs=1e-6)
    manifest = load_manifest(tmp_path)
    names = {c["name"] for c in manifest.checks}
    assert {"position_marginal_vs_oracle", "momentum_marginal_vs_oracle"} <= names
    assert all(c["status"] == "pass" for c in manifest.checks)


def test_expect_reports_energy(tmp_path):
    code = run_cli(
        tmp_path,
        "expect",
        "--state", "ho:n=0,omega=1",
        "--observable", "H",
        "--potential", "0,0,0.5",
    )
    assert code == 0
    payload = json.loads((tmp_path / "expect.json").read_text())
    assert payload["phase_space"]["re"] == pytest.approx(0.5, abs=1e-6)
    assert payload["trace_oracle"]["re"] == pytest.approx(0.5, abs=1e-6)
    assert payload["residual"] <= payload["tolerance"]


def test_expect_supports_sn_distribution(tmp_path):
    code = run_cli(
        tmp_path,
        "expect",
        "--state", "ho:n=2,omega=1",
        "--observable", "H",
        "--potential", "0,0,0.5",
        "--dist", "sn",
    )
    assert code == 0
    payload = json.loads((tmp_path / "expect.json").read_text())
    assert payload["phase_space"]["re"] == pytest.approx(2.5, abs=1e-6)


def test_evolve_writes_snapshots_and_conserved_log(tmp_path):
    code = run_cli(
        tmp_path,
        "evolve",
        "--state", "gauss:q0=1,p0=0,sigma=1",
        "--grid=-10,10,128",
        "--potential", "0,0,0.5",
        "--dt", "2e-3",
        "--steps", "60",
        "--save-every", "20",
        "--oracle",
    )
    assert code == 0
    assert (tmp_path / "snapshot_000020.csv").exists()
    assert (tmp_path / "snapshot_000040.csv").exists()
    assert (tmp_path / "final.csv").exists()
    conserved = (tmp_path / "conserved.csv").read_text().splitlines()
    assert len(conserved) == 61
    manifest = load_manifest(tmp_path)
    names = {c["name"] for c in manifest.checks}
    assert {"norm_conservation", "energy_conservation", "oracle_agreement"} <= names
    assert all(c["status"] == "pass" for c in manifest.checks)
    assert manifest.evolution == {"dt": 2e-3, "steps": 60, "truncation": 1}


def test_evolve_renders_figures(tmp_path):
    code = main(
        [
            "evolve",
            "--state", "gauss:q0=1,p0=0,sigma=1",
            "--grid=-10,10,128",
            "--potential", "0,0,0.5",
            "--dt", "2e-3",
            "--steps", "10",
            "--outdir", str(tmp_path),
        ]
    )
    assert code == 0
    assert (tmp_path / "evolve_conserved.png").exists()
    assert (tmp_path / "evolve_final.png").exists()
    manifest = load_manifest(tmp_path)
    listed = {entry["path"] for entry in manifest.outputs}
    assert {"evolve_conserved.png", "evolve_final.png"} <= listed


def test_distribution_figure_rendered_by_default(tmp_path):
    assert main(["wigner", "--state", "ho:n=0,omega=1", "--outdir", str(tmp_path)]) == 0
    assert (tmp_path / "wigner.png").exists()


def test_outdir_env_variable(tmp_path, monkeypatch):
    monkeypatch.setenv("PHASEKIT_OUTDIR", str(tmp_path / "from_env"))
    assert main(["wigner", "--state", "ho:n=0,omega=1", "--no-figure"]) == 0
    assert (tmp_path / "from_env" / "wigner.csv").exists()


def test_config_file_supplies_defaults(tmp_path):
    config = {
        "grid": [-10, 10, 128],
        "state_spec": "gauss:q0=1,p0=0,sigma=1",
        "evolution": {"dt": 2e-3, "steps": 10},
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    code = run_cli(
        tmp_path, "evolve", "--potential", "0,0,0.5", "--config", str(cfg_path)
    )
    assert code == 0
    manifest = load_manifest(tmp_path)
    assert manifest.grid == (-10.0, 10.0, 128)


def test_usage_errors_exit_two(tmp_path):
    assert run_cli(tmp_path, "wigner", "--state", "nonsense") == 2
    assert run_cli(tmp_path, "wigner", "--state", "ho:n=0,omega=1", "--grid", "bad") == 2
    assert run_cli(tmp_path, "expect", "--state", "ho:n=0,omega=1", "--observable", "H") == 2
    with pytest.raises(SystemExit) as exc:
        run_cli(tmp_path, "expect", "--state", "ho:n=0,omega=1", "--observable", "x2")
    assert exc.value.code == 2


def test_numerical_guards_exit_three(tmp_path):
    assert run_cli(tmp_path, "wigner", "--state", "ho:n=40,omega=1") == 3
    assert (
        run_cli(
            tmp_path,
            "evolve",
            "--state", "gauss:q0=1,p0=0,sigma=1",
            "--potential", "0,0,0.5",
            "--dt", "1.0",
            "--steps", "1",
        )
        == 3
    )


def test_failed_check_exits_one(tmp_path):
    cfg_path = tmp_path / "strict.json"
    cfg_path.write_text(json.dumps({"tolerances": {"marginal": 1e-30}}))
    code = run_cli(
        tmp_path,
        "marginals",
        "--state", "ho:n=0,omega=1",
        "--config", str(cfg_path),
    )
    assert code == 1
    manifest = load_manifest(tmp_path)
    assert any(c["status"] == "fail" for c in manifest.checks)
