import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
import yaml

from fastslow.cli import main
from fastslow.errors import ShapeError
from fastslow.output import emit_csv, emit_svg, format_value


def write_config(tmp_path, payload, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(payload))
    return str(path)


def base_model(kind="nonlinear", **kw):
    model = dict(kind=kind, d=1.0, delta=0.0, eps=0.01, kappa=1.0, a=1.0, b=1.0, c=1.0)
    model.update(kw)
    return model


# ---------------------------------------------------------------------------
# emit


def test_emit_empty_series(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv({"a": [], "b": []}, path)
    assert path.read_text() == "a,b\n"


def test_emit_rows_and_roundtrip(tmp_path):
    path = tmp_path / "two.csv"
    values = [0.1, 1.0 / 3.0, 7.25e-13]
    emit_csv({"x": [1, 2, 3], "y": values}, path)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 4
    for line, expected in zip(lines[1:], values):
        assert float(line.split(",")[1]) == expected  # exact reparse at 17 digits


def test_emit_ragged_columns(tmp_path):
    with pytest.raises(ShapeError):
        emit_csv({"a": [1, 2], "b": [1]}, tmp_path / "bad.csv")


def test_format_value_kinds():
    assert format_value(True) == "true"
    assert format_value(False) == "false"
    assert format_value(3) == "3"
    assert float(format_value(math.pi)) == math.pi


def test_svg_well_formed(tmp_path):
    path = tmp_path / "plot.svg"
    emit_svg(
        {"eps": [1e-1, 1e-2, 1e-3], "err": [2e-2, 2e-3, 2e-4]},
        path,
        x_column="eps",
        log_log=True,
    )
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")


def test_svg_rejects_single_column(tmp_path):
    with pytest.raises(ShapeError):
        emit_svg({"x": [1.0, 2.0]}, tmp_path / "bad.svg")


# ---------------------------------------------------------------------------
# CLI commands


def test_unknown_command_exit_1(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {"spec_version": 1, "command": "frobnicate", "seed": 1, "model": base_model(), "output": {}},
    )
    assert main(["--config", cfg, "--out", str(tmp_path)]) == 1
    assert "command" in capsys.readouterr().err


def test_missing_block_exit_1(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {"spec_version": 1, "command": "simulate", "seed": 1, "model": base_model(), "output": {}},
    )
    assert main(["--config", cfg, "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "grid" in err or "block" in err


def test_wrong_spec_version_exit_1(tmp_path):
    cfg = write_config(tmp_path, {"spec_version": 2, "command": "gap-check", "seed": 1})
    assert main(["--config", cfg, "--out", str(tmp_path)]) == 1


def gap_check_payload(eps=0.001, zeta_inv=26.0):
    return {
        "spec_version": 1,
        "command": "gap-check",
        "seed": 3,
        "model": base_model(kind="linear", eps=eps),
        "study": {"zeta_inv": zeta_inv, "lipschitz": [0.5, 0.0, 0.0]},
        "output": {"csv": "gap.csv"},
    }


def test_gap_check_csv(tmp_path):
    cfg = write_config(tmp_path, gap_check_payload())
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    lines = (tmp_path / "gap.csv").read_text().strip().split("\n")
    header = lines[0].split(",")
    assert header == [
        "eps", "zeta_inv", "k0", "N_S", "N_F", "gap", "eta",
        "term1", "term2", "param_ineq", "passes",
    ]
    row = dict(zip(header, lines[1].split(",")))
    assert abs(float(row["term1"]) - 0.5 / 0.9305) < 1e-12
    assert row["passes"] == "true"


def test_gap_check_failing_still_exit_0(tmp_path):
    cfg = write_config(tmp_path, gap_check_payload(eps=0.01))
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    body = (tmp_path / "gap.csv").read_text()
    assert "false" in body.split("\n")[1]


def test_cli_determinism_byte_identical(tmp_path):
    cfg = write_config(tmp_path, gap_check_payload())
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["--config", cfg, "--out", str(out_a), "--quiet"]) == 0
    assert main(["--config", cfg, "--out", str(out_b), "--quiet"]) == 0
    assert (out_a / "gap.csv").read_bytes() == (out_b / "gap.csv").read_bytes()


def converge_payload():
    return {
        "spec_version": 1,
        "command": "converge",
        "seed": 5,
        "model": base_model(kind="linear", eps=0.1, delta=0.1),
        "grid": {"L": math.pi, "N": 32},
        "time": {"T": 0.5},
        "study": {
            "eps_list": [1e-1, 3e-2, 1e-2, 3e-3],
            "delta_rule": {"type": "fixed", "value": 0.1},
            "n_samples": 40,
        },
        "initial": {"preset": "cosine", "well_prepared": True},
        "output": {"csv": "conv.csv", "svg": "conv.svg"},
    }


def test_converge_csv_structure(tmp_path):
    cfg = write_config(tmp_path, converge_payload())
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    lines = (tmp_path / "conv.csv").read_text().strip().split("\n")
    header = lines[0].split(",")
    assert header[:3] == ["eps", "delta", "eps_in"]
    assert "wall_s" in header
    data = [l for l in lines[1:] if not l.split(",")[0].startswith(("order_", "fit_", "seed", "plateau"))]
    assert len(data) == 4
    footer_names = {l.split(",")[0] for l in lines[1 + len(data):]}
    assert {"order_LinfL2", "order_L2H1", "order_LinfH2", "fit_residual"} <= footer_names
    # deterministic apart from the wall-clock column
    out_b = tmp_path / "b"
    assert main(["--config", cfg, "--out", str(out_b), "--quiet"]) == 0

    def strip_wall(text):
        rows = [r.split(",") for r in text.strip().split("\n")]
        idx = rows[0].index("wall_s")
        return [[c for i, c in enumerate(r) if i != idx] for r in rows]

    assert strip_wall((tmp_path / "conv.csv").read_text()) == strip_wall(
        (out_b / "conv.csv").read_text()
    )
    root = ET.parse(tmp_path / "conv.svg").getroot()
    assert root.tag.endswith("svg")


def test_simulate_and_limit_commands(tmp_path):
    payload = {
        "spec_version": 1,
        "command": "simulate",
        "seed": 2,
        "model": base_model(eps=0.05, delta=0.01),
        "grid": {"L": math.pi, "N": 32},
        "time": {"T": 0.2, "sample_every": 10},
        "initial": {"preset": "cosine"},
        "output": {"csv": "sim.csv"},
    }
    cfg = write_config(tmp_path, payload)
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    header = (tmp_path / "sim.csv").read_text().split("\n")[0].split(",")
    assert header[0] == "t" and "u1_linf" in header

    payload["command"] = "limit"
    payload["output"] = {"csv": "limit.csv"}
    cfg = write_config(tmp_path, payload, name="limit.yaml")
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "limit.csv").exists()


def test_divergence_exit_2(tmp_path):
    payload = {
        "spec_version": 1,
        "command": "simulate",
        "seed": 2,
        "model": base_model(a=40.0, b=0.0, c=0.0, eps=0.05),
        "grid": {"L": math.pi, "N": 16},
        "time": {"T": 2.0, "dt": 0.02},
        "initial": {"preset": "cosine"},
        "output": {"csv": "boom.csv"},
    }
    cfg = write_config(tmp_path, payload)
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 2


def test_manifold_linear_command(tmp_path):
    payload = {
        "spec_version": 1,
        "command": "manifold-linear",
        "seed": 4,
        "model": base_model(kind="linear", eps=0.1, delta=0.1),
        "grid": {"L": math.pi, "N": 32},
        "time": {"T": 1.0},
        "study": {"modes": [1, 2, 3, 4]},
        "output": {"csv": "ml.csv"},
    }
    cfg = write_config(tmp_path, payload)
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    lines = (tmp_path / "ml.csv").read_text().strip().split("\n")
    assert lines[0].split(",")[0] == "k"
    assert len([l for l in lines[1:] if not l.startswith("seed")]) == 4


def test_manifold_galerkin_command_and_failing_gap_exit_3(tmp_path):
    payload = {
        "spec_version": 1,
        "command": "manifold-galerkin",
        "seed": 6,
        "model": base_model(kind="linear", eps=0.01, delta=0.001),
        "study": {
            "zeta_inv": 10.0,
            "lipschitz": [0.5, 0.0, 0.0],
            "n_graph_samples": 2,
            "sample_amplitude": 0.5,
            "n_t": 256,
            "tol": 1.0e-8,
        },
        "output": {"csv": "mg.csv"},
    }
    cfg = write_config(tmp_path, payload)
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    lines = (tmp_path / "mg.csv").read_text().strip().split("\n")
    assert len([l for l in lines if l.startswith(("0,", "1,"))]) == 2

    payload["model"]["eps"] = 0.1  # spectral gap fails at eps zeta_inv = 1
    cfg = write_config(tmp_path, payload, name="bad_gap.yaml")
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 3


def test_initial_layer_command(tmp_path):
    payload = {
        "spec_version": 1,
        "command": "initial-layer",
        "seed": 8,
        "model": base_model(eps=0.01),
        "grid": {"L": math.pi, "N": 32},
        "initial": {"preset": "cosine"},
        "output": {"csv": "il.csv"},
    }
    cfg = write_config(tmp_path, payload)
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    lines = (tmp_path / "il.csv").read_text().strip().split("\n")
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert float(row["eps_in"]) > 0


def test_seed_override_changes_output_seed(tmp_path):
    cfg = write_config(tmp_path, gap_check_payload())
    assert main(["--config", cfg, "--out", str(tmp_path), "--quiet", "--seed", "99"]) == 0
    assert "seed,99" in (tmp_path / "gap.csv").read_text()


def test_manifold_galerkin_threads_match_sequential(tmp_path):
    payload = {
        "spec_version": 1,
        "command": "manifold-galerkin",
        "seed": 6,
        "model": base_model(kind="linear", eps=0.01, delta=0.001),
        "study": {
            "zeta_inv": 10.0,
            "lipschitz": [0.5, 0.0, 0.0],
            "n_graph_samples": 3,
            "sample_amplitude": 0.5,
            "n_t": 256,
            "tol": 1.0e-8,
        },
        "output": {"csv": "mg.csv"},
    }
    cfg = write_config(tmp_path, payload)
    seq, par = tmp_path / "seq", tmp_path / "par"
    assert main(["--config", cfg, "--out", str(seq), "--quiet"]) == 0
    assert main(["--config", cfg, "--out", str(par), "--quiet", "--threads", "3"]) == 0
    assert (seq / "mg.csv").read_bytes() == (par / "mg.csv").read_bytes()


def test_svg_rejects_nonpositive_loglog(tmp_path):
    with pytest.raises(ShapeError):
        emit_svg({"x": [1.0, 2.0], "y": [0.0, 1.0]}, tmp_path / "bad.svg", log_log=True)
