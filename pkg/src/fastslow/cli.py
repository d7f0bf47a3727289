"""Experiment orchestration: config in, CSV (and optional SVG) out.

Exit codes: 0 success, 1 validation error, 2 numerical divergence,
3 assumption-check failure.  A gap-check whose condition fails still exits 0
and records passes=false; assumption failures only abort commands that rely
on them (manifold-galerkin).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import galerkin_manifold as gm
from . import linear_manifold as lm
from .config import ExperimentConfig, build_initial_data, load_config
from .errors import (
    ConfigurationError,
    ContractionError,
    DivergenceError,
    DomainError,
    FastSlowError,
    HorizonError,
    ShapeError,
    SplittingError,
)
from .integrator import FastSlowState, simulate
from .models import lipschitz_estimates
from .output import emit_csv, emit_svg
from .rates import convergence_study
from .reduction import initial_layer, solve_limit_system, theoretical_constants
from .spectral_core import SpectralField

__all__ = ["main", "run"]


def _traj_series(traj):
    cols = {
        "t": list(traj.times),
        "u_L2": [], "v_L2": [], "u_H2": [], "v_H2": [],
        "u1_linf": list(traj.u1_linf), "u2_linf": list(traj.u2_linf),
    }
    for s in traj.states:
        cols["u_L2"].append(s.u.sobolev_norm(0))
        cols["v_L2"].append(s.v.sobolev_norm(0))
        cols["u_H2"].append(s.u.sobolev_norm(2))
        cols["v_H2"].append(s.v.sobolev_norm(2))
    return cols


def _cmd_simulate(cfg: ExperimentConfig):
    u_in, v_in = build_initial_data(cfg)
    t = cfg.time
    traj = simulate(
        FastSlowState(u_in, v_in, 0.0),
        cfg.model,
        T=float(t["T"]),
        dt=t.get("dt"),
        sample_every=int(t.get("sample_every", 1)),
    )
    return _traj_series(traj), [], {"x": "t"}


def _cmd_limit(cfg: ExperimentConfig):
    _, v_in = build_initial_data(cfg)
    t = cfg.time
    dt = t.get("dt") or float(t["T"]) / 1000.0
    traj = solve_limit_system(
        v_in, cfg.model, T=float(t["T"]), dt=dt, sample_every=int(t.get("sample_every", 1))
    )
    return _traj_series(traj), [], {"x": "t"}


def _cmd_converge(cfg: ExperimentConfig):
    u_in, v_in = build_initial_data(cfg)
    study = cfg.study
    report = convergence_study(
        cfg.model,
        u_in,
        v_in,
        study["eps_list"],
        T=float(cfg.time["T"]),
        delta_rule=study.get("delta_rule"),
        dt_factor=float(study.get("dt_factor", 0.5)),
        n_samples=int(study.get("n_samples", 100)),
    )
    series = {
        "eps": [r.eps for r in report.runs],
        "delta": [r.delta for r in report.runs],
        "eps_in": [r.eps_in for r in report.runs],
        "E_LinfL2": [r.norms.E_LinfL2 if r.norms else float("nan") for r in report.runs],
        "E_L2H1": [r.norms.E_L2H1 if r.norms else float("nan") for r in report.runs],
        "E_LinfH2": [r.norms.E_LinfH2 if r.norms else float("nan") for r in report.runs],
        "E_LinfL2_postlayer": [
            r.norms.E_LinfL2_postlayer if r.norms else float("nan") for r in report.runs
        ],
        "wall_s": [r.wall_s for r in report.runs],
    }
    footer = [
        ("order_LinfL2", report.orders.get("E_LinfL2", float("nan"))),
        ("order_L2H1", report.orders.get("E_L2H1", float("nan"))),
        ("order_LinfH2", report.orders.get("E_LinfH2", float("nan"))),
        ("fit_residual", report.fit_residual),
    ]
    for r in report.runs:
        if r.failure:
            footer.append((f"failure_eps_{r.eps:g}", r.failure))
    if report.plateau:
        footer.append(("plateau", True))
    return series, footer, {"x": "eps", "y": ["E_LinfL2", "E_L2H1", "E_LinfH2"], "log": True}


def _cmd_manifold_linear(cfg: ExperimentConfig):
    if not cfg.model.is_linear:
        raise ConfigurationError("field model.kind: manifold-linear needs the linear kind")
    modes = cfg.study.get("modes") or list(range(1, 9))
    T = float(cfg.time.get("T", 1.0))
    reports = lm.invariance_and_distance(cfg.model, modes, T)
    series = {
        "k": [r.k for r in reports],
        "slope": [r.slope for r in reports],
        "invariance_defect": [r.invariance_defect for r in reports],
        "slope_gap": [r.slope_gap for r in reports],
        "slope_gap_bound": [r.slope_gap_bound for r in reports],
        "slope_gap_certified": [r.slope_gap_certified for r in reports],
        "fitted_decay_rate": [r.fitted_decay_rate for r in reports],
        "fast_rate": [r.fast_rate for r in reports],
        "rate_rel_error": [r.rate_rel_error for r in reports],
    }
    return series, [], {"x": "k", "y": ["slope_gap", "slope_gap_bound"]}


def _cmd_gap_check(cfg: ExperimentConfig):
    study = cfg.study
    split = gm.splitting_parameters(float(study["zeta_inv"]), cfg.model)
    lips = study.get("lipschitz")
    if lips is not None:
        lips = tuple(float(v) for v in lips)
    else:
        M = float(study.get("M", 1.0))
        constants = theoretical_constants(cfg.model, M, rng=cfg.rng())
        lips = lipschitz_estimates(cfg.model, M, constants=constants)
    rep = gm.validate_assumptions(cfg.model, split, lips)
    series = {
        "eps": [rep.eps],
        "zeta_inv": [rep.zeta_inv],
        "k0": [rep.k0],
        "N_S": [rep.N_S],
        "N_F": [rep.N_F],
        "gap": [rep.gap],
        "eta": [rep.eta],
        "term1": [rep.term1],
        "term2": [rep.term2],
        "param_ineq": [rep.parameter_inequality_value],
        "passes": [rep.passes],
    }
    return series, [("gap_note", gm.GAP_FORMULA_NOTE)], {"x": "zeta_inv", "y": ["term1", "term2"]}


def _cmd_manifold_galerkin(cfg: ExperimentConfig, threads=1):
    study = cfg.study
    split = gm.splitting_parameters(float(study["zeta_inv"]), cfg.model)
    lips = study.get("lipschitz")
    clip_bound = study.get("clip_bound")
    if lips is not None:
        lips = tuple(float(v) for v in lips)
    else:
        M = float(study.get("M", 1.0))
        constants = theoretical_constants(cfg.model, M, rng=cfg.rng())
        lips = lipschitz_estimates(cfg.model, M, constants=constants)
        if clip_bound is None and not cfg.model.is_linear:
            clip_bound = constants.K0
    gaprep = gm.validate_assumptions(cfg.model, split, lips)
    if not gaprep.passes:
        raise ContractionError(
            f"spectral gap condition fails (total {gaprep.total:.4f}); "
            "refusing Lyapunov-Perron iteration",
            gap_report=gaprep,
        )
    n_samples = int(study.get("n_graph_samples", 3))
    amp = float(study.get("sample_amplitude", 0.02))
    rng = cfg.rng()
    samples = [amp * rng.standard_normal(split.k0) for _ in range(n_samples)]
    kwargs = dict(
        t_back=study.get("t_back"),
        n_t=int(study.get("n_t", 512)),
        tol=float(study.get("tol", 1e-8)),
        fast_band=study.get("fast_band"),
        gap_report=gaprep,
        clip_bound=clip_bound,
    )
    solve = lambda v0: gm.lyapunov_perron_fixed_point(v0, cfg.model, split, **kwargs)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = list(pool.map(solve, samples))
    else:
        points = [solve(v0) for v0 in samples]
    graph = gm.ManifoldGraph(k0=split.k0, points=points)

    def slow_norm(p):
        emb = np.zeros(p.grid.N)
        emb[: split.k0] = p.v_slow
        return SpectralField(p.grid, emb).sobolev_norm(2)

    series = {
        "sample": list(range(len(points))),
        "v_slow_H2": [slow_norm(p) for p in points],
        "u_H2": [p.u.sobolev_norm(2) for p in points],
        "v_fast_H2": [p.v_fast.sobolev_norm(2) for p in points],
        "iterations": [p.iterations for p in points],
        "contraction": [p.contraction for p in points],
        "converged": [p.converged for p in points],
    }
    footer = [
        ("lipschitz_ratio", graph.lipschitz_ratio),
        ("validated_total", gaprep.total),
        ("gap_note", gm.GAP_FORMULA_NOTE),
    ]
    return series, footer, {"x": "sample", "y": ["u_H2", "v_fast_H2"]}


def _cmd_initial_layer(cfg: ExperimentConfig):
    u_in, v_in = build_initial_data(cfg)
    rep = initial_layer(u_in, v_in, cfg.model.kappa)
    series = {
        "eps_in": [rep.eps_in],
        "deviation_ratio": [rep.deviation_ratio],
        "u_in_H2": [u_in.sobolev_norm(2)],
        "v_in_H2": [v_in.sobolev_norm(2)],
        "u0_H2": [rep.u0.sobolev_norm(2)],
    }
    return series, [], None


def run(cfg: ExperimentConfig, out_dir, threads: int = 1, quiet: bool = False) -> int:
    """Dispatch one validated config; writes CSV (and optional SVG)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dispatch = {
        "simulate": _cmd_simulate,
        "limit": _cmd_limit,
        "converge": _cmd_converge,
        "manifold-linear": _cmd_manifold_linear,
        "manifold-galerkin": lambda c: _cmd_manifold_galerkin(c, threads),
        "gap-check": _cmd_gap_check,
        "initial-layer": _cmd_initial_layer,
    }
    series, footer, svg_spec = dispatch[cfg.command](cfg)
    footer = list(footer) + [("seed", cfg.seed)]
    csv_name = cfg.output.get("csv") or f"{cfg.command}.csv"
    csv_path = out_dir / csv_name
    emit_csv(series, csv_path, footer=footer)
    if not quiet:
        print(f"wrote {csv_path}")
    svg_name = cfg.output.get("svg")
    if svg_name and svg_spec:
        y = svg_spec.get("y")
        cols = {svg_spec["x"]: series[svg_spec["x"]]}
        for name in y or [k for k in series if k != svg_spec["x"]]:
            cols[name] = series[name]
        svg_path = out_dir / svg_name
        emit_svg(cols, svg_path, x_column=svg_spec["x"], log_log=bool(svg_spec.get("log")))
        if not quiet:
            print(f"wrote {svg_path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fastslow",
        description="Fast-slow reaction-diffusion experiments from a config file.",
    )
    parser.add_argument("--config", required=True, help="path to the YAML config")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, seed_override=args.seed)
        return run(cfg, args.out, threads=max(1, args.threads), quiet=args.quiet)
    except (ConfigurationError, ShapeError, DomainError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 2
    except (ContractionError, SplittingError, HorizonError) as exc:
        print(f"assumption check failed: {exc}", file=sys.stderr)
        return 3
    except FastSlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
