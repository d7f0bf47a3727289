"""Error norms between fast-slow and limit trajectories, and rate fitting.

A convergence study runs the full system and the reduced system on the same
grid with the same time step and sample times, measures

    E_LinfL2 = max_n ( ||U(t_n)||_L2 + ||V(t_n)||_L2 ),
    E_L2H1   = ( sum_n dt ( ||U||_H1^2 + ||V||_H1^2 ) )^(1/2),
    E_LinfH2 = max_n ( ||U||_H2 + ||V||_H2 ),

with U = u_eps - h_kappa(v), V = v_eps - v, and fits log E against log eps.
Each norm is also reported with the initial layer skipped (samples with
t >= 5 eps), since the sup-in-time norms carry the e^{-t/eps} transient.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace as dc_replace

import numpy as np

from .errors import ConfigurationError, DivergenceError, ShapeError
from .integrator import FastSlowState, Trajectory, simulate
from .models import ModelParams
from .reduction import initial_layer, solve_limit_system
from .spectral_core import SpectralField

__all__ = [
    "ErrorNorms",
    "ConvergenceRun",
    "ConvergenceReport",
    "trajectory_error_norms",
    "convergence_study",
    "fit_order",
]

LAYER_SKIP_FACTOR = 5.0  # post-layer norms use samples with t >= 5 eps


@dataclass(frozen=True)
class ErrorNorms:
    E_LinfL2: float
    E_L2H1: float
    E_LinfH2: float
    E_LinfL2_postlayer: float
    E_LinfH2_postlayer: float


def trajectory_error_norms(
    traj_eps: Trajectory, traj_limit: Trajectory, t_skip: float = 0.0
) -> ErrorNorms:
    """Error norms between two trajectories sampled at identical times.

    The limit trajectory's u-component must already be the algebraic
    reconstruction h_kappa(v) (solve_limit_system stores it that way).
    """
    ta, tb = traj_eps.times, traj_limit.times
    if len(ta) != len(tb) or np.max(np.abs(ta - tb)) > 1e-10 * max(1.0, ta[-1]):
        raise ShapeError("trajectories are sampled at different times")
    if len(ta) < 2:
        raise ShapeError("need at least two samples")
    l2 = np.empty(len(ta))
    h1sq = np.empty(len(ta))
    h2 = np.empty(len(ta))
    for n, (se, sl) in enumerate(zip(traj_eps.states, traj_limit.states)):
        U = se.u - sl.u
        V = se.v - sl.v
        l2[n] = U.sobolev_norm(0) + V.sobolev_norm(0)
        h1sq[n] = U.sobolev_norm(1) ** 2 + V.sobolev_norm(1) ** 2
        h2[n] = U.sobolev_norm(2) + V.sobolev_norm(2)
    dt = float(ta[1] - ta[0])
    post = ta >= t_skip - 1e-12
    if not np.any(post):
        post = np.zeros_like(post)
        post[-1] = True
    return ErrorNorms(
        E_LinfL2=float(np.max(l2)),
        E_L2H1=float(math.sqrt(np.sum(dt * h1sq))),
        E_LinfH2=float(np.max(h2)),
        E_LinfL2_postlayer=float(np.max(l2[post])),
        E_LinfH2_postlayer=float(np.max(h2[post])),
    )


def fit_order(eps_values, errors):
    """Slope and residual of the least-squares fit of log(err) vs log(eps)."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    if len(x) < 2:
        raise ConfigurationError("order fit needs at least two runs")
    coef, res = np.polyfit(x, y, 1, full=True)[:2]
    residual = float(res[0]) if len(res) else 0.0
    return float(coef[0]), residual


@dataclass(frozen=True)
class ConvergenceRun:
    eps: float
    delta: float
    eps_in: float
    norms: ErrorNorms | None
    wall_s: float
    failure: str | None = None


@dataclass
class ConvergenceReport:
    params: ModelParams
    runs: list
    orders: dict = field(default_factory=dict)
    fit_residual: float = float("nan")
    plateau: bool = False

    def column(self, name):
        return [getattr(r.norms, name) for r in self.runs if r.norms is not None]


def _delta_of(eps, delta_rule):
    kind = delta_rule.get("type", "power")
    if kind == "power":
        return eps ** float(delta_rule.get("p", 1.5))
    if kind == "fixed":
        return float(delta_rule["value"])
    if kind == "zero":
        return 0.0
    raise ConfigurationError(f"unknown delta rule {kind!r}")


def convergence_study(
    params: ModelParams,
    u_in: SpectralField,
    v_in: SpectralField,
    eps_list,
    T: float,
    delta_rule=None,
    dt_factor: float = 0.5,
    n_samples: int = 100,
    fit_norms=("E_LinfL2", "E_L2H1", "E_LinfH2", "E_LinfH2_postlayer"),
) -> ConvergenceReport:
    """Run the eps sweep and fit convergence orders.

    For each eps the full system and the limit system are integrated with
    the same time step dt = dt_factor * eps (shrunk to land on T) and
    compared at the same ~n_samples sample times.  ``delta_rule`` is
    {"type": "power", "p": 1.5} (default), {"type": "fixed", "value": v} or
    {"type": "zero"}.  Divergent runs are recorded and skipped by the fit.
    """
    eps_list = list(eps_list)
    if any(e2 >= e1 for e1, e2 in zip(eps_list, eps_list[1:])):
        raise ConfigurationError("eps list must be strictly decreasing")
    if delta_rule is None:
        delta_rule = {"type": "power", "p": 1.5}
    runs = []
    for eps in eps_list:
        delta = _delta_of(eps, delta_rule)
        p = dc_replace(params, eps=eps, delta=delta)
        start = time.perf_counter()
        try:
            if p.is_linear:
                # g-residual of the linear kind: ||v - 2u||_H2
                eps_in = (v_in - 2.0 * u_in).sobolev_norm(2)
            else:
                eps_in = initial_layer(u_in, v_in, p.kappa).eps_in
            dt = dt_factor * eps if not p.is_linear else T / 2000.0
            n_steps = max(1, math.ceil(T / dt - 1e-9))
            sample_every = max(1, n_steps // n_samples)
            # land the step count on a multiple of the sampling stride
            n_steps = sample_every * math.ceil(n_steps / sample_every)
            dt = T / n_steps
            traj = simulate(FastSlowState(u_in, v_in, 0.0), p, T, dt=dt, sample_every=sample_every)
            limit = solve_limit_system(v_in, p, T, dt=dt, sample_every=sample_every)
            norms = trajectory_error_norms(traj, limit, t_skip=LAYER_SKIP_FACTOR * eps)
            runs.append(
                ConvergenceRun(eps, delta, eps_in, norms, time.perf_counter() - start)
            )
        except DivergenceError as exc:
            runs.append(
                ConvergenceRun(eps, delta, float("nan"), None, time.perf_counter() - start, failure=str(exc))
            )
    report = ConvergenceReport(params=params, runs=runs)
    ok = [r for r in runs if r.norms is not None]
    if len(ok) >= 2:
        eps_ok = [r.eps for r in ok]
        residuals = []
        for name in fit_norms:
            vals = [getattr(r.norms, name) for r in ok]
            if min(vals) <= 0.0:
                continue
            order, res = fit_order(eps_ok, vals)
            report.orders[name] = order
            residuals.append(res)
        report.fit_residual = float(max(residuals)) if residuals else float("nan")
        primary = [r.norms.E_LinfL2 for r in ok]
        report.plateau = any(b > 0.9 * a for a, b in zip(primary, primary[1:]))
    return report
