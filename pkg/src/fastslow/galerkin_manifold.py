"""Slow manifolds on Galerkin truncations via Lyapunov-Perron iteration.

The splitting puts v-modes k < k0 into the slow block and k >= k0 into the
fast block (u keeps all modes).  A manifold graph point over slow data v0 is
the t = 0 slice of the fixed point of the map that sends a backward
trajectory (u, v_F, v_S) on [-T_back, 0] to

    u(t)   = int_{-T}^t exp(lam_u (t-s)) N_u(s) ds,
    v_F(t) = int_{-T}^t exp(lam_v (t-s)) (delta A u + psi)_F(s) ds,
    v_S(t) = exp(lam_v t) v0 + int_0^t exp(lam_v (t-s)) (delta A u + psi)_S(s) ds,

with lam_u = -(d+delta) mu - m/eps (m = 1 nonlinear, 2 linear) and
lam_v = -d mu, all kernels applied mode-wise exactly and the sources
reconstructed piecewise-linearly between grid points (exponential
trapezoid weights).  Convergence and the observed contraction factor are
measured in the weighted sup norm sup_t e^{-eta t} (||u||_H2 + ||v_F||_H2 +
||v_S||_H2).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    ContractionError,
    HorizonError,
    SplittingError,
)
from .integrator import FastSlowState, _phi1, _phi2, simulate
from .models import ModelParams
from .reduction import critical_map_u_of_v
from .spectral_core import Grid, SpectralField, _forward, _inverse, build_grid

__all__ = [
    "SplittingParams",
    "GapReport",
    "ManifoldPoint",
    "ManifoldGraph",
    "AttractionSample",
    "ResolventReport",
    "splitting_parameters",
    "validate_assumptions",
    "lyapunov_perron_fixed_point",
    "lyapunov_perron_sweep",
    "attraction_projection",
    "resolvent_bound_check",
]

GAP_FORMULA_NOTE = (
    "splitting formulas give N_S - N_F = k0 - 2 (not k0); implemented as written"
)


@dataclass(frozen=True)
class SplittingParams:
    """Fast/slow splitting derived from the inverse splitting parameter."""

    zeta_inv: float
    k0: int
    N_S: float
    N_F: float
    gap: float
    eta: float
    note: str = GAP_FORMULA_NOTE


def splitting_parameters(zeta_inv: float, params: ModelParams, omega_A: float = 0.0) -> SplittingParams:
    """Splitting constants for k0^2 < zeta_inv < (k0+1)^2.

    Perfect squares are nudged by 1e-9 (with a warning); a non-positive gap
    (k0 <= 2) is rejected.
    """
    zeta_inv = float(zeta_inv)
    if not zeta_inv > 1.0:
        raise ConfigurationError(f"zeta_inv must exceed 1, got {zeta_inv}")
    root = math.sqrt(zeta_inv)
    if abs(root - round(root)) < 1e-12:
        warnings.warn(
            f"zeta_inv={zeta_inv} is a perfect square; nudging by 1e-9", stacklevel=2
        )
        zeta_inv += 1e-9
    k0 = int(math.floor(math.sqrt(zeta_inv)))
    N_S = -zeta_inv - (k0 - 1) ** 2
    N_F = -zeta_inv - k0**2 + k0 + 1
    gap = N_S - N_F
    if gap <= 0:
        raise SplittingError(
            f"degenerate splitting: gap = k0 - 2 = {gap:g} for zeta_inv={zeta_inv}"
        )
    eta = zeta_inv * (params.eps * (params.d + params.delta) * omega_A - 1.0) + 0.5 * (
        N_F + N_S
    )
    return SplittingParams(zeta_inv=zeta_inv, k0=k0, N_S=N_S, N_F=N_F, gap=gap, eta=eta)


@dataclass(frozen=True)
class GapReport:
    """Diagnostics of the spectral-gap condition and parameter inequalities."""

    eps: float
    delta: float
    zeta_inv: float
    k0: int
    N_S: float
    N_F: float
    gap: float
    eta: float
    term1: float
    term2: float
    total: float
    parameter_inequality_value: float
    small_ratio_ok: bool          # eps * zeta_inv < (1 - L_f) / 4
    delta_over_eps_sqrt_zeta: float
    passes: bool


def validate_assumptions(
    params: ModelParams,
    split: SplittingParams,
    lips,
    C_A: float = 1.0,
    M_A: float = 1.0,
    omega_A: float = 0.0,
) -> GapReport:
    """Evaluate the spectral-gap condition with the given Lipschitz budgets.

    ``lips`` is the triple (L_f, L_phi, L_psi).  Passing requires the two
    gap summands to total below one, the parameter inequality to be
    negative, and eps * zeta_inv < (1 - L_f) / 4.
    """
    L_f, L_phi, L_psi = lips
    eps, d, delta = params.eps, params.d, params.delta
    lin_part = (1.0 - eps * split.zeta_inv) * (eps * (d + delta) * omega_A - 1.0)
    param_ineq = lin_part - eps * 0.5 * (split.N_S + split.N_F)
    denom1 = abs(param_ineq)
    term1 = C_A * (L_f + eps * L_phi) / denom1
    term2 = (
        2.0
        * (delta * (C_A + C_A**2 / d) * (L_f + eps * L_phi) + 2.0 * C_A * eps * L_psi)
        / (eps * split.gap)
    )
    total = term1 + term2
    small_ratio_ok = eps * split.zeta_inv < (1.0 - L_f) / 4.0
    delta_ratio = delta / (eps * math.sqrt(split.zeta_inv))
    passes = bool(total < 1.0 and param_ineq < 0.0 and small_ratio_ok)
    return GapReport(
        eps=eps,
        delta=delta,
        zeta_inv=split.zeta_inv,
        k0=split.k0,
        N_S=split.N_S,
        N_F=split.N_F,
        gap=split.gap,
        eta=split.eta,
        term1=term1,
        term2=term2,
        total=total,
        parameter_inequality_value=param_ineq,
        small_ratio_ok=small_ratio_ok,
        delta_over_eps_sqrt_zeta=delta_ratio,
        passes=passes,
    )


# ---------------------------------------------------------------------------
# Lyapunov-Perron fixed point


@dataclass(frozen=True)
class ManifoldPoint:
    """t = 0 slice of a Lyapunov-Perron fixed point over slow data v_slow."""

    grid: Grid
    v_slow: np.ndarray
    u_coeffs: np.ndarray
    v_fast_coeffs: np.ndarray
    iterations: int
    contraction: float
    converged: bool
    t_back: float
    n_t: int

    @property
    def u(self) -> SpectralField:
        return SpectralField(self.grid, self.u_coeffs)

    @property
    def v_fast(self) -> SpectralField:
        return SpectralField(self.grid, self.v_fast_coeffs)


def _h2_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.N, grid.L / 2.0)
    w[0] = grid.L
    return w * (1.0 + grid.mu + grid.mu**2)


def _embed_slow(grid: Grid, v_slow: np.ndarray, k0: int) -> np.ndarray:
    v_slow = np.asarray(v_slow, dtype=float)
    if v_slow.shape != (k0,):
        raise ConfigurationError(f"expected {k0} slow coefficients, got {v_slow.shape}")
    out = np.zeros(grid.N)
    out[:k0] = v_slow
    return out


def _sources(params: ModelParams, grid: Grid, U, V, n_modes, clip_bound=None):
    """Coefficient sources (N_u, psi) of the backward trajectories, dealiased
    and projected onto the Galerkin band.

    ``clip_bound`` saturates the node values before the nonlinearity is
    applied (the cut-off that makes the quadratic terms globally Lipschitz);
    backward trajectories of the slow block grow under the heat group, so
    without it large slow data diverges under quadratic feedback."""
    if params.is_linear:
        n_u = V / params.eps
        psi = np.zeros_like(V)
    else:
        vals = _inverse(np.stack([U, V]), n_nodes=grid.padded_size)
        up, vp = vals[0], vals[1]
        if clip_bound is not None:
            up = np.clip(up, -clip_bound, clip_bound)
            vp = np.clip(vp, -clip_bound, clip_bound)
        lv = params.a - params.b * up - params.c * vp
        n_u_nodes = (params.kappa / params.eps) * (vp - up) ** 2 + lv * up
        psi_nodes = lv * vp
        out = _forward(np.stack([n_u_nodes, psi_nodes]))[:, :, : grid.N]
        n_u, psi = out[0], out[1]
    n_u = n_u.copy()
    psi = psi.copy()
    n_u[:, n_modes:] = 0.0
    psi[:, n_modes:] = 0.0
    return n_u, psi


def _convolve_forward(lam, h, F):
    """I(t_j) = int_{-T}^{t_j} e^{lam (t_j - s)} F(s) ds with F piecewise linear.

    ``lam`` has shape (K,), ``F`` shape (n_t, K); returns the same shape.
    """
    z = lam * h
    decay = np.exp(z)
    wA = h * (_phi1(z) - _phi2(z))
    wB = h * _phi2(z)
    out = np.zeros_like(F)
    for j in range(1, F.shape[0]):
        out[j] = decay * out[j - 1] + wA * F[j - 1] + wB * F[j]
    return out


def _propagate_slow_backward(lam, h, v0, F):
    """Solve v' = lam v + F backward from v(0) = v0 on the slow block."""
    z = lam * h
    grow = np.exp(-z)
    wA = h * (_phi1(z) - _phi2(z))
    wB = h * _phi2(z)
    out = np.zeros_like(F)
    out[-1] = v0
    for j in range(F.shape[0] - 1, 0, -1):
        out[j - 1] = grow * (out[j] - wA * F[j - 1] - wB * F[j])
    return out


def lyapunov_perron_fixed_point(
    v0_S,
    params: ModelParams,
    split: SplittingParams,
    grid: Grid | None = None,
    fast_band: int | None = None,
    t_back: float | None = None,
    n_t: int = 512,
    tol: float = 1e-8,
    max_iter: int = 200,
    gap_report: GapReport | None = None,
    clip_bound: float | None = None,
) -> ManifoldPoint:
    """Fixed point of the discretized Lyapunov-Perron map over slow data v0_S.

    ``v0_S`` holds the k0 slow v-coefficients.  The truncation keeps
    min(grid modes, k0 + fast_band) modes (fast_band defaults to 3 k0).  The
    default backward horizon 20 eps ln(1/tol) is extended automatically when
    the slowest retained kernel needs longer to reach the tail target
    tol/10; an explicitly passed ``t_back`` that is too short raises
    HorizonError instead.  Three consecutive non-contracting sweeps raise
    ContractionError carrying the gap report.

    For the nonlinear kind, pass ``clip_bound`` (the invariant-box bound,
    e.g. K_{0,M}) to saturate the quadratic terms in the far past; backward
    slow-mode growth otherwise feeds the quadratics and large data diverges.
    """
    k0 = split.k0
    if fast_band is None:
        fast_band = 3 * k0
    if grid is None:
        n = 8
        while n < 2 * (k0 + fast_band):
            n *= 2
        grid = build_grid(params.L, n)
    n_modes = min(grid.N, k0 + fast_band)
    if n_modes <= k0:
        raise ConfigurationError("truncation leaves no fast v-modes")
    eps = params.eps
    m_diag = 2.0 if params.is_linear else 1.0
    lam_u = -(params.d + params.delta) * grid.mu - m_diag / eps
    lam_v = -params.d * grid.mu

    # horizon: every retained decaying kernel must reach tol/10 over t_back
    slowest = min(m_diag / eps, params.d * grid.mu[k0])
    needed = math.log(10.0 / tol) / slowest
    if t_back is None:
        t_back = max(20.0 * eps * math.log(1.0 / tol), needed)
    if math.exp(-slowest * t_back) > tol / 10.0:
        raise HorizonError(
            f"t_back={t_back:.4g} leaves truncation tail "
            f"{math.exp(-slowest * t_back):.2e} > tol/10={tol / 10:.2e}"
        )
    if n_t < 8:
        raise ConfigurationError("n_t must be at least 8")

    h = t_back / (n_t - 1)
    t_nodes = -t_back + h * np.arange(n_t)
    weights = np.exp(-split.eta * t_nodes)  # eta < 0: weights <= 1, peak at t = 0
    nw = _h2_weights(grid)
    slow = slice(0, k0)
    fast = slice(k0, n_modes)

    v0 = _embed_slow(grid, v0_S, k0)
    U = np.zeros((n_t, grid.N))
    V = np.zeros((n_t, grid.N))
    V[:, slow] = np.exp(np.outer(t_nodes, lam_v[slow])) * v0[slow]

    def weighted_distance(dU, dV):
        nu = np.sqrt((dU**2) @ nw)
        nvf = np.sqrt((dV[:, fast] ** 2) @ nw[fast])
        nvs = np.sqrt((dV[:, slow] ** 2) @ nw[slow])
        return float(np.max(weights * (nu + nvf + nvs)))

    ratios = []
    prev_dist = None
    bad_streak = 0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        n_u, psi = _sources(params, grid, U, V, n_modes, clip_bound)
        U_new = _convolve_forward(lam_u, h, n_u)
        U_new[:, n_modes:] = 0.0
        S = -params.delta * grid.mu * U + psi
        V_new = np.zeros_like(V)
        V_new[:, fast] = _convolve_forward(lam_v[fast], h, S[:, fast])
        V_new[:, slow] = _propagate_slow_backward(lam_v[slow], h, v0[slow], S[:, slow])
        dist = weighted_distance(U_new - U, V_new - V)
        U, V = U_new, V_new
        if not np.isfinite(dist):
            raise ContractionError(
                "Lyapunov-Perron iterate overflowed", gap_report=gap_report
            )
        if prev_dist is not None and prev_dist > max(tol, 1e-14):
            ratio = dist / prev_dist
            ratios.append(ratio)
            bad_streak = bad_streak + 1 if ratio >= 1.0 else 0
            if bad_streak >= 3:
                raise ContractionError(
                    f"no contraction for 3 consecutive sweeps (last ratio {ratio:.3f})",
                    gap_report=gap_report,
                )
        prev_dist = dist
        if dist < tol:
            converged = True
            break
    contraction = max(ratios[1:], default=(ratios[0] if ratios else 0.0))
    return ManifoldPoint(
        grid=grid,
        v_slow=np.asarray(v0_S, dtype=float).copy(),
        u_coeffs=U[-1].copy(),
        v_fast_coeffs=np.where(np.arange(grid.N) >= k0, V[-1], 0.0),
        iterations=iterations,
        contraction=float(contraction),
        converged=converged,
        t_back=t_back,
        n_t=n_t,
    )


@dataclass
class ManifoldGraph:
    """Sampled graph of the slow manifold over slow-coefficient vectors."""

    k0: int
    points: list
    lipschitz_ratio: float = float("nan")
    note: str = GAP_FORMULA_NOTE

    def __post_init__(self):
        if len(self.points) >= 2:
            self.lipschitz_ratio = self._max_pairwise_ratio()

    def _max_pairwise_ratio(self) -> float:
        nw = _h2_weights(self.points[0].grid)
        best = 0.0
        for i in range(len(self.points)):
            for j in range(i + 1, len(self.points)):
                a, b = self.points[i], self.points[j]
                dv = a.v_slow - b.v_slow
                dnorm = math.sqrt(float(np.sum(nw[: self.k0] * dv**2)))
                if dnorm < 1e-14:
                    continue
                du = math.sqrt(float(np.sum(nw * (a.u_coeffs - b.u_coeffs) ** 2)))
                dvf = math.sqrt(
                    float(np.sum(nw * (a.v_fast_coeffs - b.v_fast_coeffs) ** 2))
                )
                best = max(best, (du + dvf) / dnorm)
        return best


def lyapunov_perron_sweep(v0_samples, params, split, **kwargs) -> ManifoldGraph:
    """Independent graph-point solves over a list of slow-coefficient vectors."""
    points = [
        lyapunov_perron_fixed_point(v0, params, split, **kwargs) for v0 in v0_samples
    ]
    return ManifoldGraph(k0=split.k0, points=points)


# ---------------------------------------------------------------------------
# attraction-based manifold estimate


@dataclass(frozen=True)
class AttractionSample:
    """Approximate graph entry from forward integration off the critical manifold."""

    grid: Grid
    v_slow: np.ndarray
    u_coeffs: np.ndarray
    v_fast_coeffs: np.ndarray
    tau: float


def attraction_projection(
    v0_S,
    params: ModelParams,
    split: SplittingParams,
    tau: float | None = None,
    grid: Grid | None = None,
    dt: float | None = None,
) -> AttractionSample:
    """Integrate forward from the critical-manifold point over (v0_S, 0).

    Runs for tau (default 5 eps ln(1/eps)) and re-reads the terminal fast
    components against the terminal slow components, an O(e^{-c tau} + eps)
    manifold sample.
    """
    if tau is None:
        tau = 5.0 * params.eps * math.log(1.0 / params.eps)
    if tau < 0:
        raise ConfigurationError(f"tau must be >= 0, got {tau}")
    k0 = split.k0
    if grid is None:
        n = 8
        while n < 8 * k0:
            n *= 2
        grid = build_grid(params.L, n)
    v0 = SpectralField(grid, _embed_slow(grid, v0_S, k0))
    if params.is_linear:
        u0 = SpectralField(grid, 0.5 * v0.coeffs)
    else:
        u0 = critical_map_u_of_v(v0, params.kappa)
    if tau == 0.0:
        return AttractionSample(
            grid=grid,
            v_slow=np.asarray(v0_S, dtype=float).copy(),
            u_coeffs=u0.coeffs.copy(),
            v_fast_coeffs=np.zeros(grid.N),
            tau=0.0,
        )
    if dt is None:
        dt = min(0.5 * params.eps, tau / 200.0)
    traj = simulate(FastSlowState(u0, v0, 0.0), params, T=tau, dt=dt, sample_every=10**9)
    end = traj.final()
    mask = np.arange(grid.N) >= k0
    return AttractionSample(
        grid=grid,
        v_slow=end.v.coeffs[:k0].copy(),
        u_coeffs=end.u.coeffs.copy(),
        v_fast_coeffs=np.where(mask, end.v.coeffs, 0.0),
        tau=tau,
    )


# ---------------------------------------------------------------------------
# resolvent bounds


@dataclass(frozen=True)
class ResolventReport:
    alpha: float
    beta: float
    worst_ratio_resolvent: float
    worst_mode_resolvent: int
    worst_ratio_shifted: float
    worst_mode_shifted: int
    passes: bool


def resolvent_bound_check(params: ModelParams, grid: Grid, alpha: float, beta: float) -> ResolventReport:
    """Per-mode check of the two resolvent estimates of (eps (d+delta) Dxx - Id)^-1.

    The first quantity mu^(alpha-beta) / |eps (d+delta) lam - 1| is tested
    against 1 for alpha <= beta and eps^{2(beta-alpha)} for alpha > beta,
    over every retained mode; the second quantity (the Id-shifted operator)
    against eps^{2(beta-alpha)} over the resolvent-scale modes
    mu <= 1/(eps (d+delta)) only: above that scale the shifted operator
    approaches the identity mode-wise and the stated bound provably fails
    (the quantity grows like mu^(alpha-beta) unchecked).  Mode 0 uses the
    conventions 0^0 = 1 and 0^positive = 0 and is skipped where the
    exponent is negative.
    """
    if not (0.0 <= alpha <= 1.0 and 0.0 <= beta <= 1.0):
        raise ConfigurationError("alpha and beta must lie in [0, 1]")
    eps, dd = params.eps, params.d + params.delta
    expo = alpha - beta
    bound1 = 1.0 if alpha <= beta else eps ** (2.0 * (beta - alpha))
    bound2 = eps ** (2.0 * (beta - alpha))
    mu_resolvent = 1.0 / (eps * dd) if dd > 0 else float("inf")
    worst1, arg1 = 0.0, 0
    worst2, arg2 = 0.0, 0
    for k in range(grid.N):
        mu = grid.mu[k]
        denom = eps * dd * mu + 1.0
        if mu == 0.0:
            if expo > 0:
                power = 0.0
            elif expo == 0:
                power = 1.0
            else:
                continue
        else:
            power = mu**expo
        q1 = power / denom
        q2 = eps * dd * mu * power / denom
        if q1 / bound1 > worst1:
            worst1, arg1 = q1 / bound1, k
        if mu <= mu_resolvent and q2 / bound2 > worst2:
            worst2, arg2 = q2 / bound2, k
    return ResolventReport(
        alpha=alpha,
        beta=beta,
        worst_ratio_resolvent=worst1,
        worst_mode_resolvent=arg1,
        worst_ratio_shifted=worst2,
        worst_mode_shifted=arg2,
        passes=bool(worst1 <= 1.0 + 1e-12 and worst2 <= 1.0 + 1e-12),
    )
