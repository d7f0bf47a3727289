"""Critical manifold map, limit system, initial layer and constants chain.

The algebraic constraint -u + kappa (v - u)^2 = 0 with 0 <= u <= v has the
unique admissible root

    u = h_kappa(v) = 4 kappa v^2 / (1 + sqrt(1 + 4 kappa v))^2,

written in a cancellation-free form (equivalent to
v + (1 - sqrt(4 kappa v + 1)) / (2 kappa), and to the kappa = 1 expression
(2v + 1 - sqrt(4v + 1)) / 2).  The limit system

    dv/dt = d v_xx + psi(h_kappa(v), v)

is integrated by the same exponential stepper as the full system, with the
scalar per-mode symbol -d mu_k.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergenceError, DomainError
from .integrator import FastSlowState, Trajectory, _phi1, _phi2
from .models import ModelParams
from .spectral_core import Grid, SpectralField, _forward, _inverse, nonlinear_eval

__all__ = [
    "ConstantsReport",
    "InitialLayerReport",
    "critical_map_u_of_v",
    "initial_layer",
    "theoretical_constants",
    "sharp_embedding_constant_numeric",
    "solve_limit_system",
]

NODE_TOL = 1e-12
BLOWUP_LIMIT = 1e8


def _critical_pointwise(v: np.ndarray, kappa: float) -> np.ndarray:
    v = np.maximum(np.asarray(v, dtype=float), 0.0)
    s = 1.0 + np.sqrt(1.0 + 4.0 * kappa * v)
    return 4.0 * kappa * v**2 / s**2


def critical_map_u_of_v(v, kappa: float):
    """u = h_kappa(v), the admissible root of -u + kappa (v - u)^2 = 0.

    Accepts scalars, arrays or a SpectralField (applied through dealiased
    pointwise evaluation).  Requires v >= 0; satisfies 0 <= u <= v.
    """
    if isinstance(v, SpectralField):
        vals = v.values()
        if np.min(vals) < -NODE_TOL:
            raise DomainError(
                f"negative node value {np.min(vals):.3e} outside tolerance"
            )
        return nonlinear_eval([v], lambda w: _critical_pointwise(w, kappa))
    arr = np.asarray(v, dtype=float)
    if np.min(arr) < -NODE_TOL:
        raise DomainError(f"negative value {np.min(arr):.3e} outside tolerance")
    out = _critical_pointwise(arr, kappa)
    return float(out) if np.isscalar(v) or arr.ndim == 0 else out


@dataclass(frozen=True)
class InitialLayerReport:
    """Residual size of the initial data and the projected starting point."""

    eps_in: float
    u0: SpectralField
    deviation_ratio: float  # ||u_in - u0||_H2 / eps_in, nan when eps_in ~ 0


def initial_layer(u_in: SpectralField, v_in: SpectralField, kappa: float) -> InitialLayerReport:
    """Initial-layer size eps_in = ||-u_in + kappa (v_in - u_in)^2||_H2.

    Also returns u0 = h_kappa(v_in), the u-component the limit system starts
    from, and the ratio ||u_in - u0||_H2 / eps_in.
    """
    u_vals, v_vals = u_in.values(), v_in.values()
    if np.min(u_vals) < -NODE_TOL or np.min(v_vals - u_vals) < -NODE_TOL:
        raise DomainError("initial data must satisfy v_in >= u_in >= 0 pointwise")
    residual = nonlinear_eval([u_in, v_in], lambda x, y: -x + kappa * (y - x) ** 2)
    eps_in = residual.sobolev_norm(2)
    u0 = critical_map_u_of_v(v_in, kappa)
    if eps_in > 1e-13:
        ratio = (u_in - u0).sobolev_norm(2) / eps_in
    else:
        ratio = float("nan")
    return InitialLayerReport(eps_in=eps_in, u0=u0, deviation_ratio=ratio)


# ---------------------------------------------------------------------------
# constants chain


@dataclass(frozen=True)
class ConstantsReport:
    """Embedding/smoothing constants and the admissibility chain for radius M."""

    M: float
    C_star: float
    C_HS: float
    lambda_1: float
    K0: float
    K1: float
    K2: float
    K_M: float
    kappa_bound: float
    kappa_ok: bool


def _sup_abs_psi(a, b, c, K0):
    # psi(x, y) = (a - b x - c y) y is affine in x, quadratic in y: the
    # maximum of |psi| over the square sits at x in {0, K0} and y at an
    # endpoint or the interior critical point (a - b x) / (2 c).
    best = 0.0
    for x in (0.0, K0):
        ys = [0.0, K0]
        if c > 0:
            ys.append(min(max((a - b * x) / (2 * c), 0.0), K0))
        for y in ys:
            best = max(best, abs((a - b * x - c * y) * y))
    return best


def _sum_sup_abs_dpsi(a, b, c, K0):
    corners = [(0.0, 0.0), (0.0, K0), (K0, 0.0), (K0, K0)]
    sup1 = max(abs(-b * y) for _, y in corners)
    sup2 = max(abs(a - b * x - 2 * c * y) for x, y in corners)
    return sup1 + sup2


def _estimate_smoothing_constant(d, L, rng, n_fields=200, n_modes=48, fine=512, t_grid=None):
    """Numeric lower bound for the heat-smoothing constant of eq-type

        || e^{t d dxx} w_x ||_p <= C e^{-lambda_1 t} t^{-1/2} || w ||_p

    maximized over random band-limited fields, a log-spaced t grid and
    p in {2, inf}."""
    lam1 = (math.pi / L) ** 2
    if t_grid is None:
        t_grid = np.logspace(-3, 0, 40)
    k = np.arange(1, n_modes + 1)
    x = np.linspace(0.0, L, fine)
    cos_tab = np.cos(np.outer(k, x) * (np.pi / L))
    sin_tab = np.sin(np.outer(k, x) * (np.pi / L))
    coeffs = rng.standard_normal((n_fields, n_modes)) / (1.0 + k**2)
    w_l2 = np.sqrt((L / 2) * np.sum(coeffs**2, axis=1))
    w_linf = np.max(np.abs(coeffs @ cos_tab), axis=1)
    s = -coeffs * (k * np.pi / L)  # sine amplitudes of w_x
    best = 0.0
    for t in t_grid:
        decay = np.exp(-d * (k * np.pi / L) ** 2 * t)
        st = s * decay
        n_l2 = np.sqrt((L / 2) * np.sum(st**2, axis=1))
        n_linf = np.max(np.abs(st @ sin_tab), axis=1)
        scale = math.sqrt(t) * math.exp(lam1 * t)
        best = max(best, float(np.max(n_l2 / w_l2)) * scale)
        best = max(best, float(np.max(n_linf / w_linf)) * scale)
    return best


def theoretical_constants(
    params: ModelParams,
    M: float,
    rng=None,
    hs_inflation: float = 1.5,
) -> ConstantsReport:
    """Embedding constant, smoothing estimate and the K-chain for radius M.

    C_star = sqrt(coth(L)) is the sharp sup-norm embedding constant of
    H1(0, L) (reproducing-kernel closed form); C_HS is a numeric lower bound
    inflated by ``hs_inflation`` and is only used for the conservative
    admissibility report, never by the solvers.
    """
    if not M > 0:
        raise ConfigurationError(f"ball radius must be positive, got M={M}")
    if rng is None:
        rng = np.random.default_rng(0)
    L = params.L
    C_star = math.sqrt(1.0 / math.tanh(L))
    lam1 = (math.pi / L) ** 2
    C_HS = hs_inflation * _estimate_smoothing_constant(params.d, L, rng)
    a, b, c = params.a, params.b, params.c
    K0 = C_star * M + (a / c if c > 0 else 0.0)
    root = math.sqrt(math.pi / lam1)
    K1 = C_star * M + C_HS * root * _sup_abs_psi(a, b, c, K0)
    K2 = M + 3.0 * C_HS * root * _sum_sup_abs_dpsi(a, b, c, K0) * math.sqrt(L) * K1
    K_M = (2 * K0 + 3 * K1) * math.sqrt(L) + 3 * K2 + 2 * math.sqrt(L) * K1**2
    kappa_bound = 1.0 / (12.0 * C_star * K_M)
    return ConstantsReport(
        M=M,
        C_star=C_star,
        C_HS=C_HS,
        lambda_1=lam1,
        K0=K0,
        K1=K1,
        K2=K2,
        K_M=K_M,
        kappa_bound=kappa_bound,
        kappa_ok=bool(params.kappa < kappa_bound),
    )


def sharp_embedding_constant_numeric(L, n_modes=256, n_trials=2000, rng=None, n_x=801):
    """Numeric maximization of |w(x0)| / ||w||_H1 over cosine polynomials.

    Combines seeded random trials with the exact supremum over the truncated
    space (the H1 norm of the point-evaluation functional, computed per x0
    from the orthogonal basis).  Converges to sqrt(coth(L)) as the mode count
    grows.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    k = np.arange(n_modes + 1)
    mu = (k * np.pi / L) ** 2
    h = (L / 2) * (1.0 + mu)
    h[0] = L
    x0 = np.linspace(0.0, L, n_x)
    basis = np.cos(np.outer(k, x0) * (np.pi / L))
    riesz = np.sqrt(np.max(np.sum(basis**2 / h[:, None], axis=0)))
    best = 0.0
    for _ in range(n_trials):
        c = rng.standard_normal(n_modes + 1) / (1.0 + k)
        w = c @ basis
        norm = math.sqrt(float(np.sum(h * c**2)))
        best = max(best, float(np.max(np.abs(w))) / norm)
    return max(best, float(riesz))


# ---------------------------------------------------------------------------
# limit system


def _limit_remainder(params: ModelParams, grid: Grid, v: np.ndarray) -> np.ndarray:
    if params.is_linear:
        return np.zeros_like(v)
    vp = _inverse(v, n_nodes=grid.padded_size)
    up = _critical_pointwise(vp, params.kappa)
    psi = (params.a - params.b * up - params.c * vp) * vp
    return _forward(psi)[: grid.N]


def solve_limit_system(
    v_in: SpectralField,
    params: ModelParams,
    T: float,
    dt: float,
    sample_every: int = 1,
    constants: ConstantsReport | None = None,
) -> Trajectory:
    """Integrate the reduced system dv/dt = d v_xx + psi(h_kappa(v), v).

    Uses the exponential RK2 stepper with the scalar symbol -d mu_k (for the
    linear kind the reduced symbol is -(d + delta/2) mu_k and the step is
    exact).  Returns a trajectory whose u-component is h_kappa(v) at every
    sample.
    """
    if T < 0:
        raise ConfigurationError(f"final time must be >= 0, got T={T}")
    vals = v_in.values()
    if np.min(vals) < -NODE_TOL:
        raise DomainError("limit system requires v_in >= 0 pointwise")
    if constants is not None and not constants.kappa_ok:
        warnings.warn(
            "kappa exceeds the admissibility bound; the critical manifold "
            "theory does not certify this run",
            stacklevel=2,
        )
    grid = v_in.grid
    if params.is_linear:
        lam = -(params.d + params.delta / 2.0) * grid.mu
    else:
        lam = -params.d * grid.mu

    def u_of(vf: SpectralField) -> SpectralField:
        if params.is_linear:
            return SpectralField(grid, 0.5 * vf.coeffs)
        # permissive reconstruction: v may dip below zero at roundoff scale
        # when it touches the axis; the pointwise map clips there
        return nonlinear_eval([vf], lambda w: _critical_pointwise(w, params.kappa))

    times = [0.0]
    states = [FastSlowState(u_of(v_in), v_in, 0.0)]
    linf1 = [float(np.max(np.abs(states[0].u.values())))]
    linf2 = [float(np.max(np.abs(vals - states[0].u.values())))]
    if T == 0:
        return Trajectory(np.asarray(times), states, np.asarray(linf1), np.asarray(linf2))

    n_steps = max(1, math.ceil(T / dt - 1e-9))
    dt = T / n_steps
    z = dt * lam
    E = np.exp(z)
    W1 = dt * _phi1(z)
    W2 = dt * _phi2(z)
    y = v_in.coeffs.copy()
    for step in range(1, n_steps + 1):
        n0 = _limit_remainder(params, grid, y)
        a = E * y + W1 * n0
        na = _limit_remainder(params, grid, a)
        y = a + W2 * (na - n0)
        t = step * dt
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_LIMIT:
            raise DivergenceError(f"limit system diverged at t={t:.6g}", t=t)
        if step % sample_every == 0 or step == n_steps:
            vf = SpectralField(grid, y)
            uf = u_of(vf)
            times.append(t)
            states.append(FastSlowState(uf, vf, t))
            uv, vv = uf.values(), vf.values()
            linf1.append(float(np.max(np.abs(uv))))
            linf2.append(float(np.max(np.abs(vv - uv))))
    return Trajectory(np.asarray(times), states, np.asarray(linf1), np.asarray(linf2))
