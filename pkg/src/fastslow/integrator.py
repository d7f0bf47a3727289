"""Exponential time stepping for the fast-slow system.

The linear part is applied exactly per cosine mode through the 2x2 matrix

    M_k = [[-(d+delta) mu_k - m/eps,  (m-1)/eps],
           [        -delta mu_k,        -d mu_k]]

with m = 2 for the linear reversible reaction (whole system linear, the step
is exact) and m = 1 for the nonlinear kind, where only the -u/eps part of g
is treated linearly and the remainder

    N(u, v) = (kappa f~(u, v)/eps + phi(u, v),  psi(u, v))

is integrated by a second-order exponential Runge-Kutta rule with weights
h*phi1(h M_k) and h*phi2(h M_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DivergenceError
from .models import ModelParams
from .spectral_core import Grid, SpectralField, _forward, _inverse

__all__ = [
    "FastSlowState",
    "ModePropagator",
    "Trajectory",
    "linear_propagator",
    "etd_step",
    "simulate",
    "DEFAULT_CT",
]

DEFAULT_CT = 0.5  # stability fraction: dt <= DEFAULT_CT * eps for the nonlinear kind
BLOWUP_LIMIT = 1e8
PHI_SERIES_CUTOFF = 0.05
EIGEN_GAP_CUTOFF = 1e-8


# ---------------------------------------------------------------------------
# scalar phi functions, cancellation-safe near z = 0

def _phi1(z):
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    nz = z != 0.0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def _phi2(z):
    z = np.asarray(z, dtype=float)
    out = np.full_like(z, 0.5)
    big = np.abs(z) > PHI_SERIES_CUTOFF
    zb = z[big]
    out[big] = (np.expm1(zb) - zb) / zb**2
    small = ~big
    zs = z[small]
    # sum_{n>=0} z^n / (n+2)!
    acc = np.zeros_like(zs)
    term = np.full_like(zs, 0.5)
    for n in range(12):
        acc = acc + term
        term = term * zs / (n + 3)
    out[small] = acc
    return out


def _dphi1(z):
    z = np.asarray(z, dtype=float)
    out = np.full_like(z, 0.5)
    big = np.abs(z) > PHI_SERIES_CUTOFF
    zb = z[big]
    out[big] = ((zb - 1.0) * np.exp(zb) + 1.0) / zb**2
    small = ~big
    zs = z[small]
    acc = np.zeros_like(zs)
    fact = 2.0  # (m+2)! running
    term = np.full_like(zs, 1.0 / 2.0)  # (m+1)/(m+2)! at m=0
    for m in range(12):
        acc = acc + term
        fact *= m + 3
        term = (m + 2) * zs ** (m + 1) / fact
    out[small] = acc
    return out


def _dphi2(z):
    z = np.asarray(z, dtype=float)
    out = np.full_like(z, 1.0 / 6.0)
    big = np.abs(z) > PHI_SERIES_CUTOFF
    zb = z[big]
    out[big] = ((zb - 2.0) * np.exp(zb) + zb + 2.0) / zb**3
    small = ~big
    zs = z[small]
    acc = np.zeros_like(zs)
    fact = 6.0  # (m+3)! running
    term = np.full_like(zs, 1.0 / 6.0)
    for m in range(12):
        acc = acc + term
        fact *= m + 4
        term = (m + 2) * zs ** (m + 1) / fact
    out[small] = acc
    return out


def _matrix_function(Z, f, df):
    """Apply a scalar function to a stack of real 2x2 matrices.

    ``Z`` has shape (2, 2, n).  Uses the closed form through the two (real)
    eigenvalues; falls back to the confluent first-order formula when the
    eigenvalue gap is below EIGEN_GAP_CUTOFF.
    """
    A, B = Z[0, 0], Z[0, 1]
    C, D = Z[1, 0], Z[1, 1]
    half_tr = 0.5 * (A + D)
    disc = (0.5 * (A - D)) ** 2 + B * C
    disc = np.maximum(disc, 0.0)
    root = np.sqrt(disc)
    z1 = half_tr + root
    z2 = half_tr - root

    out = np.empty_like(Z)
    distinct = (z1 - z2) > EIGEN_GAP_CUTOFF
    if np.any(distinct):
        l1, l2 = z1[distinct], z2[distinct]
        fd = (f(l1) - f(l2)) / (l1 - l2)
        c0 = (f(l2) * l1 - f(l1) * l2) / (l1 - l2)
        for i in range(2):
            for j in range(2):
                out[i, j, distinct] = fd * Z[i, j, distinct] + (c0 if i == j else 0.0)
    conf = ~distinct
    if np.any(conf):
        lbar = half_tr[conf]
        fv, dv = f(lbar), df(lbar)
        for i in range(2):
            for j in range(2):
                diag = lbar if i == j else 0.0
                out[i, j, conf] = dv * (Z[i, j, conf] - diag) + (fv if i == j else 0.0)
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FastSlowState:
    """Snapshot (u, v) of the fast-slow pair at time t."""

    u: SpectralField
    v: SpectralField
    t: float

    def __post_init__(self):
        if self.u.grid.L != self.v.grid.L or self.u.grid.N != self.v.grid.N:
            raise ConfigurationError("u and v must share one grid")


@dataclass(frozen=True)
class ModePropagator:
    """Per-mode exact propagator E = exp(dt M_k) with ETD weight matrices.

    Arrays have shape (2, 2, N).  ``W1 = dt phi1(dt M)``, ``W2 = dt phi2(dt M)``.
    """

    dt: float
    M: np.ndarray
    E: np.ndarray
    W1: np.ndarray
    W2: np.ndarray

    def mode_matrix(self, k: int) -> np.ndarray:
        return self.M[:, :, k].copy()

    def apply(self, P: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.stack(
            [
                P[0, 0] * y[0] + P[0, 1] * y[1],
                P[1, 0] * y[0] + P[1, 1] * y[1],
            ]
        )


def _system_matrices(params: ModelParams, grid: Grid) -> np.ndarray:
    mu = grid.mu
    M = np.zeros((2, 2, grid.N))
    if params.is_linear:
        M[0, 0] = -(params.d + params.delta) * mu - 2.0 / params.eps
        M[0, 1] = 1.0 / params.eps
    else:
        M[0, 0] = -(params.d + params.delta) * mu - 1.0 / params.eps
    M[1, 0] = -params.delta * mu
    M[1, 1] = -params.d * mu
    return M


@lru_cache(maxsize=32)
def _cached_propagator(params: ModelParams, grid: Grid, dt: float) -> ModePropagator:
    M = _system_matrices(params, grid)
    Z = dt * M
    if dt == 0.0:
        eye = np.zeros_like(M)
        eye[0, 0] = eye[1, 1] = 1.0
        return ModePropagator(dt=dt, M=M, E=eye, W1=np.zeros_like(M), W2=np.zeros_like(M))
    E = _matrix_function(Z, np.exp, np.exp)
    W1 = dt * _matrix_function(Z, _phi1, _dphi1)
    W2 = dt * _matrix_function(Z, _phi2, _dphi2)
    return ModePropagator(dt=dt, M=M, E=E, W1=W1, W2=W2)


def linear_propagator(params: ModelParams, grid: Grid, dt: float) -> ModePropagator:
    """Exact per-mode propagator and ETD weights for time step dt >= 0."""
    if dt < 0:
        raise ConfigurationError(f"time step must be >= 0, got {dt}")
    return _cached_propagator(params, grid, float(dt))


def _remainder(params: ModelParams, grid: Grid, y: np.ndarray) -> np.ndarray:
    """Coefficients of the nonlinear remainder N(u, v), dealiased."""
    if params.is_linear:
        return np.zeros_like(y)
    vals = _inverse(y, n_nodes=grid.padded_size)
    up, vp = vals[0], vals[1]
    lv = params.a - params.b * up - params.c * vp
    n_u = (params.kappa / params.eps) * (vp - up) ** 2 + lv * up
    n_v = lv * vp
    return _forward(np.stack([n_u, n_v]))[:, : grid.N]


def _check_state(y: np.ndarray, t: float):
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > BLOWUP_LIMIT:
        raise DivergenceError(f"state diverged at t={t:.6g}", t=t)


def _step_array(y, params, grid, prop):
    n0 = _remainder(params, grid, y)
    a = prop.apply(prop.E, y) + prop.apply(prop.W1, n0)
    na = _remainder(params, grid, a)
    return a + prop.apply(prop.W2, na - n0)


def etd_step(state: FastSlowState, params: ModelParams, dt: float, c_t: float = DEFAULT_CT) -> FastSlowState:
    """One second-order exponential Runge-Kutta step.

    For the nonlinear kind dt must satisfy dt <= c_t * eps (explicit
    treatment of the kappa f~/eps term); the linear kind has no restriction
    and the step is exact.
    """
    if dt <= 0:
        raise ConfigurationError(f"time step must be positive, got {dt}")
    if not params.is_linear and dt > c_t * params.eps * (1 + 1e-12):
        raise ConfigurationError(
            f"dt={dt} exceeds the stability bound {c_t}*eps={c_t * params.eps}"
        )
    grid = state.u.grid
    prop = linear_propagator(params, grid, dt)
    y = np.stack([state.u.coeffs, state.v.coeffs])
    y = _step_array(y, params, grid, prop)
    t = state.t + dt
    _check_state(y, t)
    return FastSlowState(SpectralField(grid, y[0]), SpectralField(grid, y[1]), t)


@dataclass
class Trajectory:
    """Sampled states plus the running node-wise sup of u1 = u and u2 = v - u."""

    times: np.ndarray
    states: list
    u1_linf: np.ndarray
    u2_linf: np.ndarray

    @property
    def grid(self) -> Grid:
        return self.states[0].u.grid

    def final(self) -> FastSlowState:
        return self.states[-1]


def _linf_pair(y: np.ndarray) -> tuple:
    vals = _inverse(y)
    u1 = np.max(np.abs(vals[0]))
    u2 = np.max(np.abs(vals[1] - vals[0]))
    return float(u1), float(u2)


def simulate(
    state0: FastSlowState,
    params: ModelParams,
    T: float,
    dt: float | None = None,
    sample_every: int = 1,
    c_t: float = DEFAULT_CT,
) -> Trajectory:
    """Integrate to time T, recording every ``sample_every``-th step.

    dt defaults to min(c_t * eps, T/1000) and is shrunk so that an integer
    number of steps lands exactly on T.  The final state is always recorded.
    """
    if T < 0:
        raise ConfigurationError(f"final time must be >= 0, got T={T}")
    if sample_every < 1:
        raise ConfigurationError(f"sample_every must be a positive integer")
    grid = state0.u.grid
    y = np.stack([state0.u.coeffs, state0.v.coeffs])
    u1, u2 = _linf_pair(y)
    times = [state0.t]
    states = [state0]
    linf1, linf2 = [u1], [u2]
    if T == 0:
        return Trajectory(np.asarray(times), states, np.asarray(linf1), np.asarray(linf2))
    if dt is None:
        dt = min(c_t * params.eps, T / 1000.0) if not params.is_linear else T / 1000.0
    n_steps = max(1, math.ceil(T / dt - 1e-9))
    dt = T / n_steps
    if not params.is_linear and dt > c_t * params.eps * (1 + 1e-12):
        raise ConfigurationError(
            f"dt={dt} exceeds the stability bound {c_t}*eps={c_t * params.eps}"
        )
    prop = linear_propagator(params, grid, dt)
    for step in range(1, n_steps + 1):
        y = _step_array(y, params, grid, prop)
        t = state0.t + step * dt
        _check_state(y, t)
        if step % sample_every == 0 or step == n_steps:
            u1, u2 = _linf_pair(y)
            times.append(t)
            states.append(
                FastSlowState(SpectralField(grid, y[0]), SpectralField(grid, y[1]), t)
            )
            linf1.append(u1)
            linf2.append(u2)
    return Trajectory(np.asarray(times), states, np.asarray(linf1), np.asarray(linf2))
