import numpy as np
import pytest

from fastslow import (
    SpectralField,
    build_grid,
    cosine_transform,
    laplacian_symbol,
    nonlinear_eval,
    sobolev_norm,
)
from fastslow.errors import ConfigurationError, ShapeError


def quadrature_coeff(fn, k, L, n=200001):
    # independent oracle: w_k = (2/L) int w cos(k pi x / L) dx  (1/L for k = 0)
    x = np.linspace(0.0, L, n)
    w = fn(x) * np.cos(k * np.pi * x / L)
    scale = (1.0 if k == 0 else 2.0) / L
    return scale * np.trapezoid(w, x)


def quadrature_norm(fn, L, order, n=200001):
    x = np.linspace(0.0, L, n)
    h = x[1] - x[0]
    total = np.trapezoid(fn(x) ** 2, x)
    w = fn(x)
    for _ in range(order):
        w = np.gradient(w, h, edge_order=2)
        total += np.trapezoid(w**2, x)
    return np.sqrt(total)


def test_build_grid_unit_length_eigenvalues():
    g = build_grid(np.pi, 8)
    assert np.allclose(g.mu, np.arange(8) ** 2)
    assert np.allclose(g.nodes, np.pi * (np.arange(8) + 0.5) / 8)


def test_build_grid_scaled_eigenvalues():
    g = build_grid(2 * np.pi, 8)
    # mu_k = (k pi / L)^2 = k^2 / 4
    assert np.allclose(g.mu, np.arange(8) ** 2 / 4.0)


@pytest.mark.parametrize("bad_n", [7, 12, 4])
def test_build_grid_rejects_bad_node_count(bad_n):
    with pytest.raises(ConfigurationError):
        build_grid(np.pi, bad_n)


def test_build_grid_rejects_bad_length():
    with pytest.raises(ConfigurationError):
        build_grid(0.0, 16)


def test_forward_transform_of_basis_mode():
    g = build_grid(np.pi, 16)
    w = SpectralField.from_function(g, lambda x: np.cos(2 * x))
    expected = np.zeros(16)
    expected[2] = 1.0
    assert np.max(np.abs(w.coeffs - expected)) < 1e-13


def test_forward_transform_of_constant():
    g = build_grid(np.pi, 16)
    w = SpectralField.from_function(g, lambda x: np.ones_like(x))
    assert abs(w.coeffs[0] - 1.0) < 1e-14
    assert np.max(np.abs(w.coeffs[1:])) < 1e-14


def test_forward_transform_cosine_squared():
    g = build_grid(np.pi, 16)
    w = SpectralField.from_function(g, lambda x: np.cos(x) ** 2)
    # oracle: quadrature of the projection integrals
    for k in range(6):
        ref = quadrature_coeff(lambda x: np.cos(x) ** 2, k, np.pi)
        assert abs(w.coeffs[k] - ref) < 1e-8
    assert abs(w.coeffs[0] - 0.5) < 1e-13
    assert abs(w.coeffs[2] - 0.5) < 1e-13


def test_transform_length_mismatch():
    g = build_grid(np.pi, 16)
    with pytest.raises(ShapeError):
        cosine_transform(g, np.zeros(8), "forward")


def test_transform_unknown_direction():
    g = build_grid(np.pi, 16)
    with pytest.raises(ConfigurationError):
        cosine_transform(g, np.zeros(16), "sideways")


def test_round_trip_identity_random_fields():
    g = build_grid(np.pi, 64)
    rng = np.random.default_rng(42)
    for _ in range(100):
        vals = rng.standard_normal(64)
        back = cosine_transform(g, cosine_transform(g, vals, "forward"), "inverse")
        assert np.max(np.abs(back - vals)) <= 1e-12 * max(1.0, np.max(np.abs(vals)))


def test_sobolev_norm_constant():
    g = build_grid(np.pi, 16)
    one = SpectralField.from_function(g, lambda x: np.ones_like(x))
    assert abs(sobolev_norm(one, 0) - np.sqrt(np.pi)) < 1e-13


def test_sobolev_norm_cosine_h2():
    g = build_grid(np.pi, 16)
    w = SpectralField.from_function(g, lambda x: np.cos(x))
    # ||w||^2 = pi/2, ||w'||^2 = pi/2, ||w''||^2 = pi/2
    assert abs(sobolev_norm(w, 2) - np.sqrt(1.5 * np.pi)) < 1e-13
    ref = quadrature_norm(lambda x: np.cos(x), np.pi, 2)
    assert abs(sobolev_norm(w, 2) - ref) < 1e-5


def test_sobolev_norm_zero_field():
    g = build_grid(np.pi, 16)
    z = SpectralField.zero(g)
    for order in (0, 1, 2):
        assert sobolev_norm(z, order) == 0.0


def test_sobolev_norm_bad_order():
    g = build_grid(np.pi, 16)
    with pytest.raises(ConfigurationError):
        sobolev_norm(SpectralField.zero(g), 3)


def test_norm_monotonicity():
    g = build_grid(np.pi, 32)
    rng = np.random.default_rng(3)
    for _ in range(50):
        w = SpectralField(g, rng.standard_normal(32))
        n0, n1, n2 = (sobolev_norm(w, j) for j in (0, 1, 2))
        assert n0 <= n1 <= n2


def test_parseval_band_limited():
    g = build_grid(np.pi, 64)
    rng = np.random.default_rng(11)
    for _ in range(25):
        c = np.zeros(64)
        band = (2 * 64) // 3
        c[:band] = rng.standard_normal(band)
        w = SpectralField(g, c)
        vals = w.values()
        quad = (g.L / g.N) * np.sum(vals**2)
        assert abs(quad - sobolev_norm(w, 0) ** 2) < 1e-11 * max(1.0, quad)


def test_nonlinear_eval_square_of_cosine():
    g = build_grid(np.pi, 16)
    w = SpectralField.from_function(g, lambda x: np.cos(x))
    sq = nonlinear_eval([w], lambda u: u * u)
    expected = np.zeros(16)
    expected[0] = 0.5
    expected[2] = 0.5
    assert np.max(np.abs(sq.coeffs - expected)) < 1e-13


def test_nonlinear_eval_identity():
    g = build_grid(np.pi, 32)
    rng = np.random.default_rng(5)
    w = SpectralField(g, rng.standard_normal(32))
    out = nonlinear_eval([w], lambda u: u)
    assert np.max(np.abs(out.coeffs - w.coeffs)) < 1e-13


def test_nonlinear_eval_vanishes_on_diagonal():
    g = build_grid(np.pi, 32)
    rng = np.random.default_rng(6)
    u = SpectralField(g, rng.standard_normal(32))
    out = nonlinear_eval([u, u], lambda a, b: 2.0 * (b - a) ** 2)
    assert np.max(np.abs(out.coeffs)) < 1e-13


def test_nonlinear_eval_grid_mismatch():
    a = SpectralField.zero(build_grid(np.pi, 16))
    b = SpectralField.zero(build_grid(np.pi, 32))
    with pytest.raises(ShapeError):
        nonlinear_eval([a, b], lambda x, y: x + y)


def test_dealiasing_exact_on_basis_modes():
    g = build_grid(np.pi, 32)
    for k in range(1, g.N // 3 + 1):
        w = SpectralField.from_function(g, lambda x, k=k: np.cos(k * x))
        sq = nonlinear_eval([w], lambda u: u * u)
        expected = np.zeros(32)
        expected[0] = 0.5
        expected[2 * k] = 0.5
        assert np.max(np.abs(sq.coeffs - expected)) <= 1e-12


def test_laplacian_symbol_values():
    g = build_grid(np.pi, 16)
    assert laplacian_symbol(g, 3) == -9.0
    assert laplacian_symbol(g, 0) == 0.0
    g2 = build_grid(2 * np.pi, 16)
    assert abs(laplacian_symbol(g2, 4) - (-4.0)) < 1e-14


def test_laplacian_symbol_out_of_range():
    g = build_grid(np.pi, 16)
    with pytest.raises(IndexError):
        laplacian_symbol(g, 16)


def test_field_rejects_nonfinite():
    g = build_grid(np.pi, 16)
    c = np.zeros(16)
    c[3] = np.nan
    with pytest.raises(ShapeError):
        SpectralField(g, c)
