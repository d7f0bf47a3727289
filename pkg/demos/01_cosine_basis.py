"""Tour of the cosine-spectral toolbox: transforms, norms, dealiasing.

Everything lives on the half-sample nodes x_j = L (j + 1/2) / N of (0, L),
where the type-II DCT is an exact change of basis and Neumann symmetry is
automatic.
"""

import numpy as np

from fastslow import SpectralField, build_grid, nonlinear_eval, sobolev_norm

grid = build_grid(np.pi, 32)
print(f"grid: L = pi, N = {grid.N}, modes 0..{grid.K}, mu_k = k^2")

# A basis function transforms to a single coefficient.
w = SpectralField.from_function(grid, lambda x: np.cos(3 * x))
print("cos(3x) -> coefficient at k=3:", w.coeffs[3], "| others:",
      np.max(np.abs(np.delete(w.coeffs, 3))))

# Norms come straight from the coefficients.
print("||cos(3x)||_L2 =", sobolev_norm(w, 0), " (sqrt(pi/2) =", np.sqrt(np.pi / 2), ")")
print("||cos(3x)||_H1 =", sobolev_norm(w, 1), " (sqrt((1+9) pi/2) =", np.sqrt(10 * np.pi / 2), ")")

# Quadratic products dealias exactly with 3/2 padding: cos^2(3x) has only
# modes 0 and 6, and the computed coefficients carry no aliasing residue.
sq = nonlinear_eval([w], lambda u: u * u)
print("cos(3x)^2 coefficients at k=0 and k=6:", sq.coeffs[0], sq.coeffs[6])
print("aliasing residue:", np.max(np.abs(sq.coeffs - np.where(
    np.isin(np.arange(grid.N), [0, 6]), 0.5, 0.0))))

# Round trip: node values -> coefficients -> node values is the identity.
rng = np.random.default_rng(0)
f = SpectralField(grid, rng.standard_normal(grid.N))
back = SpectralField.from_values(grid, f.values())
print("round-trip error on a random field:", np.max(np.abs(back.coeffs - f.coeffs)))
