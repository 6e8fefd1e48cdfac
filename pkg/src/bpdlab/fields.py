"""Seeded test functions: band-limited noise and closed-form profiles.

Every random field is a pure function of (seed, grid, band), so experiments
are reproducible bit-for-bit.
"""

from __future__ import annotations

import numpy as np

from .grid import GridSpec, SampledFunction, inverse_transform


def random_band_limited(
    grid: GridSpec,
    seed: int,
    band: tuple[float, float] | None = None,
    normalize: float | None = 2.0,
) -> SampledFunction:
    """Complex Gaussian field with spectrum restricted to band = (r0, r1).

    Coefficients are iid standard complex Gaussians on frequency lattice
    points with r0 <= |xi| <= r1; the default band keeps a one-cell guard
    below the lattice edge.  If normalize is a Lebesgue exponent the output
    is scaled to unit L^p norm.
    """
    rng = np.random.default_rng(np.uint64(seed))
    xi = grid.xi_mesh()
    r = np.sqrt(np.sum(xi * xi, axis=-1))
    if band is None:
        band = (0.0, grid.xi_max - grid.dxi)
    mask = (r >= band[0]) & (r <= band[1])
    coeff = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    spec = SampledFunction(grid, "frequency", np.where(mask, coeff, 0.0))
    out = inverse_transform(spec)
    if normalize is not None:
        from .grid import lebesgue_norm

        nrm = lebesgue_norm(out, normalize)
        if nrm > 0:
            out.values /= nrm
    return out


def gaussian(grid: GridSpec, width: float = 1.0) -> SampledFunction:
    """exp(-|x|^2 / (2 width^2)) sampled on the grid."""
    x = grid.x_mesh()
    r2 = np.sum(x * x, axis=-1)
    return SampledFunction(grid, "physical", np.exp(-r2 / (2.0 * width ** 2)))


def modulated_gaussian(grid: GridSpec, freq, width: float = 1.0) -> SampledFunction:
    """Gaussian wave packet e^{i x.freq} exp(-|x|^2/(2 width^2))."""
    x = grid.x_mesh()
    f = np.broadcast_to(np.asarray(freq, dtype=float), (grid.dim,))
    r2 = np.sum(x * x, axis=-1)
    phase = np.sum(x * f, axis=-1)
    return SampledFunction(grid, "physical", np.exp(1j * phase - r2 / (2.0 * width ** 2)))


def power_singularity(grid: GridSpec, exponent: float, floor: float = 1e-12) -> SampledFunction:
    """|x|^{-exponent} sampled away from 0 (the classical weak-L^p exemplar)."""
    x = grid.x_mesh()
    r = np.sqrt(np.sum(x * x, axis=-1))
    vals = np.where(r > floor, np.maximum(r, floor) ** (-exponent), 0.0)
    # Give the origin the value of the nearest sample so the function stays finite.
    vals = np.where(r <= floor, (grid.dx / 2.0) ** (-exponent), vals)
    return SampledFunction(grid, "physical", vals.astype(np.complex128))
