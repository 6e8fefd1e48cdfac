"""Dyadic and uniform partitions of unity, index sets, and Schur sums.

The dyadic family psi_j tiles frequency space into octave annuli; the
uniform family phi tiles it into unit cubes.  Both are built from explicit
closed-form bumps so supports are exact boxes/annuli and the index-set
enumerations below can use interval arithmetic instead of sampling.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


def _exp_step(t: np.ndarray) -> np.ndarray:
    """Smoothed step: 0 for t <= 0, 1 for t >= 1, C^inf transition.

    Built from the standard exponential cutoff b(t) = e^{-1/t}.
    """
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        num = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        den = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return num / (num + den)


def step_profile(r: np.ndarray) -> np.ndarray:
    """Radial profile theta: 1 on [0, 1], 0 on [2, inf), smooth on [1, 2]."""
    return 1.0 - _exp_step(np.asarray(r, dtype=float) - 1.0)


def bump_1d(t: np.ndarray) -> np.ndarray:
    """exp(-1/(1-t^2)) on (-1, 1), zero outside; positive on [-3/4, 3/4]."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        u = 1.0 - t * t
        vals = np.where(inside, np.exp(-1.0 / np.where(inside, u, 1.0)), 0.0)
    return vals


@dataclass(frozen=True)
class DyadicFamily:
    """Members psi_0 = theta, psi_j = theta(2^{-j} .) - theta(2^{-j+1} .).

    supp psi_0 c {|z| <= 2}, supp psi_j c {2^{j-1} <= |z| <= 2^{j+1}}, and
    sum_{j<=J} psi_j = 1 on {|z| <= 2^J} by telescoping.
    """

    dim: int
    j_max: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.j_max < 1:
            raise ValueError(f"j_max must be >= 1, got {self.j_max}")

    def member_radial(self, j: int, r) -> np.ndarray:
        if not 0 <= j <= self.j_max:
            raise ValueError(f"member index {j} outside [0, {self.j_max}]")
        r = np.asarray(r, dtype=float)
        if j == 0:
            return step_profile(r)
        return step_profile(r / 2.0 ** j) - step_profile(r / 2.0 ** (j - 1))

    def member(self, j: int, points: np.ndarray) -> np.ndarray:
        """Evaluate psi_j at points of shape (..., dim)."""
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"points last axis {pts.shape[-1]} != dim {self.dim}")
        return self.member_radial(j, np.sqrt(np.sum(pts * pts, axis=-1)))

    def partial_sum_radial(self, J: int, r) -> np.ndarray:
        """sum_{j=0}^{J} psi_j; telescopes to theta(2^{-J} .) exactly."""
        total = self.member_radial(0, r)
        for j in range(1, J + 1):
            total = total + self.member_radial(j, r)
        return total

    def support(self, j: int) -> tuple[float, float]:
        """Exact radial support (r_in, r_out) of psi_j."""
        if j == 0:
            return (0.0, 2.0)
        return (2.0 ** (j - 1), 2.0 ** (j + 1))


@dataclass(frozen=True)
class UniformFamily:
    """phi(xi) = chi(xi) / sum_nu chi(xi - nu), supp phi = Q = [-1,1]^n."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    @staticmethod
    def _phi_1d(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        num = bump_1d(t)
        base = np.floor(t)
        den = np.zeros_like(num)
        for off in (-1.0, 0.0, 1.0):  # only translates within distance 1 contribute
            den += bump_1d(t - (base + off))
        return num / den

    def phi(self, xi: np.ndarray, nu=None) -> np.ndarray:
        """Evaluate phi(xi - nu) at points xi of shape (..., dim)."""
        pts = np.asarray(xi, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"points last axis {pts.shape[-1]} != dim {self.dim}")
        if nu is not None:
            pts = pts - np.asarray(nu, dtype=float)
        out = np.ones(pts.shape[:-1])
        for axis in range(self.dim):
            out = out * self._phi_1d(pts[..., axis])
        return out

    def widened(self, xi: np.ndarray, nu=None) -> np.ndarray:
        """Bump phitilde with phitilde = 1 on supp phi and supp c 2Q."""
        pts = np.asarray(xi, dtype=float)
        if nu is not None:
            pts = pts - np.asarray(nu, dtype=float)
        out = np.ones(pts.shape[:-1])
        for axis in range(self.dim):
            out = out * step_profile(np.abs(pts[..., axis]))
        return out


def build_dyadic(d: int, j_max: int) -> DyadicFamily:
    return DyadicFamily(dim=d, j_max=j_max)


def build_uniform(n: int) -> UniformFamily:
    if n not in (1, 2):
        raise ValueError(f"uniform family implemented for n in {{1, 2}}, got {n}")
    return UniformFamily(dim=n)


# ---------------------------------------------------------------------------
# Index sets of the cone-case bookkeeping.


def _box_meets_annulus(center: np.ndarray, half_width: float,
                       r_in: float, r_out: float) -> bool:
    """Exact intersection test between the box center + [-h, h]^n and the
    (closed) annulus r_in <= |z| <= r_out."""
    c = np.abs(np.asarray(center, dtype=float))
    nearest = np.maximum(c - half_width, 0.0)
    farthest = c + half_width
    dmin = float(np.sqrt(np.sum(nearest ** 2)))
    dmax = float(np.sqrt(np.sum(farthest ** 2)))
    return dmin <= r_out and dmax >= r_in


def _integer_box(limit_per_axis: float, n: int):
    m = int(np.floor(limit_per_axis))
    rng = range(-m, m + 1)
    return itertools.product(*([rng] * n))


def lambda_line(j: int, ell: int, rho: float, dyadic: DyadicFamily,
                uniform: UniformFamily) -> set:
    """{nu1 : supp phi(2^{-j rho} . - nu1) meets supp psi_ell}.

    supp phi(2^{-j rho} . - nu1) is the box 2^{j rho}(nu1 + Q); membership is
    decided by box/annulus interval arithmetic, not sampling.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    if j < 1 or ell < 0:
        raise ValueError(f"need j >= 1 and ell >= 0, got j={j}, ell={ell}")
    n = uniform.dim
    scale = 2.0 ** (j * rho)
    r_in, r_out = dyadic.support(ell)
    limit = r_out / scale + 1.0
    out = set()
    for nu in _integer_box(limit, n):
        center = scale * np.asarray(nu, dtype=float)
        if _box_meets_annulus(center, scale, r_in, r_out):
            out.add(nu)
    return out


def lambda_diag(j: int, k: int, ell: int, rho: float, n: int = 1,
                dyadic: DyadicFamily | None = None) -> set:
    """{mu : (2^{j rho} mu + 2^{j rho + k + 2} Q) meets supp psi_ell}."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    if j < 1 or k < 0 or ell < 0:
        raise ValueError(f"need j >= 1, k >= 0, ell >= 0, got {(j, k, ell)}")
    fam = dyadic if dyadic is not None else DyadicFamily(dim=n, j_max=max(ell, 1))
    scale = 2.0 ** (j * rho)
    half = 2.0 ** (j * rho + k + 2)
    r_in, r_out = fam.support(ell)
    limit = (r_out + half) / scale + 1.0
    out = set()
    for mu in _integer_box(limit, n):
        center = scale * np.asarray(mu, dtype=float)
        if _box_meets_annulus(center, half, r_in, r_out):
            out.add(mu)
    return out


def lambda_line_bound(j: int, ell: int, rho: float, n: int) -> float:
    """Comparison quantity max{1, 2^{ell - j rho}}^n for the line count."""
    return max(1.0, 2.0 ** (ell - j * rho)) ** n


def lambda_diag_bound(j: int, k: int, ell: int, rho: float, n: int) -> float:
    """Comparison quantity (2^k max{1, 2^{ell - j rho}})^n for the diag count."""
    return (2.0 ** k * max(1.0, 2.0 ** (ell - j * rho))) ** n


# ---------------------------------------------------------------------------
# Truncated Schur sums.


def schur_sum_constants(m: float, rho: float, n: int, j_max: int) -> tuple[float, float]:
    """Suprema of the two truncated sums of max{1, 2^{(ell-j rho)n/2}} 2^{jm}.

    First entry: sup over ell >= 0 of the sum over 1 <= j <= j_max with the
    constraint ell <= j + 1.  Second: sup over 1 <= j <= j_max of the sum
    over 0 <= ell <= j + 1.  Both are ~ 1 at the critical order
    m = -(1 - rho) n / 2.
    """
    if j_max < 4:
        raise ValueError(f"j_max must be >= 4, got {j_max}")
    js = np.arange(1, j_max + 1)
    ells = np.arange(0, j_max + 2)
    term = (
        np.maximum(1.0, 2.0 ** ((ells[:, None] - js[None, :] * rho) * n / 2.0))
        * 2.0 ** (js[None, :] * float(m))
    )
    allowed = ells[:, None] <= js[None, :] + 1
    term = np.where(allowed, term, 0.0)
    sup_ell_sum_j = float(np.max(np.sum(term, axis=1)))
    sup_j_sum_ell = float(np.max(np.sum(term, axis=0)))
    return sup_ell_sum_j, sup_j_sum_ell
