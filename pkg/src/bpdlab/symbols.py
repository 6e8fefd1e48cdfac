"""Symbols sigma(x, xi, eta), their localized pieces, and kernels.

A Symbol wraps a pointwise evaluator plus its declared order m and exponents
(rho, delta).  Pieces are tabulations of

    sigma_j     = sigma * Psi_j(xi, eta)                       (dyadic)
    sigma_{j,nu} = sigma_j * phi(2^{-j rho} xi - nu1)
                           * phi(2^{-j rho} eta - nu2)          (uniform)
    sigma_{j,k,nu} = psi_k(2^{-j rho} D_x) sigma_{j,nu}         (banded)

restricted to their support windows.  Evaluators take point arrays with a
trailing component axis of length n and broadcast over leading axes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, GridError
from .partitions import DyadicFamily, UniformFamily, step_profile, _exp_step


@dataclass
class Symbol:
    """Bilinear symbol with declared class parameters.

    evaluator(x, xi, eta) -> complex values; x, xi, eta have shape (..., n).
    """

    evaluator: object
    order: float
    rho: float
    delta: float
    dim: int
    x_independent: bool = False
    label: str = "symbol"

    def __call__(self, x, xi, eta):
        return np.asarray(self.evaluator(x, xi, eta), dtype=np.complex128)


def _freq_radius2(xi, eta):
    return np.sum(xi * xi, axis=-1) + np.sum(eta * eta, axis=-1)


def constant_symbol(n: int = 1, value: complex = 1.0) -> Symbol:
    def ev(x, xi, eta):
        shape = np.broadcast_shapes(x.shape[:-1], xi.shape[:-1], eta.shape[:-1])
        return np.full(shape, value, dtype=np.complex128)

    return Symbol(ev, order=0.0, rho=1.0, delta=0.0, dim=n,
                  x_independent=True, label="constant")


def sobolev_symbol(m: float, n: int = 1) -> Symbol:
    """(1 + |xi|^2 + |eta|^2)^{m/2}; smooth, class exponent pair (1, 0)."""

    def ev(x, xi, eta):
        return (1.0 + _freq_radius2(xi, eta)) ** (m / 2.0) + 0.0j

    return Symbol(ev, order=m, rho=1.0, delta=0.0, dim=n,
                  x_independent=True, label=f"sobolev(m={m})")


def chirp_symbol(m: float, rho: float, n: int = 1, c: float = 2.0) -> Symbol:
    """Oscillating symbol (1+R^2)^{m/2} e^{i c (1+R^2)^{(1-rho)/2}}.

    Each xi or eta derivative of the phase gains (1+R)^{-rho}, so the symbol
    saturates the declared exponent rho while staying x-independent.
    """

    def ev(x, xi, eta):
        r2 = 1.0 + _freq_radius2(xi, eta)
        return r2 ** (m / 2.0) * np.exp(1j * c * r2 ** ((1.0 - rho) / 2.0))

    return Symbol(ev, order=m, rho=rho, delta=rho, dim=n,
                  x_independent=True, label=f"chirp(m={m},rho={rho})")


def shell_modulated_symbol(m: float, rho: float, n: int = 1,
                           dxi: float = 1.0, c: float = 2.0,
                           j_cap: int = 12) -> Symbol:
    """Shell sum sigma = e^{i c (1+R^2)^{(1-rho)/2}} sum_j 2^{jm} u_j(x) P_j(R).

    P_j are the radial dyadic windows and u_j(x) = prod_i exp(cos(w_j x_i)-1)
    with w_j the grid frequency nearest 2^{j rho}.  The x-oscillation scale on
    shell j is ~ 2^{j rho}, so x-derivatives grow like the full delta = rho
    exponent and every x-frequency band k carries (rapidly decaying) content.
    Snapping w_j to multiples of dxi keeps the modulation exactly periodic on
    a period-2pi/dxi torus.
    """
    omegas = [dxi * max(1.0, np.round(2.0 ** (j * rho) / dxi)) for j in range(j_cap + 1)]

    def ev(x, xi, eta):
        r2 = 1.0 + _freq_radius2(xi, eta)
        r = np.sqrt(r2 - 1.0)
        phase = np.exp(1j * c * r2 ** ((1.0 - rho) / 2.0))
        total = np.zeros(np.broadcast_shapes(x.shape[:-1], r.shape), dtype=np.complex128)
        prof_prev = step_profile(r)  # theta(2^0 .)
        shell = prof_prev  # P_0
        for j in range(0, j_cap + 1):
            if j > 0:
                prof_cur = step_profile(r / 2.0 ** j)
                shell = prof_cur - prof_prev
                prof_prev = prof_cur
            if np.any(shell != 0.0):
                mod = np.ones(x.shape[:-1])
                for axis in range(n):
                    mod = mod * np.exp(np.cos(omegas[j] * x[..., axis]) - 1.0)
                total = total + 2.0 ** (j * m) * mod * shell
        return total * phase

    return Symbol(ev, order=m, rho=rho, delta=rho, dim=n,
                  x_independent=False, label=f"shell(m={m},rho={rho})")


def random_tabulated_symbol(m: float, rho: float, grid: GridSpec, seed: int,
                            n_modes: int = 4, x_dependent: bool = True) -> Symbol:
    """Random smooth symbol with a prescribed (1+R^2)^{m/2} envelope.

    A short sum of x-modes e^{i q dxi x} times random trigonometric
    polynomials in (xi, eta) whose variation scale is a fixed fraction of the
    lattice range.  Used for operator identity and oracle tests, where class
    sharpness is irrelevant.
    """
    rng = np.random.default_rng(np.uint64(seed))
    n = grid.dim
    qs = rng.integers(-3, 4, size=(n_modes, n)) if x_dependent else np.zeros((n_modes, n), int)
    amps = (rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)) / np.sqrt(n_modes)
    # frequency-side wavenumbers, slow scale: period equals the lattice span
    span = 2.0 * grid.xi_max
    ps = rng.integers(-2, 3, size=(n_modes, 2 * n))
    phases = rng.uniform(0, 2 * np.pi, size=n_modes)

    def ev(x, xi, eta):
        r2 = 1.0 + _freq_radius2(xi, eta)
        env = r2 ** (m / 2.0)
        out = np.zeros(np.broadcast_shapes(x.shape[:-1], xi.shape[:-1]), dtype=np.complex128)
        for s in range(n_modes):
            xphase = np.zeros(x.shape[:-1])
            for axis in range(n):
                xphase = xphase + qs[s, axis] * grid.dxi * x[..., axis]
            fphase = phases[s]
            for axis in range(n):
                fphase = fphase + 2 * np.pi * ps[s, axis] * xi[..., axis] / span
                fphase = fphase + 2 * np.pi * ps[s, n + axis] * eta[..., axis] / span
            out = out + amps[s] * np.exp(1j * (xphase + fphase))
        return out * env

    return Symbol(ev, order=m, rho=rho, delta=rho, dim=n,
                  x_independent=not x_dependent, label=f"random(seed={seed})")


# ---------------------------------------------------------------------------
# Windows and pieces.


def window_indices(grid: GridSpec, lo: float, hi: float, margin: int = 2) -> slice:
    """Index slice of the centered frequency axis covering [lo, hi] plus margin."""
    axis = grid.xi_axis()
    if hi < axis[0] or lo > axis[-1]:
        return slice(0, 0)
    i0 = int(np.searchsorted(axis, lo, side="left"))
    i1 = int(np.searchsorted(axis, hi, side="right"))
    return slice(max(0, i0 - margin), min(grid.n_points, i1 + margin))


def freq_window_meshes(grid: GridSpec, xi_slices, eta_slices):
    """Point meshes (xi_pts, eta_pts) over the window, each win_shape + (n,)."""
    axis = grid.xi_axis()
    n = grid.dim
    axes = [axis[s] for s in xi_slices] + [axis[s] for s in eta_slices]
    if any(a.size == 0 for a in axes):
        shape = tuple(a.size for a in axes)
        return (np.zeros(shape + (n,)), np.zeros(shape + (n,)))
    mesh = np.meshgrid(*axes, indexing="ij")
    xi_pts = np.stack(mesh[:n], axis=-1)
    eta_pts = np.stack(mesh[n:], axis=-1)
    return xi_pts, eta_pts


@dataclass
class SymbolPiece:
    """Tabulated localization of a symbol with explicit support metadata.

    values has the piece's x axes first (full grid axes, or one entry per row
    of x_points), then the xi window axes, then the eta window axes.
    """

    grid: GridSpec
    parent: Symbol
    kind: str                 # "dyadic" | "uniform" | "banded"
    j: int
    rho: float
    values: np.ndarray = field(repr=False)
    xi_slices: tuple
    eta_slices: tuple
    annulus: tuple            # radial support of Psi_j in R^{2n}
    nu: tuple | None = None   # (nu1, nu2), tuples of n ints each
    k: int | None = None
    xi_box: np.ndarray | None = None   # shape (n, 2)
    eta_box: np.ndarray | None = None
    x_band: tuple | None = None        # radial x-spectrum support (banded)
    x_points: np.ndarray | None = None  # (nx, n) physical points, None = full grid
    x_collapsed: bool = False          # x-independent parent, single x row
    psi_family: DyadicFamily | None = None

    @property
    def is_zero(self) -> bool:
        return self.values.size == 0 or not np.any(self.values)

    @property
    def window_shape(self) -> tuple:
        n = self.grid.dim
        axis_len = lambda s: len(range(*s.indices(self.grid.n_points)))
        return tuple(axis_len(s) for s in self.xi_slices) + tuple(
            axis_len(s) for s in self.eta_slices
        )

    def window_meshes(self):
        return freq_window_meshes(self.grid, self.xi_slices, self.eta_slices)

    def values_at_x(self, row: int) -> np.ndarray:
        """Window values for one tabulated x row (row ignored if collapsed)."""
        if self.values.size == 0:
            return self.values.reshape(self.window_shape)
        if self.x_collapsed:
            return self.values[(0,) * self.grid.dim]
        if self.x_points is not None:
            return self.values[row]
        # full x axes: row is a flat index over grid.shape
        idx = np.unravel_index(row, self.grid.shape)
        return self.values[idx]

    def n_x_rows(self) -> int:
        if self.x_collapsed:
            return 1
        if self.x_points is not None:
            return self.x_points.shape[0]
        return int(np.prod(self.grid.shape))

    def padded_at_x(self, row: int) -> np.ndarray:
        """Window values zero-padded to the full (xi, eta) lattice."""
        n = self.grid.dim
        full = np.zeros(self.grid.shape * 2, dtype=np.complex128)
        if self.values.size:
            full[tuple(self.xi_slices) + tuple(self.eta_slices)] = self.values_at_x(row)
        return full


def _x_rows(grid: GridSpec, symbol: Symbol, x_points):
    """Resolve the x tabulation: (points array (nx, n), collapsed flag)."""
    if symbol.x_independent:
        return np.zeros((1, grid.dim)), True
    if x_points is not None:
        pts = np.atleast_2d(np.asarray(x_points, dtype=float))
        if pts.shape[1] != grid.dim:
            raise GridError(f"x_points must have {grid.dim} columns")
        return pts, False
    return grid.x_mesh().reshape(-1, grid.dim), False


def _tabulate(grid, symbol, cutoff, xi_slices, eta_slices, x_points):
    """Evaluate symbol * cutoff over x rows and the frequency window."""
    xi_pts, eta_pts = freq_window_meshes(grid, xi_slices, eta_slices)
    win_shape = xi_pts.shape[:-1]
    pts, collapsed = _x_rows(grid, symbol, x_points)
    cut = cutoff(xi_pts, eta_pts) if win_shape and min(win_shape) else np.zeros(win_shape)
    if collapsed:
        vals = symbol(pts[0].reshape((1,) * len(win_shape) + (grid.dim,)), xi_pts, eta_pts)
        vals = (vals * cut).reshape((1,) * grid.dim + win_shape)
        return vals, None, True
    out = np.empty((pts.shape[0],) + win_shape, dtype=np.complex128)
    for i in range(pts.shape[0]):
        xb = pts[i].reshape((1,) * len(win_shape) + (grid.dim,))
        out[i] = symbol(xb, xi_pts, eta_pts) * cut
    if x_points is None:
        out = out.reshape(grid.shape + win_shape)
        return out, None, False
    return out, pts, False


def slice_dyadic(symbol: Symbol, j: int, psi2n: DyadicFamily, grid: GridSpec,
                 window=None, x_points=None) -> SymbolPiece:
    """sigma_j = sigma * Psi_j(xi, eta), tabulated on a frequency window.

    The default window is the bounding box of the Psi_j annulus; it must fit
    on the lattice (2^{j+1} <= xi_max per axis).
    """
    if psi2n.dim != 2 * grid.dim:
        raise GridError(f"Psi family dim {psi2n.dim} != 2n = {2 * grid.dim}")
    if j > psi2n.j_max:
        raise GridError(f"j={j} exceeds family j_max={psi2n.j_max}")
    r_in, r_out = psi2n.support(j)
    if r_out > grid.xi_max * np.sqrt(2 * grid.dim) + 1e-9 and window is None:
        raise GridError(f"annulus radius {r_out} exceeds lattice range")
    if window is None:
        per_axis = window_indices(grid, -min(r_out, grid.xi_max), min(r_out, grid.xi_max))
        window = ((per_axis,) * grid.dim, (per_axis,) * grid.dim)
    xi_slices, eta_slices = window

    def cutoff(xi_pts, eta_pts):
        z = np.concatenate([xi_pts, eta_pts], axis=-1)
        return psi2n.member(j, z)

    vals, pts, collapsed = _tabulate(grid, symbol, cutoff, xi_slices, eta_slices, x_points)
    return SymbolPiece(
        grid=grid, parent=symbol, kind="dyadic", j=j, rho=symbol.rho, values=vals,
        xi_slices=tuple(xi_slices), eta_slices=tuple(eta_slices),
        annulus=(r_in, r_out), x_points=pts, x_collapsed=collapsed,
        psi_family=psi2n,
    )


def slice_uniform(symbol: Symbol, j: int, nu, rho: float, phi: UniformFamily,
                  psi2n: DyadicFamily, grid: GridSpec, x_points=None) -> SymbolPiece:
    """sigma_{j,nu} = sigma_j * phi(2^{-j rho} xi - nu1) phi(2^{-j rho} eta - nu2)."""
    n = grid.dim
    nu1 = tuple(int(v) for v in np.atleast_1d(nu[0]))
    nu2 = tuple(int(v) for v in np.atleast_1d(nu[1]))
    if len(nu1) != n or len(nu2) != n:
        raise GridError(f"nu components must have length n={n}")
    scale = 2.0 ** (j * rho)
    xi_box = np.array([[scale * (v - 1), scale * (v + 1)] for v in nu1])
    eta_box = np.array([[scale * (v - 1), scale * (v + 1)] for v in nu2])
    xi_slices = tuple(window_indices(grid, lo, hi) for lo, hi in xi_box)
    eta_slices = tuple(window_indices(grid, lo, hi) for lo, hi in eta_box)
    r_in, r_out = psi2n.support(j)

    def cutoff(xi_pts, eta_pts):
        z = np.concatenate([xi_pts, eta_pts], axis=-1)
        out = psi2n.member(j, z)
        out = out * phi.phi(xi_pts / scale, nu=np.asarray(nu1, dtype=float))
        out = out * phi.phi(eta_pts / scale, nu=np.asarray(nu2, dtype=float))
        return out

    vals, pts, collapsed = _tabulate(grid, symbol, cutoff, xi_slices, eta_slices, x_points)
    return SymbolPiece(
        grid=grid, parent=symbol, kind="uniform", j=j, rho=rho, values=vals,
        xi_slices=xi_slices, eta_slices=eta_slices, annulus=(r_in, r_out),
        nu=(nu1, nu2), xi_box=xi_box, eta_box=eta_box,
        x_points=pts, x_collapsed=collapsed, psi_family=psi2n,
    )


def active_nu_pairs(grid: GridSpec, j: int, rho: float, psi2n: DyadicFamily):
    """(nu1, nu2) pairs whose product box meets the Psi_j annulus in R^{2n}."""
    from .partitions import _box_meets_annulus

    n = grid.dim
    scale = 2.0 ** (j * rho)
    r_in, r_out = psi2n.support(j)
    reach = int(np.floor(min(r_out, np.sqrt(2 * n) * grid.xi_max) / scale)) + 1
    rng = range(-reach, reach + 1)
    out = []
    for combo in itertools.product(*([rng] * (2 * n))):
        center = scale * np.asarray(combo, dtype=float)
        if _box_meets_annulus(center, scale, r_in, r_out):
            out.append((combo[:n], combo[n:]))
    return out


def band_count(grid: GridSpec, j: int, rho: float) -> int:
    """Number of x-spectrum bands needed to reconstruct a piece exactly:
    smallest K with 2^{j rho + K} >= lattice diagonal, plus one."""
    diag = grid.xi_max * np.sqrt(grid.dim)
    K = max(0, int(np.ceil(np.log2(diag) - j * rho)))
    return K + 1


def band_x(piece: SymbolPiece, k: int, psi_n: DyadicFamily) -> SymbolPiece:
    """sigma_{j,k,nu} = psi_k(2^{-j rho} D_x) sigma_{j,nu}.

    Realized as a multiplier on the discrete x-spectrum; requires the piece
    tabulated on the full x lattice (unless the parent is x-independent, in
    which case band 0 is the piece itself and higher bands vanish).
    """
    grid = piece.grid
    n = grid.dim
    if psi_n.dim != n:
        raise GridError(f"psi family dim {psi_n.dim} != n = {n}")
    scale = 2.0 ** (piece.j * piece.rho)
    lo = 0.0 if k == 0 else scale * 2.0 ** (k - 1)
    hi = scale * 2.0 ** (k + 1)
    diag = grid.xi_max * np.sqrt(n)
    if lo > diag:
        raise GridError(f"band k={k} lies entirely above the lattice range")
    if piece.x_collapsed:
        vals = piece.values if k == 0 else np.zeros_like(piece.values)
        banded = vals
    else:
        if piece.x_points is not None:
            raise GridError("band_x needs a piece tabulated on the full x lattice")
        x_axes = tuple(range(n))
        spec = np.fft.fftshift(
            np.fft.fftn(np.fft.ifftshift(piece.values, axes=x_axes), axes=x_axes),
            axes=x_axes,
        )
        zeta = grid.xi_mesh()
        r = np.sqrt(np.sum(zeta * zeta, axis=-1))
        mult = psi_n.member_radial(k, r / scale)
        mult = mult.reshape(grid.shape + (1,) * len(piece.window_shape))
        spec = spec * mult
        banded = np.fft.fftshift(
            np.fft.ifftn(np.fft.ifftshift(spec, axes=x_axes), axes=x_axes),
            axes=x_axes,
        )
    return SymbolPiece(
        grid=grid, parent=piece.parent, kind="banded", j=piece.j, rho=piece.rho,
        values=banded, xi_slices=piece.xi_slices, eta_slices=piece.eta_slices,
        annulus=piece.annulus, nu=piece.nu, k=k, xi_box=piece.xi_box,
        eta_box=piece.eta_box, x_band=(lo, hi), x_points=piece.x_points,
        x_collapsed=piece.x_collapsed, psi_family=piece.psi_family,
    )


# ---------------------------------------------------------------------------
# Seminorms.


def _fd_eval(symbol: Symbol, x, xi, eta, var: str, component: int, order: int, h: float):
    """Central finite differences of the evaluator in one variable component."""
    def shift(points, s):
        out = points.copy()
        out[..., component] = out[..., component] + s
        return out

    args = {"x": x, "xi": xi, "eta": eta}

    def at(s):
        moved = dict(args)
        moved[var] = shift(args[var], s)
        return symbol(moved["x"], moved["xi"], moved["eta"])

    if order == 1:
        return (at(h) - at(-h)) / (2.0 * h)
    if order == 2:
        return (at(h) - 2.0 * at(0.0) + at(-h)) / h ** 2
    raise ValueError(f"finite differences support order <= 2 per component, got {order}")


def _apply_multi_fd(symbol: Symbol, x, xi, eta, var: str, multi, h: float):
    """Iterate component derivatives given a multi-index (len n, entries <= 2)."""
    sym = symbol
    for component, order in enumerate(multi):
        if order == 0:
            continue
        inner = sym

        def ev(xp, xip, etap, _inner=inner, _c=component, _o=order):
            return _fd_eval(_inner, xp, xip, etap, var, _c, _o, h)

        sym = Symbol(ev, sym.order, sym.rho, sym.delta, sym.dim,
                     sym.x_independent and var != "x", label=sym.label)
    return sym(x, xi, eta)


def seminorm(symbol: Symbol, alpha, beta, gamma, x_max: float, xi_max: float,
             num: int = 9, h_x: float = 0.05, h_xi: float = 0.1,
             grid: GridSpec | None = None) -> float:
    """Measured Hormander seminorm: sup over a sample box of

        (1+|xi|+|eta|)^{-(m + delta|alpha| - rho(|beta|+|gamma|))}
        |d_x^alpha d_xi^beta d_eta^gamma sigma|.

    Derivatives are second-order central differences with one step per
    component; total derivative order is limited to 4.
    """
    n = symbol.dim
    alpha, beta, gamma = (tuple(np.atleast_1d(m).astype(int)) for m in (alpha, beta, gamma))
    for multi in (alpha, beta, gamma):
        if len(multi) != n:
            raise ValueError(f"multi-index length must equal n={n}")
        if any(o < 0 or o > 2 for o in multi):
            raise ValueError("component derivative orders must lie in [0, 2]")
    if sum(alpha) + sum(beta) + sum(gamma) > 4:
        raise ValueError("total derivative order limited to 4")
    if grid is not None:
        h_x, h_xi = grid.dx, grid.dxi
        if xi_max + 2 * h_xi > grid.xi_max:
            raise GridError("sample box exceeds grid frequency range")
    axes = np.linspace(-x_max, x_max, num), np.linspace(-xi_max, xi_max, num)
    per_var = num ** n
    x_pts = np.stack(np.meshgrid(*([axes[0]] * n), indexing="ij"), -1).reshape(per_var, n)
    f_pts = np.stack(np.meshgrid(*([axes[1]] * n), indexing="ij"), -1).reshape(per_var, n)
    x = x_pts[:, None, None, :]
    xi = f_pts[None, :, None, :]
    eta = f_pts[None, None, :, :]

    work = symbol
    if sum(alpha):
        base = work

        def ev_a(xp, xip, etap, _b=base):
            return _apply_multi_fd(_b, xp, xip, etap, "x", alpha, h_x)

        work = Symbol(ev_a, base.order, base.rho, base.delta, base.dim, False, base.label)
    if sum(beta):
        base = work

        def ev_b(xp, xip, etap, _b=base):
            return _apply_multi_fd(_b, xp, xip, etap, "xi", beta, h_xi)

        work = Symbol(ev_b, base.order, base.rho, base.delta, base.dim, False, base.label)
    if sum(gamma):
        base = work

        def ev_g(xp, xip, etap, _b=base):
            return _apply_multi_fd(_b, xp, xip, etap, "eta", gamma, h_xi)

        work = Symbol(ev_g, base.order, base.rho, base.delta, base.dim, False, base.label)

    deriv = np.abs(work(x, xi, eta))
    exponent = (symbol.order + symbol.delta * sum(alpha)
                - symbol.rho * (sum(beta) + sum(gamma)))
    weight = (1.0 + np.sqrt(np.sum(xi * xi, -1)) + np.sqrt(np.sum(eta * eta, -1))) ** (-exponent)
    return float(np.max(deriv * weight))


# ---------------------------------------------------------------------------
# Cone decomposition and rescaling.


def cone_split(symbol: Symbol, c: float = 0.25, cover_samples: int = 4096,
               seed: int = 0):
    """Split sigma into sigma*Theta + sigma^(1) + sigma^(2).

    Theta = 1 on {|(xi,eta)| <= 2}, supported in {<= 4}.  The remainder is
    divided by a smooth partition on the sphere subordinate to
    V1 = {|xi+eta| > c} and V2 = {|xi| > c}; the cover is verified on random
    sphere samples before building the parts.
    """
    if not 0.0 < c < 1.0:
        raise ValueError(f"c must lie in (0, 1), got {c}")
    n = symbol.dim

    def ramp(t):
        return _exp_step((t - c) / c)

    rng = np.random.default_rng(np.uint64(seed))
    pts = rng.standard_normal((cover_samples, 2 * n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    t1 = np.linalg.norm(pts[:, :n] + pts[:, n:], axis=1)
    t2 = np.linalg.norm(pts[:, :n], axis=1)
    if np.any((ramp(t1) + ramp(t2)) <= 0.0):
        raise ValueError(f"V1, V2 do not cover the sphere for c={c}")

    def parts(xi, eta):
        norm = np.sqrt(_freq_radius2(xi, eta))
        safe = np.maximum(norm, 1e-300)
        s1 = ramp(np.sqrt(np.sum((xi + eta) ** 2, -1)) / safe)
        s2 = ramp(np.sqrt(np.sum(xi * xi, -1)) / safe)
        total = s1 + s2
        good = total > 0
        p1 = np.where(good, s1 / np.where(good, total, 1.0), 0.0)
        p2 = np.where(good, s2 / np.where(good, total, 1.0), 0.0)
        theta = step_profile(norm / 2.0)
        return theta, p1, p2

    def make(which):
        def ev(x, xi, eta):
            theta, p1, p2 = parts(xi, eta)
            base = symbol(x, xi, eta)
            if which == 0:
                return base * theta
            w = p1 if which == 1 else p2
            return base * (1.0 - theta) * w

        return Symbol(ev, symbol.order, symbol.rho, symbol.delta, symbol.dim,
                      symbol.x_independent, label=f"{symbol.label}|cone{which}")

    return make(0), make(1), make(2)


def rescale_piece(piece: SymbolPiece, j: int | None = None, rho: float | None = None,
                  target_grid: GridSpec | None = None) -> Symbol:
    """sigma~_j(x, xi, eta) = sigma_j(2^{-j rho} x, 2^{j rho} xi, 2^{j rho} eta).

    Evaluates through the parent symbol times Psi_j, so the rescaled symbol
    is exact at arbitrary points.  Supported where 1 + |xi| + |eta| is
    comparable to 2^{j(1-rho)}.
    """
    if piece.kind != "dyadic":
        raise GridError("rescale_piece expects a dyadic piece")
    j = piece.j if j is None else j
    rho = piece.rho if rho is None else rho
    lam = 2.0 ** (j * rho)
    psi2n = piece.psi_family
    sup = 2.0 ** (j * (1 - rho) + 1)
    if target_grid is not None and sup > target_grid.xi_max * np.sqrt(2 * target_grid.dim):
        raise GridError("rescaled support exceeds the target lattice")
    parent = piece.parent

    def ev(x, xi, eta):
        z = np.concatenate([lam * xi, lam * eta], axis=-1)
        return parent(x / lam, lam * xi, lam * eta) * psi2n.member(j, z)

    return Symbol(ev, parent.order, rho, parent.delta, parent.dim,
                  parent.x_independent, label=f"{parent.label}|rescaled(j={j})")


# ---------------------------------------------------------------------------
# Kernels.


@dataclass
class KernelSlice:
    """Samples of K(x, y, z) = F^{-1}_{xi,eta}[piece](y, z) at chosen x rows.

    values: (components, nx) + (y, z) lattice axes; components = 1 except for
    gradient tags in dimension 2.
    """

    piece: SymbolPiece
    derivative: str
    values: np.ndarray = field(repr=False)
    x_rows: np.ndarray  # row indices into the piece tabulation

    @property
    def grid(self) -> GridSpec:
        return self.piece.grid


_DERIV_TAGS = ("none", "dx", "dy", "dz")


def kernel_of(piece: SymbolPiece, derivative: str = "none", x_rows=None) -> KernelSlice:
    """Inverse Fourier transform of a piece in (xi, eta), per tabulated x.

    dy and dz tags multiply by i xi / i eta before transforming (gradient
    components stacked); dx differentiates the x dependence spectrally and
    needs a full-x tabulation.
    """
    if derivative not in _DERIV_TAGS:
        raise ValueError(f"unknown derivative tag {derivative!r}")
    grid = piece.grid
    n = grid.dim
    if x_rows is None:
        x_rows = np.arange(piece.n_x_rows())
    x_rows = np.asarray(x_rows, dtype=int)

    source = piece
    if derivative == "dx":
        source = _x_gradient_piece(piece)

    axis = grid.xi_axis()
    win_xi = [axis[s] for s in piece.xi_slices]
    win_eta = [axis[s] for s in piece.eta_slices]

    def components_at(row):
        vals = source.values_at_x(row)
        if derivative in ("none", "dx"):
            comps = vals[None] if derivative == "none" else vals
        elif derivative == "dy":
            comps = np.stack([
                1j * win_xi[a].reshape([-1 if i == a else 1 for i in range(2 * n)]) * vals
                for a in range(n)
            ])
        else:  # dz
            comps = np.stack([
                1j * win_eta[a].reshape([-1 if i == n + a else 1 for i in range(2 * n)]) * vals
                for a in range(n)
            ])
        return comps

    ncomp = n if derivative != "none" else 1
    out = np.zeros((ncomp, len(x_rows)) + grid.shape * 2, dtype=np.complex128)
    pad = np.zeros(grid.shape * 2, dtype=np.complex128)
    sl = tuple(piece.xi_slices) + tuple(piece.eta_slices)
    for r, row in enumerate(x_rows):
        comps = components_at(row)
        for cidx in range(comps.shape[0]):
            pad[...] = 0.0
            if comps[cidx].size:
                pad[sl] = comps[cidx]
            out[cidx, r] = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(pad))) / (
                grid.dx ** (2 * n)
            )
    return KernelSlice(piece=piece, derivative=derivative, values=out, x_rows=x_rows)


class _StackedGradient:
    """Adapter exposing values_at_x for the stacked x-gradient components."""

    def __init__(self, base: SymbolPiece, comps: np.ndarray):
        self.base = base
        self.comps = comps

    def values_at_x(self, row):
        if self.base.x_collapsed:
            return self.comps[(slice(None),) + (0,) * self.base.grid.dim]
        idx = np.unravel_index(row, self.base.grid.shape)
        return self.comps[(slice(None),) + idx]


def _x_gradient_piece(piece: SymbolPiece) -> _StackedGradient:
    """Spectral x-gradient of a full-x piece; components stacked on axis 0."""
    grid = piece.grid
    n = grid.dim
    if piece.x_collapsed:
        comps = np.zeros((n,) + piece.values.shape, dtype=np.complex128)
        return _StackedGradient(piece, comps)
    if piece.x_points is not None:
        raise GridError("dx kernels need a full-x tabulation")
    x_axes = tuple(range(n))
    spec = np.fft.fftshift(
        np.fft.fftn(np.fft.ifftshift(piece.values, axes=x_axes), axes=x_axes),
        axes=x_axes,
    )
    zeta = grid.xi_mesh()
    win_pad = (1,) * len(piece.window_shape)
    comps = np.stack([
        np.fft.fftshift(
            np.fft.ifftn(
                np.fft.ifftshift(
                    spec * (1j * zeta[..., a]).reshape(grid.shape + win_pad),
                    axes=x_axes,
                ),
                axes=x_axes,
            ),
            axes=x_axes,
        )
        for a in range(n)
    ])
    return _StackedGradient(piece, comps)


def weighted_kernel_norm(K: KernelSlice, N1: float, N2: float, j: int,
                         rho: float) -> float:
    """sup over tabulated x of || (1+2^{j rho}|y|)^{N1} (1+2^{j rho}|z|)^{N2} K ||_{L2_{y,z}}."""
    grid = K.grid
    n = grid.dim
    scale = 2.0 ** (j * rho)
    dist = grid.min_image_norm(grid.x_mesh())
    wy = (1.0 + scale * dist) ** N1
    wz = (1.0 + scale * dist) ** N2
    wy = wy.reshape(grid.shape + (1,) * n)
    wz = wz.reshape((1,) * n + grid.shape)
    best = 0.0
    for r in range(K.values.shape[1]):
        dens = np.zeros(grid.shape * 2)
        for cidx in range(K.values.shape[0]):
            dens += np.abs(K.values[cidx, r]) ** 2
        val = np.sqrt(grid.dx ** (2 * n) * np.sum(wy ** 2 * wz ** 2 * dens))
        best = max(best, float(val))
    return best
