"""Discrete windowed phase-space transform, its inverse, trajectory-shifted
evaluation, and masked norms.

The forward transform of f against a window w is

    W(x, xi) = sum_y conj(w(y - x)) f(y) exp(-i y.xi) dx^dim

with the window shift taken periodically.  Each xi column is a circular
cross-correlation against the window and is evaluated for all x at once via
the FFT correlation theorem; evaluation at the free-trajectory point
x + s*xi is an exact spectral phase shift of that column, never an
interpolation.

The phase-space measure is dx^dim * dxi^dim / (2 pi)^dim, which makes the
transform an exact isometry on the grid: ||W||_ps = ||w|| * ||f||.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridMismatchError, ParameterError, UnsupportedOperationError
from .grid import SpatialGrid, WaveFunction
from .windows import Window

GAMMA_AR = "gamma_aR"
GAMMA_TILDE = "gamma_tilde_a_sigma"


@dataclass
class PhaseSpaceMask:
    """Parametric bad-set description with a lattice membership predicate.

    gamma_aR:            |xi| <= a  or  |x| >= R
    gamma_tilde_a_sigma: |xi| <= a  or  |cos angle(x, xi)| >= sigma
    """

    kind: str
    a: float
    R: Optional[float] = None
    sigma: Optional[float] = None

    def __post_init__(self):
        if self.kind == GAMMA_AR:
            if self.R is None or not self.R > 0:
                raise ParameterError("gamma_aR mask needs R > 0")
        elif self.kind == GAMMA_TILDE:
            if self.sigma is None or not (0 < self.sigma <= 1):
                raise ParameterError("conic mask needs sigma in (0, 1]")
        else:
            raise ParameterError(f"unknown mask kind {self.kind!r}")
        if self.a < 0:
            raise ParameterError("a must be >= 0")

    def label(self) -> str:
        if self.kind == GAMMA_AR:
            return f"a={self.a:g},R={self.R:g}"
        return f"a={self.a:g},sigma={self.sigma:g}"


@dataclass
class PhaseSpaceField:
    """Complex field on the (x, xi) sub-lattice with coarsening c_x, c_xi.

    values has shape (nx,)*dim + (nxi,)*dim.  ``valid`` (optional) flags xi
    columns whose trajectory shift stayed within the wrap budget; reductions
    skip invalid columns.
    """

    grid: SpatialGrid
    values: np.ndarray
    c_x: int = 1
    c_xi: int = 1
    valid: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def x_axis(self) -> np.ndarray:
        return self.grid.x_nodes[:: self.c_x]

    @property
    def xi_axis(self) -> np.ndarray:
        return self.grid.xi_nodes[:: self.c_xi]

    @property
    def cell_weight(self) -> float:
        g = self.grid
        return ((self.c_x * g.dx) ** g.dim) * ((self.c_xi * g.dxi) ** g.dim) / (
            (2 * np.pi) ** g.dim
        )

    def is_dense(self) -> bool:
        return self.c_x == 1 and self.c_xi == 1

    def _valid_broadcast(self) -> Optional[np.ndarray]:
        if self.valid is None:
            return None
        d = self.dim
        return self.valid[(None,) * d + (Ellipsis,)]

    def abs_x_lattice(self) -> np.ndarray:
        x = self.x_axis
        if self.dim == 1:
            return np.abs(x)
        return np.sqrt(x[:, None] ** 2 + x[None, :] ** 2)

    def abs_xi_lattice(self) -> np.ndarray:
        xi = self.xi_axis
        if self.dim == 1:
            return np.abs(xi)
        return np.sqrt(xi[:, None] ** 2 + xi[None, :] ** 2)


def ps_norm(F: PhaseSpaceField) -> float:
    sq = np.abs(F.values) ** 2
    v = F._valid_broadcast()
    if v is not None:
        sq = np.where(v, sq, 0.0)
    return float(np.sqrt(np.sum(sq) * F.cell_weight))


def ps_inner(F: PhaseSpaceField, G: PhaseSpaceField) -> complex:
    if F.values.shape != G.values.shape or not F.grid.same_as(G.grid):
        raise GridMismatchError("phase-space inner product needs matching lattices")
    prod = F.values * np.conj(G.values)
    for fld in (F, G):
        v = fld._valid_broadcast()
        if v is not None:
            prod = np.where(v, prod, 0.0)
    return complex(np.sum(prod) * F.cell_weight)


def _window_disp(w: Window, grid: SpatialGrid) -> np.ndarray:
    if not w.grid.same_as(grid):
        raise GridMismatchError("window and field grids differ")
    return np.fft.ifftshift(w.wavefunction.values)


def _column_kernel_1d(fvals, wdisp, grid, xi_sel, shift, x_step):
    y = grid.x_nodes
    dx = grid.dx
    H = np.fft.fft(fvals[None, :] * np.exp(-1j * np.outer(xi_sel, y)), axis=1)
    spec = H * np.conj(np.fft.fft(wdisp))[None, :]
    if shift != 0.0:
        spec = spec * np.exp(1j * shift * np.outer(xi_sel, grid.xi_fft))
    cols = np.fft.ifft(spec, axis=1) * dx
    return cols[:, ::x_step].T  # (nx, nxi)


def _column_kernel_2d(fvals, wdisp, grid, xi_sel, shift, x_step):
    # The xi columns sit on the frequency lattice, so modulating by
    # e^{-i y.xi} is a circular shift of the precomputed spectrum (with a
    # (-1)^m sign because the box starts at -L and L*dxi = pi).  Columns
    # sharing the first xi component batch through one inverse FFT call.
    k = grid.xi_fft
    dx2 = grid.dx**2
    FW = np.conj(np.fft.fft2(wdisp))
    F2 = np.fft.fft2(fvals)
    m_sel = np.rint(xi_sel / grid.dxi).astype(int)
    signs = np.where(m_sel % 2 == 0, 1.0, -1.0)
    nxi = xi_sel.size
    nx = grid.n // x_step
    out = np.empty((nx, nx, nxi, nxi), dtype=np.complex128)
    xs = slice(None, None, x_step)
    if shift != 0.0:
        ph2 = np.exp(1j * shift * np.outer(xi_sel, k))  # (nxi, n)
    for i1, (a1, m1) in enumerate(zip(xi_sel, m_sel)):
        R1 = np.roll(F2, -m1, axis=0)
        spec = np.empty((nxi, grid.n, grid.n), dtype=np.complex128)
        for i2, m2 in enumerate(m_sel):
            spec[i2] = np.roll(R1, -m2, axis=1)
        spec *= FW[None, :, :]
        spec *= (signs[i1] * signs)[:, None, None]
        if shift != 0.0:
            spec *= np.exp(1j * shift * a1 * k)[None, :, None]
            spec *= ph2[:, None, :]
        out[:, :, i1, :] = np.moveaxis(
            np.fft.ifft2(spec, axes=(1, 2))[:, xs, xs] * dx2, 0, -1
        )
    return out


def wpt_forward(f: WaveFunction, w: Window, coarsen: tuple = (1, 1)) -> PhaseSpaceField:
    """Windowed transform on the (possibly coarsened) phase-space lattice."""
    return _transform(f, w, shift=0.0, coarsen=coarsen, wrap_budget=None)


def wpt_shifted(
    f: WaveFunction,
    w: Window,
    t: float,
    tau: float,
    coarsen: tuple = (1, 1),
    wrap_budget: Optional[float] = None,
) -> PhaseSpaceField:
    """Transform evaluated along free trajectories: G(x, xi) = W(x + (t-tau)*xi, xi).

    ``w`` is the window appropriate to time t (callers free-evolve their
    reference window).  With a finite ``wrap_budget``, columns whose shift
    |(t-tau)*xi| exceeds the budget on any axis are flagged invalid rather
    than silently wrapped; reductions skip them.
    """
    return _transform(f, w, shift=t - tau, coarsen=coarsen, wrap_budget=wrap_budget)


def _transform(f, w, shift, coarsen, wrap_budget):
    if not f.grid.same_as(w.grid):
        raise GridMismatchError("field and window grids differ")
    if f.space != "position":
        raise ParameterError("transform expects a position-space field")
    g = f.grid
    c_x, c_xi = int(coarsen[0]), int(coarsen[1])
    if g.n % c_x or g.n % c_xi:
        raise ParameterError("coarsening factors must divide N")
    xi_sel = g.xi_nodes[::c_xi]
    wdisp = _window_disp(w, g)
    if g.dim == 1:
        vals = _column_kernel_1d(f.values, wdisp, g, xi_sel, shift, c_x)
    else:
        vals = _column_kernel_2d(f.values, wdisp, g, xi_sel, shift, c_x)
    valid = None
    if wrap_budget is not None and shift != 0.0:
        per_axis = np.abs(shift * xi_sel) <= wrap_budget
        valid = per_axis if g.dim == 1 else per_axis[:, None] & per_axis[None, :]
    return PhaseSpaceField(g, vals, c_x=c_x, c_xi=c_xi, valid=valid)


def wpt_inverse(F: PhaseSpaceField, w: Window) -> WaveFunction:
    """Inverse transform; requires the full dense lattice."""
    if not F.is_dense():
        raise UnsupportedOperationError("cannot invert a coarsened phase-space field")
    g = F.grid
    if not w.grid.same_as(g):
        raise GridMismatchError("window grid differs from field grid")
    wdisp = _window_disp(w, g)
    wnorm2 = float(np.sum(np.abs(w.wavefunction.values) ** 2)) * g.dx**g.dim
    y = g.x_nodes
    xi = g.xi_nodes
    scale = (g.dxi / (2 * np.pi)) ** g.dim / wnorm2
    if g.dim == 1:
        # convolve each xi column with the window, then sum with e^{i x xi}
        cols = np.fft.ifft(
            np.fft.fft(wdisp)[None, :] * np.fft.fft(F.values.T, axis=1), axis=1
        ) * g.dx  # (nxi, nx)
        phases = np.exp(1j * np.outer(y, xi))  # (nx, nxi)
        vals = scale * np.einsum("xk,kx->x", phases, cols)
        return WaveFunction(g, vals)
    SW = np.fft.fft2(wdisp)
    acc = np.zeros((g.n, g.n), dtype=np.complex128)
    ph = [np.exp(1j * np.outer(y, xi)), np.exp(1j * np.outer(y, xi))]
    for i1 in range(g.n):
        for i2 in range(g.n):
            conv = np.fft.ifft2(SW * np.fft.fft2(F.values[:, :, i1, i2])) * g.dx**2
            acc += conv * (ph[0][:, i1][:, None] * ph[1][:, i2][None, :])
    return WaveFunction(g, scale * acc)


def mask_membership(F: PhaseSpaceField, m: PhaseSpaceMask) -> np.ndarray:
    """Boolean membership over the field's lattice."""
    if m.kind == GAMMA_TILDE and F.dim < 2:
        raise UnsupportedOperationError("conic mask requires dim >= 2")
    d = F.dim
    axi = F.abs_xi_lattice()
    low_xi = axi <= m.a
    if m.kind == GAMMA_AR:
        ax = F.abs_x_lattice()
        far = ax >= m.R
        return far[(Ellipsis,) + (None,) * d] | low_xi[(None,) * d + (Ellipsis,)]
    xv = F.x_axis
    xiv = F.xi_axis
    dot = (
        xv[:, None, None, None] * xiv[None, None, :, None]
        + xv[None, :, None, None] * xiv[None, None, None, :]
    )
    ax = F.abs_x_lattice()[:, :, None, None]
    an = axi[None, None, :, :]
    denom = ax * an
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(denom > 0, dot / np.maximum(denom, 1e-300), 1.0)
    return low_xi[None, None, :, :] | (np.abs(cos) >= m.sigma)


def masked_norm(F: PhaseSpaceField, m: PhaseSpaceMask, complement: bool = False) -> float:
    """Phase-space norm restricted to mask members (or their complement).

    Columns flagged invalid by the wrap budget are always excluded.
    """
    memb = mask_membership(F, m)
    if complement:
        memb = ~memb
    v = F._valid_broadcast()
    if v is not None:
        memb = memb & v
    sq = np.where(memb, np.abs(F.values) ** 2, 0.0)
    return float(np.sqrt(np.sum(sq) * F.cell_weight))


_FIELD_MAGIC = b"WPF1"


def save_field(F: PhaseSpaceField, path) -> None:
    """Binary export: header {magic, dim, N, L, c_x, c_xi}, then the values
    row-major.  The validity flags are not persisted; exports are intended
    for fully-valid fields."""
    import struct

    with open(path, "wb") as fh:
        fh.write(_FIELD_MAGIC)
        fh.write(
            struct.pack(
                "<IIdII", F.grid.dim, F.grid.n, F.grid.half_length, F.c_x, F.c_xi
            )
        )
        fh.write(np.ascontiguousarray(F.values, dtype="<c16").tobytes())


def load_field(path) -> PhaseSpaceField:
    import struct

    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _FIELD_MAGIC:
            raise ParameterError(f"bad field magic {magic!r}")
        dim, n, L, c_x, c_xi = struct.unpack("<IIdII", fh.read(24))
        grid = SpatialGrid(dim, n, L)
        raw = np.frombuffer(fh.read(), dtype="<c16")
    shape = (n // c_x,) * dim + (n // c_xi,) * dim
    expect = int(np.prod(shape))
    if raw.size != expect:
        raise ParameterError("field payload truncated")
    return PhaseSpaceField(grid, raw.reshape(shape).copy(), c_x=c_x, c_xi=c_xi)
