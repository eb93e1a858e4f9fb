"""Periodic box discretization, Fourier transforms, and L2 inner products.

The box is [-L, L)^dim with N points per axis (N a power of two).
Position nodes are x_j = -L + j*dx, frequency nodes xi_k = (pi/L)*k for
k = -N/2 .. N/2-1.  The forward transform uses the convention

    fhat(xi) = sum_j exp(-i x_j . xi) f(x_j) dx^dim

so that a unit L2 function has ||fhat||^2 = (2 pi)^dim under the frequency
weight dxi^dim / (2 pi)^dim (discrete Plancherel, exact).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import GridMismatchError, ParameterError

_MAGIC = b"WPS1"


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on [-L, L)^dim, dim in {1, 2}."""

    dim: int
    points_per_axis: int
    half_length: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ParameterError(f"dim must be 1 or 2, got {self.dim}")
        n = self.points_per_axis
        if n < 8 or (n & (n - 1)) != 0:
            raise ParameterError(f"points_per_axis must be a power of two >= 8, got {n}")
        if not self.half_length > 0:
            raise ParameterError("half_length must be positive")

    @property
    def n(self) -> int:
        return self.points_per_axis

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.points_per_axis

    @property
    def dxi(self) -> float:
        return np.pi / self.half_length

    @property
    def x_nodes(self) -> np.ndarray:
        """1-d position nodes x_j = -L + j*dx."""
        return -self.half_length + self.dx * np.arange(self.n)

    @property
    def xi_nodes(self) -> np.ndarray:
        """1-d frequency nodes in ascending order, k = -N/2 .. N/2-1."""
        return self.dxi * (np.arange(self.n) - self.n // 2)

    @property
    def xi_fft(self) -> np.ndarray:
        """Frequency nodes in FFT (wrap-around) order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    @property
    def xi_max(self) -> float:
        return self.dxi * (self.n // 2)

    def shape(self) -> tuple:
        return (self.n,) * self.dim

    def position_mesh(self) -> tuple:
        """Tuple of dim arrays broadcastable to shape()."""
        x = self.x_nodes
        if self.dim == 1:
            return (x,)
        return (x[:, None], x[None, :])

    def abs_x(self) -> np.ndarray:
        """|x| on the grid."""
        if self.dim == 1:
            return np.abs(self.x_nodes)
        x1, x2 = self.position_mesh()
        return np.sqrt(x1**2 + x2**2)

    def k2_fft(self) -> np.ndarray:
        """|xi|^2 in FFT order, shape()."""
        k = self.xi_fft
        if self.dim == 1:
            return k**2
        return k[:, None] ** 2 + k[None, :] ** 2

    def same_as(self, other: "SpatialGrid") -> bool:
        return (
            self.dim == other.dim
            and self.points_per_axis == other.points_per_axis
            and self.half_length == other.half_length
        )


@dataclass
class WaveFunction:
    """Complex field sampled on a SpatialGrid.

    ``space`` is "position" or "frequency"; norms and inner products carry
    the matching quadrature weight so both reproduce L2 semantics.
    """

    grid: SpatialGrid
    values: np.ndarray
    space: str = "position"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape():
            raise ParameterError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape()}"
            )
        if self.space not in ("position", "frequency"):
            raise ParameterError(f"bad space {self.space!r}")

    @property
    def weight(self) -> float:
        if self.space == "position":
            return self.grid.dx**self.grid.dim
        return (self.grid.dxi / (2 * np.pi)) ** self.grid.dim

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.weight))

    def boundary_mass(self) -> float:
        """Fraction of ||f||^2 within 4*dx of the box edge (any axis)."""
        g = self.grid
        edge = g.half_length - 4 * g.dx
        x = np.abs(g.x_nodes) >= edge
        if g.dim == 1:
            sel = x
        else:
            sel = x[:, None] | x[None, :]
        total = np.sum(np.abs(self.values) ** 2)
        if total == 0:
            return 0.0
        return float(np.sum(np.abs(self.values[sel]) ** 2) / total)

    def copy(self) -> "WaveFunction":
        return WaveFunction(self.grid, self.values.copy(), self.space)


def _axis_signs(n: int) -> np.ndarray:
    # exp(+i L xi_k) = (-1)^k for xi_k = (pi/L) k
    k = np.arange(n) - n // 2
    return np.where(k % 2 == 0, 1.0, -1.0)


def _signs(grid: SpatialGrid) -> np.ndarray:
    s = _axis_signs(grid.n)
    if grid.dim == 1:
        return s
    return s[:, None] * s[None, :]


def fourier(f: WaveFunction) -> WaveFunction:
    """Forward transform; returns the field sampled on xi_nodes (ascending)."""
    if f.space != "position":
        raise ParameterError("fourier expects a position-space field")
    g = f.grid
    fhat = g.dx**g.dim * _signs(g) * np.fft.fftshift(np.fft.fftn(f.values))
    return WaveFunction(g, fhat, space="frequency")


def inverse_fourier(fhat: WaveFunction) -> WaveFunction:
    if fhat.space != "frequency":
        raise ParameterError("inverse_fourier expects a frequency-space field")
    g = fhat.grid
    vals = np.fft.ifftn(np.fft.ifftshift(_signs(g) * fhat.values)) / g.dx**g.dim
    return WaveFunction(g, vals, space="position")


def inner(f: WaveFunction, g: WaveFunction) -> complex:
    """Discrete (f, g): left argument linear, right conjugated."""
    if not f.grid.same_as(g.grid) or f.space != g.space:
        raise GridMismatchError("inner() requires matching grid and space")
    return complex(np.sum(f.values * np.conj(g.values)) * f.weight)


def save_wavefunction(f: WaveFunction, path) -> None:
    """Binary snapshot: header {magic, dim:u32, N:u32, L:f64, LE} + complex128."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IId", f.grid.dim, f.grid.n, f.grid.half_length))
        fh.write(np.ascontiguousarray(f.values, dtype="<c16").tobytes())


def load_wavefunction(path) -> WaveFunction:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ParameterError(f"bad snapshot magic {magic!r}")
        dim, n, L = struct.unpack("<IId", fh.read(16))
        grid = SpatialGrid(dim, n, L)
        raw = np.frombuffer(fh.read(), dtype="<c16")
    if raw.size != n**dim:
        raise ParameterError("snapshot payload truncated")
    return WaveFunction(grid, raw.reshape(grid.shape()).copy())


def gaussian(grid: SpatialGrid, center=0.0, width=1.0, momentum=0.0,
             normalize=True) -> WaveFunction:
    """Gaussian packet exp(-|x-c|^2/(4 w^2)) exp(i k.x); helper for tests
    and experiment drivers."""
    c = np.broadcast_to(np.atleast_1d(center), (grid.dim,))
    k = np.broadcast_to(np.atleast_1d(momentum), (grid.dim,))
    mesh = grid.position_mesh()
    r2 = sum((m - ci) ** 2 for m, ci in zip(mesh, c))
    phase = sum(m * ki for m, ki in zip(mesh, k))
    vals = np.exp(-r2 / (4.0 * width**2) + 1j * phase)
    f = WaveFunction(grid, np.broadcast_to(vals, grid.shape()).copy())
    if normalize:
        f.values /= f.norm()
    return f
