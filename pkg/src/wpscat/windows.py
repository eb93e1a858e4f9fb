"""Wave-packet windows: normalized Gaussians and band-limited annulus bumps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryMassError, ParameterError
from .grid import SpatialGrid, WaveFunction, fourier, inverse_fourier

GAUSSIAN_SCAT = "gaussian_scat"
BANDLIMITED_ANNULUS = "bandlimited_annulus"


@dataclass
class Window:
    wavefunction: WaveFunction
    kind: str
    params: dict

    @property
    def grid(self) -> SpatialGrid:
        return self.wavefunction.grid

    def validate(self) -> None:
        """Re-check the kind's construction invariants; raises on violation."""
        if self.kind == GAUSSIAN_SCAT:
            if abs(self.wavefunction.norm() - 1.0) > 1e-12:
                raise ParameterError("gaussian window lost unit norm")
            zero_mode = fourier(self.wavefunction).values.flat[_zero_index(self.grid)]
            if not abs(zero_mode) > 0:
                raise ParameterError("gaussian window has vanishing mean")
        elif self.kind == BANDLIMITED_ANNULUS:
            r = self.params["r"]
            spec = fourier(self.wavefunction)
            power = np.abs(spec.values) ** 2
            axi = _abs_xi(self.grid)
            outside = (axi <= r / 2) | (axi >= r)
            if power[outside].sum() > 1e-20 * power.sum():
                raise ParameterError("annulus window leaks outside its band")
        else:
            raise ParameterError(f"unknown window kind {self.kind!r}")


def _zero_index(grid: SpatialGrid):
    i = grid.n // 2
    return i if grid.dim == 1 else i * grid.n + i


def _abs_xi(grid: SpatialGrid) -> np.ndarray:
    xi = grid.xi_nodes
    if grid.dim == 1:
        return np.abs(xi)
    return np.sqrt(xi[:, None] ** 2 + xi[None, :] ** 2)


def bump_profile(u: np.ndarray) -> np.ndarray:
    """Smooth compactly supported mollifier exp(-1/(1-u^2)) on |u| < 1."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def make_scat_window(grid: SpatialGrid, width: float) -> Window:
    """Normalized Gaussian c*exp(-|x|^2/(2 width^2)); its transform is
    positive at xi = 0, so it is an admissible reference window."""
    if not width > 0:
        raise ParameterError("width must be positive")
    r2 = grid.abs_x() ** 2
    vals = np.exp(-r2 / (2.0 * width**2)).astype(np.complex128)
    f = WaveFunction(grid, vals)
    f.values /= f.norm()
    if f.boundary_mass() > 1e-12:
        raise BoundaryMassError(
            f"window width {width} leaves {f.boundary_mass():.2e} of its mass "
            f"near the edge of the [-{grid.half_length}, {grid.half_length}) box"
        )
    return Window(f, GAUSSIAN_SCAT, {"width": float(width)})


def make_annulus_window(grid: SpatialGrid, r: float) -> Window:
    """Band-limited window whose spectrum is a smooth bump on r/2 < |xi| < r.

    Real and even in position space; normalized to unit L2 norm.
    """
    if not r > 0:
        raise ParameterError("r must be positive")
    if r >= 0.8 * grid.xi_max:
        raise ParameterError(f"annulus r={r} outside the resolved band (xi_max={grid.xi_max:.3g})")
    if r / 2 <= 4 * grid.dxi:
        raise ParameterError(f"annulus r={r} too narrow for the grid (dxi={grid.dxi:.3g})")
    axi = _abs_xi(grid)
    mid = 0.75 * r
    half = 0.25 * r
    spec = bump_profile((axi - mid) / half).astype(np.complex128)
    w = inverse_fourier(WaveFunction(grid, spec, space="frequency"))
    # radially even spectrum -> real position profile up to round-off
    w.values = w.values.real.astype(np.complex128)
    w.values /= w.norm()
    return Window(w, BANDLIMITED_ANNULUS, {"r": float(r)})


def check_dispersion_decay(w: Window, t_list, k_prime_gap: float = 0.0):
    """Free-evolve an annulus window and fit the decay of its sup outside
    the propagation cone.

    The window's spectrum lives on speeds in (r/2, r), so for each t > 0
    the region |x| <= (r/2 - k_prime_gap) * t is left behind by the packet;
    the sup there is fitted against a power of t.  Returns a DecayFit.
    """
    from .fitting import fit_power_law

    if w.kind != BANDLIMITED_ANNULUS:
        raise ParameterError("dispersion decay check requires an annulus window")
    t_list = list(t_list)
    if any(t <= 0 for t in t_list) or any(b <= a for a, b in zip(t_list, t_list[1:])):
        raise ParameterError("t_list must be increasing and positive")
    from .propagators import free_evolve

    r = w.params["r"]
    v_in = r / 2 - k_prime_gap
    if v_in <= 0:
        raise ParameterError("k_prime_gap swallows the whole interior cone")
    absx = w.grid.abs_x()
    sups = []
    for t in t_list:
        evolved = free_evolve(w.wavefunction, t)
        region = absx <= v_in * t
        sups.append(float(np.max(np.abs(evolved.values[region]))))
    return fit_power_law(np.asarray(t_list, dtype=float), np.asarray(sups))


def save_window(w: Window, path) -> None:
    """Snapshot the window values plus a sidecar text record {kind, params}."""
    from .grid import save_wavefunction

    save_wavefunction(w.wavefunction, path)
    with open(str(path) + ".meta", "w") as fh:
        fh.write(f"kind = {w.kind}\n")
        for key, val in sorted(w.params.items()):
            fh.write(f"{key} = {val!r}\n")


def load_window(path) -> Window:
    from .grid import load_wavefunction

    wf = load_wavefunction(path)
    params = {}
    kind = None
    with open(str(path) + ".meta") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key == "kind":
                kind = val
            else:
                import ast

                params[key] = ast.literal_eval(val)
    if kind is None:
        raise ParameterError("window sidecar record is missing its kind")
    w = Window(wf, kind, params)
    w.validate()
    return w
