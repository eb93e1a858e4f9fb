"""Short-range time-dependent potential families and the moving cutoff.

Families:
    power_law      g(t) * (1 + |x|^2)^(-delta/2), delta > 1
    poschl_teller  -g0 * sech(|x|)^2           (time-constant)
    zero           0

With ``rho`` set, the potential is multiplied by chi0(x / (rho <t>)) where
chi0 is a smooth plateau cutoff (0 for |u| <= 1/2, 1 for |u| >= 1) and
<t> = 1 + |t|; the product then obeys the pointwise bound
|V(t,x)| <= C <t>^-delta uniformly in x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .grid import SpatialGrid, WaveFunction

POWER_LAW = "power_law"
POSCHL_TELLER = "poschl_teller"
ZERO = "zero"

CONSTANT = "constant"
SINUSOIDAL = "sinusoidal"
RAMP = "ramp"


@dataclass(frozen=True)
class PotentialSpec:
    family: str = ZERO
    delta: float = 2.0
    coupling: float = 1.0
    time_profile: str = CONSTANT
    omega: float = 1.0
    rho: Optional[float] = None

    def __post_init__(self):
        if self.family not in (POWER_LAW, POSCHL_TELLER, ZERO):
            raise ParameterError(f"unknown potential family {self.family!r}")
        if self.family == POWER_LAW and not self.delta > 1:
            raise ParameterError(
                f"power-law decay exponent must exceed 1 (short range), got {self.delta}"
            )
        if self.time_profile not in (CONSTANT, SINUSOIDAL, RAMP):
            raise ParameterError(f"unknown time profile {self.time_profile!r}")
        if self.rho is not None and not (0 < self.rho < 1):
            raise ParameterError("rho must lie in (0, 1)")

    @property
    def time_independent(self) -> bool:
        if self.family == ZERO:
            return True
        if self.rho is not None:
            return False
        if self.family == POSCHL_TELLER:
            return True
        return self.time_profile == CONSTANT

    def amplitude(self, t: float) -> float:
        if self.time_profile == CONSTANT:
            return self.coupling
        if self.time_profile == SINUSOIDAL:
            return self.coupling * np.cos(self.omega * t)
        return self.coupling * abs(t) / (1.0 + abs(t))


def smooth_plateau(u: np.ndarray) -> np.ndarray:
    """C-infinity ramp: 0 for |u| <= 1/2, 1 for |u| >= 1."""
    au = np.abs(np.asarray(u, dtype=float))
    v = np.clip(2.0 * (au - 0.5), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        b = np.where(v > 0, np.exp(-1.0 / np.maximum(v, 1e-300)), 0.0)
        b1 = np.where(v < 1, np.exp(-1.0 / np.maximum(1.0 - v, 1e-300)), 0.0)
    return b / (b + b1)


def evaluate(spec: PotentialSpec, t: float, grid: SpatialGrid) -> np.ndarray:
    """Real potential field V(t, x) on the grid."""
    if spec.family == ZERO:
        return np.zeros(grid.shape())
    absx = grid.abs_x()
    if spec.family == POSCHL_TELLER:
        v = -spec.coupling / np.cosh(absx) ** 2
    else:
        v = spec.amplitude(t) * (1.0 + absx**2) ** (-spec.delta / 2.0)
    if spec.rho is not None:
        v = v * smooth_plateau(absx / (spec.rho * (1.0 + abs(t))))
    return v


def sup_bound_check(spec: PotentialSpec, t_samples, grid: SpatialGrid) -> dict:
    """Max of |V_rho(t, x)| * <t>^delta per sample, against the analytic cap.

    The cutoff kills |x| < rho <t> / 2, so the sup is bounded by
    |g0| * (rho/2)^-delta independent of t.
    """
    if spec.rho is None:
        raise ParameterError("sup_bound_check requires the rho cutoff")
    delta = spec.delta if spec.family == POWER_LAW else 2.0
    cap = abs(spec.coupling) * (spec.rho / 2.0) ** (-delta)
    rows = []
    for t in t_samples:
        v = evaluate(spec, t, grid)
        product = float(np.max(np.abs(v)) * (1.0 + abs(t)) ** delta)
        rows.append({"t": float(t), "product": product, "bounded": product <= cap})
    return {"cap": cap, "samples": rows, "all_bounded": all(r["bounded"] for r in rows)}


def bound_state(grid: SpatialGrid) -> tuple[WaveFunction, float]:
    """Ground state of -1/2 d^2/dx^2 - sech(x)^2: psi = sech(x)/sqrt(2),
    energy -1/2.  Only defined in one dimension."""
    if grid.dim != 1:
        raise ParameterError("closed-form bound state is one-dimensional")
    x = grid.x_nodes
    psi = (1.0 / np.cosh(x)) / np.sqrt(2.0)
    return WaveFunction(grid, psi.astype(np.complex128)), -0.5


def apply_hamiltonian(spec: PotentialSpec, t: float, f: WaveFunction) -> WaveFunction:
    """(-1/2 Laplacian + V(t, .)) f with the Laplacian applied spectrally."""
    g = f.grid
    lap = np.fft.ifftn(-g.k2_fft() * np.fft.fftn(f.values))
    vals = -0.5 * lap + evaluate(spec, t, g) * f.values
    return WaveFunction(g, vals)
