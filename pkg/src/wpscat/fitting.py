"""Power-law fits on log-log axes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass
class DecayFit:
    """y ~ prefactor * t^exponent, least squares on (log t, log y)."""

    exponent: float
    prefactor: float
    r_squared: float
    window: tuple

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "r_squared": self.r_squared,
            "window": list(self.window),
        }


def fit_power_law(t: np.ndarray, y: np.ndarray) -> DecayFit:
    """Fit y = C t^p, dropping samples at or below the numeric floor."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.shape != y.shape or t.ndim != 1:
        raise ParameterError("t and y must be 1-d arrays of equal length")
    keep = (t > 0) & (y > 10 * np.finfo(float).tiny)
    t, y = t[keep], y[keep]
    if t.size < 2:
        raise ParameterError("need at least two usable samples for a fit")
    lt, ly = np.log(t), np.log(y)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = ly - (slope * lt + intercept)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return DecayFit(
        exponent=float(slope),
        prefactor=float(np.exp(intercept)),
        r_squared=r2,
        window=(float(t[0]), float(t[-1])),
    )
