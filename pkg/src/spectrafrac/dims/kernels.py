"""
Tent-kernel approximation of ball masses for spectrafrac

f_{t,x} is 1 on |x-y| <= 1/t, 2 - t|x-y| up to 2/t and 0 beyond, so its integral
V_t(mu, x) sits between mu(B(x, 1/t)) and mu(B(x, 2/t)).
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DomainError, ResourceLimitError
from ..utils.io import PathLike, write_csv
from .measures import DiscreteMeasure

logger = logging.getLogger(__name__)

DEFAULT_RATIO = 2.0 ** 0.25
MAX_GRID_POINTS = 1_000_000
RESOLUTION_FACTOR = 5.0
SANDWICH_TOLERANCE = 1e-9


def tent_eval(t: float, x: Union[float, np.ndarray], y: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    if not t > 0:
        raise DomainError(f"kernel parameter t must be positive, got {t!r}")
    value = np.clip(2.0 - t * np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)), 0.0, 1.0)
    return float(value) if np.ndim(value) == 0 else value


def tent_integrals(mu: DiscreteMeasure, t: float, xs: np.ndarray) -> np.ndarray:
    """V_t(mu, x) for every x in `xs` at a single t, in O(len(xs) log n)."""
    if not t > 0:
        raise DomainError(f"kernel parameter t must be positive, got {t!r}")
    xs = np.asarray(xs, dtype=float)
    inner = 1.0 / t
    lo1, hi1 = mu.ball_range(xs, inner)
    lo2, hi2 = mu.ball_range(xs, 2.0 * inner)
    plateau = mu.range_mass(lo1, hi1)
    outer = mu.range_mass(lo2, hi2)
    # ramps: sum of w * (2 - t|p - x|) on both sides via prefix moments
    w_right = mu.range_mass(hi1, hi2)
    w_left = mu.range_mass(lo2, lo1)
    right = 2.0 * w_right - t * (mu.range_moment(hi1, hi2) - xs * w_right)
    left = 2.0 * w_left - t * (xs * w_left - mu.range_moment(lo2, lo1))
    # rounding in the moment differences must not break the ball sandwich
    return np.clip(plateau + right + left, plateau, outer)


def v_t(mu: DiscreteMeasure, t: float, x: float) -> float:
    """V_t(mu, x) = integral of f_{t,x} against mu."""
    return float(tent_integrals(mu, t, np.asarray([x]))[0])


def geometric_grid(s: float, t_max: float, ratio: float = DEFAULT_RATIO) -> np.ndarray:
    if not (0 < s < t_max):
        raise DomainError(f"need 0 < s < t_max, got s={s!r}, t_max={t_max!r}")
    if not ratio > 1:
        raise DomainError(f"grid ratio must exceed 1, got {ratio!r}")
    steps = math.floor(math.log(t_max / s) / math.log(ratio) + 1e-9)
    if steps + 1 > MAX_GRID_POINTS:
        raise ResourceLimitError(f"grid from {s} to {t_max} at ratio {ratio} has {steps + 1} points")
    return s * ratio ** np.arange(steps + 1, dtype=float)


def max_horizon(resolution: float) -> float:
    """Largest t worth probing for a measure resolved down to `resolution`."""
    return 1.0 / (RESOLUTION_FACTOR * resolution)


def horizon_for(t_max: float, resolution: Optional[float]) -> float:
    if resolution is None or resolution <= 0:
        return t_max
    cap = max_horizon(resolution)
    if t_max > cap:
        logger.warning(f"t_max={t_max:g} is below the measure resolution, clamping to {cap:g}")
        return cap
    return t_max


def tent_table(mu: DiscreteMeasure, ts: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Matrix of V_t(mu, x), rows indexed by t and columns by x."""
    xs = np.asarray(xs, dtype=float)
    return np.vstack([tent_integrals(mu, float(t), xs) for t in ts]) if len(ts) else np.zeros((0, xs.size))


def gamma_functionals(
    ts: np.ndarray, table: np.ndarray, alpha: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Finite-horizon sup and inf over the grid of t**alpha * V_t, one value per column."""
    scaled = (np.asarray(ts, dtype=float) ** alpha)[:, None] * table
    return scaled.max(axis=0), scaled.min(axis=0)


@dataclass(frozen=True, eq=False)
class ScalingProfile:
    """Per-point table of (t, V_t, t^alpha V_t) with its sup/inf over the horizon"""
    x: float
    alpha: float
    t: np.ndarray
    v: np.ndarray
    scaled: np.ndarray
    s_min: float
    t_max: float
    gamma_H: float
    gamma_P: float
    t_at_gamma_H: float
    t_at_gamma_P: float

    @classmethod
    def from_rows(cls, x: float, alpha: float, t: np.ndarray, v: np.ndarray, s_min: float, t_max: float) -> "ScalingProfile":
        t = np.asarray(t, dtype=float)
        v = np.asarray(v, dtype=float)
        scaled = t ** alpha * v
        i_max = int(np.argmax(scaled))
        i_min = int(np.argmin(scaled))
        return cls(
            x=float(x),
            alpha=float(alpha),
            t=t,
            v=v,
            scaled=scaled,
            s_min=float(s_min),
            t_max=float(t_max),
            gamma_H=float(scaled[i_max]),
            gamma_P=float(scaled[i_min]),
            t_at_gamma_H=float(t[i_max]),
            t_at_gamma_P=float(t[i_min]),
        )

    @property
    def rows(self) -> Tuple[Tuple[float, float, float], ...]:
        return tuple(zip(self.t.tolist(), self.v.tolist(), self.scaled.tolist()))

    def tail(self, s: float) -> "ScalingProfile":
        """Sub-profile over the grid points t >= s (the nested grid at a later start)."""
        keep = self.t >= s * (1.0 - 1e-12)
        if not np.any(keep):
            raise DomainError(f"no grid point at or above s={s!r}")
        return ScalingProfile.from_rows(self.x, self.alpha, self.t[keep], self.v[keep], s, self.t_max)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": self.x,
            "alpha": self.alpha,
            "s": self.s_min,
            "t_max": self.t_max,
            "gamma_H": self.gamma_H,
            "gamma_P": self.gamma_P,
            "t_at_gamma_H": self.t_at_gamma_H,
            "t_at_gamma_P": self.t_at_gamma_P,
        }

    def save_csv(self, path: PathLike) -> Path:
        meta = {k: v for k, v in self.to_dict().items()}
        return write_csv(path, ["t", "v", "scaled"], np.column_stack([self.t, self.v, self.scaled]), meta)


def scaling_profile(
    mu: DiscreteMeasure,
    alpha: float,
    x: float,
    s: float,
    t_max: float,
    ratio: float = DEFAULT_RATIO,
    resolution: Optional[float] = None,
) -> ScalingProfile:
    """Tent-kernel scaling profile of `mu` at `x` on the grid s * ratio**j <= t_max."""
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    t_max = horizon_for(t_max, resolution)
    ts = geometric_grid(s, t_max, ratio)
    v = tent_table(mu, ts, np.asarray([x]))[:, 0]
    return ScalingProfile.from_rows(x, alpha, ts, v, s, t_max)


def sandwich_violations(
    mu: DiscreteMeasure, ts: Sequence[float], xs: Sequence[float], atol: float = SANDWICH_TOLERANCE
) -> int:
    """Count of (t, x) pairs where V_t leaves [mu(B(x,1/t)), mu(B(x,2/t))].

    The reference value is the direct sum of w * f_{t,x}(p) over the atoms. A pair
    also counts when `tent_integrals` disagrees with that sum.
    """
    count = 0
    xs = np.asarray(xs, dtype=float)
    for t in ts:
        t = float(t)
        direct = (mu.weights[None, :] * tent_eval(t, xs[:, None], mu.positions[None, :])).sum(axis=1)
        lo1, hi1 = mu.ball_range(xs, 1.0 / t)
        lo2, hi2 = mu.ball_range(xs, 2.0 / t)
        outside = (direct < mu.range_mass(lo1, hi1) - atol) | (direct > mu.range_mass(lo2, hi2) + atol)
        mismatch = np.abs(tent_integrals(mu, t, xs) - direct) > atol
        count += int(np.sum(outside | mismatch))
    return count
