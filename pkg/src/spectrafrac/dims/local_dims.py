"""
Local scaling exponents, alpha-continuity classification and measure dimensions for spectrafrac
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError, OutsideSupportError
from ..utils.io import PathLike, write_csv
from .kernels import DEFAULT_RATIO, gamma_functionals, geometric_grid, horizon_for, tent_table
from .measures import DiscreteMeasure, RestrictionSet, restrict

logger = logging.getLogger(__name__)

DEFAULT_QUANTILE = 0.95
DEFAULT_RTOL = 1e-3
MIN_SCALES = 4
WINDOW_STEPS = 2
DECOMPOSITION_KS = tuple(range(2, 11))


@dataclass(frozen=True)
class LocalDimEstimate:
    """Liminf/limsup-side log-log slopes of ball masses at one point"""
    x: float
    d_lower: float
    d_upper: float
    eps_min: float
    eps_max: float
    n_scales: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": self.x,
            "d_lower": self.d_lower,
            "d_upper": self.d_upper,
            "eps_min": self.eps_min,
            "eps_max": self.eps_max,
            "n_scales": self.n_scales,
        }


@dataclass(frozen=True)
class MeasureDimReport:
    """Estimated upper-Hausdorff and lower-packing dimensions of a measure"""
    dim_H_upper: float
    dim_P_lower: float
    quantile: float
    sample_points: int
    window: Tuple[float, float]
    n_scales: int
    seed: int
    points: np.ndarray = field(repr=False, compare=False, default_factory=lambda: np.zeros(0))
    point_weights: np.ndarray = field(repr=False, compare=False, default_factory=lambda: np.zeros(0))
    d_lower: np.ndarray = field(repr=False, compare=False, default_factory=lambda: np.zeros(0))
    d_upper: np.ndarray = field(repr=False, compare=False, default_factory=lambda: np.zeros(0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim_H_upper": self.dim_H_upper,
            "dim_P_lower": self.dim_P_lower,
            "quantile": self.quantile,
            "sample_points": self.sample_points,
            "eps_min": self.window[0],
            "eps_max": self.window[1],
            "n_scales": self.n_scales,
            "seed": self.seed,
        }

    def save_points_csv(self, path: PathLike) -> Path:
        table = np.column_stack([self.points, self.point_weights, self.d_lower, self.d_upper])
        return write_csv(path, ["x", "weight", "d_lower", "d_upper"], table, self.to_dict())


@dataclass(frozen=True)
class ClassificationReport:
    """Mass of the points whose finite-horizon gamma stays at or below r, and the rest"""
    alpha: float
    threshold_r: float
    s: float
    t_max: float
    kind: str
    kc_mass: float
    ks_mass: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "r": self.threshold_r,
            "s": self.s,
            "t_max": self.t_max,
            "kind": self.kind,
            "kc_mass": self.kc_mass,
            "ks_mass": self.ks_mass,
        }


@dataclass(frozen=True)
class DecompositionReport:
    """Masses of the zero-dimensional and one-dimensional parts over the countable alpha-grid"""
    kind: str
    threshold_r: float
    s: float
    t_max: float
    total_mass: float
    zero_dim_mass: float
    one_dim_mass: float
    ks: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "r": self.threshold_r,
            "s": self.s,
            "t_max": self.t_max,
            "total_mass": self.total_mass,
            "zero_dim_mass": self.zero_dim_mass,
            "one_dim_mass": self.one_dim_mass,
            "ks": list(self.ks),
        }


def scale_grid(eps_min: float, eps_max: float, n_scales: int) -> np.ndarray:
    """Geometric radii from eps_max down to eps_min."""
    if not 0 < eps_min < eps_max:
        raise DomainError(f"need 0 < eps_min < eps_max, got {eps_min!r}, {eps_max!r}")
    if n_scales < MIN_SCALES:
        raise DomainError(f"need at least {MIN_SCALES} scales, got {n_scales}")
    exponents = np.arange(n_scales, dtype=float) / (n_scales - 1)
    return eps_max * (eps_min / eps_max) ** exponents


def _window_slopes(masses: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Two-point slopes of log mass against log radius over windows of WINDOW_STEPS grid steps.

    `masses` has one row per radius; zero masses give +inf.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        log_m = np.log(masses)
        log_e = np.log(eps)[:, None]
        slopes = (log_m[:-WINDOW_STEPS] - log_m[WINDOW_STEPS:]) / (log_e[:-WINDOW_STEPS] - log_e[WINDOW_STEPS:])
    return np.where(masses[WINDOW_STEPS:] > 0, slopes, np.inf)


def local_dim_table(mu: DiscreteMeasure, xs: np.ndarray, eps: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ball masses (radius x point) and the min/max window slope per point."""
    xs = np.asarray(xs, dtype=float)
    lo, hi = mu.ball_range(xs[None, :], eps[:, None])
    masses = mu.range_mass(lo, hi)
    slopes = _window_slopes(masses, eps)
    return masses, slopes.min(axis=0), slopes.max(axis=0)


def local_dim_bounds(mu: DiscreteMeasure, x: float, eps_min: float, eps_max: float, n_scales: int = 11) -> LocalDimEstimate:
    eps = scale_grid(eps_min, eps_max, n_scales)
    masses, d_lower, d_upper = local_dim_table(mu, np.asarray([x]), eps)
    if masses[0, 0] <= 0:
        raise OutsideSupportError(x, eps_max)
    return LocalDimEstimate(
        x=float(x),
        d_lower=float(d_lower[0]),
        d_upper=float(d_upper[0]),
        eps_min=float(eps_min),
        eps_max=float(eps_max),
        n_scales=int(n_scales),
    )


def sample_atoms(mu: DiscreteMeasure, n_sample: int, seed: int) -> np.ndarray:
    """Indices of `n_sample` atoms drawn with probability proportional to weight."""
    rng = np.random.default_rng(seed)
    return rng.choice(mu.size, size=n_sample, p=mu.weights / mu.total_mass)


def measure_dims(
    mu: DiscreteMeasure,
    n_sample: int = 400,
    quantile: float = DEFAULT_QUANTILE,
    eps_min: float = 3.0 ** -12,
    eps_max: float = 3.0 ** -2,
    n_scales: int = 11,
    seed: int = 0,
    region: Optional[RestrictionSet] = None,
) -> MeasureDimReport:
    """Estimate dim_H^+(mu) and dim_P^-(mu) from mu-sampled local exponents.

    dim_H^+ is the `quantile` of the lower exponents, dim_P^- the (1 - quantile)
    quantile of the upper exponents. With `region`, points are drawn from mu
    restricted to it while balls are measured in mu.
    """
    if mu.size == 0 or mu.total_mass <= 0:
        raise DomainError("cannot estimate dimensions of an empty measure")
    if not 0.5 < quantile < 1.0:
        raise DomainError(f"quantile must lie in (0.5, 1), got {quantile!r}")
    if n_sample < 1:
        raise DomainError(f"n_sample must be positive, got {n_sample}")
    source = restrict(mu, region) if region is not None else mu
    if source.size == 0:
        raise DomainError("the sampling region carries no mass")
    eps = scale_grid(eps_min, eps_max, n_scales)
    idx = sample_atoms(source, n_sample, seed)
    xs = source.positions[idx]
    masses, d_lower, d_upper = local_dim_table(mu, xs, eps)
    supported = masses[0] > 0
    if not np.all(supported):
        logger.debug(f"Dropping {int(np.sum(~supported))} sampled points outside the support")
    xs, weights = xs[supported], source.weights[idx][supported]
    d_lower, d_upper = d_lower[supported], d_upper[supported]
    dim_h = float(np.clip(np.quantile(d_lower, quantile, method="inverted_cdf"), 0.0, 1.0))
    dim_p = float(np.clip(np.quantile(d_upper, 1.0 - quantile, method="inverted_cdf"), 0.0, 1.0))
    logger.info(f"Measure dims over {xs.size} points: dim_H+={dim_h:.4f}, dim_P-={dim_p:.4f}")
    return MeasureDimReport(
        dim_H_upper=dim_h,
        dim_P_lower=dim_p,
        quantile=float(quantile),
        sample_points=int(xs.size),
        window=(float(eps_min), float(eps_max)),
        n_scales=int(n_scales),
        seed=int(seed),
        points=xs,
        point_weights=weights,
        d_lower=d_lower,
        d_upper=d_upper,
    )


def _check_kind(kind: str) -> str:
    kind = kind.upper()
    if kind not in ("H", "P"):
        raise DomainError(f"kind must be 'H' or 'P', got {kind!r}")
    return kind


def classify_sweep(
    mu: DiscreteMeasure,
    alphas: Sequence[float],
    r: float,
    s: float,
    t_max: float,
    ratio: float = DEFAULT_RATIO,
    kind: str = "H",
    rtol: float = DEFAULT_RTOL,
    resolution: Optional[float] = None,
) -> List[ClassificationReport]:
    """`classify_mass` for several alphas sharing one table of tent integrals."""
    kind = _check_kind(kind)
    if not r > 0:
        raise DomainError(f"threshold r must be positive, got {r!r}")
    t_max = horizon_for(t_max, resolution)
    ts = geometric_grid(s, t_max, ratio)
    table = tent_table(mu, ts, mu.positions)
    total = mu.total_mass
    reports = []
    for alpha in alphas:
        gamma_h, gamma_p = gamma_functionals(ts, table, float(alpha))
        gamma = gamma_h if kind == "H" else gamma_p
        kc = float(np.sum(mu.weights[gamma <= r * (1.0 + rtol)]))
        reports.append(
            ClassificationReport(
                alpha=float(alpha),
                threshold_r=float(r),
                s=float(s),
                t_max=float(t_max),
                kind=kind,
                kc_mass=kc,
                ks_mass=max(total - kc, 0.0),
            )
        )
    return reports


def classify_mass(
    mu: DiscreteMeasure,
    alpha: float,
    r: float,
    s: float,
    t_max: float,
    ratio: float = DEFAULT_RATIO,
    kind: str = "H",
    rtol: float = DEFAULT_RTOL,
    resolution: Optional[float] = None,
) -> ClassificationReport:
    """mu(Z_mu(r, s)) at finite horizon: mass of atoms whose gamma is at most r.

    kind "H" uses the sup functional (alpha-Hausdorff continuity), kind "P" the
    inf functional (alpha-packing continuity). Comparisons with r are made at
    relative tolerance `rtol`.
    """
    return classify_sweep(mu, [alpha], r, s, t_max, ratio, kind, rtol, resolution)[0]


def decompose(
    mu: DiscreteMeasure,
    r: float,
    s: float,
    t_max: float,
    ratio: float = DEFAULT_RATIO,
    kind: str = "H",
    ks: Sequence[int] = DECOMPOSITION_KS,
    rtol: float = DEFAULT_RTOL,
) -> DecompositionReport:
    """Zero- and one-dimensional parts of mu over alpha in {1/k} and {1 - 1/k}."""
    kind = _check_kind(kind)
    if mu.size == 0:
        raise DomainError("cannot decompose an empty measure")
    ts = geometric_grid(s, t_max, ratio)
    table = tent_table(mu, ts, mu.positions)
    singular_everywhere = np.ones(mu.size, dtype=bool)
    continuous_everywhere = np.ones(mu.size, dtype=bool)
    threshold = r * (1.0 + rtol)
    pick = 0 if kind == "H" else 1
    for k in ks:
        singular_everywhere &= gamma_functionals(ts, table, 1.0 / k)[pick] > threshold
        continuous_everywhere &= gamma_functionals(ts, table, 1.0 - 1.0 / k)[pick] <= threshold
    return DecompositionReport(
        kind=kind,
        threshold_r=float(r),
        s=float(s),
        t_max=float(t_max),
        total_mass=mu.total_mass,
        zero_dim_mass=float(np.sum(mu.weights[singular_everywhere])),
        one_dim_mass=float(np.sum(mu.weights[continuous_everywhere])),
        ks=tuple(int(k) for k in ks),
    )
