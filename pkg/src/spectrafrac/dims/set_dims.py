"""
Hausdorff and packing premeasures of subsets of the real line for spectrafrac

Covers are one-sided upper bounds on the delta-covering infimum, packings are
one-sided lower bounds on the delta-packing supremum.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError, ResourceLimitError
from ..utils.io import PathLike, read_json, write_csv, write_json
from .measures import cantor_digits

logger = logging.getLogger(__name__)

GRID_SHIFTS = 8
MAX_CELLS = 10_000_000
CELL_TOLERANCE = 1e-9
PACKING_STEP = 1.0 + 1e-12
MIN_BOX_SCALES = 4

KINDS = ("points", "intervals")


@dataclass(frozen=True, eq=False)
class SetRep:
    """Finite point set or finite union of closed intervals.

    Intervals are kept sorted and disjoint (touching intervals are merged);
    points sorted and deduplicated. `resolution` is the smallest meaningful scale.
    """
    kind: str
    data: np.ndarray = field(repr=False)
    resolution: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"set kind must be one of {KINDS}, got {self.kind!r}")
        if self.resolution < 0:
            raise DomainError(f"resolution must be nonnegative, got {self.resolution!r}")

    @classmethod
    def from_points(cls, points: Sequence[float], resolution: float = 0.0) -> "SetRep":
        p = np.unique(np.asarray(points, dtype=float).ravel())
        if not np.all(np.isfinite(p)):
            raise DomainError("points must be finite")
        p.setflags(write=False)
        return cls(kind="points", data=p, resolution=float(resolution))

    @classmethod
    def from_intervals(cls, intervals: Sequence[Sequence[float]], resolution: float = 0.0) -> "SetRep":
        iv = np.asarray(intervals, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(iv)):
            raise DomainError("interval endpoints must be finite")
        if np.any(iv[:, 0] > iv[:, 1]):
            raise DomainError("every interval needs a <= b")
        iv = iv[np.argsort(iv[:, 0], kind="stable")]
        merged: List[List[float]] = []
        for a, b in iv:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        data = np.asarray(merged, dtype=float).reshape(-1, 2)
        data.setflags(write=False)
        return cls(kind="intervals", data=data, resolution=float(resolution))

    @classmethod
    def interval(cls, a: float, b: float) -> "SetRep":
        return cls.from_intervals([[a, b]])

    @classmethod
    def point(cls, x: float) -> "SetRep":
        return cls.from_points([x])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SetRep):
            return NotImplemented
        return self.kind == other.kind and self.resolution == other.resolution and np.array_equal(self.data, other.data)

    @property
    def is_empty(self) -> bool:
        return self.data.size == 0

    @property
    def bounds(self) -> np.ndarray:
        """Intervals view: points become degenerate [p, p]."""
        if self.kind == "points":
            return np.column_stack([self.data, self.data])
        return self.data

    def total_length(self) -> float:
        b = self.bounds
        return float(np.sum(b[:, 1] - b[:, 0]))

    def to_dict(self) -> Dict[str, Any]:
        key = "points" if self.kind == "points" else "intervals"
        return {"kind": self.kind, key: self.data, "resolution": self.resolution}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SetRep":
        kind = data.get("kind", "intervals" if "intervals" in data else "points")
        resolution = float(data.get("resolution", 0.0))
        if kind == "points":
            return cls.from_points(data.get("points", []), resolution)
        if kind == "intervals":
            return cls.from_intervals(data.get("intervals", []), resolution)
        raise DomainError(f"unknown set kind {kind!r}")

    def save_json(self, path: PathLike) -> Path:
        return write_json(path, self.to_dict())

    @classmethod
    def load(cls, path: PathLike) -> "SetRep":
        return cls.from_dict(read_json(path))


def cantor_set(depth: int) -> SetRep:
    """Level-`depth` middle-thirds Cantor set: 2**depth closed intervals of length 3**-depth."""
    m = cantor_digits(depth).astype(float)
    scale = float(3 ** depth)
    return SetRep.from_intervals(np.column_stack([m / scale, (m + 1.0) / scale]), resolution=1.0 / scale)


def _check_delta(S: SetRep, delta: float) -> None:
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    if delta < S.resolution * (1.0 - 1e-12):
        raise DomainError(f"delta={delta!r} is below the set resolution {S.resolution!r}")


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")


def _cell_extents(S: SetRep, delta: float, offset: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Occupied cells [offset + k delta, offset + (k+1) delta) and the tight extent of S in each.

    An interval occupies the cells its interior meets; a degenerate one the cell holding it.
    """
    b = S.bounds
    if b.size == 0:
        empty = np.zeros(0)
        return empty.astype(np.int64), empty, empty
    a, e = b[:, 0], b[:, 1]
    k_lo = np.floor((a - offset) / delta + CELL_TOLERANCE).astype(np.int64)
    k_hi = np.maximum(np.ceil((e - offset) / delta - CELL_TOLERANCE).astype(np.int64) - 1, k_lo)
    counts = k_hi - k_lo + 1
    total = int(counts.sum())
    if total > MAX_CELLS:
        raise ResourceLimitError(f"{total} grid cells at delta={delta:g} exceed the cap {MAX_CELLS}")
    owner = np.repeat(np.arange(a.size), counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    k = k_lo[owner] + (np.arange(total) - starts[owner])
    cell_lo = offset + k * delta
    piece_lo = np.maximum(a[owner], cell_lo)
    piece_hi = np.minimum(e[owner], cell_lo + delta)
    # intervals are sorted and disjoint, so k is nondecreasing
    first = np.flatnonzero(np.concatenate(([True], np.diff(k) != 0)))
    lo = np.minimum.reduceat(piece_lo, first)
    hi = np.maximum.reduceat(piece_hi, first)
    return k[first], lo, np.maximum(hi, lo)


def _shift_diameters(S: SetRep, delta: float) -> List[np.ndarray]:
    diameters = []
    for j in range(GRID_SHIFTS):
        _, lo, hi = _cell_extents(S, delta, j * delta / GRID_SHIFTS)
        diameters.append(hi - lo)
    return diameters


def _cover_value(diameters: List[np.ndarray], alpha: float) -> float:
    # numpy gives 0.0 ** 0 == 1, so h^0 counts cells
    return float(min(np.sum(d ** alpha) for d in diameters))


def hausdorff_value(S: SetRep, alpha: float, delta: float) -> float:
    """Upper estimate of the delta-covering infimum of sum diam(E_k)**alpha.

    Covers by the cells of a delta-grid, best of GRID_SHIFTS shifted grids, each
    cell shrunk to the tight extent of S inside it.
    """
    _check_alpha(alpha)
    _check_delta(S, delta)
    if S.is_empty:
        return 0.0
    return _cover_value(_shift_diameters(S, delta), alpha)


def packing_centers(S: SetRep, delta: float) -> np.ndarray:
    """Greedy leftmost centers in S of pairwise disjoint closed balls of radius delta/2."""
    step = delta * PACKING_STEP
    centers: List[np.ndarray] = []
    next_allowed = -math.inf
    for a, b in S.bounds:
        if b < next_allowed:
            continue
        first = max(a, next_allowed)
        count = int(math.floor((b - first) / step)) + 1
        centers.append(first + step * np.arange(count))
        next_allowed = first + step * count
    return np.concatenate(centers) if centers else np.zeros(0)


def packing_value(S: SetRep, alpha: float, delta: float) -> float:
    """Lower estimate of the delta-packing supremum of sum (2 r_k)**alpha with r_k = delta / 2."""
    _check_alpha(alpha)
    _check_delta(S, delta)
    return float(packing_centers(S, delta).size * delta ** alpha)


def box_counts(S: SetRep, scales: Sequence[float]) -> np.ndarray:
    return np.asarray([_cell_extents(S, float(eps), 0.0)[0].size for eps in scales], dtype=float)


def box_dimension(S: SetRep, scales: Sequence[float]) -> float:
    """Least-squares slope of log N(eps) against log(1/eps)."""
    scales = np.asarray(scales, dtype=float)
    if scales.size < MIN_BOX_SCALES:
        raise DomainError(f"box_dimension needs at least {MIN_BOX_SCALES} scales, got {scales.size}")
    for eps in scales:
        _check_delta(S, float(eps))
    if S.is_empty:
        raise DomainError("box dimension of an empty set is undefined")
    counts = box_counts(S, scales)
    slope = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)[0]
    logger.debug(f"Box counts {counts.tolist()} give slope {slope:.4f}")
    return float(slope)


@dataclass(frozen=True, eq=False)
class DimensionScan:
    """Covering or packing values across an alpha grid at one delta"""
    kind: str
    delta: float
    alphas: np.ndarray
    values: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "delta": self.delta, "alphas": self.alphas, "values": self.values}

    def save_csv(self, path: PathLike) -> Path:
        return write_csv(
            path,
            ["alpha", "value"],
            np.column_stack([self.alphas, self.values]),
            {"kind": self.kind, "delta": self.delta},
        )


def dimension_scan(S: SetRep, alphas: Sequence[float], delta: float, kind: str = "hausdorff") -> DimensionScan:
    alphas = np.sort(np.asarray(alphas, dtype=float))
    for alpha in alphas:
        _check_alpha(float(alpha))
    _check_delta(S, delta)
    if kind == "hausdorff":
        diameters = _shift_diameters(S, delta) if not S.is_empty else []
        values = [_cover_value(diameters, float(a)) if diameters else 0.0 for a in alphas]
    elif kind == "packing":
        n = packing_centers(S, delta).size
        values = [n * delta ** float(a) for a in alphas]
    else:
        raise DomainError(f"scan kind must be 'hausdorff' or 'packing', got {kind!r}")
    return DimensionScan(kind=kind, delta=float(delta), alphas=alphas, values=np.asarray(values, dtype=float))


def transition_alpha(scan: DimensionScan, level: float = 1.0) -> float:
    """First alpha of the scan whose value is at most `level`; the last alpha if none is."""
    below = np.flatnonzero(scan.values <= level)
    if below.size == 0:
        return float(scan.alphas[-1])
    return float(scan.alphas[below[0]])
