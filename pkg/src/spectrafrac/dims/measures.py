"""
Finite atomic measures on the real line for spectrafrac
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DomainError, ResourceLimitError
from ..utils.io import PathLike, dumps_json, read_csv, read_json, write_csv

logger = logging.getLogger(__name__)

DEDUP_TOLERANCE = 1e-12
MASS_TOLERANCE = 1e-9
MAX_CANTOR_DEPTH = 24

ArrayLike = Union[float, Sequence[float], np.ndarray]


def _split_long_runs(p: np.ndarray, starts: np.ndarray) -> None:
    """Split chains of close neighbours so every merged atom lies within tolerance of its group's first atom."""
    heads = np.flatnonzero(starts)
    tails = np.append(heads[1:], p.size)
    for head, tail in zip(heads[tails - heads > 2], tails[tails - heads > 2]):
        anchor = p[head]
        for i in range(head + 1, tail):
            if p[i] - anchor > DEDUP_TOLERANCE:
                starts[i] = True
                anchor = p[i]


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Sorted atomic sub-probability measure.

    Build instances through `from_atoms`, which sorts, merges atoms closer than
    `DEDUP_TOLERANCE` and checks the mass invariants.
    """
    positions: np.ndarray
    weights: np.ndarray
    _cumulative: np.ndarray = field(init=False, repr=False, compare=False)
    _moment: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cumulative = np.concatenate(([0.0], np.cumsum(self.weights)))
        moment = np.concatenate(([0.0], np.cumsum(self.weights * self.positions)))
        object.__setattr__(self, "_cumulative", cumulative)
        object.__setattr__(self, "_moment", moment)

    @classmethod
    def from_atoms(cls, positions: Iterable[float], weights: Iterable[float]) -> "DiscreteMeasure":
        p = np.asarray(positions if isinstance(positions, np.ndarray) else list(positions), dtype=float).ravel()
        w = np.asarray(weights if isinstance(weights, np.ndarray) else list(weights), dtype=float).ravel()
        if p.shape != w.shape:
            raise DomainError(f"{p.size} positions but {w.size} weights")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(w))):
            raise DomainError("atom positions and weights must be finite")
        if np.any(w < 0):
            raise DomainError("atom weights must be nonnegative")
        keep = w > 0
        p, w = p[keep], w[keep]
        order = np.argsort(p, kind="stable")
        p, w = p[order], w[order]
        if p.size > 1:
            starts = np.concatenate(([True], np.diff(p) > DEDUP_TOLERANCE))
            if not np.all(starts):
                _split_long_runs(p, starts)
                idx = np.flatnonzero(starts)
                logger.debug(f"Merged {p.size - idx.size} atoms closer than {DEDUP_TOLERANCE}")
                w = np.add.reduceat(w, idx)
                p = p[idx]
        total = float(w.sum())
        if total > 1.0 + MASS_TOLERANCE:
            raise DomainError(f"total mass {total} exceeds one")
        p.setflags(write=False)
        w.setflags(write=False)
        return cls(positions=p, weights=w)

    @classmethod
    def empty(cls) -> "DiscreteMeasure":
        return cls.from_atoms([], [])

    @classmethod
    def point_mass(cls, x: float, weight: float = 1.0) -> "DiscreteMeasure":
        return cls.from_atoms([x], [weight])

    @property
    def total_mass(self) -> float:
        return float(self._cumulative[-1])

    @property
    def size(self) -> int:
        return int(self.positions.size)

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return np.array_equal(self.positions, other.positions) and np.array_equal(self.weights, other.weights)

    @property
    def atoms(self) -> Tuple[Tuple[float, float], ...]:
        return tuple(zip(self.positions.tolist(), self.weights.tolist()))

    def cdf(self, x: ArrayLike) -> np.ndarray:
        """Right-continuous sub-distribution function F(x) = mu((-inf, x])."""
        idx = np.searchsorted(self.positions, np.asarray(x, dtype=float), side="right")
        return self._cumulative[idx]

    def cdf_left(self, x: ArrayLike) -> np.ndarray:
        """Left limit F(x-) = mu((-inf, x))."""
        idx = np.searchsorted(self.positions, np.asarray(x, dtype=float), side="left")
        return self._cumulative[idx]

    def ball_range(self, x: ArrayLike, eps: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
        """Index range [lo, hi) of the atoms inside the open balls B(x, eps)."""
        x = np.asarray(x, dtype=float)
        eps = np.asarray(eps, dtype=float)
        lo = np.searchsorted(self.positions, x - eps, side="right")
        hi = np.searchsorted(self.positions, x + eps, side="left")
        return lo, np.maximum(hi, lo)

    def range_mass(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return self._cumulative[hi] - self._cumulative[lo]

    def range_moment(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Sum of weight * position over the atoms with index in [lo, hi)."""
        return self._moment[hi] - self._moment[lo]

    def translate(self, delta: float) -> "DiscreteMeasure":
        return DiscreteMeasure.from_atoms(self.positions + delta, self.weights)

    def median_spacing(self) -> float:
        if self.size < 2:
            return 0.0
        return float(np.median(np.diff(self.positions)))

    def to_dict(self) -> Dict[str, Any]:
        return {"atoms": np.column_stack([self.positions, self.weights]), "total_mass": self.total_mass}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DiscreteMeasure":
        atoms = np.asarray(data.get("atoms", []), dtype=float).reshape(-1, 2)
        return cls.from_atoms(atoms[:, 0], atoms[:, 1])

    def to_json(self) -> str:
        return dumps_json(self.to_dict())

    def save_csv(self, path: PathLike) -> Path:
        return write_csv(
            path,
            ["position", "weight"],
            np.column_stack([self.positions, self.weights]),
            {"total_mass": self.total_mass},
        )

    def save_json(self, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        return path

    @classmethod
    def load(cls, path: PathLike) -> "DiscreteMeasure":
        """Load a measure from `.json` or CSV (position,weight rows)."""
        path = Path(path)
        if path.suffix.lower() == ".json":
            return cls.from_dict(read_json(path))
        _, _, table = read_csv(path)
        if table.size == 0:
            return cls.empty()
        if table.shape[1] < 2:
            raise DomainError(f"{path}: expected position,weight columns")
        return cls.from_atoms(table[:, 0], table[:, 1])


@dataclass(frozen=True)
class RestrictionSet:
    """Finite union of disjoint sorted intervals; `closed=False` reads them as open."""
    intervals: Tuple[Tuple[float, float], ...] = ()
    closed: bool = True

    def __post_init__(self):
        cleaned = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in cleaned:
            if not a <= b:
                raise DomainError(f"interval [{a}, {b}] has a > b")
        for (_, b0), (a1, _) in zip(cleaned, cleaned[1:]):
            if not b0 < a1:
                raise DomainError("intervals must be sorted and pairwise disjoint")
        object.__setattr__(self, "intervals", cleaned)

    @classmethod
    def of(cls, *intervals: Sequence[float], closed: bool = True) -> "RestrictionSet":
        return cls(tuple((a, b) for a, b in intervals), closed=closed)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.is_empty:
            return np.zeros(x.shape, dtype=bool)
        starts = np.array([a for a, _ in self.intervals])
        ends = np.array([b for _, b in self.intervals])
        if self.closed:
            idx = np.searchsorted(starts, x, side="right") - 1
            safe = np.clip(idx, 0, None)
            return (idx >= 0) & (x <= ends[safe])
        idx = np.searchsorted(starts, x, side="left") - 1
        safe = np.clip(idx, 0, None)
        return (idx >= 0) & (x < ends[safe])

    def to_dict(self) -> Dict[str, Any]:
        return {"intervals": [list(iv) for iv in self.intervals], "closed": self.closed}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RestrictionSet":
        return cls(tuple(tuple(iv) for iv in data.get("intervals", [])), closed=bool(data.get("closed", True)))


def ball_mass(mu: DiscreteMeasure, x: ArrayLike, eps: ArrayLike) -> Union[float, np.ndarray]:
    """Mass of the open ball B(x; eps); broadcasts over array arguments."""
    eps_arr = np.asarray(eps, dtype=float)
    if np.any(~(eps_arr > 0)):
        raise DomainError(f"ball radius must be positive, got {eps!r}")
    lo, hi = mu.ball_range(x, eps_arr)
    mass = mu.range_mass(lo, hi)
    return float(mass) if np.ndim(mass) == 0 else mass


def restrict(mu: DiscreteMeasure, region: RestrictionSet) -> DiscreteMeasure:
    """mu restricted to `region`: mu_{;A}(.) = mu(A n .)."""
    mask = region.contains(mu.positions)
    return DiscreteMeasure.from_atoms(mu.positions[mask], mu.weights[mask])


def _levy_feasible(mu: DiscreteMeasure, nu: DiscreteMeasure, h: float) -> bool:
    # F_nu(x) <= F_mu(x+h) + h is tightest at the atoms of nu, the mirrored
    # condition at the atoms of mu.
    if nu.size and np.any(nu.cdf(nu.positions) > mu.cdf(nu.positions + h) + h):
        return False
    if mu.size and np.any(mu.cdf(mu.positions) > nu.cdf(mu.positions + h) + h):
        return False
    return True


def _bisect_levy(feasible: Callable[[float], bool], upper: float, iterations: int = 200) -> float:
    if feasible(0.0):
        return 0.0
    lo, hi = 0.0, upper
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def levy_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Levy distance between the sub-distribution functions of two atomic measures.

    inf{h > 0 : F_mu(x-h) - h <= F_nu(x) <= F_mu(x+h) + h for all x}; h equal to
    the larger total mass is always feasible, so bisection runs on [0, max mass].
    """
    upper = max(mu.total_mass, nu.total_mass)
    if upper == 0.0:
        return 0.0
    return _bisect_levy(lambda h: _levy_feasible(mu, nu, h), upper)


def levy_distance_to_cdf(
    mu: DiscreteMeasure,
    cdf: Callable[[np.ndarray], np.ndarray],
    mass: float = 1.0,
) -> float:
    """Levy distance between an atomic measure and a continuous sub-distribution function.

    `cdf` must be vectorized, nondecreasing, with limits 0 and `mass`.
    """
    cum_left = mu._cumulative[:-1]
    cum_right = mu._cumulative[1:]
    positions = mu.positions

    def feasible(h: float) -> bool:
        # F_mu(x) <= F(x+h) + h checked at the atoms (start of each plateau)
        if positions.size and np.any(cum_right > cdf(positions + h) + h):
            return False
        # F(x-h) - h <= F_mu(x) checked as x approaches each atom from the left
        if positions.size and np.any(cdf(positions - h) - h > cum_left):
            return False
        return mass - h <= mu.total_mass

    return _bisect_levy(feasible, max(mass, mu.total_mass))


def arcsine_cdf(x: ArrayLike) -> np.ndarray:
    """Distribution function of the free Laplacian's delta_0 spectral measure on [-2, 2]."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + np.arcsin(x / 2.0) / np.pi


def arcsine_density(x: ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 2.0
    out = np.zeros_like(x)
    out[inside] = 1.0 / (np.pi * np.sqrt(4.0 - x[inside] ** 2))
    return out


def cantor_digits(depth: int) -> np.ndarray:
    """Integers m with m * 3**-depth the left endpoints of the depth-level Cantor intervals, sorted."""
    if depth < 1:
        raise DomainError(f"depth must be positive, got {depth}")
    if depth > MAX_CANTOR_DEPTH:
        raise ResourceLimitError(f"depth {depth} exceeds the cap {MAX_CANTOR_DEPTH}")
    m = np.zeros(1, dtype=np.int64)
    for _ in range(depth):
        m = (3 * m[:, None] + np.array([0, 2], dtype=np.int64)).ravel()
    return m


def cantor_measure(depth: int) -> DiscreteMeasure:
    """Middle-thirds Cantor measure at level `depth`: equal atoms at the interval left endpoints."""
    m = cantor_digits(depth)
    positions = m.astype(float) / float(3 ** depth)
    weights = np.full(m.size, 2.0 ** -depth)
    return DiscreteMeasure.from_atoms(positions, weights)


def uniform_measure(interval: Sequence[float], n_atoms: int) -> DiscreteMeasure:
    """Lebesgue measure on [a, b] normalized, as `n_atoms` midpoint atoms."""
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise DomainError(f"uniform_measure needs a < b, got [{a}, {b}]")
    if n_atoms < 1:
        raise DomainError(f"n_atoms must be positive, got {n_atoms}")
    positions = a + (b - a) * (np.arange(n_atoms) + 0.5) / n_atoms
    return DiscreteMeasure.from_atoms(positions, np.full(n_atoms, 1.0 / n_atoms))


def random_measure(rng: np.random.Generator, n_atoms: int, mass: Optional[float] = None, spread: float = 1.0) -> DiscreteMeasure:
    """Random atomic measure used by property checks; total mass `mass` or uniform in (0, 1]."""
    positions = rng.uniform(-spread, spread, size=n_atoms)
    weights = rng.exponential(size=n_atoms)
    total = rng.uniform(0.05, 1.0) if mass is None else mass
    weights = weights * (total / weights.sum())
    return DiscreteMeasure.from_atoms(positions, weights)
