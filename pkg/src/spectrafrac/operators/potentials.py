"""
Potentials and Jacobi truncations of discrete Schrodinger operators for spectrafrac

(T psi)_n = psi_{n+1} + psi_{n-1} + V_n psi_n, truncated with Dirichlet
boundary conditions to the window [-floor(N/2), -floor(N/2) + N).
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from ..exceptions import DomainError, InvariantError, ResourceLimitError
from ..utils.io import PathLike, write_csv

logger = logging.getLogger(__name__)

MAX_TERM_DEPTH = 24
MAX_ENUMERATION_DEPTH = 20
NEGATIVE_STREAM_KEY = 0x9E3779B97F4A7C15
BOUND_TOLERANCE = 1e-12

Window = Union[range, Tuple[int, int]]


@dataclass(frozen=True)
class OdometerState:
    """Point of the dyadic odometer truncated to its first L binary digits, least significant first"""
    digits: Tuple[int, ...]

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        if any(d not in (0, 1) for d in digits):
            raise DomainError("odometer digits must be 0 or 1")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def zeros(cls, length: int) -> "OdometerState":
        return cls(tuple([0] * length))

    @classmethod
    def from_int(cls, value: int, length: int) -> "OdometerState":
        value %= 1 << length
        return cls(tuple((value >> i) & 1 for i in range(length)))

    @property
    def length(self) -> int:
        return len(self.digits)

    def to_int(self) -> int:
        return sum(d << i for i, d in enumerate(self.digits))

    def cylinder(self, k: int) -> int:
        """Index of the depth-k cylinder holding this point (its first k digits as an integer)."""
        return self.to_int() & ((1 << k) - 1)

    def translate(self) -> "OdometerState":
        """Add one with carry; all ones wraps to all zeros."""
        digits = list(self.digits)
        for i, d in enumerate(digits):
            if d == 0:
                digits[i] = 1
                return OdometerState(tuple(digits))
            digits[i] = 0
        logger.debug(f"Odometer overflow past depth {self.length}, wrapped to zero")
        return OdometerState(tuple(digits))

    def inverse(self) -> "OdometerState":
        """Subtract one with borrow; all zeros wraps to all ones."""
        digits = list(self.digits)
        for i, d in enumerate(digits):
            if d == 1:
                digits[i] = 0
                return OdometerState(tuple(digits))
            digits[i] = 1
        logger.debug(f"Odometer underflow past depth {self.length}, wrapped to all ones")
        return OdometerState(tuple(digits))

    def advance(self, n: int) -> "OdometerState":
        """tau**n, negative n included."""
        return OdometerState.from_int(self.to_int() + n, self.length)


def odometer_translate(kappa: OdometerState) -> OdometerState:
    return kappa.translate()


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class SamplingTerm(FrozenModel):
    """Cylinder function of depth k: table value indexed by the first k odometer digits"""
    depth: int = Field(ge=1, le=MAX_TERM_DEPTH)
    table: List[float]

    @model_validator(mode="after")
    def _table_size(self) -> "SamplingTerm":
        if len(self.table) != 2 ** self.depth:
            raise ValueError(f"a depth-{self.depth} term needs {2 ** self.depth} table values, got {len(self.table)}")
        if not all(np.isfinite(self.table)):
            raise ValueError("table values must be finite")
        return self


class SamplingFunction(FrozenModel):
    """g = sum of cylinder terms on the odometer"""
    terms: List[SamplingTerm] = Field(default_factory=list)

    @classmethod
    def single(cls, table: Sequence[float]) -> "SamplingFunction":
        depth = int(np.log2(len(table)))
        return cls(terms=[SamplingTerm(depth=depth, table=list(table))])

    @property
    def max_depth(self) -> int:
        return max((t.depth for t in self.terms), default=0)

    def cylinder_values(self, depth: Optional[int] = None) -> np.ndarray:
        """g on each of the 2**depth cylinders of depth `depth` (default: the deepest term)."""
        depth = self.max_depth if depth is None else depth
        if depth < self.max_depth:
            raise DomainError(f"depth {depth} is shallower than the deepest term ({self.max_depth})")
        if depth > MAX_ENUMERATION_DEPTH:
            raise ResourceLimitError(f"enumerating 2**{depth} cylinders exceeds depth {MAX_ENUMERATION_DEPTH}")
        values = np.zeros(2 ** depth)
        for term in self.terms:
            values += np.tile(np.asarray(term.table, dtype=float), 2 ** (depth - term.depth))
        return values

    def evaluate(self, cylinders: np.ndarray) -> np.ndarray:
        """g at points given by their cylinder index at depth max_depth."""
        cylinders = np.asarray(cylinders, dtype=np.int64)
        values = np.zeros(cylinders.shape)
        for term in self.terms:
            table = np.asarray(term.table, dtype=float)
            values += table[cylinders & ((1 << term.depth) - 1)]
        return values

    def sup_norm(self) -> float:
        if not self.terms:
            return 0.0
        return float(np.max(np.abs(self.cylinder_values())))

    def term_bound(self) -> float:
        """Sum of max |table| over terms, an upper bound on the sup-norm."""
        return float(sum(np.max(np.abs(t.table)) for t in self.terms))

    def truncate(self, depth: int) -> "SamplingFunction":
        """The periodic approximant keeping the terms of depth <= `depth`."""
        return SamplingFunction(terms=[t for t in self.terms if t.depth <= depth])

    def tail(self, depth: int) -> "SamplingFunction":
        return SamplingFunction(terms=[t for t in self.terms if t.depth > depth])

    def tail_norm(self, depth: int) -> float:
        return self.tail(depth).sup_norm()

    def __sub__(self, other: "SamplingFunction") -> "SamplingFunction":
        negated = [SamplingTerm(depth=t.depth, table=[-v for v in t.table]) for t in other.terms]
        return SamplingFunction(terms=list(self.terms) + negated)


def sampling_sup_norm(g: SamplingFunction) -> float:
    return g.sup_norm()


def _window_bounds(window: Window) -> Tuple[int, int]:
    if isinstance(window, range):
        if window.step != 1:
            raise DomainError("potential windows must be contiguous")
        return window.start, window.stop
    start, stop = (int(v) for v in window)
    if stop < start:
        raise DomainError(f"window [{start}, {stop}) is reversed")
    return start, stop


class _PotentialBase(FrozenModel):
    bound: Optional[float] = Field(default=None, ge=0)

    @property
    def r(self) -> float:
        """Declared sup bound, or the exact one when none is declared."""
        return float(self.bound) if self.bound is not None else self.derived_bound()

    def derived_bound(self) -> float:
        raise NotImplementedError

    def sample(self, start: int, stop: int) -> np.ndarray:
        raise NotImplementedError


class ExplicitPotential(_PotentialBase):
    """Finitely supported potential: values[i] sits at site i - origin, zero elsewhere"""
    variant: Literal["explicit"] = "explicit"
    values: List[float]
    origin: int = 0

    def derived_bound(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values else 0.0

    def sample(self, start: int, stop: int) -> np.ndarray:
        values = np.asarray(self.values, dtype=float)
        idx = np.arange(start, stop) + self.origin
        inside = (idx >= 0) & (idx < values.size)
        out = np.zeros(stop - start)
        out[inside] = values[idx[inside]]
        return out


class PeriodicPotential(_PotentialBase):
    variant: Literal["periodic"] = "periodic"
    cell: List[float] = Field(min_length=1)

    def derived_bound(self) -> float:
        return float(np.max(np.abs(self.cell)))

    def sample(self, start: int, stop: int) -> np.ndarray:
        cell = np.asarray(self.cell, dtype=float)
        return cell[np.arange(start, stop) % cell.size]


class RandomPotential(_PotentialBase):
    """i.i.d. uniform[-r, r] from PCG64.

    Site n >= 0 takes the n-th raw 64-bit output of PCG64(seed); site n < 0 the
    (-n-1)-th output of PCG64(seed ^ NEGATIVE_STREAM_KEY). A raw word x maps to
    r * (2u - 1) with u = (x >> 11) * 2**-53.
    """
    variant: Literal["random"] = "random"
    seed: int = Field(ge=0, lt=2 ** 64)
    bound: float = Field(gt=0)

    def derived_bound(self) -> float:
        return float(self.bound)

    @staticmethod
    def _uniforms(seed: int, count: int) -> np.ndarray:
        if count <= 0:
            return np.zeros(0)
        raw = np.random.PCG64(seed).random_raw(count)
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    def sample(self, start: int, stop: int) -> np.ndarray:
        out = np.zeros(stop - start)
        sites = np.arange(start, stop)
        positive = sites >= 0
        if np.any(positive):
            u = self._uniforms(self.seed, int(sites[positive].max()) + 1)
            out[positive] = u[sites[positive]]
        if np.any(~positive):
            mirrored = -sites[~positive] - 1
            u = self._uniforms(self.seed ^ NEGATIVE_STREAM_KEY, int(mirrored.max()) + 1)
            out[~positive] = u[mirrored]
        return self.bound * (2.0 * out - 1.0)


class LimitPeriodicPotential(_PotentialBase):
    """V_n = g(tau**n kappa) over the dyadic odometer"""
    variant: Literal["limit_periodic"] = "limit_periodic"
    g: SamplingFunction
    kappa: List[int] = Field(default_factory=list)

    @field_validator("kappa")
    @classmethod
    def _binary(cls, digits: List[int]) -> List[int]:
        if any(d not in (0, 1) for d in digits):
            raise ValueError("kappa digits must be 0 or 1")
        return digits

    @model_validator(mode="after")
    def _deep_enough(self) -> "LimitPeriodicPotential":
        if len(self.kappa) < self.g.max_depth:
            raise ValueError(f"kappa has {len(self.kappa)} digits but g has a depth-{self.g.max_depth} term")
        return self

    @property
    def odometer(self) -> OdometerState:
        return OdometerState(tuple(self.kappa))

    def derived_bound(self) -> float:
        if self.g.max_depth <= MAX_ENUMERATION_DEPTH:
            return self.g.sup_norm()
        return self.g.term_bound()

    def truncate(self, depth: int) -> "LimitPeriodicPotential":
        return self.model_copy(update={"g": self.g.truncate(depth)})

    def sample(self, start: int, stop: int) -> np.ndarray:
        depth = self.g.max_depth
        if depth == 0:
            return np.zeros(stop - start)
        base = self.odometer.cylinder(depth)
        cylinders = (base + np.arange(start, stop, dtype=np.int64)) % (1 << depth)
        return self.g.evaluate(cylinders)


class InterpolatedPotential(_PotentialBase):
    """Linear path V(lam) = (1 - lam) V_a + lam V_b"""
    variant: Literal["interpolated"] = "interpolated"
    a: "PotentialSpec"
    b: "PotentialSpec"
    lam: float = Field(ge=0.0, le=1.0)

    def derived_bound(self) -> float:
        return max(self.a.r, self.b.r)

    def sample(self, start: int, stop: int) -> np.ndarray:
        return (1.0 - self.lam) * self.a.sample(start, stop) + self.lam * self.b.sample(start, stop)


PotentialSpec = Annotated[
    Union[ExplicitPotential, PeriodicPotential, RandomPotential, LimitPeriodicPotential, InterpolatedPotential],
    Field(discriminator="variant"),
]
InterpolatedPotential.model_rebuild()

potential_adapter: TypeAdapter = TypeAdapter(PotentialSpec)


def parse_potential(data: Dict[str, Any]) -> PotentialSpec:
    """Validate a variant-tagged mapping into a spec; raises pydantic.ValidationError."""
    return potential_adapter.validate_python(data)


def potential_to_dict(spec: PotentialSpec) -> Dict[str, Any]:
    return spec.model_dump(mode="json")


def spec_hash(spec: PotentialSpec) -> str:
    """sha256 of the canonical (sorted, compact) JSON form."""
    canonical = json.dumps(potential_to_dict(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def zero_potential() -> PeriodicPotential:
    return PeriodicPotential(cell=[0.0])


def sample_potential(spec: PotentialSpec, window: Window) -> np.ndarray:
    start, stop = _window_bounds(window)
    return spec.sample(start, stop)


def truncation_window(N: int) -> Tuple[int, int]:
    start = -(N // 2)
    return start, start + N


@dataclass(frozen=True, eq=False)
class JacobiTruncation:
    """Dirichlet N x N section: diagonal V over the window, unit off-diagonals"""
    diagonal: np.ndarray = field(repr=False)
    start: int
    bound: float
    spec_hash: str = ""

    @property
    def N(self) -> int:
        return int(self.diagonal.size)

    @property
    def origin(self) -> int:
        """Row of site 0."""
        return -self.start

    @property
    def window(self) -> Tuple[int, int]:
        return self.start, self.start + self.N

    @property
    def off_diagonal(self) -> np.ndarray:
        return np.ones(self.N - 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JacobiTruncation):
            return NotImplemented
        return (self.start, self.bound, self.spec_hash) == (other.start, other.bound, other.spec_hash) and np.array_equal(
            self.diagonal, other.diagonal
        )

    def row_of(self, site: int) -> int:
        row = site - self.start
        if not 0 <= row < self.N:
            raise DomainError(f"site {site} lies outside the window {self.window}")
        return row

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diagonal[:, None] * v if v.ndim == 2 else self.diagonal * v
        out[:-1] += v[1:]
        out[1:] += v[:-1]
        return out

    def save_csv(self, path: PathLike) -> Path:
        sites = np.arange(self.start, self.start + self.N)
        return write_csv(
            path,
            ["site", "diagonal"],
            np.column_stack([sites, self.diagonal]),
            {"N": self.N, "bound": self.bound, "off_diagonal": 1, "spec_hash": self.spec_hash},
        )


def build_truncation(spec: PotentialSpec, N: int) -> JacobiTruncation:
    if N < 2:
        raise DomainError(f"truncation size must be at least 2, got {N}")
    start, stop = truncation_window(N)
    diagonal = spec.sample(start, stop)
    r = spec.r
    worst = float(np.max(np.abs(diagonal)))
    if worst > r * (1.0 + BOUND_TOLERANCE) + BOUND_TOLERANCE:
        site = start + int(np.argmax(np.abs(diagonal)))
        raise InvariantError(f"|V_{site}| = {worst} exceeds the declared bound r = {r}")
    diagonal.setflags(write=False)
    return JacobiTruncation(diagonal=diagonal, start=start, bound=r, spec_hash=spec_hash(spec))


def _shared_odometer(a: PotentialSpec, b: PotentialSpec) -> bool:
    if not (isinstance(a, LimitPeriodicPotential) and isinstance(b, LimitPeriodicPotential)):
        return False
    depth = max(a.g.max_depth, b.g.max_depth)
    return a.odometer.cylinder(depth) == b.odometer.cylinder(depth)


def potential_distance(a: PotentialSpec, b: PotentialSpec, window: Optional[Window] = None) -> float:
    """||g - g'||_inf for limit-periodic pairs on a shared kappa, else sup over `window` of |V_n - V'_n|."""
    if _shared_odometer(a, b):
        return (a.g - b.g).sup_norm()
    if window is None:
        raise DomainError("a window is needed unless both potentials are limit-periodic on a shared kappa")
    start, stop = _window_bounds(window)
    if stop == start:
        return 0.0
    return float(np.max(np.abs(a.sample(start, stop) - b.sample(start, stop))))


def basis_enumeration(count: int) -> List[int]:
    """Sites of xi_1, xi_2, ...: 0, 1, -1, 2, -2, ..."""
    sites = [0]
    k = 1
    while len(sites) < count:
        sites.extend([k, -k])
        k += 1
    return sites[:count]


def operator_distance(a: PotentialSpec, b: PotentialSpec, N: int) -> float:
    """sum over l >= 1 of min(2**-l, ||(T - T')xi_l||) on the N-site truncations.

    Off-diagonals agree, so (T - T')xi_l = (V_n - V'_n) delta_n for the l-th site n.
    Sites outside the window contribute nothing.
    """
    ta, tb = build_truncation(a, N), build_truncation(b, N)
    diff = np.abs(ta.diagonal - tb.diagonal)
    start, stop = ta.window
    total = 0.0
    for l, site in enumerate(basis_enumeration(N + 1), start=1):
        if start <= site < stop:
            total += min(2.0 ** -l, float(diff[site - start]))
    return total
