"""
Experiment recipes for spectrafrac

Every table written here is a finite-scale profile of truncated operators; the
pure-point pole of the Wonderland scan is a strong-coupling random potential
standing in for the dense pure-point families of the infinite-volume theory.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import Field, TypeAdapter, field_validator, model_validator

from ..dims.kernels import DEFAULT_RATIO, gamma_functionals, geometric_grid, tent_table
from ..dims.local_dims import MeasureDimReport, classify_sweep, measure_dims
from ..dims.measures import DiscreteMeasure, RestrictionSet, cantor_measure, levy_distance, uniform_measure
from ..exceptions import DomainError
from ..operators.potentials import (
    FrozenModel,
    InterpolatedPotential,
    LimitPeriodicPotential,
    PeriodicPotential,
    PotentialSpec,
    RandomPotential,
    spec_hash,
)
from ..operators.spectral import PsiChoice, SpectralRequest, spectral_measure
from ..utils.io import PathLike, write_csv
from .executor import TaskExecutor, task_seed
from .history import write_manifest

logger = logging.getLogger(__name__)

CANTOR_DIMENSION = math.log(2.0) / math.log(3.0)
FINITE_SCALE_LABEL = "finite-scale profile of Dirichlet truncations"
SURROGATE_LABEL = "pure-point pole is a strong-coupling random potential (surrogate)"
DATA_DIR = Path(__file__).resolve().parent.parent / "data"
EXPERIMENT_KINDS = {"wonderland": "wonderland", "limit-periodic": "limit_periodic", "alpha-sweep": "alpha_sweep"}


class EstimatorParams(FrozenModel):
    """Dimension-estimator settings shared by the operator experiments"""
    eps_min: float = Field(default=0.05, gt=0)
    eps_max: float = Field(default=0.5, gt=0)
    n_scales: int = Field(default=6, ge=4)
    quantile: float = Field(default=0.95, gt=0.5, lt=1.0)
    n_sample: int = Field(default=400, ge=1)
    spacing_factor: float = Field(default=10.0, ge=0)
    region: Optional[List[Tuple[float, float]]] = None
    edge_margin: Optional[float] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _window_order(self) -> "EstimatorParams":
        if not self.eps_max > self.eps_min:
            raise ValueError("eps_max must exceed eps_min")
        return self


class WonderlandConfig(FrozenModel):
    kind: Literal["wonderland"] = "wonderland"
    a: PotentialSpec = Field(default_factory=lambda: PeriodicPotential(cell=[0.0]))
    b: PotentialSpec = Field(default_factory=lambda: RandomPotential(seed=0, bound=10.0))
    r: Optional[float] = Field(default=None, gt=0)
    grid: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0], min_length=1)
    N: int = Field(default=2001, ge=2)
    psi: PsiChoice = "delta0"
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    estimator: EstimatorParams = Field(default_factory=lambda: EstimatorParams(edge_margin=0.4))
    output_dir: Optional[str] = None

    @field_validator("grid")
    @classmethod
    def _grid_sorted(cls, grid: List[float]) -> List[float]:
        if any(not 0.0 <= lam <= 1.0 for lam in grid):
            raise ValueError("grid values must lie in [0, 1]")
        if any(b < a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid values must be sorted")
        return grid

    @model_validator(mode="after")
    def _endpoints_share_bound(self) -> "WonderlandConfig":
        if self.r is not None:
            for name, spec in (("a", self.a), ("b", self.b)):
                if spec.r > self.r:
                    raise ValueError(f"endpoint {name} has bound {spec.r:g} above the shared bound r = {self.r:g}")
        return self

    @property
    def shared_bound(self) -> float:
        """Common bound r of both endpoints and of every potential on the path."""
        return float(self.r) if self.r is not None else max(self.a.r, self.b.r)


class LimitPeriodicConfig(FrozenModel):
    kind: Literal["limit_periodic"] = "limit_periodic"
    series: LimitPeriodicPotential
    depths: List[int] = Field(min_length=1)
    N: int = Field(default=2001, ge=2)
    psi: PsiChoice = "delta0"
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    estimator: EstimatorParams = Field(default_factory=lambda: EstimatorParams(edge_margin=0.4))
    output_dir: Optional[str] = None

    @field_validator("depths")
    @classmethod
    def _depths_sorted(cls, depths: List[int]) -> List[int]:
        if any(d < 0 for d in depths) or any(b <= a for a, b in zip(depths, depths[1:])):
            raise ValueError("depths must be nonnegative and strictly increasing")
        return depths


class AlphaSweepConfig(FrozenModel):
    kind: Literal["alpha_sweep"] = "alpha_sweep"
    measure: str = "cantor"
    depth: int = Field(default=14, ge=1)
    n_atoms: int = Field(default=100_000, ge=1)
    alphas: List[float] = Field(default_factory=lambda: [round(0.05 * k, 2) for k in range(1, 20)], min_length=1)
    r: Optional[float] = Field(default=None, gt=0)
    reference_alpha: Optional[float] = Field(default=None, ge=0, le=1)
    s: float = Field(default=1.0, gt=0)
    t_max: float = Field(default=3.0 ** 10, gt=0)
    ratio: float = Field(default=DEFAULT_RATIO, gt=1)
    functional: Literal["H", "P"] = "H"
    level: float = Field(default=0.5, gt=0, le=1)
    output_dir: Optional[str] = None


ExperimentConfig = Annotated[
    Union[WonderlandConfig, LimitPeriodicConfig, AlphaSweepConfig],
    Field(discriminator="kind"),
]


experiment_adapter: TypeAdapter = TypeAdapter(ExperimentConfig)


def parse_experiment(data: Dict[str, Any]) -> Union[WonderlandConfig, LimitPeriodicConfig, AlphaSweepConfig]:
    return experiment_adapter.validate_python(data)


def default_config_path(name: str) -> Path:
    """Bundled default config for an experiment name (`wonderland`, `limit-periodic`, `alpha-sweep`)."""
    if name not in EXPERIMENT_KINDS:
        raise DomainError(f"unknown experiment {name!r}; expected one of {', '.join(EXPERIMENT_KINDS)}")
    return DATA_DIR / f"{EXPERIMENT_KINDS[name]}.json"


@dataclass(eq=False)
class ExperimentTable:
    """Numeric rows plus the parameter echo written above them"""
    name: str
    columns: List[str]
    rows: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)
    labels: List[str] = field(default_factory=list)
    elapsed: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def save_csv(self, path: PathLike) -> Path:
        meta = dict(self.meta)
        if self.labels:
            meta["labels"] = "; ".join(self.labels)
        return write_csv(path, self.columns, self.rows, meta)

    def write(self, output_dir: PathLike, parameters: Dict[str, Any]) -> List[Path]:
        """CSV table plus the run manifest."""
        output_dir = Path(output_dir)
        csv_path = self.save_csv(output_dir / f"{self.name}.csv")
        manifest = write_manifest(
            output_dir,
            command=f"experiment {self.name}",
            parameters=parameters,
            timings={"total": self.elapsed},
            outputs=[csv_path.name],
            labels=self.labels,
        )
        return [csv_path, manifest]


def floored_window(mu: DiscreteMeasure, eps_min: float, eps_max: float, factor: float) -> Tuple[float, float]:
    """Raise eps_min to `factor` times the median atom spacing, keeping the window ratio if it must move."""
    floor = factor * mu.median_spacing()
    if floor <= eps_min:
        return eps_min, eps_max
    if floor < eps_max:
        return floor, eps_max
    logger.info(f"Window [{eps_min:g}, {eps_max:g}] lies below the spacing floor {floor:g}, shifting it up")
    return floor, floor * (eps_max / eps_min)


def estimation_region(mu: DiscreteMeasure, params: EstimatorParams) -> Optional[RestrictionSet]:
    if params.region is not None:
        return RestrictionSet.of(*params.region)
    if params.edge_margin is not None and mu.size:
        lo = float(mu.positions[0]) + params.edge_margin
        hi = float(mu.positions[-1]) - params.edge_margin
        if lo < hi:
            return RestrictionSet.of((lo, hi))
    return None


def estimate_dims(mu: DiscreteMeasure, params: EstimatorParams, seed: int) -> Tuple[MeasureDimReport, Tuple[float, float]]:
    eps_min, eps_max = floored_window(mu, params.eps_min, params.eps_max, params.spacing_factor)
    report = measure_dims(
        mu,
        n_sample=params.n_sample,
        quantile=params.quantile,
        eps_min=eps_min,
        eps_max=eps_max,
        n_scales=params.n_scales,
        seed=seed,
        region=estimation_region(mu, params),
    )
    return report, (eps_min, eps_max)


def support_width(mu: DiscreteMeasure) -> float:
    return float(mu.positions[-1] - mu.positions[0]) if mu.size else 0.0


WONDERLAND_COLUMNS = ["lam", "dim_H_upper", "dim_P_lower", "support_width", "eps_min", "eps_max", "atoms"]


def wonderland_scan(cfg: WonderlandConfig, jobs: Optional[int] = None) -> ExperimentTable:
    """Dimension profile along V(lam) = (1 - lam) V_a + lam V_b."""
    start = time.perf_counter()

    def row(index: int) -> List[float]:
        lam = cfg.grid[index]
        spec = InterpolatedPotential(a=cfg.a, b=cfg.b, lam=lam, bound=cfg.shared_bound)
        mu = spectral_measure(SpectralRequest(spec=spec, N=cfg.N, psi=cfg.psi)).measure
        seed = task_seed(cfg.seed, index)
        report, window = estimate_dims(mu, cfg.estimator, seed)
        logger.info(f"lam={lam:g}: dim_H+={report.dim_H_upper:.3f} dim_P-={report.dim_P_lower:.3f}")
        return [lam, report.dim_H_upper, report.dim_P_lower, support_width(mu), window[0], window[1], mu.size]

    rows = TaskExecutor(jobs).map_values(row, list(range(len(cfg.grid))))
    return ExperimentTable(
        name="wonderland",
        columns=WONDERLAND_COLUMNS,
        rows=np.asarray(rows, dtype=float).reshape(-1, len(WONDERLAND_COLUMNS)),
        meta=_echo(cfg),
        labels=[FINITE_SCALE_LABEL, SURROGATE_LABEL],
        elapsed=time.perf_counter() - start,
    )


LIMIT_PERIODIC_COLUMNS = ["depth", "period", "dim_H_upper", "dim_P_lower", "tail_norm", "levy_to_full", "support_width"]


def limit_periodic_scan(cfg: LimitPeriodicConfig, jobs: Optional[int] = None) -> ExperimentTable:
    """Periodic approximants of a limit-periodic series at each depth in `cfg.depths`."""
    start = time.perf_counter()
    full = spectral_measure(SpectralRequest(spec=cfg.series, N=cfg.N, psi=cfg.psi)).measure

    def row(index: int) -> List[float]:
        depth = cfg.depths[index]
        approximant = cfg.series.truncate(depth)
        mu = spectral_measure(SpectralRequest(spec=approximant, N=cfg.N, psi=cfg.psi)).measure
        report, _ = estimate_dims(mu, cfg.estimator, task_seed(cfg.seed, index))
        return [
            depth,
            2.0 ** depth,
            report.dim_H_upper,
            report.dim_P_lower,
            cfg.series.g.tail_norm(depth),
            levy_distance(mu, full),
            support_width(mu),
        ]

    rows = TaskExecutor(jobs).map_values(row, list(range(len(cfg.depths))))
    return ExperimentTable(
        name="limit_periodic",
        columns=LIMIT_PERIODIC_COLUMNS,
        rows=np.asarray(rows, dtype=float).reshape(-1, len(LIMIT_PERIODIC_COLUMNS)),
        meta=_echo(cfg),
        labels=[FINITE_SCALE_LABEL],
        elapsed=time.perf_counter() - start,
    )


ALPHA_SWEEP_COLUMNS = ["alpha", "kc_mass", "ks_mass"]


def median_gamma(
    mu: DiscreteMeasure, alpha: float, s: float, t_max: float, ratio: float = DEFAULT_RATIO, functional: str = "H"
) -> float:
    """mu-weighted median of gamma over the atoms: a threshold r splitting the mass in half at `alpha`."""
    ts = geometric_grid(s, t_max, ratio)
    gamma_h, gamma_p = gamma_functionals(ts, tent_table(mu, ts, mu.positions), alpha)
    gamma = gamma_h if functional == "H" else gamma_p
    order = np.argsort(gamma, kind="stable")
    cumulative = np.cumsum(mu.weights[order])
    return float(gamma[order][np.searchsorted(cumulative, 0.5 * mu.total_mass)])


def alpha_sweep(
    mu: DiscreteMeasure,
    alphas: Sequence[float],
    r: float,
    s: float,
    t_max: float,
    ratio: float = DEFAULT_RATIO,
    functional: str = "H",
) -> ExperimentTable:
    start = time.perf_counter()
    alphas = sorted(float(a) for a in alphas)
    reports = classify_sweep(mu, alphas, r, s, t_max, ratio=ratio, kind=functional)
    rows = [[rep.alpha, rep.kc_mass, rep.ks_mass] for rep in reports]
    return ExperimentTable(
        name="alpha_sweep",
        columns=ALPHA_SWEEP_COLUMNS,
        rows=np.asarray(rows, dtype=float).reshape(-1, 3),
        meta={"r": r, "s": s, "t_max": t_max, "ratio": ratio, "functional": functional, "atoms": mu.size},
        labels=[f"finite horizon t <= {t_max:g}"],
        elapsed=time.perf_counter() - start,
    )


def crossover_alpha(table: ExperimentTable, level: float = 0.5) -> float:
    """Largest alpha whose kc_mass is at least `level`; nan when none is."""
    alphas = table.column("alpha")
    kc = table.column("kc_mass")
    hits = np.flatnonzero(kc >= level)
    return float(alphas[hits[-1]]) if hits.size else float("nan")


def sweep_measure(cfg: AlphaSweepConfig) -> DiscreteMeasure:
    """The measure an alpha-sweep config names: an oracle or a measure file."""
    if cfg.measure == "cantor":
        return cantor_measure(cfg.depth)
    if cfg.measure == "uniform":
        return uniform_measure((0.0, 1.0), cfg.n_atoms)
    if cfg.measure == "point":
        return DiscreteMeasure.from_atoms(np.arange(10.0), np.full(10, 0.1))
    path = Path(cfg.measure)
    if not path.exists():
        raise DomainError(f"measure {cfg.measure!r} is neither an oracle name nor an existing file")
    return DiscreteMeasure.load(path)


def run_alpha_sweep(cfg: AlphaSweepConfig) -> Tuple[ExperimentTable, float]:
    mu = sweep_measure(cfg)
    r = cfg.r
    if r is None:
        reference = cfg.reference_alpha if cfg.reference_alpha is not None else CANTOR_DIMENSION
        r = median_gamma(mu, reference, cfg.s, cfg.t_max, cfg.ratio, cfg.functional)
        logger.info(f"Threshold r={r:.6g} from the median gamma at alpha={reference:.4f}")
    table = alpha_sweep(mu, cfg.alphas, r, cfg.s, cfg.t_max, cfg.ratio, cfg.functional)
    table.meta.update({"measure": cfg.measure, "level": cfg.level})
    crossover = crossover_alpha(table, cfg.level)
    table.meta["crossover_alpha"] = crossover
    return table, crossover


def run_experiment(
    cfg: Union[WonderlandConfig, LimitPeriodicConfig, AlphaSweepConfig],
    output_dir: PathLike,
    jobs: Optional[int] = None,
) -> Tuple[ExperimentTable, List[Path]]:
    if isinstance(cfg, WonderlandConfig):
        table = wonderland_scan(cfg, jobs)
    elif isinstance(cfg, LimitPeriodicConfig):
        table = limit_periodic_scan(cfg, jobs)
    else:
        table, _ = run_alpha_sweep(cfg)
    paths = table.write(output_dir, cfg.model_dump(mode="json"))
    return table, paths


def _echo(cfg: Union[WonderlandConfig, LimitPeriodicConfig]) -> Dict[str, Any]:
    meta: Dict[str, Any] = {"kind": cfg.kind, "N": cfg.N, "psi": cfg.psi if isinstance(cfg.psi, str) else "explicit", "seed": cfg.seed}
    meta.update({f"estimator.{k}": v for k, v in cfg.estimator.model_dump().items() if v is not None})
    if isinstance(cfg, WonderlandConfig):
        meta.update({"a_hash": spec_hash(cfg.a), "b_hash": spec_hash(cfg.b), "a": cfg.a.variant, "b": cfg.b.variant})
        meta.update({"r": cfg.shared_bound, "a_r": cfg.a.r, "b_r": cfg.b.r})
    else:
        meta.update({"series_hash": spec_hash(cfg.series), "depths": cfg.depths})
    return meta
