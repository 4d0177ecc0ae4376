"""
Acceptance suite for spectrafrac

Each check is a property test on an analytic oracle or a finite-scale
reproduction, runnable through `spectrafrac validate`.
"""

import logging
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..dims.kernels import sandwich_violations, scaling_profile
from ..dims.local_dims import local_dim_bounds, measure_dims
from ..dims.measures import (
    DiscreteMeasure,
    arcsine_cdf,
    cantor_measure,
    levy_distance,
    levy_distance_to_cdf,
    random_measure,
    uniform_measure,
)
from ..dims.set_dims import SetRep, box_dimension, cantor_set, dimension_scan, hausdorff_value, transition_alpha
from ..exceptions import DomainError, SpectraFracError
from ..operators.potentials import (
    ExplicitPotential,
    OdometerState,
    RandomPotential,
    LimitPeriodicPotential,
    SamplingFunction,
    build_truncation,
    sample_potential,
    truncation_window,
    zero_potential,
)
from ..operators.spectral import SpectralRequest, spectral_measure, spectrum_support, tridiag_eigen
from ..utils.io import write_json
from .experiments import (
    CANTOR_DIMENSION,
    EstimatorParams,
    WonderlandConfig,
    alpha_sweep,
    crossover_alpha,
    median_gamma,
    wonderland_scan,
)

logger = logging.getLogger(__name__)

CheckOutcome = Tuple[bool, str]


@dataclass
class CheckResult:
    """Result of one acceptance check"""
    name: str
    passed: bool
    detail: str
    elapsed: float
    skipped: bool = False
    slow: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def check_sandwich(seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(1000):
        mu = random_measure(rng, int(rng.integers(1, 40)))
        ts = 10.0 ** rng.uniform(-1.0, 3.0, size=20)
        xs = np.where(rng.random(20) < 0.5, rng.choice(mu.positions, 20), rng.uniform(-1.5, 1.5, 20))
        for t, x in zip(ts, xs):
            violations += sandwich_violations(mu, [t], [x])
    return violations == 0, f"{violations} violations over 20000 (t, x) pairs"


def check_gamma_monotone(seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(200):
        mu = random_measure(rng, int(rng.integers(1, 30)))
        x = float(rng.choice(mu.positions)) if rng.random() < 0.7 else float(rng.uniform(-1, 1))
        profile = scaling_profile(mu, float(rng.uniform(0, 1)), x, s=0.5, t_max=500.0)
        tails = [profile.tail(s) for s in profile.t[::4]]
        for earlier, later in zip(tails, tails[1:]):
            violations += int(later.gamma_H > earlier.gamma_H) + int(later.gamma_P < earlier.gamma_P)
    return violations == 0, f"{violations} violations over 200 profiles"


def check_cantor_measure(seed: int) -> CheckOutcome:
    report = measure_dims(cantor_measure(14), seed=seed)
    ok = abs(report.dim_H_upper - CANTOR_DIMENSION) <= 0.05 and abs(report.dim_P_lower - CANTOR_DIMENSION) <= 0.05
    return ok, f"dim_H+={report.dim_H_upper:.4f} dim_P-={report.dim_P_lower:.4f} target {CANTOR_DIMENSION:.4f}"


def check_extremes(seed: int) -> CheckOutcome:
    atoms = DiscreteMeasure.from_atoms(np.arange(10.0), np.full(10, 0.1))
    point = measure_dims(atoms, seed=seed)
    lebesgue = measure_dims(uniform_measure((0.0, 1.0), 100_000), eps_min=1e-3, eps_max=1e-1, seed=seed)
    ok = max(point.dim_H_upper, point.dim_P_lower) <= 0.05 and min(lebesgue.dim_H_upper, lebesgue.dim_P_lower) >= 0.95
    return ok, (
        f"atoms ({point.dim_H_upper:.3f}, {point.dim_P_lower:.3f}), "
        f"Lebesgue ({lebesgue.dim_H_upper:.3f}, {lebesgue.dim_P_lower:.3f})"
    )


def check_set_dims(seed: int) -> CheckOutcome:
    box = box_dimension(cantor_set(10), [3.0 ** -j for j in range(2, 9)])
    unit = SetRep.interval(0.0, 1.0)
    lebesgue_ok = all(abs(hausdorff_value(unit, 1.0, d) - 1.0) <= d for d in (1.0 / 3.0, 0.1, 0.01))
    alphas = np.round(np.arange(0.0, 1.0001, 0.01), 2)
    ordering_ok = True
    for S, delta in ((cantor_set(10), 3.0 ** -6), (unit, 0.01), (SetRep.from_points([0.0, 0.5, 1.0]), 0.01)):
        a_h = transition_alpha(dimension_scan(S, alphas, delta, "hausdorff"))
        a_p = transition_alpha(dimension_scan(S, alphas, delta, "packing"))
        ordering_ok &= a_h <= a_p + 0.01 + 1e-12
    ok = abs(box - CANTOR_DIMENSION) <= 0.03 and lebesgue_ok and ordering_ok
    return ok, f"box={box:.4f}, h^1([0,1]) ok={lebesgue_ok}, dim_H <= dim_P ok={ordering_ok}"


def check_arcsine(seed: int) -> CheckOutcome:
    mu = spectral_measure(SpectralRequest(spec=zero_potential(), N=2001)).measure
    distance = levy_distance_to_cdf(mu, arcsine_cdf)
    rng = np.random.default_rng(seed)
    interior = mu.positions[np.abs(mu.positions) <= 1.0]
    points = rng.choice(interior, size=20, replace=False)
    worst = 0.0
    for x in points:
        est = local_dim_bounds(mu, float(x), 0.1, 0.4, 4)
        worst = max(worst, abs(est.d_lower - 1.0), abs(est.d_upper - 1.0))
    return distance <= 1e-2 and worst <= 0.1, f"Levy distance {distance:.2e}, worst interior exponent error {worst:.3f}"


def check_spectrum_support(seed: int) -> CheckOutcome:
    inside = True
    for i in range(50):
        low, high = spectrum_support(RandomPotential(seed=seed + i, bound=1.0), 200)
        inside &= -3.0 <= low and high <= 3.0
    low, high = spectrum_support(zero_potential(), 2001)
    edges_ok = abs(low + 2.0) <= 1e-3 and abs(high - 2.0) <= 1e-3
    return inside and edges_ok, f"random specs inside [-3, 3]: {inside}; free edges ({low:.6f}, {high:.6f})"


def check_continuity(seed: int) -> CheckOutcome:
    rng = np.random.default_rng(seed)
    N = 501
    start, stop = truncation_window(N)
    worst_levy, weyl_ok = 0.0, True
    for i in range(20):
        base = RandomPotential(seed=seed + 1000 + i, bound=1.0)
        values = sample_potential(base, (start, stop))
        perturbed = values + rng.uniform(-1e-3, 1e-3, size=N)
        a = ExplicitPotential(values=values.tolist(), origin=-start)
        b = ExplicitPotential(values=perturbed.tolist(), origin=-start)
        mu_a = spectral_measure(SpectralRequest(spec=a, N=N)).measure
        mu_b = spectral_measure(SpectralRequest(spec=b, N=N)).measure
        worst_levy = max(worst_levy, levy_distance(mu_a, mu_b))
        shift = np.max(np.abs(tridiag_eigen(build_truncation(a, N)).eigenvalues - tridiag_eigen(build_truncation(b, N)).eigenvalues))
        weyl_ok &= shift <= np.max(np.abs(perturbed - values)) + 1e-12
    return worst_levy <= 1e-2 and weyl_ok, f"worst Levy distance {worst_levy:.2e}, Weyl bound holds: {weyl_ok}"


def check_odometer(seed: int) -> CheckOutcome:
    for k in range(1, 11):
        period = 2 ** k
        spec = LimitPeriodicPotential(g=SamplingFunction.single(np.arange(period, dtype=float).tolist()), kappa=[0] * k)
        v = sample_potential(spec, (0, 2 * period))
        if not np.array_equal(v[:period], v[period:]):
            return False, f"depth {k}: not periodic with period {period}"
        if np.unique(v[:period]).size != period:
            return False, f"depth {k}: period smaller than {period}"
        kappa = OdometerState.from_int(int(np.random.default_rng(seed + k).integers(0, 2 ** 20)), 20)
        visited = []
        for _ in range(period):
            visited.append(kappa.cylinder(k))
            kappa = kappa.translate()
        if sorted(visited) != list(range(period)):
            return False, f"depth {k}: cylinders not visited exactly once"
    return True, "periods 2^k and cylinder visits exact for k <= 10"


def check_alpha_sweep(seed: int) -> CheckOutcome:
    cantor = cantor_measure(14)
    r = median_gamma(cantor, CANTOR_DIMENSION, 1.0, 3.0 ** 10)
    sweep = alpha_sweep(cantor, np.round(np.arange(0.40, 0.901, 0.01), 2), r, 1.0, 3.0 ** 10)
    crossover = crossover_alpha(sweep)
    point = DiscreteMeasure.from_atoms(np.arange(10.0), np.full(10, 0.1))
    pp = alpha_sweep(point, np.round(np.arange(0.1, 1.001, 0.1), 1), 0.25, 1.0, 1e6)
    lebesgue = alpha_sweep(uniform_measure((0.0, 1.0), 100_000), np.round(np.arange(0.1, 0.901, 0.1), 1), 3.0, 10.0, 1e4)
    ok = (
        abs(crossover - CANTOR_DIMENSION) <= 0.05
        and np.all(pp.column("ks_mass") >= 0.99)
        and np.all(lebesgue.column("kc_mass") >= 0.99)
    )
    return bool(ok), (
        f"Cantor crossover {crossover:.2f}, pure-point min ks {pp.column('ks_mass').min():.3f}, "
        f"Lebesgue min kc {lebesgue.column('kc_mass').min():.3f}"
    )


def check_wonderland(seed: int) -> CheckOutcome:
    cfg = WonderlandConfig(grid=[0.0, 1.0], seed=seed, estimator=EstimatorParams(edge_margin=0.4))
    table = wonderland_scan(cfg)
    free_p = float(table.column("dim_P_lower")[0])
    random_h = float(table.column("dim_H_upper")[-1])
    ok = free_p >= 0.9 and random_h <= 0.2 and free_p > random_h
    return ok, f"free dim_P-={free_p:.3f}, random dim_H+={random_h:.3f} (finite-scale)"


def _determinism_outputs(directory: Path, seed: int, jobs: int) -> List[bytes]:
    report = measure_dims(cantor_measure(10), n_sample=200, seed=seed)
    report.save_points_csv(directory / "points.csv")
    cfg = WonderlandConfig(grid=[0.0, 0.5, 1.0], N=201, seed=seed)
    wonderland_scan(cfg, jobs=jobs).save_csv(directory / "wonderland.csv")
    write_json(directory / "report.json", report.to_dict())
    return [(directory / name).read_bytes() for name in ("points.csv", "wonderland.csv", "report.json")]


def check_determinism(seed: int) -> CheckOutcome:
    with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
        a = _determinism_outputs(Path(first), seed, jobs=1)
        b = _determinism_outputs(Path(second), seed, jobs=2)
    same = a == b
    return same, "outputs byte-identical across runs and worker counts" if same else "outputs differ"


CHECKS: List[Tuple[str, Callable[[int], CheckOutcome], bool]] = [
    ("sandwich", check_sandwich, False),
    ("gamma-monotone", check_gamma_monotone, False),
    ("cantor-measure", check_cantor_measure, False),
    ("extremes", check_extremes, False),
    ("set-dims", check_set_dims, False),
    ("arcsine", check_arcsine, False),
    ("spectrum-support", check_spectrum_support, False),
    ("continuity", check_continuity, False),
    ("odometer", check_odometer, False),
    ("alpha-sweep", check_alpha_sweep, False),
    ("wonderland", check_wonderland, True),
    ("determinism", check_determinism, False),
]

CHECK_NAMES = [name for name, _, _ in CHECKS]


def run_acceptance(
    seed: int = 0,
    only: Optional[Sequence[str]] = None,
    skip_slow: bool = False,
    progress: Optional[Callable[[str], None]] = None,
) -> List[CheckResult]:
    unknown = sorted(set(only or []) - set(CHECK_NAMES))
    if unknown:
        raise DomainError(f"unknown checks: {', '.join(unknown)}")
    results = []
    for name, check, slow in CHECKS:
        if only and name not in only:
            continue
        if skip_slow and slow:
            results.append(CheckResult(name=name, passed=True, detail="skipped (slow)", elapsed=0.0, skipped=True, slow=True))
            continue
        if progress:
            progress(name)
        start_time = time.perf_counter()
        try:
            passed, detail = check(seed)
        except SpectraFracError as e:
            passed, detail = False, f"error: {e}"
        elapsed = time.perf_counter() - start_time
        logger.info(f"Check {name}: {'pass' if passed else 'FAIL'} in {elapsed:.2f}s ({detail})")
        results.append(CheckResult(name=name, passed=bool(passed), detail=detail, elapsed=elapsed, slow=slow))
    return results
