import math

import numpy as np
import pytest
from pydantic import ValidationError

from spectrafrac.core.experiments import (
    AlphaSweepConfig,
    EstimatorParams,
    ExperimentTable,
    LimitPeriodicConfig,
    WonderlandConfig,
    alpha_sweep,
    crossover_alpha,
    default_config_path,
    estimate_dims,
    floored_window,
    limit_periodic_scan,
    parse_experiment,
    run_alpha_sweep,
    run_experiment,
    wonderland_scan,
)
from spectrafrac.core.executor import task_seed
from spectrafrac.dims.measures import DiscreteMeasure, uniform_measure
from spectrafrac.exceptions import DomainError
from spectrafrac.operators.potentials import (
    LimitPeriodicPotential,
    PeriodicPotential,
    RandomPotential,
    SamplingFunction,
    SamplingTerm,
    zero_potential,
)
from spectrafrac.operators.spectral import SpectralRequest, spectral_measure
from spectrafrac.utils.io import read_csv, read_json

CANTOR = math.log(2) / math.log(3)


def small_estimator() -> EstimatorParams:
    return EstimatorParams(n_sample=50, edge_margin=0.4)


class TestBundledConfigs:
    @pytest.mark.parametrize("name,cls", [
        ("wonderland", WonderlandConfig),
        ("limit-periodic", LimitPeriodicConfig),
        ("alpha-sweep", AlphaSweepConfig),
    ])
    def test_parse(self, name, cls):
        cfg = parse_experiment(read_json(default_config_path(name)))
        assert isinstance(cfg, cls)

    def test_unknown_name(self):
        with pytest.raises(DomainError):
            default_config_path("hofstadter")

    def test_limit_periodic_series_shape(self):
        cfg = parse_experiment(read_json(default_config_path("limit-periodic")))
        assert cfg.series.g.max_depth == 6
        assert cfg.series.g.tail_norm(2) == pytest.approx(sum(2.0 ** -k for k in range(3, 7)))


class TestConfigValidation:
    def test_estimator_window_order(self):
        with pytest.raises(ValidationError):
            EstimatorParams(eps_min=0.5, eps_max=0.1)

    def test_grid_must_be_sorted_unit_values(self):
        with pytest.raises(ValidationError):
            WonderlandConfig(grid=[0.5, 0.25])
        with pytest.raises(ValidationError):
            WonderlandConfig(grid=[0.0, 1.5])

    def test_depths_strictly_increasing(self):
        cfg = parse_experiment(read_json(default_config_path("limit-periodic")))
        with pytest.raises(ValidationError):
            LimitPeriodicConfig(series=cfg.series, depths=[2, 2])

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            parse_experiment({"kind": "hofstadter"})


class TestFlooredWindow:
    def test_below_floor_is_unchanged(self):
        mu = uniform_measure((0.0, 1.0), 10_000)
        assert floored_window(mu, 0.05, 0.5, 10.0) == (0.05, 0.5)

    def test_floor_inside_window(self):
        mu = uniform_measure((0.0, 1.0), 1000)
        lo, hi = floored_window(mu, 0.05, 0.5, 100.0)
        assert lo == pytest.approx(0.1) and hi == 0.5

    def test_window_shifted_up(self, ten_atoms):
        lo, hi = floored_window(ten_atoms, 0.05, 0.5, 10.0)
        assert lo == pytest.approx(10.0) and hi == pytest.approx(100.0)

    def test_zero_factor(self, ten_atoms):
        assert floored_window(ten_atoms, 0.05, 0.5, 0.0) == (0.05, 0.5)


class TestAlphaSweep:
    def test_crossover(self):
        table = ExperimentTable(
            name="alpha_sweep",
            columns=["alpha", "kc_mass", "ks_mass"],
            rows=np.array([[0.2, 1.0, 0.0], [0.4, 0.6, 0.4], [0.6, 0.3, 0.7]]),
        )
        assert crossover_alpha(table) == 0.4
        assert crossover_alpha(table, level=0.2) == 0.6
        assert math.isnan(crossover_alpha(table, level=1.0 + 1e-9))

    def test_pure_point_stays_singular(self, ten_atoms):
        table = alpha_sweep(ten_atoms, [0.8, 0.5], r=0.25, s=1.0, t_max=1e6)
        assert table.column("alpha").tolist() == [0.5, 0.8]
        assert np.all(table.column("ks_mass") >= 0.99)

    def test_lebesgue_stays_continuous(self):
        table = alpha_sweep(uniform_measure((0.0, 1.0), 100_000), [0.2, 0.5], r=3.0, s=10.0, t_max=1e4)
        assert np.all(table.column("kc_mass") >= 0.99)

    def test_point_oracle_config(self):
        table, crossover = run_alpha_sweep(AlphaSweepConfig(measure="point", alphas=[0.5, 0.8], r=0.25, t_max=1e6))
        assert math.isnan(crossover)
        assert table.meta["measure"] == "point"

    def test_cantor_crossover_near_dimension(self):
        cfg = parse_experiment(read_json(default_config_path("alpha-sweep")))
        table, crossover = run_alpha_sweep(cfg)
        assert crossover == pytest.approx(CANTOR, abs=0.05)
        kc = table.column("kc_mass")
        assert np.all(np.diff(kc) <= 1e-12)

    def test_measure_file(self, tmp_path):
        path = DiscreteMeasure.from_atoms(np.arange(10.0), np.full(10, 0.1)).save_csv(tmp_path / "atoms.csv")
        _, crossover = run_alpha_sweep(AlphaSweepConfig(measure=str(path), alphas=[0.5], r=0.25, t_max=1e6))
        assert math.isnan(crossover)

    def test_missing_measure(self, tmp_path):
        with pytest.raises(DomainError):
            run_alpha_sweep(AlphaSweepConfig(measure=str(tmp_path / "nope.csv"), alphas=[0.5], r=1.0))


class TestWonderland:
    def test_worker_count_does_not_change_rows(self):
        cfg = WonderlandConfig(N=201, grid=[0.0, 0.5, 1.0], estimator=small_estimator())
        serial = wonderland_scan(cfg, jobs=1)
        parallel = wonderland_scan(cfg, jobs=2)
        assert np.array_equal(serial.rows, parallel.rows)
        assert serial.column("lam").tolist() == [0.0, 0.5, 1.0]
        assert len(serial.labels) == 2

    def test_writes_table_and_manifest(self, tmp_path):
        cfg = WonderlandConfig(N=201, grid=[0.0, 1.0], estimator=small_estimator())
        table, paths = run_experiment(cfg, tmp_path)
        assert [p.name for p in paths] == ["wonderland.csv", "manifest.json"]
        meta, columns, rows = read_csv(paths[0])
        assert columns == table.columns
        assert rows.shape == (2, len(table.columns))
        assert "surrogate" in meta["labels"]
        assert read_json(paths[1])["parameters"]["N"] == 201

    @pytest.mark.slow
    def test_canonical_profile(self):
        cfg = parse_experiment(read_json(default_config_path("wonderland")))
        table = wonderland_scan(cfg.model_copy(update={"grid": [0.0, 1.0]}), jobs=2)
        free_dim_p = table.column("dim_P_lower")[0]
        random_dim_h = table.column("dim_H_upper")[1]
        assert free_dim_p >= 0.9
        assert random_dim_h <= 0.2
        assert free_dim_p > random_dim_h


class TestLimitPeriodic:
    def test_deepest_approximant_is_the_series(self):
        base = parse_experiment(read_json(default_config_path("limit-periodic")))
        cfg = base.model_copy(update={"N": 201, "depths": [0, 6], "estimator": small_estimator()})
        table = limit_periodic_scan(cfg)
        assert table.column("period").tolist() == [1.0, 64.0]
        assert table.column("tail_norm")[-1] == 0.0
        assert table.column("levy_to_full")[-1] == 0.0
        assert table.column("tail_norm")[0] == pytest.approx(sum(2.0 ** -k for k in range(1, 7)))

    def test_zero_series_matches_free_operator(self):
        series = LimitPeriodicPotential(
            g=SamplingFunction(terms=[SamplingTerm(depth=1, table=[0.0, 0.0]), SamplingTerm(depth=2, table=[0.0] * 4)]),
            kappa=[0, 1],
        )
        cfg = LimitPeriodicConfig(series=series, depths=[0, 1, 2], N=201, estimator=small_estimator())
        table = limit_periodic_scan(cfg)
        free = spectral_measure(SpectralRequest(spec=zero_potential(), N=201)).measure
        assert table.column("period").tolist() == [1.0, 2.0, 4.0]
        assert np.all(table.column("tail_norm") == 0.0)
        assert np.all(table.column("levy_to_full") == 0.0)
        for index in range(3):
            report, _ = estimate_dims(free, cfg.estimator, task_seed(cfg.seed, index))
            assert table.column("dim_H_upper")[index] == pytest.approx(report.dim_H_upper, abs=1e-12)
            assert table.column("dim_P_lower")[index] == pytest.approx(report.dim_P_lower, abs=1e-12)
            assert table.column("support_width")[index] == pytest.approx(free.positions[-1] - free.positions[0])

    @pytest.mark.slow
    def test_small_period_two_term_stays_continuous(self):
        series = LimitPeriodicPotential(g=SamplingFunction.single([0.02, -0.02]), kappa=[0])
        cfg = LimitPeriodicConfig(series=series, depths=[1], N=2001)
        table = limit_periodic_scan(cfg, jobs=1)
        assert table.column("dim_P_lower")[0] >= 0.9


class TestWonderlandBound:
    def test_default_bound_is_the_larger_endpoint_bound(self):
        cfg = WonderlandConfig()
        assert cfg.shared_bound == 10.0

    def test_declared_bound_must_cover_both_endpoints(self):
        with pytest.raises(ValidationError):
            WonderlandConfig(r=5.0)
        with pytest.raises(ValidationError):
            WonderlandConfig(a=PeriodicPotential(cell=[3.0]), b=RandomPotential(seed=0, bound=2.0), r=2.5)
        assert WonderlandConfig(r=12.0).shared_bound == 12.0

    def test_bounds_are_recorded(self):
        cfg = WonderlandConfig(N=201, grid=[0.5], r=12.0, estimator=small_estimator())
        table = wonderland_scan(cfg, jobs=1)
        assert table.meta["r"] == 12.0
        assert table.meta["a_r"] == 0.0
        assert table.meta["b_r"] == 10.0
