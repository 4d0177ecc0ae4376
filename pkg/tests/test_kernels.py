import numpy as np
import pytest

from spectrafrac.dims.kernels import (
    geometric_grid,
    horizon_for,
    sandwich_violations,
    scaling_profile,
    tent_eval,
    tent_integrals,
    tent_table,
    v_t,
)
from spectrafrac.dims.measures import DiscreteMeasure, random_measure
from spectrafrac.exceptions import DomainError, ResourceLimitError


def test_tent_eval_shape():
    assert tent_eval(2.0, 0.0, 0.0) == 1.0
    assert tent_eval(2.0, 0.0, 0.5) == 1.0
    assert tent_eval(2.0, 0.0, 0.75) == pytest.approx(0.5)
    assert tent_eval(2.0, 0.0, -1.0) == 0.0
    assert tent_eval(2.0, 0.0, 3.0) == 0.0


def test_tent_eval_rejects_nonpositive_t():
    with pytest.raises(DomainError):
        tent_eval(0.0, 0.0, 0.0)


def test_v_t_matches_direct_sum(rng):
    for _ in range(50):
        mu = random_measure(rng, int(rng.integers(1, 40)))
        t = float(10 ** rng.uniform(-0.5, 2.0))
        x = float(rng.uniform(-1.2, 1.2))
        direct = float(np.sum(mu.weights * tent_eval(t, x, mu.positions)))
        assert v_t(mu, t, x) == pytest.approx(direct, abs=1e-12)


def test_sandwich_holds_on_random_measures(rng):
    for _ in range(100):
        mu = random_measure(rng, int(rng.integers(1, 30)))
        ts = 10.0 ** rng.uniform(-1.0, 3.0, size=10)
        xs = np.concatenate([mu.positions[:5], rng.uniform(-1.5, 1.5, size=5)])
        assert sandwich_violations(mu, ts, xs) == 0


def test_sandwich_catches_a_broken_tent_integral(monkeypatch):
    mu = DiscreteMeasure.from_atoms([0.0, 0.2, 0.5], [0.3, 0.3, 0.4])
    xs = np.array([0.0, 0.1, 0.3])
    assert sandwich_violations(mu, [3.0], xs) == 0
    monkeypatch.setattr(DiscreteMeasure, "range_moment", lambda self, lo, hi: np.full(np.shape(lo), 1e6))
    assert sandwich_violations(mu, [3.0], xs) > 0


def test_sandwich_on_empty_measure():
    assert sandwich_violations(DiscreteMeasure.empty(), [1.0, 10.0], [0.0, 0.5]) == 0


def test_tent_table_rows_follow_t():
    mu = DiscreteMeasure.from_atoms([0.0, 1.0], [0.5, 0.5])
    table = tent_table(mu, np.array([0.5, 4.0]), np.array([0.0]))
    assert table.shape == (2, 1)
    assert table[0, 0] == pytest.approx(1.0)
    assert table[1, 0] == pytest.approx(0.5)


def test_tent_integrals_empty_measure():
    assert np.all(tent_integrals(DiscreteMeasure.empty(), 3.0, np.array([0.0, 1.0])) == 0.0)


class TestGeometricGrid:
    def test_powers_of_two(self):
        assert geometric_grid(1.0, 16.0, 2.0).tolist() == [1.0, 2.0, 4.0, 8.0, 16.0]

    def test_stays_below_t_max(self):
        ts = geometric_grid(1.0, 100.0, 2.0 ** 0.25)
        assert ts[-1] <= 100.0 and ts[-1] * 2.0 ** 0.25 > 100.0

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            geometric_grid(5.0, 1.0)
        with pytest.raises(DomainError):
            geometric_grid(1.0, 10.0, 1.0)
        with pytest.raises(ResourceLimitError):
            geometric_grid(1e-10, 1e10, 1.0 + 1e-6)


def test_horizon_clamped_by_resolution():
    assert horizon_for(1e6, None) == 1e6
    assert horizon_for(1e6, 1e-3) == pytest.approx(200.0)
    assert horizon_for(10.0, 1e-3) == 10.0


class TestScalingProfile:
    def test_point_mass(self):
        mu = DiscreteMeasure.point_mass(0.0)
        profile = scaling_profile(mu, 0.5, 0.0, s=1.0, t_max=256.0, ratio=2.0)
        assert np.all(profile.v == 1.0)
        assert profile.gamma_H == pytest.approx(16.0)
        assert profile.gamma_P == pytest.approx(1.0)
        assert profile.t_at_gamma_H == 256.0 and profile.t_at_gamma_P == 1.0

    def test_alpha_zero_gives_ball_like_values(self):
        mu = DiscreteMeasure.from_atoms([0.0, 0.1], [0.5, 0.5])
        profile = scaling_profile(mu, 0.0, 0.0, s=1.0, t_max=100.0)
        assert profile.gamma_H == pytest.approx(1.0)
        assert profile.gamma_P == pytest.approx(0.5)

    def test_alpha_out_of_range(self):
        with pytest.raises(DomainError):
            scaling_profile(DiscreteMeasure.point_mass(0.0), 1.5, 0.0, 1.0, 10.0)

    def test_tails_are_monotone(self, rng):
        for _ in range(50):
            mu = random_measure(rng, 15)
            profile = scaling_profile(mu, float(rng.uniform()), float(rng.choice(mu.positions)), 0.5, 500.0)
            tails = [profile.tail(s) for s in profile.t[::3]]
            for earlier, later in zip(tails, tails[1:]):
                assert later.gamma_H <= earlier.gamma_H
                assert later.gamma_P >= earlier.gamma_P

    def test_tail_past_horizon(self):
        profile = scaling_profile(DiscreteMeasure.point_mass(0.0), 0.5, 0.0, 1.0, 10.0)
        with pytest.raises(DomainError):
            profile.tail(100.0)

    def test_save_csv(self, tmp_path):
        profile = scaling_profile(DiscreteMeasure.point_mass(0.0), 0.5, 0.0, 1.0, 16.0, ratio=2.0)
        text = profile.save_csv(tmp_path / "profile.csv").read_text()
        assert "# t,v,scaled" in text
        assert len([line for line in text.splitlines() if not line.startswith("#")]) == 5
