import numpy as np
import pytest

from spectrafrac.dims.measures import (
    DiscreteMeasure,
    RestrictionSet,
    arcsine_cdf,
    arcsine_density,
    ball_mass,
    cantor_measure,
    levy_distance,
    levy_distance_to_cdf,
    random_measure,
    restrict,
    uniform_measure,
)
from spectrafrac.exceptions import DomainError, ResourceLimitError


class TestDiscreteMeasure:
    def test_from_atoms_sorts_and_merges(self):
        mu = DiscreteMeasure.from_atoms([0.5, 0.1, 0.1 + 1e-14], [0.2, 0.3, 0.1])
        assert mu.positions.tolist() == [0.1, 0.5]
        assert mu.weights.tolist() == pytest.approx([0.4, 0.2])
        assert mu.total_mass == pytest.approx(0.6)

    def test_merges_against_first_atom_of_a_run(self):
        mu = DiscreteMeasure.from_atoms([0.0, 0.9e-12, 1.8e-12, 2.7e-12], [0.25] * 4)
        assert mu.positions.tolist() == [0.0, 1.8e-12]
        assert mu.weights.tolist() == pytest.approx([0.5, 0.5])

    def test_equality_compares_atoms(self):
        mu = DiscreteMeasure.from_atoms([0.0, 1.0], [0.5, 0.5])
        assert mu == DiscreteMeasure.from_atoms([1.0, 0.0], [0.5, 0.5])
        assert mu != DiscreteMeasure.from_atoms([0.0, 1.0], [0.25, 0.5])
        assert mu != DiscreteMeasure.point_mass(0.0)
        assert mu != "mu"

    def test_zero_weights_are_dropped(self):
        mu = DiscreteMeasure.from_atoms([0.0, 1.0], [0.0, 0.5])
        assert mu.size == 1

    def test_mass_above_one_rejected(self):
        with pytest.raises(DomainError):
            DiscreteMeasure.from_atoms([0.0, 1.0], [0.7, 0.7])

    def test_negative_weight_rejected(self):
        with pytest.raises(DomainError):
            DiscreteMeasure.from_atoms([0.0], [-0.1])

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(DomainError):
            DiscreteMeasure.from_atoms([0.0, 1.0], [0.5])

    def test_cdf_is_right_continuous(self):
        mu = DiscreteMeasure.from_atoms([0.0, 1.0], [0.25, 0.5])
        assert mu.cdf(0.0) == pytest.approx(0.25)
        assert mu.cdf_left(0.0) == 0.0
        assert mu.cdf(5.0) == pytest.approx(0.75)

    def test_median_spacing(self, ten_atoms):
        assert ten_atoms.median_spacing() == pytest.approx(1.0)
        assert DiscreteMeasure.point_mass(0.0).median_spacing() == 0.0

    def test_save_and_load_csv(self, tmp_path):
        mu = DiscreteMeasure.from_atoms([-1.0, 0.25, 3.0], [0.1, 0.2, 0.3])
        path = mu.save_csv(tmp_path / "mu.csv")
        assert path.read_text().startswith("# format=1")
        loaded = DiscreteMeasure.load(path)
        assert np.array_equal(loaded.positions, mu.positions)
        assert np.array_equal(loaded.weights, mu.weights)

    def test_load_json(self, tmp_path):
        mu = DiscreteMeasure.from_atoms([0.0, 2.0], [0.5, 0.5])
        loaded = DiscreteMeasure.load(mu.save_json(tmp_path / "mu.json"))
        assert loaded.atoms == mu.atoms


class TestBallMass:
    def test_ball_is_open(self):
        mu = DiscreteMeasure.from_atoms([0.0, 1.0], [0.5, 0.5])
        assert ball_mass(mu, 0.5, 0.5) == 0.0
        assert ball_mass(mu, 0.5, 0.5000001) == pytest.approx(1.0)

    def test_nonpositive_radius_rejected(self, ten_atoms):
        with pytest.raises(DomainError):
            ball_mass(ten_atoms, 0.0, 0.0)
        with pytest.raises(DomainError):
            ball_mass(ten_atoms, 0.0, -1.0)

    def test_monotone_in_radius(self, rng):
        for _ in range(50):
            mu = random_measure(rng, 20)
            x = rng.uniform(-1, 1)
            eps = np.sort(rng.uniform(1e-3, 2.0, size=10))
            masses = ball_mass(mu, x, eps)
            assert np.all(np.diff(masses) >= 0)
            assert masses[-1] <= mu.total_mass + 1e-12

    def test_empty_measure(self):
        assert ball_mass(DiscreteMeasure.empty(), 0.0, 1.0) == 0.0

    def test_cantor_ball_masses(self):
        mu = cantor_measure(8)
        for j in range(1, 8):
            assert ball_mass(mu, 0.0, 3.0 ** -j) == pytest.approx(2.0 ** -j)


class TestRestrict:
    def test_closed_and_open(self):
        mu = DiscreteMeasure.from_atoms([0.0, 1.0, 2.0], [0.2, 0.3, 0.4])
        assert restrict(mu, RestrictionSet.of((0.0, 1.0))).total_mass == pytest.approx(0.5)
        assert restrict(mu, RestrictionSet.of((0.0, 1.0), closed=False)).size == 0
        assert restrict(mu, RestrictionSet.of((-1.0, 0.5), (1.5, 3.0))).total_mass == pytest.approx(0.6)

    def test_empty_set_gives_empty_measure(self, ten_atoms):
        assert restrict(ten_atoms, RestrictionSet()).size == 0

    def test_overlapping_intervals_rejected(self):
        with pytest.raises(DomainError):
            RestrictionSet.of((0.0, 2.0), (1.0, 3.0))

    def test_idempotent(self, rng):
        region = RestrictionSet.of((0.0, 1.0 / 3.0))
        once = restrict(cantor_measure(4), region)
        assert restrict(once, region) == once
        mu = random_measure(rng, 40)
        for closed in (True, False):
            region = RestrictionSet.of((-0.6, -0.1), (0.2, 0.7), closed=closed)
            assert restrict(restrict(mu, region), region) == restrict(mu, region)

    def test_restriction_is_sub_measure(self, rng):
        mu = random_measure(rng, 50)
        part = restrict(mu, RestrictionSet.of((-0.5, 0.5)))
        assert part.total_mass <= mu.total_mass
        assert np.all(np.isin(part.positions, mu.positions))


class TestLevyDistance:
    def test_zero_on_identical(self, rng):
        mu = random_measure(rng, 30)
        assert levy_distance(mu, mu) == 0.0

    def test_shifted_point_masses(self):
        a = DiscreteMeasure.point_mass(0.0)
        b = DiscreteMeasure.point_mass(0.3)
        assert levy_distance(a, b) == pytest.approx(0.3, abs=1e-9)
        assert levy_distance(b, a) == pytest.approx(0.3, abs=1e-9)

    def test_bounded_by_larger_mass(self, rng):
        for _ in range(20):
            mu, nu = random_measure(rng, 10), random_measure(rng, 10)
            d = levy_distance(mu, nu)
            assert 0.0 <= d <= max(mu.total_mass, nu.total_mass) + 1e-12
            assert d == pytest.approx(levy_distance(nu, mu), abs=1e-9)

    def test_triangle_inequality(self, rng):
        for _ in range(50):
            a, b, c = (random_measure(rng, int(rng.integers(1, 20)), mass=1.0) for _ in range(3))
            assert levy_distance(a, c) <= levy_distance(a, b) + levy_distance(b, c) + 1e-9

    def test_translation_bound(self, rng):
        mu = random_measure(rng, 25)
        for delta in (1e-3, 0.05, 0.4):
            assert levy_distance(mu, mu.translate(delta)) <= delta + 1e-9

    def test_cantor_depths_converge(self):
        for k in range(1, 9):
            assert levy_distance(cantor_measure(k + 1), cantor_measure(k)) <= 3.0 ** -k + 1e-9

    def test_uniform_against_lebesgue(self):
        mu = uniform_measure((0.0, 1.0), 1000)
        assert levy_distance_to_cdf(mu, lambda x: np.clip(x, 0.0, 1.0)) <= 1e-3


class TestOracles:
    def test_cantor_measure(self):
        mu = cantor_measure(8)
        assert mu.size == 256
        assert mu.total_mass == pytest.approx(1.0)
        assert mu.positions[0] == 0.0 and mu.positions[-1] < 1.0

    def test_cantor_depth_limits(self):
        with pytest.raises(DomainError):
            cantor_measure(0)
        with pytest.raises(ResourceLimitError):
            cantor_measure(25)

    def test_uniform_measure(self):
        mu = uniform_measure((0.0, 2.0), 4)
        assert mu.positions.tolist() == pytest.approx([0.25, 0.75, 1.25, 1.75])
        assert mu.total_mass == pytest.approx(1.0)
        with pytest.raises(DomainError):
            uniform_measure((1.0, 1.0), 4)

    def test_arcsine(self):
        assert arcsine_cdf(-2.0) == pytest.approx(0.0)
        assert arcsine_cdf(0.0) == pytest.approx(0.5)
        assert arcsine_cdf(3.0) == pytest.approx(1.0)
        assert arcsine_density(np.array([0.0]))[0] == pytest.approx(1.0 / (2.0 * np.pi))
        assert arcsine_density(np.array([2.5]))[0] == 0.0
