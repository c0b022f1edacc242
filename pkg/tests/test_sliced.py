import numpy as np
import pytest

from cramer_wold.errors import MomentViolation
from cramer_wold.measures import DiscreteMeasureND, moment_matched_pair, project
from cramer_wold.sliced import DirectionBudget, canonical, max_sliced, sliced_profile, sphere_directions
from cramer_wold.transport import w1_exact
from cramer_wold.zolotarev import zeta_p_1d

from conftest import random_probability

SMALL = DirectionBudget(n_directions=64, refinement_iters=20)


def grid_max(mu, nu, p, n=40000):
    ang = np.linspace(0.0, np.pi, n, endpoint=False)
    return max(sliced_profile(mu, nu, p, np.column_stack([np.cos(ang), np.sin(ang)])))


class TestDirections:
    def test_unit_and_prefix_stable(self):
        a = sphere_directions(3, 10, 4)
        b = sphere_directions(3, 50, 4)
        np.testing.assert_allclose(np.linalg.norm(b, axis=1), 1.0)
        assert np.array_equal(a, b[:10])

    def test_canonical_sign(self):
        assert canonical(np.array([0.0, -2.0, 1.0])).tolist()[1] > 0
        np.testing.assert_allclose(canonical(np.array([-3.0, 4.0])), [0.6, -0.8])


class TestExamples:
    def test_point_masses(self):
        v = np.array([1.0, 2.0, -2.0])
        r = max_sliced(DiscreteMeasureND.dirac([0, 0, 0]), DiscreteMeasureND.dirac(v), 1, SMALL)
        assert r.value == pytest.approx(3.0, rel=1e-12)
        np.testing.assert_allclose(np.abs(r.argmax_theta), np.abs(v) / 3.0, atol=1e-12)

    def test_identical(self, rng):
        mu = random_probability(rng, 5, 2)
        assert max_sliced(mu, mu, 1, SMALL).value == 0.0

    def test_line_shortcut(self):
        mu = DiscreteMeasureND([[0.0], [1.0]], [0.5, 0.5])
        nu = DiscreteMeasureND([[0.0], [2.0]], [0.5, 0.5])
        assert max_sliced(mu, nu).value == pytest.approx(0.5)

    def test_moment_violation(self, rng):
        mu, nu = random_probability(rng, 4, 2), random_probability(rng, 4, 2)
        with pytest.raises(MomentViolation):
            max_sliced(mu, nu, 2, SMALL)

    def test_seed7_grid_scan(self):
        mu, nu = moment_matched_pair(7, 2, 2, 6)
        r = max_sliced(mu, nu, 2)
        assert r.value == pytest.approx(grid_max(mu, nu, 2), abs=1e-6)


class TestProperties:
    def test_value_recomputes_at_argmax(self, rng):
        mu, nu = random_probability(rng, 6, 3), random_probability(rng, 6, 3)
        r = max_sliced(mu, nu, 1, SMALL)
        direct = zeta_p_1d(project(mu, r.argmax_theta) - project(nu, r.argmax_theta), 1)
        assert r.value == pytest.approx(direct, abs=1e-12)

    def test_deterministic(self, rng):
        mu, nu = random_probability(rng, 6, 3), random_probability(rng, 6, 3)
        a, b = max_sliced(mu, nu, 1, SMALL, seed=4), max_sliced(mu, nu, 1, SMALL, seed=4)
        assert a.value == b.value and np.array_equal(a.argmax_theta, b.argmax_theta)

    @pytest.mark.parametrize("seed", range(4))
    def test_monotone_in_budget(self, seed):
        rng = np.random.default_rng(seed)
        mu, nu = random_probability(rng, 5, 3), random_probability(rng, 5, 3)
        values = [max_sliced(mu, nu, 1, DirectionBudget(n, it, pairwise_differences=False), seed=1).value
                  for n, it in [(4, 2), (16, 2), (16, 8), (64, 8), (64, 30)]]
        assert all(b >= a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("p", [1, 2])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_lower_bound_soundness(self, p, seed):
        mu, nu = moment_matched_pair(seed, 2, p, 6)
        assert max_sliced(mu, nu, p).value >= grid_max(mu, nu, p, 10000) - 1e-6

    def test_below_transport_cost(self, rng):
        for _ in range(3):
            mu, nu = random_probability(rng, 6, 2), random_probability(rng, 6, 2)
            assert max_sliced(mu, nu, 1, SMALL).value < w1_exact(mu, nu).cost


class TestProfile:
    def test_single(self, rng):
        mu, nu = random_probability(rng, 4, 2), random_probability(rng, 4, 2)
        theta = np.array([0.6, 0.8])
        want = zeta_p_1d(project(mu, theta) - project(nu, theta), 1)
        assert sliced_profile(mu, nu, 1, [theta]) == [pytest.approx(want)]

    def test_antipodal(self):
        mu, nu = moment_matched_pair(5, 3, 2, 8)
        thetas = sphere_directions(0, 6, 3)
        a = sliced_profile(mu, nu, 2, thetas)
        b = sliced_profile(mu, nu, 2, -thetas)
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_profile_below_search(self, rng):
        mu, nu = random_probability(rng, 6, 3), random_probability(rng, 6, 3)
        budget = DirectionBudget(n_directions=32)
        prof = sliced_profile(mu, nu, 1, sphere_directions(9, 32, 3))
        assert max(prof) <= max_sliced(mu, nu, 1, budget, seed=9).value
