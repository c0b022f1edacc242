import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from cramer_wold.errors import InvalidArgument, ResourceLimit
from cramer_wold.measures import DiscreteMeasure1D, DiscreteMeasureND, embed, project
from cramer_wold.transport import cost_matrix, w1_1d, w1_exact

from conftest import random_probability


def lp_cost(mu: DiscreteMeasureND, nu: DiscreteMeasureND) -> float:
    """Independent oracle: the transport LP solved by HiGHS."""
    n, m = mu.size, nu.size
    C = cost_matrix(mu.points, nu.points)
    A = np.zeros((n + m, n * m))
    for i in range(n):
        A[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        A[n + j, j::m] = 1.0
    res = linprog(C.ravel(), A_eq=A, b_eq=np.concatenate([mu.weights, nu.weights]),
                  bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


class TestExamples:
    def test_identical(self, rng):
        mu = random_probability(rng, 6, 3)
        assert w1_exact(mu, mu).cost == pytest.approx(0.0, abs=1e-14)

    def test_single_pair(self):
        assert w1_exact(DiscreteMeasureND.dirac([0.0, 0.0]), DiscreteMeasureND.dirac([3.0, 4.0])).cost == 5.0

    def test_two_matchings_tie(self):
        mu = DiscreteMeasureND([[0.0, 0.0], [1.0, 1.0]], [0.5, 0.5])
        nu = DiscreteMeasureND([[1.0, 0.0], [0.0, 1.0]], [0.5, 0.5])
        assert w1_exact(mu, nu).cost == pytest.approx(1.0, rel=1e-14)

    def test_line_examples(self):
        assert w1_1d(DiscreteMeasure1D.dirac(0.0), DiscreteMeasure1D.dirac(1.0)) == pytest.approx(1.0)
        mu = DiscreteMeasure1D(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
        nu = DiscreteMeasure1D(np.array([0.0, 2.0]), np.array([0.5, 0.5]))
        assert w1_1d(mu, nu) == pytest.approx(0.5)


class TestPlan:
    @pytest.mark.parametrize("n,m,d", [(1, 5, 2), (7, 3, 1), (12, 12, 3), (20, 9, 4)])
    def test_marginals_and_cost(self, rng, n, m, d):
        mu, nu = random_probability(rng, n, d), random_probability(rng, m, d)
        plan = w1_exact(mu, nu)
        F = plan.matrix(mu.size, nu.size)
        assert F.min() >= 0.0
        np.testing.assert_allclose(F.sum(axis=1), mu.weights, atol=1e-10)
        np.testing.assert_allclose(F.sum(axis=0), nu.weights, atol=1e-10)
        assert plan.cost == pytest.approx(float(np.sum(F * cost_matrix(mu.points, nu.points))), rel=1e-12)

    def test_duality_certificate(self, rng):
        for _ in range(10):
            mu, nu = random_probability(rng, 9, 2), random_probability(rng, 11, 2)
            plan = w1_exact(mu, nu)
            C = cost_matrix(mu.points, nu.points)
            assert (C - plan.u[:, None] - plan.v[None, :]).min() >= -1e-9
            assert plan.dual_value == pytest.approx(plan.cost, abs=1e-9)

    def test_zero_weights_dropped(self):
        mu = DiscreteMeasureND([[0.0], [5.0]], [1.0, 0.0])
        nu = DiscreteMeasureND([[2.0], [9.0]], [1.0, 0.0])
        plan = w1_exact(mu, nu)
        assert plan.cost == pytest.approx(2.0)
        assert [(i, j) for i, j, _ in plan.flows] == [(0, 0)]

    @pytest.mark.parametrize("n,m,d", [(5, 5, 2), (10, 14, 3), (32, 32, 2)])
    def test_matches_lp(self, rng, n, m, d):
        for _ in range(5):
            mu, nu = random_probability(rng, n, d), random_probability(rng, m, d)
            assert w1_exact(mu, nu).cost == pytest.approx(lp_cost(mu, nu), rel=1e-9, abs=1e-12)


class TestErrors:
    def test_not_probability(self):
        with pytest.raises(InvalidArgument):
            w1_exact(DiscreteMeasureND([[0.0]], [0.5]), DiscreteMeasureND.dirac([1.0]))

    def test_negative_weight(self):
        m = DiscreteMeasureND([[0.0], [1.0]], [1.5, -0.5])
        with pytest.raises(InvalidArgument):
            w1_exact(m, DiscreteMeasureND.dirac([1.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgument):
            w1_exact(DiscreteMeasureND.dirac([0.0]), DiscreteMeasureND.dirac([0.0, 1.0]))

    def test_size_cap(self):
        n = 2049
        x = np.arange(2 * n, dtype=float).reshape(-1, 1)
        mu = DiscreteMeasureND(x[:n], np.full(n, 1.0 / n))
        nu = DiscreteMeasureND(x[n:], np.full(n, 1.0 / n))
        with pytest.raises(ResourceLimit):
            w1_exact(mu, nu)

    def test_line_not_probability(self):
        with pytest.raises(InvalidArgument):
            w1_1d(DiscreteMeasure1D.dirac(0.0, 0.5), DiscreteMeasure1D.dirac(1.0))


class TestMetric:
    @given(st.integers(0, 2**31 - 1))
    def test_axioms(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_probability(rng, int(rng.integers(1, 7)), 2) for _ in range(3))
        ab, ba = w1_exact(a, b).cost, w1_exact(b, a).cost
        assert ab == pytest.approx(ba, abs=1e-10)
        assert w1_exact(a, c).cost <= ab + w1_exact(b, c).cost + 1e-9

    def test_projection_contraction(self, rng):
        for _ in range(10):
            mu, nu = random_probability(rng, 8, 3), random_probability(rng, 8, 3)
            w = w1_exact(mu, nu).cost
            for _ in range(10):
                theta = rng.standard_normal(3)
                theta /= np.linalg.norm(theta)
                assert w1_1d(project(mu, theta), project(nu, theta)) <= w + 1e-12

    def test_line_route_agrees_with_flow(self, rng):
        for _ in range(100):
            n, m = rng.integers(1, 16, size=2)
            mu = DiscreteMeasure1D(rng.standard_normal(n), rng.dirichlet(np.ones(n)))
            nu = DiscreteMeasure1D(rng.standard_normal(m), rng.dirichlet(np.ones(m)))
            flow = w1_exact(embed(mu, True), embed(nu, True)).cost
            assert w1_1d(mu, nu) == pytest.approx(flow, rel=1e-9, abs=1e-14)
