import csv
from fractions import Fraction
from math import factorial

import numpy as np
import pytest
import sympy as sp

from cramer_wold.bump import (build_bump, certify_derivative_bound, derivative_bound, end_derivatives,
                              eval_psi, fd_partial, normalizer, one_sided_derivative, seam_check,
                              write_profile_csv)
from cramer_wold.errors import InvalidArgument
from cramer_wold.measures import MultiIndex

t_sym, s_sym = sp.symbols("t s")


def sympy_v(p: int):
    """Oracle: the normalized incomplete integral of (s(1-s))^p."""
    integrand = (s_sym * (1 - s_sym)) ** p
    return sp.integrate(integrand, (s_sym, 0, t_sym)) / sp.integrate(integrand, (s_sym, 0, 1))


class TestConstruction:
    def test_order_one(self):
        b = build_bump(1)
        assert b.a_p == Fraction(1, 6)
        assert b.v_coeffs[:4] == (0, 0, 3, -2)

    @pytest.mark.parametrize("p", range(1, 7))
    def test_normalizer(self, p):
        assert normalizer(p) == Fraction(factorial(p) ** 2, factorial(2 * p + 1))
        assert normalizer(p) == Fraction(str(sp.integrate((s_sym * (1 - s_sym)) ** p, (s_sym, 0, 1))))

    @pytest.mark.parametrize("p", range(1, 7))
    def test_coefficients_match_sympy(self, p):
        want = sp.Poly(sp.expand(sympy_v(p)), t_sym).all_coeffs()[::-1]
        got = list(build_bump(p).v_coeffs)
        got = got + [Fraction(0)] * (len(want) - len(got))
        assert [Fraction(str(w)) for w in want] == got[:len(want)]
        assert all(c == 0 for c in got[len(want):])

    @pytest.mark.parametrize("p", range(1, 7))
    def test_end_derivatives(self, p):
        ends = end_derivatives(build_bump(p))
        assert all(a == 0 and b == 0 for a, b in ends[:-1])
        a, b = ends[-1]
        assert a != 0 and b != 0

    @pytest.mark.parametrize("p", [0, 7])
    def test_rejects(self, p):
        with pytest.raises(InvalidArgument):
            build_bump(p)


class TestValues:
    def test_symmetry_point(self):
        # |x|^2 = 5/8 maps to y = 1/2
        assert eval_psi(build_bump(1), [np.sqrt(5 / 8)]) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("p", range(1, 7))
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_plateau_and_support(self, p, d):
        b = build_bump(p)
        rng = np.random.default_rng(p * 10 + d)
        x = rng.standard_normal((50, d))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        assert np.all(b(x * 0.49) == 1.0)
        assert np.all(b(x * 1.0) == 0.0)
        assert np.all(b(x * 1.7) == 0.0)
        vals = b(x * np.linspace(0.5, 1.0, 50)[:, None])
        assert np.all((vals >= 0) & (vals <= 1)) and np.all(np.diff(vals) <= 1e-15)

    @pytest.mark.parametrize("p", [1, 3, 6])
    def test_matches_sympy_profile(self, p):
        b = build_bump(p)
        v = sp.lambdify(t_sym, sympy_v(p), "mpmath")
        for r in np.linspace(0.5, 1.0, 11):
            y = (4 * r * r - 1) / 3
            assert b([r])[()] == pytest.approx(1 - float(v(sp.Float(y, 30))), abs=1e-13)


class TestFiniteDifferences:
    def test_closed_form_order_one(self):
        b = build_bump(1)
        x = np.linspace(0.52, 0.98, 40)[:, None]
        # psi = 1 - v(y), y = (4x^2 - 1)/3, v' = 6y(1-y), dy/dx = 8x/3
        y = (4 * x[:, 0] ** 2 - 1) / 3
        want = -16 * x[:, 0] * y * (1 - y)
        np.testing.assert_allclose(fd_partial(b, x, MultiIndex((1,))), want, atol=1e-6)

    def test_polynomial_exact(self):
        f = lambda z: z[:, 0] ** 3 * z[:, 1] ** 2  # noqa: E731
        x = np.array([[0.3, -0.7], [1.2, 0.4]])
        got = fd_partial(f, x, MultiIndex((2, 1)))
        np.testing.assert_allclose(got, 6 * x[:, 0] * 2 * x[:, 1], rtol=1e-8)

    @pytest.mark.parametrize("side", [1, -1])
    def test_one_sided_exp(self, side):
        # roundoff grows like eps / h^order at the finest level
        for order, rtol in enumerate([1e-15, 1e-11, 1e-8, 1e-4]):
            got = one_sided_derivative(np.exp, 0.3, order, side, levels=6)
            assert got == pytest.approx(np.exp(0.3), rel=rtol)

    def test_high_partial_rejected(self):
        with pytest.raises(InvalidArgument):
            fd_partial(build_bump(4), np.zeros((1, 1)), MultiIndex((4,)))


class TestCertification:
    @pytest.mark.parametrize("p", [1, 2, 3])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_all_partials(self, p, d):
        b = build_bump(p)
        for gamma in MultiIndex.all_up_to(d, p):
            rep = certify_derivative_bound(b, d, gamma, samples=100)
            assert rep.passed, rep

    def test_bound_formula(self):
        assert derivative_bound(1, 0) == pytest.approx(4 * 3 * 16 / 3 * (4 / 3) ** 4)
        assert derivative_bound(2, 1) / derivative_bound(2, 0) == pytest.approx(8.0)

    def test_rejects_large(self):
        with pytest.raises(InvalidArgument):
            certify_derivative_bound(build_bump(4), 1, (1,))
        with pytest.raises(InvalidArgument):
            certify_derivative_bound(build_bump(1), 2, (1, 1))


class TestSeams:
    @pytest.mark.parametrize("p", range(1, 7))
    @pytest.mark.parametrize("radius", [0.5, 1.0])
    def test_smooth(self, p, radius):
        b = build_bump(p)
        for order in range(min(p, 3) + 1):
            rep = seam_check(b, radius, order, direction=[1.0, 2.0, -2.0] if p % 2 else None)
            assert rep.passed, rep

    @pytest.mark.parametrize("p", [1, 2, 3])
    @pytest.mark.parametrize("radius", [0.5, 1.0])
    def test_detects_missing_order(self, p, radius):
        # a bump one order too rough has a jump in its p-th radial derivative
        rep = seam_check(build_bump(p - 1) if p > 1 else build_bump(1), radius, p if p > 1 else 2)
        assert not rep.passed

    def test_rejects(self):
        with pytest.raises(InvalidArgument):
            seam_check(build_bump(2), 0.7, 1)
        with pytest.raises(InvalidArgument):
            seam_check(build_bump(5), 1.0, 4)


def test_profile_csv(tmp_path):
    path = write_profile_csv(build_bump(2), tmp_path / "psi.csv", n=23)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["radius", "psi", "dpsi_dr"]
    assert len(rows) == 24
    assert float(rows[1][1]) == 1.0 and float(rows[-1][1]) == 0.0
