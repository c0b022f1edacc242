"""
Piecewise polynomials on the real line.

Every piece is stored in its *local* variable ``tau = x - knots[k]`` so that
evaluation and integration never see large absolute coordinates. The function
is identically zero outside ``[knots[0], knots[-1]]``.

Absolute integrals are exact up to root tolerance: real roots inside each
piece are isolated with a Descartes-rule / bisection recursion, and |P| is
integrated between consecutive roots with the exact antiderivative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

ROOT_WIDTH = 1e-13
# coefficients below this fraction of the largest one count as zero in sign tests
ZERO_RTOL = 1e-14


def taylor_shift(c: np.ndarray, s: float) -> np.ndarray:
    """Coefficients of ``P(x + s)`` given ascending coefficients of ``P``."""
    a = np.array(c, dtype=float, copy=True)
    n = a.size
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += s * a[j + 1]
    return a


def trim(c: np.ndarray) -> np.ndarray:
    """Drop trailing coefficients that are negligible against the largest."""
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return np.zeros(1)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(c) > ZERO_RTOL * scale)[0]
    return c[: keep[-1] + 1]


def sign_variations(c: np.ndarray) -> int:
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return 0
    nz = c[np.abs(c) > ZERO_RTOL * scale]
    return int(np.count_nonzero(np.signbit(nz[1:]) != np.signbit(nz[:-1])))


def descartes_bound(c: np.ndarray, a: float, b: float) -> int:
    """Upper bound (same parity) on the number of roots of ``P`` in ``(a, b)``."""
    q = taylor_shift(c, a)
    q = q * (b - a) ** np.arange(q.size)
    # (1+z)^n Q(1/(1+z)): reverse, then shift by one
    r = taylor_shift(q[::-1], 1.0)
    return sign_variations(r)


def _bisect(c: np.ndarray, a: float, b: float, fa: float) -> float:
    while b - a > ROOT_WIDTH:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = npoly.polyval(m, c)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def real_roots(c: np.ndarray, a: float, b: float) -> list[float]:
    """Sorted real roots of ``P`` strictly inside ``(a, b)``.

    Clusters narrower than ``ROOT_WIDTH`` (multiple roots, float noise around
    a double root) are reported once, at their midpoint.
    """
    c = trim(c)
    deg = c.size - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -c[0] / c[1]
        return [r] if a < r < b else []
    roots: list[float] = []
    stack = [(a, b)]
    while stack:
        lo, hi = stack.pop()
        v = descartes_bound(c, lo, hi)
        if v == 0:
            continue
        flo, fhi = npoly.polyval(lo, c), npoly.polyval(hi, c)
        if v == 1 and flo * fhi < 0.0:
            roots.append(_bisect(c, lo, hi, flo))
            continue
        if hi - lo <= ROOT_WIDTH:
            roots.append(0.5 * (lo + hi))
            continue
        mid = 0.5 * (lo + hi)
        if npoly.polyval(mid, c) == 0.0:
            roots.append(mid)
        stack.append((mid, hi))
        stack.append((lo, mid))
    return sorted(r for r in roots if a < r < b)


def abs_integral(c: np.ndarray, length: float) -> float:
    """Exact ``int_0^length |P(tau)| dtau``."""
    c = trim(c)
    if length <= 0.0 or not np.any(c):
        return 0.0
    anti = npoly.polyint(c)
    cuts = [0.0, *real_roots(c, 0.0, length), length]
    vals = npoly.polyval(np.asarray(cuts), anti)
    return float(np.sum(np.abs(np.diff(vals))))


def _abs_integral_linear(v0: np.ndarray, v1: np.ndarray, length: np.ndarray) -> np.ndarray:
    """Vectorised ``int |linear|`` for segments with end values v0, v1."""
    a0, a1 = np.abs(v0), np.abs(v1)
    same = (v0 >= 0) == (v1 >= 0)
    denom = np.where(same, 1.0, a0 + a1)
    denom = np.where(denom == 0.0, 1.0, denom)
    crossing = (v0 * v0 + v1 * v1) / (2.0 * denom)
    return length * np.where(same, 0.5 * (a0 + a1), crossing)


@dataclass(frozen=True)
class PiecewisePoly:
    """Piecewise polynomial, zero outside ``[knots[0], knots[-1]]``.

    ``coeffs[k]`` holds ascending coefficients of the piece on
    ``[knots[k], knots[k+1]]`` in the variable ``x - knots[k]``.
    """

    knots: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if knots.ndim != 1 or coeffs.shape[0] != max(knots.size - 1, 0):
            raise ValueError("need one coefficient row per interval between knots")
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be sorted")
        knots.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.knots)

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def segment_integrals(self) -> np.ndarray:
        """Signed integral of each piece over its own interval."""
        L = self.lengths
        powers = L[:, None] ** np.arange(1, self.degree + 2)[None, :]
        return np.sum(self.coeffs * powers / np.arange(1, self.degree + 2), axis=1)

    def integrate(self) -> "PiecewisePoly":
        """Antiderivative vanishing at ``knots[0]``, continuous across knots.

        The tail right of the last knot is dropped (callers guarantee it is
        zero, e.g. through vanishing moments).
        """
        if self.coeffs.shape[0] == 0:
            return PiecewisePoly(self.knots, np.zeros((0, self.degree + 2)))
        start = np.concatenate(([0.0], np.cumsum(self.segment_integrals())[:-1]))
        higher = self.coeffs / np.arange(1, self.degree + 2)
        return PiecewisePoly(self.knots, np.column_stack([start, higher]))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.coeffs.shape[0] == 0:
            return out
        inside = (x >= self.knots[0]) & (x <= self.knots[-1])
        k = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, self.coeffs.shape[0] - 1)
        tau = x - self.knots[k]
        vals = np.zeros_like(x)
        for j in range(self.degree, -1, -1):
            vals = vals * tau + self.coeffs[k, j]
        out[inside] = vals[inside]
        return out

    def abs_integral(self) -> float:
        """Exact ``int |f|`` over the real line."""
        if self.coeffs.shape[0] == 0:
            return 0.0
        L = self.lengths
        c = self.coeffs
        if self.degree == 0:
            return float(np.sum(np.abs(c[:, 0]) * L))
        if self.degree == 1:
            return float(np.sum(_abs_integral_linear(c[:, 0], c[:, 0] + c[:, 1] * L, L)))
        return float(sum(abs_integral(c[k], L[k]) for k in range(c.shape[0]) if L[k] > 0))

