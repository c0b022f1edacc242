"""
A C^p radial cutoff: 1 on the ball of radius 1/2, 0 outside the unit ball.

    v(t)   = (1 / A_p) * int_0^t (s (1 - s))^p ds,   A_p = p!^2 / (2p + 1)!,
    psi(x) = 1 - v((4 |x|^2 - 1) / 3)   for 1/2 <= |x| <= 1.

The coefficients of ``v`` are kept as exact rationals and only converted to
floats for evaluation. Derivative bounds are certified by finite differences
with Richardson extrapolation; smoothness across the two seams is checked by
one-sided differences along rays.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .measures import MultiIndex, _as_multi_index

MAX_ORDER = 6
MAX_CERT_ORDER = 3
MAX_CERT_DIM = 3
FD_BASE_STEP = 1e-2
FD_LEVELS = 4
FD_SLACK = 1.1
SEAM_LEVELS = 6  # one-sided differences carry every power of h, so need more levels
SEAM_RTOL = 1e-4

# central stencils (offsets in units of h) for derivative orders 0..3, error O(h^2)
_CENTRAL = {
    0: ({0: 1.0}),
    1: ({-1: -0.5, 1: 0.5}),
    2: ({-1: 1.0, 0: -2.0, 1: 1.0}),
    3: ({-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}),
}


@dataclass(frozen=True)
class BumpFunction:
    p: int
    a_p: Fraction
    v_coeffs: tuple[Fraction, ...] = field(repr=False)  # ascending powers of t

    @property
    def v_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.v_coeffs])

    def v(self, t) -> np.ndarray:
        """``v`` extended by 0 left of 0 and by 1 right of 1."""
        t = np.asarray(t, dtype=float)
        c = self.v_float
        lo = np.clip(t, 0.0, 1.0)
        # v(t) = 1 - v(1 - t) keeps the argument small
        small = np.minimum(lo, 1.0 - lo)
        val = np.polynomial.polynomial.polyval(small, c)
        return np.where(lo <= 0.5, val, 1.0 - val)

    def xi(self, s) -> np.ndarray:
        """Profile in the squared radius: ``psi(x) = xi(|x|^2)``."""
        return 1.0 - self.v((4.0 * np.asarray(s, dtype=float) - 1.0) / 3.0)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.xi(np.sum(x * x, axis=-1))

    def radial_poly(self) -> np.ndarray:
        """Exact float coefficients (ascending in r) of ``psi`` on the shell, along any ray."""
        y = [Fraction(-1, 3), Fraction(0), Fraction(4, 3)]
        out = [Fraction(0)] * (2 * len(self.v_coeffs))
        power = [Fraction(1)]
        for c in self.v_coeffs:
            for i, b in enumerate(power):
                out[i] -= c * b
            power = _poly_mul(power, y)
        out[0] += 1
        return np.array([float(c) for c in out[: 2 * len(self.v_coeffs) - 1]])


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def normalizer(p: int) -> Fraction:
    """``int_0^1 (s (1 - s))^p ds = p!^2 / (2p + 1)!``."""
    return Fraction(factorial(p) ** 2, factorial(2 * p + 1))


def build_bump(p: int) -> BumpFunction:
    if not (isinstance(p, (int, np.integer)) and 1 <= p <= MAX_ORDER):
        raise InvalidArgument(f"p must be an integer in 1..{MAX_ORDER}")
    p = int(p)
    a_p = normalizer(p)
    coeffs = [Fraction(0)] * (2 * p + 2)
    # (s(1-s))^p = sum_j C(p,j) (-1)^j s^(p+j), integrated term by term
    for j in range(p + 1):
        coeffs[p + j + 1] = Fraction(comb(p, j) * (-1) ** j, p + j + 1) / a_p
    return BumpFunction(p, a_p, tuple(coeffs))


def end_derivatives(b: BumpFunction) -> list[tuple[Fraction, Fraction]]:
    """Exact ``(v^(k)(0), v^(k)(1))`` for k = 1..p+1; all but the last pair vanish."""
    c = list(b.v_coeffs)
    out = []
    for k in range(1, b.p + 2):
        c = [i * c[i] for i in range(1, len(c))]
        out.append((c[0], sum(c)))
    return out


def eval_psi(b: BumpFunction, x) -> float:
    return float(b(np.asarray(x, dtype=float)))


def derivative_bound(p: int, m: int) -> float:
    """Explicit bound on ``|D^gamma psi|`` for ``|gamma| = m``."""
    return 4.0**p * (2 * p + 1) * (16.0 / 3.0) * (4.0 / 3.0) ** (4 * p) * (4.0 * p) ** m


# -----------------------------------------------------------------------------
# Finite differences
# -----------------------------------------------------------------------------
def _richardson(estimates: list, ratio: float, order: int):
    """Neville table for estimates with error series in powers ``h^order, h^2order, ...``."""
    table = list(estimates)
    for level in range(1, len(table)):
        f = ratio ** (order * level)
        table = [(f * table[i + 1] - table[i]) / (f - 1.0) for i in range(len(table) - 1)]
    return table[0]


def fd_partial(f, x: np.ndarray, gamma: MultiIndex, h0: float = FD_BASE_STEP,
               levels: int = FD_LEVELS) -> np.ndarray:
    """``D^gamma f`` at the rows of ``x`` by tensor central differences + Richardson."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if max(gamma.exponents, default=0) > 3:
        raise InvalidArgument("central stencils cover orders up to 3 per coordinate")
    grids = [list(_CENTRAL[m].items()) for m in gamma.exponents]
    ests = []
    for lvl in range(levels):
        h = h0 / 2**lvl
        total = np.zeros(x.shape[0])
        for combo in np.ndindex(*[len(g) for g in grids]):
            shift = np.array([grids[i][k][0] for i, k in enumerate(combo)], dtype=float) * h
            weight = np.prod([grids[i][k][1] for i, k in enumerate(combo)])
            total += weight * f(x + shift)
        ests.append(total / h**gamma.length)
    return _richardson(ests, 2.0, 2)


def one_sided_derivative(g, r0: float, order: int, side: int, h0: float = FD_BASE_STEP,
                         levels: int = FD_LEVELS) -> float:
    """``g^(order)(r0)`` from one side (``side`` = +1 right, -1 left) by forward differences."""
    if order == 0:
        return float(g(np.array([r0]))[0])
    ests = []
    for lvl in range(levels):
        h = side * h0 / 2**lvl
        k = np.arange(order + 1)
        w = np.array([comb(order, j) * (-1) ** (order - j) for j in k], dtype=float)
        ests.append(float(w @ g(r0 + k * h)) / h**order)
    return float(_richardson(ests, 2.0, 1))


# -----------------------------------------------------------------------------
# Certification
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class CertReport:
    p: int
    d: int
    gamma: tuple[int, ...]
    samples: int
    seed: int
    max_estimate: float
    argmax: tuple[float, ...]
    bound: float
    slack: float
    passed: bool


def shell_samples(seed: int, n: int, d: int) -> np.ndarray:
    """Seeded points with ``1/2 <= |x| <= 1``, radii uniform, directions uniform."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.uniform(0.5, 1.0, n)[:, None]


def certify_derivative_bound(b: BumpFunction, d: int, gamma, samples: int = 200,
                             seed: int = 0) -> CertReport:
    """Largest finite-difference estimate of ``|D^gamma psi|`` on the shell vs the bound."""
    gamma = _as_multi_index(gamma)
    if gamma.dim != d:
        raise InvalidArgument("gamma must have d entries")
    if not (gamma.length <= b.p <= MAX_CERT_ORDER and d <= MAX_CERT_DIM):
        raise InvalidArgument(f"certification needs |gamma| <= p <= {MAX_CERT_ORDER}, d <= {MAX_CERT_DIM}")
    x = shell_samples(seed, samples, d)
    est = np.abs(fd_partial(b, x, gamma))
    k = int(np.argmax(est))
    bound = derivative_bound(b.p, gamma.length)
    return CertReport(b.p, d, gamma.exponents, samples, seed, float(est[k]),
                      tuple(float(v) for v in x[k]), bound, FD_SLACK, bool(est[k] <= bound * FD_SLACK))


@dataclass(frozen=True)
class SeamReport:
    p: int
    radius: float
    order: int
    inside: float
    outside: float
    scale: float
    passed: bool


def seam_check(b: BumpFunction, radius: float, order: int, direction=None,
               rtol: float = SEAM_RTOL) -> SeamReport:
    """Compare one-sided radial derivatives of ``psi`` across a seam sphere.

    The tolerance is relative to the largest derivative of the same order
    over the shell, so a genuine jump shows up at its natural size.
    """
    if radius not in (0.5, 1.0):
        raise InvalidArgument("seams sit at radius 1/2 and 1")
    if not 0 <= order <= MAX_CERT_ORDER:
        raise InvalidArgument(f"one-sided differences are only trusted up to order {MAX_CERT_ORDER}")
    theta = np.ones(1) if direction is None else np.asarray(direction, dtype=float)
    theta = theta / np.linalg.norm(theta)

    def along(r):
        return b(np.asarray(r, dtype=float)[:, None] * theta[None, :])

    inner_side = +1 if radius == 0.5 else -1
    inside = one_sided_derivative(along, radius, order, inner_side, levels=SEAM_LEVELS)
    outside = one_sided_derivative(along, radius, order, -inner_side, levels=SEAM_LEVELS)
    rs = np.linspace(0.5, 1.0, 201)
    poly = np.polynomial.Polynomial(b.radial_poly())
    scale = max(1.0, float(np.max(np.abs(poly.deriv(order)(rs)))) if order else 1.0)
    return SeamReport(b.p, radius, order, inside, outside, scale,
                      bool(abs(inside - outside) <= rtol * scale))


def write_profile_csv(b: BumpFunction, path, n: int = 201) -> Path:
    """Rows ``radius, psi, dpsi/dr`` on ``[0, 1.1]`` (central differences)."""
    path = Path(path)
    r = np.linspace(0.0, 1.1, n)
    g = lambda s: b(np.asarray(s)[:, None])  # noqa: E731
    psi = g(r)
    slope = fd_partial(lambda z: g(z[:, 0]), r[:, None], MultiIndex((1,)))
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["radius", "psi", "dpsi_dr"])
        for row in zip(r, psi, slope):
            w.writerow([f"{v:.17g}" for v in row])
    return path
