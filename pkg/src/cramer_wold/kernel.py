"""
Signed radial smoothing kernel with vanishing moments.

The kernel is a signed combination of uniform distributions on balls,

    kappa = sum_i a_i * Uniform(B(0, b_i)),    b_i = i / p,

with weights solving the Vandermonde system ``sum_i a_i b_i^k = [k == 0]``
for ``k = 0..p-1``. Then kappa has total mass one and every mixed moment of
order ``1..p-1`` vanishes, so convolution with ``kappa_eps`` preserves the
moment signature of a measure up to order ``p - 1``.

Weights are solved twice: in floating point and in exact rationals, both by
the Bjorck-Pereyra elimination. Moments are reported from the rational copy.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import exp, factorial, lgamma, log, pi

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _piecewise as pw
from .errors import InvalidArgument
from .measures import DensityPiece, DiscreteMeasure1D, _as_multi_index

MAX_ORDER = 6


def bjorck_pereyra(nodes, rhs):
    """Solve ``sum_j x_j^i z_j = rhs_i`` (i = 0..n) for ``z``.

    Works for floats and for ``Fraction`` entries alike. Primal form of the
    Bjorck-Pereyra algorithm: a lower-bidiagonal sweep followed by an upper
    one, O(n^2) operations and no pivoting.
    """
    x = list(nodes)
    z = list(rhs)
    n = len(x) - 1
    if len(z) != n + 1:
        raise InvalidArgument("nodes and rhs must have equal length")
    for k in range(n):
        for i in range(n, k, -1):
            z[i] = z[i] - x[k] * z[i - 1]
    for k in range(n - 1, -1, -1):
        for i in range(k + 1, n + 1):
            z[i] = z[i] / (x[i] - x[i - k - 1])
        for i in range(k, n):
            z[i] = z[i] - z[i + 1]
    return z


def log_unit_ball_volume(d: int) -> float:
    return 0.5 * d * log(pi) - lgamma(0.5 * d + 1.0)


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return exp(log_unit_ball_volume(d))


@dataclass(frozen=True)
class SmoothingKernel:
    p: int
    d: int
    radii: np.ndarray
    weights: np.ndarray
    tv_norm: float
    density_sup: float
    exact_weights: tuple[Fraction, ...] = field(repr=False, default=())

    @property
    def exact_radii(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(i, self.p) for i in range(1, self.p + 1))

    # bounds the construction guarantees
    @property
    def weight_bound(self) -> float:
        return 2.0 ** (3 * self.p - 1)

    @property
    def tv_bound(self) -> float:
        return self.p * self.weight_bound

    @property
    def density_bound(self) -> float:
        return exp(-log_unit_ball_volume(self.d) + (self.d + 1) * log(self.p) + self.p * log(8.0))

    def tail_sums(self) -> np.ndarray:
        """``sum_{i >= k} a_i / i^d`` for k = 1..p; the density is proportional on each shell."""
        i = np.arange(1, self.p + 1, dtype=float)
        return np.cumsum((self.weights / i**self.d)[::-1])[::-1]

    def density(self, r) -> np.ndarray:
        """Radial density value at distance ``r`` from the origin."""
        r = np.asarray(r, dtype=float)
        shell = np.floor(r * self.p).astype(int) + 1  # |x| < i/p iff shell <= i
        tails = np.concatenate([self.tail_sums(), [0.0]])
        idx = np.clip(shell, 1, self.p + 1) - 1
        scale = exp(self.d * log(self.p) - log_unit_ball_volume(self.d))
        return scale * tails[idx]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "d": self.d,
            "a": self.weights.tolist(),
            "b": self.radii.tolist(),
            "tv": self.tv_norm,
            "density_sup": self.density_sup,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def build_kernel(p: int, d: int = 1) -> SmoothingKernel:
    """Kernel of order ``p`` in dimension ``d``.

    Examples
    --------
    >>> build_kernel(2, 1).weights.tolist()
    [2.0, -1.0]
    """
    if not (isinstance(p, (int, np.integer)) and 1 <= p <= MAX_ORDER):
        raise InvalidArgument(f"p must be an integer in 1..{MAX_ORDER}")
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise InvalidArgument("d must be a positive integer")
    p, d = int(p), int(d)
    rhs = [1] + [0] * (p - 1)
    exact = tuple(bjorck_pereyra([Fraction(i, p) for i in range(1, p + 1)], [Fraction(v) for v in rhs]))
    a = np.array(bjorck_pereyra([i / p for i in range(1, p + 1)], [float(v) for v in rhs]))
    b = np.arange(1, p + 1) / p

    # exact shell integrals: the density on the k-th shell is (p^d / omega_d) * tail_k
    tails = [sum(exact[i] / Fraction(i + 1) ** d for i in range(k, p)) for k in range(p)]
    tv = float(sum(abs(t) * ((k + 1) ** d - k**d) for k, t in enumerate(tails)))
    sup = exp(d * log(p) - log_unit_ball_volume(d)) * float(max(abs(t) for t in tails))
    return SmoothingKernel(p, d, b, a, tv, sup, exact)


# -----------------------------------------------------------------------------
# Moments
# -----------------------------------------------------------------------------
def _exact_radial_moment(k: SmoothingKernel, order: int) -> Fraction:
    s = sum(a * b**order for a, b in zip(k.exact_weights, k.exact_radii))
    return Fraction(k.d, order + k.d) * s


def kernel_radial_moment(k: SmoothingKernel, order: int) -> float:
    """``int r^order dkappa_0(r) = d/(order + d) * sum_i a_i b_i^order``, exact."""
    if order < 0:
        raise InvalidArgument("order must be >= 0")
    return float(_exact_radial_moment(k, order))


def sphere_moment(alpha) -> Fraction:
    """``int theta^alpha dsigma`` for the uniform probability on the unit sphere.

    Zero if some exponent is odd; for ``alpha = 2 beta`` it equals
    ``Gamma(d/2) / Gamma(d/2 + |beta|) * prod Gamma(beta_i + 1/2) / Gamma(1/2)``,
    which is rational and computed as such.
    """
    alpha = _as_multi_index(alpha)
    if any(e % 2 for e in alpha.exponents):
        return Fraction(0)
    half_d = Fraction(alpha.dim, 2)
    out = Fraction(1)
    for j in range(alpha.length // 2):
        out /= half_d + j
    for e in alpha.exponents:
        for j in range(e // 2):
            out *= Fraction(1, 2) + j
    return out


def kernel_mixed_moment(k: SmoothingKernel, alpha) -> float:
    """``int x^alpha dkappa`` as radial moment times sphere moment."""
    alpha = _as_multi_index(alpha)
    if alpha.dim != k.d:
        raise InvalidArgument("multi-index dimension must equal the kernel dimension")
    return float(_exact_radial_moment(k, alpha.length) * sphere_moment(alpha))


# -----------------------------------------------------------------------------
# Convolution on the line
# -----------------------------------------------------------------------------
def _box_convolve_piece(pc: DensityPiece, h: float, scale: float) -> list[DensityPiece]:
    """``scale * (f * 1[-h, h] / 2h)`` for a polynomial piece ``f``, as exact pieces."""
    c = np.asarray(pc.coeffs)
    Q = npoly.polyint(c)  # antiderivative in x - l, zero at l
    L = pc.length
    cuts = np.unique([pc.l - h, pc.l + h, pc.u - h, pc.u + h])
    out = []
    for s, t in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (s + t)
        if mid + h >= pc.u:
            upper = np.array([npoly.polyval(L, Q)])
        else:
            upper = pw.taylor_shift(Q, s + h - pc.l)
        if mid - h <= pc.l:
            lower = np.zeros(1)
        else:
            lower = pw.taylor_shift(Q, s - h - pc.l)
        coef = npoly.polysub(upper, lower) * (scale / (2.0 * h))
        coef = pw.trim(coef)
        if np.any(coef):
            out.append(DensityPiece(s, t, tuple(coef)))
    return out


def convolve_1d(lam: DiscreteMeasure1D, k: SmoothingKernel, eps: float) -> DiscreteMeasure1D:
    """``lam * kappa_eps`` where ``kappa_eps`` is ``kappa`` scaled by ``eps``.

    Atoms become sums of boxes, density pieces become exact polynomial
    pieces of one degree higher. The result has no atoms.
    """
    if k.d != 1:
        raise InvalidArgument("convolution is only built for d = 1 kernels")
    if not eps > 0:
        raise InvalidArgument("eps must be positive")
    pieces: list[DensityPiece] = []
    for a, b in zip(k.weights, k.radii):
        h = float(b) * eps
        height = float(a) / (2.0 * h)
        for x, w in zip(lam.locations, lam.weights):
            if w != 0.0:
                pieces.append(DensityPiece(x - h, x + h, (w * height,)))
        for pc in lam.pieces:
            pieces.extend(_box_convolve_piece(pc, h, float(a)))
    return DiscreteMeasure1D(np.zeros(0), np.zeros(0), tuple(pieces))


# -----------------------------------------------------------------------------
# Smoothing bounds
# -----------------------------------------------------------------------------
def smoothing_bound_kernel_tv(p: int, eps: float, lam_tv: float, kernel_tv: float, d: int = 1) -> float:
    """``(d eps)^p / p! * ||lam|| * ||kappa||`` with the computed kernel norm."""
    return (d * eps) ** p / factorial(p) * lam_tv * kernel_tv


def smoothing_bound_explicit(p: int, eps: float, lam_tv: float, d: int = 1) -> float:
    """``(8 d eps)^p / (2 (p - 1)!) * ||lam||``."""
    return (8.0 * d * eps) ** p / (2.0 * factorial(p - 1)) * lam_tv
