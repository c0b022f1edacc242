"""
Signed measures on R and R^d.

``DiscreteMeasureND`` is a weighted point cloud (signed weights allowed).
``DiscreteMeasure1D`` adds piecewise-polynomial density pieces, which is the
smallest class on the line that is closed under convolution with the
piecewise-constant smoothing kernel.

Both are immutable. Points that coincide exactly are merged by summing their
weights; no fuzzy merging is done (quantize first if that is wanted).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb, factorial, prod
from typing import Iterable, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate

from . import _piecewise as pw
from .errors import InfeasibleError, InvalidArgument

PROBABILITY_TOL = 1e-12
UNIT_TOL = 1e-12
MAX_PIECE_DEGREE = 8


# -----------------------------------------------------------------------------
# Multi-indices
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class MultiIndex:
    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if any(e < 0 for e in exps):
            raise InvalidArgument("multi-index exponents must be nonnegative")
        object.__setattr__(self, "exponents", exps)

    @property
    def length(self) -> int:
        return sum(self.exponents)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def factorial(self) -> int:
        return prod(factorial(e) for e in self.exponents)

    @staticmethod
    def all_up_to(d: int, order: int) -> list["MultiIndex"]:
        """Every multi-index in dimension ``d`` with length ``<= order``, graded."""
        out = []
        for m in range(order + 1):
            for combo in combinations_with_replacement(range(d), m):
                exps = [0] * d
                for i in combo:
                    exps[i] += 1
                out.append(MultiIndex(tuple(exps)))
        return out


def _as_multi_index(alpha) -> MultiIndex:
    if isinstance(alpha, MultiIndex):
        return alpha
    if np.isscalar(alpha):
        return MultiIndex((int(alpha),))
    return MultiIndex(tuple(alpha))


def n_moment_constraints(d: int, p: int) -> int:
    """Number of mixed moments of order ``<= p - 1`` in dimension ``d``."""
    return comb(d + p - 1, d) if p >= 1 else 0


# -----------------------------------------------------------------------------
# Point clouds in R^d
# -----------------------------------------------------------------------------
def _merge_points(points: np.ndarray, weights: np.ndarray):
    if points.shape[0] == 0:
        return points, weights
    uniq, inverse = np.unique(points, axis=0, return_inverse=True)
    merged = np.bincount(inverse.ravel(), weights=weights, minlength=uniq.shape[0])
    return uniq, merged


@dataclass(frozen=True)
class DiscreteMeasureND:
    """Weighted point cloud ``sum_j w_j delta_{x_j}`` in R^d.

    Parameters
    ----------
    points : array of shape (n, d)
    weights : array of shape (n,)
    probability : bool
        When set, weights must be nonnegative and sum to one (1e-12).
    """

    points: np.ndarray
    weights: np.ndarray
    probability: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.ndim != 2:
            raise InvalidArgument("points must have shape (n, d)")
        if pts.shape[1] < 1:
            raise InvalidArgument("dimension must be positive")
        if pts.shape[0] != w.size:
            raise InvalidArgument("points and weights must have equal length")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise InvalidArgument("points and weights must be finite")
        pts, w = _merge_points(pts, w)
        if self.probability:
            if np.any(w < 0) or abs(w.sum() - 1.0) > PROBABILITY_TOL:
                raise InvalidArgument("probability measure needs w >= 0 and sum(w) = 1")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def dirac(cls, x: Sequence[float]) -> "DiscreteMeasureND":
        return cls(np.atleast_2d(np.asarray(x, dtype=float)), [1.0], probability=True)

    @classmethod
    def zero(cls, d: int) -> "DiscreteMeasureND":
        return cls(np.zeros((0, d)), np.zeros(0))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def dropping_zero_weights(self) -> "DiscreteMeasureND":
        keep = self.weights != 0.0
        return DiscreteMeasureND(self.points[keep], self.weights[keep], self.probability)

    def __add__(self, other: "DiscreteMeasureND") -> "DiscreteMeasureND":
        if not isinstance(other, DiscreteMeasureND):
            return NotImplemented
        if other.dim != self.dim:
            raise InvalidArgument("dimension mismatch")
        return DiscreteMeasureND(
            np.vstack([self.points, other.points]), np.concatenate([self.weights, other.weights])
        )

    def __neg__(self) -> "DiscreteMeasureND":
        return DiscreteMeasureND(self.points, -self.weights)

    def __sub__(self, other: "DiscreteMeasureND") -> "DiscreteMeasureND":
        return self + (-other)

    def __mul__(self, s: float) -> "DiscreteMeasureND":
        return DiscreteMeasureND(self.points, float(s) * self.weights)

    __rmul__ = __mul__

    def pushforward(self, scale: float, shift) -> "DiscreteMeasureND":
        """Image under ``x -> scale * x + shift``."""
        return DiscreteMeasureND(scale * self.points + np.asarray(shift, dtype=float), self.weights)


# -----------------------------------------------------------------------------
# Measures on the line: atoms + piecewise polynomial density
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class DensityPiece:
    """Polynomial density on ``[l, u)``; coefficients ascending in ``x - l``."""

    l: float
    u: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        l, u = float(self.l), float(self.u)
        c = tuple(float(x) for x in np.atleast_1d(self.coeffs))
        if not (np.isfinite(l) and np.isfinite(u) and l < u):
            raise InvalidArgument(f"density piece needs finite l < u, got [{l}, {u})")
        if not all(np.isfinite(c)):
            raise InvalidArgument("density coefficients must be finite")
        if len(c) - 1 > MAX_PIECE_DEGREE:
            raise InvalidArgument(f"density degree capped at {MAX_PIECE_DEGREE}")
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "coeffs", c)

    @property
    def length(self) -> float:
        return self.u - self.l

    def moment(self, k: int) -> float:
        """``int_l^u x^k f(x) dx`` exactly, in local coordinates."""
        shifted = [comb(k, i) * self.l ** (k - i) for i in range(k + 1)]
        prod_c = npoly.polymul(shifted, self.coeffs)
        return float(npoly.polyval(self.length, npoly.polyint(prod_c)))

    def cdf(self, x: np.ndarray) -> np.ndarray:
        tau = np.clip(np.asarray(x, dtype=float) - self.l, 0.0, self.length)
        return npoly.polyval(tau, npoly.polyint(self.coeffs))


def _normalize_pieces(pieces: Iterable[DensityPiece]) -> tuple[DensityPiece, ...]:
    """Sort pieces and split overlaps so the result is disjoint."""
    pieces = sorted(pieces, key=lambda pc: (pc.l, pc.u))
    if all(a.u <= b.l for a, b in zip(pieces, pieces[1:])):
        return tuple(pieces)
    cuts = np.unique(np.array([[pc.l, pc.u] for pc in pieces]).ravel())
    deg = max(len(pc.coeffs) for pc in pieces)
    acc = np.zeros((cuts.size - 1, deg))
    for pc in pieces:
        lo = np.searchsorted(cuts, pc.l)
        hi = np.searchsorted(cuts, pc.u)
        c = np.zeros(deg)
        c[: len(pc.coeffs)] = pc.coeffs
        for k in range(lo, hi):
            acc[k] += pw.taylor_shift(c, cuts[k] - pc.l)
    return tuple(
        DensityPiece(cuts[k], cuts[k + 1], tuple(pw.trim(acc[k])))
        for k in range(cuts.size - 1)
        if np.any(acc[k])
    )


@dataclass(frozen=True)
class DiscreteMeasure1D:
    """Signed measure on R: atoms plus piecewise-polynomial density."""

    locations: np.ndarray
    weights: np.ndarray
    pieces: tuple[DensityPiece, ...] = ()

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if loc.size != w.size:
            raise InvalidArgument("locations and weights must have equal length")
        if not (np.all(np.isfinite(loc)) and np.all(np.isfinite(w))):
            raise InvalidArgument("atoms must be finite")
        if loc.size:
            loc, inverse = np.unique(loc, return_inverse=True)
            w = np.bincount(inverse.ravel(), weights=w, minlength=loc.size)
        loc.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "pieces", _normalize_pieces(self.pieces))

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[float, float]]) -> "DiscreteMeasure1D":
        atoms = list(atoms)
        if not atoms:
            return cls(np.zeros(0), np.zeros(0))
        loc, w = zip(*atoms)
        return cls(np.array(loc), np.array(w))

    @classmethod
    def dirac(cls, x: float, weight: float = 1.0) -> "DiscreteMeasure1D":
        return cls(np.array([x]), np.array([weight]))

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    @property
    def has_density(self) -> bool:
        return bool(self.pieces)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum() + sum(pc.moment(0) for pc in self.pieces))

    def support_bounds(self) -> tuple[float, float] | None:
        ends = list(self.locations[self.weights != 0])
        for pc in self.pieces:
            ends.extend([pc.l, pc.u])
        if not ends:
            return None
        return float(min(ends)), float(max(ends))

    def moment(self, k: int) -> float:
        atoms = float(np.sum(self.weights * self.locations**k)) if self.weights.size else 0.0
        return atoms + sum(pc.moment(k) for pc in self.pieces)

    def cdf(self, x) -> np.ndarray:
        """Right-continuous ``lambda((-inf, x])``, vectorised over ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        if self.weights.size:
            cum = np.concatenate(([0.0], np.cumsum(self.weights)))
            out = out + cum[np.searchsorted(self.locations, x, side="right")]
        for pc in self.pieces:
            out = out + pc.cdf(x)
        return out

    def __add__(self, other: "DiscreteMeasure1D") -> "DiscreteMeasure1D":
        if not isinstance(other, DiscreteMeasure1D):
            return NotImplemented
        return DiscreteMeasure1D(
            np.concatenate([self.locations, other.locations]),
            np.concatenate([self.weights, other.weights]),
            self.pieces + other.pieces,
        )

    def __neg__(self) -> "DiscreteMeasure1D":
        return self * -1.0

    def __sub__(self, other: "DiscreteMeasure1D") -> "DiscreteMeasure1D":
        return self + (-other)

    def __mul__(self, s: float) -> "DiscreteMeasure1D":
        s = float(s)
        pieces = tuple(DensityPiece(pc.l, pc.u, tuple(s * c for c in pc.coeffs)) for pc in self.pieces)
        return DiscreteMeasure1D(self.locations, s * self.weights, pieces if s != 0.0 else ())

    __rmul__ = __mul__

    def pushforward(self, a: float, c: float = 0.0) -> "DiscreteMeasure1D":
        """Image under ``x -> a * x + c``; mass is preserved exactly."""
        a, c = float(a), float(c)
        loc = list(a * self.locations + c)
        w = list(self.weights)
        pieces = []
        for pc in self.pieces:
            if a == 0.0:
                loc.append(c)
                w.append(pc.moment(0))
                continue
            coeffs = np.asarray(pc.coeffs)
            if a > 0:
                new = coeffs / a ** np.arange(coeffs.size) / a
                pieces.append(DensityPiece(a * pc.l + c, a * pc.u + c, tuple(new)))
            else:
                # local variable of the image starts at a*u + c; tau = tau'/a + (u - l)
                shifted = pw.taylor_shift(coeffs, pc.length)
                new = shifted / a ** np.arange(coeffs.size) / abs(a)
                pieces.append(DensityPiece(a * pc.u + c, a * pc.l + c, tuple(new)))
        return DiscreteMeasure1D(np.array(loc), np.array(w), tuple(pieces))


Measure = Union[DiscreteMeasureND, DiscreteMeasure1D]


def as_1d(m: Measure) -> DiscreteMeasure1D:
    """View a one-dimensional point cloud as a ``DiscreteMeasure1D``."""
    if isinstance(m, DiscreteMeasure1D):
        return m
    if m.dim != 1:
        raise InvalidArgument("as_1d needs a measure on R^1")
    return DiscreteMeasure1D(m.points[:, 0], m.weights)


def embed(m: DiscreteMeasure1D, probability: bool = False) -> DiscreteMeasureND:
    """Atoms of a line measure as a point cloud in R^1."""
    if m.has_density:
        raise InvalidArgument("only atomic measures embed as point clouds")
    return DiscreteMeasureND(m.locations[:, None], m.weights, probability)


# -----------------------------------------------------------------------------
# Operations
# -----------------------------------------------------------------------------
def project(m: DiscreteMeasureND, theta) -> DiscreteMeasure1D:
    """Image of ``m`` under ``x -> <x, theta>`` for a unit vector ``theta``."""
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != m.dim:
        raise InvalidArgument("theta has the wrong dimension")
    if abs(np.linalg.norm(theta) - 1.0) > UNIT_TOL:
        raise InvalidArgument("theta must be a unit vector")
    return DiscreteMeasure1D(m.points @ theta, m.weights)


def mixed_moment(m: Measure, alpha) -> float:
    """``int x^alpha dm``."""
    alpha = _as_multi_index(alpha)
    if isinstance(m, DiscreteMeasure1D):
        if alpha.dim != 1:
            raise InvalidArgument("line measures take one-component multi-indices")
        return m.moment(alpha.exponents[0])
    if alpha.dim != m.dim:
        raise InvalidArgument("multi-index dimension mismatch")
    if m.size == 0:
        return 0.0
    mono = np.prod(m.points ** np.asarray(alpha.exponents), axis=1)
    return float(np.sum(m.weights * mono))


def _abs_x_power_density(pc: DensityPiece, q: float) -> float:
    cuts = [pc.l, pc.u]
    if pc.l < 0.0 < pc.u:
        cuts.insert(1, 0.0)
    total = 0.0
    if float(q).is_integer():
        k = int(q)
        for a, b in zip(cuts, cuts[1:]):
            sub = pw.taylor_shift(np.asarray(pc.coeffs), a - pc.l)
            xk = [comb(k, i) * a ** (k - i) for i in range(k + 1)]
            total += pw.abs_integral(npoly.polymul(xk, sub), b - a)
        return total
    c = np.asarray(pc.coeffs)
    for a, b in zip(cuts, cuts[1:]):
        inner = [a, *(pc.l + r for r in pw.real_roots(c, a - pc.l, b - pc.l)), b]
        for s, t in zip(inner, inner[1:]):
            val, _ = integrate.quad(lambda x: abs(x) ** q * abs(npoly.polyval(x - pc.l, c)), s, t)
            total += val
    return total


def abs_moment(m: Measure, q: float) -> float:
    """``int |x|^q d|m|(x)``."""
    if q < 1:
        raise InvalidArgument("q must be >= 1")
    if isinstance(m, DiscreteMeasure1D):
        atoms = float(np.sum(np.abs(m.weights) * np.abs(m.locations) ** q))
        return atoms + sum(_abs_x_power_density(pc, q) for pc in m.pieces)
    if m.size == 0:
        return 0.0
    return float(np.sum(np.abs(m.weights) * np.linalg.norm(m.points, axis=1) ** q))


def total_variation(m: Measure) -> float:
    atoms = float(np.sum(np.abs(m.weights)))
    if isinstance(m, DiscreteMeasureND):
        return atoms
    return atoms + sum(pw.abs_integral(np.asarray(pc.coeffs), pc.length) for pc in m.pieces)


# -----------------------------------------------------------------------------
# Random measures
# -----------------------------------------------------------------------------
LAWS = ("gaussian", "cube", "pareto")


def sample_points(rng: np.random.Generator, n: int, d: int, law: str = "gaussian",
                  tail_index: float = 4.0) -> np.ndarray:
    """I.i.d. atoms from one of the supported laws.

    ``pareto`` draws a uniform direction times a Pareto(``tail_index``)
    radius, so the q-th moment is finite exactly for q < tail_index.
    """
    if law == "gaussian":
        return rng.standard_normal((n, d))
    if law == "cube":
        return rng.uniform(-1.0, 1.0, (n, d))
    if law == "pareto":
        u = rng.standard_normal((n, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        return u * (rng.pareto(tail_index, n) + 1.0)[:, None]
    raise InvalidArgument(f"unknown law {law!r}; choose from {LAWS}")


def sample_weights(rng: np.random.Generator, n: int, scheme: str = "dirichlet") -> np.ndarray:
    if scheme == "uniform":
        return np.full(n, 1.0 / n)
    if scheme == "dirichlet":
        return rng.dirichlet(np.ones(n))
    raise InvalidArgument(f"unknown weight scheme {scheme!r}")


def moment_matrix(points: np.ndarray, p: int) -> np.ndarray:
    """Rows ``x^alpha`` over all ``|alpha| <= p - 1``, columns over atoms."""
    d = points.shape[1]
    alphas = MultiIndex.all_up_to(d, p - 1)
    return np.array([np.prod(points ** np.asarray(a.exponents), axis=1) for a in alphas])


def moment_matched_pair(seed: int, d: int, p: int, n: int, law: str = "gaussian",
                        weights: str = "dirichlet", max_tries: int = 50,
                        ) -> tuple[DiscreteMeasureND, DiscreteMeasureND]:
    """Two probability measures on ``n`` atoms each, equal mixed moments below order p.

    ``mu`` gets random atoms and random weights (``weights`` scheme). ``nu`` gets a fresh random
    support, and its weights are the least-norm correction of the uniform
    weights that matches every moment of ``mu`` of order ``<= p - 1``. Supports
    that would need negative weights are resampled, up to ``max_tries`` times.
    """
    if p < 1 or d < 1:
        raise InvalidArgument("need p >= 1 and d >= 1")
    n_con = n_moment_constraints(d, p)
    if n < n_con + 1:
        raise InvalidArgument(f"need n >= {n_con + 1} atoms for {n_con} moment constraints")
    rng = np.random.default_rng(seed)
    x = sample_points(rng, n, d, law)
    mu = DiscreteMeasureND(x, sample_weights(rng, n, weights), probability=True)
    target = moment_matrix(mu.points, p) @ mu.weights
    for _ in range(max_tries):
        y = sample_points(rng, n, d, law)
        A = moment_matrix(y, p)
        w0 = np.full(n, 1.0 / n)
        w = w0 + np.linalg.lstsq(A, target - A @ w0, rcond=None)[0]
        if w.min() < -PROBABILITY_TOL:
            continue
        w = np.clip(w, 0.0, None)
        w /= w.sum()
        nu = DiscreteMeasureND(y, w, probability=True)
        if nu.size == n:
            return mu, nu
    raise InfeasibleError(
        f"no nonnegative moment-matching weights after {max_tries} supports (d={d}, p={p}, n={n})"
    )


def moment_matched_pairs(seed: int, count: int, d: int, p: int, n: int, **kwargs):
    """``count`` pairs from consecutive derived seeds, skipping infeasible ones.

    Returns ``(pairs, seeds)`` where ``seeds[i]`` regenerates ``pairs[i]``
    through ``moment_matched_pair``. Gives up after ``4 * count`` attempts.
    """
    pairs, used = [], []
    for k in range(4 * count):
        s = seed * 1_000_003 + k
        try:
            pairs.append(moment_matched_pair(s, d, p, n, **kwargs))
        except InfeasibleError:
            continue
        used.append(s)
        if len(pairs) == count:
            return pairs, used
    raise InfeasibleError(f"only {len(pairs)} of {count} feasible pairs (d={d}, p={p}, n={n})")
