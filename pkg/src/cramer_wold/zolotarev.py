"""
Zolotarev semi-norms of signed measures on the line.

For a signed measure ``lam`` on R whose moments of order ``0..p-1`` vanish,
``p`` integrations by parts give

    int u dlam = (-1)^p int u^(p)(t) Lam_p(t) dt,

where ``Lam_1`` is the signed distribution function and ``Lam_k`` its
``(k-1)``-fold antiderivative. Hence ``zeta_p(lam) = int |Lam_p|``, attained
by ``u^(p) = (-1)^p sign(Lam_p)``. ``zeta_p_1d`` computes the integral
exactly on the piecewise-polynomial representation; ``zeta_p_sign_oracle``
builds that extremal ``u`` on a grid and integrates it against ``lam``
directly, which gives an independent lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as npoly

from ._piecewise import PiecewisePoly, taylor_shift
from .errors import InvalidArgument, MomentViolation
from .measures import DiscreteMeasure1D

MOMENT_TOL = 1e-9
MAX_ORDER = 6


@dataclass(frozen=True)
class IteratedCdf:
    """``Lam_order`` as a piecewise polynomial (zero outside the support hull)."""

    order: int
    pieces: PiecewisePoly

    def __call__(self, t) -> np.ndarray:
        return self.pieces(t)


def _knots(lam: DiscreteMeasure1D) -> np.ndarray:
    ends = [lam.locations[lam.weights != 0.0]]
    ends += [np.array([pc.l, pc.u]) for pc in lam.pieces]
    return np.unique(np.concatenate(ends)) if ends else np.zeros(0)


def signed_cdf(lam: DiscreteMeasure1D) -> PiecewisePoly:
    """``Lam_1(t) = lam((-inf, t])`` on the hull of the support."""
    knots = _knots(lam)
    if knots.size == 0:
        return PiecewisePoly(np.zeros(1), np.zeros((0, 1)))
    n_seg = knots.size - 1
    deg = max((len(pc.coeffs) for pc in lam.pieces), default=0)
    coeffs = np.zeros((n_seg, deg + 1))
    atom_at = np.zeros(knots.size)
    nz = lam.weights != 0.0
    np.add.at(atom_at, np.searchsorted(knots, lam.locations[nz]), lam.weights[nz])
    dens_mass = np.zeros(n_seg)
    for pc in lam.pieces:
        lo, hi = np.searchsorted(knots, pc.l), np.searchsorted(knots, pc.u)
        c = np.asarray(pc.coeffs)
        for k in range(lo, hi):
            anti = npoly.polyint(taylor_shift(c, knots[k] - pc.l))
            coeffs[k, : anti.size] += anti
            dens_mass[k] += npoly.polyval(knots[k + 1] - knots[k], anti)
    start = np.cumsum(atom_at)[:-1] + np.concatenate(([0.0], np.cumsum(dens_mass)[:-1]))
    coeffs[:, 0] += start
    return PiecewisePoly(knots, coeffs)


def iterated_cdf(lam: DiscreteMeasure1D, order: int) -> IteratedCdf:
    """``Lam_order``; the part right of the support is dropped.

    That tail is identically zero exactly when the moments of orders
    ``0..order-1`` vanish, which ``zeta_p_1d`` checks before calling this.
    """
    if order < 1:
        raise InvalidArgument("order must be >= 1")
    f = signed_cdf(lam)
    for _ in range(order - 1):
        f = f.integrate()
    return IteratedCdf(order, f)


def check_moments(lam: DiscreteMeasure1D, p: int, tol: float = MOMENT_TOL) -> None:
    """Raise ``MomentViolation`` unless moments ``0..p-1`` vanish within ``tol``."""
    for k in range(p):
        m = lam.moment(k)
        if abs(m) > tol:
            raise MomentViolation(k, m, tol)


def _check_order(p: int) -> None:
    if not 1 <= p <= MAX_ORDER:
        raise InvalidArgument(f"p must be in 1..{MAX_ORDER}")


def zeta_p_1d(lam: DiscreteMeasure1D, p: int, check: bool = True) -> float:
    """Exact ``zeta_p(lam) = int |Lam_p(t)| dt``.

    Parameters
    ----------
    lam : DiscreteMeasure1D
        Compactly supported signed measure with moments ``0..p-1`` equal to 0.
    p : int
        Order, ``1 <= p <= 6``.
    check : bool
        Verify the moment precondition (tolerance 1e-9 absolute).

    Raises
    ------
    MomentViolation
        If some moment of order below ``p`` does not vanish.
    """
    _check_order(p)
    if check:
        check_moments(lam, p)
    return iterated_cdf(lam, p).pieces.abs_integral()


def zeta_p_pair(mu: DiscreteMeasure1D, nu: DiscreteMeasure1D, p: int) -> float:
    return zeta_p_1d(mu - nu, p)


# -----------------------------------------------------------------------------
# Sign-function oracle
# -----------------------------------------------------------------------------
def lam_p_direct(lam: DiscreteMeasure1D, p: int, t) -> np.ndarray:
    """``Lam_p(t) = int (t - y)_+^(p-1) / (p-1)! dlam(y)``, evaluated on the measure.

    Repeated-integration formula; shares no code with ``iterated_cdf``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = p - 1
    diff = t[:, None] - lam.locations[None, :]
    kern = np.where(diff >= 0.0, np.maximum(diff, 0.0) ** k, 0.0) / factorial(k)
    out = kern @ lam.weights
    for pc in lam.pieces:
        gx, gw = np.polynomial.legendre.leggauss((len(pc.coeffs) + k) // 2 + 1)
        top = np.clip(t, pc.l, pc.u)
        half = 0.5 * (top - pc.l)
        y = (pc.l + half)[:, None] + half[:, None] * gx[None, :]
        f = npoly.polyval(y - pc.l, np.asarray(pc.coeffs))
        out = out + np.sum(half[:, None] * gw * f * (t[:, None] - y) ** k, axis=1) / factorial(k)
    return out


def _taylor_nodes(s: np.ndarray, p: int, h: float) -> list[np.ndarray]:
    """Derivatives ``u^(m)`` at the grid nodes for the spline with ``u^(p) = s`` per cell.

    ``u`` and its first ``p - 1`` derivatives vanish at the left end.
    """
    n = s.size
    D: list[np.ndarray | None] = [None] * (p + 1)
    D[p] = s
    for m in range(p - 1, -1, -1):
        inc = np.zeros(n)
        for k in range(1, p - m + 1):
            inc += D[m + k][:n] * (h**k / factorial(k))
        D[m] = np.concatenate(([0.0], np.cumsum(inc)))
    return D


def _spline_eval(D: list[np.ndarray], p: int, lo: float, h: float, x: np.ndarray) -> np.ndarray:
    n = D[p].size
    j = np.clip(np.floor((x - lo) / h).astype(int), 0, n - 1)
    tau = x - (lo + j * h)
    out = D[p][j].astype(float)
    for m in range(p - 1, -1, -1):
        out = out * tau / (m + 1) + D[m][j]
    return out


def zeta_p_sign_oracle(lam: DiscreteMeasure1D, p: int, grid_step: float) -> float:
    """Lower bound on ``zeta_p(lam)`` from an explicit admissible test function.

    On a grid of step ``grid_step`` the sign of ``Lam_p`` at each cell
    midpoint defines ``u^(p)``; ``u`` is its exact ``p``-fold integral (a
    spline of degree ``p`` with ``|u^(p)| <= 1``), and ``int u dlam`` is
    evaluated directly: at atoms by evaluating the spline, on density pieces by
    Gauss-Legendre rules that are exact for the polynomial integrand.
    """
    _check_order(p)
    if grid_step <= 0:
        raise InvalidArgument("grid_step must be positive")
    check_moments(lam, p)
    bounds = lam.support_bounds()
    if bounds is None or bounds[0] == bounds[1]:
        return 0.0
    lo, hi = bounds
    n = max(1, int(np.ceil((hi - lo) / grid_step)))
    mids = lo + (np.arange(n) + 0.5) * grid_step
    s = (-1.0) ** p * np.sign(lam_p_direct(lam, p, mids))
    D = _taylor_nodes(s, p, grid_step)

    total = float(np.sum(lam.weights * _spline_eval(D, p, lo, grid_step, lam.locations)))
    for pc in lam.pieces:
        deg = len(pc.coeffs) - 1 + p
        gx, gw = np.polynomial.legendre.leggauss(deg // 2 + 1)
        edges = np.union1d(np.clip(lo + np.arange(n + 1) * grid_step, pc.l, pc.u), [pc.l, pc.u])
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        x = (0.5 * (a + b))[:, None] + half[:, None] * gx[None, :]
        f = npoly.polyval(x - pc.l, np.asarray(pc.coeffs))
        u = _spline_eval(D, p, lo, grid_step, x.ravel()).reshape(x.shape)
        total += float(np.sum(half[:, None] * gw[None, :] * u * f))
    return total
