"""
Characteristic functions of discrete measures and the Fourier-side bound

    |f(t) - g(t)| <= 2 |t|^p * sup_theta zeta_p(mu_theta, nu_theta),

where f, g are the characteristic functions of mu, nu with equal moments
below order p.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from math import factorial
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .kernel import SmoothingKernel
from .measures import DiscreteMeasureND, total_variation
from .sliced import check_mixed_moments, sphere_directions

RATIO_FLOOR = 1e-12  # ratios are reported only where the bound exceeds this
SERIES_RADIUS = 1.0


# -----------------------------------------------------------------------------
# Characteristic functions
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class CharFn:
    """``t -> sum_j w_j exp(i <t, x_j>)``; rows of ``t`` are evaluated independently."""

    measure: DiscreteMeasureND

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_2d(np.asarray(t, dtype=float))
        if t.shape[1] != self.measure.dim:
            raise InvalidArgument("frequency dimension mismatch")
        return np.exp(1j * (t @ self.measure.points.T)) @ self.measure.weights


def char_fn(m: DiscreteMeasureND, t) -> complex:
    return complex(CharFn(m)(np.asarray(t, dtype=float).reshape(1, -1))[0])


def exp_remainder(z: np.ndarray, p: int) -> np.ndarray:
    """``exp(i z) - sum_{k < p} (i z)^k / k!`` without cancellation for small ``z``."""
    z = np.asarray(z, dtype=float)
    direct = np.exp(1j * z)
    for k in range(p):
        direct = direct - (1j * z) ** k / factorial(k)
    small = np.abs(z) < SERIES_RADIUS
    if not np.any(small):
        return direct
    zs = z[small]
    term = (1j * zs) ** p / factorial(p)
    series = term.copy()
    k = p
    while np.any(np.abs(term) > 1e-18 * np.maximum(np.abs(series), 1e-300)):
        k += 1
        term = term * (1j * zs) / k
        series += term
    out = direct.copy()
    out[small] = series
    return out


def char_fn_difference(mu: DiscreteMeasureND, nu: DiscreteMeasureND, t, p: int = 1) -> np.ndarray:
    """``f(t) - g(t)`` evaluated through the Taylor remainder of order ``p``.

    When moments below order ``p`` agree, the Taylor terms integrate to zero
    against ``mu - nu``, so only the remainder is summed.
    """
    lam = mu - nu
    t = np.atleast_2d(np.asarray(t, dtype=float))
    z = t @ lam.points.T
    return exp_remainder(z, p) @ lam.weights


def kernel_char_fn_1d(k: SmoothingKernel, t) -> np.ndarray:
    """Fourier transform of a one-dimensional kernel: ``sum_i a_i sin(b_i t) / (b_i t)``."""
    if k.d != 1:
        raise InvalidArgument("closed form is for d = 1 kernels")
    t = np.asarray(t, dtype=float)
    return np.sum(k.weights[:, None] * np.sinc(np.outer(k.radii, t.ravel()) / np.pi), axis=0).reshape(t.shape)


# -----------------------------------------------------------------------------
# Frequency grids
# -----------------------------------------------------------------------------
def frequency_grid(d: int, n_moduli: int = 60, n_directions: int = 16, seed: int = 0,
                   t_min: float = 1e-3, t_max: float = 1e2) -> np.ndarray:
    """Log-spaced moduli times directions; in 1D both signs are used."""
    radii = np.geomspace(t_min, t_max, n_moduli)
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        dirs = sphere_directions(seed, n_directions, d)
    return (radii[:, None, None] * dirs[None, :, :]).reshape(-1, d)


# -----------------------------------------------------------------------------
# Fourier bound
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class FourierBoundReport:
    p: int
    sup_zeta: float
    slack: float
    t: np.ndarray
    lhs: np.ndarray
    bound: np.ndarray
    max_ratio: float
    tv_violations: int
    passed: bool

    def write_csv(self, path) -> Path:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([*(f"t{i}" for i in range(self.t.shape[1])), "abs_diff", "bound"])
            for t, a, b in zip(self.t, self.lhs, self.bound):
                w.writerow([*(f"{v:.17g}" for v in t), f"{a:.17g}", f"{b:.17g}"])
        return path


def check_fourier_bound(mu: DiscreteMeasureND, nu: DiscreteMeasureND, p: int, t_grid,
                        sup_zeta: float, slack: float = 0.0) -> FourierBoundReport:
    """Compare ``|f - g|`` with ``2 |t|^p M (1 + slack)`` on every grid point.

    ``sup_zeta`` is ``M``; pass the exact value in 1D, or a search value with
    ``slack > 0`` when it is only a lower bound. The ratio is taken where the
    bound exceeds ``RATIO_FLOOR``. Also counts grid points where
    ``|f - g|`` exceeds the total variation of ``mu - nu``.
    """
    check_mixed_moments(mu - nu, p)
    t = np.atleast_2d(np.asarray(t_grid, dtype=float))
    lhs = np.abs(char_fn_difference(mu, nu, t, p))
    bound = 2.0 * np.linalg.norm(t, axis=1) ** p * sup_zeta * (1.0 + slack)
    live = bound > RATIO_FLOOR
    ratio = lhs[live] / bound[live]
    max_ratio = float(ratio.max()) if ratio.size else 0.0
    # no bound is meaningful where it vanishes, but the difference must then vanish too
    dead_ok = bool(np.all(lhs[~live] <= RATIO_FLOOR))
    tv = total_variation(mu - nu)
    tv_bad = int(np.count_nonzero(lhs > tv * (1.0 + 1e-12) + 1e-15))
    passed = max_ratio <= 1.0 and dead_ok and tv_bad == 0
    return FourierBoundReport(p, float(sup_zeta), slack, t, lhs, bound, max_ratio, tv_bad, passed)
