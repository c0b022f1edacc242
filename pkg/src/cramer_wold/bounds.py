"""
Exponents and right-hand sides of the projection bounds.

Two inequalities are evaluated, both with an unknown absolute constant ``c``
passed in by the caller:

    W(mu, nu)       <= c      b^(1-beta) S^beta,  beta = 2 / (2 + d q / (q - 1))
    zeta_p(mu, nu)  <= (c d)^p b^(1-beta) S^beta, beta = 2 / (2 + d q / (p (q - p)))

where ``S`` is the max-sliced distance (W or zeta_p) and ``b`` bounds the
q-th moment roots. The smoothing exponent ``sigma`` and the power
``A = M^((q-p)/(q-p+d/2))`` satisfy ``A^(p/(sigma+p)) = M^beta``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial, isfinite

from .errors import InvalidArgument


@dataclass(frozen=True)
class BoundParams:
    p: int
    q: float
    d: int
    b: float

    def __post_init__(self):
        if not (isinstance(self.p, int) and self.p >= 1):
            raise InvalidArgument("p must be a positive integer")
        if not (isinstance(self.d, int) and self.d >= 1):
            raise InvalidArgument("d must be a positive integer")
        if not all(isfinite(v) for v in (self.q, self.b)):
            raise InvalidArgument("q and b must be finite")
        if not self.q > self.p:
            raise InvalidArgument("need q > p")
        if self.b < 0:
            raise InvalidArgument("b must be nonnegative")


def _check(p: float, q: float, d: int) -> None:
    if not q > p:
        raise InvalidArgument(f"need q > p, got q={q}, p={p}")
    if d < 1 or p < 1:
        raise InvalidArgument("need p >= 1 and d >= 1")


def beta_w1(q: float, d: int) -> float:
    """Exponent of the projection bound for the Kantorovich distance."""
    _check(1, q, d)
    return 2.0 / (2.0 + d * q / (q - 1.0))


def beta_zeta(p: int, q: float, d: int) -> float:
    """Exponent of the projection bound for ``zeta_p``; equals ``beta_w1`` at p = 1."""
    _check(p, q, d)
    return 2.0 / (2.0 + d * q / (p * (q - p)))


def beta_w1_limit(d: int) -> float:
    """``beta_w1`` as ``q -> infinity`` (compact supports)."""
    return 2.0 / (2.0 + d)


def beta_zeta_limit(p: int, d: int) -> float:
    return 2.0 / (2.0 + d / p)


def sigma_exponent(p: int, q: float, d: int) -> float:
    """Smoothing exponent ``(q - p)(d/2) / (q - p + d/2)``."""
    _check(p, q, d)
    return (q - p) * (d / 2.0) / (q - p + d / 2.0)


def amplitude_exponent(p: int, q: float, d: int) -> float:
    """Power ``e`` in ``A = M^e``: ``(q - p) / (q - p + d/2)``."""
    _check(p, q, d)
    return (q - p) / (q - p + d / 2.0)


def exponent_identity_residual(p: int, q: float, d: int) -> float:
    """``e * p / (sigma + p) - beta``; zero when ``A^(p/(sigma+p)) = M^beta``."""
    return amplitude_exponent(p, q, d) * p / (sigma_exponent(p, q, d) + p) - beta_zeta(p, q, d)


def rhs_w1(params: BoundParams, S: float, c: float = 1.0) -> float:
    """``c b^(1-beta) S^beta`` with ``beta = beta_w1(q, d)``."""
    if S < 0 or c <= 0:
        raise InvalidArgument("need S >= 0 and c > 0")
    beta = beta_w1(params.q, params.d)
    return c * params.b ** (1.0 - beta) * S**beta


def rhs_zeta(params: BoundParams, S: float, c: float = 1.0) -> float:
    """``(c d)^p b^(1-beta) S^beta`` with ``beta = beta_zeta(p, q, d)``."""
    if S < 0 or c <= 0:
        raise InvalidArgument("need S >= 0 and c > 0")
    beta = beta_zeta(params.p, params.q, params.d)
    return (c * params.d) ** params.p * params.b ** (1.0 - beta) * S**beta


def implied_constant_w1(lhs: float, params: BoundParams, S: float) -> float:
    """The ``c`` making ``lhs = rhs_w1``; ``inf`` when the right side vanishes."""
    base = rhs_w1(params, S, 1.0)
    return lhs / base if base > 0 else (0.0 if lhs == 0 else float("inf"))


def implied_constant_zeta(lhs: float, params: BoundParams, S: float) -> float:
    """The ``c`` making ``lhs = rhs_zeta``: ``(lhs / (b^(1-beta) S^beta))^(1/p) / d``."""
    base = rhs_zeta(params, S, 1.0) / params.d**params.p
    if base <= 0:
        return 0.0 if lhs == 0 else float("inf")
    return (lhs / base) ** (1.0 / params.p) / params.d


def zeta_moment_bound(abs_p_moment: float, p: int, d: int) -> float:
    """Upper bound ``d^(p/2) / p! * int |x|^p d|lambda|`` for admissible ``lambda``."""
    if abs_p_moment < 0:
        raise InvalidArgument("absolute moment must be nonnegative")
    return d ** (p / 2.0) / factorial(p) * abs_p_moment
