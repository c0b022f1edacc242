"""
Exact Kantorovich distance W1 between discrete probability measures.

The transportation problem is solved as a minimum-cost flow on the complete
bipartite graph with successive shortest paths: each round runs Dijkstra
(scipy's compiled routine) on reduced costs from every source with remaining
supply, augments along the cheapest path to a sink with remaining demand, and
updates node potentials. The final potentials are an optimal dual solution, which is
checked against the primal cost before the plan is returned.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import InvalidArgument, ResourceLimit
from .measures import DiscreteMeasure1D, DiscreteMeasureND, PROBABILITY_TOL
from .zolotarev import zeta_p_1d

MAX_POINTS = 4096
FLOW_EPS = 1e-15
DUAL_TOL = 1e-9


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling between two discrete measures.

    ``flows`` lists ``(i, j, mass)`` with indices into the *input* measures'
    points; ``u``/``v`` are dual potentials with ``u_i + v_j <= |x_i - y_j|``.
    """

    flows: list[tuple[int, int, float]]
    cost: float
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    dual_value: float = 0.0

    def matrix(self, n: int, m: int) -> np.ndarray:
        out = np.zeros((n, m))
        for i, j, f in self.flows:
            out[i, j] += f
        return out


def _check_probability(m: DiscreteMeasureND, name: str) -> None:
    if np.any(m.weights < 0) or abs(m.total_mass - 1.0) > PROBABILITY_TOL:
        raise InvalidArgument(f"{name} must be a probability measure")


def cost_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - y[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def _ssp(a: np.ndarray, b: np.ndarray, C: np.ndarray):
    """Successive shortest paths; returns flow matrix and potentials.

    Node 0 is a super-source feeding every source with remaining supply,
    nodes ``1..n`` are sources, ``n+1..n+m`` sinks. Each round runs Dijkstra
    on reduced costs ``c(u, v) + pi(u) - pi(v) >= 0`` of the residual graph,
    raises the potentials by the distances (capped at the distance of the
    chosen sink) and pushes the bottleneck amount along the path.
    """
    n, m = C.shape
    F = np.zeros((n, m))
    supply, demand = a.copy(), b.copy()
    pi = np.zeros(n + m + 1)
    tol = FLOW_EPS * max(1.0, a.sum())
    src = np.arange(1, n + 1)
    snk = np.arange(n + 1, n + m + 1)
    fwd_rows = np.repeat(src, m)
    fwd_cols = np.tile(snk, n)
    while supply.sum() > tol and demand.sum() > tol:
        live = np.nonzero(supply > tol)[0]
        bi, bj = np.nonzero(F > FLOW_EPS)
        rows = np.concatenate([np.zeros(live.size, int), fwd_rows, snk[bj]])
        cols = np.concatenate([src[live], fwd_cols, src[bi]])
        cost = np.concatenate([np.zeros(live.size), C.ravel(), -C[bi, bj]])
        red = np.maximum(cost + pi[rows] - pi[cols], 0.0)
        graph = csr_matrix((red, (rows, cols)), shape=(n + m + 1, n + m + 1))
        dist, pred = dijkstra(graph, directed=True, indices=0, return_predecessors=True)
        open_sinks = np.nonzero(demand > tol)[0]
        k = open_sinks[np.argmin(dist[snk[open_sinks]])]
        reach = dist[snk[k]]
        if not np.isfinite(reach):
            break
        pi += np.minimum(dist, reach)

        path = []  # (source, sink, +1 forward / -1 backward)
        v = int(snk[k])
        delta = demand[k]
        while True:
            u = int(pred[v])
            if u == 0:
                delta = min(delta, supply[v - 1])
                root = v - 1
                break
            if v > n:  # source u -> sink v
                path.append((u - 1, v - n - 1, +1))
            else:  # sink u -> source v along a used arc
                path.append((v - 1, u - n - 1, -1))
                delta = min(delta, F[v - 1, u - n - 1])
            v = u
        for i, j, sgn in path:
            F[i, j] += sgn * delta
        F[F < FLOW_EPS] = 0.0
        supply[root] -= delta
        demand[k] -= delta
    return F, -pi[1 : n + 1], pi[n + 1 :]


def w1_exact(mu: DiscreteMeasureND, nu: DiscreteMeasureND) -> TransportPlan:
    """Optimal transport plan for the Euclidean cost, certified by duality.

    Raises
    ------
    InvalidArgument
        If either input is not a probability measure or dimensions differ.
    ResourceLimit
        If the two supports have more than 4096 points in total.
    """
    _check_probability(mu, "mu")
    _check_probability(nu, "nu")
    if mu.dim != nu.dim:
        raise InvalidArgument("dimension mismatch")
    keep_mu = np.nonzero(mu.weights > 0)[0]
    keep_nu = np.nonzero(nu.weights > 0)[0]
    if keep_mu.size + keep_nu.size > MAX_POINTS:
        raise ResourceLimit(f"{keep_mu.size + keep_nu.size} points exceed cap {MAX_POINTS}")
    a, b = mu.weights[keep_mu], nu.weights[keep_nu]
    C = cost_matrix(mu.points[keep_mu], nu.points[keep_nu])
    F, u, v = _ssp(a, b, C)

    # u_i + v_j <= c_ij with equality on the support of F
    slack = C - u[:, None] - v[None, :]
    scale = max(1.0, float(C.max(initial=0.0)))
    if slack.min(initial=0.0) < -DUAL_TOL * scale or np.any(np.abs(slack[F > 0]) > DUAL_TOL * scale):
        raise ArithmeticError("transport duals failed complementary slackness")
    cost = float(np.sum(F * C))
    dual = float(a @ u + b @ v)
    if abs(cost - dual) > DUAL_TOL * scale:
        raise ArithmeticError(f"duality gap {cost - dual:.3e}")

    full_u = np.zeros(mu.size)
    full_v = np.zeros(nu.size)
    full_u[keep_mu], full_v[keep_nu] = u, v
    rows, cols = np.nonzero(F)
    flows = [(int(keep_mu[i]), int(keep_nu[j]), float(F[i, j])) for i, j in zip(rows, cols)]
    return TransportPlan(flows, cost, full_u, full_v, dual)


def w1_1d(mu: DiscreteMeasure1D, nu: DiscreteMeasure1D) -> float:
    """``int |F_mu - F_nu|`` for probability measures on the line."""
    for m, name in ((mu, "mu"), (nu, "nu")):
        if abs(m.total_mass - 1.0) > PROBABILITY_TOL or np.any(m.weights < 0):
            raise InvalidArgument(f"{name} must be a probability measure")
    return zeta_p_1d(mu - nu, 1)
