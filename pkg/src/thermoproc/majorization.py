"""Thermo-majorization order, qubit reachability, and extreme points.

The reachability order on energy-diagonal states is decided by comparing
Lorenz curves built along the beta-order: levels sorted by p_k / tau_k
descending, cumulative Gibbs weight on the x-axis (normalized, so curves
live in the unit square), cumulative population on the y-axis.  ``p`` can
reach ``q`` by a Gibbs-stochastic matrix iff p's curve lies on or above q's
everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .core import Hamiltonian, PopulationVector, gibbs_state

CURVE_TOL = 1.0e-12
VERTEX_DEDUP_DECIMALS = 12
BISECTION_ITERATIONS = 64  # interval width 2^-64, far below the 1e-12 target


@dataclass(frozen=True)
class LorenzCurve:
    """Piecewise-linear curve from (0, 0) to (1, 1), concave by construction."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs, ys = self.xs, self.ys
        if xs[0] != 0.0 or ys[0] != 0.0:
            raise ValueError("curve must start at (0, 0)")
        if abs(xs[-1] - 1.0) > CURVE_TOL or abs(ys[-1] - 1.0) > CURVE_TOL:
            raise ValueError("curve must end at (1, 1)")
        if np.any(np.diff(xs) <= 0.0):
            raise ValueError("x breakpoints must be strictly increasing")
        slopes = np.diff(ys) / np.diff(xs)
        jumps = np.diff(slopes)
        if jumps.size and jumps.max() > 1.0e-9 * max(1.0, float(np.abs(slopes).max())):
            raise ValueError("curve is not concave")

    def value_at(self, x):
        return np.interp(x, self.xs, self.ys)


def _as_array(p):
    return p.probs if isinstance(p, PopulationVector) else np.asarray(p, dtype=np.float64)


def beta_order(p, gibbs) -> np.ndarray:
    """Indices sorted by p_k / tau_k descending, ties broken by ascending index."""
    parr, tarr = _as_array(p), _as_array(gibbs)
    if parr.size != tarr.size:
        raise ValueError("dimension mismatch")
    if tarr.min() <= 0.0:
        raise ValueError("gibbs vector must be strictly positive")
    ratios = parr / tarr
    order = sorted(range(parr.size), key=lambda k: (-ratios[k], k))
    return np.array(order, dtype=np.intp)


def lorenz_curve(p, gibbs) -> LorenzCurve:
    """Cumulative (Gibbs weight, population) breakpoints along the beta-order."""
    parr, tarr = _as_array(p), _as_array(gibbs)
    order = beta_order(parr, tarr)
    xs = np.concatenate(([0.0], np.cumsum(tarr[order])))
    ys = np.concatenate(([0.0], np.cumsum(parr[order])))
    return LorenzCurve(xs, ys)


def thermo_majorizes(p, q, gibbs, tol: float = CURVE_TOL) -> bool:
    """True iff p's Lorenz curve dominates q's at every breakpoint of either."""
    cp = lorenz_curve(p, gibbs)
    cq = lorenz_curve(q, gibbs)
    grid = np.union1d(cp.xs, cq.xs)
    return bool(np.all(cp.value_at(grid) >= cq.value_at(grid) - tol))


def qubit_tp_reachable(p: float, p_target: float, gamma: float,
                       tol: float = CURVE_TOL) -> bool:
    """Ground population p can reach p_target on a single qubit.

    The reachable interval is [p, p_beta] for p below the Gibbs weight gamma
    and [p_beta, p] above it, where p_beta = 1 - p (1-gamma)/gamma is the
    output of the extremal swap.  At p = gamma both ends collapse to gamma.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= p_target <= 1.0):
        raise ValueError("populations must lie in [0, 1]")
    if not (0.0 < gamma < 1.0):
        raise ValueError("gamma must lie in (0, 1)")
    p_beta = 1.0 - p * (1.0 - gamma) / gamma
    if p <= gamma:
        return p - tol <= p_target <= p_beta + tol
    return p_beta - tol <= p_target <= p + tol


def tp_reach_vertices(p, gibbs):
    """Extreme points of the set reachable from p by Gibbs-stochastic matrices.

    One candidate per permutation pi of the levels: the vector whose Lorenz
    curve equals p's curve sampled at the cumulative Gibbs weights taken in
    pi order.  Duplicates are removed at 1e-12.  Factorial enumeration, so
    the dimension is capped at 6.
    """
    parr, tarr = _as_array(p), _as_array(gibbs)
    dim = parr.size
    if dim > 6:
        raise ValueError("vertex enumeration is limited to dimension <= 6")
    curve = lorenz_curve(parr, tarr)
    seen = {}
    for perm in permutations(range(dim)):
        v = np.zeros(dim)
        x = 0.0
        y_prev = 0.0
        for idx in perm:
            x += tarr[idx]
            y = float(curve.value_at(x))
            v[idx] = y - y_prev
            y_prev = y
        key = tuple(np.round(v, VERTEX_DEDUP_DECIMALS))
        if key not in seen:
            seen[key] = PopulationVector(v)
    return list(seen.values())


def extraction_target(gamma_s: float, eps: float) -> np.ndarray:
    """Product state [gamma_s, 1-gamma_s] x [eps, 1-eps] on basis (g0, g1, e0, e1)."""
    return np.array([
        gamma_s * eps, gamma_s * (1.0 - eps),
        (1.0 - gamma_s) * eps, (1.0 - gamma_s) * (1.0 - eps),
    ])


def extraction_feasible(E: float, W: float, beta: float, eps: float) -> bool:
    """Can [0,1]_S x [1,0]_W reach Gibbs_S x [eps, 1-eps] by a thermal process?"""
    h = Hamiltonian((0.0, W, E, E + W))
    tau = gibbs_state(h, beta)
    gamma_s = 1.0 / (1.0 + math.exp(-beta * E))
    start = np.array([0.0, 0.0, 1.0, 0.0])
    return thermo_majorizes(start, extraction_target(gamma_s, eps), tau)


def min_extraction_error_tp(E: float, W: float, beta: float) -> float:
    """Smallest work-bit ground weight eps reachable from the excited system.

    Bisection on eps over [0, gamma_W]; the upper end (the full Gibbs
    product) is always feasible, and feasibility is monotone in eps on this
    interval (asserted by sampling in the test suite, not proved here).
    64 iterations pin the answer well below 1e-12.
    """
    if not (E > 0.0 and W > 0.0 and beta > 0.0):
        raise ValueError("E, W and beta must be positive")
    if extraction_feasible(E, W, beta, 0.0):
        return 0.0
    lo = 0.0
    hi = 1.0 / (1.0 + math.exp(-beta * W))
    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if extraction_feasible(E, W, beta, mid):
            hi = mid
        else:
            lo = mid
    return hi
