"""Bottleneck and q-Wasserstein distances between persistence diagrams.

Both use the L-infinity ground metric. A point (b, d) may be matched to the
diagonal at cost (d - b) / 2. Essential classes are matched among
themselves by sorted birth; unequal counts give an infinite distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import BadQ, DimMismatch, NonPositiveScale
from .persistence import PersistenceDiagram

DIAGONAL = -1


@dataclass(frozen=True)
class MatchingCert:
    """A matching witnessing a distance.

    Indices address ``diagram_points(A)`` / ``diagram_points(B)``: finite
    pairs first, then essential classes. ``DIAGONAL`` marks a point sent to
    the diagonal.
    """

    pairs: tuple[tuple[int, int], ...]
    cost: float


def diagram_points(d: PersistenceDiagram) -> list[tuple[float, float]]:
    return list(d.finite_pairs) + [(b, math.inf) for b in d.essential_births]


def point_cost(a: tuple[float, float], b: tuple[float, float]) -> float:
    if math.isinf(a[1]) or math.isinf(b[1]):
        if math.isinf(a[1]) and math.isinf(b[1]):
            return abs(a[0] - b[0])
        return math.inf
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def diagonal_cost(a: tuple[float, float]) -> float:
    return (a[1] - a[0]) / 2


def _pair_costs(A: PersistenceDiagram, B: PersistenceDiagram, cert: MatchingCert) -> list[float]:
    pa, pb = diagram_points(A), diagram_points(B)
    out = []
    for i, j in cert.pairs:
        if i == DIAGONAL:
            out.append(diagonal_cost(pb[j]))
        elif j == DIAGONAL:
            out.append(diagonal_cost(pa[i]))
        else:
            out.append(point_cost(pa[i], pb[j]))
    return out


def matching_cost(A: PersistenceDiagram, B: PersistenceDiagram, cert: MatchingCert, q: float | None = None) -> float:
    """Recompute the cost of a certificate: max cost if ``q`` is None, else the q-norm."""
    costs = _pair_costs(A, B, cert)
    if q is None:
        return max(costs, default=0.0)
    return math.fsum(c ** q for c in costs) ** (1.0 / q)


def _check(A: PersistenceDiagram, B: PersistenceDiagram):
    if A.dim != B.dim:
        raise DimMismatch(f"cannot compare H_{A.dim} with H_{B.dim}")


def _essential_pairs(A: PersistenceDiagram, B: PersistenceDiagram):
    n, m = len(A.finite_pairs), len(B.finite_pairs)
    ia = sorted(range(len(A.essential_births)), key=lambda k: A.essential_births[k])
    ib = sorted(range(len(B.essential_births)), key=lambda k: B.essential_births[k])
    return [(n + i, m + j) for i, j in zip(ia, ib)]


def _feasible(cost: np.ndarray, diag_a: np.ndarray, diag_b: np.ndarray, eps: float):
    """Perfect matching in the diagonal-augmented graph using edges of cost <= eps.

    Rows: A points, then diagonal copies of B. Columns: B points, then
    diagonal copies of A.
    """
    n, m = cost.shape
    big = np.zeros((n + m, m + n), dtype=bool)
    big[:n, :m] = cost <= eps
    big[np.arange(n), m + np.arange(n)] = diag_a <= eps
    big[n + np.arange(m), np.arange(m)] = diag_b <= eps
    big[n:, m:] = True
    match = maximum_bipartite_matching(csr_matrix(big), perm_type="column")
    if np.any(match < 0):
        return None
    return match


def bottleneck(A: PersistenceDiagram, B: PersistenceDiagram) -> tuple[float, MatchingCert]:
    _check(A, B)
    if len(A.essential_births) != len(B.essential_births):
        return math.inf, MatchingCert((), math.inf)
    pairs = _essential_pairs(A, B)

    fa, fb = A.finite_pairs, B.finite_pairs
    n, m = len(fa), len(fb)
    if n + m:
        cost = np.array([[point_cost(a, b) for b in fb] for a in fa], dtype=np.float64).reshape(n, m)
        diag_a = np.array([diagonal_cost(a) for a in fa], dtype=np.float64)
        diag_b = np.array([diagonal_cost(b) for b in fb], dtype=np.float64)
        candidates = np.unique(np.concatenate([cost.ravel(), diag_a, diag_b]))
        lo, hi = 0, len(candidates) - 1
        match = _feasible(cost, diag_a, diag_b, candidates[hi])
        while lo < hi:
            mid = (lo + hi) // 2
            trial = _feasible(cost, diag_a, diag_b, candidates[mid])
            if trial is None:
                lo = mid + 1
            else:
                hi, match = mid, trial
        for r, c in enumerate(match[: n + m]):
            if r < n and c < m:
                pairs.append((r, int(c)))
            elif r < n:
                pairs.append((r, DIAGONAL))
            elif c < m:
                pairs.append((DIAGONAL, int(c)))
    cert = MatchingCert(tuple(pairs), 0.0)
    value = matching_cost(A, B, cert)
    return value, MatchingCert(cert.pairs, value)


def wasserstein(A: PersistenceDiagram, B: PersistenceDiagram, q: float = 1.0) -> tuple[float, MatchingCert]:
    _check(A, B)
    q = float(q)
    if not (math.isfinite(q) and q >= 1):
        raise BadQ(f"Wasserstein order must be a finite real >= 1, got {q}")
    if len(A.essential_births) != len(B.essential_births):
        return math.inf, MatchingCert((), math.inf)
    pairs = _essential_pairs(A, B)
    fa, fb = A.finite_pairs, B.finite_pairs
    n, m = len(fa), len(fb)
    if n + m:
        big = np.zeros((n + m, m + n), dtype=np.float64)
        big[:n, :m] = np.array([[point_cost(a, b) ** q for b in fb] for a in fa], dtype=np.float64).reshape(n, m)
        big[:n, m:] = np.array([diagonal_cost(a) ** q for a in fa]).reshape(n, 1)
        big[n:, :m] = np.array([diagonal_cost(b) ** q for b in fb]).reshape(1, m)
        rows, cols = linear_sum_assignment(big)
        for r, c in zip(rows, cols):
            if r < n and c < m:
                pairs.append((int(r), int(c)))
            elif r < n:
                pairs.append((int(r), DIAGONAL))
            elif c < m:
                pairs.append((DIAGONAL, int(c)))
    cert = MatchingCert(tuple(pairs), 0.0)
    value = matching_cost(A, B, cert, q)
    return value, MatchingCert(cert.pairs, value)


def scale_diagram(A: PersistenceDiagram, w: float) -> PersistenceDiagram:
    if not w > 0:
        raise NonPositiveScale(f"scale factor must be positive, got {w}")
    return PersistenceDiagram(
        A.dim,
        tuple((w * b, w * d) for b, d in A.finite_pairs),
        tuple(w * b for b in A.essential_births),
    )
