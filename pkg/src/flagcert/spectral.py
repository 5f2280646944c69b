"""Signless Laplacian spectra and the per-edge Rayleigh bound.

Everything that can be exact is exact: edge statistics, the test-vector
quadratic form, homomorphism identities and bounds are integers or
Fractions. Floating point is confined to eigenvalues, which come from a
cyclic Jacobi solver.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exactmath import format_rational
from .graphs import (
    Graph,
    PreconditionError,
    UnsupportedError,
    _bits,
    hom_p3,
    hom_p4,
    is_triangle_free,
)

Q_RATIO = Fraction(15, 94)
EIGEN_SUM_RATIO = Fraction(4, 25)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class ConvergenceError(ArithmeticError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


def signless_laplacian(g: Graph) -> np.ndarray:
    """``Q = A + D`` as a float array with integer entries."""
    q = g.adjacency_matrix().astype(float)
    q[np.diag_indices(g.n)] = g.degrees()
    return q


def adjacency(g: Graph) -> np.ndarray:
    return g.adjacency_matrix().astype(float)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def full_spectrum(m, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.

    Stops once the off-diagonal Frobenius norm drops below ``tol * n``.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix must be symmetric")
    threshold = tol * max(n, 1)
    for _ in range(max_sweeps):
        if _off_norm(a) < threshold:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
    residual = _off_norm(a)
    if residual < threshold:
        return np.sort(np.diag(a))
    raise ConvergenceError(
        f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {residual:.3e})",
        residual,
    )


def smallest_eigenvalue(m) -> float:
    return float(full_spectrum(m)[0])


def q_min(g: Graph) -> float:
    """Smallest eigenvalue of the signless Laplacian of ``g``."""
    if g.n == 0:
        raise ValueError("empty vertex set has no spectrum")
    return smallest_eigenvalue(signless_laplacian(g))


# ---------------------------------------------------------------------------
# per-edge bound


@lru_cache(maxsize=256)
def _triangle_free(g: Graph) -> bool:
    return is_triangle_free(g)


def _require_tf_edge(g: Graph, x: int, y: int) -> None:
    if not (0 <= x < g.n and 0 <= y < g.n) or not g.has_edge(x, y):
        raise PreconditionError(f"{x}-{y} is not an edge")
    if not _triangle_free(g):
        raise PreconditionError("graph contains a triangle")


@dataclass(frozen=True)
class EdgeStats:
    """Quantities entering the Rayleigh bound for the edge ``xy``.

    ``m_xy`` counts ordered pairs ``(u, v)`` with ``u ~ x``, ``v ~ y`` and
    ``u ~ v``; the edge itself contributes through ``(u, v) = (y, x)``.
    """

    x: int
    y: int
    deg_x: int
    deg_y: int
    w_x: int
    w_y: int
    m_xy: int

    @property
    def numerator(self) -> int:
        return self.w_x + self.w_y - 2 * self.m_xy

    @property
    def bound(self) -> Fraction:
        return Fraction(self.numerator, self.deg_x + self.deg_y)


def _walks2(g: Graph, x: int) -> int:
    return sum(g.adj[u].bit_count() for u in _bits(g.adj[x]))


def edge_stats(g: Graph, x: int, y: int) -> EdgeStats:
    _require_tf_edge(g, x, y)
    adj = g.adj
    m_xy = sum((adj[u] & adj[y]).bit_count() for u in _bits(adj[x]))
    return EdgeStats(
        x=x,
        y=y,
        deg_x=g.degree(x),
        deg_y=g.degree(y),
        w_x=_walks2(g, x),
        w_y=_walks2(g, y),
        m_xy=m_xy,
    )


def test_vector(g: Graph, x: int, y: int) -> list[int]:
    """+1 on neighbours of ``x``, -1 on neighbours of ``y``, 0 elsewhere."""
    _require_tf_edge(g, x, y)
    z = [0] * g.n
    for v in _bits(g.adj[x]):
        z[v] = 1
    for v in _bits(g.adj[y]):
        z[v] = -1
    return z


test_vector.__test__ = False  # keep pytest from collecting it


def quadratic_form_q(g: Graph, z) -> int:
    """``z^T Q z`` in integers."""
    diag = sum(zv * zv * g.degree(v) for v, zv in enumerate(z))
    off = sum(z[u] * z[v] for u, v in g.edges())
    return diag + 2 * off


def rayleigh_identity(g: Graph, x: int, y: int) -> tuple[int, int]:
    """``(z^T Q z, w_x + w_y - 2 m_xy)``; equal for every triangle-free graph."""
    z = test_vector(g, x, y)
    return quadratic_form_q(g, z), edge_stats(g, x, y).numerator


def all_edge_stats(g: Graph) -> list[EdgeStats]:
    return [edge_stats(g, x, y) for x, y in g.edges()]


def lemma1_bound(g: Graph) -> Fraction:
    """Tightest per-edge Rayleigh upper bound on the smallest Q-eigenvalue."""
    if g.edge_count == 0:
        raise PreconditionError("graph has no edges")
    if not _triangle_free(g):
        raise PreconditionError("graph contains a triangle")
    return min(s.bound for s in all_edge_stats(g))


# ---------------------------------------------------------------------------
# bipartization distance and expander mixing

MAX_D2_N = 16
MAX_EXHAUSTIVE_SUBSET_N = 14


def max_cut(g: Graph) -> int:
    if g.n > MAX_D2_N:
        raise UnsupportedError(f"brute-force max cut is limited to n <= {MAX_D2_N}")
    if g.n <= 1:
        return 0
    adj = g.adj
    full = (1 << g.n) - 1
    best = 0
    # the last vertex stays on the complement side
    for side in range(1 << (g.n - 1)):
        other = full & ~side
        cut = sum((adj[u] & other).bit_count() for u in _bits(side))
        if cut > best:
            best = cut
    return best


def d2_bruteforce(g: Graph) -> int:
    """Minimum number of edges whose removal leaves ``g`` bipartite."""
    return g.edge_count - max_cut(g)


@dataclass(frozen=True)
class ExpanderMixingReport:
    n: int
    degree: int
    lambda_min: float
    subsets_checked: int
    exhaustive: bool
    holds: bool
    worst_slack: float
    worst_subset: tuple[int, ...]


def expander_mixing_check(
    g: Graph, tol: float = 1e-6, samples: int = 100_000, seed: int = 0
) -> ExpanderMixingReport:
    """Check ``e(S) >= |S| (|S| d + (n - |S|) lambda_min) / (2n)`` over subsets.

    Every subset is tried when ``n <= 14``; otherwise ``samples`` uniformly
    random subsets drawn from ``seed``.
    """
    if not g.is_regular():
        raise PreconditionError("expander mixing check needs a regular graph")
    n = g.n
    d = g.degree(0) if n else 0
    lam = smallest_eigenvalue(adjacency(g)) if n else 0.0
    exhaustive = n <= MAX_EXHAUSTIVE_SUBSET_N
    if exhaustive:
        subsets = range(1 << n)
    else:
        rng = random.Random(seed)
        subsets = (rng.getrandbits(n) for _ in range(samples))
    worst, worst_set, count = math.inf, 0, 0
    for s in subsets:
        count += 1
        size = s.bit_count()
        inside = sum((g.adj[u] & s).bit_count() for u in _bits(s)) // 2
        rhs = size * (size * d + (n - size) * lam) / (2 * n) if n else 0.0
        slack = inside - rhs
        if slack < worst:
            worst, worst_set = slack, s
    return ExpanderMixingReport(
        n=n,
        degree=d,
        lambda_min=lam,
        subsets_checked=count,
        exhaustive=exhaustive,
        holds=worst >= -tol,
        worst_slack=worst,
        worst_subset=tuple(_bits(worst_set)),
    )


# ---------------------------------------------------------------------------
# per-graph report

EDGE_BOUND_TOL = 1e-8
HOM_Q_TOL = 1e-6
Q_RATIO_TOL = 1e-8
D2_TOL = 1e-6
PSD_TOL = 1e-9


def is_bipartite(g: Graph) -> bool:
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in _bits(g.adj[u]):
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def graph_report(g: Graph, with_d2: bool = True) -> dict:
    """Run every spectral check on one triangle-free graph.

    Returns a JSON-ready row; ``pass_flags`` maps check name to outcome and
    only lists checks that apply to ``g``.
    """
    if not _triangle_free(g):
        raise PreconditionError("graph contains a triangle")
    n = g.n
    spectrum = full_spectrum(signless_laplacian(g))
    qn = float(spectrum[0])
    p3, p4 = hom_p3(g), hom_p4(g)
    flags: dict[str, bool] = {}
    flags["psd"] = qn >= -PSD_TOL
    if is_bipartite(g):
        flags["bipartite_zero"] = abs(qn) <= PSD_TOL
    flags["identity_p2"] = p3 == sum(d * d for d in g.degrees())
    bound = None
    if g.edge_count:
        stats = all_edge_stats(g)
        flags["identity_p3"] = p4 == sum(s.numerator for s in stats)
        flags["rayleigh"] = all(
            quadratic_form_q(g, test_vector(g, s.x, s.y)) == s.numerator for s in stats
        )
        bound = min(s.bound for s in stats)
        flags["edge_bound"] = qn <= float(bound) + EDGE_BOUND_TOL
    flags["hom_q"] = qn * p3 <= p4 + HOM_Q_TOL * p3
    flags["q_ratio"] = qn <= float(Q_RATIO * n) + Q_RATIO_TOL
    # hom_s(P4) <= (15n/94) hom_s(P3), exact
    flags["hom_ratio"] = 94 * p4 <= 15 * n * p3
    d2 = None
    if with_d2 and n <= MAX_D2_N:
        d2 = d2_bruteforce(g)
        flags["d2"] = d2 >= qn * n / 4 - D2_TOL
    if g.is_regular():
        lam = full_spectrum(adjacency(g))
        d = g.degree(0)
        flags["regular_shift"] = bool(abs(qn - (lam[0] + d)) <= 1e-8)
        flags["eigen_sum"] = bool(lam[-1] + lam[0] <= float(EIGEN_SUM_RATIO * n) + 1e-8)
        if n <= MAX_EXHAUSTIVE_SUBSET_N:
            flags["expander_mixing"] = expander_mixing_check(g).holds
    return {
        "graph": g.to_literal(),
        "n": n,
        "q_n": float(f"{qn:.12g}"),
        "lemma1_bound": None if bound is None else format_rational(bound),
        "hom_p3": p3,
        "hom_p4": p4,
        "d2": d2,
        "pass_flags": flags,
    }
