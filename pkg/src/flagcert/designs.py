"""Higman-Sims graph from the extended binary Golay code.

Route: Golay code -> octads form S(5,8,24) -> derive twice at points 22, 23
to get S(3,6,22) -> graph on {inf} + 22 points + 77 blocks. Every stage is
checked exhaustively when it is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .graphs import Graph, _bits

# rows of B in the generator [I_12 | B]; bit 11 is the first column of B
_GOLAY_B = (
    "110111000101",
    "101110001011",
    "011100010111",
    "111000101101",
    "110001011011",
    "100010110111",
    "000101101111",
    "001011011101",
    "010110111001",
    "101101110001",
    "011011100011",
    "111111111110",
)

GOLAY_WEIGHTS = {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


class ConstructionError(RuntimeError):
    pass


class NotStronglyRegular(ValueError):
    def __init__(self, message: str, witness: tuple[int, int] | None = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class BinaryCode:
    length: int
    generators: tuple[int, ...]
    codewords: tuple[int, ...]

    def weight_distribution(self) -> dict[int, int]:
        dist: dict[int, int] = {}
        for w in self.codewords:
            k = w.bit_count()
            dist[k] = dist.get(k, 0) + 1
        return dict(sorted(dist.items()))

    def minimum_distance(self) -> int:
        return min(w.bit_count() for w in self.codewords if w)


@dataclass(frozen=True)
class SteinerSystem:
    t: int
    k: int
    v: int
    blocks: tuple[int, ...]

    def block_sets(self) -> list[tuple[int, ...]]:
        return [tuple(_bits(b)) for b in self.blocks]


@dataclass(frozen=True)
class SrgParams:
    n: int
    d: int
    t: int
    k: int

    def feasible(self) -> bool:
        return self.d * (self.d - self.t - 1) == (self.n - self.d - 1) * self.k

    def as_list(self) -> list[int]:
        return [self.n, self.d, self.t, self.k]


def _span(generators: tuple[int, ...]) -> tuple[int, ...]:
    words = [0]
    for g in generators:
        words += [w ^ g for w in words]
    return tuple(sorted(words))


def golay_code() -> BinaryCode:
    gens = []
    for i, row in enumerate(_GOLAY_B):
        # coordinates 0..11 are the identity part, 12..23 are B
        word = 1 << i
        for j, ch in enumerate(row):
            if ch == "1":
                word |= 1 << (12 + j)
        gens.append(word)
    gens = tuple(gens)
    words = _span(gens)
    code = BinaryCode(24, gens, words)
    if len(set(words)) != 4096:
        raise ConstructionError("generator rows are not independent")
    dist = code.weight_distribution()
    if dist != GOLAY_WEIGHTS:
        raise ConstructionError(f"unexpected weight distribution {dist}")
    closed = set(words)
    if any(a ^ b not in closed for a in gens for b in words):
        raise ConstructionError("code is not closed under addition")
    return code


def octads_to_steiner(code: BinaryCode) -> SteinerSystem:
    octads = tuple(w for w in code.codewords if w.bit_count() == 8)
    if len(octads) != 759:
        raise ConstructionError(f"expected 759 octads, found {len(octads)}")
    cover: dict[int, int] = {}
    for b in octads:
        for five in combinations(_bits(b), 5):
            key = sum(1 << p for p in five)
            cover[key] = cover.get(key, 0) + 1
    for five in combinations(range(24), 5):
        key = sum(1 << p for p in five)
        if cover.get(key, 0) != 1:
            raise ConstructionError(f"5-set {five} lies in {cover.get(key, 0)} octads")
    return SteinerSystem(5, 8, 24, octads)


def derive_s_3_6_22(s: SteinerSystem, fixed: tuple[int, int] = (22, 23)) -> SteinerSystem:
    """Blocks through both ``fixed`` points, with those points removed.

    Remaining points are renumbered ``0..21`` in their original order.
    """
    a, b = fixed
    pair = (1 << a) | (1 << b)
    others = [p for p in range(s.v) if p not in fixed]
    index = {p: i for i, p in enumerate(others)}
    blocks = []
    for blk in s.blocks:
        if blk & pair == pair:
            rest = blk & ~pair
            blocks.append(sum(1 << index[p] for p in _bits(rest)))
    blocks = tuple(sorted(blocks))
    if len(blocks) != 77:
        raise ConstructionError(f"expected 77 derived blocks, found {len(blocks)}")
    v = len(others)
    for triple in combinations(range(v), 3):
        key = sum(1 << p for p in triple)
        hits = sum(1 for blk in blocks if blk & key == key)
        if hits != 1:
            raise ConstructionError(f"triple {triple} lies in {hits} blocks")
    return SteinerSystem(3, 6, v, blocks)


def build_higman_sims(d: SteinerSystem) -> Graph:
    """Vertex 0 is the extra point, 1..22 the design points, 23..99 the blocks."""
    if (d.t, d.k, d.v, len(d.blocks)) != (3, 6, 22, 77):
        raise ConstructionError("need an S(3,6,22) with 77 blocks")
    edges = [(0, 1 + p) for p in range(d.v)]
    base = 1 + d.v
    for i, blk in enumerate(d.blocks):
        edges += [(1 + p, base + i) for p in _bits(blk)]
    for i, j in combinations(range(len(d.blocks)), 2):
        if d.blocks[i] & d.blocks[j] == 0:
            edges.append((base + i, base + j))
    g = Graph.from_edges(base + len(d.blocks), edges)
    params = verify_srg(g)
    if params != SrgParams(100, 22, 0, 6):
        raise ConstructionError(f"built graph has parameters {params}")
    return g


def higman_sims_graph() -> Graph:
    return build_higman_sims(derive_s_3_6_22(octads_to_steiner(golay_code())))


def verify_srg(g: Graph) -> SrgParams:
    """Parameters ``(n, d, t, k)`` of a strongly regular graph.

    Checked twice: by counting common neighbours of every pair, and by the
    integer identity ``A^2 = d I + t A + k (J - I - A)``.
    """
    n = g.n
    if n == 0:
        raise NotStronglyRegular("empty graph")
    degs = g.degrees()
    d = degs[0]
    for v, dv in enumerate(degs):
        if dv != d:
            raise NotStronglyRegular(f"not regular: vertex {v} has degree {dv}, vertex 0 has {d}", (0, v))
    t = k = None
    for u, v in combinations(range(n), 2):
        common = (g.adj[u] & g.adj[v]).bit_count()
        if g.has_edge(u, v):
            if t is None:
                t = common
            elif common != t:
                raise NotStronglyRegular(f"adjacent pair {u}-{v} has {common} common neighbours, expected {t}", (u, v))
        else:
            if k is None:
                k = common
            elif common != k:
                raise NotStronglyRegular(f"non-adjacent pair {u},{v} has {common} common neighbours, expected {k}", (u, v))
    if t is None or k is None:
        raise NotStronglyRegular("complete or edgeless graphs are excluded")
    a = g.adjacency_matrix()
    eye = np.eye(n, dtype=np.int64)
    rhs = d * eye + t * a + k * (np.ones((n, n), dtype=np.int64) - eye - a)
    bad = np.argwhere(a @ a != rhs)
    if bad.size:
        u, v = map(int, bad[0])
        raise NotStronglyRegular(f"matrix identity fails at ({u}, {v})", (u, v))
    params = SrgParams(n, d, t, k)
    if not params.feasible():
        raise NotStronglyRegular(f"parameters {params} violate d(d-t-1) = (n-d-1)k")
    return params


def cluster_eigenvalues(values, gap: float = 1e-3) -> list[tuple[float, int]]:
    """Group sorted eigenvalues closer than ``gap``; returns (mean, multiplicity)."""
    groups: list[list[float]] = []
    for x in sorted(float(v) for v in values):
        if groups and x - groups[-1][-1] < gap:
            groups[-1].append(x)
        else:
            groups.append([x])
    return [(sum(grp) / len(grp), len(grp)) for grp in groups]


def check_pipeline() -> dict:
    """Counts from each construction stage, for reporting."""
    code = golay_code()
    s5 = octads_to_steiner(code)
    s3 = derive_s_3_6_22(s5)
    point_reps = [sum(1 for b in s5.blocks if b >> p & 1) for p in range(24)]
    s3_reps = [sum(1 for b in s3.blocks if b >> p & 1) for p in range(22)]
    inters = {(a & b).bit_count() for a, b in combinations(s3.blocks, 2)}
    return {
        "golay_weights": code.weight_distribution(),
        "golay_min_distance": code.minimum_distance(),
        "octads": len(s5.blocks),
        "quintuples_checked": comb(24, 5),
        "octads_per_point": sorted(set(point_reps)),
        "s3_blocks": len(s3.blocks),
        "s3_blocks_per_point": sorted(set(s3_reps)),
        "s3_intersections": sorted(inters),
    }
