"""Small simple graphs as adjacency bitsets.

Besides the :class:`Graph` container this module provides canonical codes
(exhaustive minimal relabeling, pruned), enumeration of triangle-free graphs
up to isomorphism, strong-homomorphism counts, induced densities and
blowups.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, NamedTuple, Sequence

MAX_VERTICES = 128
MAX_CANONICAL_N = 10
MAX_ENUMERATE_N = 8


class GraphLiteralError(ValueError):
    pass


class UnsupportedError(ValueError):
    """Input outside the supported size range of an operation."""


class PreconditionError(ValueError):
    pass


_LITERAL_RE = re.compile(r"(0|[1-9][0-9]*):(.*)")
_EDGE_RE = re.compile(r"(0|[1-9][0-9]*)-(0|[1-9][0-9]*)")


class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    ``adj[v]`` is an int whose bit ``u`` is set iff ``uv`` is an edge.
    """

    __slots__ = ("n", "adj", "_hash")

    def __init__(self, n: int, adj: Sequence[int]):
        if not 0 <= n <= MAX_VERTICES:
            raise UnsupportedError(f"graphs are limited to {MAX_VERTICES} vertices, got {n}")
        adj = tuple(adj)
        if len(adj) != n:
            raise ValueError("adjacency length does not match vertex count")
        full = (1 << n) - 1
        for v, row in enumerate(adj):
            if row & ~full or row >> v & 1:
                raise ValueError(f"bad adjacency row for vertex {v}")
            r = row
            while r:
                low = r & -r
                u = low.bit_length() - 1
                if not adj[u] >> v & 1:
                    raise ValueError(f"adjacency not symmetric at {v}-{u}")
                r ^= low
        self.n = n
        self.adj = adj
        self._hash = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if not 0 <= n <= MAX_VERTICES:
            raise UnsupportedError(f"graphs are limited to {MAX_VERTICES} vertices, got {n}")
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise ValueError(f"invalid edge {u}-{v} for {n} vertices")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, adj)

    @classmethod
    def from_literal(cls, text: str) -> Graph:
        """Parse ``"n:a-b,c-d,..."``. Endpoint order within an edge is free."""
        if not isinstance(text, str):
            raise GraphLiteralError(f"graph literal must be a string, got {type(text).__name__}")
        m = _LITERAL_RE.fullmatch(text)
        if not m:
            raise GraphLiteralError(f"malformed graph literal {text!r}")
        n = int(m.group(1))
        if n > MAX_VERTICES:
            raise GraphLiteralError(f"graph literal {text!r} exceeds {MAX_VERTICES} vertices")
        seen = set()
        edges = []
        body = m.group(2)
        for token in body.split(",") if body else []:
            em = _EDGE_RE.fullmatch(token)
            if not em:
                raise GraphLiteralError(f"malformed edge {token!r} in {text!r}")
            u, v = int(em.group(1)), int(em.group(2))
            if u == v or u >= n or v >= n:
                raise GraphLiteralError(f"invalid edge {token!r} in {text!r}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphLiteralError(f"duplicate edge {token!r} in {text!r}")
            seen.add(key)
            edges.append(key)
        return cls.from_edges(n, edges)

    def to_literal(self) -> str:
        return f"{self.n}:" + ",".join(f"{u}-{v}" for u, v in self.edges())

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u] >> (u + 1) << (u + 1))]

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.adj) // 2

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.adj]

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def is_regular(self) -> bool:
        return len(set(self.degrees())) <= 1

    def induced(self, vertices: Sequence[int]) -> Graph:
        """Induced subgraph; ``vertices[i]`` becomes vertex ``i``."""
        adj = []
        for v in vertices:
            row = 0
            for i, u in enumerate(vertices):
                if self.adj[v] >> u & 1:
                    row |= 1 << i
            adj.append(row)
        return Graph(len(vertices), adj)

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Vertex ``v`` becomes ``perm[v]``."""
        inv = [0] * self.n
        for v, p in enumerate(perm):
            inv[p] = v
        return self.induced(inv)

    def adjacency_matrix(self):
        import numpy as np

        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, self.adj))
        return self._hash

    def __repr__(self):
        return f"Graph({self.to_literal()!r})"


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


# ---------------------------------------------------------------------------
# named graphs


def empty_graph(n: int) -> Graph:
    return Graph(n, [0] * n)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def path_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def cycle_graph(k: int) -> Graph:
    if k < 3:
        raise ValueError("cycles need at least 3 vertices")
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def star_graph(leaves: int) -> Graph:
    return complete_bipartite(1, leaves)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> Graph:
    edges, offset = [], 0
    for g in graphs:
        edges += [(u + offset, v + offset) for u, v in g.edges()]
        offset += g.n
    return Graph.from_edges(offset, edges)


# ---------------------------------------------------------------------------
# structure


def is_triangle_free(g: Graph) -> bool:
    adj = g.adj
    for u in range(g.n):
        for v in _bits(adj[u] >> (u + 1) << (u + 1)):
            if adj[u] & adj[v]:
                return False
    return True


def find_triangle(g: Graph) -> tuple[int, int, int] | None:
    adj = g.adj
    for u in range(g.n):
        for v in _bits(adj[u] >> (u + 1) << (u + 1)):
            common = adj[u] & adj[v]
            if common:
                return (u, v, (common & -common).bit_length() - 1)
    return None


class CanonicalCode(NamedTuple):
    """Vertex count plus the minimal upper-triangle row-major edge bitstring.

    ``bits`` holds the bitstring as an integer with pair ``(0, 1)`` as the
    most significant bit, so numeric order is lexicographic order.
    """

    n: int
    bits: int

    def to_graph(self) -> Graph:
        n, edges = self.n, []
        pos = n * (n - 1) // 2
        for i in range(n):
            for j in range(i + 1, n):
                pos -= 1
                if self.bits >> pos & 1:
                    edges.append((i, j))
        return Graph.from_edges(n, edges)


def _twin_representatives(adj: Sequence[int], cell: Sequence[int]) -> list[int]:
    # swapping two twins is an automorphism that fixes everything else
    seen_open, seen_closed, reps = set(), set(), []
    for v in cell:
        o, c = adj[v], adj[v] | (1 << v)
        if o in seen_open or c in seen_closed:
            continue
        seen_open.add(o)
        seen_closed.add(c)
        reps.append(v)
    return reps


def _min_code(adj: Sequence[int], cells: list[list[int]]) -> int:
    """Minimal concatenation of the remaining rows given an ordered partition.

    The next position must be taken from the first cell. Its row is fixed by
    how it splits each cell into non-neighbours (placed first) and neighbours.
    """
    if sum(len(c) for c in cells) <= 1:
        return 0
    best_key, branches = None, []
    for v in _twin_representatives(adj, cells[0]):
        key, new_cells, row = [], [], 0
        for idx, cell in enumerate(cells):
            members = [u for u in cell if u != v] if idx == 0 else cell
            zeros = [u for u in members if not adj[v] >> u & 1]
            ones = [u for u in members if adj[v] >> u & 1]
            key.append(-len(zeros))
            row = (row << len(members)) | ((1 << len(ones)) - 1)
            new_cells.extend(c for c in (zeros, ones) if c)
        key = tuple(key)
        if best_key is None or key < best_key:
            best_key, branches = key, [(row, new_cells)]
        elif key == best_key:
            branches.append((row, new_cells))
    rest_len = sum(len(c) for c in branches[0][1])
    rest_bits = rest_len * (rest_len - 1) // 2
    return min((row << rest_bits) | _min_code(adj, sub) for row, sub in branches)


def _code_with_fixed_prefix(g: Graph, fixed: int) -> int:
    n, adj = g.n, g.adj
    rest = list(range(fixed, n))

    def sig(u):
        return tuple(adj[p] >> u & 1 for p in range(fixed))

    rest.sort(key=sig)
    bits = 0
    for i in range(fixed):
        for j in range(i + 1, fixed):
            bits = (bits << 1) | (adj[i] >> j & 1)
        for u in rest:
            bits = (bits << 1) | (adj[i] >> u & 1)
    cells: list[list[int]] = []
    prev = None
    for u in rest:
        s = sig(u)
        if s != prev:
            cells.append([])
            prev = s
        cells[-1].append(u)
    k = len(rest)
    return (bits << (k * (k - 1) // 2)) | _min_code(adj, cells)


def canonical_code(g: Graph) -> CanonicalCode:
    """Lexicographically minimal edge bitstring over all relabelings."""
    if g.n > MAX_CANONICAL_N:
        raise UnsupportedError(f"canonical codes are limited to n <= {MAX_CANONICAL_N}, got {g.n}")
    return CanonicalCode(g.n, _code_with_fixed_prefix(g, 0))


def rooted_canonical_code(g: Graph, roots: int) -> CanonicalCode:
    """Like :func:`canonical_code` but vertices ``0..roots-1`` stay in place."""
    if g.n - roots > MAX_CANONICAL_N:
        raise UnsupportedError("too many unrooted vertices to canonicalize")
    return CanonicalCode(g.n, _code_with_fixed_prefix(g, roots))


def canonical_form(g: Graph) -> Graph:
    return canonical_code(g).to_graph()


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.edge_count != h.edge_count or sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_code(g) == canonical_code(h)


def family_key(g: Graph) -> tuple[int, int]:
    """Sort key of a family member: edge count, then canonical code."""
    return (g.edge_count, canonical_code(g).bits)


# ---------------------------------------------------------------------------
# enumeration


def _independent_sets(g: Graph) -> Iterable[int]:
    def grow(start: int, chosen: int, blocked: int):
        yield chosen
        for v in range(start, g.n):
            if not blocked >> v & 1:
                yield from grow(v + 1, chosen | (1 << v), blocked | g.adj[v])

    yield from grow(0, 0, 0)


@lru_cache(maxsize=None)
def _all_triangle_free(n: int) -> tuple[Graph, ...]:
    if n == 1:
        return (empty_graph(1),)
    found: dict[CanonicalCode, Graph] = {}
    for base in _all_triangle_free(n - 1):
        degs = base.degrees()
        for nbhd in _independent_sets(base):
            k = nbhd.bit_count()
            # the new vertex must have minimum degree; every graph arises this way
            if any(degs[u] + (nbhd >> u & 1) < k for u in range(base.n)):
                continue
            adj = list(base.adj) + [nbhd]
            for u in _bits(nbhd):
                adj[u] |= 1 << (n - 1)
            g = Graph(n, adj)
            code = canonical_code(g)
            if code not in found:
                found[code] = code.to_graph()
    graphs = sorted(found.values(), key=family_key)
    return tuple(graphs)


def enumerate_triangle_free(n: int, min_edges: int = 0) -> list[Graph]:
    """All triangle-free graphs on ``n`` vertices with at least ``min_edges``
    edges, one canonical representative per isomorphism class, ordered by
    (edge count, canonical code)."""
    if not 1 <= n <= MAX_ENUMERATE_N:
        raise UnsupportedError(f"enumeration supports 1 <= n <= {MAX_ENUMERATE_N}, got {n}")
    return [g for g in _all_triangle_free(n) if g.edge_count >= min_edges]


# ---------------------------------------------------------------------------
# homomorphism counts and densities


def _count_maps(f: Graph, g: Graph, injective: bool) -> int:
    k = f.n
    order = list(range(k))
    images = [0] * k
    full = (1 << g.n) - 1

    def extend(i: int, used: int) -> int:
        if i == k:
            return 1
        v = order[i]
        cand = full & ~used if injective else full
        for j in range(i):
            u = order[j]
            img = images[j]
            if f.adj[v] >> u & 1:
                cand &= g.adj[img]
            else:
                cand &= ~g.adj[img]
        total = 0
        for w in _bits(cand):
            images[i] = w
            total += extend(i + 1, used | (1 << w))
        return total

    return extend(0, 0)


def hom_s_bruteforce(f: Graph, g: Graph) -> int:
    """Strong homomorphisms ``f -> g`` by exhaustive extension.

    Non-injective maps count: a non-adjacent pair of ``f`` may share an
    image, since a vertex is not adjacent to itself.
    """
    return _count_maps(f, g, injective=False)


def injective_hom_s(f: Graph, g: Graph) -> int:
    return _count_maps(f, g, injective=True)


def aut_count(f: Graph) -> int:
    return injective_hom_s(f, f)


def hom_p3(g: Graph) -> int:
    """hom_s(P3, g): pairs of neighbours of a middle vertex that are non-adjacent."""
    total = 0
    for b in range(g.n):
        nb = g.adj[b]
        d = nb.bit_count()
        inside = sum((g.adj[a] & nb).bit_count() for a in _bits(nb))
        total += d * d - inside
    return total


def hom_p4(g: Graph) -> int:
    """hom_s(P4, g) summed over the ordered middle edge ``(b, c)``."""
    total = 0
    adj = g.adj
    for b in range(g.n):
        for c in _bits(adj[b]):
            left = adj[b] & ~adj[c]
            right = adj[c] & ~adj[b]
            cross = sum((adj[x] & right).bit_count() for x in _bits(left))
            total += left.bit_count() * right.bit_count() - cross
    return total


_P3_CODE = None
_P4_CODE = None


def hom_s(f: Graph, g: Graph) -> int:
    """Number of strong homomorphisms from ``f`` to ``g``.

    Paths on 3 and 4 vertices use closed formulas; anything else is counted
    by :func:`hom_s_bruteforce`.
    """
    global _P3_CODE, _P4_CODE
    if _P3_CODE is None:
        _P3_CODE = canonical_code(path_graph(3))
        _P4_CODE = canonical_code(path_graph(4))
    if f.n == 3 and f.edge_count == 2 and canonical_code(f) == _P3_CODE:
        return hom_p3(g)
    if f.n == 4 and f.edge_count == 3 and canonical_code(f) == _P4_CODE:
        return hom_p4(g)
    return hom_s_bruteforce(f, g)


def induced_copies(f: Graph, h: Graph) -> int:
    """Number of vertex subsets of ``h`` inducing a copy of ``f``."""
    if f.n > h.n:
        return 0
    target = canonical_code(f)
    e = f.edge_count
    count = 0
    for subset in combinations(range(h.n), f.n):
        sub = h.induced(subset)
        if sub.edge_count == e and canonical_code(sub) == target:
            count += 1
    return count


def induced_density(f: Graph, h: Graph) -> Fraction:
    """Probability that a uniform ``|V(f)|``-subset of ``h`` induces ``f``."""
    if f.n > h.n:
        raise PreconditionError("pattern has more vertices than host")
    return Fraction(induced_copies(f, h), comb(h.n, f.n))


def blowup(g: Graph, b: int) -> Graph:
    """Replace each vertex by ``b`` pairwise non-adjacent copies.

    Copy ``i`` of vertex ``v`` is vertex ``v * b + i``.
    """
    if b < 1:
        raise ValueError("blowup factor must be at least 1")
    if b * g.n > MAX_VERTICES:
        raise UnsupportedError(f"blowup would exceed {MAX_VERTICES} vertices")
    edges = [
        (u * b + i, v * b + j) for u, v in g.edges() for i in range(b) for j in range(b)
    ]
    return Graph.from_edges(g.n * b, edges)
