"""Flag-algebra certificates for triangle-free graph density inequalities.

A certificate lists expressions that are nonnegative by construction, each a
square ``(sum c_i F_i)^2`` of same-type flags, optionally multiplied by one
more flag of that type. Averaging an expression over its roots gives a
linear combination of level-``L`` graph densities. Those coefficient rows
form ``M``. The certificate is valid when the multipliers ``lambda >= 0``
satisfy ``lambda . M <= c`` coordinate-wise, where ``c`` expands the goal
``a * p(P3) + b * p(P4)`` over the same basis.

All arithmetic here is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, perm
from pathlib import Path
from typing import Iterable, Sequence

from .exactmath import (
    RationalMatrix,
    RationalSyntaxError,
    RationalVector,
    format_rational,
    parse_rational,
    vec_mat,
)
from .graphs import (
    CanonicalCode,
    Graph,
    GraphLiteralError,
    canonical_code,
    enumerate_triangle_free,
    find_triangle,
    induced_density,
    path_graph,
    rooted_canonical_code,
)

MAX_TYPE_SIZE = 3
MAX_LEVEL = 6


class FlagError(ValueError):
    pass


class SupportError(ValueError):
    pass


class CertificateError(ValueError):
    """Malformed or structurally invalid certificate input."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


# ---------------------------------------------------------------------------
# flags


@dataclass(frozen=True, eq=False)
class Flag:
    """Graph whose vertices ``0..roots-1`` are ordered roots.

    Equality is isomorphism fixing every root.
    """

    graph: Graph
    roots: int

    def __post_init__(self):
        if not 0 <= self.roots <= self.graph.n:
            raise FlagError(f"root count {self.roots} out of range for {self.graph.n} vertices")

    @property
    def size(self) -> int:
        return self.graph.n

    @property
    def type(self) -> Graph:
        return self.graph.induced(range(self.roots))

    @property
    def key(self) -> CanonicalCode:
        return _rooted_key(self.graph, self.roots)

    def canonical(self) -> Flag:
        return Flag(self.key.to_graph(), self.roots)

    def __eq__(self, other):
        if not isinstance(other, Flag):
            return NotImplemented
        return self.roots == other.roots and self.key == other.key

    def __hash__(self):
        return hash((self.roots, self.key))

    def __repr__(self):
        return f"Flag({self.graph.to_literal()!r}, roots={self.roots})"


@lru_cache(maxsize=None)
def _rooted_key(g: Graph, roots: int) -> CanonicalCode:
    return rooted_canonical_code(g, roots)


def _sub_flag_key(h: Graph, roots: Sequence[int], rest: Sequence[int]) -> CanonicalCode:
    verts = list(roots) + list(rest)
    return _rooted_key(h.induced(verts), len(roots))


@lru_cache(maxsize=None)
def flag_catalog(sigma: Graph, size: int) -> tuple[Flag, ...]:
    """Every triangle-free flag of type ``sigma`` on ``size`` vertices, once
    per rooted isomorphism class."""
    s = sigma.n
    if size < s:
        raise FlagError("flag smaller than its type")
    if size == 0:
        return (Flag(Graph(0, []), 0),)
    found: dict[CanonicalCode, Flag] = {}
    for h in enumerate_triangle_free(size):
        for theta in permutations(range(size), s):
            if h.induced(theta) != sigma:
                continue
            rest = [v for v in range(size) if v not in theta]
            key = _sub_flag_key(h, theta, rest)
            if key not in found:
                found[key] = Flag(key.to_graph(), s)
    return tuple(found[k] for k in sorted(found, key=lambda c: c.bits))


def _check_same_type(flags: Iterable[Flag]) -> Graph:
    sigma = None
    for f in flags:
        t = f.type
        if sigma is None:
            sigma = t
        elif t != sigma:
            raise FlagError(f"type mismatch: {t.to_literal()} vs {sigma.to_literal()}")
    if sigma is None:
        raise FlagError("no flags given")
    return sigma


def flag_product(f1: Flag, f2: Flag) -> list[tuple[Fraction, Flag]]:
    """Expand ``f1 * f2`` over flags on ``|f1| + |f2| - s`` vertices.

    The coefficient of ``H`` is the probability that a uniformly random split
    of the unrooted vertices of ``H`` into parts of sizes ``|f1| - s`` and
    ``|f2| - s`` induces ``f1`` on the first part and ``f2`` on the second.
    """
    sigma = _check_same_type((f1, f2))
    total = f1.size + f2.size - sigma.n
    if total > MAX_LEVEL:
        raise FlagError(f"product level {total} exceeds {MAX_LEVEL}")
    return list(_product(f1.canonical(), f2.canonical(), sigma))


@lru_cache(maxsize=None)
def _product(f1: Flag, f2: Flag, sigma: Graph) -> tuple[tuple[Fraction, Flag], ...]:
    s = sigma.n
    total = f1.size + f2.size - s
    roots = list(range(s))
    a_size = f1.size - s
    splits = comb(total - s, a_size)
    k1, k2 = f1.key, f2.key
    out = []
    for h in flag_catalog(sigma, total):
        rest = range(s, total)
        hits = 0
        for part in combinations(rest, a_size):
            other = [v for v in rest if v not in part]
            if _sub_flag_key(h.graph, roots, part) == k1 and _sub_flag_key(h.graph, roots, other) == k2:
                hits += 1
        if hits:
            out.append((Fraction(hits, splits), h))
    return tuple(out)


def root_probability(f: Flag) -> Fraction:
    """Probability that a random ordered placement of the roots in the
    underlying graph reproduces ``f``."""
    g, s = f.graph, f.roots
    target = f.key
    hits = 0
    for theta in permutations(range(g.n), s):
        rest = [v for v in range(g.n) if v not in theta]
        if _sub_flag_key(g, theta, rest) == target:
            hits += 1
    return Fraction(hits, perm(g.n, s))


def unlabel(terms: Iterable[tuple[Fraction, Flag]]) -> list[tuple[Fraction, Graph]]:
    """Average out the roots, merging isomorphic results."""
    terms = list(terms)
    if not terms:
        return []
    _check_same_type(f for _, f in terms)
    merged: dict[CanonicalCode, Fraction] = {}
    for coef, f in terms:
        if not coef:
            continue
        code = canonical_code(f.graph)
        merged[code] = merged.get(code, Fraction(0)) + coef * root_probability(f)
    return [(c, code.to_graph()) for code, c in sorted(merged.items()) if c]


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Expression:
    """``outer * (sum c_i F_i)^2`` with every flag of type ``sigma``."""

    sigma: Graph
    square: tuple[tuple[Fraction, Flag], ...]
    outer: Flag | None = None

    @property
    def flag_size(self) -> int:
        return self.square[0][1].size

    @property
    def level(self) -> int:
        s = self.sigma.n
        n = 2 * self.flag_size - s
        if self.outer is not None:
            n += self.outer.size - s
        return n


def _add(acc: dict[Flag, Fraction], coef: Fraction, f: Flag) -> None:
    acc[f] = acc.get(f, Fraction(0)) + coef


def expand_to_flags(e: Expression) -> dict[Flag, Fraction]:
    sq = [(Fraction(c), f.canonical()) for c, f in e.square if c]
    acc: dict[Flag, Fraction] = {}
    for i, (ci, fi) in enumerate(sq):
        for j in range(i, len(sq)):
            cj, fj = sq[j]
            weight = ci * cj * (1 if i == j else 2)
            for p, h in _product(fi, fj, e.sigma):
                _add(acc, weight * p, h)
    if e.outer is not None and acc:
        outer = e.outer.canonical()
        prod: dict[Flag, Fraction] = {}
        for h, c in acc.items():
            for p, k in _product(h, outer, e.sigma):
                _add(prod, c * p, k)
        acc = prod
    return {f: c for f, c in acc.items() if c}


def expand_expression(e: Expression, basis: Sequence[Graph]) -> RationalVector:
    """Coefficients of the averaged expression on each basis graph.

    Raises :class:`SupportError` if the expansion puts weight on a graph
    outside ``basis``.
    """
    index = {canonical_code(g): j for j, g in enumerate(basis)}
    row = [Fraction(0)] * len(basis)
    stray = []
    for coef, g in unlabel((c, f) for f, c in expand_to_flags(e).items()):
        j = index.get(canonical_code(g))
        if j is None:
            stray.append((coef, g))
        else:
            row[j] += coef
    if stray:
        desc = ", ".join(f"{format_rational(c)} on {g.to_literal()}" for c, g in stray)
        raise SupportError(f"expansion has weight outside the basis: {desc}")
    return tuple(row)


def goal_vector(basis: Sequence[Graph], coeff_p3, coeff_p4) -> RationalVector:
    a, b = Fraction(coeff_p3), Fraction(coeff_p4)
    p3, p4 = path_graph(3), path_graph(4)
    return tuple(a * induced_density(p3, g) + b * induced_density(p4, g) for g in basis)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    basis: tuple[Graph, ...]
    expressions: tuple[Expression, ...]
    lambdas: RationalVector
    declared_m: RationalMatrix
    declared_c: RationalVector
    goal: tuple[Fraction, Fraction]

    @property
    def level(self) -> int:
        return self.basis[0].n


def _rat(value, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except RationalSyntaxError as exc:
        raise CertificateError(str(exc), where) from None


def _graph(value, where: str) -> Graph:
    try:
        return Graph.from_literal(value)
    except (GraphLiteralError, ValueError) as exc:
        raise CertificateError(str(exc), where) from None


def _require_tf(g: Graph, where: str) -> None:
    tri = find_triangle(g)
    if tri is not None:
        raise CertificateError(f"triangle {tri} in {g.to_literal()}", where)


def _field(obj, name: str, where: str):
    if not isinstance(obj, dict) or name not in obj:
        raise CertificateError(f"missing field {name!r}", where)
    return obj[name]


def _list(obj, where: str) -> list:
    if not isinstance(obj, list):
        raise CertificateError("expected an array", where)
    return obj


def _flag(obj, sigma: Graph, where: str) -> Flag:
    g = _graph(_field(obj, "graph", where), f"{where}.graph")
    roots = _field(obj, "roots", where)
    if not isinstance(roots, int) or isinstance(roots, bool) or not 0 <= roots <= g.n:
        raise CertificateError(f"bad root count {roots!r}", f"{where}.roots")
    _require_tf(g, where)
    if roots != sigma.n:
        raise CertificateError(f"flag has {roots} roots but the type has {sigma.n}", where)
    f = Flag(g, roots)
    if f.type != sigma:
        raise CertificateError(
            f"roots induce {f.type.to_literal()}, expected type {sigma.to_literal()}", where
        )
    return f


def _expression(obj, level: int, where: str) -> Expression:
    sigma = _graph(_field(obj, "type", where), f"{where}.type")
    _require_tf(sigma, f"{where}.type")
    roots = _field(obj, "roots", where)
    if roots != sigma.n:
        raise CertificateError(f"roots={roots!r} but type has {sigma.n} vertices", f"{where}.roots")
    if sigma.n > MAX_TYPE_SIZE:
        raise CertificateError(f"types are limited to {MAX_TYPE_SIZE} vertices", f"{where}.type")
    square = []
    for i, term in enumerate(_list(_field(obj, "square", where), f"{where}.square")):
        loc = f"{where}.square[{i}]"
        coef = _rat(_field(term, "coeff", loc), f"{loc}.coeff")
        square.append((coef, _flag(_field(term, "flag", loc), sigma, f"{loc}.flag")))
    if not square:
        raise CertificateError("empty square", f"{where}.square")
    sizes = {f.size for _, f in square}
    if len(sizes) != 1:
        raise CertificateError(f"square flags have mixed sizes {sorted(sizes)}", f"{where}.square")
    outer = None
    if obj.get("outer") is not None:
        outer = _flag(obj["outer"], sigma, f"{where}.outer")
    e = Expression(sigma, tuple(square), outer)
    if e.level != level:
        raise CertificateError(f"expression expands to level {e.level}, basis is level {level}", where)
    if e.level > MAX_LEVEL:
        raise CertificateError(f"level {e.level} exceeds {MAX_LEVEL}", where)
    return e


def parse_certificate(data) -> Certificate:
    if not isinstance(data, dict):
        raise CertificateError("certificate must be a JSON object")
    basis = []
    for j, lit in enumerate(_list(_field(data, "basis", ""), "basis")):
        g = _graph(lit, f"basis[{j}]")
        _require_tf(g, f"basis[{j}]")
        basis.append(g)
    if not basis:
        raise CertificateError("empty basis", "basis")
    level = basis[0].n
    for j, g in enumerate(basis):
        if g.n != level:
            raise CertificateError(f"basis graphs must all have {level} vertices", f"basis[{j}]")
    exprs = tuple(
        _expression(e, level, f"expressions[{i}]")
        for i, e in enumerate(_list(_field(data, "expressions", ""), "expressions"))
    )
    lambdas = tuple(
        _rat(x, f"lambda[{i}]") for i, x in enumerate(_list(_field(data, "lambda", ""), "lambda"))
    )
    if len(lambdas) != len(exprs):
        raise CertificateError(f"{len(lambdas)} multipliers for {len(exprs)} expressions", "lambda")
    rows = []
    for i, r in enumerate(_list(_field(data, "M", ""), "M")):
        r = _list(r, f"M[{i}]")
        if len(r) != len(basis):
            raise CertificateError(f"row has {len(r)} entries, basis has {len(basis)}", f"M[{i}]")
        rows.append([_rat(x, f"M[{i}][{j}]") for j, x in enumerate(r)])
    if len(rows) != len(exprs):
        raise CertificateError(f"{len(rows)} rows for {len(exprs)} expressions", "M")
    c = tuple(_rat(x, f"c[{j}]") for j, x in enumerate(_list(_field(data, "c", ""), "c")))
    if len(c) != len(basis):
        raise CertificateError(f"{len(c)} entries, basis has {len(basis)}", "c")
    goal = _field(data, "goal", "")
    g3 = _rat(_field(goal, "p3", "goal"), "goal.p3")
    g4 = _rat(_field(goal, "p4", "goal"), "goal.p4")
    return Certificate(tuple(basis), exprs, lambdas, RationalMatrix(rows), c, (g3, g4))


def load_certificate(path) -> Certificate:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CertificateError(f"cannot read certificate: {exc}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateError(f"parse error: {exc}", str(path)) from None
    return parse_certificate(data)


def _flag_json(f: Flag) -> dict:
    return {"graph": f.graph.to_literal(), "roots": f.roots}


def certificate_to_json(cert: Certificate) -> dict:
    exprs = []
    for e in cert.expressions:
        item = {
            "type": e.sigma.to_literal(),
            "roots": e.sigma.n,
            "square": [{"coeff": format_rational(c), "flag": _flag_json(f)} for c, f in e.square],
        }
        if e.outer is not None:
            item["outer"] = _flag_json(e.outer)
        exprs.append(item)
    return {
        "basis": [g.to_literal() for g in cert.basis],
        "expressions": exprs,
        "lambda": [format_rational(x) for x in cert.lambdas],
        "M": [[format_rational(x) for x in r] for r in cert.declared_m.rows],
        "c": [format_rational(x) for x in cert.declared_c],
        "goal": {"p3": format_rational(cert.goal[0]), "p4": format_rational(cert.goal[1])},
    }


def bundled_certificate_path() -> Path:
    return Path(__file__).with_name("data") / "paper_cert.json"


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class Failure:
    check: str
    location: str
    message: str

    def __str__(self):
        return f"[{self.check}] {self.location}: {self.message}"


@dataclass(frozen=True)
class RowCheck:
    row: int
    status: str  # "exact", "scaled" or "mismatch"
    scale: Fraction | None
    recomputed: RationalVector
    mismatches: tuple[int, ...] = ()


@dataclass
class VerificationReport:
    passed: bool = False
    strict: bool = False
    basis_complete: bool = False
    lambda_ok: bool = False
    support_ok: bool = False
    m_ok: bool = False
    c_ok: bool = False
    margins: RationalVector = ()
    rows: list[RowCheck] = field(default_factory=list)
    c_recomputed: RationalVector = ()
    c_mismatches: tuple[int, ...] = ()
    basis_permutation: tuple[int, ...] = ()
    omitted_graphs: tuple[Graph, ...] = ()
    failures: list[Failure] = field(default_factory=list)

    @property
    def structural_ok(self) -> bool:
        return self.basis_complete and self.lambda_ok and self.support_ok and self.m_ok and self.c_ok

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "strict": self.strict,
            "checks": {
                "basis_complete": self.basis_complete,
                "lambda_nonnegative": self.lambda_ok,
                "support": self.support_ok,
                "M_matches": self.m_ok,
                "c_matches": self.c_ok,
            },
            "basis_permutation": list(self.basis_permutation),
            "omitted_graphs": [g.to_literal() for g in self.omitted_graphs],
            "M_rows": [
                {
                    "row": r.row,
                    "status": r.status,
                    "scale": None if r.scale is None else format_rational(r.scale),
                    "mismatched_columns": list(r.mismatches),
                }
                for r in self.rows
            ],
            "c_mismatched_columns": list(self.c_mismatches),
            "margins": [format_rational(x) for x in self.margins],
            "failures": [str(f) for f in self.failures],
        }


def _row_scale(recomputed: RationalVector, declared: RationalVector) -> Fraction | None:
    scale = None
    for r, d in zip(recomputed, declared):
        if (r == 0) != (d == 0):
            return None
        if r:
            x = d / r
            if x <= 0 or (scale is not None and x != scale):
                return None
            scale = x
    return scale


def _check_basis(cert: Certificate, report: VerificationReport) -> None:
    level = cert.level
    codes = [canonical_code(g) for g in cert.basis]
    seen: dict[CanonicalCode, int] = {}
    ok = True
    for j, code in enumerate(codes):
        if code in seen:
            report.failures.append(
                Failure("basis", f"basis[{j}]", f"isomorphic to basis[{seen[code]}]")
            )
            ok = False
        else:
            seen[code] = j
    min_edges = min(g.edge_count for g in cert.basis)
    family = enumerate_triangle_free(level, min_edges)
    family_codes = [canonical_code(g) for g in family]
    for g, code in zip(family, family_codes):
        if code not in seen:
            report.failures.append(
                Failure("basis", "basis", f"missing {g.to_literal()} (have {len(seen)} of {len(family)})")
            )
            ok = False
    if ok and len(codes) == len(family):
        order = {code: i for i, code in enumerate(family_codes)}
        report.basis_permutation = tuple(order[code] for code in codes)
    # graphs below the minimum edge count must not be needed for soundness
    omitted = [g for g in enumerate_triangle_free(level) if g.edge_count < min_edges]
    report.omitted_graphs = tuple(omitted)
    for g, goal in zip(omitted, goal_vector(omitted, *cert.goal)):
        if goal < 0:
            report.failures.append(
                Failure("basis", "basis", f"omitted graph {g.to_literal()} has goal coefficient {format_rational(goal)} < 0")
            )
            ok = False
    report.basis_complete = ok


def verify_certificate(cert: Certificate) -> VerificationReport:
    """Recompute everything a certificate claims and check the inequality."""
    report = VerificationReport()
    _check_basis(cert, report)

    report.lambda_ok = True
    for i, x in enumerate(cert.lambdas):
        if x < 0:
            report.lambda_ok = False
            report.failures.append(Failure("lambda", f"lambda[{i}]", f"negative multiplier {format_rational(x)}"))

    report.support_ok = True
    report.m_ok = True
    effective = []
    recomputed_rows = []
    for i, e in enumerate(cert.expressions):
        declared = cert.declared_m.row(i)
        try:
            row = expand_expression(e, cert.basis)
        except SupportError as exc:
            report.support_ok = report.m_ok = False
            report.failures.append(Failure("support", f"expressions[{i}]", str(exc)))
            row = tuple(Fraction(0) for _ in cert.basis)
            report.rows.append(RowCheck(i, "mismatch", None, row))
            recomputed_rows.append(row)
            effective.append(Fraction(0))
            continue
        recomputed_rows.append(row)
        if row == declared:
            report.rows.append(RowCheck(i, "exact", Fraction(1), row))
            effective.append(cert.lambdas[i])
            continue
        scale = _row_scale(row, declared)
        if scale is not None:
            report.rows.append(RowCheck(i, "scaled", scale, row))
            effective.append(cert.lambdas[i] * scale)
            continue
        bad = tuple(j for j, (a, b) in enumerate(zip(row, declared)) if a != b)
        report.rows.append(RowCheck(i, "mismatch", None, row, bad))
        report.m_ok = False
        report.failures.append(
            Failure(
                "M",
                f"M[{i}]",
                "recomputed row differs at columns "
                + ", ".join(f"{j} (declared {format_rational(declared[j])}, recomputed {format_rational(row[j])})" for j in bad),
            )
        )
        effective.append(cert.lambdas[i])

    c = goal_vector(cert.basis, *cert.goal)
    report.c_recomputed = c
    report.c_mismatches = tuple(j for j, (a, b) in enumerate(zip(c, cert.declared_c)) if a != b)
    report.c_ok = not report.c_mismatches
    for j in report.c_mismatches:
        report.failures.append(
            Failure("c", f"c[{j}]", f"declared {format_rational(cert.declared_c[j])}, recomputed {format_rational(c[j])}")
        )

    achieved = vec_mat(effective, RationalMatrix(recomputed_rows)) if recomputed_rows else tuple(Fraction(0) for _ in c)
    report.margins = tuple(a - b for a, b in zip(c, achieved))
    negative = [j for j, x in enumerate(report.margins) if x < 0]
    for j in negative:
        report.failures.append(Failure("margin", f"column {j}", f"margin {format_rational(report.margins[j])} < 0"))
    report.passed = report.structural_ok and not negative
    report.strict = report.passed and all(x > 0 for x in report.margins)
    return report
