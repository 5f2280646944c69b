"""Command line entry point: ``flagcert {verify,scan,hs,enumerate}``.

Exit codes: 0 pass, 1 mathematical violation, 2 input or certificate error,
64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .designs import (
    ConstructionError,
    NotStronglyRegular,
    check_pipeline,
    cluster_eigenvalues,
    higman_sims_graph,
    verify_srg,
)
from .exactmath import format_rational
from .flagcalc import (
    CertificateError,
    bundled_certificate_path,
    load_certificate,
    verify_certificate,
)
from .graphs import MAX_ENUMERATE_N, Graph, enumerate_triangle_free
from .spectral import (
    adjacency,
    all_edge_stats,
    expander_mixing_check,
    full_spectrum,
    graph_report,
    signless_laplacian,
)

SCHEMA = 1

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_USAGE = 64

HS_BOUND = Fraction(168, 11)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float12(x: float) -> float:
    return float(f"{x:.12g}")


def _emit(data: dict, fmt: str, text_lines: list[str]) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps({"schema": SCHEMA, **data}, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def _jobs(args) -> int:
    jobs = args.jobs
    if jobs is None:
        env = os.environ.get("FLAGCERT_JOBS")
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise UsageError(f"FLAGCERT_JOBS must be an integer, got {env!r}") from None
        else:
            jobs = 0
    if jobs < 0:
        raise UsageError("--jobs must be >= 0")
    return jobs or (os.cpu_count() or 1)


def _resolve_cert(path: str | None) -> Path:
    if path is None:
        return bundled_certificate_path()
    p = Path(path)
    bundled = bundled_certificate_path()
    if not p.exists() and p.name == bundled.name and len(p.parts) == 1:
        return bundled
    return p


# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    path = _resolve_cert(args.cert)
    try:
        cert = load_certificate(path)
    except CertificateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = verify_certificate(cert)
    data = {"subcommand": "verify", "certificate": path.name, **report.to_json()}

    lines = [f"certificate: {path}"]
    lines.append(
        f"basis: {len(cert.basis)} graphs on {cert.level} vertices, "
        + ("complete" if report.basis_complete else "INCOMPLETE")
    )
    if report.basis_permutation:
        lines.append("  declared order -> canonical order: " + " ".join(map(str, report.basis_permutation)))
    lines.append(f"lambda >= 0: {'ok' if report.lambda_ok else 'FAIL'}")
    for r in report.rows:
        extra = f" (scale {format_rational(r.scale)})" if r.status == "scaled" else ""
        lines.append(f"M row {r.row + 1}: {r.status}{extra}")
    lines.append(f"c: {'matches' if report.c_ok else 'MISMATCH'}")
    lines.append("margins c - lambda M:")
    for j, m in enumerate(report.margins):
        lines.append(f"  F{j + 1:<3d} {format_rational(m):>32s}  ~ {float(m):.6e}")
    for f in report.failures:
        lines.append(f"failure: {f}")
    verdict = "PASS" if report.passed else "FAIL"
    if report.passed:
        verdict += " (strict)" if report.strict else " (not strict)"
    lines.append(verdict)
    _emit(data, args.output_format, lines)
    if report.passed:
        return EXIT_OK
    return EXIT_VIOLATION if report.structural_ok else EXIT_INPUT


def _scan_one(literal: str) -> dict:
    return graph_report(Graph.from_literal(literal))


def cmd_scan(args) -> int:
    if not 1 <= args.max_n <= MAX_ENUMERATE_N:
        raise UsageError(f"--max-n must be between 1 and {MAX_ENUMERATE_N}")
    literals = [g.to_literal() for n in range(1, args.max_n + 1) for g in enumerate_triangle_free(n)]
    jobs = _jobs(args)
    if jobs > 1 and len(literals) > 50:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_one, literals, chunksize=16))
    else:
        rows = [_scan_one(lit) for lit in literals]
    for row in rows:
        row["q_n"] = _float12(row["q_n"])
    bad = [row for row in rows if not all(row["pass_flags"].values())]
    counts: dict[int, int] = {}
    for row in rows:
        counts[row["n"]] = counts.get(row["n"], 0) + 1
    data = {
        "subcommand": "scan",
        "max_n": args.max_n,
        "sampled": False,
        "graphs_checked": len(rows),
        "counts_by_n": {str(k): v for k, v in sorted(counts.items())},
        "violations": [row["graph"] for row in bad],
        "rows": rows,
        "pass": not bad,
    }
    lines = [f"n={n}: {c} triangle-free graphs" for n, c in sorted(counts.items())]
    lines.append(f"{len(rows)} graphs checked")
    for row in bad:
        failed = [k for k, v in row["pass_flags"].items() if not v]
        lines.append(f"violation: {row['graph']} fails {', '.join(failed)}")
    lines.append("PASS" if not bad else "FAIL")
    _emit(data, args.output_format, lines)
    return EXIT_OK if not bad else EXIT_VIOLATION


def cmd_hs(args) -> int:
    try:
        pipeline = check_pipeline()
        g = higman_sims_graph()
        srg = verify_srg(g)
    except (ConstructionError, NotStronglyRegular) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    q = full_spectrum(signless_laplacian(g))
    lam = full_spectrum(adjacency(g))
    stats = all_edge_stats(g)
    m_values = sorted({s.m_xy for s in stats})
    w_values = sorted({s.w_x for s in stats} | {s.w_y for s in stats})
    bound = min(s.bound for s in stats)
    spectrum = [(round(v, 6), k) for v, k in cluster_eigenvalues(lam)]
    mixing = expander_mixing_check(g, seed=args.seed)
    checks = {
        "srg": srg.as_list() == [100, 22, 0, 6],
        "q_n": abs(float(q[0]) - 14) <= 1e-6,
        "adjacency_spectrum": [k for _, k in spectrum] == [22, 77, 1]
        and all(abs(v - e) <= 1e-6 for (v, _), e in zip(spectrum, (-8, 2, 22))),
        "m_xy_constant": m_values == [148],
        "w_x_constant": w_values == [484],
        "lemma1_bound": bound == HS_BOUND,
        "expander_mixing": mixing.holds,
    }
    passed = all(checks.values())
    data = {
        "subcommand": "hs",
        "graph": g.to_literal(),
        "stats": {
            "srg": srg.as_list(),
            "q_n": _float12(float(q[0])),
            "lambda_1": _float12(float(lam[-1])),
            "lambda_n": _float12(float(lam[0])),
            "m_xy": m_values[0] if len(m_values) == 1 else m_values,
            "w_x": w_values[0] if len(w_values) == 1 else w_values,
            "lemma1_bound": format_rational(bound),
        },
        "pipeline": {k: (v if not isinstance(v, dict) else {str(a): b for a, b in v.items()}) for k, v in pipeline.items()},
        "expander_mixing": {
            "sampled": not mixing.exhaustive,
            "subsets_checked": mixing.subsets_checked,
            "seed": args.seed,
            "worst_slack": _float12(mixing.worst_slack),
        },
        "checks": checks,
        "pass": passed,
    }
    st = data["stats"]
    lines = [
        g.to_literal(),
        f"srg: {st['srg']}",
        f"q_n: {st['q_n']}",
        f"lambda_1: {st['lambda_1']}  lambda_n: {st['lambda_n']}",
        "adjacency spectrum: " + ", ".join(f"{v:g}^{k}" for v, k in spectrum),
        f"m_xy: {st['m_xy']}  w_x: {st['w_x']}",
        f"edge bound: {st['lemma1_bound']}",
        f"expander mixing ({'sampled' if not mixing.exhaustive else 'exhaustive'}, "
        f"{mixing.subsets_checked} subsets, seed {args.seed}): {'ok' if mixing.holds else 'FAIL'}",
    ]
    lines += [f"failed check: {k}" for k, v in checks.items() if not v]
    lines.append("PASS" if passed else "FAIL")
    _emit(data, args.output_format, lines)
    return EXIT_OK if passed else EXIT_VIOLATION


def cmd_enumerate(args) -> int:
    if not 1 <= args.n <= MAX_ENUMERATE_N:
        raise UsageError(f"--n must be between 1 and {MAX_ENUMERATE_N}")
    graphs = enumerate_triangle_free(args.n, args.min_edges)
    literals = [g.to_literal() for g in graphs]
    data = {"subcommand": "enumerate", "n": args.n, "min_edges": args.min_edges, "count": len(literals), "graphs": literals}
    _emit(data, args.output_format, literals)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-format", choices=("text", "json"), default="text")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (0 = auto); falls back to FLAGCERT_JOBS")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    parser = _Parser(prog="flagcert", description="Exact checks for triangle-free spectral and flag-algebra bounds.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="verify a flag-algebra certificate")
    p.add_argument("--cert", default=None, help="certificate JSON (default: bundled paper_cert.json)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="check spectral bounds on all small triangle-free graphs")
    p.add_argument("--max-n", type=int, default=8)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("hs", parents=[common], help="build and check the Higman-Sims graph")
    p.set_defaults(func=cmd_hs)

    p = sub.add_parser("enumerate", parents=[common], help="list triangle-free graphs up to isomorphism")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--min-edges", type=int, default=0)
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"flagcert {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"elapsed: {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
