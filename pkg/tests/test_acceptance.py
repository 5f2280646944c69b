"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
repeated in the terminal summary.
"""

import json
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from flagcert import flagcalc, graphs
from flagcert.cli import main
from flagcert.designs import cluster_eigenvalues, higman_sims_graph, verify_srg, SrgParams
from flagcert.flagcalc import bundled_certificate_path, load_certificate, verify_certificate
from flagcert.graphs import (
    Graph,
    blowup,
    canonical_code,
    cycle_graph,
    enumerate_triangle_free,
    hom_s,
    hom_s_bruteforce,
    path_graph,
    petersen_graph,
)
from flagcert.spectral import (
    Q_RATIO,
    adjacency,
    all_edge_stats,
    d2_bruteforce,
    expander_mixing_check,
    full_spectrum,
    lemma1_bound,
    quadratic_form_q,
    signless_laplacian,
    test_vector as make_test_vector,
)

import reference_data as ref


def _cold_caches():
    for fn in (graphs._all_triangle_free, flagcalc._rooted_key, flagcalc._product, flagcalc.flag_catalog):
        fn.cache_clear()


def test_criterion_1_certificate_verification(criterion):
    _cold_caches()
    with criterion("1 certificate verification (exact)", limit=60):
        cert = load_certificate(bundled_certificate_path())
        report = verify_certificate(cert)
        assert all(x >= 0 for x in cert.lambdas)
        assert list(cert.lambdas) == ref.LAMBDA
        for i, row in enumerate(report.rows):
            assert row.status in ("exact", "scaled")
            scale = row.scale
            assert [scale * x for x in row.recomputed] == ref.M[i], f"row {i + 1}"
        assert sum(len(r) for r in ref.M) == 72
        assert list(report.c_recomputed) == ref.C
        assert len(report.margins) == 12 and all(m > 0 for m in report.margins)
        assert report.passed and report.strict


def test_criterion_2_basis_completeness(criterion, paper_cert):
    _cold_caches()
    with criterion("2 basis completeness", limit=1):
        family = enumerate_triangle_free(5, 2)
        assert len(family) == 12
        assert {canonical_code(g) for g in family} == {canonical_code(g) for g in paper_cert.basis}


def _subset_code_counts(h: Graph, k: int) -> dict:
    counts: dict = {}
    for sub in combinations(range(h.n), k):
        code = canonical_code(h.induced(sub))
        counts[code] = counts.get(code, 0) + 1
    return counts


def test_criterion_3_goal_vector_semantics(criterion, paper_cert):
    with criterion("3 goal-vector semantics, 5 <= n <= 7", limit=300):
        p3, p4 = canonical_code(path_graph(3)), canonical_code(path_graph(4))
        basis_codes = [canonical_code(g) for g in paper_cert.basis]
        checked = {}
        for n in (5, 6, 7):
            hosts = enumerate_triangle_free(n)
            for h in hosts:
                c3, c5 = _subset_code_counts(h, 3), _subset_code_counts(h, 5)
                c4 = _subset_code_counts(h, 4)
                lhs = 30 * Fraction(c3.get(p3, 0), comb(n, 3)) - 47 * Fraction(c4.get(p4, 0), comb(n, 4))
                rhs = sum(
                    (c * Fraction(c5.get(code, 0), comb(n, 5)) for c, code in zip(paper_cert.declared_c, basis_codes)),
                    Fraction(0),
                )
                assert lhs == rhs, h.to_literal()
            checked[n] = len(hosts)
        assert checked == {5: 14, 6: 38, 7: 107}


def test_criterion_4_small_graph_suite(criterion, corpus):
    with criterion("4 exhaustive small-graph suite, n <= 8", limit=600):
        p3, p4 = path_graph(3), path_graph(4)
        total = 0
        for n in range(1, 9):
            for g in corpus[n]:
                total += 1
                h3, h4 = hom_s_bruteforce(p3, g), hom_s_bruteforce(p4, g)
                # (a)
                assert Fraction(h4) <= Q_RATIO * n * h3, g.to_literal()
                qn = float(full_spectrum(signless_laplacian(g))[0])
                # (b)
                assert qn <= float(Q_RATIO * n) + 1e-8
                stats = all_edge_stats(g)
                if stats:
                    assert qn <= float(lemma1_bound(g)) + 1e-8
                # (c)
                assert h3 == sum(d * d for d in g.degrees())
                assert h4 == sum(s.w_x + s.w_y - 2 * s.m_xy for s in stats)
                # (d)
                for s in stats:
                    assert quadratic_form_q(g, make_test_vector(g, s.x, s.y)) == s.w_x + s.w_y - 2 * s.m_xy
                # (e)
                assert d2_bruteforce(g) >= qn * n / 4 - 1e-6
        assert total == 582


def test_criterion_5_higman_sims(criterion):
    with criterion("5 Higman-Sims reproduction", limit=120):
        g = higman_sims_graph()
        assert verify_srg(g) == SrgParams(100, 22, 0, 6)
        a = g.adjacency_matrix()
        eye, ones = np.eye(100, dtype=np.int64), np.ones((100, 100), dtype=np.int64)
        assert np.array_equal(a @ a, 22 * eye + 6 * (ones - eye - a))
        q = full_spectrum(signless_laplacian(g))
        assert abs(q[0] - 14) <= 1e-6
        spectrum = cluster_eigenvalues(full_spectrum(adjacency(g)))
        assert [k for _, k in spectrum] == [22, 77, 1]
        assert all(abs(v - e) <= 1e-6 for (v, _), e in zip(spectrum, (-8, 2, 22)))
        stats = all_edge_stats(g)
        assert len(stats) == 1100
        assert all(s.m_xy == 148 and s.w_x == 484 and s.w_y == 484 for s in stats)
        assert lemma1_bound(g) == Fraction(168, 11) == Fraction(42, 275) * 100


def test_criterion_6_blowup_scaling(criterion, corpus):
    with criterion("6 blowup scaling"):
        graphs5 = corpus[5]
        assert len(graphs5) == 14
        for g in graphs5:
            for b in (2, 3):
                gb = blowup(g, b)
                for k in (3, 4):
                    pk = path_graph(k)
                    assert hom_s(pk, gb) == b**k * hom_s(pk, g)
                    assert hom_s_bruteforce(pk, gb) == b**k * hom_s_bruteforce(pk, g)


def test_criterion_7_expander_mixing(criterion):
    with criterion("7 expander mixing on C5, C6, Petersen"):
        for g in (cycle_graph(5), cycle_graph(6), petersen_graph()):
            r = expander_mixing_check(g, tol=1e-6)
            assert r.exhaustive and r.subsets_checked == 2**g.n
            assert r.holds, (g.to_literal(), r.worst_slack, r.worst_subset)


def _verify_mutant(tmp_path, capsys, name, mutate):
    d = json.loads(bundled_certificate_path().read_text())
    mutate(d)
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(d))
    code = main(["verify", "--cert", str(p), "--output-format", "json"])
    out = json.loads(capsys.readouterr().out)
    return code, out


def test_criterion_8_negative_controls(criterion, tmp_path, capsys):
    def negate_lambda(d):
        d["lambda"][4] = "-" + d["lambda"][4]

    def perturb_m(d):
        d["M"][1][6] = "-3905/30"

    def perturb_c(d):
        assert d["c"][10] == "-32"
        d["c"][10] = "-33"

    def duplicate_basis(d):
        d["basis"][7] = Graph.from_literal(d["basis"][2]).relabel([2, 4, 0, 1, 3]).to_literal()

    expected = {
        "lambda": (negate_lambda, "[lambda] lambda[4]"),
        "M": (perturb_m, "[M] M[1]"),
        "c": (perturb_c, "[c] c[10]"),
        "basis": (duplicate_basis, "[basis] basis[7]"),
    }
    with criterion("8 negative controls"):
        for name, (mutate, tag) in expected.items():
            code, out = _verify_mutant(tmp_path, capsys, name, mutate)
            assert code in (1, 2) and not out["pass"], name
            assert code == 2, name
            assert any(f.startswith(tag) for f in out["failures"]), (name, out["failures"])
