import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from flagcert.graphs import (
    Graph,
    PreconditionError,
    complete_bipartite,
    cycle_graph,
    empty_graph,
    hom_p3,
    hom_p4,
    path_graph,
    petersen_graph,
)
from flagcert.spectral import (
    Q_RATIO,
    ConvergenceError,
    adjacency,
    all_edge_stats,
    d2_bruteforce,
    edge_stats,
    expander_mixing_check,
    full_spectrum,
    graph_report,
    is_bipartite,
    lemma1_bound,
    max_cut,
    q_min,
    quadratic_form_q,
    rayleigh_identity,
    signless_laplacian,
    test_vector as make_test_vector,
)


def test_signless_laplacian_of_path():
    q = signless_laplacian(path_graph(3))
    assert q.tolist() == [[1, 1, 0], [1, 2, 1], [0, 1, 1]]


def test_c5_smallest_eigenvalue_closed_form():
    assert q_min(cycle_graph(5)) == pytest.approx(2 + 2 * math.cos(4 * math.pi / 5), abs=1e-10)


@pytest.mark.parametrize("k", [3, 4, 5, 6, 7, 9, 12])
def test_cycle_spectrum_closed_form(k):
    got = full_spectrum(signless_laplacian(cycle_graph(k)))
    want = sorted(2 + 2 * math.cos(2 * math.pi * j / k) for j in range(k))
    assert np.allclose(got, want, atol=1e-10)


def test_bipartite_graphs_have_zero_minimum():
    for g in [path_graph(5), complete_bipartite(2, 3), cycle_graph(6)]:
        assert abs(q_min(g)) <= 1e-10


def test_petersen_spectrum():
    lam = full_spectrum(adjacency(petersen_graph()))
    assert np.allclose(lam, [-2] * 4 + [1] * 5 + [3], atol=1e-10)
    assert q_min(petersen_graph()) == pytest.approx(1.0, abs=1e-10)


def test_jacobi_matches_numpy_on_corpus(corpus):
    for gs in corpus.values():
        for g in gs:
            q = signless_laplacian(g)
            assert np.allclose(full_spectrum(q), np.linalg.eigvalsh(q), atol=1e-9), g.to_literal()


@settings(max_examples=60, deadline=None)
@given(arrays(float, (7, 7), elements=st.floats(-50, 50, allow_nan=False, width=32)))
def test_jacobi_matches_numpy_on_random_symmetric(x):
    m = (x + x.T) / 2
    assert np.allclose(full_spectrum(m), np.linalg.eigvalsh(m), atol=1e-8)


def test_jacobi_rejects_bad_input_and_reports_nonconvergence():
    with pytest.raises(ValueError):
        full_spectrum(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        full_spectrum(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ConvergenceError) as info:
        full_spectrum(adjacency(cycle_graph(5)), max_sweeps=0)
    assert info.value.residual > 0


def test_edge_stats_examples():
    # ordered pairs through the edge itself count: (y, v) for v ~ y and (u, x) for u ~ x
    pet = edge_stats(petersen_graph(), 0, 1)
    assert (pet.w_x, pet.m_xy, pet.bound) == (9, 5, Fraction(4, 3))
    s = edge_stats(cycle_graph(4), 0, 1)
    assert (s.w_x, s.w_y, s.m_xy) == (4, 4, 4)
    assert s.bound == 0
    k2 = edge_stats(path_graph(2), 0, 1)
    assert (k2.w_x, k2.w_y, k2.m_xy, k2.numerator) == (1, 1, 1, 0)


def test_edge_stats_preconditions():
    with pytest.raises(PreconditionError):
        edge_stats(cycle_graph(5), 0, 2)
    with pytest.raises(PreconditionError):
        edge_stats(Graph.from_literal("3:0-1,1-2,0-2"), 0, 1)
    with pytest.raises(PreconditionError):
        lemma1_bound(empty_graph(3))


def test_test_vector_and_quadratic_form():
    g = cycle_graph(5)
    z = make_test_vector(g, 0, 1)
    assert z == [-1, 1, -1, 0, 1]
    lhs, rhs = rayleigh_identity(g, 0, 1)
    assert lhs == rhs == quadratic_form_q(g, z)
    zf = np.array(z, dtype=float)
    assert zf @ signless_laplacian(g) @ zf == lhs


def test_spectral_invariants_on_corpus(corpus):
    for gs in corpus.values():
        for g in gs:
            qn = q_min(g)
            p3, p4 = hom_p3(g), hom_p4(g)
            assert qn >= -1e-9
            assert qn <= float(Q_RATIO * g.n) + 1e-8
            assert 94 * p4 <= 15 * g.n * p3
            if g.edge_count:
                stats = all_edge_stats(g)
                assert p3 == sum(d * d for d in g.degrees())
                assert p4 == sum(s.numerator for s in stats)
                assert qn <= float(lemma1_bound(g)) + 1e-8
                # Rayleigh quotient of each test vector upper-bounds q_n
                for s in stats:
                    assert s.numerator >= 0
                    assert qn * (s.deg_x + s.deg_y) <= s.numerator + 1e-8


def test_q_times_p3_homs_below_p4_homs(corpus):
    for g in corpus[7]:
        if g.edge_count:
            assert q_min(g) * hom_p3(g) <= hom_p4(g) + 1e-6 * hom_p3(g)


def test_max_cut_and_d2():
    assert d2_bruteforce(petersen_graph()) == 3
    assert d2_bruteforce(cycle_graph(5)) == 1
    assert d2_bruteforce(complete_bipartite(3, 4)) == 0
    assert max_cut(cycle_graph(7)) == 6


def test_d2_lower_bound_on_corpus(corpus):
    for g in corpus[8]:
        assert d2_bruteforce(g) >= q_min(g) * g.n / 4 - 1e-6


def test_bipartite_check():
    assert is_bipartite(cycle_graph(6))
    assert not is_bipartite(cycle_graph(7))
    assert is_bipartite(empty_graph(3))


@pytest.mark.parametrize("g", [cycle_graph(5), cycle_graph(6), petersen_graph()], ids=["C5", "C6", "Petersen"])
def test_expander_mixing_exhaustive(g):
    r = expander_mixing_check(g)
    assert r.exhaustive and r.subsets_checked == 2**g.n
    assert r.holds


def test_expander_mixing_sampled_is_seeded():
    g = cycle_graph(16)
    a = expander_mixing_check(g, samples=500, seed=4)
    b = expander_mixing_check(g, samples=500, seed=4)
    assert not a.exhaustive and a.subsets_checked == 500
    assert a == b and a.holds


def test_expander_mixing_needs_regular_graph():
    with pytest.raises(PreconditionError):
        expander_mixing_check(path_graph(3))


def test_graph_report_row():
    row = graph_report(petersen_graph())
    assert row["n"] == 10 and row["d2"] == 3
    assert row["lemma1_bound"] == "4/3"
    assert all(row["pass_flags"].values())
    assert {"regular_shift", "eigen_sum", "expander_mixing"} <= set(row["pass_flags"])
    with pytest.raises(PreconditionError):
        graph_report(Graph.from_literal("3:0-1,1-2,0-2"))
