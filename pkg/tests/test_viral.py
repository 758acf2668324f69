from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings
from networkx.algorithms.isomorphism import GraphMatcher

from conftest import graphs, to_nx
from cotree import is_cograph, random_cograph
from generators import complete, cycle, edgeless, gnp, path
from graph_core import Graph, InputError, Side, from_edge_list
from oracle import count_copies_reference
from validator import validate_viral_verdict
from viral import (
    RestrictedDensityCertificate,
    ViralBranch,
    ViralVerdict,
    automorphism_count,
    count_copies,
    p4_viral_exponent,
    substitute,
    substitution_closure_sample,
    substitution_exponent,
    viral_check,
)

FOUR_VERTEX_PATTERNS = [
    from_edge_list(4, list(g.edges())) for g in nx.graph_atlas_g() if g.number_of_nodes() == 4
]


# ── counting ─────────────────────────────────────────


def test_there_are_eleven_four_vertex_patterns():
    assert len(FOUR_VERTEX_PATTERNS) == 11


def test_count_examples():
    assert count_copies(path(4), cycle(5)) == 10
    assert count_copies(complete(3), complete(6)) == 120
    assert count_copies(complete(2), cycle(5)) == 10
    assert count_copies(complete(1), edgeless(7)) == 7


def test_automorphisms():
    assert automorphism_count(path(4)) == 2
    assert automorphism_count(cycle(5)) == 10
    assert automorphism_count(complete(3)) == 6


def test_pattern_larger_than_host():
    assert count_copies(complete(4), complete(3)) == 0


def test_p4_free_host_has_no_p4_copies():
    assert count_copies(cycle(5), complete(6)) == 0
    assert count_copies(path(4), complete(6)) == 0


@given(graphs(max_n=7))
@settings(deadline=None, max_examples=40)
def test_count_matches_reference(G):
    for H in FOUR_VERTEX_PATTERNS:
        assert count_copies(H, G) == count_copies_reference(H, G)


@pytest.mark.slow
@pytest.mark.parametrize("p", [Fraction(1, 5), Fraction(1, 2), Fraction(4, 5)])
def test_count_matches_reference_on_random_graphs(p):
    for seed in range(1, 101):
        G = gnp(4 + seed % 7, p, seed)
        for H in FOUR_VERTEX_PATTERNS:
            assert count_copies(H, G) == count_copies_reference(H, G), (seed, H.edges())


@given(graphs(max_n=8))
@settings(deadline=None, max_examples=50)
def test_count_matches_networkx(G):
    g = to_nx(G)
    for H in (path(4), complete(3), cycle(4)):
        expected = sum(1 for _ in GraphMatcher(g, to_nx(H)).subgraph_isomorphisms_iter())
        assert count_copies(H, G) == expected


@given(graphs(max_n=8))
@settings(deadline=None, max_examples=30)
def test_count_is_divisible_by_automorphisms(G):
    for H in (path(4), cycle(4), complete(3)):
        assert count_copies(H, G) % automorphism_count(H) == 0


def test_count_with_worker_processes_matches_serial():
    G = from_edge_list(12, [(u, v) for u in range(12) for v in range(u + 1, 12) if (u * v + u + v) % 3])
    assert count_copies(path(4), G, threads=2) == count_copies(path(4), G, threads=1)


def test_count_caps():
    with pytest.raises(InputError):
        count_copies(Graph(0, ()), complete(3))
    with pytest.raises(InputError):
        count_copies(edgeless(9), edgeless(12))
    with pytest.raises(InputError):
        count_copies(path(4), edgeless(20), cap=10)
    assert count_copies(complete(1), edgeless(20), cap=None) == 20


# ── substitution ─────────────────────────────────────


def test_substitute_edge_into_edge_gives_triangle():
    assert substitute(complete(2), 0, complete(2)) == complete(3)


def test_substitute_into_middle_of_path():
    G = substitute(path(3), 1, edgeless(2))
    assert nx.is_isomorphic(to_nx(G), to_nx(cycle(4)))


def test_substitute_rejects_bad_input():
    with pytest.raises(InputError):
        substitute(path(3), 3, complete(2))
    with pytest.raises(InputError):
        substitute(path(3), 0, Graph(0, ()))


def test_closure_sample_is_deterministic():
    a = substitution_closure_sample([path(4), cycle(5)], 3, seed=11)
    b = substitution_closure_sample([path(4), cycle(5)], 3, seed=11)
    assert a == b
    assert len(a) == 16


def test_closure_sample_sizes():
    # every step adds |B| - 1 vertices
    for H in substitution_closure_sample([path(4)], 2, seed=5, count=8):
        assert H.n == 10


def test_closure_of_cographs_stays_cograph():
    for H in substitution_closure_sample([complete(1), complete(2), edgeless(2)], 4, seed=3, count=200):
        assert is_cograph(H)


def test_closure_sample_rejects_bad_input():
    with pytest.raises(InputError):
        substitution_closure_sample([], 1, seed=0)
    with pytest.raises(InputError):
        substitution_closure_sample([path(3)], -1, seed=0)


def test_exponents():
    assert substitution_exponent(Fraction(1), Fraction(2), 3) == 10
    assert p4_viral_exponent(Fraction(1, 6)) == 3
    assert p4_viral_exponent(Fraction(1)) == 12


# ── viral checker ────────────────────────────────────


def test_viral_c5_p4_finds_sparse_set():
    eps, d = Fraction(1, 2), Fraction(3)
    verdict = viral_check(cycle(5), path(4), eps, d)
    assert verdict.branch is ViralBranch.SPARSE_OR_DENSE_SET
    assert verdict.copy_count == 10
    assert verdict.threshold == Fraction(625, 8)
    assert verdict.method == "peeling"
    assert verdict.witness.members == 0b11111
    assert verdict.witness.side is Side.GRAPH
    assert verdict.witness.density == Fraction(1, 2)
    assert validate_viral_verdict(cycle(5), 4, verdict, eps, d).ok


def test_viral_clique_uses_complement_side():
    eps, d = Fraction(1, 2), Fraction(1, 2)
    verdict = viral_check(complete(6), complete(3), eps, d)
    assert verdict.branch is ViralBranch.SPARSE_OR_DENSE_SET
    assert verdict.copy_count == 120
    assert isinstance(verdict.threshold, float)
    assert verdict.witness.side is Side.COMPLEMENT
    assert verdict.witness.members == complete(6).full
    assert validate_viral_verdict(complete(6), 3, verdict, eps, d).ok


def test_viral_many_copies():
    eps, d = Fraction(1, 2), Fraction(3, 2)
    verdict = viral_check(complete(6), complete(3), eps, d)
    assert verdict.branch is ViralBranch.MANY_COPIES
    assert verdict.method == "count"
    assert verdict.witness is None
    assert validate_viral_verdict(complete(6), 3, verdict, eps, d).ok


def test_viral_undecided():
    verdict = viral_check(cycle(5), complete(2), Fraction(1, 4), Fraction(1, 4))
    assert verdict.branch is ViralBranch.UNDECIDED
    assert verdict.copy_count == 10


def test_viral_rejects_bad_parameters():
    with pytest.raises(InputError):
        viral_check(cycle(5), path(4), Fraction(3, 4), Fraction(1))
    with pytest.raises(InputError):
        viral_check(cycle(5), path(4), Fraction(1, 4), Fraction(0))


@given(graphs(min_n=1, max_n=9))
@settings(deadline=None, max_examples=40)
def test_viral_verdicts_validate(G):
    eps, d = Fraction(1, 3), Fraction(2)
    verdict = viral_check(G, path(4), eps, d)
    assert verdict.branch is not ViralBranch.UNDECIDED
    report = validate_viral_verdict(G, 4, verdict, eps, d)
    assert report.ok, report.violations


def test_validator_catches_wrong_density():
    verdict = ViralVerdict(
        ViralBranch.SPARSE_OR_DENSE_SET,
        0,
        Fraction(0),
        RestrictedDensityCertificate(0b11111, Side.GRAPH, Fraction(1, 5)),
    )
    report = validate_viral_verdict(cycle(5), 4, verdict, Fraction(1, 2), Fraction(3))
    assert any("recounted 1/2" in v for v in report.violations)


def test_validator_catches_too_few_copies():
    verdict = ViralVerdict(ViralBranch.MANY_COPIES, 10, Fraction(625, 8))
    assert not validate_viral_verdict(cycle(5), 4, verdict, Fraction(1, 2), Fraction(3)).ok


# ── cograph consistency ──────────────────────────────


@given(graphs(min_n=4, max_n=10))
@settings(deadline=None, max_examples=100)
def test_no_p4_copies_exactly_for_cographs(G):
    assert (count_copies(path(4), G) == 0) == is_cograph(G)


def test_closure_over_p4_keeps_an_induced_p4():
    for H in substitution_closure_sample([path(4), cycle(5)], 3, seed=8, count=50):
        assert not is_cograph(H)
        assert count_copies(path(4), H) > 0


@pytest.mark.slow
def test_no_p4_copies_exactly_for_cographs_mixed_instances():
    for seed in range(1, 251):
        n = 4 + seed % 27
        for G in (gnp(n, Fraction(1, 2), seed), random_cograph(n, Fraction(1, 2), seed)[0]):
            assert (count_copies(path(4), G) == 0) == is_cograph(G), seed
