import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cographs
from cotree import build_cotree, random_cograph
from generators import complete, counterex_k, disjoint_cliques, edgeless
from graph_core import (
    InputError,
    Polarity,
    check_restricted,
    from_edge_list,
    vertex_set,
)
from partition import (
    Beribboning,
    Part,
    PartitionError,
    Ribbon,
    edge_colouring,
    greedy_restricted_cover,
    growtree,
    prettify,
    prune,
    pureribbon,
    rodl_partition,
    split,
    stage_bounds,
    thin_thick_partition,
)
from validator import (
    validate_beribboning,
    validate_partition,
    validate_split,
    validate_thin_thick,
)

HALF = Fraction(1, 2)


def _stars(sizes: list[int]):
    """Pairwise anticomplete stars K_{1,s-1}, each centred on its lowest id."""
    edges, start = [], 0
    for s in sizes:
        edges.extend((start, start + i) for i in range(1, s))
        start += s
    return from_edge_list(start, edges)


# ── thin / thick ─────────────────────────────────────


def test_thin_thick_clique():
    G = complete(4)
    thin, thick = thin_thick_partition(build_cotree(G), G)
    assert thin == 0
    assert thick == G.full


def test_thin_thick_edgeless():
    G = edgeless(5)
    thin, thick = thin_thick_partition(build_cotree(G), G)
    assert thin == G.full
    assert thick == 0


@given(cographs(max_n=10))
@settings(deadline=None, max_examples=300)
def test_thin_thick_small_cographs(pair):
    G, T = pair
    thin, thick = thin_thick_partition(T, G)
    assert validate_thin_thick(G, thin, thick).ok


@pytest.mark.slow
def test_thin_thick_large_cographs():
    for seed in range(1, 1001):
        G, T = random_cograph(1 + seed % 200, HALF, seed)
        report = validate_thin_thick(G, *thin_thick_partition(T, G))
        assert report.ok, (seed, report.violations)


@given(cographs(max_n=10))
@settings(deadline=None, max_examples=60)
def test_thin_thick_exists_by_exhaustive_search(pair):
    G, T = pair
    found = [
        thin
        for thin in range(G.full + 1)
        if validate_thin_thick(G, thin, G.full ^ thin).ok
    ]
    thin, thick = thin_thick_partition(T, G)
    assert thick == G.full ^ thin
    assert thin in found


# ── split ────────────────────────────────────────────


def test_split_single_edge():
    G = complete(2)
    result = split(build_cotree(G), G, Fraction(1))
    assert result.parts == (0b10, 0, 0b01, 0)
    assert result.witnesses[1].polarity is Polarity.COMPLETE
    assert validate_split(G, G.full, result, Fraction(1)).ok


def test_split_needs_two_vertices():
    G = complete(1)
    with pytest.raises(InputError):
        split(build_cotree(G), G, HALF)


@given(
    cographs(min_n=2, max_n=60),
    st.sampled_from([Fraction(1, 5), Fraction(1, 3), HALF, Fraction(1)]),
)
@settings(deadline=None)
def test_split_validates(pair, eps):
    G, T = pair
    result = split(T, G, eps)
    report = validate_split(G, G.full, result, eps)
    assert report.ok, report.violations


# ── greedy cover ─────────────────────────────────────


def test_greedy_cover_clique_in_one_step():
    G = complete(8)
    certs, rest = greedy_restricted_cover(build_cotree(G), G, G.full, Fraction(1, 4), 3)
    assert len(certs) == 1
    assert certs[0].members == G.full
    assert rest == 0


def test_greedy_cover_shrinks_geometrically():
    G, T = random_cograph(200, HALF, 9)
    eps, t = Fraction(1, 4), 8
    certs, rest = greedy_restricted_cover(T, G, G.full, eps, t)
    assert len(certs) <= t
    assert rest.bit_count() <= (1 - eps) ** t * 200
    seen = rest
    for cert in certs:
        assert cert.members & seen == 0
        assert check_restricted(G, cert.members, eps) is not None
        seen |= cert.members
    assert seen == G.full


def test_greedy_cover_rejects_foreign_set():
    G = complete(3)
    with pytest.raises(InputError):
        greedy_restricted_cover(build_cotree(G), G, 0b1000, HALF, 1)


# ── prune / grow / pure ribbons ──────────────────────


def test_prune_merges_two_stars():
    G = _stars([8, 8, 8, 8, 6])
    starts = [0, 8, 16, 24, 32]
    sizes = [8, 8, 8, 8, 6]
    parts = [Part(vertex_set(range(a, a + s)), None, Ribbon(vertex_set(range(a, a + s)))) for a, s in zip(starts, sizes)]
    B = Beribboning(parts, 0, HALF)
    pruned = prune(B, build_cotree(G), G)
    assert pruned.dimensions == (3, 5)
    merged = next(p for p in pruned.restricted_parts if p.size == 12)
    assert merged.members == vertex_set(range(0, 6)) | vertex_set(range(32, 38))
    assert validate_beribboning(pruned, G).ok


def test_prune_rejects_invalid_input():
    G = _stars([8, 8])
    B = Beribboning([Part(vertex_set(range(8)), None, Ribbon(vertex_set(range(8))))], 0, HALF)
    with pytest.raises(PartitionError):
        prune(B, build_cotree(G), G)


def test_growtree_without_levels():
    G = _stars([8])
    B = growtree(build_cotree(G), G, HALF, 0)
    assert B.dimensions == (1, 1)
    assert B.parts[0].ribbon.length == 0
    assert validate_beribboning(B, G, stage_bounds("grow", HALF, 0)).ok


def test_growtree_restricted_input_stays_whole():
    G = edgeless(6)
    B = growtree(build_cotree(G), G, HALF, 3)
    assert B.dimensions == (0, 1)


@given(cographs(min_n=2, max_n=80), st.sampled_from([Fraction(1, 3), HALF]))
@settings(deadline=None, max_examples=40)
def test_growtree_bounds(pair, eps):
    G, T = pair
    k = 2 * math.ceil(1 / eps)
    B = growtree(T, G, eps, k)
    report = validate_beribboning(B, G, stage_bounds("grow", eps, k))
    assert report.ok, report.violations


@given(cographs(min_n=2, max_n=80), st.sampled_from([Fraction(1, 3), HALF]))
@settings(deadline=None, max_examples=40)
def test_pureribbon_bounds(pair, eps):
    G, T = pair
    B = pureribbon(T, G, eps)
    report = validate_beribboning(B, G, stage_bounds("pure", eps))
    assert report.ok, report.violations


def test_pureribbon_rejects_large_eps():
    G = complete(3)
    with pytest.raises(InputError):
        pureribbon(build_cotree(G), G, Fraction(3, 4))


def test_ribbon_purified_keeps_longer_polarity():
    r = Ribbon(1, [2, 4, 8], [Polarity.ANTICOMPLETE, Polarity.COMPLETE, Polarity.ANTICOMPLETE])
    assert r.polarity is Polarity.MIXED
    pure = r.purified()
    assert pure.blocks == [2, 8]
    assert pure.polarity is Polarity.ANTICOMPLETE


# ── prettify ─────────────────────────────────────────


def _two_ribboned_stars():
    # stars A = 0..7 and B = 8..15 plus an edgeless restricted S = 16..31
    G = from_edge_list(32, [(0, i) for i in range(1, 8)] + [(8, i) for i in range(9, 16)])
    A, Bm, S = vertex_set(range(8)), vertex_set(range(8, 16)), vertex_set(range(16, 32))
    anti = [Polarity.ANTICOMPLETE] * 2
    parts = [
        Part(A, None, Ribbon(A, [vertex_set(range(16, 20)), vertex_set(range(20, 24))], list(anti))),
        Part(Bm, None, Ribbon(Bm, [vertex_set(range(16, 20)), vertex_set(range(24, 28))], list(anti))),
        Part(S, check_restricted(G, S, HALF)),
    ]
    return G, Beribboning(parts, 2, HALF)


def test_prettify_separates_ribbons():
    G, B = _two_ribboned_stars()
    assert validate_beribboning(B, G, stage_bounds("pure", HALF)).ok
    pretty = prettify(B, build_cotree(G), G, dissolve_below=0)
    report = validate_beribboning(pretty, G, stage_bounds("pretty", HALF))
    assert report.ok, report.violations
    before = {p.members: p.ribbon for p in B.parts if not p.restricted}
    for part in pretty.parts:
        if part.restricted:
            continue
        assert [b.bit_count() for b in part.ribbon.blocks] == [1, 1]
        for new, old in zip(part.ribbon.blocks, before[part.members].blocks):
            assert new & ~old == 0


def test_prettify_dissolves_small_parts():
    G, B = _two_ribboned_stars()
    pretty = prettify(B, build_cotree(G), G)
    assert pretty.dimensions[0] == 0
    assert validate_beribboning(pretty, G).ok


def test_prettify_rejects_large_eps():
    G = edgeless(2)
    B = Beribboning([Part(G.full, check_restricted(G, G.full, Fraction(1)))], 1, Fraction(1))
    with pytest.raises(PartitionError):
        prettify(B, build_cotree(G), G)


def test_edge_colouring_complete_bipartite():
    edges = [(u, v) for u in range(3) for v in range(3)]
    colouring, colours = edge_colouring(edges, 3, 3)
    assert colours == 3
    assert set(colouring) == set(edges)
    for u in range(3):
        assert len({colouring[(u, v)] for v in range(3)}) == 3
        assert len({colouring[(v, u)] for v in range(3)}) == 3


@given(st.sets(st.tuples(st.integers(0, 5), st.integers(0, 6)), max_size=30))
def test_edge_colouring_is_proper(edge_set):
    edges = sorted(edge_set)
    colouring, colours = edge_colouring(edges, 6, 7)
    assert set(colouring) == set(edges)
    for e, f in combinations(edges, 2):
        if e[0] == f[0] or e[1] == f[1]:
            assert colouring[e] != colouring[f]
    assert all(0 <= c < colours for c in colouring.values())
    degrees = [sum(u == a for a, _ in edges) for u in range(6)] + [sum(v == b for _, b in edges) for v in range(7)]
    assert colours == max(degrees, default=0)


# ── final partition ──────────────────────────────────


def test_rodl_partition_single_vertex():
    G = complete(1)
    certs = rodl_partition(build_cotree(G), G, HALF)
    assert [c.members for c in certs] == [1]


def test_rodl_partition_shortcut_gives_singletons():
    G, T = random_cograph(30, HALF, 4)
    certs = rodl_partition(T, G, HALF, shortcut=True)
    assert [c.members for c in certs] == [1 << v for v in range(30)]
    assert validate_partition(G, certs, HALF).ok


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_rodl_partition_random(seed):
    G, T = random_cograph(60, HALF, seed)
    certs = rodl_partition(T, G, HALF)
    report = validate_partition(G, certs, HALF, math.floor(480 * 16))
    assert report.ok, report.violations


@pytest.mark.slow
@pytest.mark.parametrize("n", [500, 3000])
@pytest.mark.parametrize("eps", [Fraction(1, 10), Fraction(3, 10), HALF])
def test_rodl_partition_part_bound(n, eps):
    limit = math.floor(480 / eps**4)
    for seed in range(1, 26):
        G, T = random_cograph(n, HALF, seed)
        certs = rodl_partition(T, G, eps)
        report = validate_partition(G, certs, eps, limit)
        assert report.ok, (seed, report.violations)


@pytest.mark.slow
@pytest.mark.parametrize("eps", [Fraction(1, 4), HALF])
def test_every_stage_holds_its_bounds_on_large_cographs(eps):
    k = 2 * math.ceil(1 / eps)
    for seed in range(1, 21):
        G, T = random_cograph(2000, HALF, seed)
        assert validate_split(G, G.full, split(T, G, eps), eps).ok
        grown = growtree(T, G, eps, k)
        assert validate_beribboning(grown, G, stage_bounds("grow", eps, k)).ok
        pure = pureribbon(T, G, eps)
        assert validate_beribboning(pure, G, stage_bounds("pure", eps)).ok
        pretty = prettify(pure, T, G)
        report = validate_beribboning(pretty, G, stage_bounds("pretty", eps))
        assert report.ok, (seed, report.violations)


def test_rodl_partition_two_cliques():
    G = disjoint_cliques([6, 6])
    certs = rodl_partition(build_cotree(G), G, HALF)
    assert validate_partition(G, certs, HALF).ok


@pytest.mark.slow
def test_rodl_partition_needs_more_than_k_parts():
    eps = Fraction(2, 5)
    G = counterex_k(eps, 21)
    certs = rodl_partition(build_cotree(G), G, eps)
    assert validate_partition(G, certs, eps).ok
    assert len(certs) > 2


# ── validator negatives ──────────────────────────────


def test_validate_beribboning_flags_overlap_and_gaps():
    G = edgeless(4)
    cert = check_restricted(G, 0b0011, HALF)
    B = Beribboning([Part(0b0011, cert), Part(0b0011, cert)], 0, HALF)
    violations = validate_beribboning(B, G).violations
    assert any("overlaps" in v for v in violations)
    assert any("cover 2 of 4" in v for v in violations)


def test_validate_beribboning_flags_impure_block():
    G = from_edge_list(4, [(0, 2)])
    ribbon = Ribbon(0b0011, [0b1100], [Polarity.ANTICOMPLETE])
    B = Beribboning([Part(0b0011, None, ribbon), Part(0b1100, check_restricted(G, 0b1100, HALF))], 1, HALF)
    violations = validate_beribboning(B, G).violations
    assert any("block 0 is not anticomplete" in v for v in violations)


def test_validate_beribboning_flags_short_ribbon():
    G = _stars([8])
    B = Beribboning([Part(G.full, None, Ribbon(G.full))], 1, HALF)
    assert any("length 0 < 1" in v for v in validate_beribboning(B, G).violations)


def test_validate_beribboning_flags_impure_loose_parts():
    # a single edge between the two loose parts
    G = from_edge_list(4, [(0, 1), (2, 3), (0, 2)])
    B = Beribboning([Part(0b0011, None, Ribbon(0b0011)), Part(0b1100, None, Ribbon(0b1100))], 0, HALF)
    violations = validate_beribboning(B, G).violations
    assert "parts 0 and 1 are not a pure pair" in violations


def test_validate_beribboning_flags_block_inside_attachment():
    G = edgeless(4)
    ribbon = Ribbon(0b0011, [0b0110], [Polarity.ANTICOMPLETE])
    B = Beribboning([Part(0b0011, None, ribbon), Part(0b1100, check_restricted(G, 0b1100, HALF))], 1, HALF)
    violations = validate_beribboning(B, G).violations
    assert "part 0: block 0 meets the attachment or an earlier block" in violations
