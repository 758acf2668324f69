import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cographs
from cotree import build_cotree, random_cograph
from extract import (
    ExtractionParams,
    betterthm_extract,
    delta_bounds,
    p4thm_extract,
    product_extract,
    toprange_extract,
)
from generators import complete, disjoint_cliques, half_graph
from graph_core import InputError, Side, side_max_degree, vertex_set
from validator import check_certificate, check_extraction

fractions = st.fractions(min_value=Fraction(1, 20), max_value=1, max_denominator=20)


# ── two-bullet extraction ────────────────────────────


def test_betterthm_two_cliques_takes_a_clique():
    G = disjoint_cliques([5, 5])
    cert = betterthm_extract(build_cotree(G), G, ExtractionParams(Fraction(1, 2), Fraction(1, 2)))
    assert cert.side is Side.COMPLEMENT
    assert cert.members == vertex_set(range(5))
    assert cert.degree_bound == Fraction(5, 2)


def test_extraction_params_reject_bad_values():
    with pytest.raises(InputError):
        ExtractionParams(Fraction(-1), Fraction(1))
    with pytest.raises(InputError):
        ExtractionParams(Fraction(2), Fraction(3))


@given(cographs(), fractions, fractions)
@settings(deadline=None)
def test_betterthm_bullets(pair, x, y):
    G, T = pair
    N = G.n
    cert = betterthm_extract(T, G, ExtractionParams(x, y))
    target = x if cert.side is Side.GRAPH else y
    assert cert.size >= target * N
    assert side_max_degree(G, cert.members, cert.side) <= x * y * N


# ── p4thm ────────────────────────────────────────────


def test_p4thm_on_clique():
    G = complete(6)
    cert = p4thm_extract(build_cotree(G), G, Fraction(1, 2))
    assert cert.side is Side.COMPLEMENT
    assert cert.size >= 3
    assert cert.epsilon == Fraction(1, 2)


def test_p4thm_rejects_eps_above_one():
    G = complete(3)
    with pytest.raises(InputError):
        p4thm_extract(build_cotree(G), G, Fraction(3, 2))


@given(cographs(), fractions)
@settings(deadline=None)
def test_p4thm_guarantee(pair, eps):
    G, T = pair
    N = G.n
    cert = p4thm_extract(T, G, eps)
    assert check_extraction(G, cert, Fraction(math.ceil(eps * N)), eps**2 * N).ok
    assert check_certificate(G, cert).ok


@pytest.mark.slow
@pytest.mark.parametrize("n", [100, 1000])
def test_p4thm_on_large_random_cographs(n):
    for seed in range(1, 101):
        G, T = random_cograph(n, Fraction(1, 2), seed)
        for eps in (Fraction(1, 20), Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)):
            cert = p4thm_extract(T, G, eps)
            report = check_extraction(G, cert, Fraction(math.ceil(eps * n)), eps**2 * n)
            assert report.ok, (seed, eps, report.violations)
            assert side_max_degree(G, cert.members, cert.side) <= eps**2 * n


# ── product version ──────────────────────────────────


@given(cographs(max_n=30), fractions)
@settings(deadline=None, max_examples=50)
def test_product_guarantee(pair, eps):
    G, T = pair
    N = G.n
    X, Y = product_extract(T, G, eps)
    assert X.side is Side.GRAPH and Y.side is Side.COMPLEMENT
    assert side_max_degree(G, X.members, Side.GRAPH) <= eps * N
    assert side_max_degree(G, Y.members, Side.COMPLEMENT) <= eps * N
    assert X.size * Y.size >= eps * N * N


def test_product_on_clique():
    G = complete(8)
    X, Y = product_extract(build_cotree(G), G, Fraction(1, 4))
    assert Y.members == G.full
    assert X.size * Y.size >= 16


# ── exact regime ─────────────────────────────────────


def test_toprange_half_graph(half8):
    cert = toprange_extract(build_cotree(half8), half8, Fraction(1, 2))
    assert cert.size == 6
    assert cert.side is Side.COMPLEMENT
    assert side_max_degree(half8, cert.members, cert.side) <= Fraction(8, 3)


def test_toprange_clique_takes_everything():
    G = complete(4)
    cert = toprange_extract(build_cotree(G), G, Fraction(1, 2))
    assert cert.members == G.full
    assert cert.side is Side.COMPLEMENT


def test_toprange_pairs_a_large_piece():
    G = disjoint_cliques([5, 5])
    cert = toprange_extract(build_cotree(G), G, Fraction(1, 2))
    assert cert.members == vertex_set([0, 1, 2, 3, 5, 6, 7, 8])
    assert cert.side is Side.GRAPH


def test_toprange_rejects_small_eps():
    G = complete(4)
    with pytest.raises(InputError):
        toprange_extract(build_cotree(G), G, Fraction(1, 3))


@given(
    cographs(min_n=2),
    st.fractions(min_value=Fraction(1, 2), max_value=Fraction(19, 20), max_denominator=20),
)
@settings(deadline=None)
def test_toprange_guarantee(pair, eps):
    G, T = pair
    N = G.n
    delta = 1 / (2 - eps)
    cert = toprange_extract(T, G, eps)
    assert cert.size > delta * N
    assert side_max_degree(G, cert.members, cert.side) <= eps * delta * N


# ── closed-form bounds ───────────────────────────────


def test_delta_bounds_exact_above_half():
    bounds = delta_bounds(Fraction(1, 2))
    assert bounds.exact == Fraction(2, 3)
    assert bounds.lower == bounds.upper == Fraction(2, 3)


def test_delta_bounds_below_half():
    bounds = delta_bounds(Fraction(1, 3))
    assert bounds.exact is None
    assert (bounds.lower, bounds.upper) == (Fraction(1, 3), Fraction(1, 2))
    assert delta_bounds(Fraction(1, 4)).upper == Fraction(1, 3)


@pytest.mark.parametrize("eps", [Fraction(0), Fraction(1), Fraction(3, 2)])
def test_delta_bounds_rejects_out_of_range(eps):
    with pytest.raises(InputError):
        delta_bounds(eps)


def test_half_graph_optimum_matches_exact_delta():
    # the half graph on 8 vertices is where the exact regime is tight
    cert = toprange_extract(build_cotree(half_graph(8)), half_graph(8), Fraction(1, 2))
    assert cert.size > delta_bounds(Fraction(1, 2)).exact * 8
