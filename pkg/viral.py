"""
Induced-copy counting, vertex substitution, and an empirical viral checker.

A copy of H in G is an injective map V(H) -> V(G) that preserves both edges
and non-edges, so every induced occurrence is counted once per automorphism
of H. viral_check never claims that a pattern is viral; it only reports, for
one graph, which side of the viral disjunction it could certify.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from config import COUNT_CAP, ORACLE_MAX_SUBSET, PATTERN_MAX, THREADS
from cotree import Cotree, build_cotree, is_cograph
from extract import p4thm_extract
from graph_core import (
    Graph,
    InputError,
    SelfCheckError,
    Side,
    VertexSet,
    from_edge_list,
    iter_bits,
    side_density,
    vertex_set,
)

log = logging.getLogger("Viral")

Pattern = Graph


class ViralBranch(str, Enum):
    MANY_COPIES = "many_copies"
    SPARSE_OR_DENSE_SET = "sparse_or_dense_set"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class RestrictedDensityCertificate:
    """A vertex set on which the chosen side has edge density at most eps."""
    members: VertexSet
    side: Side
    density: Fraction

    @property
    def size(self) -> int:
        return self.members.bit_count()


@dataclass(frozen=True)
class ViralVerdict:
    branch: ViralBranch
    copy_count: int
    threshold: Fraction | float
    witness: RestrictedDensityCertificate | None = None
    method: str | None = None


# ── Copy counting ─────────────────────────────────────────────────────────────

def _search_order(H: Pattern) -> list[int]:
    """Pattern vertices ordered so each one sees as many placed vertices as possible."""
    order: list[int] = []
    placed = 0
    remaining = set(range(H.n))
    while remaining:
        v = max(
            remaining,
            key=lambda u: ((H.adj[u] & placed).bit_count(), H.adj[u].bit_count(), -u),
        )
        order.append(v)
        placed |= 1 << v
        remaining.discard(v)
    return order


def _count_extensions(H: Pattern, G: Graph, order: list[int], images: list[int], used: VertexSet) -> int:
    level = len(images)
    h = order[level]
    candidates = G.full & ~used
    for earlier, g in zip(order, images):
        if H.adj[h] >> earlier & 1:
            candidates &= G.adj[g]
        else:
            candidates &= ~G.adj[g]
        if not candidates:
            return 0
    if level == H.n - 1:
        return candidates.bit_count()
    total = 0
    for g in iter_bits(candidates):
        images.append(g)
        total += _count_extensions(H, G, order, images, used | 1 << g)
        images.pop()
    return total


def _count_from(args: tuple[Pattern, Graph, list[int], int]) -> int:
    H, G, order, first = args
    if H.n == 1:
        return 1
    return _count_extensions(H, G, order, [first], 1 << first)


def count_copies(
    H: Pattern,
    G: Graph,
    cap: int | None = COUNT_CAP,
    threads: int = THREADS,
) -> int:
    """
    Exact number of copies of H in G.

    Backtracks over pattern vertices, narrowing each candidate set with one
    adjacency row per placed vertex; the last level is a popcount. With
    threads > 1 the images of the first pattern vertex are shared out over
    a process pool and the partial counts summed.

    Args:
        H: pattern with 1..PATTERN_MAX vertices
        G: host graph
        cap: largest host accepted (None disables the guard)
        threads: worker processes
    """
    if H.n == 0:
        raise InputError("a pattern needs at least one vertex")
    if H.n > PATTERN_MAX:
        raise InputError(f"pattern has {H.n} vertices, limit is {PATTERN_MAX}")
    if cap is not None and G.n > cap:
        raise InputError(f"host graph has {G.n} vertices, count cap is {cap}")
    if H.n > G.n:
        return 0
    if G.n >= H.n >= 4 and not is_cograph(H) and is_cograph(G):
        log.debug("pattern holds an induced P4 and the host is a cograph: 0 copies")
        return 0

    order = _search_order(H)
    jobs = [(H, G, order, g) for g in range(G.n)]
    if threads > 1 and G.n > 1:
        chunk = max(1, G.n // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads) as executor:
            total = sum(executor.map(_count_from, jobs, chunksize=chunk))
    else:
        total = sum(_count_from(job) for job in jobs)
    log.debug(f"{total} copies of a {H.n}-vertex pattern in {G.n} vertices")
    return total


def automorphism_count(H: Pattern) -> int:
    return count_copies(H, H, cap=None, threads=1)


# ── Substitution ──────────────────────────────────────────────────────────────

def substitute(H1: Graph, v: int, H2: Graph) -> Graph:
    """
    Replace vertex v of H1 by a copy of H2 joined completely to N(v).

    The survivors of H1 keep their relative order as 0..|H1|-2; H2 follows.
    """
    if not 0 <= v < H1.n:
        raise InputError(f"vertex {v} is not in 0..{H1.n - 1}")
    if H2.n == 0:
        raise InputError("cannot substitute the null graph")
    keep = [u for u in range(H1.n) if u != v]
    new_id = {u: i for i, u in enumerate(keep)}
    offset = len(keep)
    edges = [(new_id[a], new_id[b]) for a, b in H1.edges() if v not in (a, b)]
    edges += [(offset + a, offset + b) for a, b in H2.edges()]
    edges += [(new_id[u], offset + j) for u in iter_bits(H1.adj[v]) for j in range(H2.n)]
    return from_edge_list(offset + H2.n, edges)


def substitution_closure_sample(
    base: list[Pattern],
    depth: int,
    seed: int,
    count: int = 16,
) -> list[Pattern]:
    """
    Sample `count` graphs from the closure of `base` under substitution.

    Each sample starts from a random base graph H; every step draws a base
    graph B and a coin, then sets H to either H with a random vertex
    replaced by B, or B with a random vertex replaced by H.
    """
    if not base:
        raise InputError("substitution needs at least one base graph")
    if depth < 0:
        raise InputError(f"depth must be non-negative, got {depth}")
    if any(B.n == 0 for B in base):
        raise InputError("base graphs must be nonempty")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        H = base[int(rng.integers(len(base)))]
        for _ in range(depth):
            B = base[int(rng.integers(len(base)))]
            if rng.random() < 0.5:
                H = substitute(H, int(rng.integers(H.n)), B)
            else:
                H = substitute(B, int(rng.integers(B.n)), H)
        out.append(H)
    return out


def substitution_exponent(d1: Fraction, d2: Fraction, h2_size: int) -> Fraction:
    """Exponent that substituting H2 (viral with d2) into H1 (viral with d1) is viral with."""
    return (h2_size + 1) * (Fraction(d1) + 1) + Fraction(d2)


def p4_viral_exponent(removal_exponent: Fraction) -> Fraction:
    """P4 exponent implied by a removal-lemma exponent d: max(3, 12d)."""
    return max(Fraction(3), 12 * Fraction(removal_exponent))


# ── Viral checker ─────────────────────────────────────────────────────────────

class _Scale:
    """Exact comparisons against eps^d * n^h for rational d = p/q."""

    def __init__(self, eps: Fraction, d: Fraction, n: int, h: int):
        self.eps, self.d, self.n, self.h = eps, d, n, h
        self.p, self.q = d.numerator, d.denominator
        self.eps_p = eps ** self.p

    def many(self, copies: int) -> bool:
        return Fraction(copies) ** self.q >= self.eps_p * Fraction(self.n) ** (self.h * self.q)

    def big(self, s: int) -> bool:
        return Fraction(s) ** self.q >= self.eps_p * Fraction(self.n) ** self.q

    @property
    def threshold(self) -> Fraction | float:
        if self.q == 1:
            return self.eps ** self.p * self.n ** self.h
        return float(self.eps) ** float(self.d) * self.n ** self.h


def _witness(G: Graph, X: VertexSet, side: Side, eps: Fraction, scale: _Scale) -> RestrictedDensityCertificate | None:
    density = side_density(G, X, side)
    if density <= eps and scale.big(X.bit_count()):
        return RestrictedDensityCertificate(X, side, density)
    return None


def _from_cotree(T: Cotree, G: Graph, eps: Fraction, scale: _Scale) -> RestrictedDensityCertificate | None:
    e = eps
    for _ in range(64):
        if not scale.big(math.ceil(e * G.n)):
            break
        cert = p4thm_extract(T, G, e)
        found = _witness(G, cert.members, cert.side, eps, scale)
        if found is not None:
            return found
        e /= 2
    return None


def _by_peeling(G: Graph, eps: Fraction, scale: _Scale) -> RestrictedDensityCertificate | None:
    for side in (Side.GRAPH, Side.COMPLEMENT):
        X = G.full
        while X:
            if side_density(G, X, side) <= eps:
                found = _witness(G, X, side, eps, scale)
                if found is not None:
                    return found
                break
            worst = max(iter_bits(X), key=lambda v: ((G.row(v, side) & X).bit_count(), -v))
            X &= ~(1 << worst)
    return None


def _homogeneous_triple(G: Graph) -> tuple[VertexSet, Side] | None:
    for side in (Side.COMPLEMENT, Side.GRAPH):
        for u in range(G.n):
            above_u = G.row(u, side) >> (u + 1) << (u + 1)
            for v in iter_bits(above_u):
                common = above_u & G.row(v, side) >> (v + 1) << (v + 1)
                if common:
                    w = (common & -common).bit_length() - 1
                    # a clique on `side` has density 0 on the other one
                    return vertex_set((u, v, w)), side.other
    return None


def _small_set(G: Graph, eps: Fraction, scale: _Scale) -> RestrictedDensityCertificate | None:
    found = _homogeneous_triple(G)
    if found is not None:
        witness = _witness(G, found[0], found[1], eps, scale)
        if witness is not None:
            return witness
    if G.n >= 2:
        side = Side.COMPLEMENT if G.has_edge(0, 1) else Side.GRAPH
        witness = _witness(G, 0b11, side, eps, scale)
        if witness is not None:
            return witness
    return _witness(G, 1, Side.GRAPH, eps, scale)


def viral_check(
    G: Graph,
    H: Pattern,
    eps: Fraction,
    d: Fraction,
    count_cap: int | None = COUNT_CAP,
    threads: int = THREADS,
    exhaustive_max: int = ORACLE_MAX_SUBSET,
) -> ViralVerdict:
    """
    Decide one instance of the viral disjunction for (G, H, eps, d).

    Counts copies exactly first. Failing that, looks for a set of at least
    eps^d|G| vertices with one side of density <= eps: through the cotree
    when G is a cograph, by max-degree peeling on both sides, among sets of
    at most three vertices, and finally by exhaustive search on small
    graphs. A verdict other than undecided is always re-validated.
    """
    eps = Fraction(eps)
    d = Fraction(d)
    if not 0 < eps <= Fraction(1, 2):
        raise InputError(f"eps must lie in (0, 1/2], got {eps}")
    if d <= 0:
        raise InputError(f"d must be positive, got {d}")

    copies = count_copies(H, G, cap=count_cap, threads=threads)
    scale = _Scale(eps, d, G.n, H.n)
    if scale.many(copies):
        return ViralVerdict(ViralBranch.MANY_COPIES, copies, scale.threshold, method="count")
    log.info(f"{copies} copies fall short of eps^d n^h; searching for a sparse or dense set")

    steps = []
    if G.n:
        tree = build_cotree(G)
        if isinstance(tree, Cotree):
            steps.append(("cotree", lambda: _from_cotree(tree, G, eps, scale)))
    steps.append(("peeling", lambda: _by_peeling(G, eps, scale)))
    steps.append(("small-set", lambda: _small_set(G, eps, scale)))
    if 0 < G.n <= exhaustive_max:
        steps.append(("exhaustive", lambda: _exhaustive(G, eps, scale)))

    for method, step in steps:
        witness = step()
        if witness is None:
            continue
        if side_density(G, witness.members, witness.side) != witness.density:
            raise SelfCheckError(f"{method}: recorded density {witness.density} does not re-validate")
        log.debug(f"{method} found {witness.size} vertices of {witness.side.value}-side density {witness.density}")
        return ViralVerdict(ViralBranch.SPARSE_OR_DENSE_SET, copies, scale.threshold, witness, method)
    return ViralVerdict(ViralBranch.UNDECIDED, copies, scale.threshold)


def _exhaustive(G: Graph, eps: Fraction, scale: _Scale) -> RestrictedDensityCertificate | None:
    from oracle import max_sparse_or_dense_set

    X, side = max_sparse_or_dense_set(G, eps)
    witness = _witness(G, X, side, eps, scale)
    if witness is None:
        log.info(f"no set of {G.n} vertices or fewer meets eps^d|G| at density <= {eps}")
    return witness
