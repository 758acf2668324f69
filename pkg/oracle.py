"""
Exponential reference searches for small graphs.

Each oracle checks its instance against an OracleBudget before starting and
raises OracleRefusal rather than return a partial answer. Results are exact.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from config import ORACLE_MAX_PARTITION, ORACLE_MAX_SUBSET, ORACLE_TIME_CAP
from graph_core import (
    Graph,
    InputError,
    RestrictedCertificate,
    Side,
    VertexSet,
    iter_bits,
    vertex_set,
)

log = logging.getLogger("Oracle")

REFERENCE_COUNT_MAX = 10


class OracleRefusal(RuntimeError):
    """The instance is above the oracle budget or ran past the time cap."""


@dataclass(frozen=True)
class OracleBudget:
    max_vertices_subset: int = ORACLE_MAX_SUBSET
    max_vertices_partition: int = ORACLE_MAX_PARTITION
    time_cap: float = ORACLE_TIME_CAP

    def __post_init__(self):
        if min(self.max_vertices_subset, self.max_vertices_partition) < 1 or self.time_cap <= 0:
            raise InputError(f"oracle budget must be positive, got {self}")


@dataclass
class _Clock:
    cap: float
    start: float = field(default_factory=time.monotonic)
    ticks: int = 0

    def tick(self) -> None:
        self.ticks += 1
        if self.ticks & 0xFFF == 0 and time.monotonic() - self.start > self.cap:
            raise OracleRefusal(f"time cap of {self.cap}s exceeded after {self.ticks} steps")


def _refuse_above(G: Graph, limit: int, what: str) -> None:
    if G.n > limit:
        raise OracleRefusal(f"{what} refuses {G.n} vertices (budget {limit})")


def _max_degrees(G: Graph, X: VertexSet) -> tuple[int, int]:
    """(graph-side, complement-side) max degree on X."""
    k = X.bit_count()
    worst_g = 0
    worst_c = 0
    for v in iter_bits(X):
        d = (G.adj[v] & X).bit_count()
        worst_g = max(worst_g, d)
        worst_c = max(worst_c, k - 1 - d)
    return worst_g, worst_c


# ── Largest restricted set ────────────────────────────────────────────────────

def max_restricted_set(
    G: Graph,
    eps: Fraction,
    absolute_bound: Fraction | None = None,
    budget: OracleBudget | None = None,
) -> tuple[int, RestrictedCertificate]:
    """
    Largest X with one side of max degree <= eps|X| (or <= absolute_bound).

    Sizes are tried from |G| downwards, subsets of one size in
    lexicographic order, so the witness is the first optimal set found.
    """
    budget = budget or OracleBudget()
    _refuse_above(G, budget.max_vertices_subset, "max_restricted_set")
    if G.n == 0:
        raise InputError("max_restricted_set needs at least one vertex")
    eps = Fraction(eps)
    if absolute_bound is not None:
        absolute_bound = Fraction(absolute_bound)
        if absolute_bound < 0:
            raise InputError(f"absolute_bound must be non-negative, got {absolute_bound}")
    clock = _Clock(budget.time_cap)
    for s in range(G.n, 0, -1):
        limit = absolute_bound if absolute_bound is not None else eps * s
        for combo in combinations(range(G.n), s):
            clock.tick()
            X = vertex_set(combo)
            worst_g, worst_c = _max_degrees(G, X)
            claim = eps if absolute_bound is None else None
            if worst_g <= limit:
                return s, RestrictedCertificate(X, Side.GRAPH, Fraction(worst_g), claim)
            if worst_c <= limit:
                return s, RestrictedCertificate(X, Side.COMPLEMENT, Fraction(worst_c), claim)
    raise InputError("unreachable: singletons always qualify")


def max_sparse_or_dense_set(
    G: Graph,
    eps: Fraction,
    budget: OracleBudget | None = None,
) -> tuple[VertexSet, Side]:
    """Largest X on which one side has edge density <= eps (graph side first)."""
    budget = budget or OracleBudget()
    _refuse_above(G, budget.max_vertices_subset, "max_sparse_or_dense_set")
    if G.n == 0:
        raise InputError("max_sparse_or_dense_set needs at least one vertex")
    eps = Fraction(eps)
    clock = _Clock(budget.time_cap)
    for s in range(G.n, 0, -1):
        pairs = s * (s - 1)
        for combo in combinations(range(G.n), s):
            clock.tick()
            X = vertex_set(combo)
            twice_edges = sum((G.adj[v] & X).bit_count() for v in combo)
            if twice_edges <= eps * pairs:
                return X, Side.GRAPH
            if pairs - twice_edges <= eps * pairs:
                return X, Side.COMPLEMENT
    raise InputError("unreachable: singletons always qualify")


# ── Fewest restricted parts ───────────────────────────────────────────────────

def min_restricted_partition(
    G: Graph,
    eps: Fraction,
    budget: OracleBudget | None = None,
) -> tuple[int, list[RestrictedCertificate]]:
    """
    Minimum number of eps-restricted parts covering V(G), with one optimal partition.

    Every vertex subset is classified once; then k = 1, 2, ... is tried,
    always placing the lowest uncovered vertex, with failed (set, k) pairs
    memoized.
    """
    budget = budget or OracleBudget()
    _refuse_above(G, budget.max_vertices_partition, "min_restricted_partition")
    eps = Fraction(eps)
    if G.n == 0:
        return 0, []
    clock = _Clock(budget.time_cap)

    side_of: list[Side | None] = [None] * (1 << G.n)
    for X in range(1, 1 << G.n):
        clock.tick()
        worst_g, worst_c = _max_degrees(G, X)
        limit = eps * X.bit_count()
        if worst_g <= limit:
            side_of[X] = Side.GRAPH
        elif worst_c <= limit:
            side_of[X] = Side.COMPLEMENT

    failed: set[tuple[int, int]] = set()

    def cover(X: VertexSet, k: int) -> list[VertexSet] | None:
        if side_of[X] is not None:
            return [X]
        if k <= 1 or (X, k) in failed:
            return None
        low = X & -X
        rest = X ^ low
        sub = rest
        while True:
            clock.tick()
            part = sub | low
            if part != X and side_of[part] is not None:
                found = cover(X ^ part, k - 1)
                if found is not None:
                    return [part] + found
            if sub == 0:
                break
            sub = (sub - 1) & rest
        failed.add((X, k))
        return None

    for k in range(1, G.n + 1):
        parts = cover(G.full, k)
        if parts is not None:
            log.debug(f"{G.n} vertices need {len(parts)} eps-restricted part(s) at eps={eps}")
            certs = []
            for X in sorted(parts, key=lambda m: m & -m):
                degree = _max_degrees(G, X)[0 if side_of[X] is Side.GRAPH else 1]
                certs.append(RestrictedCertificate(X, side_of[X], Fraction(degree), eps))
            return len(certs), certs
    raise InputError("unreachable: singletons are always restricted")


# ── Copy counting reference ───────────────────────────────────────────────────

def count_copies_reference(H: Graph, G: Graph) -> int:
    """Copies of H in G by trying every injective map V(H) -> V(G)."""
    if H.n == 0:
        raise InputError("a pattern needs at least one vertex")
    if G.n > REFERENCE_COUNT_MAX:
        raise OracleRefusal(f"count_copies_reference refuses {G.n} vertices (budget {REFERENCE_COUNT_MAX})")
    pairs = list(combinations(range(H.n), 2))
    total = 0
    for image in permutations(range(G.n), H.n):
        if all(H.has_edge(a, b) == G.has_edge(image[a], image[b]) for a, b in pairs):
            total += 1
    return total
