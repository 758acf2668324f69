"""
Graph representation shared by every other module.

A Graph is an immutable simple undirected graph on vertex ids 0..n-1 whose
adjacency rows are Python ints used as bitsets. Vertex sets are plain int
bitmasks over the same ids. All thresholds are compared as exact Fractions.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator

log = logging.getLogger("Graph")

VertexSet = int  # bitmask: bit v set <=> vertex v is a member


class InputError(ValueError):
    """A precondition on caller-supplied data was violated."""


class SelfCheckError(RuntimeError):
    """A produced certificate failed its own exact re-validation."""


class Polarity(str, Enum):
    COMPLETE = "complete"
    ANTICOMPLETE = "anticomplete"
    MIXED = "mixed"


class Side(str, Enum):
    GRAPH = "graph"
    COMPLEMENT = "complement"

    @property
    def other(self) -> "Side":
        return Side.COMPLEMENT if self is Side.GRAPH else Side.GRAPH

    @property
    def letter(self) -> str:
        return "g" if self is Side.GRAPH else "c"


# ── Bitset helpers ────────────────────────────────────────────────────────────

def iter_bits(mask: VertexSet) -> Iterator[int]:
    """Yield the members of a bitmask in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: VertexSet) -> list[int]:
    return list(iter_bits(mask))


def vertex_set(vertices: Iterable[int]) -> VertexSet:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def size(mask: VertexSet) -> int:
    return mask.bit_count()


def lowest(mask: VertexSet) -> int:
    """Smallest member; -1 for the empty set."""
    return (mask & -mask).bit_length() - 1


def smallest(mask: VertexSet, count: int) -> VertexSet:
    """The `count` smallest members of mask (all of them if count exceeds |mask|)."""
    out = 0
    for v in iter_bits(mask):
        if count <= 0:
            break
        out |= 1 << v
        count -= 1
    return out


# ── Domain types ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...] = field(repr=False)

    @property
    def full(self) -> VertexSet:
        return (1 << self.n) - 1

    def row(self, v: int, side: Side = Side.GRAPH) -> VertexSet:
        """Neighbours of v on the chosen side (never contains v)."""
        if side is Side.GRAPH:
            return self.adj[v]
        return self.full & ~self.adj[v] & ~(1 << v)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.adj[u] >> (u + 1) << (u + 1))]

    def check_subset(self, X: VertexSet) -> None:
        if X < 0 or X >> self.n:
            raise InputError(f"vertex set {members(X)} is not a subset of 0..{self.n - 1}")


@dataclass(frozen=True)
class RestrictedCertificate:
    """
    A vertex set together with the side whose maximum degree on it is at most
    degree_bound. When epsilon is present the certificate also claims
    degree_bound <= epsilon * |members|, i.e. eps-restriction.
    """
    members: VertexSet
    side: Side
    degree_bound: Fraction
    epsilon: Fraction | None = None

    @property
    def size(self) -> int:
        return self.members.bit_count()

    def vertices(self) -> list[int]:
        return members(self.members)


# ── Operations ────────────────────────────────────────────────────────────────

def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """
    Build a Graph from 0-based vertex pairs.

    Duplicate pairs are merged (logged at warning level); out-of-range
    endpoints and self-loops raise InputError naming the offending pair.
    """
    if n < 0:
        raise InputError(f"vertex count must be non-negative, got {n}")
    rows = [0] * n
    duplicates = 0
    for i, (u, v) in enumerate(edges, 1):
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge {i} ({u} {v}): endpoint out of range 0..{n - 1}")
        if u == v:
            raise InputError(f"edge {i} ({u} {v}): self-loop")
        if rows[u] >> v & 1:
            duplicates += 1
            continue
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    if duplicates:
        log.warning(f"dropped {duplicates} duplicate edge(s)")
    return Graph(n, tuple(rows))


def complement(G: Graph) -> Graph:
    return Graph(G.n, tuple(G.row(v, Side.COMPLEMENT) for v in range(G.n)))


def induced(G: Graph, X: VertexSet) -> tuple[Graph, list[int]]:
    """
    Induced subgraph on X, reindexed in ascending original-id order.

    Returns the graph and the relabelling map (new id -> original id).
    """
    G.check_subset(X)
    old_ids = members(X)
    position = {v: i for i, v in enumerate(old_ids)}
    rows = []
    for v in old_ids:
        rows.append(vertex_set(position[u] for u in iter_bits(G.adj[v] & X)))
    return Graph(len(old_ids), tuple(rows)), old_ids


def side_max_degree(G: Graph, X: VertexSet, side: Side) -> int:
    """Maximum degree of the chosen side restricted to X (0 for the empty set)."""
    best = 0
    for v in iter_bits(X):
        d = (G.row(v, side) & X).bit_count()
        if d > best:
            best = d
    return best


def edge_density(G: Graph) -> Fraction:
    if G.n <= 1:
        raise InputError(f"edge density is undefined on {G.n} vertices")
    return Fraction(G.edge_count(), G.n * (G.n - 1) // 2)


def side_density(G: Graph, X: VertexSet, side: Side) -> Fraction:
    """Edge density of the chosen side on X; sets with fewer than two vertices have density 0."""
    k = X.bit_count()
    if k <= 1:
        return Fraction(0)
    degree_sum = sum((G.row(v, side) & X).bit_count() for v in iter_bits(X))
    return Fraction(degree_sum, k * (k - 1))


def check_restricted(G: Graph, X: VertexSet, eps: Fraction) -> RestrictedCertificate | None:
    """
    Certificate that X is eps-restricted on the side of smaller max degree
    (graph side on ties), or None when neither side is within eps*|X|.
    """
    if not X:
        raise InputError("check_restricted needs a nonempty vertex set")
    G.check_subset(X)
    eps = Fraction(eps)
    degree, side = min(
        (side_max_degree(G, X, Side.GRAPH), Side.GRAPH),
        (side_max_degree(G, X, Side.COMPLEMENT), Side.COMPLEMENT),
        key=lambda pair: pair[0],
    )
    if degree > eps * X.bit_count():
        return None
    return RestrictedCertificate(X, side, Fraction(degree), eps)


def components(G: Graph, X: VertexSet, side: Side) -> list[VertexSet]:
    """Connected components of the chosen side on X, sorted by smallest member."""
    remaining = X
    found = []
    while remaining:
        start = remaining & -remaining
        remaining ^= start
        comp = frontier = start
        while frontier:
            reach = 0
            for v in iter_bits(frontier):
                reach |= G.row(v, side)
            frontier = reach & remaining
            remaining &= ~frontier
            comp |= frontier
        found.append(comp)
    return found


def is_pure_pair(G: Graph, P: VertexSet, Q: VertexSet) -> Polarity | None:
    """Polarity of two disjoint vertex sets, or None when the pair is not pure."""
    complete = anticomplete = True
    for v in iter_bits(P):
        cross = G.adj[v] & Q
        if cross != Q:
            complete = False
        if cross:
            anticomplete = False
        if not (complete or anticomplete):
            return None
    if complete:
        return Polarity.COMPLETE
    return Polarity.ANTICOMPLETE
