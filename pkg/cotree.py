"""
Cograph recognition and the cotree decomposition.

build_cotree splits a vertex set into components (union node) or
co-components (join node) until single vertices remain. A set of two or more
vertices that is connected on both sides holds an induced P4, which is
returned instead of a tree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from graph_core import (
    Graph,
    InputError,
    Polarity,
    SelfCheckError,
    Side,
    VertexSet,
    components,
    iter_bits,
    lowest,
)

log = logging.getLogger("Cotree")


class NodeKind(str, Enum):
    UNION = "U"
    JOIN = "J"
    LEAF = "leaf"

    @property
    def side(self) -> Side:
        """Side on which the children of this node are disconnected from each other."""
        return Side.GRAPH if self is NodeKind.UNION else Side.COMPLEMENT


@dataclass(eq=False)
class CotreeNode:
    kind: NodeKind
    members: VertexSet
    children: list["CotreeNode"] = field(default_factory=list)

    @property
    def vertex(self) -> int:
        return lowest(self.members)

    @property
    def size(self) -> int:
        return self.members.bit_count()

    @property
    def is_leaf(self) -> bool:
        return self.kind is NodeKind.LEAF


@dataclass(eq=False)
class Cotree:
    root: CotreeNode

    @property
    def vertices(self) -> VertexSet:
        return self.root.members

    @property
    def size(self) -> int:
        return self.root.size

    def nodes(self) -> list[CotreeNode]:
        """All nodes in pre-order."""
        out, stack = [], [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out

    def realize(self, n: int | None = None) -> Graph:
        """The graph this cotree describes, on ids 0..n-1 (default: up to the largest leaf)."""
        if n is None:
            n = self.vertices.bit_length()
        rows = [0] * n
        for node in self.nodes():
            if node.kind is not NodeKind.JOIN:
                continue
            for child in node.children:
                others = node.members & ~child.members
                for v in iter_bits(child.members):
                    rows[v] |= others
        return Graph(n, tuple(rows))


@dataclass(frozen=True)
class P4Witness:
    a: int
    b: int
    c: int
    d: int

    def vertices(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class CliqueStable:
    clique: VertexSet
    stable: VertexSet

    @property
    def clique_size(self) -> int:
        return self.clique.bit_count()

    @property
    def stable_size(self) -> int:
        return self.stable.bit_count()


# ── Recognition ───────────────────────────────────────────────────────────────

def build_cotree(G: Graph) -> Cotree | P4Witness:
    """
    Normalized cotree of G, or an induced P4 when G is not a cograph.

    Children of every node are ordered by their smallest vertex. Runs
    without recursion so deep (threshold-like) cotrees are fine.
    """
    if G.n == 0:
        raise InputError("cannot build a cotree for the null graph")
    root = CotreeNode(NodeKind.LEAF, G.full)
    stack = [root]
    while stack:
        node = stack.pop()
        if node.members.bit_count() == 1:
            continue
        parts = components(G, node.members, Side.GRAPH)
        node.kind = NodeKind.UNION
        if len(parts) == 1:
            parts = components(G, node.members, Side.COMPLEMENT)
            node.kind = NodeKind.JOIN
            if len(parts) == 1:
                witness = find_p4(G, node.members)
                log.debug(f"not a cograph: induced P4 {witness.vertices()}")
                return witness
        node.children = [CotreeNode(NodeKind.LEAF, part) for part in parts]
        stack.extend(node.children)
    return Cotree(root)


def find_p4(G: Graph, X: VertexSet) -> P4Witness:
    """Induced path a-b-c-d inside X, scanning middle edges bc in ascending order."""
    for b in iter_bits(X):
        for c in iter_bits(G.adj[b] & X & ~((2 << b) - 1)):
            A = G.adj[b] & X & ~G.adj[c] & ~(1 << c)
            D = G.adj[c] & X & ~G.adj[b] & ~(1 << b)
            for a in iter_bits(A):
                far = D & ~G.adj[a]
                if far:
                    return P4Witness(a, b, c, lowest(far))
    raise SelfCheckError(f"no induced P4 found in {X:#x} although both sides are connected")


def is_cograph(G: Graph) -> bool:
    return G.n == 0 or isinstance(build_cotree(G), Cotree)


# ── Tree operations ───────────────────────────────────────────────────────────

def restrict(T: Cotree, X: VertexSet) -> Cotree:
    """Normalized cotree of the induced subgraph on X, read off T without re-recognition."""
    X &= T.vertices
    if not X:
        raise InputError("cannot restrict a cotree to an empty vertex set")
    reduced: dict[int, CotreeNode | None] = {}
    order = T.nodes()
    for node in reversed(order):
        if node.is_leaf:
            reduced[id(node)] = node if node.members & X else None
            continue
        kept: list[CotreeNode] = []
        for child in node.children:
            sub = reduced.pop(id(child))
            if sub is None:
                continue
            if sub.kind is node.kind:
                kept.extend(sub.children)
            else:
                kept.append(sub)
        if not kept:
            reduced[id(node)] = None
        elif len(kept) == 1:
            reduced[id(node)] = kept[0]
        else:
            kept.sort(key=lambda c: lowest(c.members))
            reduced[id(node)] = CotreeNode(node.kind, node.members & X, kept)
    return Cotree(reduced[id(T.root)])


def max_clique_and_stable(T: Cotree) -> CliqueStable:
    """
    Maximum clique and maximum stable set by tree DP.

    A join adds the children's cliques and keeps the best stable set; a union
    is the dual. Ties keep the child with the smaller first vertex.
    """
    best: dict[int, CliqueStable] = {}
    for node in reversed(T.nodes()):
        if node.is_leaf:
            best[id(node)] = CliqueStable(node.members, node.members)
            continue
        parts = [best.pop(id(child)) for child in node.children]
        if node.kind is NodeKind.JOIN:
            clique = 0
            for p in parts:
                clique |= p.clique
            stable = max(parts, key=lambda p: p.stable_size).stable
        else:
            stable = 0
            for p in parts:
                stable |= p.stable
            clique = max(parts, key=lambda p: p.clique_size).clique
        best[id(node)] = CliqueStable(clique, stable)
    return best[id(T.root)]


class Peeler:
    """
    Walks a cotree by repeatedly removing the smallest child of the current
    node (ties: smallest vertex). A removed child is complete (join) or
    anticomplete (union) to everything left. When a single child remains the
    walk descends into it.
    """

    def __init__(self, T: Cotree):
        self.node = T.root
        self.rest = list(self.node.children)
        self._descend()

    def _descend(self) -> None:
        while len(self.rest) == 1:
            self.node = self.rest[0]
            self.rest = list(self.node.children)

    @property
    def done(self) -> bool:
        return not self.rest

    def remaining(self) -> VertexSet:
        if not self.rest:
            return self.node.members
        mask = 0
        for child in self.rest:
            mask |= child.members
        return mask

    def smallest(self) -> CotreeNode:
        return min(self.rest, key=lambda c: (c.size, lowest(c.members)))

    def peel(self) -> tuple[VertexSet, Polarity]:
        child = self.smallest()
        polarity = Polarity.COMPLETE if self.node.kind is NodeKind.JOIN else Polarity.ANTICOMPLETE
        self.rest.remove(child)
        self._descend()
        return child.members, polarity


def depth(T: Cotree) -> int:
    deepest = 0
    stack = [(T.root, 0)]
    while stack:
        node, d = stack.pop()
        deepest = max(deepest, d)
        stack.extend((child, d + 1) for child in node.children)
    return deepest


# ── Random instances ──────────────────────────────────────────────────────────

def random_cograph(n: int, join_bias: Fraction, seed: int) -> tuple[Graph, Cotree]:
    """
    Random cograph on n vertices with its normalized cotree.

    Draws from numpy's PCG64 (``default_rng(seed)``) in pre-order: for every
    subtree of s >= 2 vertices, first a left size uniform on 1..s-1, then a
    uniform draw in [0, 1) that makes the node a join when below join_bias.
    Leaves are numbered left to right and finally relabelled by one
    ``rng.permutation(n)``. Same-type parent/child pairs are merged.
    """
    if n < 1:
        raise InputError(f"random_cograph needs n >= 1, got {n}")
    join_bias = Fraction(join_bias)
    if not 0 < join_bias < 1:
        raise InputError(f"join_bias must lie in (0, 1), got {join_bias}")
    rng = np.random.default_rng(seed)
    threshold = float(join_bias)

    # Shape: binary tree over leaf positions [start, start+size).
    root = CotreeNode(NodeKind.LEAF, 0)
    pending = [(root, 0, n)]
    leaves: list[CotreeNode] = []
    while pending:
        node, start, span = pending.pop()
        if span == 1:
            node.members = start  # leaf position, relabelled below
            leaves.append(node)
            continue
        left = int(rng.integers(1, span))
        node.kind = NodeKind.JOIN if rng.random() < threshold else NodeKind.UNION
        node.children = [CotreeNode(NodeKind.LEAF, 0), CotreeNode(NodeKind.LEAF, 0)]
        # Right child pushed first so the left subtree is drawn first.
        pending.append((node.children[1], start + left, span - left))
        pending.append((node.children[0], start, left))

    labels = rng.permutation(n)
    for leaf in leaves:
        leaf.members = 1 << int(labels[leaf.members])

    shaped = Cotree(root)
    for node in reversed(shaped.nodes()):
        if node.is_leaf:
            continue
        node.members = 0
        for child in node.children:
            node.members |= child.members
    tree = restrict(shaped, shaped.vertices)
    return tree.realize(n), tree
