"""
Extremal and counterexample graphs, plus a few small named graphs.

Vertex numbering is block-contiguous and frozen (see README):
  half_graph(2n)   a_1..a_n = 0..n-1, b_1..b_n = n..2n-1
  counterex_k      C_0 first, then C_1..C_k
  counterex3(n)    A = 0..2n-1, B = 2n..5n-1, C = 5n..9n-1, D = 9n..14n-1
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations

import numpy as np

from graph_core import Graph, InputError, from_edge_list

log = logging.getLogger("Generators")


# ── Small named graphs ────────────────────────────────────────────────────────

def edgeless(n: int) -> Graph:
    return from_edge_list(n, [])


def complete(n: int) -> Graph:
    return from_edge_list(n, combinations(range(n), 2))


def path(n: int) -> Graph:
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise InputError(f"a cycle needs at least 3 vertices, got {n}")
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


# ── Constructions ─────────────────────────────────────────────────────────────

def disjoint_cliques(sizes: list[int]) -> Graph:
    """Disjoint cliques of the given sizes, numbered consecutively."""
    if any(s < 1 for s in sizes):
        raise InputError(f"clique sizes must be positive, got {sizes}")
    edges = []
    start = 0
    for s in sizes:
        edges.extend(combinations(range(start, start + s), 2))
        start += s
    return from_edge_list(start, edges)


def half_graph(two_n: int) -> Graph:
    """Stable a_1..a_n, clique b_1..b_n, and a_i ~ b_j exactly when i <= j."""
    if two_n < 2 or two_n % 2:
        raise InputError(f"half_graph needs an even vertex count >= 2, got {two_n}")
    n = two_n // 2
    edges = list(combinations(range(n, two_n), 2))
    edges += [(i, n + j) for i in range(n) for j in range(i, n)]
    return from_edge_list(two_n, edges)


def counterex_k_shape(eps: Fraction) -> tuple[int, int]:
    """(k, m) with k = floor(1/eps) and m the least integer with (1 - k eps) m >= 1."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise InputError(f"eps must lie in (0, 1/2), got {eps}")
    if (1 / eps).denominator == 1:
        raise InputError(f"1/eps must not be an integer, got eps = {eps}")
    k = math.floor(1 / eps)
    m = math.ceil(1 / (1 - k * eps))
    return k, m


def counterex_k_min_n(eps: Fraction) -> int:
    """Least n for which counterex_k(eps, n) has no partition into k eps-restricted sets."""
    k, m = counterex_k_shape(eps)
    slack = 1 - k * Fraction(eps)
    # need m n + n/k > (n + k)/slack
    rate = m + Fraction(1, k) - 1 / slack
    return math.floor(Fraction(k) / slack / rate) + 1


def counterex_k(eps: Fraction, n: int) -> Graph:
    """k+1 disjoint cliques: C_0 of size n, then k cliques of size m n."""
    k, m = counterex_k_shape(eps)
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    log.debug(f"counterex_k eps={eps}: k={k} m={m} n={n}")
    return disjoint_cliques([n] + [m * n] * k)


def counterex3(n: int) -> Graph:
    """Stable sets A, B, C of sizes 2n, 3n, 4n pairwise complete, plus a clique D of 5n."""
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    a, b, c, d = 2 * n, 3 * n, 4 * n, 5 * n
    A = range(0, a)
    B = range(a, a + b)
    C = range(a + b, a + b + c)
    D = range(a + b + c, a + b + c + d)
    edges = [(u, v) for X, Y in ((A, B), (A, C), (B, C)) for u in X for v in Y]
    edges += combinations(D, 2)
    return from_edge_list(14 * n, edges)


def gnp(n: int, p: Fraction | float, seed: int) -> Graph:
    """
    Uniform random graph: pair u < v is an edge when the (u, v) entry of
    ``default_rng(seed).random((n, n))`` is below p.
    """
    if n < 0:
        raise InputError(f"n must be non-negative, got {n}")
    p = float(p)
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p}")
    draws = np.random.default_rng(seed).random((n, n))
    us, vs = np.nonzero(np.triu(draws < p, k=1))
    return from_edge_list(n, zip(us.tolist(), vs.tolist()))


# ── Named constructions ───────────────────────────────────────────────────────

class ConstructionKind(str, Enum):
    DISJOINT_CLIQUES = "cliques"
    HALF_GRAPH = "half"
    COUNTEREX_K = "cx-k"
    COUNTEREX3 = "cx3"


@dataclass(frozen=True)
class ConstructionSpec:
    """
    A construction by kind and parameters:
      cliques  sizes...
      half     2n
      cx-k     eps n
      cx3      n
    """
    kind: ConstructionKind
    parameters: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", ConstructionKind(self.kind))
        object.__setattr__(self, "parameters", tuple(Fraction(p) for p in self.parameters))

    def _ints(self, count: int | None = None) -> list[int]:
        if count is not None and len(self.parameters) != count:
            raise InputError(f"{self.kind.value} takes {count} parameter(s), got {len(self.parameters)}")
        if any(p.denominator != 1 for p in self.parameters):
            raise InputError(f"{self.kind.value} parameters must be integers, got {self.parameters}")
        return [int(p) for p in self.parameters]

    def build(self) -> Graph:
        if self.kind is ConstructionKind.DISJOINT_CLIQUES:
            sizes = self._ints()
            if not sizes:
                raise InputError("cliques needs at least one size")
            return disjoint_cliques(sizes)
        if self.kind is ConstructionKind.HALF_GRAPH:
            return half_graph(*self._ints(1))
        if self.kind is ConstructionKind.COUNTEREX3:
            return counterex3(*self._ints(1))
        if len(self.parameters) != 2 or self.parameters[1].denominator != 1:
            raise InputError(f"cx-k takes parameters 'eps n', got {self.parameters}")
        return counterex_k(self.parameters[0], int(self.parameters[1]))
