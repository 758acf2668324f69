"""
Sparse/dense extraction in cographs.

Every extractor walks the cotree, builds its set, and re-checks the promised
inequalities exactly before returning; a violated inequality raises
SelfCheckError instead of returning a weaker certificate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from cotree import Cotree, NodeKind, Peeler
from graph_core import (
    Graph,
    InputError,
    Polarity,
    RestrictedCertificate,
    SelfCheckError,
    Side,
    VertexSet,
    side_max_degree,
    smallest,
)

log = logging.getLogger("Extract")


@dataclass(frozen=True)
class ExtractionParams:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.x < 0 or self.y < 0:
            raise InputError(f"x and y must be non-negative, got x={self.x} y={self.y}")
        if min(self.x, self.y) > 1:
            raise InputError(f"min(x, y) must be at most 1, got x={self.x} y={self.y}")


@dataclass(frozen=True)
class DeltaBounds:
    eps: Fraction
    lower: Fraction
    upper: Fraction
    exact: Fraction | None = None


def _certify(
    G: Graph,
    X: VertexSet,
    side: Side,
    bound: Fraction,
    eps: Fraction | None = None,
) -> RestrictedCertificate:
    degree = side_max_degree(G, X, side)
    if degree > bound:
        raise SelfCheckError(
            f"{side.value}-side max degree {degree} exceeds bound {bound} on {X.bit_count()} vertices"
        )
    return RestrictedCertificate(X, side, Fraction(bound), eps)


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


# ── Two-bullet recursion ──────────────────────────────────────────────────────

class _Frame:
    __slots__ = ("node", "x", "y", "acc", "next", "started")

    def __init__(self, node, x: Fraction, y: Fraction):
        self.node = node
        self.x = x
        self.y = y
        self.acc = 0
        self.next = 0
        self.started = False


def _terminal(frame: _Frame) -> tuple[Side, VertexSet] | None:
    node, n = frame.node, frame.node.size
    if frame.x > 1:
        return Side.COMPLEMENT, smallest(node.members, max(1, _ceil(frame.y * n)))
    if frame.y > 1:
        return Side.GRAPH, smallest(node.members, max(1, _ceil(frame.x * n)))
    if node.is_leaf:
        return Side.GRAPH, node.members
    return None


def _two_bullet(T: Cotree, x: Fraction, y: Fraction) -> tuple[Side, VertexSet]:
    """
    Either a graph-side set of size >= x|T| or a complement-side set of size
    >= y|T|, both with side degree <= xy|T|.

    A union node hands each child (x, y|G|/|G_i|): one complement-side answer
    is returned as is, otherwise the graph-side answers are merged. A join node
    is the dual with (x|G|/|G_i|, y). The bound xy|G| is the same at every level.
    """
    stack = [_Frame(T.root, x, y)]
    returned: tuple[Side, VertexSet] | None = None
    while stack:
        frame = stack[-1]
        node = frame.node
        if not frame.started:
            frame.started = True
            returned = _terminal(frame)
            if returned is not None:
                stack.pop()
                continue
        elif returned is not None:
            side, mask = returned
            returned = None
            escape = Side.COMPLEMENT if node.kind is NodeKind.UNION else Side.GRAPH
            if side is escape:
                returned = (side, mask)
                stack.pop()
                continue
            frame.acc |= mask
        if frame.next < len(node.children):
            child = node.children[frame.next]
            frame.next += 1
            scale = Fraction(node.size, child.size)
            if node.kind is NodeKind.UNION:
                stack.append(_Frame(child, frame.x, frame.y * scale))
            else:
                stack.append(_Frame(child, frame.x * scale, frame.y))
            continue
        merged = Side.GRAPH if node.kind is NodeKind.UNION else Side.COMPLEMENT
        returned = (merged, frame.acc)
        stack.pop()
    return returned


def betterthm_extract(T: Cotree, G: Graph, p: ExtractionParams) -> RestrictedCertificate:
    """
    Set X with |X| >= x|G| and graph-side degree <= xy|G|, or Y with
    |Y| >= y|G| and complement-side degree <= xy|G|; the certificate side
    records which one. |G| is the number of vertices of T.
    """
    N = T.size
    bound = p.x * p.y * N
    side, X = _two_bullet(T, p.x, p.y)
    target = p.x if side is Side.GRAPH else p.y
    if X.bit_count() < target * N:
        raise SelfCheckError(f"{side.value}-side set has {X.bit_count()} vertices, needs {target * N}")
    return _certify(G, X, side, bound)


def p4thm_extract(T: Cotree, G: Graph, eps: Fraction) -> RestrictedCertificate:
    """
    Set of at least ceil(eps|G|) vertices with one side of max degree <= eps^2|G|.

    Args:
        T: cotree of the vertex set to extract from (may be a restriction)
        G: graph supplying adjacency
        eps: rational in [0, 1]

    Returns:
        certificate with degree_bound eps^2|G|, marked eps-restricted when
        eps^2|G| <= eps|X|
    """
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise InputError(f"eps must lie in [0, 1], got {eps}")
    cert = betterthm_extract(T, G, ExtractionParams(eps, eps))
    claim = eps if cert.degree_bound <= eps * cert.size else None
    if eps > 0 and claim is None:
        raise SelfCheckError(f"eps^2|G| = {cert.degree_bound} exceeds eps|X| = {eps * cert.size}")
    return RestrictedCertificate(cert.members, cert.side, cert.degree_bound, claim)


# ── Product version ───────────────────────────────────────────────────────────

def product_extract(
    T: Cotree, G: Graph, eps: Fraction
) -> tuple[RestrictedCertificate, RestrictedCertificate]:
    """
    Graph-side X and complement-side Y, both of max degree <= eps|G|, with
    |X|*|Y| >= eps|G|^2.

    A linear sweep over x = a/|G| (a = |G|..1, y = eps/x) collects the best X
    and Y. If the grid pair misses the product bound, x is moved strictly
    above the best |X| and the extraction rerun until either X grows or the
    returned Y is large enough.
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise InputError(f"eps must lie in (0, 1], got {eps}")
    N = T.size
    bound = eps * N
    target = eps * N * N
    best_x = smallest(T.vertices, 1)
    best_y = smallest(T.vertices, 1)

    def run(a: Fraction) -> None:
        nonlocal best_x, best_y
        side, S = _two_bullet(T, a / N, eps * N / a)
        if side is Side.GRAPH and S.bit_count() > best_x.bit_count():
            best_x = S
        elif side is Side.COMPLEMENT and S.bit_count() > best_y.bit_count():
            best_y = S

    for a in range(N, 0, -1):
        run(Fraction(a))

    rounds = 0
    while best_x.bit_count() * best_y.bit_count() < target:
        sx = best_x.bit_count()
        if sx == N:
            best_y = smallest(T.vertices, _ceil(eps * N))
            break
        need = _ceil(target / sx)
        if need <= 1:
            break
        ceiling = min(Fraction(sx + 1), target / (need - 1))
        run((sx + ceiling) / 2)
        rounds += 1
    if rounds:
        log.debug(f"product refinement took {rounds} extra extraction(s)")

    X = _certify(G, best_x, Side.GRAPH, bound)
    Y = _certify(G, best_y, Side.COMPLEMENT, bound)
    if X.size * Y.size < target:
        raise SelfCheckError(f"|X||Y| = {X.size * Y.size} is below eps|G|^2 = {target}")
    return X, Y


# ── Exact regime ──────────────────────────────────────────────────────────────

def toprange_extract(T: Cotree, G: Graph, eps: Fraction) -> RestrictedCertificate:
    """
    For 1/2 <= eps < 1 and delta = 1/(2-eps): a set X with |X| > delta|G|
    and one side of max degree <= eps*delta|G|.
    """
    eps = Fraction(eps)
    if not Fraction(1, 2) <= eps < 1:
        raise InputError(f"eps must lie in [1/2, 1), got {eps}")
    N = T.size
    delta = 1 / (2 - eps)
    bound = eps * delta * N

    def finish(X: VertexSet, side: Side) -> RestrictedCertificate:
        if X.bit_count() <= delta * N:
            raise SelfCheckError(f"set of {X.bit_count()} vertices is not larger than delta|G| = {delta * N}")
        return _certify(G, X, side, bound)

    if bound >= N - 1:
        return finish(T.vertices, Side.GRAPH)

    peeler = Peeler(T)
    pieces: list[tuple[VertexSet, Polarity]] = []
    while not peeler.done:
        piece, polarity = peeler.peel()
        if piece.bit_count() > delta * N / 2:
            half = math.floor(delta * N / 2 + 1)
            A = smallest(piece, half)
            B = smallest(peeler.remaining(), half)
            side = Side.COMPLEMENT if polarity is Polarity.COMPLETE else Side.GRAPH
            log.debug(f"large piece of {piece.bit_count()} vertices, pairing {half}+{half}")
            return finish(A | B, side)
        pieces.append((piece, polarity))
    last = peeler.remaining()

    # tails[h] = |X_{h+1} u ... u X_k| with pieces indexed from 1
    k = len(pieces) + 1
    tails = [0] * k
    tails[k - 1] = last.bit_count()
    for i in range(k - 2, -1, -1):
        tails[i] = tails[i + 1] + pieces[i][0].bit_count()
    h = next(i for i in range(k) if tails[i] <= bound + 1)
    if h == 0:
        raise SelfCheckError("whole vertex set fits the degree bound after the early exit")

    Y = last
    for piece, _ in pieces[h:]:
        Y |= piece
    X_h, polarity_h = pieces[h - 1]
    Z = smallest(X_h, math.floor(bound + 1) - Y.bit_count())
    same, other = Y, Y | Z
    for piece, polarity in pieces[:h]:
        if polarity is polarity_h:
            same |= piece
        else:
            other |= piece
    side_same = Side.GRAPH if polarity_h is Polarity.ANTICOMPLETE else Side.COMPLEMENT
    if same.bit_count() >= other.bit_count():
        return finish(same, side_same)
    return finish(other, side_same.other)


# ── Closed-form bounds ────────────────────────────────────────────────────────

def delta_bounds(eps: Fraction) -> DeltaBounds:
    """Known lower and upper bounds on delta_eps; exact value for eps >= 1/2."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InputError(f"eps must lie in (0, 1), got {eps}")
    if eps >= Fraction(1, 2):
        exact = 1 / (2 - eps)
        return DeltaBounds(eps, max(eps, exact), exact, exact)
    return DeltaBounds(eps, eps, Fraction(1, math.ceil(1 / eps) - 1))
