"""
Partitions of cographs into eps-restricted sets.

Stages, each taking the previous one's output:
    split       one set -> A0 (restricted) + three mutually pure sets
    growtree    repeated splits, every loose part carrying a ribbon of length k
    prune       merges loose parts until at most eps^-2 remain
    pureribbon  keeps the longer single-polarity half of every ribbon
    prettify    disjoint, equal-size, half-overlap ribbons (small parts dissolved)
    rodl_partition  final partition into at most 480 eps^-4 restricted sets
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from config import PARTITION_CONSTANT, PRETTIFY_Q
from cotree import Cotree, NodeKind, Peeler, max_clique_and_stable, restrict
from extract import p4thm_extract
from graph_core import (
    Graph,
    InputError,
    Polarity,
    RestrictedCertificate,
    SelfCheckError,
    Side,
    VertexSet,
    check_restricted,
    iter_bits,
    lowest,
    members,
    smallest,
    vertex_set,
)
from validator import StageBounds, validate_beribboning

log = logging.getLogger("Partition")

__all__ = [
    "Beribboning", "Part", "PartitionError", "PurePair", "Ribbon", "SplitResult",
    "edge_colouring", "greedy_restricted_cover", "growtree", "prettify", "prune",
    "pureribbon", "rodl_partition", "split", "stage_bounds", "thin_thick_partition",
    "validate_beribboning",
]


class PartitionError(InputError):
    """A beribboning handed to a stage violates that stage's preconditions."""


# ── Domain types ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PurePair:
    left: VertexSet
    right: VertexSet
    polarity: Polarity


@dataclass
class Ribbon:
    attachment: VertexSet
    blocks: list[VertexSet] = field(default_factory=list)
    polarities: list[Polarity] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.blocks)

    @property
    def polarity(self) -> Polarity:
        """Shared polarity of all blocks; an empty ribbon counts as complete."""
        kinds = set(self.polarities)
        if len(kinds) > 1:
            return Polarity.MIXED
        return kinds.pop() if kinds else Polarity.COMPLETE

    @property
    def breadth(self) -> Fraction:
        if not self.blocks:
            return Fraction(1)
        return Fraction(min(b.bit_count() for b in self.blocks), self.attachment.bit_count())

    @property
    def union(self) -> VertexSet:
        mask = 0
        for block in self.blocks:
            mask |= block
        return mask

    def prefixed(self, attachment: VertexSet, block: VertexSet, polarity: Polarity) -> "Ribbon":
        return Ribbon(attachment, [block] + self.blocks, [polarity] + self.polarities)

    def reattached(self, attachment: VertexSet) -> "Ribbon":
        return Ribbon(attachment, list(self.blocks), list(self.polarities))

    def purified(self) -> "Ribbon":
        """Longer of the complete-only and anticomplete-only subsequences (ties: complete)."""
        keep = {
            polarity: [b for b, p in zip(self.blocks, self.polarities) if p is polarity]
            for polarity in (Polarity.COMPLETE, Polarity.ANTICOMPLETE)
        }
        polarity = Polarity.COMPLETE
        if len(keep[Polarity.ANTICOMPLETE]) > len(keep[Polarity.COMPLETE]):
            polarity = Polarity.ANTICOMPLETE
        blocks = keep[polarity]
        return Ribbon(self.attachment, blocks, [polarity] * len(blocks))


@dataclass
class Part:
    members: VertexSet
    certificate: RestrictedCertificate | None = None
    ribbon: Ribbon | None = None

    @property
    def size(self) -> int:
        return self.members.bit_count()

    @property
    def restricted(self) -> bool:
        return self.certificate is not None


@dataclass
class Beribboning:
    parts: list[Part]
    k: int
    eps: Fraction

    @property
    def restricted_parts(self) -> list[Part]:
        return [p for p in self.parts if p.restricted]

    @property
    def ribbons(self) -> dict[VertexSet, Ribbon]:
        return {p.members: p.ribbon for p in self.parts if not p.restricted}

    @property
    def dimensions(self) -> tuple[int, int]:
        return len(self.parts) - len(self.restricted_parts), len(self.parts)

    @property
    def breadth(self) -> Fraction:
        values = [p.ribbon.breadth for p in self.parts if not p.restricted and p.ribbon is not None]
        return min(values, default=Fraction(1))


@dataclass(frozen=True)
class SplitResult:
    parts: tuple[VertexSet, VertexSet, VertexSet, VertexSet]
    certificate: RestrictedCertificate | None
    witnesses: tuple[PurePair | None, PurePair | None, PurePair | None]


def stage_bounds(stage: str, eps: Fraction, k: int = 0) -> StageBounds:
    """Dimension, breadth and shape limits guaranteed after each stage."""
    eps = Fraction(eps)
    inv2 = 1 / eps**2
    if stage == "grow":
        return StageBounds(inv2, 1 + 3 * k * inv2, eps**2 / 4 if k else Fraction(1), k)
    if stage == "pure":
        return StageBounds(inv2, 10 / eps**3, eps**2 / 4, math.ceil(1 / eps), pure=True)
    if stage == "pretty":
        return StageBounds(inv2, 21 / eps**4, eps**4 / 32, math.ceil(1 / eps), pure=True, prettified=True)
    raise InputError(f"unknown stage {stage!r}")


def _restricted(G: Graph, X: VertexSet, eps: Fraction) -> RestrictedCertificate:
    cert = check_restricted(G, X, eps)
    if cert is None:
        raise SelfCheckError(f"set of {X.bit_count()} vertices starting at {lowest(X)} is not {eps}-restricted")
    return cert


def _check_eps(eps: Fraction, upper: Fraction = Fraction(1)) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps <= upper:
        raise InputError(f"eps must lie in (0, {upper}], got {eps}")
    return eps


# ── Thin / thick ──────────────────────────────────────────────────────────────

def thin_thick_partition(T: Cotree, G: Graph) -> tuple[VertexSet, VertexSet]:
    """
    Split V into a thin set (graph-side components of at most (|X|+1)/2
    vertices) and a thick set (the same on the complement side).

    Finds a minimal C with |C| > |V|/2, A anticomplete and B complete to C,
    then balances the two halves of C against A and B.
    """
    if T.size == 0:
        raise InputError("thin/thick partition of the null graph")
    N = T.size
    if N == 1:
        return T.vertices, 0

    anti = full = 0
    node = T.root
    while not node.is_leaf:
        big = next((c for c in node.children if 2 * c.size > N), None)
        if big is None:
            break
        rest = node.members & ~big.members
        if node.kind is NodeKind.UNION:
            anti |= rest
        else:
            full |= rest
        node = big

    kept = sorted(node.children, key=lambda c: (c.size, lowest(c.members)))
    total = node.size
    for child in list(kept):
        if 2 * (total - child.size) > N:
            kept.remove(child)
            total -= child.size
            if node.kind is NodeKind.UNION:
                anti |= child.members
            else:
                full |= child.members
    P = kept[0].members
    Q = 0
    for child in kept[1:]:
        Q |= child.members

    # Read the union case in the complement, where P and Q are complete.
    flipped = node.kind is NodeKind.UNION
    A, B = (full, anti) if flipped else (anti, full)
    a, b, p, q = A.bit_count(), B.bit_count(), P.bit_count(), Q.bit_count()
    m = max(0, q - p - b)
    from_p = smallest(P, math.ceil(Fraction(a - m, 2)))
    from_q = smallest(Q, (a + m) // 2)
    X = A | from_p | from_q
    Y = B | (P & ~from_p) | (Q & ~from_q)
    log.debug(f"thin/thick: |A|={a} |B|={b} |P|={p} |Q|={q} m={m} flipped={flipped}")
    return (Y, X) if flipped else (X, Y)


# ── Split ─────────────────────────────────────────────────────────────────────

def split(T: Cotree, G: Graph, eps: Fraction) -> SplitResult:
    """
    Partition the vertices of T into A0 (eps-restricted) and A1, A2, A3
    (pairwise pure), each nonempty Ai paired with a pure witness of at least
    (eps^2/4)|T| vertices outside it.

    Small sets (at most (eps^2/4)|T| vertices) are peeled off the cotree while
    their total stays below |T|/2. The remainder splits into its smallest
    child C and the rest B; whether C is small decides which sets are glued
    into the restricted part.

    Args:
        T: cotree of the set being split (may be a restriction)
        G: graph supplying adjacency
        eps: rational in (0, 1]

    Returns:
        SplitResult with parts (A0, A1, A2, A3), A0's certificate and one
        witness per Ai (None when Ai is empty)
    """
    eps = _check_eps(eps)
    N = T.size
    if N < 2:
        raise InputError(f"split needs at least 2 vertices, got {N}")
    small = eps * eps * N / 4

    peeler = Peeler(T)
    peeled: list[tuple[VertexSet, Polarity]] = []
    total = 0
    while not peeler.done:
        c = peeler.smallest()
        if c.size > small or 2 * (total + c.size) >= N:
            break
        peeled.append(peeler.peel())
        total += c.size

    C = peeler.smallest().members
    B = peeler.remaining() & ~C
    pol_bc = Polarity.COMPLETE if peeler.node.kind is NodeKind.JOIN else Polarity.ANTICOMPLETE

    def gather(polarity: Polarity) -> VertexSet:
        mask = 0
        for piece, p in peeled:
            if p is polarity:
                mask |= piece
        return mask

    flip = {Polarity.COMPLETE: Polarity.ANTICOMPLETE, Polarity.ANTICOMPLETE: Polarity.COMPLETE}

    if C.bit_count() <= small:
        P = gather(pol_bc) | C
        Q = gather(flip[pol_bc])
        if P.bit_count() >= eps * N / 4:
            parts = (P, B, Q, 0)
            witnesses = (PurePair(B, P, pol_bc), PurePair(Q, B, flip[pol_bc]) if Q else None, None)
        else:
            parts = (Q, B, P, 0)
            witnesses = (PurePair(B, Q, flip[pol_bc]), PurePair(P, B, pol_bc), None)
    else:
        cert = p4thm_extract(restrict(T, B), G, eps)
        X = smallest(cert.members, math.ceil(eps * B.bit_count()))
        quiet = Polarity.ANTICOMPLETE if cert.side is Side.GRAPH else Polarity.COMPLETE
        Q = gather(quiet) | X
        P = gather(flip[quiet])
        A1 = B & ~X
        parts = (Q, A1, C, P)
        witnesses = (
            PurePair(A1, C, pol_bc) if A1 else None,
            PurePair(C, B, pol_bc),
            PurePair(P, B, flip[quiet]) if P else None,
        )

    A0 = parts[0]
    certificate = _restricted(G, A0, eps) if A0 else None
    log.debug(f"split {N} -> {[p.bit_count() for p in parts]} after peeling {len(peeled)}")
    return SplitResult(parts, certificate, witnesses)


# ── Greedy cover ──────────────────────────────────────────────────────────────

def greedy_restricted_cover(
    T: Cotree,
    G: Graph,
    X: VertexSet,
    eps: Fraction,
    t: int,
) -> tuple[list[RestrictedCertificate], VertexSet]:
    """
    Up to t disjoint eps-restricted subsets of X, each pulled out of the
    current remainder R by p4thm_extract; the final remainder Y satisfies
    |Y| <= (1 - eps)^t |X|.
    """
    eps = _check_eps(eps)
    if X & ~T.vertices:
        raise InputError("cover set is not inside the cotree's vertex set")
    certs: list[RestrictedCertificate] = []
    R = X
    tree = restrict(T, R) if R else None
    for _ in range(t):
        if not R:
            break
        S = p4thm_extract(tree, G, eps).members
        certs.append(_restricted(G, S, eps))
        R &= ~S
        if R:
            tree = restrict(tree, R)
    return certs, R


def _cover_until(
    T: Cotree,
    G: Graph,
    X: VertexSet,
    eps: Fraction,
    t: int,
    leftover: int = 0,
) -> tuple[list[RestrictedCertificate], VertexSet]:
    """greedy_restricted_cover, continued past t rounds until at most `leftover` vertices remain."""
    certs, R = greedy_restricted_cover(T, G, X, eps, t)
    if R.bit_count() > leftover:
        log.warning(f"{R.bit_count()} vertices left after {t} rounds; covering further")
        while R.bit_count() > leftover:
            more, R = greedy_restricted_cover(T, G, R, eps, 1)
            certs.extend(more)
    return certs, R


# ── Prune ─────────────────────────────────────────────────────────────────────

def _require(B: Beribboning, G: Graph, bounds: StageBounds | None = None) -> None:
    report = validate_beribboning(B, G, bounds)
    if not report.ok:
        raise PartitionError(f"invalid beribboning: {report.violations[0]}")


def prune(B: Beribboning, T: Cotree, G: Graph, check: bool = True) -> Beribboning:
    """
    Reduce the number of loose (non-restricted) parts to at most eps^-2.

    While too many remain, t = ceil(1/eps) loose parts that are pairwise
    complete or pairwise anticomplete are found through the clique/stable DP
    on one representative per part. Equal slices of the t smallest of them
    are merged into a new restricted part; the rest of each part keeps its
    ribbon.
    """
    if check:
        _require(B, G)
    eps = B.eps
    t = math.ceil(1 / eps)
    limit = 1 / eps**2
    parts = list(B.parts)
    merges = 0
    while True:
        loose = [p for p in parts if not p.restricted]
        if len(loose) <= limit:
            break
        reps = {lowest(p.members): p for p in loose}
        best = max_clique_and_stable(restrict(T, vertex_set(reps)))
        chosen = best.clique if best.clique_size >= t else best.stable
        if chosen.bit_count() < t:
            raise SelfCheckError(f"{len(loose)} parts but no pure family of {t}")
        group = sorted((reps[v] for v in iter_bits(chosen)), key=lambda p: (p.size, lowest(p.members)))[:t]
        s = group[0].size
        merged = 0
        replacement: dict[int, Part | None] = {}
        for part in group:
            piece = smallest(part.members, s)
            merged |= piece
            rest = part.members & ~piece
            if not rest:
                replacement[id(part)] = None
                continue
            cert = check_restricted(G, rest, eps)
            ribbon = None if cert else part.ribbon.reattached(rest)
            replacement[id(part)] = Part(rest, cert, ribbon)
        replacement[id(group[0])] = Part(merged, _restricted(G, merged, eps))
        parts = [replacement.get(id(p), p) for p in parts]
        parts = [p for p in parts if p is not None]
        merges += 1
    if merges:
        log.info(f"prune: {merges} merge(s), {len(parts)} parts")
    return Beribboning(parts, B.k, eps)


# ── Grow ──────────────────────────────────────────────────────────────────────

def growtree(T: Cotree, G: Graph, eps: Fraction, k: int) -> Beribboning:
    """
    An (eps, k)-beribboning with at most eps^-2 loose parts, at most
    1 + 3k eps^-2 parts, and breadth at least eps^2/4.

    Each round splits every loose part, prefixes the split witness to the
    ribbon the part inherited, and prunes.
    """
    eps = _check_eps(eps)
    if k < 0:
        raise InputError(f"ribbon length must be non-negative, got {k}")
    V = T.vertices
    cert = check_restricted(G, V, eps)
    B = Beribboning([Part(V, cert, None if cert else Ribbon(V))], 0, eps)
    trees: dict[VertexSet, Cotree] = {V: T}

    for level in range(1, k + 1):
        parts: list[Part] = []
        for part in B.parts:
            if part.restricted:
                parts.append(part)
                continue
            tree = trees.pop(part.members, None) or restrict(T, part.members)
            result = split(tree, G, eps)
            if result.parts[0]:
                parts.append(Part(result.parts[0], result.certificate))
            for A, witness in zip(result.parts[1:], result.witnesses):
                if not A:
                    continue
                cert = check_restricted(G, A, eps)
                if cert:
                    parts.append(Part(A, cert))
                    continue
                parts.append(Part(A, None, part.ribbon.prefixed(A, witness.right, witness.polarity)))
                trees[A] = restrict(tree, A)
        B = prune(Beribboning(parts, level, eps), T, G, check=False)
        trees = {p.members: trees[p.members] for p in B.parts if not p.restricted and p.members in trees}
        log.debug(f"growtree level {level}: dimensions {B.dimensions}")
    return B


def pureribbon(T: Cotree, G: Graph, eps: Fraction) -> Beribboning:
    """Pure (eps, ceil(1/eps))-beribboning from growtree with k = 2 ceil(1/eps)."""
    eps = _check_eps(eps, Fraction(1, 2))
    k = math.ceil(1 / eps)
    grown = growtree(T, G, eps, 2 * k)
    parts = [p if p.restricted else replace(p, ribbon=p.ribbon.purified()) for p in grown.parts]
    return Beribboning(parts, k, eps)


# ── Prettify ──────────────────────────────────────────────────────────────────

def edge_colouring(edges: list[tuple[int, int]], left: int, right: int) -> tuple[dict[tuple[int, int], int], int]:
    """
    Proper edge colouring of a simple bipartite graph with max-degree colours.

    Edges are (u, v) with u in 0..left-1 and v in 0..right-1. When the free
    colour a at u is taken at v, the a/b alternating path from v is swapped,
    which in a bipartite graph never reaches u.

    Returns:
        (colour of every edge, number of colours)
    """
    degree = [0] * (left + right)
    for u, v in edges:
        degree[u] += 1
        degree[left + v] += 1
    colours = max(degree, default=0)
    at: list[dict[int, int]] = [{} for _ in range(left + right)]

    def free(node: int) -> int:
        return next(c for c in range(colours) if c not in at[node])

    for u, v in edges:
        x, y = u, left + v
        a, b = free(x), free(y)
        if a in at[y]:
            path = []
            node, c = y, a
            while c in at[node]:
                nxt = at[node][c]
                path.append((node, nxt, c))
                node, c = nxt, (b if c == a else a)
            for p, q, c in path:
                del at[p][c]
                del at[q][c]
            for p, q, c in path:
                d = b if c == a else a
                at[p][d] = q
                at[q][d] = p
        at[x][a] = y
        at[y][a] = x

    colouring = {}
    for u in range(left):
        for c, y in at[u].items():
            colouring[(u, y - left)] = c
    return colouring, colours


def _dissolve(T: Cotree, G: Graph, part: Part, eps: Fraction, t: int) -> list[Part]:
    certs, _ = _cover_until(T, G, part.members, eps, t)
    return [Part(c.members, c) for c in certs]


def _disjoint_blocks(loose: list[Part], k: int) -> list[list[VertexSet]]:
    """
    Sub-blocks C_ij of the first k blocks of every ribbon, pairwise disjoint
    across all ribbons, each keeping at least floor(|B_ij|/m) vertices.

    Every block is cut into chunks of m consecutive vertices; chunks and
    vertices form a bipartite graph of max degree m whose edge colouring
    gives m matchings. The matching with the largest smallest C_ij wins
    (ties: lowest colour).
    """
    m = len(loose)
    chunks: list[tuple[int, int]] = []
    edges: list[tuple[int, int]] = []
    for i, part in enumerate(loose):
        for j, block in enumerate(part.ribbon.blocks[:k]):
            vs = members(block)
            for start in range(0, len(vs), m):
                for v in vs[start:start + m]:
                    edges.append((len(chunks), v))
                chunks.append((i, j))
    colouring, colours = edge_colouring(edges, len(chunks), max(v for _, v in edges) + 1 if edges else 0)

    best, best_score = None, -1
    for colour in range(colours):
        picked = [[0] * min(k, p.ribbon.length) for p in loose]
        for (chunk, v), c in colouring.items():
            if c == colour:
                i, j = chunks[chunk]
                picked[i][j] |= 1 << v
        score = min((c.bit_count() for row in picked for c in row), default=0)
        if score > best_score:
            best, best_score = picked, score
    if best is None:
        best = [[0] * min(k, p.ribbon.length) for p in loose]
    return best


def prettify(
    B: Beribboning,
    T: Cotree,
    G: Graph,
    dissolve_below: int | None = None,
) -> Beribboning:
    """
    Tidy the ribbons of a pure beribboning.

    Loose parts smaller than eps^-16 are cut into restricted sets with
    greedy_restricted_cover. For the rest, blocks are shrunk so that ribbons
    are pairwise disjoint, every part has at most half its vertices inside
    ribbons, and all blocks of a ribbon have ceil((eps^4/32)|X_i|) vertices.
    A part whose blocks cannot reach that size is dissolved as well.

    Args:
        B: pure beribboning with breadth >= eps^2/4
        T: cotree of G
        G: the graph
        dissolve_below: size under which loose parts are dissolved
            (default eps^-16)
    """
    eps = B.eps
    if not 0 < eps <= Fraction(1, 2):
        raise PartitionError(f"prettify needs 0 < eps <= 1/2, got {eps}")
    _require(B, G, stage_bounds("pure", eps))
    k = B.k
    threshold = Fraction(dissolve_below) if dissolve_below is not None else (1 / eps) ** PRETTIFY_Q
    t = min(math.ceil(PRETTIFY_Q / eps * math.log(1 / eps)), math.ceil(PRETTIFY_Q / eps**2))

    parts: list[Part] = []
    for part in B.parts:
        if not part.restricted and part.size < threshold:
            parts.extend(_dissolve(T, G, part, eps, t))
        else:
            parts.append(part)

    while True:
        loose = [p for p in parts if not p.restricted]
        if not loose:
            break
        C = _disjoint_blocks(loose, k)
        failing: set[int] = set()
        shrunk: list[list[VertexSet]] = []
        for i, part in enumerate(loose):
            target = math.ceil(eps**4 / 32 * part.size)
            row = []
            for block in C[i]:
                D = 0
                for Y in parts:
                    inside = block & Y.members
                    D |= smallest(inside, inside.bit_count() // 2)
                if D.bit_count() < target:
                    failing.add(i)
                    break
                row.append(smallest(D, target))
            shrunk.append(row)
        if failing:
            log.warning(f"prettify: dissolving {len(failing)} part(s) whose blocks are too small")
            doomed = {id(loose[i]) for i in failing}
            parts = [q for p in parts for q in (_dissolve(T, G, p, eps, t) if id(p) in doomed else [p])]
            continue
        tidied = {
            id(part): Part(part.members, None, Ribbon(part.members, row, [part.ribbon.polarity] * len(row)))
            for part, row in zip(loose, shrunk)
        }
        parts = [tidied.get(id(p), p) for p in parts]
        break

    log.info(f"prettify: {len(parts)} parts, {sum(not p.restricted for p in parts)} loose")
    return Beribboning(parts, k, eps)


# ── Final partition ───────────────────────────────────────────────────────────

def rodl_partition(
    T: Cotree,
    G: Graph,
    eps: Fraction,
    shortcut: bool = False,
) -> list[RestrictedCertificate]:
    """
    Partition V(G) into at most 480 eps^-4 eps-restricted sets.

    Works at eps/2: a prettified beribboning, then each loose part minus the
    ribbon vertices is greedily covered until the leftover is no larger than
    one block, and the leftover joins the part's own ribbon blocks.
    Restricted parts keep what the ribbons did not take.

    Args:
        shortcut: return singletons whenever 480 eps^-4 >= |G|
    """
    eps = _check_eps(eps)
    N = T.size
    limit = math.floor(PARTITION_CONSTANT / eps**4)
    if shortcut and limit >= N:
        return [_restricted(G, 1 << v, eps) for v in iter_bits(T.vertices)]

    half = eps / 2
    pretty = prettify(pureribbon(T, G, half), T, G)
    F = 0
    for part in pretty.parts:
        if not part.restricted:
            F |= part.ribbon.union

    t = math.ceil(8 / half**2)
    pieces: list[VertexSet] = []
    for part in pretty.parts:
        if part.restricted:
            rest = part.members & ~F
            if rest:
                pieces.append(rest)
            continue
        block = part.ribbon.blocks[0].bit_count()
        inner = part.members & ~F
        certs, Y = _cover_until(T, G, inner, half, t, block) if inner else ([], 0)
        pieces.extend(c.members for c in certs)
        pieces.append(Y | part.ribbon.union)

    certificates = [_restricted(G, S, eps) for S in pieces]
    if len(certificates) > limit:
        raise SelfCheckError(f"{len(certificates)} parts exceed 480 eps^-4 = {limit}")
    log.info(f"rodl_partition: {len(certificates)} parts at eps={eps}")
    return certificates
