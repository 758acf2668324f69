"""
Plain-text formats: graphs, cotrees, partitions and rationals.

Readers raise InputError naming the offending line; writers are canonical,
so writing what was read reproduces the input byte for byte.
"""

import re
from fractions import Fraction

from cotree import Cotree, CotreeNode, NodeKind, restrict
from graph_core import (
    Graph,
    InputError,
    RestrictedCertificate,
    Side,
    from_edge_list,
    members,
    vertex_set,
)

_RATIONAL = re.compile(r"[+-]?\d+(?:/\d+)?", re.ASCII)
_DECIMAL = re.compile(r"[+-]?(?:\d+\.\d*|\.\d+)", re.ASCII)
_PART_LINE = re.compile(r"part\s+(\d+)\s+side\s+([gc])\s+bound\s+(\S+)\s*:\s*(.*)", re.ASCII)
_COTREE_TOKEN = re.compile(r"\(|\)|[UJ]\b|\d+|\S+", re.ASCII)
_ID = re.compile(r"\d+", re.ASCII)


# ── Rationals ─────────────────────────────────────────────────────────────────

def parse_rational(text: str) -> Fraction:
    """
    Read `p/q`, an integer, or a decimal such as `0.3` (taken as 3/10).

    Exponents, inf and nan are rejected so no binary float ever slips in.
    """
    text = text.strip()
    if _RATIONAL.fullmatch(text) or _DECIMAL.fullmatch(text):
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise InputError(f"rational '{text}' has a zero denominator")
    raise InputError(f"'{text}' is not a rational (expected p/q or a decimal)")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# ── Graphs ────────────────────────────────────────────────────────────────────

def _content_lines(text: str) -> list[tuple[int, str]]:
    return [(i, line.strip()) for i, line in enumerate(text.splitlines(), 1) if line.strip()]


def read_graph(text: str) -> Graph:
    """
    Parse `n m` followed by m lines `u v` (0-based ids).

    Duplicate edges are merged with a warning; everything else malformed
    raises InputError with the line number.
    """
    lines = _content_lines(text)
    if not lines:
        raise InputError("graph text is empty (expected a header line 'n m')")
    number, header = lines[0]
    fields = header.split()
    if len(fields) != 2 or not all(_ID.fullmatch(f) for f in fields):
        raise InputError(f"line {number}: expected header 'n m', got '{header}'")
    n, m = int(fields[0]), int(fields[1])
    body = lines[1:]
    if len(body) != m:
        raise InputError(f"header promises {m} edge line(s), found {len(body)}")

    edges = []
    for number, line in body:
        fields = line.split()
        if len(fields) != 2 or not all(_ID.fullmatch(f) for f in fields):
            raise InputError(f"line {number}: expected 'u v', got '{line}'")
        u, v = int(fields[0]), int(fields[1])
        if u >= n or v >= n:
            raise InputError(f"line {number}: endpoint out of range 0..{n - 1} in '{line}'")
        if u == v:
            raise InputError(f"line {number}: self-loop '{line}'")
        edges.append((u, v))
    return from_edge_list(n, edges)


def write_graph(G: Graph) -> str:
    edges = G.edges()
    lines = [f"{G.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


# ── Cotrees ───────────────────────────────────────────────────────────────────

def write_cotree(T: Cotree) -> str:
    """Nested `(U ...)` / `(J ...)` with leaves as ids and children by smallest leaf."""

    def render(node: CotreeNode) -> str:
        if node.is_leaf:
            return str(node.vertex)
        children = sorted(node.children, key=lambda c: c.vertex)
        return f"({node.kind.value} " + " ".join(render(c) for c in children) + ")"

    return render(T.root)


def read_cotree(text: str) -> Cotree:
    """
    Parse the nested-parentheses cotree format.

    The result is normalized: same-kind parent/child nodes are merged and
    children sorted, so any equivalent spelling reads to the same tree.
    """
    tokens = _COTREE_TOKEN.findall(text)
    if not tokens:
        raise InputError("cotree text is empty")
    stack: list[CotreeNode] = []
    root: CotreeNode | None = None
    seen = 0
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if root is not None:
            raise InputError(f"unexpected '{token}' after the end of the tree")
        if token == "(":
            if i + 1 >= len(tokens) or tokens[i + 1] not in ("U", "J"):
                raise InputError("'(' must be followed by U or J")
            stack.append(CotreeNode(NodeKind(tokens[i + 1]), 0))
            i += 2
            continue
        if token == ")":
            if not stack:
                raise InputError("unbalanced ')'")
            node = stack.pop()
            if len(node.children) < 2:
                raise InputError(f"({node.kind.value} ...) needs at least two children")
            node = _attach(stack, node)
            if node is not None:
                root = node
        elif _ID.fullmatch(token):
            v = int(token)
            if seen >> v & 1:
                raise InputError(f"leaf {v} appears twice")
            seen |= 1 << v
            leaf = _attach(stack, CotreeNode(NodeKind.LEAF, 1 << v))
            if leaf is not None:
                root = leaf
        else:
            raise InputError(f"unexpected token '{token}' in cotree")
        i += 1
    if stack or root is None:
        raise InputError("cotree text ends inside an unclosed '('")
    tree = Cotree(root)
    return restrict(tree, tree.vertices)


def _attach(stack: list[CotreeNode], node: CotreeNode) -> CotreeNode | None:
    """Hang node under the open parent; return it when it is the root."""
    if not stack:
        return node
    parent = stack[-1]
    parent.children.append(node)
    parent.members |= node.members
    return None


# ── Partitions ────────────────────────────────────────────────────────────────

def write_partition(certs: list[RestrictedCertificate]) -> str:
    lines = []
    for i, cert in enumerate(certs):
        ids = " ".join(str(v) for v in cert.vertices())
        lines.append(f"part {i} side {cert.side.letter} bound {format_rational(cert.degree_bound)} : {ids}")
    return "\n".join(lines) + "\n" if lines else ""


def read_partition(text: str, eps: Fraction | None = None) -> list[RestrictedCertificate]:
    """Parse `part <i> side <g|c> bound <p/q> : v1 v2 ...` lines; eps is attached as the claim."""
    certs = []
    for number, line in _content_lines(text):
        match = _PART_LINE.fullmatch(line)
        if not match:
            raise InputError(f"line {number}: expected 'part <i> side <g|c> bound <p/q> : ...', got '{line}'")
        index, letter, bound, ids = match.groups()
        if int(index) != len(certs):
            raise InputError(f"line {number}: part index {index}, expected {len(certs)}")
        vertices = ids.split()
        if not vertices or not all(_ID.fullmatch(v) for v in vertices):
            raise InputError(f"line {number}: part needs a nonempty list of vertex ids")
        side = Side.GRAPH if letter == "g" else Side.COMPLEMENT
        certs.append(
            RestrictedCertificate(
                vertex_set(int(v) for v in vertices),
                side,
                parse_rational(bound),
                None if eps is None else Fraction(eps),
            )
        )
    return certs


def write_certificate(cert: RestrictedCertificate) -> str:
    """One-line record of a single certificate."""
    ids = " ".join(str(v) for v in members(cert.members))
    claim = "" if cert.epsilon is None else f" eps {format_rational(cert.epsilon)}"
    return (
        f"cert side {cert.side.letter} bound {format_rational(cert.degree_bound)}"
        f" size {cert.size}{claim} : {ids}"
    )
