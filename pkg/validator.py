"""
Independent checkers for everything the algorithms emit.

Nothing here calls an extractor or a partition stage: degrees are recounted
from the adjacency rows and purity is checked pair by pair, so a report is a
second opinion on the producing code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable

from graph_core import (
    Graph,
    Polarity,
    RestrictedCertificate,
    SelfCheckError,
    Side,
    VertexSet,
    components,
    is_pure_pair,
    iter_bits,
    lowest,
)

if TYPE_CHECKING:
    from partition import Beribboning, SplitResult
    from viral import ViralVerdict


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def fail(self, message: str) -> None:
        self.violations.append(message)

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)

    def require(self) -> None:
        if self.violations:
            raise SelfCheckError("; ".join(self.violations))


@dataclass(frozen=True)
class StageBounds:
    """Limits a beribboning must meet at one pipeline stage."""
    max_m: Fraction
    max_n: Fraction
    min_breadth: Fraction
    min_length: int
    pure: bool = False
    prettified: bool = False


def _max_degree(G: Graph, X: VertexSet, side: Side) -> int:
    best = 0
    for v in iter_bits(X):
        row = G.adj[v] if side is Side.GRAPH else ~G.adj[v] & ~(1 << v)
        best = max(best, bin(row & X).count("1"))
    return best


# ── Certificates ──────────────────────────────────────────────────────────────

def check_certificate(
    G: Graph,
    cert: RestrictedCertificate,
    eps: Fraction | None = None,
) -> ValidationReport:
    """
    Re-check one certificate.

    Checks:
        - set nonempty and inside 0..n-1
        - chosen-side max degree <= degree_bound
        - degree_bound <= epsilon*|set| when the certificate claims restriction
        - when eps is given, the certificate claims restriction at exactly eps
    """
    report = ValidationReport()
    label = f"set {lowest(cert.members)}..(size {cert.size})"
    if not cert.members:
        report.fail("empty certificate set")
        return report
    if cert.members >> G.n:
        report.fail(f"{label}: vertex outside 0..{G.n - 1}")
        return report
    degree = _max_degree(G, cert.members, cert.side)
    if degree > cert.degree_bound:
        report.fail(f"{label}: {cert.side.value}-side degree {degree} > bound {cert.degree_bound}")
    if cert.epsilon is not None and cert.degree_bound > cert.epsilon * cert.size:
        report.fail(f"{label}: bound {cert.degree_bound} > eps|X| = {cert.epsilon * cert.size}")
    if eps is not None and cert.epsilon != Fraction(eps):
        report.fail(f"{label}: claims eps={cert.epsilon}, expected {eps}")
    return report


def check_extraction(
    G: Graph,
    cert: RestrictedCertificate,
    min_size: Fraction,
    max_degree: Fraction,
    strict: bool = False,
) -> ValidationReport:
    """Size and degree inequalities of an extraction (|X| > min_size when strict)."""
    report = check_certificate(G, cert)
    if strict and not cert.size > min_size:
        report.fail(f"size {cert.size} is not > {min_size}")
    if not strict and cert.size < min_size:
        report.fail(f"size {cert.size} < {min_size}")
    if cert.degree_bound > max_degree:
        report.fail(f"bound {cert.degree_bound} > {max_degree}")
    return report


def validate_partition(
    G: Graph,
    certs: Iterable[RestrictedCertificate],
    eps: Fraction,
    max_parts: int | None = None,
) -> ValidationReport:
    """Parts disjoint, covering V(G), each with a valid eps-restricted certificate."""
    report = ValidationReport()
    seen = 0
    count = 0
    for i, cert in enumerate(certs):
        count += 1
        if cert.members & seen:
            report.fail(f"part {i} overlaps an earlier part")
        seen |= cert.members
        report.extend(check_certificate(G, cert, eps), f"part {i}: ")
    if seen != G.full:
        report.fail(f"parts cover {seen.bit_count()} of {G.n} vertices")
    if max_parts is not None and count > max_parts:
        report.fail(f"{count} parts > limit {max_parts}")
    return report


# ── Thin / thick ──────────────────────────────────────────────────────────────

def validate_thin_thick(G: Graph, thin: VertexSet, thick: VertexSet) -> ValidationReport:
    report = ValidationReport()
    if thin & thick:
        report.fail("thin and thick sets overlap")
    if thin | thick != G.full:
        report.fail("thin and thick sets do not cover V(G)")
    for name, X, side in (("thin", thin, Side.GRAPH), ("thick", thick, Side.COMPLEMENT)):
        limit = Fraction(X.bit_count() + 1, 2)
        for comp in components(G, X, side):
            if comp.bit_count() > limit:
                report.fail(f"{name} set has a {side.value}-side component of {comp.bit_count()} > {limit}")
    return report


# ── Split ─────────────────────────────────────────────────────────────────────

def validate_split(G: Graph, X: VertexSet, result: "SplitResult", eps: Fraction) -> ValidationReport:
    """
    Checks:
        - A0..A3 partition X
        - A0 empty or eps-restricted
        - A1, A2, A3 pairwise pure
        - every nonempty Ai (i >= 1) has a pure witness B outside Ai with
          |B| >= (eps^2/4)|X|
    """
    report = ValidationReport()
    eps = Fraction(eps)
    union = 0
    for i, A in enumerate(result.parts):
        if A & union:
            report.fail(f"A{i} overlaps an earlier part")
        union |= A
    if union != X:
        report.fail("parts do not partition the input set")

    A0 = result.parts[0]
    if A0:
        if result.certificate is None or result.certificate.members != A0:
            report.fail("A0 has no certificate")
        else:
            report.extend(check_certificate(G, result.certificate, eps), "A0: ")

    loose = [(i, A) for i, A in enumerate(result.parts[1:], 1) if A]
    for a, (i, Ai) in enumerate(loose):
        for j, Aj in loose[a + 1:]:
            if is_pure_pair(G, Ai, Aj) is None:
                report.fail(f"A{i} and A{j} are not a pure pair")

    big = eps * eps * X.bit_count() / 4
    for i, Ai in loose:
        witness = result.witnesses[i - 1]
        if witness is None:
            report.fail(f"A{i} has no witness")
            continue
        B = witness.right
        if witness.left != Ai or B & Ai or B & ~X:
            report.fail(f"A{i}: witness is not a subset of X outside A{i}")
        if B.bit_count() < big:
            report.fail(f"A{i}: witness has {B.bit_count()} < {big} vertices")
        if is_pure_pair(G, Ai, B) is not witness.polarity:
            report.fail(f"A{i}: witness is not {witness.polarity.value}")
    return report


# ── Beribboning ───────────────────────────────────────────────────────────────

def validate_beribboning(
    B: "Beribboning",
    G: Graph,
    bounds: StageBounds | None = None,
) -> ValidationReport:
    """
    Checks every beribboning invariant, plus the stage limits when given.

    Checks:
        - parts nonempty, pairwise disjoint, covering V(G)
        - restricted parts carry a valid eps-restricted certificate
        - every other part carries a ribbon of length >= k attached to it,
          blocks disjoint from each other and from the attachment, each block
          pure (with its recorded polarity) to attachment + earlier blocks
        - non-restricted parts pairwise pure
        - dimensions, breadth, purity and prettification per bounds
    """
    report = ValidationReport()
    eps = B.eps
    seen = 0
    for i, part in enumerate(B.parts):
        if not part.members:
            report.fail(f"part {i} is empty")
        if part.members & seen:
            report.fail(f"part {i} overlaps an earlier part")
        seen |= part.members
    if seen != G.full:
        report.fail(f"parts cover {seen.bit_count()} of {G.n} vertices")

    loose = []
    for i, part in enumerate(B.parts):
        if part.certificate is not None:
            if part.certificate.members != part.members:
                report.fail(f"part {i}: certificate is for a different set")
            report.extend(check_certificate(G, part.certificate, eps), f"part {i}: ")
            continue
        loose.append((i, part))
        ribbon = part.ribbon
        if ribbon is None:
            report.fail(f"part {i}: neither restricted nor beribboned")
            continue
        if ribbon.attachment != part.members:
            report.fail(f"part {i}: ribbon attached to a different set")
        if ribbon.length < B.k:
            report.fail(f"part {i}: ribbon length {ribbon.length} < {B.k}")
        before = ribbon.attachment
        for j, (block, polarity) in enumerate(zip(ribbon.blocks, ribbon.polarities)):
            if not block:
                report.fail(f"part {i}: block {j} is empty")
            if block & before:
                report.fail(f"part {i}: block {j} meets the attachment or an earlier block")
            elif is_pure_pair(G, block, before) is not polarity:
                report.fail(f"part {i}: block {j} is not {polarity.value} to everything before it")
            before |= block

    for a, (i, P) in enumerate(loose):
        for j, Q in loose[a + 1:]:
            if is_pure_pair(G, P.members, Q.members) is None:
                report.fail(f"parts {i} and {j} are not a pure pair")

    if bounds is None:
        return report

    m, n = B.dimensions
    if m > bounds.max_m or n > bounds.max_n:
        report.fail(f"dimensions ({m}, {n}) exceed ({bounds.max_m}, {bounds.max_n})")
    if loose and B.breadth < bounds.min_breadth:
        report.fail(f"breadth {B.breadth} < {bounds.min_breadth}")
    if B.k < bounds.min_length:
        report.fail(f"ribbon length {B.k} < {bounds.min_length}")
    if bounds.pure or bounds.prettified:
        for i, part in loose:
            if part.ribbon is not None and part.ribbon.polarity is Polarity.MIXED:
                report.fail(f"part {i}: ribbon is not pure")
    if bounds.prettified:
        report.extend(_check_prettified(B, loose))
    return report


def _check_prettified(B: "Beribboning", loose: list) -> ValidationReport:
    report = ValidationReport()
    covered = 0
    for i, part in loose:
        ribbon = part.ribbon
        if ribbon is None:
            continue
        if ribbon.union & covered:
            report.fail(f"part {i}: ribbon shares vertices with another ribbon")
        covered |= ribbon.union
        sizes = {block.bit_count() for block in ribbon.blocks}
        if len(sizes) > 1:
            report.fail(f"part {i}: ribbon blocks have sizes {sorted(sizes)}")
    for i, part in enumerate(B.parts):
        inside = (part.members & covered).bit_count()
        if 2 * inside > part.size:
            report.fail(f"part {i}: {inside} of {part.size} vertices lie in ribbons")
    return report


# ── Viral verdicts ────────────────────────────────────────────────────────────

def validate_viral_verdict(
    G: Graph,
    pattern_size: int,
    verdict: "ViralVerdict",
    eps: Fraction,
    d: Fraction,
) -> ValidationReport:
    """
    Checks:
        - many_copies: copies^q >= eps^p n^(hq) for d = p/q
        - sparse_or_dense_set: witness inside V(G), |X|^q >= eps^p n^q and
          the recorded side density <= eps, recounted edge by edge
    """
    report = ValidationReport()
    eps, d = Fraction(eps), Fraction(d)
    p, q = d.numerator, d.denominator
    n = G.n
    if verdict.branch.value == "many_copies":
        if Fraction(verdict.copy_count) ** q < eps**p * Fraction(n) ** (pattern_size * q):
            report.fail(f"{verdict.copy_count} copies are below eps^d n^h")
        return report
    if verdict.branch.value == "undecided":
        return report
    witness = verdict.witness
    if witness is None:
        report.fail("verdict names a set but carries no witness")
        return report
    X = witness.members
    if not X or X >> n:
        report.fail("witness set is empty or leaves 0..n-1")
        return report
    k = X.bit_count()
    if Fraction(k) ** q < eps**p * Fraction(n) ** q:
        report.fail(f"witness has {k} vertices, fewer than eps^d n")
    pairs = 0
    for u in iter_bits(X):
        for v in iter_bits(X >> (u + 1) << (u + 1)):
            if G.has_edge(u, v) == (witness.side is Side.GRAPH):
                pairs += 1
    density = Fraction(pairs, k * (k - 1) // 2) if k > 1 else Fraction(0)
    if density != witness.density:
        report.fail(f"recorded density {witness.density}, recounted {density}")
    if density > eps:
        report.fail(f"{witness.side.value}-side density {density} > {eps}")
    return report
