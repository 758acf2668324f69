"""
Run records and the staged partition runner.

A RunReport is the job record of one CLI invocation: it moves through
starting -> running -> done | error, collects outputs and independent check
results, and keeps the traceback of anything that went wrong.
"""

import hashlib
import json
import logging
import math
import time
import traceback
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from config import PARTITION_CONSTANT, REPORT_SCHEMA
from cotree import Cotree, random_cograph
from extract import p4thm_extract
from formats import format_rational
from generators import gnp, path
from graph_core import Graph, InputError
from partition import (
    Beribboning,
    growtree,
    prettify,
    pureribbon,
    rodl_partition,
    split,
    stage_bounds,
)
from validator import (
    ValidationReport,
    check_extraction,
    validate_beribboning,
    validate_partition,
    validate_split,
)
from viral import automorphism_count, count_copies

log = logging.getLogger("Pipeline")

STAGES = ("split", "grow", "pure", "pretty", "final")
BENCH_SUITES = ("extract", "partition", "count")


@dataclass
class RunReport:
    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, list[str]] = field(default_factory=dict)
    status: str = "starting"
    message: str = ""
    error: str | None = None
    wall_time: float | None = None
    failure: BaseException | None = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.status == "done" and not any(self.checks.values())

    def add_input(self, name: str, data: bytes) -> None:
        self.inputs[name] = hashlib.sha256(data).hexdigest()

    def check(self, name: str, report: ValidationReport) -> None:
        self.checks[name] = list(report.violations)
        if not report.ok:
            log.warning(f"check {name} failed: {report.violations[0]}")

    def violations(self) -> list[str]:
        return [f"{name}: {v}" for name, found in self.checks.items() for v in found]

    def to_dict(self) -> dict:
        record = {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": {name: {"pass": not found, "violations": found} for name, found in self.checks.items()},
            "ok": self.ok,
            "status": self.status,
            "message": self.message,
            "error": self.error,
        }
        if self.wall_time is not None:
            record["wall_time"] = self.wall_time
        return record

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def run_job(report: RunReport, body: Callable[[RunReport], None], timing: bool = False) -> RunReport:
    """Run body against the report; any exception is recorded, never raised."""
    start = time.perf_counter()
    try:
        report.status = "running"
        body(report)
        report.status = "done"
        failed = [name for name, found in report.checks.items() if found]
        report.message = f"{len(failed)} check(s) failed: {', '.join(failed)}" if failed else "all checks passed"
    except Exception as e:
        report.status = "error"
        report.message = str(e)
        report.error = traceback.format_exc()
        report.failure = e
    finally:
        if timing:
            report.wall_time = round(time.perf_counter() - start, 3)
    return report


# ── Partition stages ──────────────────────────────────────────────────────────

def _beribboning_summary(B: Beribboning) -> dict:
    m, n = B.dimensions
    return {
        "parts": n,
        "loose_parts": m,
        "ribbon_length": B.k,
        "breadth": format_rational(B.breadth) if m else None,
    }


def run_partition_stage(
    report: RunReport,
    T: Cotree,
    G: Graph,
    eps: Fraction,
    stage: str = "final",
) -> Any:
    """
    Run the partition pipeline up to `stage` and record its independent checks.

    Returns the SplitResult, Beribboning or certificate list the stage produced.
    """
    if stage not in STAGES:
        raise InputError(f"unknown stage {stage!r}, expected one of {', '.join(STAGES)}")
    eps = Fraction(eps)

    # ── Step 1: split ────────────────────────────────
    if stage == "split":
        result = split(T, G, eps)
        report.check("split", validate_split(G, T.vertices, result, eps))
        report.outputs["split"] = [A.bit_count() for A in result.parts]
        return result

    # ── Step 2: grow ─────────────────────────────────
    if stage == "grow":
        k = 2 * math.ceil(1 / eps)
        grown = growtree(T, G, eps, k)
        report.check("grow", validate_beribboning(grown, G, stage_bounds("grow", eps, k)))
        report.outputs["grow"] = _beribboning_summary(grown)
        return grown

    # ── Step 3: pure ribbons ─────────────────────────
    if stage in ("pure", "pretty"):
        pure = pureribbon(T, G, eps)
        report.check("pure", validate_beribboning(pure, G, stage_bounds("pure", eps)))
        report.outputs["pure"] = _beribboning_summary(pure)
        if stage == "pure":
            return pure

        # ── Step 4: prettify ─────────────────────────
        pretty = prettify(pure, T, G)
        report.check("pretty", validate_beribboning(pretty, G, stage_bounds("pretty", eps)))
        report.outputs["pretty"] = _beribboning_summary(pretty)
        return pretty

    # ── Step 5: final partition ──────────────────────
    certs = rodl_partition(T, G, eps)
    limit = math.floor(PARTITION_CONSTANT / eps**4)
    report.check("partition", validate_partition(G, certs, eps, limit))
    report.outputs["partition"] = {"parts": len(certs), "limit": limit}
    return certs


# ── Benchmarks ────────────────────────────────────────────────────────────────

def bench(
    suite: str,
    sizes: list[int],
    seeds: list[int],
    eps: Fraction = Fraction(1, 4),
) -> list[dict]:
    """
    One row per (size, seed): certified quantity, its bound, slack, pass flag
    and seconds. Instances depend only on (suite, size, seed).
    """
    if suite not in BENCH_SUITES:
        raise InputError(f"unknown bench suite {suite!r}, expected one of {', '.join(BENCH_SUITES)}")
    eps = Fraction(eps)
    rows = []
    for n in sizes:
        for seed in seeds:
            start = time.perf_counter()
            quantity, bound, slack, ok = _bench_one(suite, n, seed, eps)
            rows.append({
                "suite": suite,
                "n": n,
                "seed": seed,
                "eps": format_rational(eps),
                "quantity": quantity,
                "bound": bound,
                "slack": slack,
                "ok": "PASS" if ok else "FAIL",
                "seconds": round(time.perf_counter() - start, 3),
            })
            log.info(f"bench {suite} n={n} seed={seed}: {rows[-1]['ok']}")
    return rows


def _bench_one(suite: str, n: int, seed: int, eps: Fraction) -> tuple[int, Any, Any, bool]:
    if suite == "count":
        G = gnp(n, Fraction(1, 2), seed)
        H = path(4)
        copies = count_copies(H, G, cap=None)
        return copies, "", "", copies % automorphism_count(H) == 0

    G, T = random_cograph(n, Fraction(1, 2), seed)
    if suite == "extract":
        cert = p4thm_extract(T, G, eps)
        need = math.ceil(eps * n)
        ok = check_extraction(G, cert, Fraction(need), eps**2 * n).ok
        return cert.size, need, cert.size - need, ok

    certs = rodl_partition(T, G, eps)
    limit = math.floor(PARTITION_CONSTANT / eps**4)
    ok = validate_partition(G, certs, eps, limit).ok
    return len(certs), limit, limit - len(certs), ok
