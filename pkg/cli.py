"""
Command-line entry point.

Every subcommand reads its inputs, runs one operation inside a RunReport,
re-checks what it produced with the validator, and prints either text
records followed by PASS/FAIL or the JSON report. Exit status: 0 when every
check passes, 1 on a failed check or self-check error, 2 on bad input.
"""

import csv
import math
import sys
from fractions import Fraction

import click

from config import ORACLE_MAX_PARTITION, ORACLE_MAX_SUBSET, ORACLE_TIME_CAP, THREADS, setup_logging
from cotree import Cotree, P4Witness, build_cotree, random_cograph
from extract import (
    ExtractionParams,
    betterthm_extract,
    delta_bounds,
    p4thm_extract,
    product_extract,
    toprange_extract,
)
from formats import (
    format_rational,
    parse_rational,
    read_graph,
    read_partition,
    write_certificate,
    write_cotree,
    write_graph,
    write_partition,
)
from generators import ConstructionKind, ConstructionSpec, gnp
from graph_core import Graph, InputError, Side, members
from oracle import (
    REFERENCE_COUNT_MAX,
    OracleBudget,
    count_copies_reference,
    max_restricted_set,
    min_restricted_partition,
)
from partition import thin_thick_partition
from pipeline import BENCH_SUITES, STAGES, RunReport, bench as run_bench, run_job, run_partition_stage
from validator import (
    ValidationReport,
    check_certificate,
    check_extraction,
    validate_partition,
    validate_thin_thick,
    validate_viral_verdict,
)
from viral import automorphism_count, count_copies, viral_check


class RationalType(click.ParamType):
    """`p/q` or an exact decimal, converted to a Fraction."""
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(value)
        except InputError as e:
            self.fail(str(e), param, ctx)


RATIONAL = RationalType()

_graph_option = click.option(
    "--graph", "graph_file", type=click.File("rb"), default="-", show_default=True,
    help="Graph text file ('-' reads stdin).",
)
_emit_option = click.option("--emit", type=click.Choice(["text", "json"]), default="text", show_default=True)
_output_option = click.option(
    "--output", "-o", type=click.File("w"), default="-", help="Where records or the JSON report go.",
)
_timing_option = click.option("--timing", is_flag=True, help="Add wall time to the JSON report.")


def _echo_command(ctx: click.Context) -> list[str]:
    argv = [ctx.info_name]
    for name, value in sorted(ctx.params.items()):
        if value is None or value is False:
            continue
        if hasattr(value, "name") and not isinstance(value, str):
            value = value.name
        elif isinstance(value, Fraction):
            value = format_rational(value)
        argv.append(f"--{name.replace('_', '-')}={value}")
    return argv


def _load_graph(report: RunReport, handle, name: str = "graph") -> Graph:
    data = handle.read()
    report.add_input(name, data)
    return read_graph(data.decode("utf-8"))


def _cotree_of(G: Graph) -> Cotree:
    tree = build_cotree(G)
    if isinstance(tree, P4Witness):
        raise InputError(f"graph is not a cograph: induced P4 on {list(tree.vertices())}")
    return tree


def _finish(report: RunReport, lines: list[str], emit: str, output) -> None:
    """Print records and status, then exit with the report's code."""
    if emit == "json":
        output.write(report.to_json())
    else:
        for line in lines:
            output.write(line + "\n")
        if report.status == "error":
            click.echo(f"ERROR: {report.message}", err=True)
        elif report.ok:
            output.write("PASS\n")
        else:
            output.write("FAIL\n")
            for violation in report.violations():
                click.echo(f"  {violation}", err=True)
    output.flush()
    if report.failure is not None:
        sys.exit(2 if isinstance(report.failure, InputError) else 1)
    sys.exit(0 if report.ok else 1)


@click.group()
@click.option("--log-level", default=None, help="Override RODL_LOG_LEVEL for this run.")
def cli(log_level):
    """Sparse/dense extraction and restricted partitions in cographs."""
    setup_logging(log_level.upper() if log_level else None)


# ── gen ───────────────────────────────────────────────────────────────────────

@cli.command()
@click.option("--kind", type=click.Choice([k.value for k in ConstructionKind] + ["gnp", "cograph"]), required=True)
@click.option("--params", default="", help="Whitespace-separated parameters, e.g. '2/5 3'.")
@click.option("--seed", type=int, default=0, show_default=True)
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def gen(ctx, kind, params, seed, emit, output, timing):
    """Write a construction in the graph text format.

    \b
    cliques  sizes...      half  2n
    cx-k     eps n         cx3   n
    gnp      n p           cograph  n [join_bias]
    """
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        values = [parse_rational(p) for p in params.replace(",", " ").split()]
        if kind == "gnp":
            if len(values) != 2:
                raise InputError("gnp takes parameters 'n p'")
            G = gnp(int(values[0]), values[1], seed)
        elif kind == "cograph":
            if len(values) not in (1, 2):
                raise InputError("cograph takes parameters 'n [join_bias]'")
            G, _ = random_cograph(int(values[0]), values[1] if len(values) == 2 else Fraction(1, 2), seed)
        else:
            G = ConstructionSpec(ConstructionKind(kind), tuple(values)).build()
        text = write_graph(G)
        report.outputs["graph"] = {"n": G.n, "m": G.edge_count()}
        report.check("graph", ValidationReport() if read_graph(text) == G else _failed("graph does not read back"))
        lines.append(text.rstrip("\n"))

    run_job(report, body, timing)
    if emit == "text" and report.ok:
        # the graph text must stay pipeable, so no status line
        output.write(lines[0] + "\n")
        output.flush()
        sys.exit(0)
    _finish(report, lines, emit, output)


def _failed(message: str) -> ValidationReport:
    report = ValidationReport()
    report.fail(message)
    return report


# ── cotree ────────────────────────────────────────────────────────────────────

@cli.command()
@_graph_option
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def cotree(ctx, graph_file, emit, output, timing):
    """Print the cotree of a cograph, or an induced P4."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        G = _load_graph(report, graph_file)
        if G.n == 0:
            raise InputError("the null graph has no cotree")
        tree = build_cotree(G)
        check = ValidationReport()
        if isinstance(tree, P4Witness):
            a, b, c, d = tree.vertices()
            edges = [G.has_edge(a, b), G.has_edge(b, c), G.has_edge(c, d)]
            non_edges = [G.has_edge(a, c), G.has_edge(a, d), G.has_edge(b, d)]
            if not all(edges) or any(non_edges):
                check.fail(f"{tree.vertices()} is not an induced P4")
            report.outputs["p4"] = list(tree.vertices())
            lines.append(f"p4 {a} {b} {c} {d}")
        else:
            if tree.realize(G.n) != G:
                check.fail("cotree does not realize the input graph")
            text = write_cotree(tree)
            report.outputs["cotree"] = text
            lines.append(text)
        report.check("cotree", check)

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


# ── extract ───────────────────────────────────────────────────────────────────

@cli.command()
@_graph_option
@click.option("--mode", type=click.Choice(["p4", "better", "product", "toprange"]), default="p4", show_default=True)
@click.option("--eps", type=RATIONAL, default=None)
@click.option("--x", "x", type=RATIONAL, default=None)
@click.option("--y", "y", type=RATIONAL, default=None)
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def extract(ctx, graph_file, mode, eps, x, y, emit, output, timing):
    """Extract a sparse or dense set from a cograph."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        G = _load_graph(report, graph_file)
        T = _cotree_of(G)
        N = G.n
        if mode == "better":
            if x is None or y is None:
                raise InputError("--mode better needs --x and --y")
            p = ExtractionParams(x, y)
            cert = betterthm_extract(T, G, p)
            target = p.x if cert.side is Side.GRAPH else p.y
            report.check("extract", check_extraction(G, cert, target * N, p.x * p.y * N))
            certs = [cert]
        elif eps is None:
            raise InputError(f"--mode {mode} needs --eps")
        elif mode == "p4":
            cert = p4thm_extract(T, G, eps)
            report.check("extract", check_extraction(G, cert, Fraction(math.ceil(eps * N)), eps**2 * N))
            certs = [cert]
        elif mode == "product":
            X, Y = product_extract(T, G, eps)
            check = check_extraction(G, X, Fraction(1), eps * N)
            check.extend(check_extraction(G, Y, Fraction(1), eps * N))
            if X.size * Y.size < eps * N * N:
                check.fail(f"|X||Y| = {X.size * Y.size} < eps|G|^2 = {eps * N * N}")
            report.check("extract", check)
            certs = [X, Y]
        else:
            cert = toprange_extract(T, G, eps)
            delta = delta_bounds(eps).exact
            report.check("extract", check_extraction(G, cert, delta * N, eps * delta * N, strict=True))
            certs = [cert]
        report.outputs["certificates"] = [_cert_record(c) for c in certs]
        lines.extend(write_certificate(c) for c in certs)

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


def _cert_record(cert) -> dict:
    return {
        "members": cert.vertices(),
        "side": cert.side.value,
        "bound": format_rational(cert.degree_bound),
        "epsilon": None if cert.epsilon is None else format_rational(cert.epsilon),
    }


# ── partition ─────────────────────────────────────────────────────────────────

@cli.command()
@_graph_option
@click.option("--eps", type=RATIONAL, required=True)
@click.option("--stage", type=click.Choice(STAGES), default="final", show_default=True)
@click.option("--parts-out", type=click.File("w"), default=None, help="Also write the final parts in the partition format.")
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def partition(ctx, graph_file, eps, stage, parts_out, emit, output, timing):
    """Run the partition pipeline up to a stage and check it."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        G = _load_graph(report, graph_file)
        T = _cotree_of(G)
        result = run_partition_stage(report, T, G, eps, stage)
        if stage == "final":
            text = write_partition(result)
            lines.extend(text.splitlines())
            if parts_out is not None:
                parts_out.write(text)
            lines.append(f"parts {len(result)} limit {report.outputs['partition']['limit']}")
        else:
            for name, summary in report.outputs.items():
                lines.append(f"{name} {summary}")

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


# ── thin-thick ────────────────────────────────────────────────────────────────

@cli.command("thin-thick")
@_graph_option
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def thin_thick(ctx, graph_file, emit, output, timing):
    """Split a cograph into a thin set and a thick set."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        G = _load_graph(report, graph_file)
        thin, thick = thin_thick_partition(_cotree_of(G), G)
        report.check("thin-thick", validate_thin_thick(G, thin, thick))
        report.outputs["thin"] = members(thin)
        report.outputs["thick"] = members(thick)
        lines.append("thin : " + " ".join(map(str, members(thin))))
        lines.append("thick : " + " ".join(map(str, members(thick))))

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


# ── count / viral ─────────────────────────────────────────────────────────────

@cli.command()
@click.option("--pattern", "pattern_file", type=click.File("rb"), required=True)
@_graph_option
@click.option("--threads", type=int, default=THREADS, show_default=True)
@click.option("--cap", type=int, default=None, help="Largest host graph accepted (default RODL_COUNT_CAP).")
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def count(ctx, pattern_file, graph_file, threads, cap, emit, output, timing):
    """Count copies of a pattern in a graph."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        H = _load_graph(report, pattern_file, "pattern")
        G = _load_graph(report, graph_file)
        kwargs = {} if cap is None else {"cap": cap}
        copies = count_copies(H, G, threads=threads, **kwargs)
        check = ValidationReport()
        automorphisms = automorphism_count(H)
        if copies % automorphisms:
            check.fail(f"{copies} copies is not a multiple of |Aut(H)| = {automorphisms}")
        if G.n <= REFERENCE_COUNT_MAX:
            expected = count_copies_reference(H, G)
            if expected != copies:
                check.fail(f"reference enumeration counts {expected}, got {copies}")
        report.check("count", check)
        report.outputs["copies"] = copies
        lines.append(f"copies {copies}")

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


@cli.command()
@click.option("--pattern", "pattern_file", type=click.File("rb"), required=True)
@_graph_option
@click.option("--eps", type=RATIONAL, required=True)
@click.option("--d", "d", type=RATIONAL, required=True)
@click.option("--threads", type=int, default=THREADS, show_default=True)
@click.option("--budget", type=int, default=ORACLE_MAX_SUBSET, show_default=True, help="Largest graph searched exhaustively.")
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def viral(ctx, pattern_file, graph_file, eps, d, threads, budget, emit, output, timing):
    """Decide the viral disjunction for one graph."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        H = _load_graph(report, pattern_file, "pattern")
        G = _load_graph(report, graph_file)
        verdict = viral_check(G, H, eps, d, threads=threads, exhaustive_max=budget)
        report.check("viral", validate_viral_verdict(G, H.n, verdict, eps, d))
        threshold = verdict.threshold
        shown = format_rational(threshold) if isinstance(threshold, Fraction) else repr(threshold)
        report.outputs["verdict"] = {
            "branch": verdict.branch.value,
            "copies": verdict.copy_count,
            "threshold": shown,
            "method": verdict.method,
        }
        lines.append(f"branch {verdict.branch.value}")
        lines.append(f"copies {verdict.copy_count} threshold {shown}")
        if verdict.witness is not None:
            w = verdict.witness
            report.outputs["verdict"]["witness"] = {
                "members": members(w.members),
                "side": w.side.value,
                "density": format_rational(w.density),
            }
            ids = " ".join(map(str, members(w.members)))
            lines.append(f"witness side {w.side.letter} density {format_rational(w.density)} via {verdict.method} : {ids}")

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


# ── oracle ────────────────────────────────────────────────────────────────────

@cli.command()
@click.option("--op", type=click.Choice(["maxset", "minpart", "count"]), required=True)
@_graph_option
@click.option("--pattern", "pattern_file", type=click.File("rb"), default=None)
@click.option("--eps", type=RATIONAL, default=None)
@click.option("--bound", type=RATIONAL, default=None, help="Absolute degree bound for maxset.")
@click.option("--budget", type=int, default=None, help="Vertex budget (default from configuration).")
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def oracle(ctx, op, graph_file, pattern_file, eps, bound, budget, emit, output, timing):
    """Exhaustive reference answers on small graphs: `value <v> witness <...>`."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        G = _load_graph(report, graph_file)
        limits = OracleBudget(
            budget or ORACLE_MAX_SUBSET,
            budget or ORACLE_MAX_PARTITION,
            ORACLE_TIME_CAP,
        )
        if op == "count":
            if pattern_file is None:
                raise InputError("--op count needs --pattern")
            H = _load_graph(report, pattern_file, "pattern")
            value = count_copies_reference(H, G)
            report.check("oracle", ValidationReport())
            witness = ""
        elif eps is None and not (op == "maxset" and bound is not None):
            raise InputError(f"--op {op} needs --eps")
        elif op == "maxset":
            value, cert = max_restricted_set(G, eps or Fraction(0), bound, limits)
            report.check("oracle", check_certificate(G, cert))
            witness = " ".join(map(str, cert.vertices()))
        else:
            value, certs = min_restricted_partition(G, eps, limits)
            report.check("oracle", validate_partition(G, certs, eps))
            witness = " | ".join(" ".join(map(str, c.vertices())) for c in certs)
        report.outputs["value"] = value
        report.outputs["witness"] = witness
        lines.append(f"value {value} witness {witness}".rstrip())

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


# ── verify ────────────────────────────────────────────────────────────────────

@cli.command()
@_graph_option
@click.option("--parts", "parts_file", type=click.File("rb"), required=True)
@click.option("--eps", type=RATIONAL, required=True)
@click.option("--max-parts", type=int, default=None)
@_emit_option
@_output_option
@_timing_option
@click.pass_context
def verify(ctx, graph_file, parts_file, eps, max_parts, emit, output, timing):
    """Check a partition file against a graph."""
    report = RunReport(_echo_command(ctx))
    lines: list[str] = []

    def body(report: RunReport) -> None:
        G = _load_graph(report, graph_file)
        data = parts_file.read()
        report.add_input("parts", data)
        certs = read_partition(data.decode("utf-8"), eps)
        report.check("partition", validate_partition(G, certs, eps, max_parts))
        report.outputs["parts"] = len(certs)
        lines.append(f"parts {len(certs)}")

    run_job(report, body, timing)
    _finish(report, lines, emit, output)


# ── bench ─────────────────────────────────────────────────────────────────────

def _int_list(text: str) -> list[int]:
    """'1-5,8' -> [1, 2, 3, 4, 5, 8]."""
    out = []
    for chunk in text.replace(" ", "").split(","):
        if not chunk:
            continue
        lo, sep, hi = chunk.partition("-")
        if not lo.isdigit() or (sep and not hi.isdigit()):
            raise click.BadParameter(f"'{chunk}' is not an integer or range")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


@cli.command("bench")
@click.option("--suite", type=click.Choice(BENCH_SUITES), required=True)
@click.option("--sizes", required=True, help="Vertex counts, e.g. '500,3000'.")
@click.option("--seeds", default="1-5", show_default=True, help="Seeds, e.g. '1-20'.")
@click.option("--eps", type=RATIONAL, default=Fraction(1, 4), show_default=True)
@_output_option
def bench_command(suite, sizes, seeds, eps, output):
    """Deterministic benchmark table as CSV."""
    try:
        rows = run_bench(suite, _int_list(sizes), _int_list(seeds), eps)
    except InputError as e:
        raise click.UsageError(str(e))
    writer = csv.DictWriter(output, fieldnames=list(rows[0]) if rows else ["suite"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    output.flush()
    sys.exit(0 if all(row["ok"] == "PASS" for row in rows) else 1)


if __name__ == "__main__":
    cli()
