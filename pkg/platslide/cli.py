"""Command-line surface of platslide.

Every command prints plain text by default; ``--format json`` prints one
JSON object per line with the same data. Exit codes are 0 on success, 1 on
invalid input and 2 when an internal invariant fails.
"""
import json
import logging
import sys

import click
from loguru import logger

from . import context
from .dunwoody import (
    DunwoodyTuple,
    build_graph,
    compute_s_bar,
    curve_arcs,
    export_graphml,
    glue_and_extract,
    is_admissible,
    psl_set,
)
from .invariants import h1_from_diagram, scan_admissible, takahashi_surgery_h1
from .takahashi import (
    TakahashiParams,
    build_diagram,
    extract_curves,
    tak_curve_arcs,
    tak_psl_set,
)
from .util import InvariantError
from .words import MoveSpec, WordError, apply_moves, parse_word, word_to_dict

__all__ = [
    "cli",
    "main",
    "run",
]


def _emit(ctx, text, record):
    if ctx.obj["format"] == "json":
        click.echo(json.dumps(record, ensure_ascii=False))
    else:
        click.echo(text)


def _emit_word(ctx, index, word, **extra):
    record = dict(extra, index=index, word=str(word), letters=word_to_dict(word)["letters"])
    _emit(ctx, str(word), record)


def _source(tuple_text, n, pq, rs):
    if tuple_text and (pq or rs):
        raise click.UsageError("give either --tuple or --n/--pq/--rs, not both")
    if tuple_text:
        return DunwoodyTuple.parse(tuple_text)
    if n is None or pq is None or rs is None:
        raise click.UsageError("give --tuple, or all of --n, --pq and --rs")
    return TakahashiParams.parse(n, pq, rs)


def _bounds(text):
    try:
        bounds = [int(v) for v in text.split(",")]
    except ValueError:
        raise click.BadParameter(f'"{text}" is not aMax,bMax,cMax,nMax') from None
    if len(bounds) != 4 or min(bounds) < 0:
        raise click.BadParameter(f'"{text}" is not aMax,bMax,cMax,nMax')
    return bounds


class _StderrHandler(logging.StreamHandler):
    """Writes records of the ``platslide`` loggers to the current ``sys.stderr``."""

    def __init__(self):
        super().__init__(sys.stderr)

    def emit(self, record):
        self.stream = sys.stderr
        super().emit(record)


def _configure_logging(level):
    try:
        threshold = logger.level(level).no
    except ValueError:
        raise click.BadParameter(
            f'"{level}" is not a log level', param_hint="'--log-level'"
        ) from None
    logger.remove()
    logger.add(sys.stderr, level=level)
    package = logging.getLogger("platslide")
    for handler in [h for h in package.handlers if isinstance(h, _StderrHandler)]:
        package.removeHandler(handler)
    package.addHandler(_StderrHandler())
    package.setLevel(threshold)


@click.group()
@click.option(
    "--format",
    "output_format",
    type=click.Choice(["text", "json"]),
    default=None,
    help="Output format (defaults to the output_format option).",
)
@click.option("--log-level", default=None, help="Threshold of the stderr log sink.")
@click.pass_context
def cli(ctx, output_format=None, log_level=None):
    """Heegaard diagrams, plat-slide words and homology of Dunwoody and
    Takahashi manifolds."""
    _configure_logging((log_level or context.get("log_level")).upper())
    ctx.ensure_object(dict)
    ctx.obj["format"] = output_format or context.get("output_format")


@cli.group()
def dunwoody():
    """Dunwoody manifolds M(a,b,c,n,r,s)."""


@dunwoody.command("words")
@click.option("--tuple", "tuple_text", required=True, help="a,b,c,n,r,s")
@click.option("--arcs", is_flag=True, help="Print the elementary pieces instead.")
@click.pass_context
def dunwoody_words(ctx, tuple_text, arcs=False):
    """Print the words of e_1..e_n, one per line."""
    t = DunwoodyTuple.parse(tuple_text)
    logger.info(f"computing psl set of {t}")
    words = psl_set(t)
    if arcs:
        diag = build_graph(t)
        for i, curve in enumerate(glue_and_extract(diag).curves, start=1):
            pieces = [str(piece) for piece in curve_arcs(curve, diag)]
            _emit(ctx, " ".join(pieces), {"tuple": list(t.as_tuple()), "index": i, "arcs": pieces})
        return
    for i, word in enumerate(words, start=1):
        _emit_word(ctx, i, word, tuple=list(t.as_tuple()))


@dunwoody.command("admissible")
@click.option("--tuple", "tuple_text", help="a,b,c,n,r,s")
@click.option("--scan", "scan_text", help="aMax,bMax,cMax,nMax")
@click.option("--workers", type=int, default=None, help="Worker processes for --scan.")
@click.option("--all", "everything", is_flag=True, help="Also list inadmissible tuples.")
@click.pass_context
def dunwoody_admissible(ctx, tuple_text=None, scan_text=None, workers=None, everything=False):
    """Decide admissibility of one tuple or stream a scan of a grid."""
    if bool(tuple_text) == bool(scan_text):
        raise click.UsageError("give exactly one of --tuple and --scan")
    if tuple_text:
        report = is_admissible(DunwoodyTuple.parse(tuple_text))
        verdict = "admissible" if report else "not admissible"
        _emit(
            ctx,
            f"{report.tuple} {verdict} m={report.curve_count} z2_rank={report.z2_rank}",
            report.to_dict(),
        )
        return
    for record in scan_admissible(*_bounds(scan_text), workers=workers, everything=everything):
        h1 = "-" if record.h1 is None else str(record.h1)
        _emit(ctx, f"{record.tuple} m={record.report.curve_count} H1={h1}", record.to_dict())


@dunwoody.command("sbar")
@click.option("--a", "a", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--r", "r", type=int, required=True)
@click.pass_context
def dunwoody_sbar(ctx, a, n, r):
    """Print s̄ for the n-fold cover of the 2-bridge knot b(2a+1, 2r)."""
    value = compute_s_bar(a, n, r)
    _emit(ctx, str(value), {"a": a, "n": n, "r": r, "s_bar": value})


@cli.group()
def takahashi():
    """Periodic Takahashi manifolds T_n(p/q, r/s)."""


@takahashi.command("words")
@click.option("--n", "n", type=int, required=True)
@click.option("--pq", required=True, help="P/Q")
@click.option("--rs", required=True, help="R/S")
@click.option("--arcs", is_flag=True, help="Print the elementary arcs instead.")
@click.pass_context
def takahashi_words(ctx, n, pq, rs, arcs=False):
    """Print the words of e_1..e_{2n}, one per line."""
    t = TakahashiParams.parse(n, pq, rs)
    if arcs:
        diag = build_diagram(t)
        for i, curve in enumerate(extract_curves(diag).curves, start=1):
            names = [str(ref) for ref in tak_curve_arcs(curve, diag)]
            _emit(ctx, " ".join(names), {"params": t.to_dict(), "index": i, "arcs": names})
        return
    for i, word in enumerate(tak_psl_set(t), start=1):
        _emit_word(ctx, i, word, params=t.to_dict())


@cli.command()
@click.option("--tuple", "tuple_text", help="Dunwoody tuple a,b,c,n,r,s")
@click.option("--n", "n", type=int, help="Takahashi period count")
@click.option("--pq", help="Takahashi P/Q")
@click.option("--rs", help="Takahashi R/S")
@click.pass_context
def homology(ctx, tuple_text=None, n=None, pq=None, rs=None):
    """Print H_1 computed from the diagram.

    For Takahashi manifolds the surgery description is checked as well.
    """
    source = _source(tuple_text, n, pq, rs)
    result = h1_from_diagram(source)
    record = {"source": str(source), "h1": result.to_dict()}
    lines = [str(result)]
    if isinstance(source, TakahashiParams):
        surgery = takahashi_surgery_h1(source)
        agrees = surgery == result
        if not agrees:
            logger.warning(f"{source}: diagram gives {result}, surgery gives {surgery}")
        record.update(surgery=surgery.to_dict(), agrees=agrees)
        lines.append(f"surgery: {surgery} ({'agrees' if agrees else 'DISAGREES'})")
    _emit(ctx, "\n".join(lines), record)


@cli.group()
def moves():
    """The plat-slide move engine."""


def _read_psl(path, genus):
    with open(path) as f:
        lines = [line.strip() for line in f]
    words = []
    for number, line in enumerate(lines, start=1):
        if not line:
            continue
        try:
            words.append(parse_word(line, genus))
        except WordError as exc:
            raise WordError(f"{path}, line {number}: {exc}") from exc
    return words


@moves.command("apply")
@click.option("--word", required=True, help='Word in the text grammar, "1" for empty.')
@click.option("--genus", type=int, default=1, show_default=True)
@click.option("--strands", type=int, default=1, show_default=True, help="Half the strand count.")
@click.option("--move", "move_specs", multiple=True, required=True, help="e.g. M4:left:2")
@click.option("--psl-file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def moves_apply(ctx, word, genus, strands, move_specs, psl_file=None):
    """Apply the given moves to a word, in order."""
    w = parse_word(word, genus, strands)
    specs = [MoveSpec.parse(text) for text in move_specs]
    psl_words = _read_psl(psl_file, genus) if psl_file else None
    logger.debug(f"applying {len(specs)} moves to {w}")
    result = apply_moves(w, specs, psl_words)
    record = dict(word_to_dict(result), word=str(result), moves=[str(s) for s in specs])
    _emit(ctx, str(result), record)


@cli.group()
def diagram():
    """Diagram export for external renderers."""


@diagram.command("export")
@click.option("--tuple", "tuple_text", help="Dunwoody tuple a,b,c,n,r,s")
@click.option("--n", "n", type=int, help="Takahashi period count")
@click.option("--pq", help="Takahashi P/Q")
@click.option("--rs", help="Takahashi R/S")
@click.option("--output", "output", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--graph-format", type=click.Choice(["graphml", "json"]), default="graphml", show_default=True
)
@click.pass_context
def diagram_export(ctx, output, graph_format, tuple_text=None, n=None, pq=None, rs=None):
    """Write the open diagram as GraphML or JSON."""
    source = _source(tuple_text, n, pq, rs)
    diag = build_graph(source) if isinstance(source, DunwoodyTuple) else build_diagram(source)
    if graph_format == "graphml":
        export_graphml(diag, output)
    else:
        with open(output, "w") as f:
            json.dump(diag.to_dict(), f, ensure_ascii=False, indent=2)
    logger.info(f"wrote {graph_format} diagram of {source} to {output}")
    _emit(ctx, output, {"source": str(source), "path": output, "format": graph_format})


def run(argv=None):
    """Run the command line and return its exit code instead of exiting."""
    try:
        cli.main(args=argv, prog_name="platslide", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except InvariantError as exc:
        logger.error(f"internal invariant failed: {exc}")
        click.echo(f"internal error: {exc}", err=True)
        return 2
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


def main():
    sys.exit(run())
