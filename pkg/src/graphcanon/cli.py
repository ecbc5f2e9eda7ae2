"""Command-line front end: every subcommand prints one JSON document on stdout."""
from __future__ import annotations

import json
import os
import sys

import click

from .canonical import canonical_form, decide
from .graph import ContractError, InputError, OutOfScope, classify, cycle_classes, load_graph
from .monoid import default_depth, in_interval, monoid_eq, parse_expr
from .structure import composition_series, is_cofinal, is_composition_SNE, terminal_clusters

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_SCOPE, EXIT_UNKNOWN = 0, 1, 2, 3, 4


def _render(obj, pretty: bool) -> str:
    if not pretty:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))
    lines = []
    for k in sorted(obj):
        v = obj[k]
        lines.append(f"{k}: {v if isinstance(v, str) else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines)


def _emit(ctx, obj, code: int):
    click.echo(_render(obj, ctx.obj.get("pretty", False)))
    ctx.exit(code)


def _load(ctx, path):
    try:
        return load_graph(path)
    except OSError as e:
        _emit(ctx, {"error": f"{path}: {e.strerror}"}, EXIT_INPUT)
    except InputError as e:
        _emit(ctx, {"error": f"{path}: {e}"}, EXIT_INPUT)


def _depth(g, depth):
    if depth is not None:
        return depth
    env = os.environ.get("GRAPHCANON_DEPTH")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"GRAPHCANON_DEPTH is not an integer: {env!r}")
    return default_depth(g)


def _pretty_option(f):
    return click.option("--pretty", is_flag=True, help="Human-readable output.")(f)


def _set_pretty(ctx, pretty):
    if pretty:
        ctx.obj["pretty"] = True


@click.group()
@click.option("--pretty", is_flag=True, help="Human-readable output.")
@click.pass_context
def main(ctx, pretty):
    """Canonical forms and isomorphism decisions for graded Leavitt path algebras."""
    ctx.ensure_object(dict)
    ctx.obj["pretty"] = pretty


@main.command()
@click.argument("file")
@_pretty_option
@click.pass_context
def analyze(ctx, file, pretty):
    """Vertex classes, terminal clusters, composition series and the S-NE verdict."""
    _set_pretty(ctx, pretty)
    g = _load(ctx, file)
    diag = is_composition_SNE(g)
    out = {"vertices": {v: classify(g, v).value for v in g.vertices},
           "cycles": [list(c.vertices) for c in cycle_classes(g)],
           "clusters": [c.to_json() for c in terminal_clusters(g)],
           "cofinal": is_cofinal(g),
           "sne": {"ok": diag.ok, "reason": diag.reason, "length": diag.length}}
    try:
        out["series"] = composition_series(g).to_json(g)
    except (OutOfScope, ValueError) as e:
        out["series"] = None
        out["series_error"] = str(e)
    _emit(ctx, out, EXIT_OK if diag.ok else EXIT_SCOPE)


@main.command()
@click.argument("file")
@click.option("--emit-trace", is_flag=True, help="Include the trace of moves.")
@_pretty_option
@click.pass_context
def canon(ctx, file, emit_trace, pretty):
    """Canonical descriptor of a graph."""
    _set_pretty(ctx, pretty)
    g = _load(ctx, file)
    try:
        desc, trace = canonical_form(g)
    except OutOfScope as e:
        _emit(ctx, {"error": str(e), "verdict": "out-of-scope"}, EXIT_SCOPE)
    out = {"descriptor": desc.to_json(), "fingerprint": desc.fingerprint()}
    if emit_trace:
        out["trace"] = trace.to_json()
    _emit(ctx, out, EXIT_OK)


@main.command("decide")
@click.argument("file_a")
@click.argument("file_b")
@click.option("--witness", is_flag=True, help="Include the witness traces for isomorphic inputs.")
@_pretty_option
@click.pass_context
def decide_cmd(ctx, file_a, file_b, witness, pretty):
    """Decide whether the two graphs have graded isomorphic algebras."""
    _set_pretty(ctx, pretty)
    g1, g2 = _load(ctx, file_a), _load(ctx, file_b)
    d = decide(g1, g2)
    out = d.to_json()
    if not witness:
        out["witness"] = None
    code = {"iso": EXIT_OK, "not-iso": EXIT_NO, "out-of-scope": EXIT_SCOPE}[d.verdict]
    _emit(ctx, out, code)


def _verdict_code(v) -> int:
    return {True: EXIT_OK, False: EXIT_NO, None: EXIT_UNKNOWN}[v.value]


@main.command("monoid-eq")
@click.argument("file")
@click.argument("x")
@click.argument("y")
@click.option("--depth", type=int, default=None, help="Rewriting depth bound.")
@_pretty_option
@click.pass_context
def monoid_eq_cmd(ctx, file, x, y, depth, pretty):
    """Compare two talented-monoid expressions."""
    _set_pretty(ctx, pretty)
    g = _load(ctx, file)
    try:
        ex, ey = parse_expr(x, g), parse_expr(y, g)
        dep = _depth(g, depth)
    except InputError as e:
        _emit(ctx, {"error": str(e)}, EXIT_INPUT)
    v = monoid_eq(g, ex, ey, dep)
    _emit(ctx, {**v.to_json(), "depth": dep}, _verdict_code(v))


@main.command()
@click.argument("file")
@click.argument("x")
@click.option("--depth", type=int, default=None, help="Rewriting depth bound.")
@_pretty_option
@click.pass_context
def interval(ctx, file, x, depth, pretty):
    """Membership of an expression in the generating interval."""
    _set_pretty(ctx, pretty)
    g = _load(ctx, file)
    try:
        ex = parse_expr(x, g)
        dep = _depth(g, depth)
    except InputError as e:
        _emit(ctx, {"error": str(e)}, EXIT_INPUT)
    v = in_interval(g, ex, dep)
    _emit(ctx, {**v.to_json(), "depth": dep}, _verdict_code(v))


def run(argv=None) -> int:
    """Run the CLI in-process and return the exit code."""
    try:
        rv = main.main(args=argv, prog_name="graphcanon", standalone_mode=False)
        if isinstance(rv, int):
            return rv
    except SystemExit as e:
        return int(e.code or 0)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_INPUT
    except ContractError as e:
        click.echo(json.dumps({"error": str(e)}))
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
