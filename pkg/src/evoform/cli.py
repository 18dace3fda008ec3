"""Command-line entry points: decode, eval, displace, simulate, serve."""

from __future__ import annotations

import sys

import click

from .codec import CodecConfig, genome_from_hex, mask_to_names, CHANNEL_NAMES
from .config import load_config
from .errors import EvoformError
from .expression import (
    Branch,
    Leaf,
    TimeParam,
    UnaryOp,
    Vertex,
    displace,
    emit_source,
    evaluate,
    fixed_point,
    genome_tree,
)
from .harness import metrics_to_csv, parse_scenario, run_scenario
from .mesh import displace_mesh, export_obj, load_obj

_OP_NAMES = {0: "add", 1: "sub", 2: "mul", 3: "div"}


def _describe(node, indent: int = 0) -> list[str]:
    pad = "  " * indent
    unary = "" if node.unary is UnaryOp.IDENTITY else f" [{node.unary.name.lower()}]"
    if isinstance(node, Leaf):
        label = node.var if node.var is not None else fixed_point(node.value)
        return [f"{pad}{label}{unary}"]
    lines = [f"{pad}{_OP_NAMES[node.op]}{unary}"]
    lines += _describe(node.left, indent + 1)
    lines += _describe(node.right, indent + 1)
    return lines


def _parse_vertex(text: str) -> Vertex:
    parts = text.split(",")
    if len(parts) != 3:
        raise click.UsageError("--vertex expects x,y,z")
    try:
        return Vertex(*[float(p) for p in parts])
    except ValueError as exc:
        raise click.UsageError(f"bad vertex {text!r}") from exc


@click.group()
def cli():
    """Evolve and inspect per-vertex displacement programs."""


@cli.command("decode")
@click.argument("hex_genome")
@click.option("--depth", default=3, show_default=True, help="Tree depth D.")
def decode_cmd(hex_genome: str, depth: int):
    """Print the decoded tree and its emitted shader snippet."""
    genome = genome_from_hex(hex_genome, CodecConfig(depth))
    tree = genome_tree(genome)
    channels = "".join(mask_to_names(genome.effective_channel_mask(), CHANNEL_NAMES))
    click.echo(f"channels: {channels}")
    click.echo(f"variables: {','.join(sorted(tree.active_vars))}")
    for line in _describe(tree.root):
        click.echo(line)
    click.echo(emit_source(tree, genome.effective_channel_mask()))


@cli.command("eval")
@click.argument("hex_genome")
@click.option("--depth", default=3, show_default=True)
@click.option("--vertex", required=True, help="Vertex as x,y,z.")
@click.option("--time", "time_", default=0.0, show_default=True, help="Time in radians.")
def eval_cmd(hex_genome: str, depth: int, vertex: str, time_: float):
    """Evaluate a genome at one vertex and time."""
    genome = genome_from_hex(hex_genome, CodecConfig(depth))
    tree = genome_tree(genome)
    v = _parse_vertex(vertex)
    t = TimeParam(time_)
    value = evaluate(tree, v, t)
    moved = displace(tree, genome.effective_channel_mask(), v, t)
    click.echo(f"value = {value:.6g}")
    click.echo(f"displaced = {moved.x:.6g},{moved.y:.6g},{moved.z:.6g}")


@cli.command("displace")
@click.argument("obj_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("hex_genome")
@click.option("--depth", default=3, show_default=True)
@click.option("--time", "time_", default=0.0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def displace_cmd(obj_path: str, hex_genome: str, depth: int, time_: float, out: str):
    """Displace every vertex of an OBJ mesh and write the result."""
    genome = genome_from_hex(hex_genome, CodecConfig(depth))
    tree = genome_tree(genome)
    with open(obj_path, "r", encoding="utf-8") as handle:
        mesh = load_obj(handle.read())
    moved = displace_mesh(mesh, tree, genome.effective_channel_mask(), TimeParam(time_))
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(export_obj(moved))
    click.echo(f"wrote {len(moved.vertices)} vertices to {out}")


@cli.command("simulate")
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def simulate_cmd(scenario_path: str, out: str):
    """Run a simulated-user scenario and write a metrics CSV."""
    with open(scenario_path, "r", encoding="utf-8") as handle:
        scenario = parse_scenario(handle.read())
    rows = run_scenario(scenario)
    with open(out, "w", encoding="utf-8") as handle:
        handle.write(metrics_to_csv(rows))
    click.echo(f"wrote {len(rows)} rows to {out}")


@cli.command("serve")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def serve_cmd(config_path):
    """Run the HTTP service."""
    from .service import run

    run(load_config(config_path))


def main() -> int:
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.Abort:
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except EvoformError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
