"""Evaluable expression trees decoded from genomes.

Evaluation is total: division is protected, tangent outputs are clamped,
and every binary-node result is clamped to a finite range, so no genome
and no finite vertex can produce NaN or infinity.  The same semantics are
observable in the emitted source text (clamps attach only to constructs
the text can express), which is what makes re-parse equivalence testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional, Union

import numpy as np

from .codec import (
    CHANNEL_NAMES,
    VARIABLE_KIND_LIMIT,
    VARIABLE_NAMES,
    BinaryOp,
    Genome,
    SearchSpace,
    UnaryOp,
    mask_to_names,
)
from .errors import InvalidMaskError

TWO_PI = 2.0 * math.pi

#: Protected division returns the numerator below this denominator magnitude.
DIV_EPSILON = 1e-6
#: Tangent outputs are clamped to +-TAN_CLAMP.
TAN_CLAMP = 1e4
#: Every binary-node result (the root included) is clamped to +-VALUE_CLAMP.
VALUE_CLAMP = 1e6

#: Constant payload p in [0, 255] maps to -10 + 20p/255, quantized to the
#: 4 fractional digits the emitted text can carry.
PAYLOAD_SPAN = 20.0
PAYLOAD_OFFSET = -10.0

_OP_SYMBOL = {BinaryOp.ADD: "+", BinaryOp.SUB: "-", BinaryOp.MUL: "*", BinaryOp.DIV: "/"}
_UNARY_NAME = {UnaryOp.SIN: "sin", UnaryOp.COS: "cos", UnaryOp.TAN: "tan"}


def fixed_point(value: float, digits: int = 4) -> str:
    """Fixed-point text, round-half-away-from-zero, no negative zero."""
    quantum = Decimal(1).scaleb(-digits)
    d = Decimal(value).quantize(quantum, rounding=ROUND_HALF_UP)
    if d == 0:
        d = abs(d)
    return format(d, "f")


def quantize_constant(value: float) -> float:
    return float(Decimal(value).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


def payload_to_constant(payload: int) -> float:
    return quantize_constant(PAYLOAD_OFFSET + PAYLOAD_SPAN * payload / 255.0)


@dataclass(frozen=True)
class Vertex:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError("vertex components must be finite")


@dataclass(frozen=True)
class TimeParam:
    """Simulation time, wrapped into [0, 2*pi)."""

    t: float

    def __post_init__(self):
        r = math.fmod(self.t, TWO_PI)
        if r < 0.0:
            r += TWO_PI
        if r >= TWO_PI:
            r = 0.0
        object.__setattr__(self, "t", r)


@dataclass(frozen=True)
class Leaf:
    unary: UnaryOp
    var: Optional[str] = None  # one of x, y, z, t
    value: Optional[float] = None  # constant leaves


@dataclass(frozen=True)
class Branch:
    unary: UnaryOp
    op: BinaryOp
    left: "Node"
    right: "Node"


Node = Union[Leaf, Branch]


@dataclass(frozen=True)
class ExpressionTree:
    root: Node
    depth: int
    active_vars: frozenset


def _remap_variable(kind: int, active: tuple[str, ...]) -> str:
    ordered = sorted(active)
    return ordered[kind % len(ordered)]


def build_tree(genome: Genome, space: SearchSpace) -> ExpressionTree:
    """Materialize a genome into an evaluable tree.

    Variable leaves outside the active variable set are remapped into it;
    constant leaves get their payload mapped to a literal.
    """
    config = genome.config
    active = space.variables

    def node_at(i: int) -> Node:
        unary = UnaryOp(genome.unary_ops[i])
        if i >= config.internal_count:
            kind, payload = genome.leaves[i - config.internal_count]
            if kind < VARIABLE_KIND_LIMIT:
                var = VARIABLE_NAMES[kind]
                if var not in active:
                    var = _remap_variable(kind, active)
                return Leaf(unary, var=var)
            return Leaf(unary, value=payload_to_constant(payload))
        return Branch(unary, BinaryOp(genome.binary_ops[i]),
                      node_at(2 * i + 1), node_at(2 * i + 2))

    return ExpressionTree(node_at(0), config.depth, frozenset(active))


def genome_tree(genome: Genome) -> ExpressionTree:
    """Tree under the genome's own header (zero masks fall back to {x})."""
    return build_tree(genome, genome.effective_space())


def _clamp(value: float, limit: float) -> float:
    if math.isnan(value):  # unreachable with protected ops; kept as a guard
        return 0.0
    if value > limit:
        return limit
    if value < -limit:
        return -limit
    return value


def _apply_binary(op: BinaryOp, left: float, right: float) -> float:
    if op is BinaryOp.ADD:
        raw = left + right
    elif op is BinaryOp.SUB:
        raw = left - right
    elif op is BinaryOp.MUL:
        raw = left * right
    elif abs(right) < DIV_EPSILON:
        raw = left  # protected division
    else:
        raw = left / right
    return _clamp(raw, VALUE_CLAMP)


def _apply_unary(op: UnaryOp, value: float) -> float:
    if op is UnaryOp.IDENTITY:
        return value
    if op is UnaryOp.SIN:
        return math.sin(value)
    if op is UnaryOp.COS:
        return math.cos(value)
    return _clamp(math.tan(value), TAN_CLAMP)


def _eval(node: Node, env: dict) -> float:
    if isinstance(node, Leaf):
        raw = env[node.var] if node.var is not None else node.value
    else:
        raw = _apply_binary(node.op, _eval(node.left, env), _eval(node.right, env))
    return _apply_unary(node.unary, raw)


def evaluate(tree: ExpressionTree, v: Vertex, t: TimeParam) -> float:
    env = {"x": v.x, "y": v.y, "z": v.z, "t": t.t}
    return _clamp(_eval(tree.root, env), VALUE_CLAMP)


def displace(tree: ExpressionTree, channel_mask: int, v: Vertex, t: TimeParam) -> Vertex:
    """Add the expression value to every selected channel simultaneously."""
    if channel_mask == 0:
        raise InvalidMaskError("channel mask must be nonempty")
    e = evaluate(tree, v, t)
    selected = mask_to_names(channel_mask, CHANNEL_NAMES)
    coords = {"x": v.x, "y": v.y, "z": v.z}
    for name in selected:
        coords[name] = coords[name] + e
    return Vertex(coords["x"], coords["y"], coords["z"])


def _emit(node: Node) -> str:
    if isinstance(node, Leaf):
        if node.var is not None:
            inner = "time" if node.var == "t" else f"p.{node.var}"
        else:
            inner = fixed_point(node.value)
    else:
        inner = f"({_emit(node.left)} {_OP_SYMBOL[node.op]} {_emit(node.right)})"
    if node.unary is UnaryOp.IDENTITY:
        return inner
    return f"{_UNARY_NAME[node.unary]}({inner})"


def emit_source(tree: ExpressionTree, channel_mask: int) -> str:
    """One shader-style assignment adding the expression to the swizzle."""
    if channel_mask == 0:
        raise InvalidMaskError("channel mask must be nonempty")
    swizzle = "".join(mask_to_names(channel_mask, CHANNEL_NAMES))
    return f"p.{swizzle} = p.{swizzle} + ({_emit(tree.root)});"


def evaluate_batch(tree: ExpressionTree, xs, ys, zs, ts) -> np.ndarray:
    """Vectorized evaluate() over parallel coordinate arrays.

    Mirrors the scalar semantics op for op; used by the simulation harness
    where per-point recursion would dominate the runtime.
    """
    env = {"x": np.asarray(xs, dtype=float), "y": np.asarray(ys, dtype=float),
           "z": np.asarray(zs, dtype=float), "t": np.asarray(ts, dtype=float)}

    def clamp(a, limit):
        return np.clip(np.nan_to_num(a, nan=0.0, posinf=limit, neginf=-limit), -limit, limit)

    def walk(node: Node) -> np.ndarray:
        if isinstance(node, Leaf):
            raw = env[node.var] if node.var is not None else np.full_like(env["x"], node.value)
        else:
            left, right = walk(node.left), walk(node.right)
            with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
                if node.op is BinaryOp.ADD:
                    raw = left + right
                elif node.op is BinaryOp.SUB:
                    raw = left - right
                elif node.op is BinaryOp.MUL:
                    raw = left * right
                else:
                    small = np.abs(right) < DIV_EPSILON
                    raw = np.where(small, left, left / np.where(small, 1.0, right))
            raw = clamp(raw, VALUE_CLAMP)
        if node.unary is UnaryOp.IDENTITY:
            return raw
        if node.unary is UnaryOp.SIN:
            return np.sin(raw)
        if node.unary is UnaryOp.COS:
            return np.cos(raw)
        return clamp(np.tan(raw), TAN_CLAMP)

    return clamp(walk(tree.root), VALUE_CLAMP)
