"""Bit-level genome layout for vertex-program expression trees.

A genome is a fixed-length bit string laid out as:

    [3 channel bits][4 variable bits][binary ops][unary ops][leaves]

The tree is a full binary tree of depth D stored heap-style: node i has
children 2i+1 and 2i+2, all leaves at depth D.  Each internal node carries
a 2-bit binary-operator code, every node (internal and leaf) carries a
2-bit unary-operator code, and each leaf carries a 3-bit kind plus an
8-bit constant payload.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import IntEnum

from .errors import BitLengthError, InvalidSpaceError

CHANNEL_NAMES = ("x", "y", "z")
VARIABLE_NAMES = ("x", "y", "z", "t")

HEADER_BITS = 7  # 3 channel bits + 4 variable bits
BINARY_OP_BITS = 2
UNARY_OP_BITS = 2
LEAF_KIND_BITS = 3
LEAF_PAYLOAD_BITS = 8
LEAF_BITS = LEAF_KIND_BITS + LEAF_PAYLOAD_BITS


class BinaryOp(IntEnum):
    ADD = 0
    SUB = 1
    MUL = 2
    DIV = 3  # protected at evaluation time


class UnaryOp(IntEnum):
    IDENTITY = 0
    SIN = 1
    COS = 2
    TAN = 3  # clamped at evaluation time


#: Leaf kinds 0-3 select a variable; kinds 4-7 all mean "constant".
VARIABLE_KIND_LIMIT = 4


def names_to_mask(names, universe) -> int:
    """Pack an iterable of names into a bit mask over ``universe`` (bit 0 = first)."""
    mask = 0
    for name in names:
        mask |= 1 << universe.index(name)
    return mask


def mask_to_names(mask: int, universe) -> tuple[str, ...]:
    return tuple(n for i, n in enumerate(universe) if mask >> i & 1)


@dataclass(frozen=True)
class SearchSpace:
    """The channels an expression may displace and the variables it may read."""

    channel_mask: int
    variable_mask: int

    def __post_init__(self):
        if not 0 < self.channel_mask < 1 << len(CHANNEL_NAMES):
            raise InvalidSpaceError(f"channel mask {self.channel_mask:#b} is empty or out of range")
        if not 0 < self.variable_mask < 1 << len(VARIABLE_NAMES):
            raise InvalidSpaceError(f"variable mask {self.variable_mask:#b} is empty or out of range")

    @classmethod
    def from_names(cls, channels, variables) -> "SearchSpace":
        return cls(names_to_mask(channels, CHANNEL_NAMES), names_to_mask(variables, VARIABLE_NAMES))

    @property
    def channels(self) -> tuple[str, ...]:
        return mask_to_names(self.channel_mask, CHANNEL_NAMES)

    @property
    def variables(self) -> tuple[str, ...]:
        return mask_to_names(self.variable_mask, VARIABLE_NAMES)

    def union(self, other: "SearchSpace") -> "SearchSpace":
        return SearchSpace(self.channel_mask | other.channel_mask,
                           self.variable_mask | other.variable_mask)

    def contains(self, other: "SearchSpace") -> bool:
        return (self.channel_mask | other.channel_mask == self.channel_mask
                and self.variable_mask | other.variable_mask == self.variable_mask)


@dataclass(frozen=True)
class CodecConfig:
    """Derived sizes for a fixed tree depth."""

    depth: int = 3

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("tree depth must be >= 1")

    @property
    def internal_count(self) -> int:
        return (1 << self.depth) - 1

    @property
    def node_count(self) -> int:
        return (1 << self.depth + 1) - 1

    @property
    def leaf_count(self) -> int:
        return 1 << self.depth

    @property
    def total_bits(self) -> int:
        return (HEADER_BITS
                + BINARY_OP_BITS * self.internal_count
                + UNARY_OP_BITS * self.node_count
                + LEAF_BITS * self.leaf_count)

    @property
    def body_bits(self) -> int:
        return self.total_bits - HEADER_BITS

    @property
    def hex_digits(self) -> int:
        return -(-self.total_bits // 4)


@dataclass(frozen=True)
class Genome:
    """Structured view of one bit string.

    Masks are kept raw: a zero mask is representable here and only
    normalized to {x} when a tree is built, so decode/encode stay a
    bijection on the full bit-string space.
    """

    config: CodecConfig
    channel_mask: int
    variable_mask: int
    binary_ops: tuple[int, ...]
    unary_ops: tuple[int, ...]
    leaves: tuple[tuple[int, int], ...]  # (kind, payload) pairs

    def effective_channel_mask(self) -> int:
        return self.channel_mask or 1  # empty mask falls back to {x}

    def effective_variable_mask(self) -> int:
        return self.variable_mask or 1

    def effective_space(self) -> SearchSpace:
        return SearchSpace(self.effective_channel_mask(), self.effective_variable_mask())


def decode(bits: str, config: CodecConfig) -> Genome:
    """Unpack a bit string into a Genome.  Exact inverse of encode()."""
    if len(bits) != config.total_bits:
        raise BitLengthError(f"expected {config.total_bits} bits, got {len(bits)}")
    if bits.strip("01"):
        raise BitLengthError("bit string may only contain '0' and '1'")

    pos = 0

    def take(n: int) -> int:
        nonlocal pos
        value = int(bits[pos:pos + n], 2)
        pos += n
        return value

    channel_mask = take(3)
    variable_mask = take(4)
    binary_ops = tuple(take(BINARY_OP_BITS) for _ in range(config.internal_count))
    unary_ops = tuple(take(UNARY_OP_BITS) for _ in range(config.node_count))
    leaves = tuple((take(LEAF_KIND_BITS), take(LEAF_PAYLOAD_BITS))
                   for _ in range(config.leaf_count))
    return Genome(config, channel_mask, variable_mask, binary_ops, unary_ops, leaves)


def encode(genome: Genome) -> str:
    """Pack a Genome back into its bit string."""
    config = genome.config
    parts = [format(genome.channel_mask, "03b"), format(genome.variable_mask, "04b")]
    parts += [format(op, "02b") for op in genome.binary_ops]
    parts += [format(op, "02b") for op in genome.unary_ops]
    for kind, payload in genome.leaves:
        parts.append(format(kind, "03b"))
        parts.append(format(payload, "08b"))
    bits = "".join(parts)
    if len(bits) != config.total_bits:
        raise BitLengthError(f"genome arrays do not match depth {config.depth}")
    return bits


def bits_to_hex(bits: str, config: CodecConfig) -> str:
    """Wire form: lowercase hex, most-significant bit first, zero-padded."""
    if len(bits) != config.total_bits:
        raise BitLengthError(f"expected {config.total_bits} bits, got {len(bits)}")
    return format(int(bits, 2), f"0{config.hex_digits}x")


def hex_to_bits(hex_string: str, config: CodecConfig) -> str:
    if len(hex_string) != config.hex_digits:
        raise BitLengthError(f"expected {config.hex_digits} hex digits, got {len(hex_string)}")
    try:
        value = int(hex_string, 16)
    except ValueError as exc:
        raise BitLengthError(f"not a hex string: {hex_string!r}") from exc
    if value >> config.total_bits:
        raise BitLengthError("hex value exceeds the bit-string width")
    return format(value, f"0{config.total_bits}b")


def genome_to_hex(genome: Genome) -> str:
    return bits_to_hex(encode(genome), genome.config)


def genome_from_hex(hex_string: str, config: CodecConfig) -> Genome:
    return decode(hex_to_bits(hex_string, config), config)


def random_genome(config: CodecConfig, seed: int, space: SearchSpace) -> Genome:
    """Uniformly random body bits under a fixed header.

    The header is set from the session's search space, not randomized, so
    freshly seeded populations respect their assigned variable set.
    """
    if space.channel_mask == 0 or space.variable_mask == 0:
        raise InvalidSpaceError("search space masks must be nonempty")
    rng = random.Random(seed)
    header = format(space.channel_mask, "03b") + format(space.variable_mask, "04b")
    body = "".join(str(rng.getrandbits(1)) for _ in range(config.body_bits))
    return decode(header + body, config)
