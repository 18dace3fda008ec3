"""Collaborative interactive evolution of per-vertex displacement programs."""

from .codec import (
    BinaryOp,
    CodecConfig,
    Genome,
    SearchSpace,
    UnaryOp,
    decode,
    encode,
    genome_from_hex,
    genome_to_hex,
    random_genome,
)
from .collaboration import Event, Hub, Room, Session
from .evolution import GAParams, Individual, Population
from .expression import (
    ExpressionTree,
    TimeParam,
    Vertex,
    build_tree,
    displace,
    emit_source,
    evaluate,
    genome_tree,
)
from .mesh import Mesh, displace_mesh, export_obj, load_fixture, load_obj

__all__ = [
    "BinaryOp", "CodecConfig", "Genome", "SearchSpace", "UnaryOp",
    "decode", "encode", "genome_from_hex", "genome_to_hex", "random_genome",
    "Event", "Hub", "Room", "Session",
    "GAParams", "Individual", "Population",
    "ExpressionTree", "TimeParam", "Vertex",
    "build_tree", "displace", "emit_source", "evaluate", "genome_tree",
    "Mesh", "displace_mesh", "export_obj", "load_fixture", "load_obj",
]

__version__ = "0.1.0"
