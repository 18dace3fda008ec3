"""Triangle-mesh ingestion, CPU displacement, and OBJ export.

Only the `v` and `f` records of OBJ are consumed; everything else is
ignored on load and omitted on export (displacement invalidates normals,
so viewers recompute them).
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .errors import MeshFormatError
from .expression import ExpressionTree, TimeParam, Vertex, displace, fixed_point

FIXTURE_NAMES = ("sphere", "cube", "cylinder")


@dataclass(frozen=True)
class Mesh:
    vertices: tuple[Vertex, ...]
    faces: tuple[tuple[int, int, int], ...]  # 0-based triangles


def load_obj(text: str) -> Mesh:
    vertices: list[Vertex] = []
    faces: list[tuple[int, int, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields or fields[0].startswith("#"):
            continue
        if fields[0] == "v":
            if len(fields) < 4:
                raise MeshFormatError(f"line {lineno}: vertex needs 3 coordinates")
            try:
                coords = [float(f) for f in fields[1:4]]
            except ValueError as exc:
                raise MeshFormatError(f"line {lineno}: non-numeric vertex") from exc
            vertices.append(Vertex(*coords))
        elif fields[0] == "f":
            indices = []
            for field in fields[1:]:
                head = field.split("/", 1)[0]
                try:
                    idx = int(head)
                except ValueError as exc:
                    raise MeshFormatError(f"line {lineno}: non-integer face index") from exc
                if idx < 1:
                    raise MeshFormatError(f"line {lineno}: face indices must be 1-based positive")
                indices.append(idx - 1)
            if len(indices) < 3:
                raise MeshFormatError(f"line {lineno}: face needs at least 3 vertices")
            # fan triangulation for polygons
            for a, b in zip(indices[1:], indices[2:]):
                faces.append((indices[0], a, b))
    vertex_count = len(vertices)
    for face in faces:
        if any(i >= vertex_count for i in face):
            raise MeshFormatError(f"face index {max(face) + 1} exceeds vertex count {vertex_count}")
    return Mesh(tuple(vertices), tuple(faces))


def export_obj(mesh: Mesh) -> str:
    lines = [f"v {fixed_point(v.x, 6)} {fixed_point(v.y, 6)} {fixed_point(v.z, 6)}"
             for v in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return "".join(line + "\n" for line in lines)


def displace_mesh(mesh: Mesh, tree: ExpressionTree, channel_mask: int, t: TimeParam) -> Mesh:
    """Apply the displacement independently to every vertex; faces unchanged."""
    moved = tuple(displace(tree, channel_mask, v, t) for v in mesh.vertices)
    return Mesh(moved, mesh.faces)


def load_fixture(name: str) -> Mesh:
    """Load one of the bundled procedural test meshes."""
    if name not in FIXTURE_NAMES:
        raise MeshFormatError(f"unknown fixture mesh {name!r}; choose from {FIXTURE_NAMES}")
    text = resources.files("evoform").joinpath(f"fixtures/{name}.obj").read_text("utf-8")
    return load_obj(text)
