/** Minimal OBJ handling for tile previews: v/f records, triangles only. */

export interface MeshData {
  positions: Float64Array; // xyz triples
  indices: Uint32Array; // triangle corners, 0-based
}

export function parseObj(text: string): MeshData {
  const positions: number[] = [];
  const indices: number[] = [];
  for (const raw of text.split('\n')) {
    const line = raw.trim();
    if (line.startsWith('v ')) {
      const parts = line.slice(2).trim().split(/\s+/).map(Number);
      if (parts.length < 3 || parts.some(Number.isNaN)) {
        throw new Error(`bad vertex line: ${raw}`);
      }
      positions.push(parts[0], parts[1], parts[2]);
    } else if (line.startsWith('f ')) {
      const corners = line
        .slice(2)
        .trim()
        .split(/\s+/)
        .map((field) => Number(field.split('/')[0]) - 1);
      if (corners.some((i) => Number.isNaN(i) || i < 0)) {
        throw new Error(`bad face line: ${raw}`);
      }
      for (let k = 1; k + 1 < corners.length; k++) {
        indices.push(corners[0], corners[k], corners[k + 1]);
      }
    }
  }
  return {
    positions: Float64Array.from(positions),
    indices: Uint32Array.from(indices),
  };
}

/** Area-weighted per-vertex normals, recomputed from displaced positions. */
export function computeNormals(mesh: MeshData): Float64Array {
  const { positions, indices } = mesh;
  const normals = new Float64Array(positions.length);
  for (let f = 0; f < indices.length; f += 3) {
    const [a, b, c] = [indices[f] * 3, indices[f + 1] * 3, indices[f + 2] * 3];
    const ux = positions[b] - positions[a];
    const uy = positions[b + 1] - positions[a + 1];
    const uz = positions[b + 2] - positions[a + 2];
    const vx = positions[c] - positions[a];
    const vy = positions[c + 1] - positions[a + 1];
    const vz = positions[c + 2] - positions[a + 2];
    const nx = uy * vz - uz * vy;
    const ny = uz * vx - ux * vz;
    const nz = ux * vy - uy * vx;
    for (const base of [a, b, c]) {
      normals[base] += nx;
      normals[base + 1] += ny;
      normals[base + 2] += nz;
    }
  }
  for (let i = 0; i < normals.length; i += 3) {
    const length = Math.hypot(normals[i], normals[i + 1], normals[i + 2]);
    if (length > 0) {
      normals[i] /= length;
      normals[i + 1] /= length;
      normals[i + 2] /= length;
    }
  }
  return normals;
}
