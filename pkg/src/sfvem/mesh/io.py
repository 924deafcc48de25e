"""
Mesh text format.

    NV NC
    x y            (NV lines)
    m i1 ... im    (NC lines, 0-based CCW indices)

Boundary flags are not stored; they are recomputed from coordinates on load.
"""

from pathlib import Path

from ..exceptions import MeshFormatError
from ..log import get_component_logger
from .geometry import PolygonMesh

logger = get_component_logger("sfvem.mesh.io")


def write_mesh(mesh: PolygonMesh, path: str | Path) -> Path:
    """Write ``mesh`` in the text format and return the path."""
    path = Path(path)
    lines = [f"{mesh.n_vertices} {mesh.n_cells}"]
    lines += [f"{x!r} {y!r}" for x, y in mesh.vertices.tolist()]
    lines += [" ".join(map(str, [len(cell), *cell.tolist()])) for cell in mesh.cells]
    path.write_text("\n".join(lines) + "\n")
    logger.info("Mesh written", path=str(path), cells=mesh.n_cells)
    return path


def read_mesh(path: str | Path) -> PolygonMesh:
    """
    Read a mesh in the text format.

    Raises:
        MeshFormatError: malformed header, counts, tokens or cells
    """
    path = Path(path)
    try:
        lines = [line.split() for line in path.read_text().splitlines() if line.strip()]
    except OSError as e:
        raise MeshFormatError(f"cannot read mesh file {path}: {e}") from e
    if not lines or len(lines[0]) != 2:
        raise MeshFormatError("header must be 'NV NC'")

    try:
        n_vertices, n_cells = (int(token) for token in lines[0])
        if len(lines) != 1 + n_vertices + n_cells:
            raise MeshFormatError(
                f"expected {1 + n_vertices + n_cells} non-empty lines, got {len(lines)}"
            )
        vertices = []
        for tokens in lines[1 : 1 + n_vertices]:
            if len(tokens) != 2:
                raise MeshFormatError(f"vertex line needs 2 coordinates: {tokens}")
            vertices.append([float(tokens[0]), float(tokens[1])])
        cells = []
        for tokens in lines[1 + n_vertices :]:
            count = int(tokens[0])
            if count != len(tokens) - 1:
                raise MeshFormatError(f"cell line declares {count} vertices: {tokens}")
            cells.append([int(token) for token in tokens[1:]])
    except ValueError as e:
        raise MeshFormatError(f"non-numeric token in {path}: {e}") from e

    mesh = PolygonMesh.from_cells(vertices, cells)
    logger.info(
        "Mesh read", path=str(path), vertices=mesh.n_vertices, cells=mesh.n_cells
    )
    return mesh
