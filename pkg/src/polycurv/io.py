"""File formats: OFF surfaces, JSON polygons and complexes, CSV tables.

Floats are serialized with ``repr`` (shortest round-trip form), so a
parse -> dump -> parse cycle reproduces objects bit for bit and identical
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io as _io
import json
from typing import Iterable

import numpy as np

from .complexes import PolyhedralMetric, SimplicialComplex
from .config import Tolerances
from .curves import PlanarPolygon, SpacePolygon
from .errors import IndexOutOfRange, ParseError
from .surfaces import ConvexPolyhedron, TriangleMesh


# ---------------------------------------------------------------------------
# OFF surfaces


def parse_off(text: str, tol: Tolerances | None = None):
    """Parse an OFF file into a TriangleMesh (all faces triangles) or a
    ConvexPolyhedron (any polygonal face present; convexity verified by
    the constructor)."""
    lines = text.splitlines()

    def content(from_line: int):
        for ln in range(from_line, len(lines)):
            stripped = lines[ln].split("#", 1)[0].strip()
            if stripped:
                yield ln + 1, stripped
        return

    stream = content(0)
    try:
        ln, header = next(stream)
    except StopIteration:
        raise ParseError("empty file") from None
    if header != "OFF":
        raise ParseError("expected OFF header", line=ln)
    try:
        ln, counts = next(stream)
    except StopIteration:
        raise ParseError("missing counts line") from None
    parts = counts.split()
    if len(parts) != 3:
        raise ParseError("counts line must read 'nv nf ne'", line=ln)
    try:
        nv, nf, _ = (int(p) for p in parts)
    except ValueError:
        raise ParseError("counts must be integers", line=ln) from None
    if nv < 1 or nf < 1:
        raise ParseError("need at least one vertex and one face", line=ln)

    vertices = np.empty((nv, 3))
    for k in range(nv):
        try:
            ln, row = next(stream)
        except StopIteration:
            raise ParseError(f"expected {nv} vertices, found {k}") from None
        parts = row.split()
        if len(parts) != 3:
            raise ParseError("vertex line must hold 3 coordinates", line=ln)
        try:
            vertices[k] = [float(p) for p in parts]
        except ValueError:
            raise ParseError("bad vertex coordinate", line=ln) from None

    faces = []
    for k in range(nf):
        try:
            ln, row = next(stream)
        except StopIteration:
            raise ParseError(f"expected {nf} faces, found {k}") from None
        parts = row.split()
        try:
            size = int(parts[0])
        except (ValueError, IndexError):
            raise ParseError("face line must start with its vertex count",
                             line=ln) from None
        if size < 3:
            raise ParseError("faces need at least 3 vertices", line=ln)
        if len(parts) != size + 1:
            raise ParseError(f"face line announces {size} indices but "
                             f"carries {len(parts) - 1}", line=ln)
        try:
            idx = [int(p) for p in parts[1:]]
        except ValueError:
            raise ParseError("bad face index", line=ln) from None
        for i in idx:
            if not 0 <= i < nv:
                raise IndexOutOfRange(
                    f"face index {i} out of range for {nv} vertices", line=ln)
        faces.append(tuple(idx))
    for ln, _ in stream:
        raise ParseError("trailing content after the last face", line=ln)

    if all(len(f) == 3 for f in faces):
        return TriangleMesh(vertices, faces, tol=tol)
    return ConvexPolyhedron(vertices, faces, tol=tol)


def dump_off(m) -> str:
    """Serialize a TriangleMesh or ConvexPolyhedron as OFF text."""
    if isinstance(m, TriangleMesh):
        faces = [tuple(int(v) for v in t) for t in m.triangles]
    else:
        faces = list(m.faces)
    out = ["OFF", f"{m.n_vertices} {len(faces)} {m.n_edges}"]
    for p in m.vertices:
        out.append(" ".join(repr(float(x)) for x in p))
    for f in faces:
        out.append(" ".join([str(len(f))] + [str(i) for i in f]))
    return "\n".join(out) + "\n"


def parse_mesh_json(text: str, tol: Tolerances | None = None):
    """JSON equivalent of OFF: ``{"vertices": [[x,y,z]], "faces": [[ids]]}``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    unknown = set(data) - {"vertices", "faces"}
    if unknown:
        raise ParseError(f"unknown keys: {sorted(unknown)}")
    for key in ("vertices", "faces"):
        if key not in data:
            raise ParseError(f"missing '{key}'")
    V = np.asarray(data["vertices"], dtype=float)
    if V.ndim != 2 or V.shape[1] != 3:
        raise ParseError("vertices must be an (n, 3) array")
    faces = data["faces"]
    if not isinstance(faces, list) or not faces:
        raise ParseError("'faces' must be a non-empty list")
    for f in faces:
        if not isinstance(f, list) or len(f) < 3:
            raise ParseError(f"face {f} needs at least 3 indices")
        for i in f:
            if not isinstance(i, int) or not 0 <= i < len(V):
                raise IndexOutOfRange(
                    f"face index {i} out of range for {len(V)} vertices")
    if all(len(f) == 3 for f in faces):
        return TriangleMesh(V, faces, tol=tol)
    return ConvexPolyhedron(V, [tuple(f) for f in faces], tol=tol)


def dump_mesh_json(m) -> str:
    if isinstance(m, TriangleMesh):
        faces = [list(int(v) for v in t) for t in m.triangles]
    else:
        faces = [list(f) for f in m.faces]
    data = {"vertices": [[float(x) for x in p] for p in m.vertices],
            "faces": faces}
    return json.dumps(data, indent=2) + "\n"


def load_surface(path, tol: Tolerances | None = None):
    """Dispatch on extension: .off -> OFF text, .json -> the JSON schema."""
    from pathlib import Path

    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    if p.suffix.lower() == ".json":
        return parse_mesh_json(text, tol=tol)
    return parse_off(text, tol=tol)


# ---------------------------------------------------------------------------
# JSON polygons


def parse_polygon_json(text: str, tol: Tolerances | None = None):
    """Parse ``{"vertices": [[...], ...], "closed": bool}`` into a
    PlanarPolygon (2 coordinates) or SpacePolygon (3 coordinates)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    unknown = set(data) - {"vertices", "closed"}
    if unknown:
        raise ParseError(f"unknown keys: {sorted(unknown)}")
    if "vertices" not in data:
        raise ParseError("missing 'vertices'")
    closed = data.get("closed", True)
    if not isinstance(closed, bool):
        raise ParseError("'closed' must be a boolean")
    V = np.asarray(data["vertices"], dtype=float)
    if V.ndim != 2 or V.shape[1] not in (2, 3):
        raise ParseError("vertices must be an (n, 2) or (n, 3) array")
    if V.shape[1] == 2:
        if not closed:
            raise ParseError("planar polygons are always closed here")
        return PlanarPolygon(V, tol=tol)
    return SpacePolygon(V, closed=closed, tol=tol)


def dump_polygon_json(p) -> str:
    closed = p.closed if isinstance(p, SpacePolygon) else True
    data = {"vertices": [[float(x) for x in row] for row in p.vertices],
            "closed": closed}
    return json.dumps(data, indent=2) + "\n"


# ---------------------------------------------------------------------------
# JSON complexes


def parse_complex_json(text: str, tol: Tolerances | None = None) -> PolyhedralMetric:
    """Parse ``{"dim": n, "top_simplices": [[ids]], "lengths": [[i, j, l]]}``.

    Duplicate or missing edge lengths are rejected; the metric is fully
    validated (pseudo-manifold and realizability).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    unknown = set(data) - {"dim", "top_simplices", "lengths"}
    if unknown:
        raise ParseError(f"unknown keys: {sorted(unknown)}")
    for key in ("dim", "top_simplices", "lengths"):
        if key not in data:
            raise ParseError(f"missing '{key}'")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise ParseError("'dim' must be a positive integer")
    tops = data["top_simplices"]
    if not isinstance(tops, list) or not tops:
        raise ParseError("'top_simplices' must be a non-empty list")
    for t in tops:
        if not isinstance(t, list) or len(t) != dim + 1:
            raise ParseError(f"top simplex {t} does not match dim {dim}")
    complex_ = SimplicialComplex(dim, tops)
    lengths = {}
    for entry in data["lengths"]:
        if not (isinstance(entry, list) and len(entry) == 3):
            raise ParseError(f"length entry {entry} must be [i, j, value]")
        i, j, value = entry
        if not (isinstance(i, int) and isinstance(j, int)) or i == j:
            raise ParseError(f"bad edge in length entry {entry}")
        key = (i, j) if i < j else (j, i)
        if key in lengths:
            raise ParseError(f"duplicate length for edge {key}")
        lengths[key] = float(value)
    return PolyhedralMetric(complex_, lengths, tol=tol)


def dump_complex_json(m: PolyhedralMetric) -> str:
    data = {
        "dim": m.complex.dim,
        "top_simplices": [list(t) for t in m.complex.top_simplices],
        "lengths": [[int(i), int(j), float(v)]
                    for (i, j), v in sorted(m.lengths.items())],
    }
    return json.dumps(data, indent=2) + "\n"


# ---------------------------------------------------------------------------
# CSV tables


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, tuple):
        return "-".join(str(v) for v in x)
    return str(x)


def format_csv(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([_cell(x) for x in row])
    return buf.getvalue()


def write_table(path, header, rows, fmt: str = "csv") -> None:
    """Write a table as CSV, or as a JSON list of row objects."""
    if fmt == "csv":
        text = format_csv(header, rows)
    elif fmt == "json":
        header = list(header)
        payload = [dict(zip(header, [
            float(x) if isinstance(x, (float, np.floating)) else _cell(x)
            for x in row])) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)
