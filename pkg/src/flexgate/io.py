"""Reading and writing meshes, flexes and length bases.

Mesh JSON::

    {"vertices": [[x, y, z], ...], "faces": [[i, j, k], ...],
     "length_basis": [{"label": "1", "value": 1.0}, ...],   # optional
     "alpha": {"i-j": ["p/q", ...], ...}}                   # optional

Flex JSON: ``{"velocities": [[x, y, z], ...]}`` in mesh vertex order.
ASCII OFF carries vertices and faces only.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dehn import LengthBasis
from .errors import ParseError
from .mesh import build_polyhedron


@dataclass
class MeshDocument:
    polyhedron: object
    basis: LengthBasis = None
    alpha: dict = None


def _tokens(text):
    """Yield (line_number, tokens) for non-empty, non-comment lines."""
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def parse_off(text):
    """Return (vertices, faces) from ASCII OFF text."""
    lines = list(_tokens(text))
    if not lines:
        raise ParseError("empty OFF file", 1)
    n, toks = lines[0]
    if toks[0] != "OFF":
        raise ParseError(f"expected 'OFF' header, got {toks[0]!r}", n)
    rest = toks[1:]
    body = lines[1:]
    if not rest:
        if not body:
            raise ParseError("missing counts line", n)
        (n, rest), body = body[0], body[1:]
    try:
        nv, nf = int(rest[0]), int(rest[1])
    except (ValueError, IndexError):
        raise ParseError("counts line must hold vertex and face counts", n) from None
    if len(body) < nv + nf:
        last = body[-1][0] if body else n
        raise ParseError(f"expected {nv} vertices and {nf} faces, file ends early", last)
    verts = []
    for n, toks in body[:nv]:
        try:
            if len(toks) < 3:
                raise ValueError
            verts.append([float(t) for t in toks[:3]])
        except ValueError:
            raise ParseError("vertex line needs three numbers", n) from None
    faces = []
    for n, toks in body[nv : nv + nf]:
        try:
            k = int(toks[0])
            idx = [int(t) for t in toks[1 : 1 + k]]
        except (ValueError, IndexError):
            raise ParseError("malformed face line", n) from None
        if len(idx) != k:
            raise ParseError(f"face declares {k} vertices but lists {len(idx)}", n)
        faces.append(idx)
    return np.array(verts, dtype=float), faces


def format_off(p):
    out = ["OFF", f"{p.n_vertices} {p.n_faces} {p.n_edges}"]
    out += [" ".join(repr(float(c)) for c in v) for v in p.vertices]
    out += ["3 " + " ".join(str(int(i)) for i in f) for f in p.faces]
    return "\n".join(out) + "\n"


def _basis_from_json(doc):
    raw = doc.get("length_basis")
    if raw is None:
        return None
    try:
        return LengthBasis(tuple(str(b["label"]) for b in raw), tuple(float(b["value"]) for b in raw))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad length_basis entry: {exc}") from None


def parse_mesh_json(text, orientation="auto"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or "vertices" not in doc or "faces" not in doc:
        raise ParseError("mesh JSON needs 'vertices' and 'faces'")
    p = build_polyhedron(doc["vertices"], doc["faces"], orientation=orientation)
    alpha = doc.get("alpha")
    basis = _basis_from_json(doc)
    if alpha is not None and basis is None:
        raise ParseError("'alpha' given without 'length_basis'")
    return MeshDocument(p, basis, alpha)


def read_mesh(path, orientation="auto"):
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".off" or text.lstrip().startswith("OFF"):
        verts, faces = parse_off(text)
        return MeshDocument(build_polyhedron(verts, faces, orientation=orientation))
    return parse_mesh_json(text, orientation=orientation)


def mesh_to_json(p, basis=None, alpha=None):
    doc = {
        "vertices": [[float(c) for c in v] for v in p.vertices],
        "faces": [[int(i) for i in f] for f in p.faces],
    }
    if basis is not None:
        doc["length_basis"] = [{"label": l, "value": v} for l, v in zip(basis.labels, basis.values)]
    if alpha is not None:
        doc["alpha"] = alpha
    return doc


def write_mesh(p, path, basis=None, alpha=None):
    path = Path(path)
    if path.suffix.lower() == ".off":
        path.write_text(format_off(p))
    else:
        path.write_text(json.dumps(mesh_to_json(p, basis, alpha), indent=1) + "\n")


def read_basis(path):
    """Length basis (and optional alpha) from a JSON file shaped like the mesh block."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    basis = _basis_from_json(doc)
    if basis is None:
        raise ParseError("basis file needs 'length_basis'")
    return basis, doc.get("alpha")


def read_flex(path, n_vertices=None):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    try:
        v = np.array(doc["velocities"], dtype=float)
    except (KeyError, TypeError, ValueError):
        raise ParseError("flex JSON needs 'velocities': a list of 3-vectors") from None
    if v.ndim != 2 or v.shape[1] != 3:
        raise ParseError("velocities must be 3-vectors")
    if n_vertices is not None and len(v) != n_vertices:
        raise ParseError(f"flex has {len(v)} velocities, mesh has {n_vertices} vertices")
    return v


def flex_to_json(v):
    return {"velocities": [[float(c) for c in row] for row in np.asarray(v)]}
