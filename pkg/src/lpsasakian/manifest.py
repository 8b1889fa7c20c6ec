"""Manifest files describing a manifold, its structure and a submanifold.

The format is line oriented::

    [manifold]
    name = example3
    dimension = 3
    coordinates = x, y, z

    [frame]                    # one field per line, coordinate components
    nu1 = 0, exp(z), 0
    exp(z), exp(z), 0          # the "name =" prefix is optional
    0, 0, 1

    [metric]                   # constant g(nu_i, nu_j), one row per line
    1, 0, 0
    0, 1, 0
    0, 0, -1

    [structure]
    phi = -1, 0, 0             # row k holds the nu_k components of phi(nu_1..nu_n)
    phi = 0, -1, 0
    phi = 0, 0, 0
    xi = 0, 0, 1
    closed_eta = true

    [domain]
    x = -1, 1

    [submanifold]
    coordinates = u, v
    map = 0, u, v
    tangent_frame = 1, 0, 0    # ambient frame combination, one per line
    tangent_frame = 0, 0, 1
    D = 0, 1
    D_perp =
    orientation = xi_horizontal

    [submanifold.domain]
    u = -1, 1

``#`` starts a comment.  Errors carry 1-based line and column numbers.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .expr import ParseError, ScalarExpr, parse_expression
from .frame import ManifoldError, ManifoldSpec
from .structure import LPStructure

SECTIONS = ("manifold", "frame", "metric", "structure", "domain", "submanifold", "submanifold.domain")
_KEY_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9.]*)\s*=(.*)$")


class ManifestError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.reason = message
        self.line = line
        self.column = column
        where = f"line {line}" + (f", column {column}" if column is not None else "") + ": " if line else ""
        super().__init__(where + message)


@dataclass
class _Line:
    number: int
    key: str | None
    value: str
    offset: int  # column of the first character of value, 1-based


@dataclass
class Manifest:
    spec: ManifoldSpec
    structure: LPStructure | None = None
    submanifold: object | None = None  # Submanifold, built lazily to keep imports light
    sections: dict = field(default_factory=dict, repr=False)


def _strip_comment(text: str) -> str:
    i = text.find("#")
    return text if i < 0 else text[:i]


def _tokenize(text: str) -> dict[str, list[_Line]]:
    sections: dict[str, list[_Line]] = {}
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ManifestError("unterminated section header", number, len(line) + 1)
            name = stripped[1:-1].strip()
            if name not in SECTIONS:
                raise ManifestError(f"unknown section [{name}]", number, line.index("[") + 2)
            if name in sections:
                raise ManifestError(f"duplicate section [{name}]", number, line.index("[") + 1)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ManifestError("content before the first section header", number, 1)
        m = _KEY_RE.match(line)
        if m and not (current == "frame" and "(" in m.group(1)):
            key, value = m.group(1), m.group(2)
            sections[current].append(_Line(number, key, value, m.start(2) + 1))
        else:
            sections[current].append(_Line(number, None, line, 1))
    return sections


def _split(line: _Line) -> list[tuple[str, int]]:
    """Comma-separated items with their 1-based columns; parentheses nest."""
    items, depth, start = [], 0, 0
    text = line.value
    for i, ch in enumerate(text + ","):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            chunk = text[start:i]
            lead = len(chunk) - len(chunk.lstrip())
            items.append((chunk.strip(), line.offset + start + lead))
            start = i + 1
    if len(items) == 1 and items[0][0] == "":
        return []
    for item, col in items:
        if item == "":
            raise ManifestError("empty list item", line.number, col)
    return items


def _exprs(line: _Line, names) -> tuple[ScalarExpr, ...]:
    out = []
    for item, col in _split(line):
        try:
            # syntax first so a malformed token is reported before an unknown name
            parse_expression(item, None, line=line.number, column=col)
            out.append(parse_expression(item, names, line=line.number, column=col))
        except ParseError as exc:
            raise ManifestError(exc.reason, exc.line, exc.column) from exc
    return tuple(out)


def _numbers(line: _Line) -> list[float]:
    out = []
    for item, col in _split(line):
        try:
            expr = parse_expression(item, (), line=line.number, column=col)
        except ParseError as exc:
            raise ManifestError(f"expected a constant: {exc.reason}", exc.line, exc.column) from exc
        out.append(expr.constant_value())
    return out


def _ints(line: _Line) -> tuple[int, ...]:
    out = []
    for item, col in _split(line):
        if not re.fullmatch(r"\d+", item):
            raise ManifestError(f"expected a non-negative integer index, got {item!r}", line.number, col)
        out.append(int(item))
    return tuple(out)


def _names(line: _Line) -> tuple[str, ...]:
    out = []
    for item, col in _split(line):
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", item):
            raise ManifestError(f"invalid identifier {item!r}", line.number, col)
        out.append(item)
    return tuple(out)


def _keyed(lines: list[_Line], section: str) -> dict[str, list[_Line]]:
    out: dict[str, list[_Line]] = {}
    for ln in lines:
        if ln.key is None:
            raise ManifestError(f"expected 'key = value' in [{section}]", ln.number, 1)
        out.setdefault(ln.key, []).append(ln)
    return out


def _single(keys: dict, key: str, section: str, required=True) -> _Line | None:
    if key not in keys:
        if required:
            raise ManifestError(f"[{section}] is missing '{key}'")
        return None
    if len(keys[key]) > 1:
        raise ManifestError(f"duplicate key '{key}'", keys[key][1].number, 1)
    return keys[key][0]


def _domain(lines: list[_Line], names, section: str):
    keys = _keyed(lines, section)
    out = []
    for ln_list in keys.values():
        ln = ln_list[0]
        if ln.key not in names:
            raise ManifestError(f"domain given for unknown coordinate '{ln.key}'", ln.number, 1)
    for x in names:
        ln = _single(keys, x, section, required=False)
        if ln is None:
            out.append((-1.0, 1.0))
            continue
        vals = _numbers(ln)
        if len(vals) != 2 or not vals[0] < vals[1]:
            raise ManifestError("domain needs 'min, max' with min < max", ln.number, ln.offset)
        out.append((vals[0], vals[1]))
    return tuple(out)


def parse_manifest(text: str) -> ManifoldSpec:
    """Parse and validate the manifold part of a manifest."""
    return load_manifest(text).spec


def load_manifest(text: str) -> Manifest:
    """Parse every section of a manifest into validated objects."""
    secs = _tokenize(text)
    for required in ("manifold", "frame", "metric"):
        if required not in secs:
            raise ManifestError(f"missing section [{required}]")

    mkeys = _keyed(secs["manifold"], "manifold")
    coords_line = _single(mkeys, "coordinates", "manifold")
    coords = _names(coords_line)
    n = len(coords)
    dim_line = _single(mkeys, "dimension", "manifold", required=False)
    if dim_line is not None:
        dim = dim_line.value.strip()
        if not re.fullmatch(r"\d+", dim):
            raise ManifestError("dimension must be a positive integer", dim_line.number, dim_line.offset)
        if int(dim) != n:
            raise ManifestError(
                f"dimension mismatch: dimension = {dim} but {n} coordinates", coords_line.number, coords_line.offset
            )
    name_line = _single(mkeys, "name", "manifold", required=False)
    name = name_line.value.strip() if name_line else ""

    frame_lines = secs["frame"]
    if len(frame_lines) != n:
        ln = frame_lines[-1] if frame_lines else coords_line
        raise ManifestError(f"dimension mismatch: {len(frame_lines)} frame fields for {n} coordinates", ln.number, 1)
    frame = []
    for ln in frame_lines:
        comps = _exprs(ln, coords)
        if len(comps) != n:
            raise ManifestError(
                f"dimension mismatch: frame field has {len(comps)} components, expected {n}", ln.number, ln.offset
            )
        frame.append(comps)

    rows = []
    for ln in secs["metric"]:
        if ln.key is not None:
            raise ManifestError("metric rows are plain comma-separated numbers", ln.number, 1)
        row = _numbers(ln)
        if len(row) != n:
            raise ManifestError(f"dimension mismatch: metric row has {len(row)} entries, expected {n}", ln.number, 1)
        rows.append(row)
    if len(rows) != n:
        raise ManifestError(f"dimension mismatch: metric has {len(rows)} rows, expected {n}")

    domain = _domain(secs.get("domain", []), coords, "domain")
    try:
        spec = ManifoldSpec(coords, tuple(frame), np.array(rows), domain, name)
    except ManifoldError as exc:
        anchor = secs["metric"][0].number if "metric" in str(exc) else None
        raise ManifestError(str(exc), anchor, 1 if anchor else None) from exc

    out = Manifest(spec, sections=secs)
    if "structure" in secs:
        out.structure = _structure(secs["structure"], spec, name)
    if "submanifold" in secs:
        if out.structure is None:
            raise ManifestError("[submanifold] requires a [structure] section")
        out.submanifold = _submanifold(secs["submanifold"], secs.get("submanifold.domain", []), out.structure, name)
    return out


def _structure(lines, spec: ManifoldSpec, name: str) -> LPStructure:
    n = spec.dimension
    keys = _keyed(lines, "structure")
    unknown = set(keys) - {"phi", "xi", "closed_eta"}
    if unknown:
        ln = keys[sorted(unknown)[0]][0]
        raise ManifestError(f"unknown key '{ln.key}' in [structure]", ln.number, 1)
    phi_lines = keys.get("phi", [])
    if len(phi_lines) != n:
        raise ManifestError(f"dimension mismatch: phi has {len(phi_lines)} rows, expected {n}",
                            phi_lines[-1].number if phi_lines else None)
    phi = []
    for ln in phi_lines:
        row = _exprs(ln, spec.coordinates)
        if len(row) != n:
            raise ManifestError(f"dimension mismatch: phi row has {len(row)} entries, expected {n}", ln.number, ln.offset)
        phi.append(row)
    xi_line = _single(keys, "xi", "structure")
    xi = _exprs(xi_line, spec.coordinates)
    if len(xi) != n:
        raise ManifestError(f"dimension mismatch: xi has {len(xi)} coefficients, expected {n}", xi_line.number, xi_line.offset)
    closed = True
    cl = _single(keys, "closed_eta", "structure", required=False)
    if cl is not None:
        v = cl.value.strip().lower()
        if v not in ("true", "false"):
            raise ManifestError("closed_eta must be true or false", cl.number, cl.offset)
        closed = v == "true"
    return LPStructure(spec, tuple(phi), xi, closed, name)


def _submanifold(lines, domain_lines, st: LPStructure, name: str):
    from .submanifold import DistributionSplit, EmbeddingSpec, SubmanifoldError, build_submanifold

    keys = _keyed(lines, "submanifold")
    allowed = {"coordinates", "map", "tangent_frame", "D", "D_perp", "orientation"}
    unknown = set(keys) - allowed
    if unknown:
        ln = keys[sorted(unknown)[0]][0]
        raise ManifestError(f"unknown key '{ln.key}' in [submanifold]", ln.number, 1)
    sub_coords = _names(_single(keys, "coordinates", "submanifold"))
    map_line = _single(keys, "map", "submanifold")
    smap = _exprs(map_line, sub_coords)
    frame = tuple(_exprs(ln, sub_coords) for ln in keys.get("tangent_frame", []))
    d_line = _single(keys, "D", "submanifold")
    dp_line = _single(keys, "D_perp", "submanifold", required=False)
    d = _ints(d_line)
    dp = _ints(dp_line) if dp_line else ()
    for ln, idx in ((d_line, d), (dp_line, dp)):
        if any(i >= len(frame) for i in idx):
            raise ManifestError("distribution index out of range of tangent_frame", ln.number, ln.offset)
    orient = _single(keys, "orientation", "submanifold", required=False)
    orientation = orient.value.strip() if orient else None
    if orientation not in (None, "xi_horizontal", "xi_vertical"):
        raise ManifestError("orientation must be xi_horizontal or xi_vertical", orient.number, orient.offset)
    domain = _domain(domain_lines, sub_coords, "submanifold.domain")
    try:
        emb = EmbeddingSpec(st, sub_coords, smap, frame, domain, name + "-sub" if name else "")
        return build_submanifold(emb, DistributionSplit(d, dp, orientation))
    except SubmanifoldError as exc:
        raise ManifestError(str(exc)) from exc
