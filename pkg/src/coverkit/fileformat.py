"""Canonical text formats for graphs, list constraints, and cover maps.

All three documents are JSON objects with a ``format`` discriminator:

``covergraph/1``
    ``{"format": "covergraph/1", "vertices": [id, ...],
    "edges": [{"id": ..., "kind": "ordinary"|"loop"|"semi",
    "ends": [v] or [v, w]}, ...], "lists": <coverlists body, optional>,
    "hints": <solver-hint tables, optional>}``

    The optional ``hints`` member carries instance-specific solver guidance
    produced by the reduction builders (``same_image`` groups, ``image_maps``
    and ``image_relations`` tables, ``priority`` branching blocks), so a
    generated instance keeps its performance profile through a pipe.

``coverlists/1``
    ``{"format": "coverlists/1", "vertex": {gv: [hv, ...], ...},
    "edge": {ge: [he, ...], ...}}`` — both tables optional; a missing key
    means the full target set is admissible.

``covermap/1``
    ``{"format": "covermap/1", "vmap": {gv: hv, ...}, "emap": {ge: he, ...}}``

Parsers reject unknown kinds, dangling endpoints, and malformed shapes with
a :class:`FormatError` naming the offending position (a JSON-path-like
string such as ``edges[3].ends[1]``).
"""

from __future__ import annotations

import json
from typing import Optional, Tuple

from .covering import CoverMap, Lists
from .multigraph import LOOP, ORDINARY, SEMI, Multigraph

__all__ = [
    "FormatError",
    "parse_graph",
    "serialize_graph",
    "parse_lists",
    "serialize_lists",
    "parse_cover",
    "serialize_cover",
]

GRAPH_FORMAT = "covergraph/1"
LISTS_FORMAT = "coverlists/1"
COVER_FORMAT = "covermap/1"

_KIND_NAMES = {"ordinary": ORDINARY, "loop": LOOP, "semi": SEMI}
_NAME_KINDS = {v: k for k, v in _KIND_NAMES.items()}


class FormatError(ValueError):
    """A document failed to parse; ``position`` locates the offence."""

    def __init__(self, position: str, message: str):
        self.position = position
        super().__init__(f"{position}: {message}")


def _load(text: str, expected: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno} column {exc.colno}", exc.msg)
    if not isinstance(doc, dict):
        raise FormatError("$", "document must be a JSON object")
    fmt = doc.get("format")
    if fmt != expected:
        raise FormatError("format", f"expected {expected!r}, got {fmt!r}")
    return doc


def _str_list(doc, key, pos):
    val = doc.get(key, [])
    if not isinstance(val, list):
        raise FormatError(pos, "must be an array")
    for i, item in enumerate(val):
        if not isinstance(item, str):
            raise FormatError(f"{pos}[{i}]", "must be a string")
    return val


# ---------------------------------------------------------------------------
# graphs


def parse_graph(text: str) -> Tuple[Multigraph, Optional[Lists]]:
    """Parse a ``covergraph/1`` document into a graph and optional lists."""
    doc = _load(text, GRAPH_FORMAT)
    g = Multigraph()
    for i, v in enumerate(_str_list(doc, "vertices", "vertices")):
        if g.has_vertex(v):
            raise FormatError(f"vertices[{i}]", f"duplicate vertex {v!r}")
        g.add_vertex(v)
    edges = doc.get("edges", [])
    if not isinstance(edges, list):
        raise FormatError("edges", "must be an array")
    for i, spec in enumerate(edges):
        pos = f"edges[{i}]"
        if not isinstance(spec, dict):
            raise FormatError(pos, "must be an object")
        eid = spec.get("id")
        if not isinstance(eid, str):
            raise FormatError(f"{pos}.id", "must be a string")
        if g.has_edge(eid):
            raise FormatError(f"{pos}.id", f"duplicate edge id {eid!r}")
        kind = spec.get("kind")
        if kind not in _KIND_NAMES:
            raise FormatError(f"{pos}.kind", f"unknown kind {kind!r}")
        ends = spec.get("ends")
        if not isinstance(ends, list) or not all(
            isinstance(v, str) for v in ends
        ):
            raise FormatError(f"{pos}.ends", "must be an array of vertex ids")
        for j, v in enumerate(ends):
            if not g.has_vertex(v):
                raise FormatError(f"{pos}.ends[{j}]", f"unknown vertex {v!r}")
        try:
            g.add_edge(eid, _KIND_NAMES[kind], tuple(ends))
        except ValueError as exc:
            raise FormatError(pos, str(exc))
    lists = None
    if "lists" in doc:
        lists = _parse_lists_body(doc["lists"], "lists", g)
    return g, lists


def serialize_graph(g: Multigraph, lists: Optional[Lists] = None) -> str:
    doc = {
        "format": GRAPH_FORMAT,
        "vertices": [str(v) for v in g.vertices],
        "edges": [
            {
                "id": str(e.id),
                "kind": _NAME_KINDS[e.kind],
                "ends": [str(v) for v in e.ends],
            }
            for e in g.edges
        ],
    }
    if lists is not None and (lists.vertex or lists.edge):
        doc["lists"] = _lists_body(lists)
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# lists


def _parse_table(body, key, pos, g=None, check_keys=None):
    table = body.get(key)
    if table is None:
        return None
    if not isinstance(table, dict):
        raise FormatError(f"{pos}.{key}", "must be an object")
    out = {}
    for name, allowed in table.items():
        p = f"{pos}.{key}[{name!r}]"
        if check_keys is not None and not check_keys(name):
            raise FormatError(p, f"unknown source {name!r}")
        if not isinstance(allowed, list) or not all(
            isinstance(x, str) for x in allowed
        ):
            raise FormatError(p, "must be an array of target ids")
        out[name] = frozenset(allowed)
    return out


def _parse_lists_body(body, pos, g: Optional[Multigraph] = None) -> Lists:
    if not isinstance(body, dict):
        raise FormatError(pos, "must be an object")
    vertex = _parse_table(
        body, "vertex", pos, check_keys=g.has_vertex if g else None
    )
    edge = _parse_table(body, "edge", pos, check_keys=g.has_edge if g else None)
    return Lists(vertex=vertex, edge=edge)


def parse_lists(text: str, g: Optional[Multigraph] = None) -> Lists:
    """Parse a ``coverlists/1`` document; with ``g`` given, keys are checked."""
    doc = _load(text, LISTS_FORMAT)
    return _parse_lists_body(
        {k: doc[k] for k in ("vertex", "edge") if k in doc}, "$", g
    )


def _lists_body(lists: Lists) -> dict:
    body = {}
    if lists.vertex:
        body["vertex"] = {
            str(v): sorted(str(x) for x in xs) for v, xs in lists.vertex.items()
        }
    if lists.edge:
        body["edge"] = {
            str(e): sorted(str(y) for y in ys) for e, ys in lists.edge.items()
        }
    return body


def serialize_lists(lists: Lists) -> str:
    doc = {"format": LISTS_FORMAT}
    doc.update(_lists_body(lists))
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# cover maps


def _parse_map(doc, key):
    table = doc.get(key)
    if not isinstance(table, dict):
        raise FormatError(key, "must be an object")
    for name, target in table.items():
        if not isinstance(target, str):
            raise FormatError(f"{key}[{name!r}]", "must be a target id")
    return dict(table)


def parse_cover(text: str) -> CoverMap:
    doc = _load(text, COVER_FORMAT)
    return CoverMap(_parse_map(doc, "vmap"), _parse_map(doc, "emap"))


def serialize_cover(f: CoverMap) -> str:
    doc = {
        "format": COVER_FORMAT,
        "vmap": {str(v): str(x) for v, x in f.vmap.items()},
        "emap": {str(e): str(y) for e, y in f.emap.items()},
    }
    return json.dumps(doc, indent=2) + "\n"
