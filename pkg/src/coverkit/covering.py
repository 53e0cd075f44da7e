"""Covering projections and their verification.

A covering projection ``f : G -> H`` maps vertices to vertices and edges to
edges so that incidences are preserved and, over every vertex fiber,

* the preimage of an ordinary edge ``xy`` is a perfect matching between the
  fibers of ``x`` and ``y``,
* the preimage of a loop at ``x`` is a disjoint union of cycles spanning the
  fiber of ``x`` (a loop of ``G`` counts as a cycle of length one),
* the preimage of a semi-edge at ``x`` is a disjoint union of semi-edges and
  ordinary edges spanning the fiber of ``x``.

Equivalently: at every vertex ``v`` and for every edge ``e'`` incident to
``f(v)``, the number of edge-ends at ``v`` mapped onto ``e'`` equals the
number of ends ``e'`` has at ``f(v)``.

A *partial* covering projection keeps the same shapes but drops the spanning
requirement: matchings need not be perfect, and the loop preimage may also
contain paths.  Equivalently the edge-end map at every vertex is injective
rather than bijective.  (Both notions are checked for total functions on
``V(G)`` and ``E(G)``; "partial" refers to the fiber shapes, not to the
domain of the map.)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .multigraph import LOOP, ORDINARY, SEMI, Multigraph

__all__ = [
    "CoverMap",
    "Lists",
    "VerifyResult",
    "FiberReport",
    "compose",
    "verify_cover",
    "verify_partial_cover",
    "respects_lists",
    "fiber_report",
]


@dataclass
class CoverMap:
    """A candidate (partial) covering projection: a vertex map and an edge map,
    both total on the source graph."""

    vmap: dict
    emap: dict

    def vertex_image(self, v):
        return self.vmap[v]

    def edge_image(self, e):
        return self.emap[e]


@dataclass
class Lists:
    """List constraints: admissible target vertices per source vertex and
    admissible target edges per source edge.  A missing entry (or a ``None``
    table) means the full target set is allowed."""

    vertex: Optional[dict] = None
    edge: Optional[dict] = None

    def vertex_allowed(self, v, x) -> bool:
        if self.vertex is None or v not in self.vertex:
            return True
        return x in self.vertex[v]

    def edge_allowed(self, e, y) -> bool:
        if self.edge is None or e not in self.edge:
            return True
        return y in self.edge[e]

    def vertex_list(self, v, full):
        if self.vertex is None or v not in self.vertex:
            return set(full)
        return set(self.vertex[v])

    def edge_list(self, e, full):
        if self.edge is None or e not in self.edge:
            return set(full)
        return set(self.edge[e])


FULL = Lists()


@dataclass
class VerifyResult:
    ok: bool
    errors: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def compose(outer: CoverMap, inner: CoverMap) -> CoverMap:
    """Composition ``outer . inner`` (``inner`` maps G -> M, ``outer`` M -> H)."""
    return CoverMap(
        vmap={v: outer.vmap[m] for v, m in inner.vmap.items()},
        emap={e: outer.emap[m] for e, m in inner.emap.items()},
    )


def _check_totality(g: Multigraph, h: Multigraph, f: CoverMap, errors: list) -> bool:
    ok = True
    hv = set(h.vertices)
    he = set(h.edge_ids)
    for v in g.vertices:
        if v not in f.vmap:
            errors.append(f"vertex {v!r} has no image")
            ok = False
        elif f.vmap[v] not in hv:
            errors.append(f"vertex {v!r} maps to unknown target vertex {f.vmap[v]!r}")
            ok = False
    for e in g.edge_ids:
        if e not in f.emap:
            errors.append(f"edge {e!r} has no image")
            ok = False
        elif f.emap[e] not in he:
            errors.append(f"edge {e!r} maps to unknown target edge {f.emap[e]!r}")
            ok = False
    return ok


def _check_incidence(g: Multigraph, h: Multigraph, f: CoverMap, errors: list) -> bool:
    """Kind compatibility and endpoint consistency of the edge map."""
    ok = True
    for e in g.edges:
        img = h.edge(f.emap[e.id])
        if e.kind == SEMI and img.kind != SEMI:
            errors.append(f"semi-edge {e.id!r} maps to a {img.kind}")
            ok = False
            continue
        if e.kind == LOOP and img.kind != LOOP:
            errors.append(f"loop {e.id!r} maps to a {img.kind}")
            ok = False
            continue
        if e.kind == ORDINARY:
            u, v = e.ends
            fu, fv = f.vmap[u], f.vmap[v]
            if img.kind == ORDINARY:
                if {fu, fv} != set(img.ends):
                    errors.append(
                        f"edge {e.id!r} ends map to {fu!r},{fv!r} "
                        f"but its image {img.id!r} joins {img.ends}"
                    )
                    ok = False
            else:
                if not (fu == fv == img.ends[0]):
                    errors.append(
                        f"edge {e.id!r} maps to {img.kind} {img.id!r} at "
                        f"{img.ends[0]!r} but its ends map to {fu!r},{fv!r}"
                    )
                    ok = False
        else:
            (v,) = e.ends
            if f.vmap[v] != img.ends[0]:
                errors.append(
                    f"{e.kind} {e.id!r} at {v!r} maps to {img.id!r} at "
                    f"{img.ends[0]!r} != image {f.vmap[v]!r}"
                )
                ok = False
    return ok


def _local_end_counts(g: Multigraph, f: CoverMap, v) -> dict:
    """For each target edge, how many edge-ends at ``v`` map onto it."""
    counts: dict = {}
    for eid in g.incident(v):
        e = g.edge(eid)
        d = e.darts_at(v)
        img = f.emap[eid]
        counts[img] = counts.get(img, 0) + d
    return counts


def _check_local(
    g: Multigraph, h: Multigraph, f: CoverMap, errors: list, exact: bool
) -> bool:
    ok = True
    for v in g.vertices:
        x = f.vmap[v]
        capacity = {eid: h.edge(eid).darts_at(x) for eid in h.incident(x)}
        counts = _local_end_counts(g, f, v)
        for eid, c in counts.items():
            cap = capacity.get(eid, 0)
            if c > cap:
                errors.append(
                    f"at vertex {v!r} (over {x!r}): {c} edge-ends map onto "
                    f"{eid!r}, which has only {cap} ends there"
                )
                ok = False
        if exact:
            for eid, cap in capacity.items():
                c = counts.get(eid, 0)
                if c != cap:
                    errors.append(
                        f"at vertex {v!r} (over {x!r}): edge {eid!r} needs "
                        f"{cap} preimage ends, got {c}"
                    )
                    ok = False
    return ok


def verify_cover(g: Multigraph, h: Multigraph, f: CoverMap) -> VerifyResult:
    """Check that ``f`` is a covering projection from ``g`` onto ``h``."""
    errors: list = []
    if _check_totality(g, h, f, errors):
        ok = _check_incidence(g, h, f, errors)
        ok = _check_local(g, h, f, errors, exact=True) and ok
    return VerifyResult(not errors, errors)


def verify_partial_cover(g: Multigraph, h: Multigraph, f: CoverMap) -> VerifyResult:
    """Check that ``f`` is a partial covering projection from ``g`` to ``h``."""
    errors: list = []
    if _check_totality(g, h, f, errors):
        ok = _check_incidence(g, h, f, errors)
        ok = _check_local(g, h, f, errors, exact=False) and ok
    return VerifyResult(not errors, errors)


def respects_lists(f: CoverMap, lists: Lists) -> VerifyResult:
    errors = []
    for v, x in f.vmap.items():
        if not lists.vertex_allowed(v, x):
            errors.append(f"vertex {v!r} maps to {x!r}, not in its list")
    for e, y in f.emap.items():
        if not lists.edge_allowed(e, y):
            errors.append(f"edge {e!r} maps to {y!r}, not in its list")
    return VerifyResult(not errors, errors)


@dataclass
class FiberReport:
    """Fiber structure of a covering projection: vertex fibers, and for each
    target edge the list of source edges above it."""

    vertex_fibers: dict
    edge_fibers: dict
    fold_number: Optional[int]

    def uniform(self) -> bool:
        sizes = {len(fib) for fib in self.vertex_fibers.values()}
        return len(sizes) <= 1


def fiber_report(g: Multigraph, h: Multigraph, f: CoverMap) -> FiberReport:
    vf: dict = {x: [] for x in h.vertices}
    ef: dict = {eid: [] for eid in h.edge_ids}
    for v in g.vertices:
        vf[f.vmap[v]].append(v)
    for e in g.edge_ids:
        ef[f.emap[e]].append(e)
    sizes = {len(lst) for lst in vf.values()}
    fold = sizes.pop() if len(sizes) == 1 else None
    return FiberReport(vf, ef, fold)
