"""Polynomial-time decision procedures for special target graphs.

``classify_target`` recognises the tractable targets:

* ``one-regular``  — a single ordinary edge, or one vertex with one semi-edge;
* ``two-regular``  — any connected 2-regular target (cycles including the
  loop and the digon, and open paths terminated by semi-edges);
* ``loop-semi``    — one vertex carrying one loop and one semi-edge;
* ``triple-edge``  — two vertices joined by three parallel edges (handled
  without search only when no lists are given).

``decide`` dispatches to the matching procedure and returns a verified
witness.  The 2-regular case enumerates, per source component, the at most
``2·|darts of the target|`` walk patterns fixed by the image of one dart;
the loop-plus-semi case reduces to a perfect-matching computation.
"""

from __future__ import annotations

from typing import Optional

import networkx as nx

from .covering import CoverMap, Lists, respects_lists, verify_cover
from .multigraph import LOOP, ORDINARY, SEMI, Multigraph
from .solver import SAT, UNSAT, SolveOutcome

__all__ = ["classify_target", "decide", "maximum_matching"]


def classify_target(h: Multigraph) -> Optional[str]:
    if not h.vertices or not h.is_connected():
        return None
    degs = [h.degree(v) for v in h.vertices]
    if all(d == 1 for d in degs):
        return "one-regular"
    if all(d == 2 for d in degs):
        return "two-regular"
    if len(h.vertices) == 1:
        v = h.vertices[0]
        if len(h.loops_at(v)) == 1 and len(h.semis_at(v)) == 1 and h.degree(v) == 3:
            return "loop-semi"
    if (
        len(h.vertices) == 2
        and len(h.edges) == 3
        and all(e.kind == ORDINARY for e in h.edges)
        and all(set(e.ends) == set(h.vertices) for e in h.edges)
    ):
        return "triple-edge"
    return None


def decide(g: Multigraph, h: Multigraph, lists: Optional[Lists] = None) -> SolveOutcome:
    kind = classify_target(h)
    trivial_lists = lists is None or (not lists.vertex and not lists.edge)
    if kind == "one-regular":
        return _decide_one_regular(g, h, lists or Lists())
    if kind == "two-regular":
        return _decide_two_regular(g, h, lists or Lists())
    if kind == "loop-semi":
        return _decide_loop_semi(g, h, lists or Lists())
    if kind == "triple-edge" and trivial_lists:
        return _decide_triple_edge(g, h)
    raise ValueError("no polynomial procedure applies to this target")


def _finish(g, h, vmap, emap, lists) -> SolveOutcome:
    f = CoverMap(vmap, emap)
    res = verify_cover(g, h, f)
    if not res:
        raise AssertionError(f"internal: produced an invalid witness: {res.errors}")
    if not respects_lists(f, lists):
        raise AssertionError("internal: produced witness violates the lists")
    return SolveOutcome(SAT, f)


# ---------------------------------------------------------------------------
# 1-regular targets


def _decide_one_regular(g, h, lists) -> SolveOutcome:
    h_semis = [e for e in h.edges if e.kind == SEMI]
    vmap: dict = {}
    emap: dict = {}
    for comp in g.connected_components():
        verts = sorted(comp)
        sub = g.induced(comp)
        done = False
        for cand_v, cand_e in _one_regular_candidates(sub, h, h_semis):
            f = CoverMap(cand_v, cand_e)
            if verify_cover(sub, h, f) and respects_lists(f, lists):
                vmap.update(cand_v)
                emap.update(cand_e)
                done = True
                break
        if not done:
            return SolveOutcome(UNSAT)
        del verts
    return _finish(g, h, vmap, emap, lists)


def _one_regular_candidates(sub, h, h_semis):
    edges = sub.edges
    verts = sub.vertices
    if len(edges) != 1:
        return
    e = edges[0]
    if e.kind == ORDINARY and len(verts) == 2:
        u, v = e.ends
        for he in h.edges:
            if he.kind == ORDINARY:
                x, y = he.ends
                yield {u: x, v: y}, {e.id: he.id}
                yield {u: y, v: x}, {e.id: he.id}
            elif he.kind == SEMI:
                yield {u: he.ends[0], v: he.ends[0]}, {e.id: he.id}
    elif e.kind == SEMI and len(verts) == 1:
        v = verts[0]
        for he in h_semis:
            yield {v: he.ends[0]}, {e.id: he.id}


# ---------------------------------------------------------------------------
# 2-regular targets


def _h_darts(h):
    """Darts of the target: (edge id, copy).  Loops carry two copies."""
    at = {x: [] for x in h.vertices}
    for e in h.edges:
        if e.kind == ORDINARY:
            at[e.ends[0]].append((e.id, 0))
            at[e.ends[1]].append((e.id, 1))
        elif e.kind == LOOP:
            at[e.ends[0]].append((e.id, 0))
            at[e.ends[0]].append((e.id, 1))
        else:
            at[e.ends[0]].append((e.id, 0))
    return at


def _attach(h, dart):
    eid, c = dart
    e = h.edge(eid)
    return e.ends[c] if e.kind == ORDINARY else e.ends[0]


def _traverse(h, dart):
    """Follow a dart to the far side: (next vertex, arrival dart)."""
    eid, c = dart
    e = h.edge(eid)
    if e.kind == ORDINARY:
        return e.ends[1 - c], (eid, 1 - c)
    if e.kind == LOOP:
        return e.ends[0], (eid, 1 - c)
    return e.ends[0], (eid, 0)  # a semi-edge reflects the walk


def _other_dart(darts_at, x, arrival):
    d0, d1 = darts_at[x]
    return d1 if d0 == arrival else d0


def _component_shape(sub):
    """Classify a connected degree-2 component.

    Returns ("loop", v, loop_id), ("cycle", verts, edges) with the cycle
    walked in order, or ("path", semi_a, verts, edges, semi_b).
    """
    for v in sub.vertices:
        if sub.degree(v) != 2:
            return None
    loops = [e for e in sub.edges if e.kind == LOOP]
    if loops:
        if len(sub.vertices) != 1 or len(sub.edges) != 1:
            return None
        return ("loop", sub.vertices[0], loops[0].id)
    semis = [e for e in sub.edges if e.kind == SEMI]
    if semis:
        if len(semis) != 2:
            return None
        start = semis[0]
        v = start.ends[0]
        verts = [v]
        chain = []
        prev_edge = start.id
        while True:
            nxt = [sub.edge(x) for x in sub.incident(v) if x != prev_edge]
            if len(nxt) != 1:
                return None
            e = nxt[0]
            if e.kind == SEMI:
                return ("path", start.id, verts, chain, e.id)
            if e.kind != ORDINARY:
                return None
            chain.append(e.id)
            v = e.other_end(v)
            verts.append(v)
            prev_edge = e.id
    # ordinary cycle
    v0 = sub.vertices[0]
    verts = [v0]
    chain = []
    prev_edge = None
    v = v0
    while True:
        options = [sub.edge(x) for x in sub.incident(v) if x != prev_edge]
        if prev_edge is None:
            options = [sub.edge(x) for x in sub.incident(v)[:1]]
        if not options or options[0].kind != ORDINARY:
            return None
        e = options[0]
        chain.append(e.id)
        v = e.other_end(v)
        prev_edge = e.id
        if v == v0:
            break
        verts.append(v)
    if len(chain) != len(sub.edges) or len(verts) != len(sub.vertices):
        return None
    return ("cycle", verts, chain)


def _two_regular_candidates(sub, shape, h, darts_at, all_darts):
    if shape[0] == "loop":
        _, v, le = shape
        for e in h.edges:
            if e.kind == LOOP:
                yield {v: e.ends[0]}, {le: e.id}
        return
    if shape[0] == "cycle":
        _, verts, chain = shape
        for d0 in all_darts:
            vmap = {verts[0]: _attach(h, d0)}
            emap = {chain[0]: d0[0]}
            x, arrival = _traverse(h, d0)
            ok = True
            for i in range(1, len(chain)):
                vmap[verts[i]] = x
                cont = _other_dart(darts_at, x, arrival)
                emap[chain[i]] = cont[0]
                x, arrival = _traverse(h, cont)
            if ok and x == vmap[verts[0]]:
                yield vmap, emap
        return
    _, sa, verts, chain, sb = shape
    for d0 in all_darts:
        if h.edge(d0[0]).kind != SEMI:
            continue
        x = _attach(h, d0)
        vmap = {verts[0]: x}
        emap = {sa: d0[0]}
        arrival = d0
        for i, eid in enumerate(chain):
            cont = _other_dart(darts_at, x, arrival)
            emap[eid] = cont[0]
            x, arrival = _traverse(h, cont)
            vmap[verts[i + 1]] = x
        last = _other_dart(darts_at, x, arrival)
        if h.edge(last[0]).kind != SEMI:
            continue
        emap[sb] = last[0]
        yield vmap, emap


def _decide_two_regular(g, h, lists) -> SolveOutcome:
    darts_at = _h_darts(h)
    all_darts = [d for x in h.vertices for d in darts_at[x]]
    vmap: dict = {}
    emap: dict = {}
    for comp in g.connected_components():
        sub = g.induced(comp)
        shape = _component_shape(sub)
        if shape is None:
            return SolveOutcome(UNSAT)
        found = False
        seen = set()
        for cv, ce in _two_regular_candidates(sub, shape, h, darts_at, all_darts):
            key = (tuple(sorted(cv.items())), tuple(sorted(ce.items())))
            if key in seen:
                continue
            seen.add(key)
            f = CoverMap(cv, ce)
            if verify_cover(sub, h, f) and respects_lists(f, lists):
                vmap.update(cv)
                emap.update(ce)
                found = True
                break
        if not found:
            return SolveOutcome(UNSAT)
    return _finish(g, h, vmap, emap, lists)


# ---------------------------------------------------------------------------
# one vertex, one loop, one semi-edge


def maximum_matching(g: Multigraph, eligible=None) -> list:
    """A maximum matching among the ordinary edges of ``g`` (edge ids).

    ``eligible`` optionally restricts the usable edge ids.  Parallel edges
    are collapsed; one eligible representative is kept per vertex pair.
    """
    simple = nx.Graph()
    simple.add_nodes_from(g.vertices)
    for e in g.edges:
        if e.kind != ORDINARY:
            continue
        if eligible is not None and e.id not in eligible:
            continue
        u, v = e.ends
        if not simple.has_edge(u, v):
            simple.add_edge(u, v, eid=e.id)
    pairs = nx.max_weight_matching(simple, maxcardinality=True)
    return [simple.edges[u, v]["eid"] for u, v in pairs]


def _decide_loop_semi(g, h, lists) -> SolveOutcome:
    x = h.vertices[0]
    loop_id = h.loops_at(x)[0]
    semi_id = h.semis_at(x)[0]
    hv = h.vertices
    he = h.edge_ids

    for v in g.vertices:
        if g.degree(v) != 3:
            return SolveOutcome(UNSAT)
        if x not in lists.vertex_list(v, hv):
            return SolveOutcome(UNSAT)
        if len(g.semis_at(v)) > 1:
            return SolveOutcome(UNSAT)
    for e in g.edges:
        el = lists.edge_list(e.id, he)
        if e.kind == SEMI and semi_id not in el:
            return SolveOutcome(UNSAT)
        if e.kind == LOOP and loop_id not in el:
            return SolveOutcome(UNSAT)
        if e.kind == ORDINARY and semi_id not in el and loop_id not in el:
            return SolveOutcome(UNSAT)

    # vertices whose single dart on the semi-edge is already provided
    covered = {e.ends[0] for e in g.edges if e.kind == SEMI}
    chosen = set()  # ordinary edges sent to the semi-edge

    # ordinary edges that may not use the loop are forced onto the semi-edge
    for e in g.edges:
        if e.kind != ORDINARY:
            continue
        if loop_id not in lists.edge_list(e.id, he):
            u, v = e.ends
            if u in covered or v in covered:
                return SolveOutcome(UNSAT)
            covered.update((u, v))
            chosen.add(e.id)

    remaining = [v for v in g.vertices if v not in covered]
    eligible = {
        e.id
        for e in g.edges
        if e.kind == ORDINARY
        and e.id not in chosen
        and semi_id in lists.edge_list(e.id, he)
        and e.ends[0] in remaining
        and e.ends[1] in remaining
    }
    sub = g.induced(set(remaining))
    matching = maximum_matching(sub, eligible)
    if 2 * len(matching) != len(remaining):
        return SolveOutcome(UNSAT)
    chosen.update(matching)

    vmap = {v: x for v in g.vertices}
    emap = {}
    for e in g.edges:
        if e.kind == SEMI or e.id in chosen:
            emap[e.id] = semi_id
        else:
            emap[e.id] = loop_id
    return _finish(g, h, vmap, emap, lists)


# ---------------------------------------------------------------------------
# two vertices joined by three parallel edges (no lists)


def _decide_triple_edge(g, h) -> SolveOutcome:
    if any(g.degree(v) != 3 for v in g.vertices):
        return SolveOutcome(UNSAT)
    sides = g.is_bipartite()
    if sides is None:
        return SolveOutcome(UNSAT)
    from .constructions import proper_edge_coloring

    colors = proper_edge_coloring(g)
    ha, hb = h.vertices
    h_edges = [e.id for e in h.edges]
    vmap = {v: (ha if sides[v] == 0 else hb) for v in g.vertices}
    emap = {eid: h_edges[c] for eid, c in colors.items()}
    return _finish(g, h, vmap, emap, Lists())
