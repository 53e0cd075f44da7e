"""Graph constructions: edge colorings, colored products, multicovers,
vertex splitting, and the doubling product with a single edge.

The colored product of k-regular, k-edge-colored graphs joins coordinate
tuples once per color, pairing every vertex with its unique per-color
partner in each factor; each coordinate projection is a covering
projection and is returned alongside the product.

A multicover of a target ``h`` is a graph with a distinguished vertex ``u``
such that every bijection of the edges at ``u`` onto the edges at any target
vertex extends to a covering projection.  It is assembled from colored
products of color-permuted copies of ``h`` and grows extremely fast, so the
builder refuses oversized plans up front with the size estimate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import factorial
from typing import Optional, Sequence

import networkx as nx

from .covering import CoverMap, Lists, compose
from .multigraph import LOOP, ORDINARY, SEMI, Multigraph, complete_bipartite

__all__ = [
    "proper_edge_coloring",
    "ColoredProduct",
    "colored_product",
    "MulticoverResult",
    "multicover",
    "SplitResult",
    "split_vertex",
    "times_k2",
    "GadgetReport",
    "pendant_rigidity",
    "demand_realized",
    "verify_gadget",
]


# ---------------------------------------------------------------------------
# Proper edge coloring


def proper_edge_coloring(g: Multigraph, colors: Optional[int] = None) -> dict:
    """A proper edge coloring (edge id -> color index).

    Regular bipartite graphs are colored with exactly ``degree`` colors by
    peeling off perfect matchings; other graphs are colored by exact
    backtracking with the maximum degree, falling back to one extra color.
    """
    if any(e.kind != ORDINARY for e in g.edges):
        raise ValueError("edge coloring requires ordinary edges only")
    if not g.edges:
        return {}
    delta = max(g.degree(v) for v in g.vertices)
    want = colors if colors is not None else delta
    regular = all(g.degree(v) == delta for v in g.vertices)
    if regular and g.is_bipartite() is not None and colors is None:
        return _color_regular_bipartite(g, delta)
    out = _color_backtracking(g, want)
    if out is None and colors is None:
        out = _color_backtracking(g, delta + 1)
    if out is None:
        raise ValueError(f"graph is not {want}-edge-colorable")
    return out


def _color_regular_bipartite(g: Multigraph, k: int) -> dict:
    sides = g.is_bipartite()
    remaining = {e.id for e in g.edges}
    coloring = {}
    for c in range(k):
        nxg = nx.Graph()
        nxg.add_nodes_from(g.vertices)
        for e in g.edges:
            if e.id in remaining and not nxg.has_edge(*e.ends):
                nxg.add_edge(*e.ends, eid=e.id)
        left = {v for v in g.vertices if sides[v] == 0}
        match = nx.bipartite.maximum_matching(nxg, top_nodes=left)
        picked = {nxg.edges[v, match[v]]["eid"] for v in left if v in match}
        if len(picked) * 2 != len(g.vertices):
            raise AssertionError("internal: regular bipartite peeling failed")
        for eid in picked:
            coloring[eid] = c
            remaining.discard(eid)
    return coloring


def _color_backtracking(g: Multigraph, k: int) -> Optional[dict]:
    used = {v: set() for v in g.vertices}
    edges = sorted(g.edges, key=lambda e: e.id)
    coloring: dict = {}

    def assign(i):
        if i == len(edges):
            return True
        e = edges[i]
        u, v = e.ends
        for c in range(k):
            if c in used[u] or c in used[v]:
                continue
            used[u].add(c)
            used[v].add(c)
            coloring[e.id] = c
            if assign(i + 1):
                return True
            used[u].discard(c)
            used[v].discard(c)
            del coloring[e.id]
        return False

    return dict(coloring) if assign(0) else None


# ---------------------------------------------------------------------------
# Colored products


@dataclass
class ColoredProduct:
    graph: Multigraph
    coloring: dict  # edge id -> color
    projections: list  # CoverMap per factor


def colored_product(
    factors: Sequence[Multigraph], colorings: Optional[Sequence[dict]] = None
) -> ColoredProduct:
    """Colored product of k-regular, k-edge-colored graphs.

    Vertices are coordinate tuples; for every color, each tuple is joined to
    the tuple of its per-color partners.  Colorings are computed when not
    supplied.  Returns the product, its induced coloring, and the coordinate
    projections (each a covering projection onto its factor).
    """
    if not factors:
        raise ValueError("need at least one factor")
    if colorings is None:
        colorings = [proper_edge_coloring(f) for f in factors]
    degs = set()
    for f in factors:
        for v in f.vertices:
            degs.add(f.degree(v))
    if len(degs) != 1:
        raise ValueError("all factors must be regular of the same degree")
    k = degs.pop()
    # partner[i][c][v] = (partner vertex, edge id) via the color-c matching
    partner = []
    for f, col in zip(factors, colorings):
        maps = [dict() for _ in range(k)]
        for e in f.edges:
            c = col[e.id]
            u, v = e.ends
            for a, b in ((u, v), (v, u)):
                if a in maps[c]:
                    raise ValueError("coloring is not proper")
                maps[c][a] = (b, e.id)
        for c in range(k):
            if len(maps[c]) != len(f.vertices):
                raise ValueError(f"color {c} is not a perfect matching")
        partner.append(maps)

    prod = Multigraph()
    verts = list(itertools.product(*(f.vertices for f in factors)))
    vidx = {v: i for i, v in enumerate(verts)}
    for v in verts:
        prod.add_vertex(v)
    coloring = {}
    proj_emaps = [dict() for _ in factors]
    for u in verts:
        iu = vidx[u]
        for c in range(k):
            pieces = [partner[i][c][u[i]] for i in range(len(factors))]
            v = tuple(p[0] for p in pieces)
            iv = vidx[v]
            if iv < iu:
                continue  # matchings have no fixed points, so iv > iu
            eid = f"c{c}:{iu}-{iv}"
            prod.add_edge(eid, ORDINARY, (u, v))
            coloring[eid] = c
            for i, p in enumerate(pieces):
                proj_emaps[i][eid] = p[1]
    projections = [
        CoverMap({v: v[i] for v in verts}, proj_emaps[i])
        for i in range(len(factors))
    ]
    return ColoredProduct(prod, coloring, projections)


# ---------------------------------------------------------------------------
# Multicovers


@dataclass
class MulticoverResult:
    graph: Multigraph
    u: object
    projections: list  # CoverMaps onto the original target

    def component(self) -> Multigraph:
        for comp in self.graph.connected_components():
            if self.u in comp:
                return self.graph.induced(comp)
        raise AssertionError("distinguished vertex missing")


def multicover(h: Multigraph, max_vertices: int = 100_000) -> MulticoverResult:
    """Build a multicover of ``h`` with its distinguished vertex ``u``.

    Takes the colored product of ``k!`` color-permuted copies of ``h``, then
    the product of ``|V(h)|`` copies of that, and finally (if parallel edges
    remain) one more product with the simple complete bipartite graph
    ``K_{k,k}``.  All composed projections onto ``h`` are returned.

    The plan is refused with a ``ValueError`` carrying the size estimate when
    the final product would exceed ``max_vertices`` vertices.
    """
    if any(e.kind != ORDINARY for e in h.edges):
        raise ValueError("the target must have ordinary edges only")
    degs = {h.degree(v) for v in h.vertices}
    if len(degs) != 1:
        raise ValueError("the target must be regular")
    k = degs.pop()
    if not h.is_connected():
        raise ValueError("the target must be connected")
    n = len(h.vertices)
    est = (len(h.vertices) ** factorial(k)) ** n
    if est > max_vertices:
        raise ValueError(
            f"multicover of this target needs about {est} vertices "
            f"({len(h.vertices)}^{factorial(k) * n}), above the limit of "
            f"{max_vertices}; raise max_vertices to force the build"
        )

    base = proper_edge_coloring(h)
    perm_colorings = [
        {eid: perm[c] for eid, c in base.items()}
        for perm in itertools.permutations(range(k))
    ]
    copies = len(perm_colorings)
    stage1 = colored_product([h] * copies, perm_colorings)
    stage2 = colored_product([stage1.graph] * n, [stage1.coloring] * n)

    # projections of stage2 onto h: one per (copy of stage1, permuted copy of h)
    projections = []
    for i in range(n):
        for s in range(copies):
            projections.append(compose(stage1.projections[s], stage2.projections[i]))
    u = tuple(tuple([x] * copies) for x in h.vertices)

    graph = stage2.graph
    if _has_parallel(graph):
        kk = complete_bipartite(k, k)
        final = colored_product(
            [graph, kk], [stage2.coloring, proper_edge_coloring(kk)]
        )
        onto_stage2 = final.projections[0]
        projections = [compose(p, onto_stage2) for p in projections]
        u = (u, kk.vertices[0])
        graph = final.graph
    return MulticoverResult(graph, u, projections)


def _has_parallel(g: Multigraph) -> bool:
    seen = set()
    for e in g.edges:
        key = frozenset(e.ends)
        if key in seen:
            return True
        seen.add(key)
    return False


# ---------------------------------------------------------------------------
# Vertex splitting


@dataclass
class SplitResult:
    graph: Multigraph
    pendants: dict  # edge id -> pendant vertex

    @property
    def pendant_vertices(self):
        return list(self.pendants.values())


def split_vertex(g: Multigraph, u) -> SplitResult:
    """Split ``u`` into one pendant vertex per incident edge.

    Every edge keeps its id; each edge formerly at ``u`` now ends at its own
    new degree-1 vertex."""
    if u not in g.vertices:
        raise ValueError(f"no vertex {u!r}")
    if g.loops_at(u) or g.semis_at(u):
        raise ValueError("can only split a vertex with ordinary edges")
    out = Multigraph()
    for v in g.vertices:
        if v != u:
            out.add_vertex(v)
    pendants = {}
    for eid in g.incident(u):
        p = ("split", eid)
        out.add_vertex(p)
        pendants[eid] = p
    for e in g.edges:
        if e.id in pendants:
            a, b = e.ends
            other = b if a == u else a
            out.add_edge(e.id, ORDINARY, (pendants[e.id], other))
        else:
            out.add_edge(e.id, e.kind, e.ends)
    return SplitResult(out, pendants)


# ---------------------------------------------------------------------------
# Doubling: product with a single edge


def times_k2(g: Multigraph) -> Multigraph:
    """The tensor-style double of ``g``: two copies of every vertex; an
    ordinary edge becomes two crossing edges, a loop becomes a pair of
    parallel cross edges, and a semi-edge becomes a single cross edge."""
    out = Multigraph()
    for v in g.vertices:
        out.add_vertex(f"{v}|0")
        out.add_vertex(f"{v}|1")
    for e in g.edges:
        if e.kind == ORDINARY:
            u, v = e.ends
            out.add_edge(f"{e.id}|a", ORDINARY, (f"{u}|0", f"{v}|1"))
            out.add_edge(f"{e.id}|b", ORDINARY, (f"{u}|1", f"{v}|0"))
        elif e.kind == LOOP:
            (v,) = e.ends
            out.add_edge(f"{e.id}|a", ORDINARY, (f"{v}|0", f"{v}|1"))
            out.add_edge(f"{e.id}|b", ORDINARY, (f"{v}|0", f"{v}|1"))
        else:
            (v,) = e.ends
            out.add_edge(f"{e.id}|x", ORDINARY, (f"{v}|0", f"{v}|1"))
    return out


# ---------------------------------------------------------------------------
# Gadget verification


@dataclass
class GadgetReport:
    partial_covers: int
    pendants_agree: bool
    pendant_edges_distinct: bool
    demands: dict = field(default_factory=dict)  # (x, sigma) -> bool

    def __bool__(self):
        return (
            self.pendants_agree
            and self.pendant_edges_distinct
            and all(self.demands.values())
        )


def pendant_rigidity(gadget: Multigraph, h: Multigraph, pendants: dict):
    """Exhaustively enumerate all partial covering projections of the gadget
    and check that the pendant vertices always share one image and the
    pendant edges always receive pairwise distinct images.

    Returns (number of partial covers, pendants agree, edges distinct)."""
    from .solver import enumerate_covers

    sols = enumerate_covers(gadget, h, partial=True)
    agree = True
    distinct = True
    for f in sols:
        imgs = {f.vmap[p] for p in pendants.values()}
        if len(imgs) != 1:
            agree = False
        eimgs = [f.emap[eid] for eid in pendants]
        if len(set(eimgs)) != len(eimgs):
            distinct = False
    return len(sols), agree, distinct


def demand_realized(gadget: Multigraph, h: Multigraph, pendants: dict, x, sigma):
    """Is there a partial covering projection pinning every pendant vertex to
    ``x`` and every pendant edge ``e`` to ``sigma[e]``?"""
    from .solver import solve

    lists = Lists(
        vertex={p: [x] for p in pendants.values()},
        edge={eid: [sigma[eid]] for eid in pendants},
    )
    return solve(gadget, h, lists, partial=True)


def verify_gadget(gadget: Multigraph, h: Multigraph, pendants: dict) -> GadgetReport:
    """Full check of the three pendant-gadget properties: every (vertex,
    bijection) demand is realizable, and rigidity holds in every partial
    cover."""
    count, agree, distinct = pendant_rigidity(gadget, h, pendants)
    demands = {}
    eids = sorted(pendants)
    for x in h.vertices:
        slots = list(h.incident(x))
        if len(slots) != len(eids):
            continue
        for permuted in itertools.permutations(slots):
            sigma = dict(zip(eids, permuted))
            key = (x, tuple(permuted))
            demands[key] = bool(demand_realized(gadget, h, pendants, x, sigma))
    return GadgetReport(count, agree, distinct, demands)
