"""Multigraphs with loops and semi-edges.

A graph here is a finite multigraph whose edge set may contain, besides
ordinary edges joining two distinct vertices, *loops* (incident to a single
vertex, contributing 2 to its degree) and *semi-edges* (incident to a single
vertex, contributing 1).  Parallel edges of every kind are allowed.

Vertices and edges are identified by arbitrary hashable ids (strings in all
built-in generators).  Graphs are built by ``add_vertex``/``add_edge`` and
treated as immutable afterwards; all operations in this package construct new
graphs rather than mutating existing ones.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Optional

ORDINARY = "edge"
LOOP = "loop"
SEMI = "semi"

KINDS = (ORDINARY, LOOP, SEMI)

__all__ = [
    "ORDINARY",
    "LOOP",
    "SEMI",
    "KINDS",
    "Edge",
    "Multigraph",
    "are_isomorphic",
    "cycle",
    "open_path",
    "one_vertex",
    "triple_edge",
    "complete_bipartite",
    "k2",
    "ring",
    "sausages",
    "random_multigraph",
    "random_cubic",
]


@dataclass(frozen=True)
class Edge:
    """A single edge.  ``ends`` has two entries for ordinary edges (distinct
    vertices) and one entry for loops and semi-edges."""

    id: Hashable
    kind: str
    ends: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown edge kind {self.kind!r}")
        if self.kind == ORDINARY:
            if len(self.ends) != 2 or self.ends[0] == self.ends[1]:
                raise ValueError(
                    f"ordinary edge {self.id!r} needs two distinct endpoints"
                )
        elif len(self.ends) != 1:
            raise ValueError(f"{self.kind} {self.id!r} needs exactly one endpoint")

    def darts_at(self, v) -> int:
        """Number of edge-ends this edge places at vertex ``v``."""
        if self.kind == LOOP:
            return 2 if self.ends[0] == v else 0
        return sum(1 for u in self.ends if u == v)

    def other_end(self, v):
        if self.kind != ORDINARY:
            return self.ends[0]
        a, b = self.ends
        return b if v == a else a


class Multigraph:
    """A multigraph with loops and semi-edges."""

    def __init__(self):
        self._vertices: dict = {}  # insertion-ordered set
        self._edges: dict = {}  # id -> Edge
        self._incident: dict = {}  # vertex -> [edge ids]

    # -- construction -------------------------------------------------

    def add_vertex(self, v) -> None:
        if v in self._vertices:
            raise ValueError(f"duplicate vertex {v!r}")
        self._vertices[v] = None
        self._incident[v] = []

    def add_edge(self, eid, kind, ends) -> Edge:
        if eid in self._edges:
            raise ValueError(f"duplicate edge id {eid!r}")
        e = Edge(eid, kind, tuple(ends))
        for v in e.ends:
            if v not in self._vertices:
                raise ValueError(f"edge {eid!r} references unknown vertex {v!r}")
        self._edges[eid] = e
        for v in set(e.ends):
            self._incident[v].append(eid)
        return e

    # -- basic queries ------------------------------------------------

    @property
    def vertices(self) -> list:
        return list(self._vertices)

    @property
    def edges(self) -> list:
        return list(self._edges.values())

    @property
    def edge_ids(self) -> list:
        return list(self._edges)

    def edge(self, eid) -> Edge:
        return self._edges[eid]

    def has_vertex(self, v) -> bool:
        return v in self._vertices

    def has_edge(self, eid) -> bool:
        return eid in self._edges

    def num_vertices(self) -> int:
        return len(self._vertices)

    def num_edges(self) -> int:
        return len(self._edges)

    def incident(self, v) -> list:
        """Ids of edges having at least one end at ``v`` (insertion order)."""
        return list(self._incident[v])

    def degree(self, v) -> int:
        """Ordinary edges and semi-edges count once, loops twice."""
        return sum(self._edges[e].darts_at(v) for e in self._incident[v])

    def loops_at(self, v) -> list:
        return [e for e in self._incident[v] if self._edges[e].kind == LOOP]

    def semis_at(self, v) -> list:
        return [e for e in self._incident[v] if self._edges[e].kind == SEMI]

    def ordinary_at(self, v) -> list:
        return [e for e in self._incident[v] if self._edges[e].kind == ORDINARY]

    def neighbors(self, v) -> list:
        """Distinct other-endpoints of ordinary edges at ``v``."""
        seen = {}
        for eid in self._incident[v]:
            e = self._edges[eid]
            if e.kind == ORDINARY:
                seen[e.other_end(v)] = None
        return list(seen)

    def multiplicity(self, u, v) -> int:
        """Number of parallel ordinary edges between distinct ``u`` and ``v``."""
        return sum(
            1
            for eid in self._incident[u]
            if self._edges[eid].kind == ORDINARY and self._edges[eid].other_end(u) == v
        )

    def is_regular(self, k: Optional[int] = None):
        degs = {self.degree(v) for v in self._vertices}
        if len(degs) > 1:
            return False
        if not degs:
            return True
        return (k is None) or degs == {k}

    # -- vertex classification -----------------------------------------

    def classify_vertex(self, v) -> str:
        """``"simple"``: no loop, no parallel edges, no semi-edge.
        ``"semi-simple"``: no loop, no parallel edges, at most one semi-edge.
        ``"general"`` otherwise."""
        if self.loops_at(v):
            return "general"
        if any(self.multiplicity(v, u) > 1 for u in self.neighbors(v)):
            return "general"
        semis = len(self.semis_at(v))
        if semis == 0:
            return "simple"
        if semis == 1:
            return "semi-simple"
        return "general"

    # -- structure -----------------------------------------------------

    def is_bipartite(self) -> Optional[dict]:
        """2-coloring of the vertices (``{v: 0|1}``) if the graph has no
        loops, no semi-edges and no odd cycle; ``None`` otherwise."""
        if any(e.kind != ORDINARY for e in self._edges.values()):
            return None
        color: dict = {}
        for root in self._vertices:
            if root in color:
                continue
            color[root] = 0
            stack = [root]
            while stack:
                v = stack.pop()
                for eid in self._incident[v]:
                    u = self._edges[eid].other_end(v)
                    if u not in color:
                        color[u] = 1 - color[v]
                        stack.append(u)
                    elif color[u] == color[v]:
                        return None
        return color

    def connected_components(self) -> list:
        """List of vertex-sets (insertion-ordered lists), one per component."""
        seen = set()
        comps = []
        for root in self._vertices:
            if root in seen:
                continue
            comp = [root]
            seen.add(root)
            stack = [root]
            while stack:
                v = stack.pop()
                for eid in self._incident[v]:
                    e = self._edges[eid]
                    for u in e.ends:
                        if u not in seen:
                            seen.add(u)
                            comp.append(u)
                            stack.append(u)
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return len(self.connected_components()) <= 1

    def induced(self, keep: Iterable) -> "Multigraph":
        """Subgraph induced on the vertex set ``keep`` (edges with all ends
        inside are retained, ids preserved)."""
        keep = set(keep)
        g = Multigraph()
        for v in self._vertices:
            if v in keep:
                g.add_vertex(v)
        for e in self._edges.values():
            if all(v in keep for v in e.ends):
                g.add_edge(e.id, e.kind, e.ends)
        return g

    def __repr__(self):
        return f"<Multigraph {self.num_vertices()} vertices, {self.num_edges()} edges>"


# ---------------------------------------------------------------------------
# Isomorphism


def _vertex_signature(g: Multigraph, v):
    mults = sorted(g.multiplicity(v, u) for u in g.neighbors(v))
    return (
        g.degree(v),
        len(g.loops_at(v)),
        len(g.semis_at(v)),
        tuple(mults),
    )


def are_isomorphic(g: Multigraph, h: Multigraph) -> Optional[dict]:
    """Vertex bijection realizing an isomorphism, or ``None``.

    Semi-edges at one vertex are interchangeable, as are parallel edges and
    loops, so a vertex bijection preserving loop/semi counts and ordinary
    multiplicities determines an isomorphism.
    """
    if g.num_vertices() != h.num_vertices() or g.num_edges() != h.num_edges():
        return None
    gs = {v: _vertex_signature(g, v) for v in g.vertices}
    hs = {v: _vertex_signature(h, v) for v in h.vertices}
    if sorted(gs.values()) != sorted(hs.values()):
        return None

    gv = sorted(g.vertices, key=lambda v: (gs[v], str(v)))
    mapping: dict = {}
    used = set()

    def compatible(v, w):
        if gs[v] != hs[w]:
            return False
        for u, x in mapping.items():
            if g.multiplicity(v, u) != h.multiplicity(w, x):
                return False
        return True

    def extend(i):
        if i == len(gv):
            return True
        v = gv[i]
        for w in h.vertices:
            if w in used or not compatible(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if extend(i + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return dict(mapping) if extend(0) else None


# ---------------------------------------------------------------------------
# Generators


def cycle(n: int) -> Multigraph:
    """Cycle on ``n`` vertices: a loop for n=1, a pair of parallel edges for
    n=2, an ordinary cycle otherwise."""
    if n < 1:
        raise ValueError("cycle needs n >= 1")
    g = Multigraph()
    for i in range(1, n + 1):
        g.add_vertex(f"v{i}")
    if n == 1:
        g.add_edge("e1", LOOP, ("v1",))
    elif n == 2:
        g.add_edge("e1", ORDINARY, ("v1", "v2"))
        g.add_edge("e2", ORDINARY, ("v1", "v2"))
    else:
        for i in range(1, n + 1):
            j = i % n + 1
            g.add_edge(f"e{i}", ORDINARY, (f"v{i}", f"v{j}"))
    return g


def open_path(n: int) -> Multigraph:
    """Path on ``n`` vertices with one semi-edge at each end vertex, so every
    vertex has degree 2.  For n=1 this is a single vertex with two semi-edges."""
    if n < 1:
        raise ValueError("open_path needs n >= 1")
    g = Multigraph()
    for i in range(1, n + 1):
        g.add_vertex(f"v{i}")
    g.add_edge("s1", SEMI, ("v1",))
    for i in range(1, n):
        g.add_edge(f"e{i}", ORDINARY, (f"v{i}", f"v{i+1}"))
    g.add_edge("s2", SEMI, (f"v{n}",))
    return g


def one_vertex(semis: int, loops: int) -> Multigraph:
    """Single vertex carrying the given numbers of semi-edges and loops."""
    g = Multigraph()
    g.add_vertex("v")
    for i in range(1, semis + 1):
        g.add_edge(f"s{i}", SEMI, ("v",))
    for i in range(1, loops + 1):
        g.add_edge(f"l{i}", LOOP, ("v",))
    return g


def triple_edge() -> Multigraph:
    """Two vertices joined by three parallel edges."""
    g = Multigraph()
    g.add_vertex("a")
    g.add_vertex("b")
    for i in range(1, 4):
        g.add_edge(f"e{i}", ORDINARY, ("a", "b"))
    return g


def complete_bipartite(m: int, n: int) -> Multigraph:
    g = Multigraph()
    for i in range(1, m + 1):
        g.add_vertex(f"a{i}")
    for j in range(1, n + 1):
        g.add_vertex(f"b{j}")
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            g.add_edge(f"e{i}_{j}", ORDINARY, (f"a{i}", f"b{j}"))
    return g


def k2() -> Multigraph:
    g = Multigraph()
    g.add_vertex("a")
    g.add_vertex("b")
    g.add_edge("e1", ORDINARY, ("a", "b"))
    return g


def ring(k: int) -> Multigraph:
    """Cubic bipartite graph on ``2k`` vertices: the cycle
    ``1, 1', 2, 2', ..., k, k'`` with every edge ``i -- i'`` doubled.

    Vertices are named ``"1".."k"`` and ``"1p".."kp"``; the doubled edges are
    ``d{i}a``/``d{i}b`` and the single edges ``s{i}`` join ``ip`` to ``i+1``.
    """
    if k < 2:
        raise ValueError("ring needs k >= 2")
    g = Multigraph()
    for i in range(1, k + 1):
        g.add_vertex(str(i))
        g.add_vertex(f"{i}p")
    for i in range(1, k + 1):
        g.add_edge(f"d{i}a", ORDINARY, (str(i), f"{i}p"))
        g.add_edge(f"d{i}b", ORDINARY, (str(i), f"{i}p"))
        g.add_edge(f"s{i}", ORDINARY, (f"{i}p", str(i % k + 1)))
    return g


def _sausage(k: int, first_double: bool, left_end: str, right_end: str) -> Multigraph:
    g = Multigraph()
    for i in range(1, k + 1):
        g.add_vertex(f"v{i}")
    double = first_double
    for i in range(1, k):
        g.add_edge(f"e{i}a", ORDINARY, (f"v{i}", f"v{i+1}"))
        if double:
            g.add_edge(f"e{i}b", ORDINARY, (f"v{i}", f"v{i+1}"))
        double = not double
    for name, v, deco in (("L", "v1", left_end), ("R", f"v{k}", right_end)):
        if deco == "loop":
            g.add_edge(f"{name}loop", LOOP, (v,))
        elif deco == "semi":
            g.add_edge(f"{name}semi", SEMI, (v,))
        else:  # two semi-edges
            g.add_edge(f"{name}semi1", SEMI, (v,))
            g.add_edge(f"{name}semi2", SEMI, (v,))
    return g


def sausages(k: int) -> list:
    """All pairwise non-isomorphic cubic "sausages" on ``k`` vertices: a path
    with every other edge doubled, padded to 3-regularity at the two ends
    (one semi-edge next to a doubled end edge; a loop or two semi-edges next
    to a single end edge)."""
    if k < 2:
        raise ValueError("sausages need k >= 2")
    out: list = []
    for first_double in (True, False):
        last_double = first_double if (k - 1) % 2 == 1 else not first_double
        left_opts = ("semi",) if first_double else ("loop", "semi2")
        right_opts = ("semi",) if last_double else ("loop", "semi2")
        for left, right in itertools.product(left_opts, right_opts):
            cand = _sausage(k, first_double, left, right)
            if not any(are_isomorphic(cand, seen) for seen in out):
                out.append(cand)
    return out


# ---------------------------------------------------------------------------
# Random instances (used by the test corpora and the CLI generator)


def random_multigraph(
    n: int,
    rng: random.Random,
    max_degree: int = 3,
    p_loop: float = 0.1,
    p_semi: float = 0.15,
) -> Multigraph:
    """Random multigraph on ``n`` vertices with degrees at most ``max_degree``."""
    g = Multigraph()
    for i in range(1, n + 1):
        g.add_vertex(f"v{i}")
    eid = itertools.count(1)
    slots = {v: max_degree for v in g.vertices}
    verts = g.vertices
    for v in verts:
        while slots[v] > 0:
            r = rng.random()
            if r < p_loop and slots[v] >= 2:
                g.add_edge(f"e{next(eid)}", LOOP, (v,))
                slots[v] -= 2
            elif r < p_loop + p_semi:
                g.add_edge(f"e{next(eid)}", SEMI, (v,))
                slots[v] -= 1
            else:
                cands = [u for u in verts if u != v and slots[u] > 0]
                if not cands:
                    break
                u = rng.choice(cands)
                g.add_edge(f"e{next(eid)}", ORDINARY, (v, u))
                slots[v] -= 1
                slots[u] -= 1
            if rng.random() < 0.25:  # leave some vertices below max degree
                break
    return g


def random_cubic(n: int, rng: random.Random) -> Multigraph:
    """Random 3-regular multigraph (loops, semi-edges and parallel edges
    allowed) via random dart pairing; a leftover dart becomes a semi-edge."""
    darts = [f"v{i}" for i in range(1, n + 1) for _ in range(3)]
    rng.shuffle(darts)
    g = Multigraph()
    for i in range(1, n + 1):
        g.add_vertex(f"v{i}")
    eid = itertools.count(1)
    while len(darts) >= 2:
        a = darts.pop()
        if rng.random() < 0.12:
            g.add_edge(f"e{next(eid)}", SEMI, (a,))
            continue
        b = darts.pop()
        if a == b:
            g.add_edge(f"e{next(eid)}", LOOP, (a,))
        else:
            g.add_edge(f"e{next(eid)}", ORDINARY, (a, b))
    for a in darts:
        g.add_edge(f"e{next(eid)}", SEMI, (a,))
    return g
