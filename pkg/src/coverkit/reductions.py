"""Hardness-gadget instance generators for covers of small cubic targets.

The target throughout most of this module is the "ring" graph (see
:func:`coverkit.multigraph.ring`): the cycle ``1, 1', 2, 2', ..., k, k'``
with every ``i -- i'`` edge doubled.  A cubic simple graph covers the ring
only in very constrained ways, which makes it possible to translate
classical hard problems (cycle homomorphism, list cycle homomorphism,
4-colouring, rainbow incidence colouring) into cover-existence questions.

Building blocks
---------------
``vertex_gadget(k, deg)``
    A rigid graph (cubic except for its leaves) with ``deg`` (black, white)
    leaf pairs.  In any cover onto ``ring(k)`` all black leaves share one
    image ``m``, all white leaves share its partner ``m'``, and every
    pendant edge maps onto one of the two parallel ``m -- m'`` edges.

enforcing pairs
    ``vertex_gadget(k, 1)`` used as glue: identifying its two leaves with
    a black and a white host vertex forces the two hosts onto the two
    endpoints of a common doubled edge, each spending one dart on a
    parallel edge.

``edge_gadget``
    A stack of ``k`` cycles of length ``2k`` laced with enforcing pairs.
    It exposes two attachment pairs whose images must sit a prescribed
    number of positions apart around the ring.

All positions are measured in the cyclic order ``1, 1', 2, 2', ...``:
vertex ``i`` has position ``2(i-1)`` and ``i'`` has position ``2i - 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .constructions import split_vertex, times_k2
from .covering import CoverMap, Lists, respects_lists, verify_cover
from .multigraph import ORDINARY, Multigraph, complete_bipartite, ring
from .solver import SolveOutcome, solve

__all__ = [
    "VertexGadget",
    "vertex_gadget",
    "EdgeGadget",
    "edge_gadget",
    "Reduction",
    "reduce_ring_hom",
    "reduce_ring_list",
    "reduce_fourring",
    "reduce_rainbow",
    "lift_via_k2",
    "ring_position",
    "ring_vertex_at",
]


# ---------------------------------------------------------------------------
# ring coordinates


def ring_position(name: str) -> int:
    """Position of a ring vertex in the cyclic order ``1, 1', 2, 2', ...``.

    ``"i"`` sits at ``2(i-1)`` and ``"ip"`` at ``2i - 1``.
    """
    if name.endswith("p"):
        return 2 * int(name[:-1]) - 1
    return 2 * (int(name) - 1)


def ring_vertex_at(pos: int, k: int) -> str:
    """Inverse of :func:`ring_position` (positions taken mod ``2k``)."""
    pos %= 2 * k
    i, r = divmod(pos, 2)
    return f"{i + 1}p" if r else str(i + 1)


# ---------------------------------------------------------------------------
# graph assembly helper


class _Assembly:
    """Incrementally build one big graph from gadget templates.

    ``insert`` copies a template graph in, prefixing vertex and edge names;
    selected template vertices can instead be identified with vertices that
    already exist in the assembly (used to weld gadget leaves onto hosts).
    """

    def __init__(self):
        self.graph = Multigraph()
        # rigidity facts collected while welding couplers, reusable as
        # solver hints: vertex groups sharing one image, and (u, v, map)
        # relations tying a white host's image to its black host's image
        self.same_image: list = []
        self.image_maps: list = []
        self.image_relations: list = []
        # optional branching blocks (lists of vertex/edge names) steering
        # the solver to complete one gadget before entering the next
        self.priority: list = []

    def solver_hints(self) -> dict:
        hints = {}
        if self.same_image:
            hints["same_image"] = self.same_image
        if self.image_maps:
            hints["image_maps"] = self.image_maps
        if self.image_relations:
            hints["image_relations"] = self.image_relations
        if self.priority:
            hints["priority"] = self.priority
        return hints

    def vertex(self, v) -> None:
        if not self.graph.has_vertex(v):
            self.graph.add_vertex(v)

    def edge(self, eid, u, v) -> None:
        self.graph.add_edge(eid, ORDINARY, (u, v))

    def insert(self, template: Multigraph, prefix: str, identify: Optional[dict] = None) -> dict:
        """Copy ``template`` into the assembly; return the vertex rename map."""
        identify = identify or {}
        rename = {}
        for v in template.vertices:
            if v in identify:
                rename[v] = identify[v]
                self.vertex(identify[v])
            else:
                rename[v] = f"{prefix}{v}"
                self.vertex(rename[v])
        for e in template.edges:
            if e.kind != ORDINARY:
                raise ValueError("gadget templates must use ordinary edges only")
            u, w = e.ends
            self.edge(f"{prefix}{e.id}", rename[u], rename[w])
        return rename


# ---------------------------------------------------------------------------
# vertex gadget


@dataclass
class VertexGadget:
    """A vertex gadget template together with its leaf pairs.

    ``pairs[j] = (black_leaf, white_leaf)``.  The ``side`` map gives the
    bipartition class of every vertex (0 = the class of the black leaves).
    """

    graph: Multigraph
    pairs: List[Tuple[str, str]]
    side: Dict[str, int]


def vertex_gadget(k: int, deg: int) -> VertexGadget:
    """Rigid gadget with ``deg`` leaf pairs, for covers of ``ring(k)``.

    Two cycles of length ``2*k*deg`` are braided with crossing edges; ``deg``
    evenly spaced edges of the second cycle are replaced by pendant leaf
    pairs.  In every cover onto ``ring(k)`` the black leaves share one image
    and the white leaves share the partner image across a doubled edge.
    """
    if k < 2 or deg < 1:
        raise ValueError("need k >= 2 and deg >= 1")
    length = 2 * k * deg
    g = Multigraph()
    for row in (1, 2):
        for i in range(1, length + 1):
            g.add_vertex(f"v{row}_{i}")

    def nxt(i):
        return i % length + 1

    # first cycle, complete
    for i in range(1, length + 1):
        g.add_edge(f"c1_{i}", ORDINARY, (f"v1_{i}", f"v1_{nxt(i)}"))
    # second cycle, minus the edges (v2_{2kj-1}, v2_{2kj})
    removed = {2 * k * j - 1 for j in range(1, deg + 1)}
    for i in range(1, length + 1):
        if i in removed:
            continue
        g.add_edge(f"c2_{i}", ORDINARY, (f"v2_{i}", f"v2_{nxt(i)}"))
    # crossing edges between the cycles
    for i in range(1, length // 2 + 1):
        g.add_edge(f"x{2 * i - 1}", ORDINARY, (f"v1_{2 * i - 1}", f"v2_{2 * i}"))
        g.add_edge(f"y{2 * i - 1}", ORDINARY, (f"v2_{2 * i - 1}", f"v1_{2 * i}"))
    # pendant leaf pairs at the removed edges
    pairs = []
    side = {}
    for row in (1, 2):
        for i in range(1, length + 1):
            side[f"v{row}_{i}"] = (i + 1) % 2  # odd index -> class 0 (black)
    for j in range(1, deg + 1):
        black, white = f"B{j}", f"W{j}"
        g.add_vertex(black)
        g.add_vertex(white)
        # black leaf hangs off the even-index endpoint (a class-1 vertex)
        g.add_edge(f"pb{j}", ORDINARY, (black, f"v2_{2 * k * j}"))
        g.add_edge(f"pw{j}", ORDINARY, (white, f"v2_{2 * k * j - 1}"))
        side[black] = 0
        side[white] = 1
        pairs.append((black, white))
    return VertexGadget(g, pairs, side)


def _insert_coupler(asm: _Assembly, k: int, prefix: str, pairs: List[Tuple[str, str]]) -> List[str]:
    """Weld a vertex gadget across several (black_host, white_host) pairs.

    All black hosts are forced onto one common ring vertex ``m`` and all
    white hosts onto its doubled-edge partner ``m'``; every weld edge maps
    onto a parallel edge of that double.  These facts are recorded on the
    assembly as solver hints.
    """
    vg = vertex_gadget(k, len(pairs))
    identify = {}
    for (black, white), (bh, wh) in zip(vg.pairs, pairs):
        identify[black] = bh
        identify[white] = wh
    rename = asm.insert(vg.graph, prefix, identify=identify)
    partner = {str(i): f"{i}p" for i in range(1, k + 1)}
    if len(pairs) > 1:
        asm.same_image.append([bh for bh, _ in pairs])
    for bh, wh in pairs:
        asm.image_maps.append((bh, wh, partner))
    created = [rename[v] for v in vg.graph.vertices if v not in identify]
    created.extend(f"{prefix}{e.id}" for e in vg.graph.edges)
    return created


def _insert_enforcer(asm: _Assembly, k: int, prefix: str, black_host: str, white_host: str) -> List[str]:
    """Weld a one-pair vertex gadget between a black and a white host."""
    return _insert_coupler(asm, k, prefix, [(black_host, white_host)])


# ---------------------------------------------------------------------------
# edge gadget (prescribed position shift)


@dataclass
class EdgeGadget:
    """Attachment interface of one inserted edge gadget.

    ``first`` / ``second`` are the two attachment pairs, each a
    ``(black_host, white_host)`` tuple of assembly vertex names.
    """

    first: Tuple[str, str]
    second: Tuple[str, str]


def edge_gadget(asm: _Assembly, k: int, second: int, prefix: str) -> EdgeGadget:
    """Insert a stack of ``k`` laced cycles of length ``2k`` into ``asm``.

    The gadget exposes two attachment pairs: position ``1`` and position
    ``second`` (odd, ``3 <= second < 2k``) on the first cycle, each with a
    matching white slot on the last cycle shifted by ``k`` positions.
    """
    if second % 2 == 0 or not 3 <= second < 2 * k:
        raise ValueError("second attachment position must be odd, in [3, 2k)")
    two_k = 2 * k

    def name(j, i):
        return f"{prefix}c{j}_{((i - 1) % two_k) + 1}"

    for j in range(1, k + 1):
        for i in range(1, two_k + 1):
            asm.vertex(name(j, i))
        for i in range(1, two_k + 1):
            asm.edge(f"{prefix}e{j}_{i}", name(j, i), name(j, i % two_k + 1))

    # class of c{j}_{i} is (i + j) mod 2; class 0 is black
    def is_black(j, i):
        return (i + j) % 2 == 0

    egn = itertools.count()
    # consecutive layers tied at alternating positions
    for j in range(1, k):
        for i in range(1, two_k + 1):
            if (i + j) % 2 == 0:
                continue
            a, b = name(j, i), name(j + 1, i)
            blk, wht = (a, b) if is_black(j, i) else (b, a)
            _insert_enforcer(asm, k, f"{prefix}g{next(egn)}_", blk, wht)
    # lacing between the first and last layer
    for i in range(1, two_k, 2):
        if i in (1, second):
            continue
        a, b = name(1, i), name(k, i + k)
        blk, wht = (a, b) if is_black(1, i) else (b, a)
        _insert_enforcer(asm, k, f"{prefix}g{next(egn)}_", blk, wht)

    return EdgeGadget(
        first=(name(1, 1), name(k, 1 + k)),
        second=(name(1, second), name(k, second + k)),
    )


# ---------------------------------------------------------------------------
# reduction plumbing


@dataclass
class Reduction:
    """A generated cover instance together with its back-translation.

    ``instance``/``target``/``lists`` form the cover-existence question.
    ``back_translate`` maps a verified cover of the instance to a solution
    of the original problem (and re-checks that solution independently).
    """

    instance: Multigraph
    target: Multigraph
    lists: Optional[Lists]
    back_translate: Callable[[CoverMap], dict]
    solver_args: dict = field(default_factory=dict)

    def solve(self, **kwargs) -> SolveOutcome:
        merged = {**self.solver_args, **kwargs}
        return solve(self.instance, self.target, self.lists, **merged)


def _simple_edges(g: Multigraph):
    for e in g.edges:
        if e.kind != ORDINARY or e.ends[0] == e.ends[1]:
            raise ValueError("input must be a loop-free simple graph")
        yield e


def _weld_vertex_gadgets(asm: _Assembly, k: int, g: Multigraph, hosts: dict) -> dict:
    """Insert one vertex gadget per input vertex, leaves welded onto hosts.

    ``hosts[v]`` is the list of ``(black_host, white_host)`` attachment
    pairs collected from the edge gadgets of the edges at ``v``.  Returns
    ``anchor[v]``: the assembly vertex carrying the image of ``v``.
    """
    anchor = {}
    for v in g.vertices:
        pairs = hosts[v]
        if not pairs:
            raise ValueError(f"input vertex {v!r} is isolated")
        _insert_coupler(asm, k, f"v{v}_", pairs)
        anchor[v] = pairs[0][0]
    return anchor


# ---------------------------------------------------------------------------
# cycle homomorphism (no lists)


def _split_power_of_two(k: int) -> Tuple[int, int]:
    alpha = 0
    while k % 2 == 0:
        alpha += 1
        k //= 2
    return alpha, k


def reduce_ring_hom(g: Multigraph, k: int) -> Reduction:
    """Covers of ``ring(k)`` encode homomorphisms to an odd cycle.

    ``k`` must factor as ``2**alpha * q`` with odd ``q >= 3``.  The returned
    instance covers ``ring(k)`` exactly when ``g`` (a loop-free simple graph
    without isolated vertices) has a homomorphism to the cycle ``C_q``; the
    back-translation recovers such a homomorphism from any cover.
    """
    alpha, q = _split_power_of_two(k)
    if q < 3:
        raise ValueError("k must have an odd factor >= 3")
    step = 2 ** (alpha + 1)
    second = 1 + step
    asm = _Assembly()
    hosts = {v: [] for v in g.vertices}
    for e in _simple_edges(g):
        u, v = e.ends
        gad = edge_gadget(asm, k, second, f"E{e.id}_")
        hosts[u].append(gad.first)
        hosts[v].append(gad.second)
    anchor = _weld_vertex_gadgets(asm, k, g, hosts)

    def back_translate(cover: CoverMap) -> dict:
        hom = {}
        for comp in g.connected_components():
            ref = comp[0]
            p0 = ring_position(cover.vmap[anchor[ref]])
            for v in comp:
                d = (ring_position(cover.vmap[anchor[v]]) - p0) % (2 * k)
                if d % step:
                    raise AssertionError("cover image is off the colour grid")
                hom[v] = (d // step) % q
        for e in g.edges:
            u, v = e.ends
            if (hom[u] - hom[v]) % q not in (1, q - 1):
                raise AssertionError("back-translated map is not a homomorphism")
        return hom

    return Reduction(
        asm.graph, ring(k), None, back_translate, solver_args=asm.solver_hints()
    )


# ---------------------------------------------------------------------------
# list cycle homomorphism (k a power of two)


def reduce_ring_list(g: Multigraph, k: int, colour_lists: Dict) -> Reduction:
    """List covers of ``ring(k)`` encode list homomorphisms to ``C_k``.

    ``k`` must be a power of two, ``k >= 8``.  ``colour_lists[v]`` is an
    iterable of admissible colours in ``range(k)`` for input vertex ``v``;
    colours ``c`` and ``c + 1 (mod k)`` are adjacent in ``C_k``.  The
    instance carries vertex lists that pin each input vertex's anchor to
    the ring vertices matching its admissible colours.
    """
    alpha, q = _split_power_of_two(k)
    if q != 1 or alpha < 3:
        raise ValueError("k must be a power of two, k >= 8")
    asm = _Assembly()
    hosts = {v: [] for v in g.vertices}
    for e in _simple_edges(g):
        u, v = e.ends
        gad = edge_gadget(asm, k, 3, f"E{e.id}_")
        hosts[u].append(gad.first)
        hosts[v].append(gad.second)
    anchor = _weld_vertex_gadgets(asm, k, g, hosts)

    vertex_lists = {}
    for v in g.vertices:
        cols = sorted(set(colour_lists.get(v, range(k))))
        if not all(0 <= c < k for c in cols):
            raise ValueError("colours must lie in range(k)")
        for bh, wh in hosts[v]:
            vertex_lists[bh] = frozenset(str(c + 1) for c in cols)
            vertex_lists[wh] = frozenset(f"{c + 1}p" for c in cols)
    lists = Lists(vertex=vertex_lists)

    def back_translate(cover: CoverMap) -> dict:
        hom = {}
        for v in g.vertices:
            img = cover.vmap[anchor[v]]
            if img.endswith("p"):
                raise AssertionError("anchor image escaped its list")
            hom[v] = int(img) - 1
            if hom[v] not in set(colour_lists.get(v, range(k))):
                raise AssertionError("back-translated colour not in list")
        for e in g.edges:
            u, v = e.ends
            if (hom[u] - hom[v]) % k not in (1, k - 1):
                raise AssertionError("back-translated map is not a homomorphism")
        return hom

    return Reduction(
        asm.graph, ring(k), lists, back_translate, solver_args=asm.solver_hints()
    )


# ---------------------------------------------------------------------------
# shift gadgets and 4-colouring (k = 4)
#
# A shift gadget exposes a left and a right (black, white) attachment pair.
# In any cover onto ring(4) in which each attachment vertex additionally
# spends one dart on a parallel edge (which is how couplers weld onto them),
# the position offset from the left pair to the right pair, measured in
# doubled edges, is confined to the gadget's shift set: {1} for
# ``shift_one_gadget`` and {0, 1} for ``shift_zero_one_gadget``.  Chaining
# one {1} gadget with two {0,1} gadgets therefore allows exactly the offsets
# {1, 2, 3} — i.e. "the two ends take different colours".
#
# Internally the gadgets are built from two kinds of parts.  Plain "link"
# edges join a white vertex to a black vertex; such an edge maps either onto
# a parallel edge (offset 0) or onto the single edge following it (offset 1).
# Enforcers (one-pair vertex gadgets) pin a black and a white vertex to the
# two ends of a common double.  In ``shift_zero_one_gadget`` the link edges
# form four 8-cycles; each 8-cycle winds once around the ring, clockwise or
# anticlockwise, and the enforcer pattern between the cycles leaves exactly
# two global states with offsets 0 and 1.


@dataclass
class ShiftGadget:
    """Attachment interface of one inserted shift gadget."""

    left: Tuple[str, str]  # (black_host, white_host)
    right: Tuple[str, str]
    vertices: List[str] = field(default_factory=list)  # all chain vertices


def shift_one_gadget(asm: _Assembly, prefix: str) -> ShiftGadget:
    """Insert a gadget forcing a right-minus-left offset of exactly 1."""
    blacks = ["bL", "bR", "b0", "b1"]
    whites = ["wL", "wR", "w0", "w1"]
    for v in blacks + whites:
        asm.vertex(prefix + v)
    links = [("wL", "bR"), ("wR", "b0"), ("w0", "b1"), ("w1", "bL")]
    for n, (w, b) in enumerate(links):
        asm.edge(f"{prefix}l{n}", prefix + w, prefix + b)
    enforcers = [("bL", "wL"), ("bR", "wR"),
                 ("b0", "w0"), ("b0", "w0"), ("b1", "w1"), ("b1", "w1")]
    parts: List[str] = [prefix + v for v in blacks + whites]
    for n, (b, w) in enumerate(enforcers):
        parts += _insert_enforcer(asm, 4, f"{prefix}g{n}_", prefix + b, prefix + w)
    return ShiftGadget(left=(prefix + "bL", prefix + "wL"),
                       right=(prefix + "bR", prefix + "wR"),
                       vertices=parts)


# Enforcer pattern of the {0,1} gadget: ((black cycle, slot), (white cycle,
# slot)) with cycle j laid out b0, w0, b1, w1, b2, w2, b3, w3.  Exactly two
# covers of the welded gadget exist up to rotation: all four cycles wound
# clockwise (offset 0) or all anticlockwise (offset 1).
_ZERO_ONE_PAIRS = [
    ((1, 2), (2, 2)), ((1, 1), (2, 1)), ((2, 0), (3, 0)), ((1, 3), (2, 3)),
    ((2, 2), (3, 2)), ((0, 2), (1, 2)), ((2, 1), (3, 1)), ((3, 0), (0, 0)),
    ((0, 1), (1, 1)), ((0, 3), (1, 3)), ((2, 3), (3, 3)), ((3, 1), (0, 1)),
    ((3, 2), (0, 2)), ((3, 3), (0, 3)),
]


def shift_zero_one_gadget(asm: _Assembly, prefix: str) -> ShiftGadget:
    """Insert a gadget allowing a right-minus-left offset of 0 or 1."""

    def black(r, i):
        return f"{prefix}b{r}_{i}"

    def white(r, i):
        return f"{prefix}w{r}_{i}"

    for r in range(4):
        for i in range(4):
            asm.vertex(black(r, i))
            asm.vertex(white(r, i))
        for i in range(4):
            asm.edge(f"{prefix}l{r}_{2 * i}", black(r, i), white(r, i))
            asm.edge(f"{prefix}l{r}_{2 * i + 1}", white(r, i), black(r, (i + 1) % 4))
    parts: List[str] = [f(r, i) for r in range(4) for i in range(4)
                        for f in (black, white)]
    for n, ((br, bi), (wr, wi)) in enumerate(_ZERO_ONE_PAIRS):
        parts += _insert_enforcer(asm, 4, f"{prefix}g{n}_", black(br, bi), white(wr, wi))
    return ShiftGadget(left=(black(0, 0), white(1, 0)),
                       right=(black(1, 0), white(2, 0)),
                       vertices=parts)


def shift_gadget_table(builder: Callable[[_Assembly, str], ShiftGadget]) -> Dict[int, bool]:
    """Exhaustive offset table of an isolated shift gadget.

    The gadget is welded shut (an enforcer across each attachment pair, as a
    coupler would) and one solver call per candidate offset decides whether
    some cover realises it; the result maps each offset in ``range(4)`` to
    its feasibility.
    """
    table = {}
    for f in range(4):
        asm = _Assembly()
        gad = builder(asm, "s_")
        _insert_enforcer(asm, 4, "tL_", *gad.left)
        _insert_enforcer(asm, 4, "tR_", *gad.right)
        lists = Lists(vertex={gad.left[0]: frozenset(["1"]),
                              gad.right[0]: frozenset([ring_vertex_at(2 * f, 4)])})
        table[f] = bool(solve(asm.graph, ring(4), lists, **asm.solver_hints()))
    return table


def reduce_fourring(g: Multigraph) -> Reduction:
    """Covers of ``ring(4)`` encode proper 4-colourings.

    Each edge of ``g`` (a loop-free simple graph without isolated vertices)
    becomes a chain of one {1} gadget and two {0,1} gadgets joined by
    two-pair couplers, so the end-to-end offset ranges over {1, 2, 3} —
    exactly "endpoints differently coloured".  The back-translation reads a
    proper 4-colouring off any cover.
    """
    asm = _Assembly()
    hosts = {v: [] for v in g.vertices}
    blocks = []
    for e in _simple_edges(g):
        u, v = e.ends
        p = f"F{e.id}_"
        g1 = shift_one_gadget(asm, p + "a_")
        g2 = shift_zero_one_gadget(asm, p + "b_")
        g3 = shift_zero_one_gadget(asm, p + "c_")
        c1 = _insert_coupler(asm, 4, p + "r1_", [g1.right, g2.left])
        c2 = _insert_coupler(asm, 4, p + "r2_", [g2.right, g3.left])
        # complete the chains one edge at a time: the whole chain — carrier
        # vertices, enforcer and coupler interiors — forms one block, so a
        # contradiction inside a chain is found before other chains branch
        blocks.append(g1.vertices + c1 + g2.vertices + c2 + g3.vertices)
        hosts[u].append(g1.left)
        hosts[v].append(g3.right)
    anchor = _weld_vertex_gadgets(asm, 4, g, hosts)
    # the per-vertex anchors come first: they are the colour variables
    asm.priority = [[anchor[v] for v in g.vertices]] + blocks
    # each chain confines the anchor-to-anchor offset to {1, 2, 3} doubled
    # edges (the gadget offset tables are verified exhaustively by
    # ``shift_gadget_table``), so the anchor images must differ in position
    # pair; declaring this lets improper colourings fail at the anchors
    rv = ring(4).vertices
    differ = [
        (x, y)
        for x in rv
        for y in rv
        if ring_position(x) // 2 != ring_position(y) // 2
    ]
    for e in _simple_edges(g):
        u, v = e.ends
        asm.image_relations.append((anchor[u], anchor[v], differ))

    def back_translate(cover: CoverMap) -> dict:
        col = {
            v: ring_position(cover.vmap[anchor[v]]) // 2 for v in g.vertices
        }
        for e in g.edges:
            u, v = e.ends
            if col[u] == col[v]:
                raise AssertionError("back-translated colouring is not proper")
        return col

    return Reduction(
        asm.graph, ring(4), None, back_translate, solver_args=asm.solver_hints()
    )


# ---------------------------------------------------------------------------
# rainbow incidence colouring (list covers of a bipartite regular target)


def reduce_rainbow(incidence: Multigraph, h: Optional[Multigraph] = None) -> Reduction:
    """List covers of ``h`` encode rainbow colourings of an incidence graph.

    ``incidence`` is a simple connected bipartite graph with classes
    ``A`` (degree ``k - 1``) and ``B`` (degree ``k``); asked is a colouring
    of ``A`` with ``k`` colours such that every ``B``-vertex sees all ``k``
    colours on its neighbours.  For ``k = 3`` and ``A`` the edges, ``B`` the
    vertices of a cubic graph this is proper 3-edge-colourability.

    ``h`` must be a connected ``k``-regular bipartite simple graph with the
    self-cover property of ``complete_bipartite(3, 3)`` (the default): every
    bijection of the edges at a vertex onto the edges at any other vertex
    extends to a covering projection.  Splitting one vertex ``x`` of ``h``
    then yields a pendant gadget whose pendant vertices must map onto one
    common vertex with the pendant edges hitting its edges bijectively; the
    instance pins selected vertices onto ``x`` and reads the colouring off
    the images of their neighbours.
    """
    if h is None:
        h = complete_bipartite(3, 3)
    degs = {h.degree(v) for v in h.vertices}
    if len(degs) != 1 or any(e.kind != ORDINARY for e in h.edges):
        raise ValueError("the target must be a regular graph of ordinary edges")
    k = degs.pop()
    x = h.vertices[0]
    gadget = split_vertex(h, x)
    pendants = [gadget.pendants[eid] for eid in sorted(gadget.pendants)]
    # the target with x removed: ex-neighbours of x are left at degree k - 1
    hole = Multigraph()
    for v in h.vertices:
        if v != x:
            hole.add_vertex(v)
    for e in h.edges:
        if x not in e.ends:
            hole.add_edge(e.id, e.kind, e.ends)
    x_neighbours = h.neighbors(x)

    part_a = [v for v in incidence.vertices if incidence.degree(v) == k - 1]
    part_b = [v for v in incidence.vertices if incidence.degree(v) == k]
    if set(part_a) | set(part_b) != set(incidence.vertices):
        raise ValueError(f"vertex degrees must be {k - 1} or {k}")
    for e in _simple_edges(incidence):
        if len(set(e.ends) & set(part_a)) != 1:
            raise ValueError("every edge must join the two degree classes")

    asm = _Assembly()
    b_vertex = {}  # v in B -> its pinned hub vertex
    w_host = {}  # (v, a) -> ex-neighbour vertex awaiting its weld
    pinned = []
    for v in part_b:
        ren = asm.insert(hole, f"V{v}_")
        hub = f"B{v}"
        asm.vertex(hub)
        b_vertex[v] = hub
        pinned.append(hub)
        for a, nb in zip(incidence.neighbors(v), x_neighbours):
            w_host[(v, a)] = ren[nb]
    hub_neighbour = gadget.graph.neighbors(pendants[0])[0]
    inner = [w for w in gadget.graph.vertices if w not in pendants]
    groups = []
    # static branch order: one colour representative per A-vertex first,
    # then the gadget interiors one A-vertex block at a time, holes last.
    # Constraints only couple copies within a block (via the shared ell and
    # r vertices), so chronological backtracking stays local instead of
    # re-enumerating the free interior choices of unrelated copies.
    order = [f"R{a}_1" for a in part_a]
    for a in part_a:
        ells = [f"L{a}_{i}" for i in range(1, k)]
        rs = [f"R{a}_{i}" for i in range(1, k)]
        for lv, rv in zip(ells, rs):
            asm.vertex(lv)
            asm.vertex(rv)
            asm.edge(f"M{a}_{lv[len(f'L{a}_'):]}", lv, rv)
        pinned.extend(ells)
        # in every cover these all carry the colour of a: the split-gadget
        # pendants share one image, and the matching plus the pinned hubs
        # force the left gadgets' hub neighbours onto that same image
        group = list(rs)
        for v in incidence.neighbors(a):
            left = asm.insert(
                gadget.graph,
                f"GL{a}_{v}_",
                identify=dict(zip(pendants, [b_vertex[v]] + ells)),
            )
            right = asm.insert(
                gadget.graph,
                f"GR{a}_{v}_",
                identify=dict(zip(pendants, [w_host[(v, a)]] + rs)),
            )
            group.append(w_host[(v, a)])
            group.append(left[hub_neighbour])
            order.extend(left[w] for w in inner)
            order.extend(right[w] for w in inner)
        groups.append(group)
    for v in part_b:
        order.extend(f"V{v}_{w}" for w in hole.vertices)
    if not all(asm.graph.degree(v) == k for v in asm.graph.vertices):
        raise AssertionError("assembled instance is not regular")
    lists = Lists(vertex={v: frozenset([x]) for v in pinned})
    colours = set(x_neighbours)

    def back_translate(cover: CoverMap) -> dict:
        phi = {}
        for a in part_a:
            phi[a] = cover.vmap[f"R{a}_1"]
            if phi[a] not in colours:
                raise AssertionError("colour escaped the neighbourhood of x")
        for v in part_b:
            seen = {phi[a] for a in incidence.neighbors(v)}
            if len(seen) != k:
                raise AssertionError("neighbourhood is not rainbow coloured")
        return phi

    return Reduction(
        asm.graph,
        h,
        lists,
        back_translate,
        solver_args={"same_image": groups, "priority": order},
    )


# ---------------------------------------------------------------------------
# lifting non-bipartite targets through the product with K2


def lift_via_k2(
    g: Multigraph,
    h: Multigraph,
    lists: Optional[Lists] = None,
    solver: Optional[Callable] = None,
    **kwargs,
) -> SolveOutcome:
    """Decide list covers of a non-bipartite ``h`` via its bipartite double.

    A graph covers ``times_k2(h)`` exactly when it is bipartite and covers
    ``h``; vertex and edge lists lift to all copies of their members.  A
    non-bipartite ``g`` (in particular one with loops or semi-edges) is
    rejected immediately, without invoking the solver.  On success the
    witness is projected back to a cover of ``h`` and re-verified.
    """
    if solver is None:
        solver = solve
    if g.is_bipartite() is None:
        return SolveOutcome(status="unsat", stats={"reason": "input not bipartite"})
    lists = lists or Lists()
    doubled = times_k2(h)
    vlift = {}
    elift = {}
    for v in g.vertices:
        allowed = lists.vertex_list(v, h.vertices)
        vlift[v] = frozenset(
            dv for dv in doubled.vertices if dv.rsplit("|", 1)[0] in set(allowed)
        )
    for e in g.edge_ids:
        allowed = set(lists.edge_list(e, h.edge_ids))
        elift[e] = frozenset(
            de for de in doubled.edge_ids if de.rsplit("|", 1)[0] in allowed
        )
    out = solver(g, doubled, Lists(vertex=vlift, edge=elift), **kwargs)
    if not out:
        return out
    vmap = {v: img.rsplit("|", 1)[0] for v, img in out.witness.vmap.items()}
    emap = {e: img.rsplit("|", 1)[0] for e, img in out.witness.emap.items()}
    cover = CoverMap(vmap, emap)
    check = verify_cover(g, h, cover)
    if not check.ok:
        raise AssertionError("projected witness failed verification")
    if not respects_lists(cover, lists):
        raise AssertionError("projected witness escaped its lists")
    return SolveOutcome(status="sat", witness=cover, stats=out.stats)
