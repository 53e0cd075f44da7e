"""Exact search for (list) covering projections.

``solve`` / ``enumerate_covers`` run a deterministic backtracking search over
vertex and edge images with unit propagation:

* incidence arc-consistency between every edge variable and its endpoint
  variables,
* degree/kind filtering of the initial domains,
* at every vertex with a decided image, a bipartite-matching feasibility test
  of the edge-end assignment (failing early when the local bijection can no
  longer be completed),
* optional pinning of whole source components to one target component.

Every pruning rule can be disabled individually (``disable_rules``) without
changing verdicts; solutions are always re-checked by the shared verifier.

``brute_force`` is an intentionally independent oracle: a naive enumeration
of vertex and edge images in insertion order, pruned only by incidence and
end-capacity counts, with every full candidate confirmed by the verifier.
"""

from __future__ import annotations

import heapq
import itertools
import sys
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .covering import CoverMap, Lists, verify_cover, verify_partial_cover
from .multigraph import LOOP, ORDINARY, SEMI, Multigraph

__all__ = [
    "SolveOutcome",
    "solve",
    "enumerate_covers",
    "brute_force",
    "vertex_orbits",
]

SAT = "sat"
UNSAT = "unsat"
LIMIT = "limit"


@dataclass
class SolveOutcome:
    status: str
    witness: Optional[CoverMap] = None
    stats: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == SAT


class _Limit(Exception):
    pass


def _bits(mask: int) -> Iterator[int]:
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def _kuhn(adj: list, n_right: int) -> int:
    """Maximum bipartite matching size; ``adj[i]`` lists right nodes."""
    match_r = [-1] * n_right
    size = 0

    def try_augment(i, seen):
        for r in adj[i]:
            if r in seen:
                continue
            seen.add(r)
            if match_r[r] == -1 or try_augment(match_r[r], seen):
                match_r[r] = i
                return True
        return False

    for i in range(len(adj)):
        if try_augment(i, set()):
            size += 1
    return size


class _Engine:
    def __init__(
        self,
        g: Multigraph,
        h: Multigraph,
        lists: Optional[Lists],
        partial: bool,
        disable_rules: frozenset,
        symmetry_break: bool,
        same_image=None,
        image_maps=None,
        image_relations=None,
        priority=None,
    ):
        self.g = g
        self.h = h
        self.partial = partial
        self.rules = disable_rules
        lists = lists or Lists()

        # --- target indexing -------------------------------------------
        self.hv = h.vertices
        self.hv_idx = {x: i for i, x in enumerate(self.hv)}
        self.he = h.edge_ids
        self.he_idx = {e: i for i, e in enumerate(self.he)}
        self.h_kind = [h.edge(e).kind for e in self.he]
        self.h_ends = [
            tuple(self.hv_idx[x] for x in h.edge(e).ends) for e in self.he
        ]
        nhv, nhe = len(self.hv), len(self.he)
        self.h_inc_mask = [0] * nhv  # edges having an end at x
        self.h_caps = [dict() for _ in range(nhv)]  # x -> {j: ends at x}
        for j, e in enumerate(self.he):
            for xi in set(self.h_ends[j]):
                self.h_inc_mask[xi] |= 1 << j
                self.h_caps[xi][j] = h.edge(e).darts_at(self.hv[xi])
        self.h_deg = [h.degree(x) for x in self.hv]
        self.h_nloops = [len(h.loops_at(x)) for x in self.hv]
        self.h_nsemis = [len(h.semis_at(x)) for x in self.hv]
        # per target edge: endpoint bitmasks (equal for loops/semi-edges)
        self.h_end_bits = []
        for j in range(nhe):
            if self.h_kind[j] == ORDINARY:
                x, y = self.h_ends[j]
            else:
                x = y = self.h_ends[j][0]
            self.h_end_bits.append((1 << x, 1 << y))

        # --- source indexing -------------------------------------------
        self.gv = g.vertices
        self.gv_idx = {v: i for i, v in enumerate(self.gv)}
        self.ge = g.edge_ids
        self.nv = len(self.gv)
        self.g_kind = [g.edge(e).kind for e in self.ge]
        self.g_ends = [
            tuple(self.gv_idx[v] for v in g.edge(e).ends) for e in self.ge
        ]
        self.g_inc = [[] for _ in range(self.nv)]  # vertex -> edge vars
        for k, e in enumerate(self.ge):
            for vi in set(self.g_ends[k]):
                self.g_inc[vi].append(k)

        # --- same-image groups -------------------------------------------
        # Vertex groups declared to share one image in every solution;
        # their domains are kept intersected (overlapping groups merged).
        self.groups: list = []
        self.group_of = [None] * self.nv
        for grp in same_image or ():
            idxs = {self.gv_idx[v] for v in grp}
            hit = {self.group_of[i] for i in idxs if self.group_of[i] is not None}
            for gi in hit:
                idxs |= set(self.groups[gi])
                self.groups[gi] = []
            gi = len(self.groups)
            self.groups.append(sorted(idxs))
            for i in idxs:
                self.group_of[i] = gi

        # --- pairwise image relations --------------------------------------
        # (u, v, mapping): in every solution img(v) == mapping[img(u)].
        # Stored as target-bitmask translation tables in both directions.
        self.vlinks = [[] for _ in range(self.nv)]

        def _add_relation(u, v, pairs):
            fwd = [0] * nhv
            bwd = [0] * nhv
            for x, y in pairs:
                xi, yi = self.hv_idx[x], self.hv_idx[y]
                fwd[xi] |= 1 << yi
                bwd[yi] |= 1 << xi
            self.vlinks[self.gv_idx[u]].append((self.gv_idx[v], fwd))
            self.vlinks[self.gv_idx[v]].append((self.gv_idx[u], bwd))

        for u, v, mapping in image_maps or ():
            _add_relation(u, v, mapping.items())
        for u, v, pairs in image_relations or ():
            _add_relation(u, v, pairs)
        # Branching blocks: variables (vertex names or edge ids) grouped so
        # that each block is fully assigned before the next one is entered,
        # with smallest-domain-first selection inside the open block.  A flat
        # list means one variable per block, i.e. a strict order.  This keeps
        # backtracking local to one gadget of a larger rigid construction.
        ge_idx = {e: k for k, e in enumerate(self.ge)}

        def _resolve(name):
            if name in self.gv_idx:
                return self.gv_idx[name]
            return self.nv + ge_idx[name]

        priority = list(priority or ())
        if priority and not isinstance(priority[0], (list, tuple)):
            priority = [[name] for name in priority]
        self.prio = [[_resolve(name) for name in block] for block in priority]
        self.prio_lo = 0

        # --- initial domains -------------------------------------------
        full_v = (1 << nhv) - 1
        full_e = (1 << nhe) - 1
        self.vdom = []
        for vi, v in enumerate(self.gv):
            mask = 0
            allowed = lists.vertex_list(v, self.hv)
            deg = g.degree(v)
            nl, ns = len(g.loops_at(v)), len(g.semis_at(v))
            for xi, x in enumerate(self.hv):
                if x not in allowed:
                    continue
                if "degree" not in self.rules:
                    if partial:
                        if deg > self.h_deg[xi]:
                            continue
                    elif deg != self.h_deg[xi]:
                        continue
                    if nl > self.h_nloops[xi] or ns > self.h_nsemis[xi]:
                        continue
                mask |= 1 << xi
            self.vdom.append(mask)
        self.edom = []
        for k, e in enumerate(self.ge):
            mask = 0
            allowed = lists.edge_list(e, self.he)
            kind = self.g_kind[k]
            for j, he in enumerate(self.he):
                if he not in allowed:
                    continue
                if kind == SEMI and self.h_kind[j] != SEMI:
                    continue
                if kind == LOOP and self.h_kind[j] != LOOP:
                    continue
                mask |= 1 << j
            self.edom.append(mask)

        # --- components -------------------------------------------------
        self.g_comp = {}  # vertex var -> component id
        for ci, comp in enumerate(g.connected_components()):
            for v in comp:
                self.g_comp[self.gv_idx[v]] = ci
        self.n_comps = len(g.connected_components())
        h_comps = h.connected_components()
        self.h_single_comp = len(h_comps) <= 1
        self.h_comp_vmask = []
        self.h_comp_emask = []
        for comp in h_comps:
            vm = 0
            for x in comp:
                vm |= 1 << self.hv_idx[x]
            em = 0
            for j in range(nhe):
                if all((vm >> xi) & 1 for xi in self.h_ends[j]):
                    em |= 1 << j
            self.h_comp_vmask.append(vm)
            self.h_comp_emask.append(em)
        self.h_comp_of = {}
        for ci, comp in enumerate(h_comps):
            for x in comp:
                self.h_comp_of[self.hv_idx[x]] = ci
        self.comp_assigned = [0] * self.n_comps
        for var in range(self.nv):
            if self.vdom[var].bit_count() == 1:
                self.comp_assigned[self.g_comp[var]] += 1
        self.comp_pinned = [False] * self.n_comps

        # --- bipartite class structure -------------------------------------
        # When the target is bipartite, any (partial) cover maps the two
        # classes of each source component onto the two target classes, one
        # way or the other.  Once a component's first vertex is assigned the
        # choice is fixed and every domain in the component can be halved.
        self.side_mask = None
        self.g_side = None
        self.comp_sided = [False] * self.n_comps
        if "bipartite" not in self.rules:
            h_col = h.is_bipartite()
            if h_col is not None:
                g_col = g.is_bipartite()
                if g_col is None:
                    # an odd closed walk cannot project into a bipartite target
                    self.vdom = [0] * self.nv
                else:
                    m0 = 0
                    for x, c in h_col.items():
                        if c == 0:
                            m0 |= 1 << self.hv_idx[x]
                    self.side_mask = (m0, full_v ^ m0)
                    self.g_side = [g_col[v] for v in self.gv]

        # --- symmetry orbits ---------------------------------------------
        # First decision per source component: restrict to orbit
        # representatives under Aut(H).  Second decision (if the first was a
        # vertex and no edge decision intervened): restrict to orbit
        # representatives under the stabiliser of the first image.  Any
        # solution can be composed with a target automorphism fixing the
        # earlier decision values, so one representative per orbit suffices.
        self.full_v = full_v
        self.anchor_mask = full_v
        self.h_autos = None
        self._stab_cache: dict = {}
        if symmetry_break:
            autos = vertex_automorphisms(h)
            self.h_autos = [
                tuple(self.hv_idx[p[x]] for x in self.hv) for p in autos
            ]
            reps = 0
            for b in range(nhv):
                if all(p[b] >= b for p in self.h_autos):
                    reps |= 1 << b
            self.anchor_mask = reps
        self.comp_decisions = [0] * self.n_comps
        self.comp_anchor = [None] * self.n_comps
        self.e_comp = [self.g_comp[ends[0]] for ends in self.g_ends]

        # --- parallel pair classes of the target ---------------------------
        # masks of two-edge bundles of ordinary parallel target edges; source
        # edges confined to such a bundle must alternate around source cycles
        by_ends = {}
        for j in range(nhe):
            if self.h_kind[j] == ORDINARY:
                by_ends.setdefault(tuple(sorted(self.h_ends[j])), []).append(j)
        self.pair_masks = {
            (1 << js[0]) | (1 << js[1]) for js in by_ends.values() if len(js) == 2
        }
        self.nv_unassigned = sum(1 for d in self.vdom if d.bit_count() > 1)

        # --- search state --------------------------------------------------
        self.trail = []  # (kind, payload)
        self.queue = []
        self.heap = []
        self.nodes = 0
        self.last_conflict = None
        for var in range(self.nv + len(self.ge)):
            self._push_heap(var)

    # -- domains ----------------------------------------------------------

    def _dom(self, var):
        return self.vdom[var] if var < self.nv else self.edom[var - self.nv]

    def _stab_narrow(self, x0, dom):
        """Orbit representatives of ``dom`` under the stabiliser of x0.

        A value is dropped when some stabiliser element maps it to a smaller
        value that is still in ``dom``; by group closure every solution can
        be composed with a stabiliser element so that the branched value is
        the minimum of its reachable-within-``dom`` orbit.
        """
        stab = self._stab_cache.get(x0)
        if stab is None:
            stab = [p for p in self.h_autos if p[x0] == x0 and any(
                p[i] != i for i in range(len(p)))]
            self._stab_cache[x0] = stab
        if not stab:
            return dom
        kept = 0
        m = dom
        while m:
            low = m & -m
            m ^= low
            b = low.bit_length() - 1
            if all(p[b] >= b or not (dom >> p[b]) & 1 for p in stab):
                kept |= low
        return kept

    def _push_heap(self, var):
        d = self._dom(var)
        cnt = d.bit_count()
        if cnt > 1:
            heapq.heappush(self.heap, (var >= self.nv, cnt, var))

    def _set(self, var, mask) -> bool:
        """Shrink a domain; returns False on wipeout."""
        if var < self.nv:
            old = self.vdom[var]
            if mask == old:
                return True
            self.trail.append(("v", var, old))
            self.vdom[var] = mask
            if mask == 0:
                return False
            if mask.bit_count() == 1 and old.bit_count() > 1:
                self.nv_unassigned -= 1
                ci = self.g_comp[var]
                self.comp_assigned[ci] += 1
                self.trail.append(("ca", ci))
        else:
            k = var - self.nv
            old = self.edom[k]
            if mask == old:
                return True
            self.trail.append(("e", k, old))
            self.edom[k] = mask
            if mask == 0:
                return False
        self.queue.append(var)
        self._push_heap(var)
        return True

    def _undo(self, mark):
        while len(self.trail) > mark:
            entry = self.trail.pop()
            tag = entry[0]
            if tag == "v":
                _, var, old = entry
                if old.bit_count() > 1 and self.vdom[var].bit_count() == 1:
                    self.nv_unassigned += 1
                self.vdom[var] = old
                self._push_heap(var)
            elif tag == "e":
                _, k, old = entry
                self.edom[k] = old
                self._push_heap(k + self.nv)
            elif tag == "ca":
                self.comp_assigned[entry[1]] -= 1
            elif tag == "cs":
                self.comp_sided[entry[1]] = False
            else:  # "cp"
                self.comp_pinned[entry[1]] = False
        self.queue.clear()

    # -- propagation --------------------------------------------------------

    def _edge_filter(self, k) -> int:
        """Admissible target edges for edge var ``k`` given endpoint domains."""
        out = 0
        m = self.edom[k]
        eb = self.h_end_bits
        if self.g_kind[k] == ORDINARY:
            u, v = self.g_ends[k]
            du, dv = self.vdom[u], self.vdom[v]
            while m:
                low = m & -m
                m ^= low
                bx, by = eb[low.bit_length() - 1]
                if (du & bx and dv & by) or (du & by and dv & bx):
                    out |= low
        else:
            du = self.vdom[self.g_ends[k][0]]
            while m:
                low = m & -m
                m ^= low
                if du & eb[low.bit_length() - 1][0]:
                    out |= low
        return out

    def _vertex_filter_from_edge(self, k, u) -> int:
        """Admissible images of endpoint ``u`` supported by edge var ``k``."""
        out = 0
        m = self.edom[k]
        eb = self.h_end_bits
        if self.g_kind[k] == ORDINARY:
            a, b = self.g_ends[k]
            dv = self.vdom[b if u == a else a]
            while m:
                low = m & -m
                m ^= low
                bx, by = eb[low.bit_length() - 1]
                if dv & by:
                    out |= bx
                if dv & bx:
                    out |= by
        else:
            while m:
                low = m & -m
                m ^= low
                out |= eb[low.bit_length() - 1][0]
        return out

    def _pin_component(self, ci, hci) -> bool:
        self.comp_pinned[ci] = True
        self.trail.append(("cp", ci))
        vm = self.h_comp_vmask[hci]
        em = self.h_comp_emask[hci]
        for var, comp in self.g_comp.items():
            if comp != ci:
                continue
            if not self._set(var, self.vdom[var] & vm):
                return False
            for k in self.g_inc[var]:
                if not self._set(k + self.nv, self.edom[k] & em):
                    return False
        return True

    def _side_pin(self, ci, flip) -> bool:
        self.comp_sided[ci] = True
        self.trail.append(("cs", ci))
        for var, comp in self.g_comp.items():
            if comp != ci:
                continue
            m = self.side_mask[self.g_side[var] ^ flip]
            if not self._set(var, self.vdom[var] & m):
                return False
        return True

    def _local_ok(self, vi) -> bool:
        """Matching feasibility of the edge-end assignment at an assigned
        vertex.  Loops must claim both ends of a target loop; everything else
        claims single ends."""
        xi = self.vdom[vi].bit_length() - 1
        caps = self.h_caps[xi]
        loops = []
        units = []  # (edge var, candidate mask restricted to x)
        inc_mask = self.h_inc_mask[xi]
        for k in self.g_inc[vi]:
            cand = self.edom[k] & inc_mask
            if cand == 0:
                return False
            if self.g_kind[k] == LOOP:
                loops.append(cand)
            else:
                units.append(cand)
        if not loops and len(units) <= 6:
            # Hall's condition for a system of distinct slots: every subset
            # of the incident edges needs at least as many slot capacities in
            # the union of its candidate target edges.
            nu = len(units)
            if nu <= 1:
                return True
            union = [0] * (1 << nu)
            for s in range(1, 1 << nu):
                low = s & -s
                un = union[s ^ low] | units[low.bit_length() - 1]
                union[s] = un
                need = s.bit_count()
                tot = 0
                while un:
                    b = un & -un
                    un ^= b
                    tot += caps[b.bit_length() - 1]
                    if tot >= need:
                        break
                if tot < need:
                    return False
            return True

        # slots: (j, copy) for each end of each target edge at x
        slot_of = []
        slot_idx = {}
        for j, c in caps.items():
            for t in range(c):
                slot_idx[(j, t)] = len(slot_of)
                slot_of.append(j)

        loop_js = [sorted(_bits(m)) for m in loops]
        for assign in itertools.product(*loop_js) if loops else [()]:
            if len(set(assign)) != len(assign):
                continue
            used = set(assign)
            adj = []
            ok = True
            for cand in units:
                nbrs = []
                for j in _bits(cand):
                    if j in used:
                        continue
                    for t in range(caps[j]):
                        nbrs.append(slot_idx[(j, t)])
                if not nbrs:
                    ok = False
                    break
                adj.append(nbrs)
            if ok and _kuhn(adj, len(slot_of)) == len(units):
                return True
        return False

    def _cap_prune(self, vi) -> bool:
        """Remove exhausted target edges from open edges at an assigned
        vertex: darts claimed by decided incident edges are not available to
        the undecided ones.  Keeps alternation around parallel bundles and
        cycle closures propagating instead of surfacing as late conflicts."""
        xi = self.vdom[vi].bit_length() - 1
        caps = self.h_caps[xi]
        used = {}
        open_ks = []
        for k in self.g_inc[vi]:
            m = self.edom[k]
            if m.bit_count() == 1:
                j = m.bit_length() - 1
                used[j] = used.get(j, 0) + (2 if self.g_kind[k] == LOOP else 1)
            else:
                open_ks.append(k)
        for k in open_ks:
            need = 2 if self.g_kind[k] == LOOP else 1
            mask = 0
            m = self.edom[k]
            while m:
                low = m & -m
                m ^= low
                j = low.bit_length() - 1
                if caps.get(j, 0) - used.get(j, 0) >= need:
                    mask |= low
            if mask != self.edom[k] and not self._set(k + self.nv, mask):
                return False
        return True

    def propagate(self) -> bool:
        dirty = set()
        while self.queue:
            var = self.queue.pop()
            if var < self.nv:
                vi = var
                if (
                    "component" not in self.rules
                    and not self.h_single_comp
                    and self.vdom[vi].bit_count() == 1
                ):
                    ci = self.g_comp[vi]
                    if not self.comp_pinned[ci]:
                        hci = self.h_comp_of[self.vdom[vi].bit_length() - 1]
                        if not self._pin_component(ci, hci):
                            return False
                if self.side_mask is not None and self.vdom[vi].bit_count() == 1:
                    ci = self.g_comp[vi]
                    if not self.comp_sided[ci]:
                        xi = self.vdom[vi].bit_length() - 1
                        hside = (self.side_mask[1] >> xi) & 1
                        if not self._side_pin(ci, hside ^ self.g_side[vi]):
                            return False
                if self.group_of[vi] is not None:
                    d = self.vdom[vi]
                    for w in self.groups[self.group_of[vi]]:
                        if w != vi and not self._set(w, self.vdom[w] & d):
                            return False
                for other, trans in self.vlinks[vi]:
                    m = 0
                    d = self.vdom[vi]
                    while d:
                        low = d & -d
                        d ^= low
                        m |= trans[low.bit_length() - 1]
                    if not self._set(other, self.vdom[other] & m):
                        return False
                for k in self.g_inc[vi]:
                    if not self._set(k + self.nv, self._edge_filter(k)):
                        return False
                if self.vdom[vi].bit_count() == 1:
                    dirty.add(vi)
            else:
                k = var - self.nv
                for u in set(self.g_ends[k]):
                    nd = self.vdom[u] & self._vertex_filter_from_edge(k, u)
                    if not self._set(u, nd):
                        return False
                    if self.vdom[u].bit_count() == 1:
                        dirty.add(u)
            if not self.queue and dirty and "matching" not in self.rules:
                batch, dirty = dirty, set()
                for vi in batch:
                    if self.vdom[vi].bit_count() != 1:
                        continue
                    if not self._cap_prune(vi) or not self._local_ok(vi):
                        return False
        if (
            "parity" not in self.rules
            and self.pair_masks
            and self.nv_unassigned == 0
            and not self._parity_ok()
        ):
            return False
        return True

    def _parity_ok(self) -> bool:
        """No odd cycle of forced-distinct parallel-pair edges.

        Source edges whose domain equals one two-edge bundle of parallel
        target edges must take different bundle members whenever they share
        an endpoint; these constraints form paths and cycles, and an odd
        cycle admits no assignment.  Checked once the vertex images are
        complete, which is when such bundles stop shrinking."""
        at = {}
        for k, m in enumerate(self.edom):
            if m.bit_count() == 2 and m in self.pair_masks:
                for u in set(self.g_ends[k]):
                    at.setdefault((u, m), []).append(k)
        if not at:
            return True
        adj = {}
        for ks in at.values():
            if len(ks) > 2:
                return False
            if len(ks) == 2:
                a, b = ks
                adj.setdefault(a, []).append(b)
                adj.setdefault(b, []).append(a)
        colour = {}
        for start in adj:
            if start in colour:
                continue
            colour[start] = 0
            stack = [start]
            while stack:
                a = stack.pop()
                for b in adj[a]:
                    if b not in colour:
                        colour[b] = colour[a] ^ 1
                        stack.append(b)
                    elif colour[b] == colour[a]:
                        return False
        return True

    # -- search ---------------------------------------------------------------

    def _pick(self):
        # priority blocks first; the block pointer only moves forward and is
        # rewound on backtracking by the search itself
        i, prio, n = self.prio_lo, self.prio, len(self.prio)
        while i < n:
            best, best_cnt = None, None
            for var in prio[i]:
                cnt = self._dom(var).bit_count()
                if cnt > 1 and (best is None or cnt < best_cnt):
                    best, best_cnt = var, cnt
            if best is not None:
                self.prio_lo = i
                return best
            i += 1
        self.prio_lo = i
        # last-conflict reasoning: retry the variable whose branching failed
        # most recently for as long as it is still unassigned, so that the
        # culprit of a conflict is re-examined near the top of the subtree
        lc = self.last_conflict
        if lc is not None and self._dom(lc).bit_count() > 1:
            return lc
        while self.heap:
            is_edge, cnt, var = self.heap[0]
            d = self._dom(var)
            if d.bit_count() != cnt or cnt <= 1:
                heapq.heappop(self.heap)
                continue
            return var
        return None

    def _extract(self) -> CoverMap:
        vmap = {
            v: self.hv[self.vdom[i].bit_length() - 1] for i, v in enumerate(self.gv)
        }
        emap = {
            e: self.he[self.edom[k].bit_length() - 1] for k, e in enumerate(self.ge)
        }
        return CoverMap(vmap, emap)

    def search(
        self,
        on_solution,
        max_nodes: Optional[int],
        deadline: Optional[float],
        anchor_break: bool,
    ) -> None:
        """DFS; ``on_solution(CoverMap) -> bool`` returns True to stop."""

        verify = verify_partial_cover if self.partial else verify_cover

        def dfs() -> bool:
            var = self._pick()
            if var is None:
                if any(d == 0 for d in self.vdom) or any(d == 0 for d in self.edom):
                    return False
                cand = self._extract()
                if verify(self.g, self.h, cand):
                    return on_solution(cand)
                return False
            dom = self._dom(var)
            save_lo = self.prio_lo
            values = dom
            ci = None
            ndec = 0
            if anchor_break:
                ci = self.g_comp[var] if var < self.nv else self.e_comp[var - self.nv]
                ndec = self.comp_decisions[ci]
                if var < self.nv:
                    if ndec == 0:
                        narrowed = dom & self.anchor_mask
                        if narrowed:
                            values = narrowed
                    elif ndec == 1 and self.comp_anchor[ci] is not None:
                        narrowed = self._stab_narrow(self.comp_anchor[ci], dom)
                        if narrowed:
                            values = narrowed
                self.comp_decisions[ci] = ndec + 1
            for b in _bits(values):
                self.nodes += 1
                if max_nodes is not None and self.nodes > max_nodes:
                    raise _Limit
                if deadline is not None and time.monotonic() > deadline:
                    raise _Limit
                if ci is not None and ndec == 0 and var < self.nv:
                    self.comp_anchor[ci] = b
                mark = len(self.trail)
                if self._set(var, 1 << b) and self.propagate():
                    if dfs():
                        return True
                self._undo(mark)
                self.prio_lo = save_lo
            if ci is not None:
                self.comp_decisions[ci] = ndec
                if ndec == 0:
                    self.comp_anchor[ci] = None
            self.last_conflict = var
            return False

        nvars = self.nv + len(self.ge)
        # one stack frame per decision level; make room for large instances
        need = 3 * nvars + 1000
        old_limit = sys.getrecursionlimit()
        if need > old_limit:
            sys.setrecursionlimit(need)
        try:
            self.queue.extend(range(nvars))
            if self.propagate():
                dfs()
        finally:
            if need > old_limit:
                sys.setrecursionlimit(old_limit)


def _run(
    g,
    h,
    lists,
    partial,
    disable_rules,
    symmetry_break,
    max_nodes,
    max_seconds,
    limit,
    same_image=None,
    image_maps=None,
    image_relations=None,
    priority=None,
):
    t0 = time.monotonic()
    engine = _Engine(
        g, h, lists, partial, frozenset(disable_rules), symmetry_break,
        same_image=same_image, image_maps=image_maps,
        image_relations=image_relations, priority=priority,
    )
    deadline = t0 + max_seconds if max_seconds is not None else None
    solutions: list = []

    def on_solution(f):
        solutions.append(f)
        return limit is not None and len(solutions) >= limit

    status = UNSAT
    try:
        engine.search(on_solution, max_nodes, deadline, symmetry_break)
        if solutions:
            status = SAT
    except _Limit:
        status = SAT if solutions else LIMIT
    stats = {
        "nodes": engine.nodes,
        "seconds": time.monotonic() - t0,
        "solutions": len(solutions),
    }
    return status, solutions, stats


def solve(
    g: Multigraph,
    h: Multigraph,
    lists: Optional[Lists] = None,
    *,
    partial: bool = False,
    max_nodes: Optional[int] = None,
    max_seconds: Optional[float] = None,
    disable_rules=(),
    symmetry_break: bool = False,
    same_image=None,
    image_maps=None,
    image_relations=None,
    priority=None,
) -> SolveOutcome:
    """Decide whether a (partial, if requested) covering projection of ``g``
    onto ``h`` respecting ``lists`` exists; returns a verified witness.

    ``symmetry_break`` restricts the first image chosen in every source
    component to target-orbit representatives; it is sound for the verdict
    (not for enumeration) and only applied when no lists are given.

    ``same_image`` is an iterable of source-vertex groups whose images are
    known to coincide in every solution (e.g. by a rigidity argument about
    the instance); their domains are propagated jointly.  ``image_maps`` is
    an iterable of ``(u, v, mapping)`` triples declaring that in every
    solution the image of ``v`` is ``mapping[image of u]``, and
    ``image_relations`` is the non-functional analogue, an iterable of
    ``(u, v, pairs)`` with the allowed ``(image of u, image of v)`` pairs.
    ``priority`` gives branching blocks (lists of vertex or edge names, or a
    flat list of names) to assign before anything else, block by block.
    """
    if symmetry_break and lists is not None and (lists.vertex or lists.edge):
        symmetry_break = False
    status, sols, stats = _run(
        g,
        h,
        lists,
        partial,
        disable_rules,
        symmetry_break,
        max_nodes,
        max_seconds,
        1,
        same_image,
        image_maps,
        image_relations,
        priority,
    )
    return SolveOutcome(status, sols[0] if sols else None, stats)


def enumerate_covers(
    g: Multigraph,
    h: Multigraph,
    lists: Optional[Lists] = None,
    *,
    partial: bool = False,
    limit: Optional[int] = None,
    max_nodes: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> list:
    """All (partial) covering projections respecting ``lists``, in the
    solver's deterministic search order.  Raises ``RuntimeError`` when a
    budget is hit before the enumeration is exhausted."""
    status, sols, stats = _run(
        g, h, lists, partial, (), False, max_nodes, max_seconds, limit
    )
    if status == LIMIT:
        raise RuntimeError(f"enumeration hit its budget after {stats['nodes']} nodes")
    return sols


# ---------------------------------------------------------------------------
# Independent oracle


def brute_force(
    g: Multigraph,
    h: Multigraph,
    lists: Optional[Lists] = None,
    *,
    partial: bool = False,
    guard: int = 50_000_000,
) -> SolveOutcome:
    """Naive reference search, kept deliberately separate from ``solve``.

    Vertices are assigned in insertion order (pruned by adjacency with
    already-assigned neighbours and by lists), then edges in insertion order
    (pruned by incidence with the fixed vertex images and by end-capacity
    counts).  Full candidates are confirmed with the shared verifier.
    """
    lists = lists or Lists()
    gv = g.vertices
    ge = g.edge_ids
    hv = h.vertices

    est = 1
    for v in gv:
        est *= max(1, len(lists.vertex_list(v, hv)))
        if est > guard:
            return SolveOutcome(LIMIT, None, {"reason": "instance too large"})

    vmap: dict = {}
    emap: dict = {}
    used_ends: dict = {}  # (vertex of g, target edge) -> ends consumed
    verify = verify_partial_cover if partial else verify_cover
    nodes = 0

    def edge_candidates(eid):
        e = g.edge(eid)
        out = []
        for he in h.edges:
            if he.id not in lists.edge_list(eid, h.edge_ids):
                continue
            if e.kind == SEMI and he.kind != SEMI:
                continue
            if e.kind == LOOP and he.kind != LOOP:
                continue
            if e.kind == ORDINARY:
                u, v = e.ends
                if he.kind == ORDINARY:
                    if {vmap[u], vmap[v]} != set(he.ends):
                        continue
                elif not (vmap[u] == vmap[v] == he.ends[0]):
                    continue
            else:
                if vmap[e.ends[0]] != he.ends[0]:
                    continue
            out.append(he.id)
        return out

    def assign_edges(i) -> bool:
        nonlocal nodes
        if i == len(ge):
            cand = CoverMap(dict(vmap), dict(emap))
            return bool(verify(g, h, cand))
        eid = ge[i]
        e = g.edge(eid)
        for hid in edge_candidates(eid):
            nodes += 1
            touched = []
            ok = True
            for v in set(e.ends):
                d = e.darts_at(v)
                key = (v, hid)
                cap = h.edge(hid).darts_at(vmap[v])
                if used_ends.get(key, 0) + d > cap:
                    ok = False
                    break
                used_ends[key] = used_ends.get(key, 0) + d
                touched.append((key, d))
            if ok:
                emap[eid] = hid
                if assign_edges(i + 1):
                    return True
                del emap[eid]
            for key, d in touched:
                used_ends[key] -= d
        return False

    def assign_vertices(i) -> bool:
        nonlocal nodes
        if i == len(gv):
            return assign_edges(0)
        v = gv[i]
        for x in lists.vertex_list(v, hv):
            if x not in h.vertices:
                continue
            nodes += 1
            ok = True
            for u in g.neighbors(v):
                if u not in vmap:
                    continue
                y = vmap[u]
                if y != x:
                    joined = h.multiplicity(y, x)
                else:
                    joined = len(h.loops_at(x)) + len(h.semis_at(x))
                if not joined:
                    ok = False
                    break
            if not ok:
                continue
            vmap[v] = x
            if assign_vertices(i + 1):
                return True
            del vmap[v]
        return False

    found = assign_vertices(0)
    witness = CoverMap(dict(vmap), dict(emap)) if found else None
    return SolveOutcome(SAT if found else UNSAT, witness, {"nodes": nodes})


# ---------------------------------------------------------------------------
# Target symmetry


def vertex_automorphisms(h: Multigraph) -> list:
    """All automorphisms of ``h`` as vertex maps (brute-force backtracking;
    intended for small target graphs).  Loop and semi-edge counts and ordinary
    multiplicities determine a multigraph up to renaming its edges, so a
    bijection preserving them is an automorphism."""
    from .multigraph import _vertex_signature

    verts = h.vertices
    sig = {v: _vertex_signature(h, v) for v in verts}
    autos: list = []
    mapping: dict = {}
    used: set = set()

    def extend(i):
        if i == len(verts):
            autos.append(dict(mapping))
            return
        v = verts[i]
        for w in verts:
            if w in used or sig[v] != sig[w]:
                continue
            if any(
                h.multiplicity(v, u) != h.multiplicity(w, x)
                for u, x in mapping.items()
            ):
                continue
            mapping[v] = w
            used.add(w)
            extend(i + 1)
            del mapping[v]
            used.discard(w)

    extend(0)
    return autos


def vertex_orbits(h: Multigraph) -> list:
    """Orbits of the vertices of ``h`` under its automorphism group (computed
    by brute-force search; intended for small target graphs)."""
    verts = h.vertices
    orbits: list = []
    placed: set = set()

    def automorphism_with(seed_v, seed_w) -> bool:
        from .multigraph import _vertex_signature

        sig = {v: _vertex_signature(h, v) for v in verts}
        if sig[seed_v] != sig[seed_w]:
            return False
        mapping = {seed_v: seed_w}
        used = {seed_w}

        def compatible(v, w):
            if sig[v] != sig[w]:
                return False
            for u, x in mapping.items():
                if h.multiplicity(v, u) != h.multiplicity(w, x):
                    return False
            return True

        order = [v for v in verts if v != seed_v]

        def extend(i):
            if i == len(order):
                return True
            v = order[i]
            for w in verts:
                if w in used or not compatible(v, w):
                    continue
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
            return False

        return extend(0)

    for v in verts:
        if v in placed:
            continue
        orbit = [v]
        placed.add(v)
        for w in verts:
            if w in placed:
                continue
            if automorphism_with(v, w):
                orbit.append(w)
                placed.add(w)
        orbits.append(orbit)
    return orbits
