"""Quotients Min_T(H)/H of minimal invariant subtrees, strong crossing and
strong intersection numbers.

Orbits of cells under ``H`` are keyed by the shortlex-least element of the
double coset ``H r Stab``, where ``r`` names the cell ``r·Stab``.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from . import stallings as S
from . import word as W
from .bass_serre import Cell, Splitting


class TrivialAction(ValueError):
    pass


def orbit_key(H: S.SubgroupGraph, spec: Splitting, c: Cell) -> Cell:
    """Canonical representative cell of the H-orbit of ``c``."""
    return Cell(c.kind, S.canonical_double_coset_rep(H, c.rep, spec.stab_graph(c.kind)))


def _gens(H: S.SubgroupGraph):
    return [g for g in H.gens if g]


def is_nontrivial_action(H: S.SubgroupGraph, spec: Splitting) -> bool:
    """Some generator or product of two generators is hyperbolic."""
    gens = _gens(H)
    for i, g in enumerate(gens):
        if spec.is_hyperbolic(g):
            return True
        for h in gens[i + 1:]:
            if spec.is_hyperbolic(W.multiply(g, h)):
                return True
    return False


@dataclass
class QuotientGraph:
    H: S.SubgroupGraph
    spec: Splitting
    vertices: set = field(default_factory=set)
    edges: dict = field(default_factory=dict)  # edge orbit -> (origin orbit, terminus orbit)

    def incidences(self) -> dict:
        inc = {v: [] for v in self.vertices}
        for e, ends in self.edges.items():
            for slot, v in enumerate(ends):
                inc[v].append((e, slot))
        return inc

    def contains_edge(self, e: Cell) -> bool:
        return orbit_key(self.H, self.spec, e) in self.edges

    def contains_vertex(self, v: Cell) -> bool:
        return orbit_key(self.H, self.spec, v) in self.vertices

    def vertex_stabilizer(self, v: Cell) -> S.SubgroupGraph:
        return S.intersect(self.H, self.spec.stabilizer(v))

    def to_json(self) -> dict:
        return {
            "subgroup": [W.format_word(g) for g in self.H.gens],
            "splitting": self.spec.label,
            "vertices": sorted(str(v) for v in self.vertices),
            "edges": [{"edge": str(e), "ends": [str(a), str(b)]}
                      for e, (a, b) in sorted(self.edges.items())],
        }

    def to_dot(self) -> str:
        lines = ["graph quotient {"]
        for v in sorted(self.vertices):
            lines.append(f'  "{v}";')
        for e, (a, b) in sorted(self.edges.items()):
            lines.append(f'  "{a}" -- "{b}" [label="{e}"];')
        lines.append("}")
        return "\n".join(lines)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _hull_quotient(H: S.SubgroupGraph, spec: Splitting) -> QuotientGraph:
    """Quotient of the H-saturation of the segments [p, h_i p]."""
    q = QuotientGraph(H, spec)
    p = spec.base_vertex()
    q.vertices.add(orbit_key(H, spec, p))
    for h in _gens(H):
        hp = spec.act(h, p)
        for v in spec.path_vertices(p, hp):
            q.vertices.add(orbit_key(H, spec, v))
        for e in spec.geodesic(p, hp):
            k = orbit_key(H, spec, e)
            if k not in q.edges:
                a, b = spec.endpoints(k)
                q.edges[k] = (orbit_key(H, spec, a), orbit_key(H, spec, b))
                q.vertices.update(q.edges[k])
    return q


def _is_leaf(q: QuotientGraph, u: Cell, inc) -> bool:
    """Vertex orbit u has valence 1 in the subtree: one incidence and H_u fixes that edge."""
    if len(inc) != 1:
        return False
    (ek, slot), = inc
    spec, H = q.spec, q.H
    x = spec.endpoints(ek)[slot]
    # find h0 in H with h0 . x = u
    Hx = S.conjugate(H, W.inverse(x.rep))
    found = S.product_membership(W.multiply(W.inverse(x.rep), u.rep), Hx, spec.stab_graph(u.kind))
    if found is None:
        raise AssertionError("incidence does not lift")
    a, _ = found
    h0 = W.multiply(x.rep, a, W.inverse(x.rep))
    f = spec.act(h0, ek)
    stab_f = spec.stabilizer(f)
    Hu = q.vertex_stabilizer(u)
    return all(stab_f.accepts(g) for g in _gens(Hu))


def prune(q: QuotientGraph, seed: Optional[int] = None) -> QuotientGraph:
    """Delete valence-one vertex orbits until none remain."""
    rng = random.Random(seed) if seed is not None else None
    while True:
        inc = q.incidences()
        order = sorted(q.vertices)
        if rng is not None:
            rng.shuffle(order)
        leaf = next((u for u in order if _is_leaf(q, u, inc[u])), None)
        if leaf is None:
            break
        (ek, _), = inc[leaf]
        del q.edges[ek]
        q.vertices.discard(leaf)
    if q.edges:
        used = {v for ends in q.edges.values() for v in ends}
        q.vertices &= used
    return q


def min_subtree_quotient(H: S.SubgroupGraph, spec: Splitting, seed: Optional[int] = None
                         ) -> QuotientGraph:
    if not is_nontrivial_action(H, spec):
        raise TrivialAction(f"{H} has a global fixed point in {spec.label}")
    return prune(_hull_quotient(H, spec), seed)


def crosses_strongly(spec1: Splitting, spec2: Splitting, e2: Cell) -> bool:
    C1 = spec1.C
    if not is_nontrivial_action(C1, spec2):
        return False
    return min_subtree_quotient(C1, spec2).contains_edge(e2)


def strong_intersection(spec1: Splitting, spec2: Splitting) -> int:
    C1 = spec1.C
    if not is_nontrivial_action(C1, spec2):
        return 0
    return len(min_subtree_quotient(C1, spec2).edges)


def asymmetric_core(spec1: Splitting, spec2: Splitting, choices=None):
    """Orbit-level cells of A1; see :func:`treecore.product.asymmetric_core`."""
    from .product import asymmetric_core as _ac
    return _ac(spec1, spec2, choices)
