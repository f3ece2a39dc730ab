"""The core of T1 x T2 at orbit level, bracketed by certified bounds.

``lower`` is closed under faces and fiber hulls and every cell in it is
certified: squares by four heavy quadrants, vertices by three hyperbolic
elements with separated ends.  ``upper`` is the fiber-convex closure of each
asymmetric core, intersected; it contains the core whenever the core is
nonempty.  When the two agree the answer is exact.
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from typing import Optional

from . import minsubtree as MS
from . import word as W
from .bass_serre import Cell, DirectionRef, Splitting
from .oracle import ball
from .product import BudgetExceeded, CellSet, ProductSpace, asymmetric_core, dim

SCHEMA = "treecore/1"
EXACT = "EXACT"
BOUNDS = "BOUNDS"
UNKNOWN = "UNKNOWN"
TRUE = "TRUE"
FALSE = "FALSE"


@dataclass(frozen=True)
class QuadrantRef:
    d1: DirectionRef
    d2: DirectionRef


@dataclass(frozen=True)
class HeavyCertificate:
    h: tuple
    quadrant: QuadrantRef


@dataclass
class Budget:
    radius: int = 8
    conj_rounds: int = 2
    cap: int = 10000

    @classmethod
    def default(cls, rank: int = 2) -> "Budget":
        env = os.environ.get("TREECORE_BUDGET")
        if env is not None:
            return cls(radius=int(env))
        return cls(radius=8 if rank <= 2 else 6)


def _budget(b, rank) -> Budget:
    if b is None:
        return Budget.default(rank)
    if isinstance(b, int):
        return Budget(radius=b, conj_rounds=2 if b > 0 else 0)
    return b


# --- certificate search --------------------------------------------------------------

class HeavySearch:
    """Lazily enumerated elements hyperbolic in both trees, with cached axis data."""

    def __init__(self, space: ProductSpace, budget: Budget):
        self.P = space
        self.budget = budget
        self.found: list = []
        self._gen = self._stream()
        self._done = False

    def _data(self, h):
        s1, s2 = self.P.s1, self.P.s2
        l1 = s1.translation_length(h)
        if l1 == 0:
            return None
        l2 = s2.translation_length(h)
        if l2 == 0:
            return None
        return (h, l1, s1.axis_segment(h)[0], l2, s2.axis_segment(h)[0])

    def _stream(self):
        seen = set()
        if self.budget.radius <= 0:
            return
        for h in ball(self.P.s1.rank, self.budget.radius):
            if h:
                seen.add(h)
                d = self._data(h)
                if d:
                    yield d
        for _ in range(self.budget.conj_rounds):
            base = [d[0] for d in self.found[:8]]
            new = []
            for g, h in itertools.product(base, base):
                if g == h:
                    continue
                for k in (1, -1, 2, -2):
                    gk = W.power(g, k)
                    new.append(W.conjugate(h, gk))
                new.append(W.multiply(g, h))
            for h in sorted(set(new), key=W.shortlex_key):
                if h and h not in seen:
                    seen.add(h)
                    d = self._data(h)
                    if d:
                        yield d

    def __iter__(self):
        i = 0
        while True:
            if i < len(self.found):
                yield self.found[i]
                i += 1
                continue
            if self._done:
                return
            try:
                d = next(self._gen)
            except StopIteration:
                self._done = True
                return
            self.found.append(d)


def _end_in(spec: Splitting, h, ell, anchor: Cell, d: DirectionRef) -> bool:
    base = spec.endpoints(d.edge)[1 - d.toward]
    K = (2 * spec.distance(anchor, base) + 2) // ell + 1
    y = Cell(anchor.kind, W.multiply(W.power(h, K), anchor.rep))
    return spec.in_direction(y, d)


def _end_direction(spec: Splitting, h, ell, anchor: Cell, x: Cell) -> Cell:
    """First edge from vertex x toward the attracting end of h."""
    K = (2 * spec.distance(anchor, x) + 2) // ell + 1
    y = Cell(anchor.kind, W.multiply(W.power(h, K), anchor.rep))
    return spec.geodesic(x, y)[0]


def heavy_certificate(spec1: Splitting, spec2: Splitting, q: QuadrantRef, budget=None,
                      search: Optional[HeavySearch] = None) -> Optional[HeavyCertificate]:
    if search is None:
        search = HeavySearch(ProductSpace(spec1, spec2), _budget(budget, spec1.rank))
    for h, l1, a1, l2, a2 in search:
        if _end_in(spec1, h, l1, a1, q.d1) and _end_in(spec2, h, l2, a2, q.d2):
            return HeavyCertificate(h, q)
    return None


def square_quadrants(e1: Cell, e2: Cell) -> list:
    return [QuadrantRef(DirectionRef(e1, s), DirectionRef(e2, t)) for s in (0, 1) for t in (0, 1)]


def certify_square(spec1: Splitting, spec2: Splitting, e1: Cell, e2: Cell, budget=None,
                   search: Optional[HeavySearch] = None):
    """Certificates for the four quadrants around e1 x e2, or None."""
    if search is None:
        search = HeavySearch(ProductSpace(spec1, spec2), _budget(budget, spec1.rank))
    certs = []
    for q in square_quadrants(e1, e2):
        c = heavy_certificate(spec1, spec2, q, search=search)
        if c is None:
            return None
        certs.append(c)
    return certs


def certify_vertex(spec1: Splitting, spec2: Splitting, x1: Cell, x2: Cell,
                   search: HeavySearch):
    """Three elements whose ends lie in three distinct directions at x1 and at x2."""
    items = {}
    for h, l1, a1, l2, a2 in search:
        d1 = _end_direction(spec1, h, l1, a1, x1)
        d2 = _end_direction(spec2, h, l2, a2, x2)
        if (d1, d2) in items:
            continue
        for (p1, p2), (q1, q2) in itertools.combinations(items, 2):
            if len({p1, q1, d1}) == 3 and len({p2, q2, d2}) == 3:
                return [items[(p1, p2)], items[(q1, q2)], h]
        items[(d1, d2)] = h
    return None


# --- the core --------------------------------------------------------------------------

@dataclass
class TwiceLightRect:
    e1: Cell
    e2: Cell
    key: tuple
    quadrants: tuple
    diagonal: tuple  # ((x1, x2), (x1', x2')) corner cells


@dataclass
class CoreComplex:
    space: ProductSpace
    lower: CellSet
    upper: CellSet
    status: str
    connected: object = UNKNOWN
    twice_light: list = field(default_factory=list)
    augmented: set = field(default_factory=set)
    square_certificates: dict = field(default_factory=dict)
    vertex_certificates: dict = field(default_factory=dict)
    si1: int = 0
    si2: int = 0
    canonical: tuple = (False, False)
    jsj_fp: bool = False
    budget: Budget = field(default_factory=Budget)
    notes: list = field(default_factory=list)

    @property
    def spec1(self):
        return self.space.s1

    @property
    def spec2(self):
        return self.space.s2

    def squares(self, which: str = "upper") -> list:
        return getattr(self, which).of_dim(2)

    def counts(self, which: str = "upper") -> tuple:
        return getattr(self, which).counts()


def _seeds(P: ProductSpace, upper: CellSet, search: HeavySearch):
    seeds = CellSet()
    sq_certs, v_certs = {}, {}
    for k in upper.of_dim(2):
        e1, e2 = P.rep(k)
        certs = certify_square(P.s1, P.s2, e1, e2, search=search)
        if certs is not None:
            sq_certs[k] = [c.h for c in certs]
            seeds.cells.add(k)
    P.face_close(seeds)
    for k in upper.of_dim(0):
        if k in seeds.cells:
            continue
        x1, x2 = P.rep(k)
        trip = certify_vertex(P.s1, P.s2, x1, x2, search)
        if trip is not None:
            v_certs[k] = trip
            seeds.cells.add(k)
    return seeds, sq_certs, v_certs


def compute_core(spec1: Splitting, spec2: Splitting, budget=None, jsj_fp: bool = False
                 ) -> CoreComplex:
    budget = _budget(budget, spec1.rank)
    P = ProductSpace(spec1, spec2)
    A1 = asymmetric_core(spec1, spec2, space=P)
    A2 = asymmetric_core(spec2, spec1, space=P.swapped)
    A2t = P.swapped.transpose_set(A2.cells)
    U1 = P.closure(A1.cells, cap=budget.cap)
    U2 = P.closure(A2t, cap=budget.cap)
    upper = CellSet(U1.cells & U2.cells, U1.diags & U2.diags)
    search = HeavySearch(P, budget)
    seeds, sq_certs, v_certs = _seeds(P, upper, search)
    lower = P.closure(seeds, cap=budget.cap, use_diags=False)
    if not lower.cells <= upper.cells:
        raise AssertionError("certified cells fall outside the upper bound")
    core = CoreComplex(P, lower, upper, BOUNDS, square_certificates=sq_certs,
                       vertex_certificates=v_certs, canonical=(A1.canonical, A2.canonical),
                       budget=budget)
    core.si1 = len(A1.squares())
    core.si2 = len(A2.squares())
    if lower.cells == upper.cells and lower.cells:
        core.status = EXACT
    elif jsj_fp:
        ok1 = MS.is_nontrivial_action(spec1.C, spec2)
        ok2 = MS.is_nontrivial_action(spec2.C, spec1)
        a1 = A1.cells.cells
        if ok1 and ok2 and A1.canonical and A2.canonical and a1 == A2t.cells:
            core.upper = CellSet(set(a1))
            core.lower = CellSet(set(a1))
            core.status = EXACT
            core.jsj_fp = True
            core.notes.append("exact via asserted fixed-point hypotheses: core = A1 = A2")
        else:
            core.notes.append("fixed-point hypotheses asserted but edge groups act trivially")
    if core.status == EXACT:
        core.connected = P.is_connected(CellSet(core.lower.cells))
        if not core.connected:
            core.twice_light = detect_twice_light(spec1, spec2, core)
            core.augmented = {r.key + (_diag_side(P, r),) for r in core.twice_light}
    return core


def _diag_side(P: ProductSpace, r: TwiceLightRect) -> int:
    (x1, y), _ = r.diagonal
    o2, _ = P.s2.endpoints(r.e2)
    o1, _ = P.s1.endpoints(r.e1)
    return 0 if (x1 == o1) == (y == o2) else 1


def intersection_number(core: CoreComplex):
    if core.status == EXACT:
        return len(core.lower.of_dim(2))
    return (len(core.lower.of_dim(2)), len(core.upper.of_dim(2)))


def is_compatible(core: CoreComplex) -> str:
    if core.lower.of_dim(2):
        return FALSE
    if core.status == EXACT:
        return TRUE
    return UNKNOWN


def detect_twice_light(spec1: Splitting, spec2: Splitting, core: CoreComplex) -> list:
    """Rectangles e1 x e2 over edges with empty core fibers bridging two corners."""
    if core.status != EXACT or core.connected is True:
        return []
    P = core.space
    C = CellSet(core.lower.cells)
    if any(k[0] == "E" for k in C.cells) or any(k[1] == "E" for k in C.cells):
        return []
    e1 = spec1.base_edge()
    a1, b1 = spec1.endpoints(e1)
    y = P.fiber_point(C, a1)
    w = P.fiber_point(C, b1)
    if y is None or w is None:
        return []
    path = spec2.path_vertices(y, w)
    i = max(j for j, v in enumerate(path) if P.in_fiber(C, a1, v))
    j = min(j for j, v in enumerate(path) if j >= i and P.in_fiber(C, b1, v))
    if j - i != 1:
        return []
    y, y2 = path[i], path[j]
    e2, = spec2.geodesic(y, y2)
    ends1 = spec1.endpoints(e1)
    ends2 = spec2.endpoints(e2)
    q1 = QuadrantRef(DirectionRef(e1, ends1.index(b1)), DirectionRef(e2, ends2.index(y)))
    q2 = QuadrantRef(DirectionRef(e1, ends1.index(a1)), DirectionRef(e2, ends2.index(y2)))
    return [TwiceLightRect(e1, e2, P.key(e1, e2), (q1, q2), ((a1, y), (b1, y2)))]


def scott_crossing(spec1: Splitting, spec2: Splitting, e1: Cell, e2: Cell, budget=None,
                   core: Optional[CoreComplex] = None) -> str:
    b = _budget(budget, spec1.rank)
    P = core.space if core is not None else ProductSpace(spec1, spec2)
    # a square missing from an exact core has a light quadrant: no search needed
    if core is not None and core.status == EXACT and P.key(e1, e2) not in core.lower.cells:
        return FALSE
    if certify_square(spec1, spec2, e1, e2, search=HeavySearch(P, b)) is not None:
        return TRUE
    if core is None:
        core = compute_core(spec1, spec2, b)
    if core.status == EXACT and P.key(e1, e2) not in core.lower.cells:
        return FALSE
    return UNKNOWN


def emptiness_check(spec1: Splitting, spec2: Splitting, budget=None):
    """("NONEMPTY", witness) | ("EMPTY", reason) | ("UNKNOWN", reason)."""
    b = _budget(budget, spec1.rank)
    if b.radius <= 0:
        return ("UNKNOWN", "zero budget")
    P = ProductSpace(spec1, spec2)
    A1 = asymmetric_core(spec1, spec2, space=P)
    search = HeavySearch(P, b)
    for k in A1.cells.of_dim(0):
        x1, x2 = P.rep(k)
        trip = certify_vertex(spec1, spec2, x1, x2, search)
        if trip is not None:
            return ("NONEMPTY", {"vertex": key_str(k), "elements": [W.format_word(h) for h in trip]})
    for k in A1.cells.of_dim(2):
        e1, e2 = P.rep(k)
        certs = certify_square(spec1, spec2, e1, e2, search=search)
        if certs is not None:
            return ("NONEMPTY", {"square": key_str(k),
                                 "elements": [W.format_word(c.h) for c in certs]})
    return ("UNKNOWN", "no certificate within budget")


# --- export ------------------------------------------------------------------------------

def key_str(k) -> str:
    parts = [k[0], k[1], W.format_word(k[2])] + [str(x) for x in k[3:]]
    return "|".join(parts)


def key_parse(s: str, rank: int) -> tuple:
    parts = s.split("|")
    k = (parts[0], parts[1], W.parse(parts[2], rank))
    return k + tuple(int(x) for x in parts[3:])


def _cellset_json(cs: CellSet) -> dict:
    return {"vertices": [key_str(k) for k in cs.of_dim(0)],
            "edges": [key_str(k) for k in cs.of_dim(1)],
            "squares": [key_str(k) for k in cs.of_dim(2)],
            "diagonals": [key_str(k) for k in sorted(cs.diags)]}


def _cellset_from(d: dict, rank: int) -> CellSet:
    cells = {key_parse(s, rank) for part in ("vertices", "edges", "squares") for s in d[part]}
    return CellSet(cells, {key_parse(s, rank) for s in d.get("diagonals", [])})


def to_json(core: CoreComplex) -> dict:
    i = intersection_number(core)
    return {
        "schema": SCHEMA,
        "pair": [core.spec1.label, core.spec2.label],
        "rank": core.spec1.rank,
        "splittings": {core.spec1.label: core.spec1.to_json(),
                       core.spec2.label: core.spec2.to_json()},
        "status": core.status,
        "intersection_number": i if isinstance(i, int) else list(i),
        "si1": core.si1,
        "si2": core.si2,
        "connected": core.connected if isinstance(core.connected, bool) else UNKNOWN,
        "compatible": is_compatible(core),
        "counts": {"lower": list(core.lower.counts()), "upper": list(core.upper.counts())},
        "lower": _cellset_json(core.lower),
        "upper": _cellset_json(core.upper),
        "twice_light": [{"square": key_str(r.key), "e1": str(r.e1), "e2": str(r.e2),
                         "diagonal": [[str(a), str(b)] for a, b in r.diagonal]}
                        for r in core.twice_light],
        "augmented": [key_str(k) for k in sorted(core.augmented)],
        "certificates": {
            "squares": {key_str(k): [W.format_word(h) for h in v]
                        for k, v in sorted(core.square_certificates.items())},
            "vertices": {key_str(k): [W.format_word(h) for h in v]
                         for k, v in sorted(core.vertex_certificates.items())},
        },
        "jsj_fp": core.jsj_fp,
        "budget": {"radius": core.budget.radius, "conj_rounds": core.budget.conj_rounds,
                   "cap": core.budget.cap},
        "notes": core.notes,
    }


def from_json(data: dict, spec1: Optional[Splitting] = None,
              spec2: Optional[Splitting] = None) -> CoreComplex:
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {data.get('schema')!r}")
    rank = data["rank"]
    l1, l2 = data["pair"]
    if spec1 is None:
        spec1 = Splitting.from_json(l1, data["splittings"][l1], rank)
    if spec2 is None:
        spec2 = Splitting.from_json(l2, data["splittings"][l2], rank)
    P = ProductSpace(spec1, spec2)
    b = data.get("budget", {})
    core = CoreComplex(P, _cellset_from(data["lower"], rank), _cellset_from(data["upper"], rank),
                       data["status"], budget=Budget(**b) if b else Budget())
    core.connected = data["connected"] if isinstance(data["connected"], bool) else UNKNOWN
    core.si1, core.si2 = data["si1"], data["si2"]
    core.jsj_fp = data.get("jsj_fp", False)
    core.augmented = {key_parse(s, rank) for s in data.get("augmented", [])}
    core.square_certificates = {key_parse(k, rank): [W.parse(h, rank) for h in v]
                                for k, v in data["certificates"]["squares"].items()}
    core.vertex_certificates = {key_parse(k, rank): [W.parse(h, rank) for h in v]
                                for k, v in data["certificates"]["vertices"].items()}
    core.notes = list(data.get("notes", []))
    return core


def dumps(core: CoreComplex) -> str:
    return json.dumps(to_json(core), indent=2)


def to_dot(core: CoreComplex) -> str:
    """1-skeleton of the quotient; squares drawn as shaded cliques, diagonals dashed."""
    P = core.space
    cs = core.upper
    lines = ["graph core {", "  node [shape=point];"]
    for k in cs.of_dim(0):
        style = "" if k in core.lower.cells else ", color=gray"
        lines.append(f'  "{key_str(k)}" [xlabel="{key_str(k)}"{style}];')
    for k in cs.of_dim(1):
        a, b = P.faces(k)
        color = "blue" if k[0] == "E" else "red"
        lines.append(f'  "{key_str(a)}" -- "{key_str(b)}" [color={color}, label="{key_str(k)}"];')
    for k in cs.of_dim(2):
        corners = sorted({f2 for f in P.faces(k) for f2 in P.faces(f)})
        for a, b in itertools.combinations(corners, 2):
            lines.append(f'  "{key_str(a)}" -- "{key_str(b)}" '
                         f'[style=bold, color="#00000033", penwidth=4];')
    for dk in sorted(cs.diags | core.augmented):
        a, b = P.diagonal_ends(dk)
        lines.append(f'  "{key_str(a)}" -- "{key_str(b)}" [style=dashed, label="{key_str(dk)}"];')
    lines.append("}")
    return "\n".join(lines)


__all__ = [
    "BudgetExceeded", "Budget", "CoreComplex", "HeavyCertificate", "QuadrantRef",
    "TwiceLightRect", "certify_square", "certify_vertex", "compute_core", "detect_twice_light",
    "emptiness_check", "heavy_certificate", "intersection_number", "is_compatible",
    "scott_crossing", "to_dot", "to_json", "from_json", "dim",
]
