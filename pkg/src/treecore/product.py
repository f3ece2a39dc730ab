"""Orbit-level cells of T1 x T2 and the closure operations on invariant sets.

A product cell ``(c1, c2)`` is named, up to the diagonal action, by the key
``(k1, k2, d)``: ``d`` is the shortlex-least element of ``S1 r1^-1 r2 S2``
where ``S_i`` are the cell stabilizers at the base.  Its representative is the
pair ``(Cell(k1, ()), Cell(k2, d))``, so the first coordinate always sits at
a base cell.

An invariant set is a set of full cell keys plus a set of *diagonals*: open
segments crossing a square from one corner to the opposite one.  Diagonal
keys are ``(E, E, d, s)`` with ``s = 0`` for the diagonal joining
(origin, origin) to (terminus, terminus) and ``s = 1`` for the other one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import minsubtree as MS
from . import stallings as S
from . import word as W
from .bass_serre import Cell, Splitting


class BudgetExceeded(RuntimeError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


def dim(key) -> int:
    return (key[0] == "E") + (key[1] == "E")


@dataclass
class CellSet:
    cells: set = field(default_factory=set)
    diags: set = field(default_factory=set)

    def copy(self) -> "CellSet":
        return CellSet(set(self.cells), set(self.diags))

    def of_dim(self, k: int) -> list:
        return sorted(c for c in self.cells if dim(c) == k)

    def counts(self) -> tuple:
        return tuple(len(self.of_dim(k)) for k in range(3))

    def __len__(self):
        return len(self.cells) + len(self.diags)


class ProductSpace:
    def __init__(self, spec1: Splitting, spec2: Splitting, _swapped=None):
        if spec1.rank != spec2.rank:
            raise ValueError("splittings live in free groups of different rank")
        self.s1, self.s2 = spec1, spec2
        self._swapped = _swapped
        self._key_cache: dict = {}

    @property
    def swapped(self) -> "ProductSpace":
        if self._swapped is None:
            self._swapped = ProductSpace(self.s2, self.s1, _swapped=self)
        return self._swapped

    # --- keys ------------------------------------------------------------------------
    def key(self, c1: Cell, c2: Cell) -> tuple:
        y = W.multiply(W.inverse(c1.rep), c2.rep)
        ck = (c1.kind, c2.kind, y)
        k = self._key_cache.get(ck)
        if k is None:
            d = S.canonical_double_coset_rep(self.s1.stab_graph(c1.kind), y,
                                             self.s2.stab_graph(c2.kind))
            k = (c1.kind, c2.kind, d)
            self._key_cache[ck] = k
        return k

    def rep(self, key) -> tuple[Cell, Cell]:
        return Cell(key[0], ()), Cell(key[1], key[2])

    def transpose(self, key) -> tuple:
        c1, c2 = self.rep(key)
        t = self.swapped.key(c2, c1)
        return t + key[3:] if len(key) > 3 else t

    def transpose_set(self, cs: CellSet) -> CellSet:
        return CellSet({self.transpose(k) for k in cs.cells},
                       {self.transpose(k) for k in cs.diags})

    def base_cells(self):
        return [(k, Cell(k, ())) for k in self.s1.vertex_kinds() + ("E",)]

    def fiber_group(self, k1: str) -> S.SubgroupGraph:
        return self.s1.stab_graph(k1)

    # --- faces -----------------------------------------------------------------------
    def faces(self, key) -> list:
        c1, c2 = self.rep(key)
        out = []
        if c1.kind == "E":
            for x in self.s1.endpoints(c1):
                out.append(self.key(x, c2))
        if c2.kind == "E":
            for y in self.s2.endpoints(c2):
                out.append(self.key(c1, y))
        return out

    def diagonal_ends(self, dkey) -> tuple:
        c1, c2 = self.rep(dkey)
        o1, t1 = self.s1.endpoints(c1)
        o2, t2 = self.s2.endpoints(c2)
        if dkey[3] == 0:
            return self.key(o1, o2), self.key(t1, t2)
        return self.key(o1, t2), self.key(t1, o2)

    def face_close(self, cs: CellSet) -> None:
        todo = list(cs.cells)
        for dk in cs.diags:
            todo.extend(self.diagonal_ends(dk))
        while todo:
            k = todo.pop()
            cs.cells.add(k)
            for f in self.faces(k):
                if f not in cs.cells:
                    todo.append(f)

    # --- fibers ----------------------------------------------------------------------
    def in_fiber(self, cs: CellSet, x1: Cell, c2: Cell) -> bool:
        return self.key(x1, c2) in cs.cells

    def fiber_point(self, cs: CellSet, x1: Cell) -> Optional[Cell]:
        """Some vertex of T2 in the fiber over vertex ``x1``."""
        for k in sorted(cs.cells):
            if k[0] == x1.kind and k[1] != "E":
                return self.s2.act(x1.rep, Cell(k[1], k[2]))
        return None

    def project_to_fiber(self, cs: CellSet, x1: Cell, z: Cell) -> Cell:
        """Nearest point to ``z`` of the (convex) fiber over ``x1``."""
        target = self.fiber_point(cs, x1)
        if target is None:
            raise ValueError("empty fiber")
        for v in self.s2.path_vertices(z, target):
            if self.in_fiber(cs, x1, v):
                return v
        return target

    def vertical_pass(self, cs: CellSet, use_diags: bool = True) -> bool:
        """Replace each vertical fiber by its hull; return True if anything changed."""
        changed = False
        s2 = self.s2
        for k1, base in self.base_cells():
            G = self.fiber_group(k1)
            if use_diags and k1 == "E":
                ds = sorted(d for d in cs.diags if d[0] == "E")
                full = [k for k in cs.cells if k[0] == "E"]
                if ds:
                    keep = False
                    if len(ds) == 1 and not full:
                        e2 = Cell("E", ds[0][2])
                        st = s2.stabilizer(e2)
                        keep = all(st.accepts(g) for g in G.gens)
                    if not keep:
                        for d in ds:
                            cs.diags.discard(d)
                            cs.cells.add(d[:3])
                        self.face_close(cs)
                        changed = True
            fiber = sorted(k for k in cs.cells if k[0] == k1)
            if not fiber:
                continue
            targets = []
            for k in fiber:
                c2 = Cell(k[1], k[2])
                if c2.kind == "E":
                    targets.extend(s2.endpoints(c2))
                else:
                    targets.append(c2)
            w0 = min(targets)
            targets.extend(s2.act(h, w0) for h in G.gens if h)
            for tgt in targets:
                if tgt == w0:
                    continue
                for v in s2.path_vertices(w0, tgt):
                    kk = self.key(base, v)
                    if kk not in cs.cells:
                        cs.cells.add(kk)
                        changed = True
                for e in s2.geodesic(w0, tgt):
                    kk = self.key(base, e)
                    if kk not in cs.cells:
                        cs.cells.add(kk)
                        changed = True
        if changed:
            self.face_close(cs)
        return changed

    def closure(self, cs: CellSet, cap: int = 10000, use_diags: bool = True) -> CellSet:
        """Least invariant set containing ``cs`` closed under faces and fiber hulls."""
        cs = cs.copy()
        self.face_close(cs)
        sw = self.swapped
        while True:
            changed = self.vertical_pass(cs, use_diags)
            t = self.transpose_set(cs)
            changed |= sw.vertical_pass(t, use_diags)
            cs = sw.transpose_set(t)
            self.face_close(cs)
            if len(cs) > cap:
                raise BudgetExceeded(f"orbit cap {cap} exceeded", partial=cs)
            if not changed:
                return cs

    # --- connectivity ----------------------------------------------------------------
    def _align(self, vkey, target: tuple[Cell, Cell]):
        """Element g with g . rep(vkey) == target (target lies in the orbit vkey)."""
        _, c2 = self.rep(vkey)
        r1, r2 = target[0].rep, target[1].rep
        x = W.multiply(W.inverse(r1), r2)
        K = S.conjugate(self.s2.stab_graph(c2.kind), c2.rep)
        found = S.product_membership(W.multiply(x, W.inverse(c2.rep)),
                                     self.s1.stab_graph(vkey[0]), K)
        if found is None:
            raise AssertionError("cell is not in the claimed orbit")
        return W.multiply(r1, found[0])

    def vertex_stabilizer(self, vkey) -> S.SubgroupGraph:
        c1, c2 = self.rep(vkey)
        return S.intersect(self.s1.stab_graph(c1.kind), self.s2.stabilizer(c2))

    def _connectors(self, cs: CellSet):
        """(endpoint pair) for every edge orbit and diagonal orbit, in absolute cells."""
        out = []
        for k in cs.of_dim(1):
            c1, c2 = self.rep(k)
            if c1.kind == "E":
                a, b = self.s1.endpoints(c1)
                out.append(((a, c2), (b, c2)))
            else:
                a, b = self.s2.endpoints(c2)
                out.append(((c1, a), (c1, b)))
        for dk in sorted(cs.diags):
            c1, c2 = self.rep(dk)
            o1, t1 = self.s1.endpoints(c1)
            o2, t2 = self.s2.endpoints(c2)
            out.append(((o1, o2), (t1, t2)) if dk[3] == 0 else ((o1, t2), (t1, o2)))
        return out

    def is_connected(self, cs: CellSet, with_diags: bool = True) -> bool:
        verts = cs.of_dim(0)
        if not verts:
            return False
        use = cs if with_diags else CellSet(cs.cells, set())
        links = []
        for p, q in self._connectors(use):
            kp, kq = self.key(*p), self.key(*q)
            links.append((kp, self._align(kp, p), kq, self._align(kq, q)))
        c = {verts[0]: ()}
        changed = True
        while changed:
            changed = False
            for kp, ap, kq, aq in links:
                if kp in c and kq not in c:
                    c[kq] = W.multiply(c[kp], W.inverse(ap), aq)
                    changed = True
                elif kq in c and kp not in c:
                    c[kp] = W.multiply(c[kq], W.inverse(aq), ap)
                    changed = True
        if len(c) != len(verts):
            return False
        gens = []
        for v in verts:
            for h in self.vertex_stabilizer(v).gens:
                gens.append(W.conjugate(h, c[v]))
        for kp, ap, kq, aq in links:
            gens.append(W.multiply(c[kp], W.inverse(ap), aq, W.inverse(c[kq])))
        return S.build(gens, self.s1.rank).index() == 1


# --- asymmetric cores -------------------------------------------------------------------

@dataclass
class AsymmetricCore:
    cells: CellSet
    canonical: bool
    choices: dict

    def squares(self) -> list:
        return self.cells.of_dim(2)


def _fixed_point(spec: Splitting, gens, start: Optional[Cell] = None) -> Cell:
    return spec.fixed_point([g for g in gens if g], start)


def asymmetric_core(spec1: Splitting, spec2: Splitting, choices=None,
                    space: Optional[ProductSpace] = None) -> AsymmetricCore:
    """Orbit-level A1: fibers Min_{T2}(G_x) or chosen fixed points, bridged over edges.

    ``choices`` may map a T1 cell kind to a preferred starting vertex of T2 for
    the fixed-point projection; by default the base vertex is used.
    """
    P = space if space is not None else ProductSpace(spec1, spec2)
    choices = dict(choices or {})
    cs = CellSet()
    canonical = True
    picked = {}
    for k1 in spec1.vertex_kinds():
        G = spec1.stab_graph(k1)
        base = Cell(k1, ())
        if MS.is_nontrivial_action(G, spec2):
            q = MS.min_subtree_quotient(G, spec2)
            cs.cells.update(P.key(base, v) for v in q.vertices)
            cs.cells.update(P.key(base, e) for e in q.edges)
        else:
            canonical = False
            y = _fixed_point(spec2, G.gens, choices.get(k1))
            picked[k1] = y
            cs.cells.add(P.key(base, y))
    e1 = spec1.base_edge()
    C1 = spec1.C
    if MS.is_nontrivial_action(C1, spec2):
        q = MS.min_subtree_quotient(C1, spec2)
        cs.cells.update(P.key(e1, v) for v in q.vertices)
        cs.cells.update(P.key(e1, e) for e in q.edges)
    else:
        canonical = False
        a1, b1 = spec1.endpoints(e1)
        z = _fixed_point(spec2, C1.gens, choices.get("E"))
        y = P.project_to_fiber(cs, a1, z)
        y2 = P.project_to_fiber(cs, b1, y)
        picked["E"] = (y, y2)
        d = spec2.distance(y, y2)
        if d == 0:
            cs.cells.add(P.key(e1, y))
        elif d == 1:
            e2, = spec2.geodesic(y, y2)
            o2, _ = spec2.endpoints(e2)
            sq = P.key(e1, e2)
            cs.diags.add(sq + ((0 if y == o2 else 1),))
        else:
            # staircase: horizontal edge at y, then vertical path over b1
            cs.cells.add(P.key(e1, y))
            for v in spec2.path_vertices(y, y2):
                cs.cells.add(P.key(b1, v))
            for e in spec2.geodesic(y, y2):
                cs.cells.add(P.key(b1, e))
    P.face_close(cs)
    return AsymmetricCore(cs, canonical, picked)
