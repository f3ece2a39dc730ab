"""One-edge splittings of a free group and the geometry of their Bass-Serre trees.

Cells of the tree are named by canonical left-coset representatives:

* amalgam ``A *_C B``: vertices ``gA`` (kind ``'A'``) and ``gB`` (kind ``'B'``),
  edge ``gC`` (kind ``'E'``) joins ``gA`` and ``gB``;
* HNN ``A *_C`` with stable letter ``t`` and ``tCt^-1 <= A``: vertices ``gA``,
  edge ``gC`` joins ``gA`` and ``g t^-1 A``.

Every geometric query reduces to a normal form of ``r^-1 r'`` computed by
expressing the word over the vertex-group generators.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import stallings as S
from . import word as W
from .word import Word

AMALGAM = "amalgam"
HNN = "hnn"


class SplittingError(ValueError):
    pass


class NotAMember(ValueError):
    pass


class EllipticError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Cell:
    kind: str  # 'A', 'B' or 'E'
    rep: Word

    @property
    def is_edge(self) -> bool:
        return self.kind == "E"

    def __str__(self):
        return f"{W.format_word(self.rep)}{'C' if self.kind == 'E' else self.kind}"


@dataclass(frozen=True)
class DirectionRef:
    """The direction at the endpoint ``1 - toward`` of ``edge`` that contains ``edge``."""
    edge: Cell
    toward: int  # 0 = origin, 1 = terminus


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class ValidationReport:
    label: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def lines(self):
        for c in self.checks:
            status = "PASS" if c.ok else "FAIL"
            if c.name == "injective":
                status = "ASSERTED" if c.ok else "FAIL"
            yield f"{self.label}: {c.name}: {status}{' - ' + c.detail if c.detail else ''}"


class Splitting:
    """A validated-on-demand one-edge splitting of the free group of rank ``rank``."""

    def __init__(self, rank: int, kind: str, A: Sequence[Word], C: Sequence[Word],
                 B: Sequence[Word] = (), t: Word = (), label: str = "T"):
        if kind not in (AMALGAM, HNN):
            raise SplittingError(f"unknown splitting kind {kind!r}")
        self.rank = rank
        self.kind = kind
        self.label = label
        self.A_gens = [W.reduce(g, rank) for g in A]
        self.B_gens = [W.reduce(g, rank) for g in B]
        self.C_gens = [W.reduce(g, rank) for g in C]
        self.t = W.reduce(t, rank)
        if kind == HNN and not self.t:
            raise SplittingError("HNN splitting needs a nontrivial stable letter")
        if kind == AMALGAM and (t or not B):
            raise SplittingError("amalgam takes B generators and no stable letter")
        self.A = S.build(self.A_gens, rank)
        self.C = S.build(self.C_gens, rank)
        self.B = S.build(self.B_gens, rank) if kind == AMALGAM else None
        if kind == AMALGAM:
            self._gens = self.A_gens + self.B_gens
        else:
            self._gens = self.A_gens + [self.t]
            self.tC = S.build([W.conjugate(c, self.t) for c in self.C_gens], rank)
        self._whole = S.build(self._gens, rank)
        self._nf_cache: dict[Word, tuple] = {}
        self._stab_cache: dict[Cell, S.SubgroupGraph] = {}
        self._ell_cache: dict[Word, int] = {}
        self._cell_cache: dict[tuple, Cell] = {}

    # --- construction helpers ------------------------------------------------
    @classmethod
    def from_json(cls, label: str, data: dict, rank: int) -> "Splitting":
        allowed = {"kind", "A", "B", "C", "t"}
        extra = set(data) - allowed
        if extra:
            raise SplittingError(f"unknown fields in splitting {label}: {sorted(extra)}")
        kind = str(data.get("kind", "")).lower()
        try:
            A = [W.parse(s, rank) for s in data["A"]]
            C = [W.parse(s, rank) for s in data["C"]]
            B = [W.parse(s, rank) for s in data.get("B", [])]
            t = W.parse(data.get("t", "1"), rank)
        except KeyError as exc:
            raise SplittingError(f"splitting {label} lacks field {exc}") from None
        except W.WordError as exc:
            raise SplittingError(str(exc)) from None
        return cls(rank, kind, A, C, B=B, t=t, label=label)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "A": [W.format_word(g) for g in self.A_gens],
               "C": [W.format_word(g) for g in self.C_gens]}
        if self.kind == AMALGAM:
            out["B"] = [W.format_word(g) for g in self.B_gens]
        else:
            out["t"] = W.format_word(self.t)
        return out

    def __repr__(self):
        return f"Splitting({self.label}: {self.to_json()})"

    # --- validation ------------------------------------------------------------
    def validate(self, samples: int = 40, seed: int = 0) -> ValidationReport:
        rep = ValidationReport(self.label)
        bad = [c for c in self.C_gens if not self.A.accepts(c)]
        rep.checks.append(Check("C in A", not bad, _offending(bad)))
        if self.kind == AMALGAM:
            bad = [c for c in self.C_gens if not self.B.accepts(c)]
            rep.checks.append(Check("C in B", not bad, _offending(bad)))
            idx = self._whole.index()
            rep.checks.append(Check("A and B generate", idx == 1, f"index {idx}"))
            degenerate = (all(self.C.accepts(a) for a in self.A_gens)
                          or all(self.C.accepts(b) for b in self.B_gens))
            rep.checks.append(Check("nondegenerate", not degenerate,
                                    "C equals A or B" if degenerate else ""))
        else:
            bad = [c for c in self.C_gens if not self.A.accepts(W.conjugate(c, self.t))]
            rep.checks.append(Check("tCt^-1 in A", not bad, _offending(bad)))
            idx = self._whole.index()
            rep.checks.append(Check("A and t generate", idx == 1, f"index {idx}"))
        if rep.ok:
            ok, detail = self._injectivity_probe(samples, seed)
            rep.checks.append(Check("injective", ok, detail))
        return rep

    def _injectivity_probe(self, samples: int, seed: int):
        """Reduced abstract products must not map to 1; normal forms must round trip."""
        rng = random.Random(seed)

        def element(gens):
            if not gens:
                return ()
            return W.multiply(*[W.power(rng.choice(gens), rng.choice([1, -1]))
                                for _ in range(rng.randint(1, 3))])

        for _ in range(samples):
            w = W.reduce([rng.choice([1, -1]) * rng.randint(1, self.rank)
                          for _ in range(rng.randint(0, 8))])
            if W.multiply(*[s for _, s in self.normal_form(w)]) != w:
                return False, f"round trip failed on {W.format_word(w)}"
            parts = []
            if self.kind == AMALGAM:
                for k in range(rng.randint(2, 5)):
                    gens = self.A_gens if k % 2 == 0 else self.B_gens
                    x = element(gens)
                    if self.C.accepts(x):
                        break
                    parts.append(x)
            else:
                prev = 0
                for _k in range(rng.randint(1, 4)):
                    a = element(self.A_gens)
                    e = rng.choice([1, -1])
                    if prev == 1 and e == -1 and self.C.accepts(a):
                        break
                    if prev == -1 and e == 1 and self.tC.accepts(a):
                        break
                    parts += [a, W.power(self.t, e)]
                    prev = e
            if len(parts) >= 2 and not W.multiply(*parts):
                return False, "a reduced product maps to the identity"
        return True, f"{samples} random probes"

    # --- normal forms ------------------------------------------------------------
    def express(self, w: Sequence[int], gens: Optional[Sequence[Word]] = None) -> tuple:
        return express(w, self._gens if gens is None else gens, self.rank,
                       graph=self._whole if gens is None else None)

    def normal_form(self, w: Sequence[int]) -> tuple:
        """Reduced syllables ``(tag, word)``; tags are 'A', 'B' or 't'."""
        w = tuple(w)
        nf = self._nf_cache.get(w)
        if nf is None:
            expr = self.express(w)
            nA = len(self.A_gens)
            syl = []
            for i in expr:
                k = abs(i)
                if k <= nA:
                    tag, g = "A", self.A_gens[k - 1]
                elif self.kind == AMALGAM:
                    tag, g = "B", self.B_gens[k - nA - 1]
                else:
                    tag, g = "t", self.t
                if i < 0:
                    g = W.inverse(g)
                if tag == "t":
                    syl.append(["t", 1 if i > 0 else -1])
                elif syl and syl[-1][0] == tag:
                    syl[-1][1] = W.multiply(syl[-1][1], g)
                else:
                    syl.append([tag, g])
            if self.kind == AMALGAM:
                nf = self._reduce_amalgam(syl)
            else:
                nf = self._reduce_hnn(syl)
            self._nf_cache[w] = nf
        return nf

    def _reduce_amalgam(self, syl) -> tuple:
        syl = [s for s in syl if s[1]]
        changed = True
        while changed:
            changed = False
            for i in range(len(syl)):
                if i + 1 < len(syl) and syl[i][0] == syl[i + 1][0]:
                    syl[i][1] = W.multiply(syl[i][1], syl[i + 1][1])
                    del syl[i + 1]
                    changed = True
                    break
                if not syl[i][1]:
                    del syl[i]
                    changed = True
                    break
                if len(syl) > 1 and self.C.accepts(syl[i][1]):
                    j = i - 1 if i > 0 else i + 1
                    lo, hi = min(i, j), max(i, j)
                    syl[j][1] = W.multiply(syl[lo][1], syl[hi][1])
                    del syl[i]
                    changed = True
                    break
        return tuple((s[0], s[1]) for s in syl)

    def _reduce_hnn(self, syl) -> tuple:
        """Britton reduction; returns syllables ('A', word) and ('t', +-t)."""
        items = [(s[0], s[1]) for s in syl]
        changed = True
        while changed:
            changed = False
            out = []
            for it in items:
                if it[0] == "A" and not it[1]:
                    continue
                if it[0] == "A" and out and out[-1][0] == "A":
                    out[-1] = ("A", W.multiply(out[-1][1], it[1]))
                    if not out[-1][1]:
                        out.pop()
                    changed = True
                    continue
                out.append(it)
            items = out
            for i, it in enumerate(items):
                if it[0] != "t":
                    continue
                # find the matching letter, with at most one A syllable between
                j = i + 1
                mid: Word = ()
                if j < len(items) and items[j][0] == "A":
                    mid = items[j][1]
                    j += 1
                if j >= len(items) or items[j][0] != "t" or items[j][1] != -it[1]:
                    continue
                if it[1] == 1 and self.C.accepts(mid):
                    new = W.conjugate(mid, self.t)
                elif it[1] == -1 and self.tC.accepts(mid):
                    new = W.conjugate(mid, W.inverse(self.t))
                else:
                    continue
                items = items[:i] + [("A", new)] + items[j + 1:]
                changed = True
                break
        return tuple((tag, self.t if (tag == "t" and x == 1) else
                      W.inverse(self.t) if tag == "t" else x) for tag, x in items)

    # --- cells -------------------------------------------------------------------
    def stab_graph(self, kind: str) -> S.SubgroupGraph:
        if kind == "A":
            return self.A
        if kind == "B":
            if self.B is None:
                raise SplittingError("HNN trees have no B vertices")
            return self.B
        return self.C

    def cell(self, kind: str, g: Sequence[int] = ()) -> Cell:
        g = W.reduce(g)
        c = self._cell_cache.get((kind, g))
        if c is None:
            c = Cell(kind, S.canonical_coset_rep(self.stab_graph(kind), g))
            if len(self._cell_cache) < 200000:
                self._cell_cache[(kind, g)] = c
        return c

    def base_vertex(self) -> Cell:
        return Cell("A", ())

    def base_edge(self) -> Cell:
        return Cell("E", ())

    def vertex_kinds(self) -> tuple:
        return ("A", "B") if self.kind == AMALGAM else ("A",)

    def act(self, g: Sequence[int], c: Cell) -> Cell:
        return self.cell(c.kind, W.multiply(g, c.rep))

    def stabilizer(self, c: Cell) -> S.SubgroupGraph:
        st = self._stab_cache.get(c)
        if st is None:
            st = S.conjugate(self.stab_graph(c.kind), c.rep)
            self._stab_cache[c] = st
        return st

    def endpoints(self, e: Cell) -> tuple[Cell, Cell]:
        if self.kind == AMALGAM:
            return self.cell("A", e.rep), self.cell("B", e.rep)
        return self.cell("A", e.rep), self.cell("A", W.multiply(e.rep, W.inverse(self.t)))

    # --- geodesics -----------------------------------------------------------------
    def _path_from_base(self, side: str, y: Word, side2: str) -> list[Cell]:
        """Edge path from the ``side`` vertex at 1 to ``y`` times the ``side2`` vertex."""
        nf = self.normal_form(y)
        edges: list[Cell] = []
        P: Word = ()
        if self.kind == AMALGAM:
            cur = side
            if len(nf) == 1 and self.C.accepts(nf[0][1]):
                nf = ((side, nf[0][1]),)
            for tag, x in nf:
                if tag != cur:
                    edges.append(self.cell("E", P))
                    cur = tag
                P = W.multiply(P, x)
            if cur != side2:
                edges.append(self.cell("E", P))
        else:
            for tag, x in nf:
                if tag == "A":
                    P = W.multiply(P, x)
                elif x == self.t:
                    P = W.multiply(P, x)
                    edges.append(self.cell("E", P))
                else:
                    edges.append(self.cell("E", P))
                    P = W.multiply(P, x)
        return edges

    def geodesic(self, v: Cell, w: Cell) -> list[Cell]:
        """Edges of the reduced path from vertex ``v`` to vertex ``w``, in order."""
        y = W.multiply(W.inverse(v.rep), w.rep)
        path = self._path_from_base(v.kind, y, w.kind)
        if not v.rep:
            return path
        return [self.act(v.rep, e) for e in path]

    def path_vertices(self, v: Cell, w: Cell) -> list[Cell]:
        out = [v]
        for e in self.geodesic(v, w):
            a, b = self.endpoints(e)
            out.append(b if a == out[-1] else a)
        return out

    def _path_length(self, side: str, y: Word, side2: str) -> int:
        nf = self.normal_form(y)
        if self.kind == HNN:
            return sum(1 for tag, _ in nf if tag == "t")
        if len(nf) == 1 and self.C.accepts(nf[0][1]):
            nf = ((side, nf[0][1]),)
        n, cur = 0, side
        for tag, _ in nf:
            if tag != cur:
                n += 1
                cur = tag
        return n + (cur != side2)

    def distance(self, v: Cell, w: Cell) -> int:
        y = W.multiply(W.inverse(v.rep), w.rep)
        return self._path_length(v.kind, y, w.kind)

    def vertex_at(self, v: Cell, w: Cell, k: int) -> Cell:
        return self.path_vertices(v, w)[k]

    def edge_distance(self, e: Cell, x: Cell) -> int:
        """Distance from vertex ``x`` to the nearer endpoint of edge ``e``."""
        a, b = self.endpoints(e)
        return min(self.distance(a, x), self.distance(b, x))

    # --- isometries -----------------------------------------------------------------
    def displacement(self, g: Sequence[int], v: Optional[Cell] = None) -> int:
        v = self.base_vertex() if v is None else v
        return self.distance(v, Cell(v.kind, W.multiply(g, v.rep)))

    def translation_length(self, g: Sequence[int]) -> int:
        g = W.reduce(g)
        ell = self._ell_cache.get(g)
        if ell is None:
            v = self.base_vertex()
            d1 = self.displacement(g, v)
            d2 = self.displacement(W.multiply(g, g), v)
            ell = self._ell_cache[g] = max(0, d2 - d1)
        return ell

    def is_hyperbolic(self, g: Sequence[int]) -> bool:
        return self.translation_length(g) > 0

    def axis_segment(self, g: Sequence[int]) -> tuple[Cell, list[Cell]]:
        g = W.reduce(g)
        ell = self.translation_length(g)
        if ell == 0:
            raise EllipticError(f"{W.format_word(g)} is elliptic in {self.label}")
        v = self.base_vertex()
        gv = self.act(g, v)
        d = self.distance(v, gv)
        anchor = self.vertex_at(v, gv, (d - ell) // 2)
        return anchor, self.geodesic(anchor, self.act(g, anchor))

    def distance_to_axis(self, g: Sequence[int], v: Cell) -> int:
        ell = self.translation_length(g)
        return (self.displacement(g, v) - ell) // 2

    def in_direction(self, y: Cell, d: DirectionRef) -> bool:
        ends = self.endpoints(d.edge)
        toward, other = ends[d.toward], ends[1 - d.toward]
        return self.distance(y, toward) < self.distance(y, other)

    def end_in_direction(self, h: Sequence[int], d: DirectionRef) -> bool:
        """Does the attracting end of hyperbolic ``h`` lie in direction ``d``?"""
        h = W.reduce(h)
        ell = self.translation_length(h)
        if ell == 0:
            raise EllipticError(f"{W.format_word(h)} is elliptic in {self.label}")
        anchor, _ = self.axis_segment(h)
        base = self.endpoints(d.edge)[1 - d.toward]
        dist = self.distance(anchor, base)
        K = (2 * dist + 2) // ell + 1
        y = self.act(W.power(h, K), anchor)
        return self.in_direction(y, d)

    def fixed_point(self, gens: Sequence[Word], start: Optional[Cell] = None) -> Cell:
        """A vertex fixed by ``<gens>`` (assumed elliptic): successive projections."""
        q = self.base_vertex() if start is None else start
        for _ in range(2):
            for h in gens:
                hq = self.act(h, q)
                if hq == q:
                    continue
                d = self.distance(q, hq)
                if d % 2:
                    raise EllipticError(f"{W.format_word(h)} is hyperbolic in {self.label}")
                q = self.vertex_at(q, hq, d // 2)
        for h in gens:
            if self.act(h, q) != q:
                raise EllipticError("generators have no common fixed point")
        return q


def express(w: Sequence[int], gens: Sequence[Word], rank: int,
            graph: Optional[S.SubgroupGraph] = None) -> tuple:
    """Expression over ``gens`` (signed 1-based indices) evaluating to ``w``."""
    g = graph if graph is not None else S.build(gens, rank)
    e = g.membership(W.reduce(w))
    if e is None:
        raise NotAMember(f"{W.format_word(w)} is not in the subgroup")
    return e


def _offending(bad) -> str:
    return ("offending: " + ", ".join(W.format_word(b) for b in bad)) if bad else ""
