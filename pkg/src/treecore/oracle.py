"""Brute-force ground truth: balls, finite tree windows, approximate heaviness.

Nothing here is clever.  Windows are built from translates of a handful of
short paths and measured by breadth-first search, so they can be compared
against the normal-form geometry of :mod:`treecore.bass_serre`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import word as W
from .bass_serre import Cell, Splitting


def ball(rank: int, L: int) -> list:
    """All reduced words of length <= L in shortlex order."""
    out = [()]
    layer = [()]
    order = W.letters(rank)
    for _ in range(L):
        nxt = []
        for w in layer:
            for x in order:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        out.extend(nxt)
        layer = nxt
    return out


def ball_size(rank: int, L: int) -> int:
    n = 2 * rank
    return 1 + sum(n * (n - 1) ** (k - 1) for k in range(1, L + 1))


@dataclass
class TreeWindow:
    spec: Splitting
    radius: int
    edges: set = field(default_factory=set)
    adj: dict = field(default_factory=dict)

    @property
    def vertices(self):
        return set(self.adj)

    def add_edge(self, e: Cell):
        if e in self.edges:
            return
        self.edges.add(e)
        a, b = self.spec.endpoints(e)
        self.adj.setdefault(a, set()).add((b, e))
        self.adj.setdefault(b, set()).add((a, e))

    def bfs(self, v: Cell) -> dict:
        dist = {v: 0}
        q = deque([v])
        while q:
            u = q.popleft()
            for w, _ in self.adj.get(u, ()):
                if w not in dist:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return dist

    def root(self) -> None:
        """Root the window at the base vertex: parent pointers and depths."""
        v0 = self.spec.base_vertex()
        self.parent = {v0: None}
        self.depth = {v0: 0}
        q = deque([v0])
        while q:
            u = q.popleft()
            for w, e in sorted(self.adj.get(u, ())):
                if w not in self.parent:
                    self.parent[w] = (u, e)
                    self.depth[w] = self.depth[u] + 1
                    q.append(w)
        children: dict = {}
        for w, pe in self.parent.items():
            if pe is not None:
                children.setdefault(pe[0], []).append(w)
        self.tin, self.tout = {}, {}
        clock = 0
        stack = [(v0, False)]
        while stack:
            u, done = stack.pop()
            if done:
                self.tout[u] = clock
                continue
            self.tin[u] = clock
            clock += 1
            stack.append((u, True))
            for w in sorted(children.get(u, ()), reverse=True):
                stack.append((w, False))

    def ancestors(self, v: Cell) -> list:
        out = [v]
        while self.parent[v] is not None:
            v = self.parent[v][0]
            out.append(v)
        return out

    def _climb(self, v: Cell, w: Cell):
        up_v, up_w = [], []
        while self.depth[v] > self.depth[w]:
            u, e = self.parent[v]
            up_v.append(e)
            v = u
        while self.depth[w] > self.depth[v]:
            u, e = self.parent[w]
            up_w.append(e)
            w = u
        while v != w:
            u, e = self.parent[v]
            up_v.append(e)
            v = u
            u, e = self.parent[w]
            up_w.append(e)
            w = u
        return up_v, up_w

    def distance(self, v: Cell, w: Cell) -> Optional[int]:
        if v not in self.depth or w not in self.depth:
            return None
        a, b = self._climb(v, w)
        return len(a) + len(b)

    def path(self, v: Cell, w: Cell) -> Optional[list]:
        """Edge path inside the window, or None when a vertex is missing."""
        if v not in self.depth or w not in self.depth:
            return None
        a, b = self._climb(v, w)
        return a + b[::-1]


def tree_window(spec: Splitting, L: int) -> TreeWindow:
    """Union of g·(short paths from the base vertex to x·base) over g in ball(L-1)."""
    win = TreeWindow(spec, L)
    v0 = spec.base_vertex()
    win.adj.setdefault(v0, set())
    if L == 0:
        win.root()
        return win
    pieces = [spec.geodesic(v0, spec.act((x,), v0)) for x in W.letters(spec.rank)]
    pieces.append([spec.base_edge()])
    for g in ball(spec.rank, L - 1):
        for piece in pieces:
            for e in piece:
                win.add_edge(spec.act(g, e))
    win.root()
    return win


class OrbitTable:
    """Orbit points g·v0 for g in ball(L), measured inside the radius-L window."""

    def __init__(self, spec: Splitting, L: int):
        self.spec = spec
        self.L = L
        self.window = tree_window(spec, L)
        v0 = spec.base_vertex()
        self.words = ball(spec.rank, L)
        self.points = [spec.act(g, v0) for g in self.words]

    def depth_in(self, i: int, d) -> int:
        """Depth of point i inside direction d, or -1 if it lies outside."""
        ends = self.spec.endpoints(d.edge)
        toward, base = ends[d.toward], ends[1 - d.toward]
        x = self.points[i]
        dt = self.window.distance(x, toward)
        db = self.window.distance(x, base)
        if dt is None or db is None or dt >= db:
            return -1
        return db

    def deep_mask(self, d, D: int):
        """Boolean array: points inside direction d at depth >= D."""
        w = self.window
        if not hasattr(self, "_tin"):
            self._tin = np.array([w.tin[x] for x in self.points])
            self._dep = np.array([w.depth[x] for x in self.points])
        ends = self.spec.endpoints(d.edge)
        toward, base = ends[d.toward], ends[1 - d.toward]
        if toward not in w.depth or base not in w.depth:
            return np.zeros(len(self.points), dtype=bool)
        if w.depth[toward] > w.depth[base]:
            # toward is the child: the direction is its subtree
            inside = (self._tin >= w.tin[toward]) & (self._tin < w.tout[toward])
            return inside & (self._dep - w.depth[base] >= D)
        child = base
        outside = ~((self._tin >= w.tin[child]) & (self._tin < w.tout[child]))
        lca = np.full(len(self.points), -1)
        for u in reversed(w.ancestors(child)):
            lca = np.where((self._tin >= w.tin[u]) & (self._tin < w.tout[u]), w.depth[u], lca)
        dist = self._dep + w.depth[child] - 2 * lca
        return outside & (dist >= D)


_TABLES: dict = {}


def orbit_table(spec: Splitting, L: int) -> OrbitTable:
    key = (id(spec), L)
    t = _TABLES.get(key)
    if t is None or t.spec is not spec:
        t = _TABLES[key] = OrbitTable(spec, L)
    return t


def approx_heavy(spec1: Splitting, spec2: Splitting, q, L: int, D: int):
    """First g in ball(L) with g·* in quadrant q, at depth >= D in both factors."""
    t1, t2 = orbit_table(spec1, L), orbit_table(spec2, L)
    m = t1.deep_mask(q.d1, D) & t2.deep_mask(q.d2, D)
    if not m.any():
        return None
    return t1.words[int(np.argmax(m))]


def window_translation_length(win: TreeWindow, g) -> Optional[int]:
    """min over window vertices v with g·v also in the window of d(v, g·v)."""
    best = None
    for v in win.vertices:
        gv = win.spec.act(g, v)
        if gv not in win.adj:
            continue
        d = win.distance(v, gv)
        if d is not None and (best is None or d < best):
            best = d
    return best


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""
    trace: list = field(default_factory=list)


@dataclass
class Report:
    radius: int
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_json(self) -> dict:
        return {"radius": self.radius, "ok": self.ok,
                "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail, "trace": c.trace}
                           for c in self.checks]}


def _quadrants(e1: Cell, e2: Cell):
    from .corecomplex import square_quadrants
    return square_quadrants(e1, e2)


def _fiber_convex(P, cs, win2: TreeWindow, base: Cell, trace: list) -> bool:
    """Window check: the fiber of ``cs`` over ``base`` contains every window path between its vertices."""
    keys = cs.cells
    verts = [v for v in sorted(win2.vertices) if P.key(base, v) in keys]
    if not verts:
        return True
    root = verts[0]
    for v in verts[1:]:
        path = win2.path(root, v)
        if path is None:
            continue
        cur = root
        for e in path:
            a, b = win2.spec.endpoints(e)
            cur = b if a == cur else a
            if P.key(base, e) not in keys or P.key(base, cur) not in keys:
                trace.append({"base": str(base), "from": str(root), "to": str(v),
                              "missing": str(e)})
                return False
    return True


def crosscheck(core, spec1: Splitting, spec2: Splitting, L: int = 6,
               near: int = 3) -> Report:
    """Compare a computed core with brute force on balls and windows of radius L."""
    from .product import CellSet

    P = core.space
    rep = Report(L)
    lower, upper = core.lower, core.upper
    # invariants of the artifact itself
    rep.checks.append(CheckResult("lower within upper", lower.cells <= upper.cells,
                                  trace=[str(k) for k in sorted(lower.cells - upper.cells)]))
    exact_ok = (core.status == "EXACT") == (lower.cells == upper.cells)
    rep.checks.append(CheckResult("status matches bounds", exact_ok, core.status))
    # (i) every lower square is approximately heavy in all four quadrants
    D = max(1, L // 4)
    bad = []
    for k in lower.of_dim(2):
        e1, e2 = P.rep(k)
        for q in _quadrants(e1, e2):
            if approx_heavy(spec1, spec2, q, L, D) is None:
                bad.append({"square": str(k), "quadrant": [q.d1.toward, q.d2.toward]})
                break
    rep.checks.append(CheckResult("lower squares heavy", not bad, f"depth {D}", bad))
    # (ii) no square outside upper is deep in all four quadrants
    D2 = max(2, L // 2)
    win2 = tree_window(spec2, L)
    e1 = spec1.base_edge()
    v2 = spec2.base_vertex()
    seen = set()
    bad = []
    for e2 in sorted(win2.edges):
        k = P.key(e1, e2)
        if k in seen or k in upper.cells:
            continue
        a, b = spec2.endpoints(e2)
        if min(len(win2.path(v2, a) or ()), len(win2.path(v2, b) or ())) > near:
            continue
        seen.add(k)
        e1r, e2r = P.rep(k)
        if all(approx_heavy(spec1, spec2, q, L, D2) is not None for q in _quadrants(e1r, e2r)):
            bad.append({"square": str(k)})
    rep.checks.append(CheckResult("no heavy square outside upper", not bad,
                                  f"{len(seen)} squares at depth {D2}", bad))
    # (iii) fibers of upper are convex inside the windows
    trace: list = []
    ok = True
    cs = CellSet(upper.cells)
    for kind, base in P.base_cells():
        ok &= _fiber_convex(P, cs, win2, base, trace)
    win1 = tree_window(spec1, L)
    t = P.swapped
    tcs = P.transpose_set(cs)
    for kind, base in t.base_cells():
        ok &= _fiber_convex(t, tcs, win1, base, trace)
    rep.checks.append(CheckResult("upper fibers convex", ok, trace=trace))
    return rep


def parallelogram_count(M) -> int:
    """Integer points in the half-open parallelogram spanned by the columns of a 2x2 M."""
    (p, q), (r, s) = M
    det = p * s - q * r
    if det == 0:
        raise ValueError("degenerate parallelogram")
    xs = [0, p, q, p + q]
    ys = [0, r, s, r + s]
    count = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            # coordinates (u, v) = M^-1 (x, y) scaled by det
            u = s * x - q * y
            v = -r * x + p * y
            if det < 0:
                u, v = -u, -v
            if 0 <= u < abs(det) and 0 <= v < abs(det):
                count += 1
    return count


def minor_divisors(M) -> tuple:
    """Elementary divisors of a 2 x n integer matrix from gcds of its minors."""
    from math import gcd
    rows = [list(r) for r in M]
    n = len(rows[0])
    g1 = 0
    for r in rows:
        for x in r:
            g1 = gcd(g1, x)
    g2 = 0
    for i in range(n):
        for j in range(i + 1, n):
            g2 = gcd(g2, rows[0][i] * rows[1][j] - rows[0][j] * rows[1][i])
    if g1 == 0:
        return (0, 0)
    return (g1, g2 // g1)
