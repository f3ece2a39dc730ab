"""Folded subgroup graphs (Stallings automata) for subgroups of a free group.

A :class:`SubgroupGraph` is a folded core graph with a base state.  Each
directed transition carries an *expression*: a word over the subgroup's own
generators (signed 1-based indices).  Reading a base loop and multiplying the
expressions met along the way gives a witness for membership.
"""
from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Optional, Sequence

from . import word as W
from .word import Word

INFINITE = math.inf

Expression = tuple  # signed 1-based generator indices


def evaluate(expr: Sequence[int], gens: Sequence[Word]) -> Word:
    return W.multiply(*[gens[i - 1] if i > 0 else W.inverse(gens[-i - 1]) for i in expr])


def _inv(e):
    return None if e is None else tuple(-i for i in reversed(e))


def _mul(a, b):
    if a is None:
        return None
    return W.multiply(a, b)


class SubgroupGraph:
    """Immutable folded core graph; build instances with :func:`build`."""

    def __init__(self, rank: int, n_states: int, base: int, edges, gens: Sequence[Word],
                 marked: Sequence[int] = ()):
        self.rank = rank
        self.n_states = n_states
        self.base = base
        self.gens = tuple(tuple(g) for g in gens)
        self.marked = tuple(marked)
        # edges: (u, x>0, v, expr)
        self.edges = tuple(edges)
        self.out: list[dict[int, int]] = [dict() for _ in range(n_states)]
        self._expr: dict[tuple[int, int], Optional[Expression]] = {}
        for u, x, v, e in self.edges:
            self.out[u][x] = v
            self.out[v][-x] = u
            self._expr[(u, x)] = e
            self._expr[(v, -x)] = _inv(e)
        self._dist_cache: dict[int, list[int]] = {}

    def __repr__(self):
        gens = ", ".join(W.format_word(g) for g in self.gens)
        return f"SubgroupGraph(<{gens}>, states={self.n_states}, edges={len(self.edges)})"

    # --- reading -----------------------------------------------------------
    def read(self, w: Sequence[int], start: Optional[int] = None) -> tuple[int, int]:
        """Follow ``w`` from ``start``; return (state reached, letters consumed)."""
        s = self.base if start is None else start
        for i, x in enumerate(w):
            nxt = self.out[s].get(x)
            if nxt is None:
                return s, i
            s = nxt
        return s, len(w)

    def read_full(self, w: Sequence[int], start: Optional[int] = None) -> Optional[int]:
        s, k = self.read(w, start)
        return s if k == len(w) else None

    def accepts(self, w: Sequence[int]) -> bool:
        return self.read_full(w) == self.base

    def membership(self, w: Sequence[int]) -> Optional[Expression]:
        """Witness expression over ``self.gens`` evaluating to ``w``, or None."""
        s = self.base
        parts = []
        for x in w:
            nxt = self.out[s].get(x)
            if nxt is None:
                return None
            parts.append(self._expr[(s, x)])
            s = nxt
        if s != self.base:
            return None
        return W.multiply(*parts)

    # --- invariants ----------------------------------------------------------
    def index(self):
        """Index in the ambient free group, or INFINITE."""
        if all(len(d) == 2 * self.rank for d in self.out):
            return self.n_states
        return INFINITE

    def subgroup_rank(self) -> int:
        return len(self.edges) - self.n_states + 1

    def is_trivial(self) -> bool:
        return not self.edges

    def is_full(self) -> bool:
        return self.index() == 1

    # --- shortest paths ----------------------------------------------------
    def dist_to(self, target: int) -> list[int]:
        d = self._dist_cache.get(target)
        if d is None:
            d = [-1] * self.n_states
            d[target] = 0
            q = deque([target])
            while q:
                u = q.popleft()
                for v in self.out[u].values():
                    if d[v] < 0:
                        d[v] = d[u] + 1
                        q.append(v)
            self._dist_cache[target] = d
        return d

    def lex_path(self, src: int, dst: int) -> Word:
        """Shortlex-least label of a path from ``src`` to ``dst``."""
        d = self.dist_to(dst)
        if d[src] < 0:
            raise ValueError("states are not connected")
        out = []
        s = src
        order = W.letters(self.rank)
        while s != dst:
            for x in order:
                v = self.out[s].get(x)
                if v is not None and d[v] == d[s] - 1:
                    out.append(x)
                    s = v
                    break
        return tuple(out)

    def to_dot(self, name: str = "H") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for s in range(self.n_states):
            shape = "doublecircle" if s == self.base else "circle"
            lines.append(f"  s{s} [shape={shape}];")
        for u, x, v, _ in self.edges:
            lines.append(f'  s{u} -> s{v} [label="{W.format_word((x,))}"];')
        lines.append("}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# folding

def _fold(n_states: int, edges, base: int, marked: Sequence[int] = (), track: bool = True):
    """Fold a labelled graph; return (n, edges, base, marked) of the pruned core."""
    E = []
    for u, x, v, e in edges:
        if not track:
            e = None
        if x < 0:
            u, v, x, e = v, u, -x, _inv(e)
        E.append([u, x, v, e])
    parent = list(range(n_states))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    protected = {base}
    while True:
        seen: dict[tuple[int, int], tuple[int, int]] = {}
        conflict = None
        for idx, (u, x, v, e) in enumerate(E):
            for key, side in (((u, x), 0), ((v, -x), 1)):
                if key in seen:
                    conflict = (key, seen[key], (idx, side))
                    break
                seen[key] = (idx, side)
            if conflict:
                break
        if conflict is None:
            break
        _, (i1, s1), (i2, s2) = conflict

        def oriented(i, s):
            u, x, v, e = E[i]
            return (v, e) if s == 0 else (u, _inv(e))

        t1, x1 = oriented(i1, s1)
        t2, x2 = oriented(i2, s2)
        del E[i2]
        if t1 == t2:
            continue
        keep, drop = t1, t2
        c = _mul(_inv(x1), x2) if track else None
        if drop in protected and keep not in protected:
            keep, drop = drop, keep
            c = _inv(c)
        if drop in protected:
            protected.add(keep)
        parent[drop] = keep
        cinv = _inv(c)
        for edge in E:
            u, x, v, e = edge
            if u == drop:
                edge[0] = keep
                if track:
                    e = W.multiply(c, e)
            if v == drop:
                edge[2] = keep
                if track:
                    e = W.multiply(e, cinv)
            edge[3] = e
    base = find(base)
    marked = [find(m) for m in marked]
    keep_alive = {base, *marked}
    # prune hairs
    while True:
        deg: dict[int, int] = {}
        for u, x, v, e in E:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        dead = {s for s, d in deg.items() if d == 1 and s not in keep_alive}
        if not dead:
            break
        E = [edge for edge in E if edge[0] not in dead and edge[2] not in dead]
    states = sorted({base, *marked} | {edge[0] for edge in E} | {edge[2] for edge in E})
    ren = {s: i for i, s in enumerate(states)}
    new_edges = [(ren[u], x, ren[v], e) for u, x, v, e in E]
    return len(states), new_edges, ren[base], [ren[m] for m in marked]


def _petal_edges(gens: Sequence[Word], track: bool):
    n = 1
    edges = []
    for k, g in enumerate(gens, start=1):
        if not g:
            continue
        prev = 0
        for j, x in enumerate(g):
            last = j == len(g) - 1
            nxt = 0 if last else n
            if not last:
                n += 1
            edges.append((prev, x, nxt, ((k,) if j == 0 else ()) if track else None))
            prev = nxt
    return n, edges


def build(gens: Iterable[Sequence[int]], rank: int, track: bool = True) -> SubgroupGraph:
    """Folded core graph of the subgroup generated by ``gens``."""
    gens = [W.reduce(g, rank) for g in gens]
    n, edges = _petal_edges(gens, track)
    n, edges, base, _ = _fold(n, edges, 0, track=track)
    return SubgroupGraph(rank, n, base, edges, gens)


def from_core(rank: int, n_states: int, base: int, edges) -> SubgroupGraph:
    """Wrap an already folded core graph, choosing a spanning-tree free basis."""
    parent: dict[int, tuple[int, int]] = {base: (-1, 0)}
    q = deque([base])
    adj: dict[int, list[tuple[int, int]]] = {}
    for u, x, v, _ in edges:
        adj.setdefault(u, []).append((x, v))
        adj.setdefault(v, []).append((-x, u))
    while q:
        u = q.popleft()
        for x, v in sorted(adj.get(u, []), key=lambda t: W.letter_key(t[0])):
            if v not in parent:
                parent[v] = (u, x)
                q.append(v)

    def path(s):
        out = []
        while s != base:
            p, x = parent[s]
            out.append(x)
            s = p
        return tuple(reversed(out))

    gens = []
    new_edges = []
    for u, x, v, _ in edges:
        if parent.get(v) == (u, x) or parent.get(u) == (v, -x):
            new_edges.append((u, x, v, ()))
        else:
            gens.append(W.multiply(path(u), (x,), W.inverse(path(v))))
            new_edges.append((u, x, v, (len(gens),)))
    return SubgroupGraph(rank, n_states, base, new_edges, gens)


def trivial(rank: int) -> SubgroupGraph:
    return SubgroupGraph(rank, 1, 0, [], [])


def full(rank: int) -> SubgroupGraph:
    return build([(i,) for i in range(1, rank + 1)], rank)


def intersect(H: SubgroupGraph, K: SubgroupGraph) -> SubgroupGraph:
    """Core of the product automaton at (base, base)."""
    start = (H.base, K.base)
    ids = {start: 0}
    q = deque([start])
    edges = []
    while q:
        p = q.popleft()
        a, b = p
        for x, a2 in H.out[a].items():
            if x < 0:
                continue
            b2 = K.out[b].get(x)
            if b2 is None:
                continue
            t = (a2, b2)
            if t not in ids:
                ids[t] = len(ids)
                q.append(t)
            edges.append((ids[p], x, ids[t], None))
        for x, a2 in H.out[a].items():
            if x > 0:
                continue
            b2 = K.out[b].get(x)
            if b2 is not None:
                t = (a2, b2)
                if t not in ids:
                    ids[t] = len(ids)
                    q.append(t)
    n, edges, base, _ = _fold(len(ids), edges, 0, track=False)
    return from_core(H.rank, n, base, edges)


def conjugate(H: SubgroupGraph, g: Sequence[int]) -> SubgroupGraph:
    """Graph of g H g^-1; witnesses keep H's generator indices."""
    g = tuple(g)
    if not g:
        return H
    return build([W.conjugate(h, g) for h in H.gens], H.rank)


def _product_search(A: SubgroupGraph, B: SubgroupGraph, a0: int, b0: int,
                    a1: int, b1: int) -> Optional[Word]:
    """Word read simultaneously from (a0, b0) to (a1, b1), BFS in letter order."""
    start = (a0, b0)
    goal = (a1, b1)
    prev = {start: None}
    q = deque([start])
    order = W.letters(A.rank)
    while q:
        p = q.popleft()
        if p == goal:
            out = []
            while prev[p] is not None:
                p, x = prev[p]
                out.append(x)
            return tuple(reversed(out))
        a, b = p
        for x in order:
            a2 = A.out[a].get(x)
            if a2 is None:
                continue
            b2 = B.out[b].get(x)
            if b2 is None:
                continue
            t = (a2, b2)
            if t not in prev:
                prev[t] = (p, x)
                q.append(t)
    return None


def product_membership(w: Sequence[int], A: SubgroupGraph, B: SubgroupGraph
                       ) -> Optional[tuple[Word, Word]]:
    """Return (a, b) with a in A, b in B and a*b == w, or None."""
    w = tuple(w)
    for i in range(len(w) + 1):
        p, s = w[:i], w[i:]
        alpha = A.read_full(p)
        if alpha is None:
            break
        beta = B.read_full(W.inverse(s))
        if beta is None:
            continue
        c = _product_search(A, B, alpha, beta, A.base, B.base)
        if c is not None:
            return W.multiply(p, c), W.multiply(W.inverse(c), s)
    return None


def double_coset_member(g2: Sequence[int], H: SubgroupGraph, g: Sequence[int],
                        K: SubgroupGraph) -> bool:
    """True iff g2 lies in H g K."""
    g = tuple(g)
    Hg = conjugate(H, W.inverse(g))
    return product_membership(W.multiply(W.inverse(g), g2), Hg, K) is not None


def canonical_double_coset_rep(H: Optional[SubgroupGraph], g: Sequence[int],
                               K: SubgroupGraph) -> Word:
    """Shortlex-least element of H g K (H=None means the trivial group)."""
    if H is None:
        H = trivial(K.rank)
    g = tuple(g)
    alpha, i = H.read(g)
    u = g[i:]
    beta, j = K.read(W.inverse(u))
    m = u[:len(u) - j]
    if m:
        return H.lex_path(H.base, alpha) + m + K.lex_path(beta, K.base)
    dH = H.dist_to(H.base)
    dK = K.dist_to(K.base)
    seen = {(alpha, beta)}
    q = deque([(alpha, beta)])
    best_cost = None
    best: list[tuple[int, int]] = []
    while q:
        a, b = q.popleft()
        cost = dH[a] + dK[b]
        if best_cost is None or cost < best_cost:
            best_cost, best = cost, [(a, b)]
        elif cost == best_cost:
            best.append((a, b))
        for x, a2 in H.out[a].items():
            b2 = K.out[b].get(x)
            if b2 is not None and (a2, b2) not in seen:
                seen.add((a2, b2))
                q.append((a2, b2))
    cands = [H.lex_path(H.base, a) + K.lex_path(b, K.base) for a, b in best]
    return min(cands, key=W.shortlex_key)


def canonical_coset_rep(H: SubgroupGraph, g: Sequence[int]) -> Word:
    """Shortlex-least word w with w H == g H."""
    return canonical_double_coset_rep(None, g, H)
