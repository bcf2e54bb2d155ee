"""Oracles for r-boundaries, Folner ratios and the degree-0 uf test.

1. |boundary_2(n x n box)| in the 8-neighbour grid by direct enumeration.
2. Best |boundary_2 U|/|U| over connected U, |U| <= 12, inside ball(4) of the
   free group Cayley tree (the part of ball(6) whose 2-boundaries are not cut
   by the window). A subtree DP over "topmost vertex" is exhaustive over all
   connected subsets; it is cross-checked by brute force for |U| <= 7.
3. uf feasibility as an LP (HiGHS) on the path of length 10 (closed, K = 2)
   and the free group ball of radius 5 (open, K = 1).
"""
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.optimize import linprog


def boundary(adj, U, r=2):
    U = set(U)
    def dist_to(S, x):
        if x in S:
            return 0
        seen, frontier, d = {x}, [x], 0
        while frontier and d < r - 1:
            d += 1
            nxt = []
            for u in frontier:
                for v in adj[u]:
                    if v not in seen:
                        if v in S:
                            return d
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return None  # >= r or unreachable
    comp = set(adj) - U
    return {x for x in adj if dist_to(U, x) is not None and dist_to(comp, x) is not None}


def king(w, h):
    adj = {}
    for x, y in product(range(w), range(h)):
        adj[(x, y)] = [(x + i, y + j) for i in (-1, 0, 1) for j in (-1, 0, 1)
                       if (i or j) and 0 <= x + i < w and 0 <= y + j < h]
    return adj


def free_ball(radius):
    # words as tuples of letters 'a','A','b','B'
    inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
    words, frontier = [()], [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for l in "aAbB":
                if w and w[-1] == inv[l]:
                    continue
                nxt.append(w + (l,))
        words += nxt
        frontier = nxt
    index = set(words)
    adj = {}
    for w in words:
        nb = []
        for l in "aAbB":
            v = w[:-1] if w and w[-1] == inv[l] else w + (l,)
            if v in index:
                nb.append(v)
        adj[w] = nb
    return adj


def brute_best(adj, allowed, kmax):
    """All connected subsets of `allowed` with size <= kmax (ESU)."""
    order = {v: i for i, v in enumerate(sorted(allowed))}
    best = {}
    def extend(sub, ext, root, nbhd):
        k = len(sub)
        b = len(boundary(adj, sub))
        if k not in best or Fraction(b, k) < best[k]:
            best[k] = Fraction(b, k)
        if k == kmax:
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            new = [u for u in adj[w] if u in allowed and order[u] > order[root] and u not in nbhd]
            extend(sub | {w}, ext + new, root, nbhd | set(new) | {w})
    for v in allowed:
        ext = [u for u in adj[v] if u in allowed and order[u] > order[v]]
        extend({v}, ext, v, set(ext) | {v} | set(adj[v]))
    return best


def dp_best(adj, allowed, kmax, degree):
    """Exhaustive over connected subsets via a rooted subtree DP at every top vertex."""
    best = {}
    depth = {v: len(v) for v in adj}
    # g[v][k] = max full over subtrees containing v, inside v's downward subtree
    # (away from the centre), assuming v's parent IS in U (so v may be full).
    # h[v][k] = same assuming parent not in U.
    down = {v: [u for u in adj[v] if u in allowed and depth[u] == depth[v] + 1] for v in allowed}
    up = {v: [u for u in adj[v] if depth[u] == depth[v] - 1] for v in allowed}
    g, h = {}, {}
    for v in sorted(allowed, key=lambda x: -len(x)):
        states = {(1, True): 0}
        for c in down[v]:
            new = {}
            for (k, allc), val in states.items():
                new[(k, False)] = max(new.get((k, False), -1), val)
                for kc, fc in g[c].items():
                    if k + kc <= kmax:
                        new[(k + kc, allc)] = max(new.get((k + kc, allc), -1), val + fc)
            states = new
        full_down = len(down[v]) == degree - len(up[v])
        g[v] = {}
        h[v] = {}
        for (k, allc), val in states.items():
            isfull_p = 1 if allc and full_down and up[v] else 0
            isfull_np = 1 if allc and full_down and not up[v] else 0
            g[v][k] = max(g[v].get(k, -1), val + isfull_p)
            h[v][k] = max(h[v].get(k, -1), val + isfull_np)
    for v in allowed:
        for k, f in h[v].items():
            ratio = Fraction((degree - 2) * k + 2 + k - f, k)
            if k not in best or ratio < best[k]:
                best[k] = ratio
    return best


def uf_feasible(nodes, edges, interior, phi, K, outside_slots):
    """Is there a in [-K, K]^cells with (d a)(v) = phi(v) on interior?

    Cells: window edges (u, v) and, per outside slot of v, a cell (v, out).
    d[x, y] = [y] - [x].
    """
    cells = list(edges) + [(v, None) for v, m in outside_slots.items() for _ in range(m)]
    idx = {v: i for i, v in enumerate(interior)}
    A = np.zeros((len(interior), len(cells)))
    for j, (x, y) in enumerate(cells):
        if y is not None and y in idx:
            A[idx[y], j] += 1
        if x in idx:
            A[idx[x], j] -= 1
    b = np.array([phi[v] for v in interior], float)
    res = linprog(np.zeros(len(cells)), A_eq=A, b_eq=b, bounds=(-K, K), method="highs")
    return res.status == 0


if __name__ == "__main__":
    for n in (3, 5, 10):
        adj = king(n + 6, n + 6)
        U = [(x + 3, y + 3) for x in range(n) for y in range(n)]
        print(f"king grid: |boundary_2({n}x{n} box)| = {len(boundary(adj, U))}")

    tree = free_ball(6)
    interior = {v for v in tree if len(v) <= 4}
    small = brute_best(tree, {v for v in tree if len(v) <= 2}, 7)
    dp_small = dp_best(tree, {v for v in tree if len(v) <= 2}, 7, 4)
    assert small == dp_small, (small, dp_small)
    print("brute force and DP agree on ball(2), |U| <= 7:", sorted(small.items()))
    best = dp_best(tree, interior, 12, 4)
    overall = min(best.values())
    print("free group, U in ball(4), per size:", {k: str(v) for k, v in sorted(best.items())})
    print(f"free group, best ratio |U| <= 12: {overall}")

    for L, K in ((10, 2), (6, 2), (10, 4)):
        nodes = list(range(L))
        edges = [(i, i + 1) for i in range(L - 1)]
        inner = nodes[1:-1]
        ok = uf_feasible(nodes, edges, inner, {v: 1 for v in nodes}, K, {})
        print(f"path L={L} closed K={K}: {'feasible' if ok else 'infeasible'}")

    ball5 = free_ball(5)
    nodes = list(ball5)
    edges = [(u, v) for u in ball5 for v in ball5[u] if len(v) == len(u) + 1]
    slots = {v: 4 - len(ball5[v]) for v in nodes if len(ball5[v]) < 4}
    ok = uf_feasible(nodes, edges, nodes, {v: 1 for v in nodes}, 1, slots)
    print(f"free group ball(5) open K=1: {'feasible' if ok else 'infeasible'}")
    ok = uf_feasible(nodes, edges, [v for v in nodes if len(ball5[v]) == 4], {v: 1 for v in nodes}, 1, {})
    print(f"free group ball(5) closed K=1: {'feasible' if ok else 'infeasible'}")
