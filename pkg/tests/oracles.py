"""Slow, independent reference computations used as test oracles."""

from __future__ import annotations

import itertools
from fractions import Fraction


def line_diameter(coords):
    return max(coords) - min(coords)


def circuit_oracle(d0, pts):
    """Minimum closed tour over every ordering of ``pts`` (no symmetry pruning)."""
    if len(set(pts)) == 1:
        return Fraction(0)
    best = None
    for order in itertools.permutations(pts):
        cost = sum((d0[order[i]][order[(i + 1) % len(order)]] for i in range(len(order))), Fraction(0))
        best = cost if best is None else min(best, cost)
    return best


def reference_gdk(instance):
    """Literal primal-dual loop: dual variables y_S per set, loads summed over
    every set whose cut separates the pair. Returns (groups, alg, dual)."""
    from kmpmd.metrics import k_distance

    k, m = instance.k, instance.m
    reqs = instance.requests
    r = Fraction(1) / (instance.gamma * k * k)
    space = instance.space

    def pair_cost(u, v):
        p, q = reqs[u].pos, reqs[v].pos
        d = k_distance(space, [p] + [q] * (k - 1)) + k_distance(space, [q] + [p] * (k - 1))
        return d + abs(reqs[u].atime - reqs[v].atime)

    cap = {(u, v): pair_cost(u, v) * r for u in range(m) for v in range(u + 1, m)}
    all_sets: list[frozenset] = []
    y: list[Fraction] = []
    active: dict[int, int] = {}  # request -> index into all_sets
    free: dict[int, set] = {}
    groups = []
    tau = reqs[0].atime
    nxt = 0

    def load(u, v):
        return sum((y[i] for i, s in enumerate(all_sets) if (u in s) != (v in s)), Fraction(0))

    while len(groups) * k < m:
        while nxt < m and reqs[nxt].atime == tau:
            all_sets.append(frozenset([nxt]))
            y.append(Fraction(0))
            sid = len(all_sets) - 1
            active[nxt] = sid
            free[sid] = {nxt}
            nxt += 1
        # merge everything tight at tau, in id order
        changed = True
        while changed:
            changed = False
            for u in range(nxt):
                for v in range(u + 1, nxt):
                    if active[u] != active[v] and load(u, v) == cap[(u, v)]:
                        a, b = active[u], active[v]
                        all_sets.append(all_sets[a] | all_sets[b])
                        y.append(Fraction(0))
                        sid = len(all_sets) - 1
                        free[sid] = free.pop(a) | free.pop(b)
                        for w in all_sets[sid]:
                            active[w] = sid
                        if len(free[sid]) >= k:
                            pick = sorted(free[sid], key=lambda w: (reqs[w].atime, w))[:k]
                            free[sid] -= set(pick)
                            groups.append((tuple(sorted(pick)), tau))
                        changed = True
        if len(groups) * k == m:
            break
        growing = {sid for sid in set(active.values()) if free[sid]}
        best = None
        for u in range(nxt):
            for v in range(u + 1, nxt):
                a, b = active[u], active[v]
                if a == b:
                    continue
                rate = r * ((a in growing) + (b in growing))
                if rate:
                    dt = (cap[(u, v)] - load(u, v)) / rate
                    best = dt if best is None else min(best, dt)
        t_next = tau + best if best is not None else None
        if nxt < m and (t_next is None or reqs[nxt].atime <= t_next):
            t_next = reqs[nxt].atime
        dt = t_next - tau
        for sid in growing:
            y[sid] += r * dt
        tau = t_next

    alg = Fraction(0)
    for members, t in groups:
        alg += k_distance(space, [reqs[w].pos for w in members])
        alg += sum((t - reqs[w].atime for w in members), Fraction(0))
    dual = sum(((len(s) % k) * (k - len(s) % k) * y[i] for i, s in enumerate(all_sets)), Fraction(0))
    return groups, alg, dual
