"""Post-hoc audits of a completed engine run.

Each audit recomputes what it checks from the recorded set history and the
per-event growth snapshots instead of trusting the engine's running totals.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .gdk import PairCosts, RunResult
from .instances import Instance
from .metrics import DMAX, LINE


@dataclass
class AuditReport:
    name: str
    checks: int = 0
    violations: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def check(self, condition: bool, **witness) -> None:
        self.checks += 1
        if not condition:
            self.violations.append(witness)


class _History:
    """Merge forest of every set the run created."""

    def __init__(self, result: RunResult, m: int):
        self.sets = result.sets
        self.leaf: list[Optional[int]] = [None] * m
        for s in self.sets:
            if s.parents is None:
                self.leaf[s.members[0]] = s.id
        # lowest set containing both endpoints, if they ever joined
        self.join: dict[tuple[int, int], int] = {}
        for s in self.sets:
            if s.parents is not None:
                a, b = (self.sets[p].members for p in s.parents)
                for x in a:
                    for y in b:
                        self.join[(min(x, y), max(x, y))] = s.id

    def chain_sums(self, g: tuple[Fraction, ...]) -> list[Fraction]:
        """cum[S] = sum of g over S and every later set containing S, restricted
        to sets that exist in snapshot ``g``."""
        n = len(g)
        cum = [Fraction(0)] * n
        for sid in range(n - 1, -1, -1):
            child = self.sets[sid].child
            up = cum[child] if child is not None and child < n else 0
            cum[sid] = g[sid] + up
        return cum


def _require_full(result: RunResult) -> None:
    if result.trace_level != "full":
        raise ValueError("this audit needs a run with trace_level='full'")


def audit_dual_feasibility(result: RunResult, instance: Instance) -> AuditReport:
    """Every arrived pair satisfies ``rate * load(e) <= opt_cost(e) / (gamma k^2)``
    at every recorded event time, the last one being termination."""
    _require_full(result)
    rep = AuditReport("dual_feasibility")
    hist = _History(result, instance.m)
    costs = PairCosts(instance)
    cap_scale = 1 / (instance.gamma * instance.k * instance.k)
    caps = {}
    for u in range(instance.m):
        for v in range(u + 1, instance.m):
            caps[(u, v)] = costs.edge(u, v) * cap_scale
    r = result.rate
    worst = None
    for ev in result.events:
        cum = hist.chain_sums(ev.g)
        n = len(ev.g)
        arrived = [u for u in range(instance.m) if hist.leaf[u] is not None and hist.leaf[u] < n]
        for i, u in enumerate(arrived):
            for v in arrived[i + 1:]:
                load = cum[hist.leaf[u]] + cum[hist.leaf[v]]
                j = hist.join.get((u, v))
                if j is not None and j < n:
                    load -= 2 * cum[j]
                slack = caps[(u, v)] - r * load
                rep.check(slack >= 0, time=ev.time, pair=(u, v), slack=slack)
                if worst is None or slack < worst[0]:
                    worst = (slack, (u, v), ev.time)
    if worst is not None:
        rep.details["worst_slack"] = worst[0]
        rep.details["worst_pair"] = worst[1]
        rep.details["worst_time"] = worst[2]
    return rep


def audit_potential_identity(result: RunResult, instance: Instance) -> AuditReport:
    """phi(u) equals the time since arrival while u is unmatched and never
    exceeds it afterwards. Also cross-checks the engine's own phi values."""
    _require_full(result)
    rep = AuditReport("potential_identity")
    hist = _History(result, instance.m)
    matched = {}
    for grp in result.groups:
        for w in grp.members:
            matched[w] = grp.time
    for ev in result.events:
        cum = hist.chain_sums(ev.g)
        tau = ev.time
        for u in range(instance.m):
            leaf = hist.leaf[u]
            if leaf is None or leaf >= len(ev.g):
                continue
            phi = cum[leaf]
            elapsed = tau - instance.requests[u].atime
            rep.check(phi == ev.phi[u], time=tau, request=u, recomputed=phi, engine=ev.phi[u])
            if matched[u] > tau:
                rep.check(phi == elapsed, time=tau, request=u, phi=phi, elapsed=elapsed, rule="equality")
            else:
                rep.check(phi <= elapsed, time=tau, request=u, phi=phi, elapsed=elapsed, rule="bound")
    return rep


def _tree_path(adj: dict[int, list[int]], a: int, b: int) -> Optional[list[int]]:
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        if x == b:
            break
        for y in adj.get(x, ()):
            if y not in prev:
                prev[y] = x
                queue.append(y)
    if b not in prev:
        return None
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def audit_spanning_forest(result: RunResult) -> AuditReport:
    """Marked edges inside every created set form a spanning tree of it, and
    the tree path between two members of a formed group crosses the boundary
    of any created set at most twice."""
    rep = AuditReport("spanning_forest")
    marked = [(u, v) for u, v, _ in result.marked]
    for s in result.sets:
        members = set(s.members)
        inside = [(u, v) for u, v in marked if u in members and v in members]
        parent = {w: w for w in members}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for u, v in inside:
            ru, rv = find(u), find(v)
            if ru == rv:
                acyclic = False
            parent[ru] = rv
        connected = len({find(w) for w in members}) == 1
        rep.check(len(inside) == len(members) - 1 and acyclic and connected,
                  set_id=s.id, size=len(members), edges=len(inside), acyclic=acyclic, connected=connected)

    max_cross = 0
    for gi, grp in enumerate(result.groups):
        home = set(result.sets[grp.set_id].members)
        adj: dict[int, list[int]] = {}
        for u, v, t in result.marked:
            if t <= grp.time and u in home and v in home:
                adj.setdefault(u, []).append(v)
                adj.setdefault(v, []).append(u)
        for i, a in enumerate(grp.members):
            for b in grp.members[i + 1:]:
                path = _tree_path(adj, a, b)
                rep.check(path is not None, group=gi, pair=(a, b), reason="no tree path")
                if path is None:
                    continue
                edges = list(zip(path, path[1:]))
                for s in result.sets:
                    if s.birth > grp.time:
                        continue
                    mem = set(s.members)
                    crossing = sum((x in mem) != (y in mem) for x, y in edges)
                    max_cross = max(max_cross, crossing)
                    rep.check(crossing <= 2, group=gi, pair=(a, b), set_id=s.id, crossing=crossing)
    rep.details["max_crossing"] = max_cross
    return rep


def audit_matching(result: RunResult, instance: Instance) -> AuditReport:
    """Groups partition the requests, have k members that all arrived by the
    match time, and the reported costs add up."""
    rep = AuditReport("matching")
    seen: list[int] = []
    dist = wait = Fraction(0)
    for gi, grp in enumerate(result.groups):
        rep.check(len(grp.members) == instance.k, group=gi, size=len(grp.members))
        for w in grp.members:
            rep.check(instance.requests[w].atime <= grp.time, group=gi, request=w, reason="not arrived")
        w_cost = sum((grp.time - instance.requests[w].atime for w in grp.members), Fraction(0))
        rep.check(w_cost == grp.waiting, group=gi, waiting=grp.waiting, recomputed=w_cost)
        dist += grp.distance
        wait += grp.waiting
        seen.extend(grp.members)
    rep.check(sorted(seen) == list(range(instance.m)), reason="groups do not partition the requests")
    rep.check(dist == result.distance_cost and wait == result.waiting_cost
              and result.alg == dist + wait, reason="cost totals inconsistent")
    return rep


def dual_objective(result: RunResult) -> Fraction:
    """D' recomputed from the set history."""
    k = result.k
    total = Fraction(0)
    for s in result.sets:
        sur = len(s.members) % k
        total += sur * (k - sur) * s.g
    return total * result.rate


def audit_cost_accounting(result: RunResult, instance: Instance) -> AuditReport:
    """Waiting cost equals ``sum_S sur(S) g_S``; ALG is within the general and
    the diameter competitive bounds of D'."""
    if not result.default_rate:
        raise ValueError("cost bounds only apply to runs at the default rate 1/(gamma k^2)")
    rep = AuditReport("cost_accounting")
    k, m, gamma = instance.k, instance.m, instance.gamma
    sur_sum = sum(((len(s.members) % k) * s.g for s in result.sets), Fraction(0))
    rep.check(result.waiting_cost == sur_sum, identity="waiting", waiting=result.waiting_cost, sur_g=sur_sum)
    dual = dual_objective(result)
    rep.check(dual == result.dual, identity="dual", engine=result.dual, recomputed=dual)
    general = (4 * m * k + k * k) * gamma * dual
    rep.check(result.alg <= general, bound="general", alg=result.alg, bound_value=general)
    rep.details["general_bound"] = general
    if instance.space.kind in (LINE, DMAX):
        diam = (4 * m + k * k) * dual
        rep.check(result.alg <= diam, bound="diameter", alg=result.alg, bound_value=diam)
        rep.details["diameter_bound"] = diam
    return rep


def run_engine_audits(result: RunResult, instance: Instance) -> list[AuditReport]:
    reports = [
        audit_matching(result, instance),
        audit_dual_feasibility(result, instance),
        audit_potential_identity(result, instance),
        audit_spanning_forest(result),
    ]
    if result.default_rate:
        reports.append(audit_cost_accounting(result, instance))
    return reports
