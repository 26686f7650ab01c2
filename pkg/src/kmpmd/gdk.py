"""Greedy-dual engine for online k-way matching with delays.

The continuous growth of the dual variables is simulated exactly by jumping
from event to event over rationals. Time is tracked per active set as a growth
duration ``g``; the dual variable of a set is ``rate * g``. For a request ``u``
the potential ``phi[u]`` is the sum of ``g`` over all sets that ever
contained ``u``.

A pair ``(u, v)`` in different active sets carries the dual load
``phi[u] + phi[v]``. It becomes tight when that load reaches its threshold
``opt_cost_edge(u, v) / (gamma k^2 rate)``. Once both endpoints share a set the
load is frozen.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .instances import Instance
from .metrics import DMAX, LINE, induced_pair_distance, k_distance


class EngineError(RuntimeError):
    """Internal invariant breach. Never caused by a valid instance."""


class PairCosts:
    """Cached induced pair distances and edge costs for one instance."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self._dist: dict = {}

    def distance(self, p, q) -> Fraction:
        key = (p, q)
        d = self._dist.get(key)
        if d is None:
            d = induced_pair_distance(self.instance.space, p, q)
            self._dist[key] = self._dist[(q, p)] = d
        return d

    def edge(self, u: int, v: int) -> Fraction:
        ru, rv = self.instance.requests[u], self.instance.requests[v]
        return self.distance(ru.pos, rv.pos) + abs(ru.atime - rv.atime)


def opt_cost_edge(instance: Instance, u: int, v: int) -> Fraction:
    """Induced distance between the two positions plus the arrival gap."""
    if u == v:
        raise ValueError("opt_cost_edge needs two distinct requests")
    ru, rv = instance.requests[u], instance.requests[v]
    return induced_pair_distance(instance.space, ru.pos, rv.pos) + abs(ru.atime - rv.atime)


def default_rate(instance: Instance) -> Fraction:
    return 1 / (instance.gamma * instance.k * instance.k)


@dataclass
class ActiveSetRecord:
    id: int
    members: tuple[int, ...]
    free: set[int]
    g: Fraction
    birth: Fraction
    death: Optional[Fraction] = None
    parents: Optional[tuple[int, int]] = None
    child: Optional[int] = None
    edge: Optional[tuple[int, int]] = None

    @property
    def active(self) -> bool:
        return self.death is None

    @property
    def growing(self) -> bool:
        return self.death is None and bool(self.free)


@dataclass(frozen=True)
class MatchedGroup:
    members: tuple[int, ...]
    time: Fraction
    distance: Fraction
    waiting: Fraction
    set_id: int

    @property
    def cost(self) -> Fraction:
        return self.distance + self.waiting


@dataclass
class Event:
    index: int
    kind: str  # "arrival" or "merge"
    time: Fraction
    arrived: tuple[int, ...] = ()
    merges: list[tuple[int, int]] = field(default_factory=list)
    groups: list[int] = field(default_factory=list)
    # snapshot after processing (full trace only)
    phi: Optional[tuple[Fraction, ...]] = None
    g: Optional[tuple[Fraction, ...]] = None
    owner: Optional[tuple[Optional[int], ...]] = None


@dataclass
class RunConfig:
    rate_override: Optional[Fraction] = None
    trace_level: str = "full"  # "full" or "summary"


class EngineState:
    """Live state of one run. Single-threaded; owns all of its data."""

    def __init__(self, instance: Instance, config: RunConfig | None = None):
        self.instance = instance
        self.config = config or RunConfig()
        if self.config.trace_level not in ("full", "summary"):
            raise ValueError(f"unknown trace level {self.config.trace_level!r}")
        self.k = instance.k
        self.m = instance.m
        self.rate = Fraction(self.config.rate_override) if self.config.rate_override is not None \
            else default_rate(instance)
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        # above the default rate a pair can arrive already past its threshold;
        # such pairs count as tight instead of signalling a broken invariant
        self.overshoot = self.rate > default_rate(instance)
        scale = 1 / (instance.gamma * self.k * self.k) / self.rate
        costs = PairCosts(instance)
        self.threshold = [[None] * self.m for _ in range(self.m)]
        for u in range(self.m):
            for v in range(u + 1, self.m):
                t = costs.edge(u, v) * scale
                self.threshold[u][v] = self.threshold[v][u] = t

        self.now = instance.requests[0].atime if self.m else Fraction(0)
        self.next_arrival = 0
        self.sets: list[ActiveSetRecord] = []
        self.owner: list[Optional[int]] = [None] * self.m
        self.phi = [Fraction(0)] * self.m
        self.marked: list[tuple[int, int, Fraction]] = []
        self.groups: list[MatchedGroup] = []
        self.matched_at: list[Optional[Fraction]] = [None] * self.m
        self.frozen: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}
        self.events: list[Event] = []
        self.max_events = 4 * max(self.m, 1)

    # -- queries -----------------------------------------------------------

    @property
    def done(self) -> bool:
        return self.next_arrival == self.m and len(self.groups) * self.k == self.m

    def arrived(self) -> range:
        return range(self.next_arrival)

    def dual_load(self, u: int, v: int) -> Fraction:
        if self.owner[u] == self.owner[v]:
            return self.frozen[(min(u, v), max(u, v))][0]
        return self.phi[u] + self.phi[v]

    def slack(self, u: int, v: int) -> Fraction:
        return self.threshold[u][v] - self.dual_load(u, v)

    def _next_tight_delay(self) -> Optional[Fraction]:
        best = None
        sets = self.sets
        for u in range(self.next_arrival):
            su = self.owner[u]
            grow_u = 1 if sets[su].free else 0
            thr_u, phi_u = self.threshold[u], self.phi[u]
            for v in range(u + 1, self.next_arrival):
                sv = self.owner[v]
                if su == sv:
                    continue
                slack = thr_u[v] - phi_u - self.phi[v]
                if slack < 0 and not self.overshoot:
                    raise EngineError(f"negative slack {slack} on pair ({u}, {v}) at t={self.now}")
                rate = grow_u + (1 if sets[sv].free else 0)
                if slack <= 0:
                    return Fraction(0)
                if rate:
                    delay = slack / rate
                    if best is None or delay < best:
                        best = delay
        return best

    # -- transitions -------------------------------------------------------

    def _advance(self, t: Fraction) -> None:
        dt = t - self.now
        if dt < 0:
            raise EngineError(f"time moved backwards: {self.now} -> {t}")
        if dt:
            for s in self.sets:
                if s.growing:
                    s.g += dt
                    for u in s.members:
                        self.phi[u] += dt
        self.now = t

    def _arrive(self, ev: Event) -> None:
        reqs = self.instance.requests
        arrived = []
        while self.next_arrival < self.m and reqs[self.next_arrival].atime == self.now:
            u = self.next_arrival
            rec = ActiveSetRecord(len(self.sets), (u,), {u}, Fraction(0), self.now)
            self.sets.append(rec)
            self.owner[u] = rec.id
            arrived.append(u)
            self.next_arrival += 1
        ev.arrived = tuple(arrived)

    def _merge(self, u: int, v: int, ev: Event) -> None:
        a, b = self.sets[self.owner[u]], self.sets[self.owner[v]]
        for x in a.members:
            for y in b.members:
                key = (x, y) if x < y else (y, x)
                self.frozen[key] = (self.phi[x] + self.phi[y], self.now)
        rec = ActiveSetRecord(
            len(self.sets), tuple(sorted(a.members + b.members)), a.free | b.free,
            Fraction(0), self.now, parents=(a.id, b.id), edge=(u, v),
        )
        a.death = b.death = self.now
        a.child = b.child = rec.id
        self.sets.append(rec)
        for w in rec.members:
            self.owner[w] = rec.id
        self.marked.append((u, v, self.now))
        ev.merges.append((u, v))

        carved = 0
        reqs = self.instance.requests
        while len(rec.free) >= self.k:
            pick = sorted(rec.free, key=lambda w: (reqs[w].atime, w))[: self.k]
            rec.free.difference_update(pick)
            members = tuple(sorted(pick))
            dist = k_distance(self.instance.space, [reqs[w].pos for w in members])
            wait = sum((self.now - reqs[w].atime for w in members), Fraction(0))
            for w in members:
                self.matched_at[w] = self.now
            ev.groups.append(len(self.groups))
            self.groups.append(MatchedGroup(members, self.now, dist, wait, rec.id))
            carved += 1
        if carved > 1:
            raise EngineError("a single merge carved more than one group")

    def _merge_tight(self, ev: Event) -> None:
        tight = []
        for u in range(self.next_arrival):
            for v in range(u + 1, self.next_arrival):
                if self.owner[u] != self.owner[v]:
                    s = self.slack(u, v)
                    if s < 0 and not self.overshoot:
                        raise EngineError(f"negative slack {s} on pair ({u}, {v}) at t={self.now}")
                    if s <= 0:
                        tight.append((u, v))
        if not tight:
            raise EngineError(f"no tight edge at scheduled time {self.now}")
        for u, v in tight:
            if self.owner[u] != self.owner[v]:
                self._merge(u, v, ev)

    def step(self) -> "EngineState":
        """Process one event: a batch of simultaneous arrivals, or every edge
        that is tight at the next tightness instant."""
        if self.done:
            raise EngineError("step() called on a terminal state")
        if len(self.events) >= self.max_events:
            raise EngineError(f"event guard {self.max_events} exceeded")
        t_arr = self.instance.requests[self.next_arrival].atime if self.next_arrival < self.m else None
        delay = self._next_tight_delay()
        t_tight = None if delay is None else self.now + delay
        ev = Event(len(self.events), "arrival", self.now)
        if t_arr is not None and (t_tight is None or t_arr <= t_tight):
            self._advance(t_arr)
            self._arrive(ev)
        elif t_tight is not None:
            self._advance(t_tight)
            ev.kind = "merge"
            self._merge_tight(ev)
        else:
            raise EngineError("no pending arrival and no edge can become tight")
        ev.time = self.now
        if self.config.trace_level == "full":
            ev.phi = tuple(self.phi)
            ev.g = tuple(s.g for s in self.sets)
            ev.owner = tuple(self.owner)
        self.events.append(ev)
        return self

    def run_to_end(self) -> "RunResult":
        while not self.done:
            self.step()
        return self.result()

    def result(self) -> "RunResult":
        if not self.done:
            raise EngineError("run has not terminated")
        k, r = self.k, self.rate
        dual = Fraction(0)
        for s in self.sets:
            sur = len(s.members) % k
            dual += sur * (k - sur) * r * s.g
        dist = sum((g.distance for g in self.groups), Fraction(0))
        wait = sum((g.waiting for g in self.groups), Fraction(0))
        return RunResult(
            k=k, m=self.m, gamma=self.instance.gamma, rate=r,
            default_rate=(r == default_rate(self.instance)),
            groups=list(self.groups), distance_cost=dist, waiting_cost=wait, alg=dist + wait,
            dual=dual, sets=self.sets, marked=list(self.marked), events=self.events,
            frozen=dict(self.frozen), trace_level=self.config.trace_level,
        )


@dataclass
class RunResult:
    k: int
    m: int
    gamma: Fraction
    rate: Fraction
    default_rate: bool
    groups: list[MatchedGroup]
    distance_cost: Fraction
    waiting_cost: Fraction
    alg: Fraction
    dual: Fraction
    sets: list[ActiveSetRecord]
    marked: list[tuple[int, int, Fraction]]
    events: list[Event]
    frozen: dict
    trace_level: str

    @property
    def partition(self) -> list[tuple[int, ...]]:
        return [g.members for g in self.groups]

    @property
    def end_time(self) -> Fraction:
        return self.events[-1].time if self.events else Fraction(0)


def run(instance: Instance, config: RunConfig | None = None) -> RunResult:
    return EngineState(instance, config).run_to_end()


def step(state: EngineState) -> EngineState:
    return state.step()
