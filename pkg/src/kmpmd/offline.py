"""Exact offline optimum and the edge-relaxation feasibility checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .gdk import PairCosts
from .instances import Instance
from .metrics import GuardExceeded, k_distance

DEFAULT_PARTITION_GUARD = 10**7
DEFAULT_SUBSET_GUARD = 16


class PartitionError(ValueError):
    pass


def opt_cost_group(instance: Instance, group: Sequence[int]) -> Fraction:
    """Cost of matching ``group`` the moment its last member arrives."""
    reqs = instance.requests
    last = max(reqs[u].atime for u in group)
    wait = sum((last - reqs[u].atime for u in group), Fraction(0))
    return k_distance(instance.space, [reqs[u].pos for u in group]) + wait


def partition_value(instance: Instance, partition: Iterable[Sequence[int]]) -> Fraction:
    return sum((opt_cost_group(instance, g) for g in partition), Fraction(0))


def partition_count(m: int, k: int) -> int:
    """Number of ways to split m labelled requests into blocks of size k."""
    b = m // k
    return math.factorial(m) // (math.factorial(k) ** b * math.factorial(b))


def canonical_partition(partition: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    return sorted(tuple(sorted(g)) for g in partition)


def validate_partition(instance: Instance, partition) -> list[tuple[int, ...]]:
    groups = canonical_partition(partition)
    flat = [u for g in groups for u in g]
    if any(len(g) != instance.k for g in groups):
        raise PartitionError("every block must hold exactly k requests")
    if sorted(flat) != list(range(instance.m)):
        raise PartitionError("blocks do not partition the requests")
    return groups


@dataclass(frozen=True)
class OfflineSolution:
    partition: list[tuple[int, ...]]
    value: Fraction


def _group_table(instance: Instance):
    """All k-subsets as bitmasks with costs scaled to integers."""
    m, k = instance.m, instance.k
    costs = {}
    for combo in itertools.combinations(range(m), k):
        costs[combo] = opt_cost_group(instance, combo)
    scale = math.lcm(*(c.denominator for c in costs.values())) if costs else 1
    return {combo: int(c * scale) for combo, c in costs.items()}, scale


def brute_force_opt(instance: Instance, guard: int = DEFAULT_PARTITION_GUARD) -> OfflineSolution:
    """Minimum-cost perfect k-way matching by exhaustive search.

    The lowest-index unassigned request is always grouped with each
    (k-1)-subset of the rest; identical remainders are memoized. Among optimal
    partitions the lexicographically least sorted group list is returned.
    """
    m, k = instance.m, instance.k
    if partition_count(m, k) > guard:
        raise GuardExceeded(f"{partition_count(m, k)} partitions exceed guard {guard}")
    if m == 0:
        return OfflineSolution([], Fraction(0))
    table, scale = _group_table(instance)
    full = (1 << m) - 1
    memo: dict[int, int] = {0: 0}

    def options(mask: int):
        rest = [u for u in range(m) if mask >> u & 1]
        low = rest[0]
        for others in itertools.combinations(rest[1:], k - 1):
            combo = (low,) + others
            bits = 0
            for u in combo:
                bits |= 1 << u
            yield combo, bits

    def best(mask: int) -> int:
        hit = memo.get(mask)
        if hit is not None:
            return hit
        value = min(table[combo] + best(mask & ~bits) for combo, bits in options(mask))
        memo[mask] = value
        return value

    total = best(full)
    groups = []
    mask, remaining = full, total
    while mask:
        for combo, bits in options(mask):
            if table[combo] + best(mask & ~bits) == remaining:
                groups.append(combo)
                remaining -= table[combo]
                mask &= ~bits
                break
    return OfflineSolution(groups, Fraction(total, scale))


def _set_partitions(items: list[int]):
    """Every set partition, as restricted growth strings."""
    n = len(items)
    labels = [0] * n

    def rec(i: int, top: int):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(top)]
            for item, lab in zip(items, labels):
                blocks[lab].append(item)
            yield blocks
            return
        for lab in range(top + 1):
            labels[i] = lab
            yield from rec(i + 1, max(top, lab + 1))

    yield from rec(0, 0)


def enumerate_opt(instance: Instance, max_m: int = 10) -> OfflineSolution:
    """Independent optimum: walk all set partitions, keep those with blocks of
    size k, price each one directly."""
    if instance.m > max_m:
        raise GuardExceeded(f"m={instance.m} too large for full set-partition enumeration")
    best_value, best_part = None, None
    for blocks in _set_partitions(list(range(instance.m))):
        if any(len(b) != instance.k for b in blocks):
            continue
        part = canonical_partition(blocks)
        value = partition_value(instance, part)
        if best_value is None or value < best_value or (value == best_value and part < best_part):
            best_value, best_part = value, part
    return OfflineSolution(best_part or [], best_value if best_value is not None else Fraction(0))


@dataclass
class FeasibilityReport:
    subsets: int
    violations: list[dict]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_p_prime_feasibility(instance: Instance, partition,
                              guard: int = DEFAULT_SUBSET_GUARD) -> FeasibilityReport:
    """Check that the edge indicator of ``partition`` covers every cut:
    ``|delta(S) & M| >= sur(S) * (k - sur(S))`` for all nonempty proper S."""
    groups = validate_partition(instance, partition)
    m, k = instance.m, instance.k
    if m > guard:
        raise GuardExceeded(f"m={m} exceeds subset enumeration guard {guard}")
    subsets = np.arange(1, (1 << m) - 1, dtype=np.int64)
    crossing = np.zeros_like(subsets)
    for g in groups:
        bits = sum(1 << u for u in g)
        a = np.bitwise_count(subsets & bits).astype(np.int64)
        crossing += a * (k - a)
    sur = np.bitwise_count(subsets).astype(np.int64) % k
    need = sur * (k - sur)
    bad = np.nonzero(crossing < need)[0]
    violations = [
        {"subset": [u for u in range(m) if int(subsets[i]) >> u & 1],
         "crossing": int(crossing[i]), "required": int(need[i])}
        for i in bad[:10]
    ]
    return FeasibilityReport(int(subsets.size), violations)


@dataclass(frozen=True)
class GroupSandwich:
    lower: Fraction
    value: Fraction
    upper: Fraction
    latest: int

    @property
    def holds(self) -> bool:
        return self.lower <= self.value <= self.upper


def verify_optcost_sandwich(instance: Instance, group: Sequence[int],
                            costs: PairCosts | None = None) -> GroupSandwich:
    """Edge costs bracket the group cost: the scaled sum over all pairs from
    below, the star around the latest arrival (ties by id) from above."""
    costs = costs or PairCosts(instance)
    group = tuple(group)
    k = instance.k
    latest = max(group, key=lambda u: (instance.requests[u].atime, u))
    pair_sum = sum((costs.edge(group[i], group[j]) for i in range(k) for j in range(i + 1, k)),
                   Fraction(0))
    lower = pair_sum / (instance.gamma * k * k)
    upper = sum((costs.edge(latest, u) for u in group if u != latest), Fraction(0))
    return GroupSandwich(lower, opt_cost_group(instance, group), upper, latest)
