"""Finite k-point H-metric spaces and brute-force axiom checks.

Three constructions are supported:

``line``
    diameter on a line, points are rational coordinates;
``dmax``
    maximum pairwise distance of an explicit base metric;
``dhc``
    cheapest Hamiltonian circuit through the k entries of a tuple, computed
    over the base metric with repeated points joined by zero-cost edges.

The engine and the LP never use the base metric directly. They use the
induced pair distance ``d(p, q) = d_H(p, q, ..., q) + d_H(q, p, ..., p)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

LINE = "line"
DMAX = "dmax"
DHC = "dhc"
KINDS = (LINE, DMAX, DHC)

# long names accepted wherever a kind is parsed
KIND_ALIASES = {
    "line_diameter": LINE,
    "dmax_over_base": DMAX,
    "dhc_over_base": DHC,
}

DEFAULT_HC_GUARD = 8
DEFAULT_AXIOM_GUARD = 10**7

Point = Hashable


class MetricError(ValueError):
    pass


class GuardExceeded(RuntimeError):
    """A brute-force enumeration would exceed its configured budget."""


def normalize_kind(kind: str) -> str:
    kind = KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise MetricError(f"unknown metric kind {kind!r}")
    return kind


def validate_base_matrix(dist: Sequence[Sequence[Fraction]]) -> None:
    """Raise MetricError unless ``dist`` is a proper finite metric."""
    n = len(dist)
    for p in range(n):
        if len(dist[p]) != n:
            raise MetricError("distance matrix is not square")
        if dist[p][p] != 0:
            raise MetricError(f"dist[{p}][{p}] must be 0")
        for q in range(p + 1, n):
            if dist[p][q] != dist[q][p]:
                raise MetricError(f"distance matrix not symmetric at ({p}, {q})")
            if dist[p][q] <= 0:
                raise MetricError(f"dist[{p}][{q}] must be positive")
    for p, q, r in itertools.product(range(n), repeat=3):
        if dist[p][r] > dist[p][q] + dist[q][r]:
            raise MetricError(
                f"triangle inequality violated: d({p},{r}) > d({p},{q}) + d({q},{r})"
            )


@dataclass(frozen=True)
class MetricSpace:
    """A k-point H-metric together with its separation parameter gamma.

    For ``line`` spaces ``coords`` is only the finite support used by the
    enumeration checks; any rational coordinate is a valid point.
    """

    kind: str
    k: int
    gamma: Fraction = Fraction(1)
    coords: tuple[Fraction, ...] = ()
    dist: tuple[tuple[Fraction, ...], ...] | None = None
    hc_guard: int = field(default=DEFAULT_HC_GUARD, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if not isinstance(self.k, int) or self.k < 2:
            raise MetricError(f"k must be an integer >= 2, got {self.k!r}")
        if not (1 <= self.gamma <= self.k - 1):
            raise MetricError(f"gamma must lie in [1, k-1] = [1, {self.k - 1}], got {self.gamma}")
        if self.kind == LINE:
            if self.dist is not None:
                raise MetricError("line spaces take coordinates, not a matrix")
        elif self.dist is None:
            raise MetricError(f"{self.kind} space needs a base distance matrix")

    @property
    def n(self) -> int:
        return len(self.coords) if self.kind == LINE else len(self.dist)

    @property
    def points(self) -> tuple:
        if self.kind == LINE:
            return tuple(self.coords)
        return tuple(range(len(self.dist)))

    def check_point(self, p) -> None:
        if self.kind == LINE:
            if isinstance(p, bool) or not isinstance(p, (int, Fraction)):
                raise MetricError(f"line point must be a rational coordinate, got {p!r}")
        elif isinstance(p, bool) or not isinstance(p, int) or not 0 <= p < len(self.dist):
            raise MetricError(f"unknown point id {p!r}")

    def base(self, p, q) -> Fraction:
        """Underlying two-point distance (|p - q| on a line)."""
        if self.kind == LINE:
            return abs(Fraction(p) - Fraction(q))
        return self.dist[p][q]

    def distance(self, pts: Sequence) -> Fraction:
        return k_distance(self, pts)

    def pair(self, p, q) -> Fraction:
        return induced_pair_distance(self, p, q)

    def with_support(self, coords: Sequence[Fraction]) -> "MetricSpace":
        """Line space with a new finite support (used after loading requests)."""
        if self.kind != LINE:
            raise MetricError("support only applies to line spaces")
        support = tuple(sorted(set(Fraction(c) for c in coords)))
        return MetricSpace(LINE, self.k, self.gamma, coords=support, hc_guard=self.hc_guard)


def line_space(coords: Sequence, k: int, gamma=1) -> MetricSpace:
    support = tuple(sorted(set(Fraction(c) for c in coords)))
    return MetricSpace(LINE, k, Fraction(gamma), coords=support)


def explicit_space(kind: str, dist, k: int, gamma=1, *, check: bool = True,
                   hc_guard: int = DEFAULT_HC_GUARD) -> MetricSpace:
    """Space over an explicit base matrix. ``check=False`` skips metric validation
    so corrupted matrices can be fed to the axiom verifier."""
    matrix = tuple(tuple(Fraction(x) for x in row) for row in dist)
    if check:
        validate_base_matrix(matrix)
    return MetricSpace(normalize_kind(kind), k, Fraction(gamma), dist=matrix, hc_guard=hc_guard)


def _circuit_cost(space: MetricSpace, order: Sequence) -> Fraction:
    total = Fraction(0)
    for a, b in zip(order, order[1:]):
        total += space.base(a, b)
    return total + space.base(order[-1], order[0])


def min_hamiltonian_circuit(space: MetricSpace, pts: Sequence) -> Fraction:
    """Cheapest closed tour through every entry of ``pts`` (a multiset).

    Fixes the first entry and skips mirrored orders, so exactly (k-1)!/2
    circuits are priced for k >= 3.
    """
    k = len(pts)
    if k == 1:
        return Fraction(0)
    if k == 2:
        return 2 * space.base(pts[0], pts[1])
    first, rest = pts[0], range(1, k)
    best = None
    for perm in itertools.permutations(rest):
        if perm[0] > perm[-1]:
            continue
        cost = _circuit_cost(space, (first,) + tuple(pts[i] for i in perm))
        if best is None or cost < best:
            best = cost
    return best


def k_distance(space: MetricSpace, pts: Sequence) -> Fraction:
    """d_H of a k-tuple of points."""
    pts = tuple(pts)
    if len(pts) != space.k:
        raise MetricError(f"expected {space.k} points, got {len(pts)}")
    for p in pts:
        space.check_point(p)
    if space.kind == LINE:
        return Fraction(max(pts)) - Fraction(min(pts))
    if space.kind == DMAX:
        best = Fraction(0)
        for i in range(len(pts)):
            row = space.dist[pts[i]]
            for j in range(i + 1, len(pts)):
                if row[pts[j]] > best:
                    best = row[pts[j]]
        return best
    if space.k > space.hc_guard:
        raise GuardExceeded(f"k={space.k} exceeds the circuit enumeration guard {space.hc_guard}")
    return min_hamiltonian_circuit(space, pts)


def induced_pair_distance(space: MetricSpace, p, q) -> Fraction:
    """d(p, q) = d_H(p, q, ..., q) + d_H(q, p, ..., p)."""
    rest = space.k - 1
    return k_distance(space, (p,) + (q,) * rest) + k_distance(space, (q,) + (p,) * rest)


# ---------------------------------------------------------------------------
# axiom verification
# ---------------------------------------------------------------------------

AXIOMS = ("symmetry", "definiteness", "triangle", "separation")


@dataclass
class AxiomResult:
    name: str
    ok: bool = True
    checked: int = 0
    witness: dict | None = None

    def fail(self, **witness) -> None:
        if self.ok:
            self.ok = False
            self.witness = witness


@dataclass
class AxiomReport:
    kind: str
    k: int
    gamma: Fraction
    mode: str
    results: dict[str, AxiomResult]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results.values())

    def failures(self) -> list[AxiomResult]:
        return [r for r in self.results.values() if not r.ok]


def _elem_key(tup) -> frozenset:
    return frozenset(tup)


def _check_triangle(space, d, tup, i, a, res: AxiomResult) -> None:
    k = space.k
    left_t = tup[:i] + (a,) * (k - i)
    right_t = (a,) * i + tup[i:]
    lhs, left, right = d(tup), d(left_t), d(right_t)
    res.checked += 1
    if lhs > left + right:
        res.fail(tuple=tup, split=i, anchor=a, value=lhs, left=left, right=right,
                 left_tuple=left_t, right_tuple=right_t)


def _check_definiteness(tup, value, res: AxiomResult) -> None:
    res.checked += 1
    all_equal = len(set(tup)) == 1
    if value < 0 or (value == 0) != all_equal:
        res.fail(tuple=tup, value=value)


def verify_h_axioms(space: MetricSpace, mode: str = "exhaustive", *, count: int = 1000,
                    seed: int = 0, guard: int = DEFAULT_AXIOM_GUARD) -> AxiomReport:
    """Check symmetry, definiteness, the generalized triangle inequality and the
    separation axiom on the finite support of ``space``.

    ``exhaustive`` walks every k-tuple, every split index and every anchor;
    ``sampled`` draws ``count`` random instances of each check from ``seed``.
    Failures carry a concrete witness.
    """
    pts = space.points
    n, k = len(pts), space.k
    if n == 0:
        raise MetricError("space has an empty support")
    results = {name: AxiomResult(name) for name in AXIOMS}

    if mode == "exhaustive":
        if n**k * n * k > guard:
            raise GuardExceeded(f"{n}^{k}*{n}*{k} evaluations exceed guard {guard}")
        table = {tup: k_distance(space, tup) for tup in itertools.product(pts, repeat=k)}
        d = table.__getitem__

        by_multiset: dict[tuple, tuple] = {}
        for tup, value in table.items():
            key = tuple(sorted(tup))
            seen = by_multiset.setdefault(key, (tup, value))
            results["symmetry"].checked += 1
            if seen[1] != value:
                results["symmetry"].fail(tuple=seen[0], permuted=tup, value=seen[1], permuted_value=value)
            _check_definiteness(tup, value, results["definiteness"])
            for i in range(1, k + 1):
                for a in pts:
                    _check_triangle(space, d, tup, i, a, results["triangle"])

        lo: dict[frozenset, tuple] = {}
        hi: dict[frozenset, tuple] = {}
        for tup, value in table.items():
            e = _elem_key(tup)
            if e not in lo or value < lo[e][1]:
                lo[e] = (tup, value)
            if e not in hi or value > hi[e][1]:
                hi[e] = (tup, value)
        sep = results["separation"]
        for e in lo:
            sep.checked += 1
            if hi[e][1] > space.gamma * lo[e][1]:
                sep.fail(relation="equal", tuple=hi[e][0], other=lo[e][0],
                         value=hi[e][1], other_value=lo[e][1])
            for e2 in lo:
                if e < e2:
                    sep.checked += 1
                    if hi[e][1] > lo[e2][1]:
                        sep.fail(relation="subset", tuple=hi[e][0], other=lo[e2][0],
                                 value=hi[e][1], other_value=lo[e2][1])
    elif mode == "sampled":
        rng = random.Random(seed)
        d = lambda t: k_distance(space, t)  # noqa: E731
        for _ in range(count):
            tup = tuple(rng.choice(pts) for _ in range(k))
            value = d(tup)
            perm = list(tup)
            rng.shuffle(perm)
            results["symmetry"].checked += 1
            if d(tuple(perm)) != value:
                results["symmetry"].fail(tuple=tup, permuted=tuple(perm))
            _check_definiteness(tup, value, results["definiteness"])
            _check_triangle(space, d, tup, rng.randint(1, k), rng.choice(pts), results["triangle"])

            elems = sorted(set(tup), key=pts.index)
            extra = [p for p in pts if p not in elems]
            rng.shuffle(extra)
            grow = extra[: rng.randint(0, min(len(extra), k - len(elems)))]
            sup = elems + grow
            other = sup + [rng.choice(sup) for _ in range(k - len(sup))]
            rng.shuffle(other)
            other = tuple(other)
            other_value = d(other)
            bound = other_value if grow else space.gamma * other_value
            results["separation"].checked += 1
            if value > bound:
                results["separation"].fail(relation="subset" if grow else "equal", tuple=tup,
                                           other=other, value=value, other_value=other_value)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return AxiomReport(space.kind, k, space.gamma, mode, results)


@dataclass(frozen=True)
class SandwichReport:
    lower: Fraction
    value: Fraction
    upper: Fraction

    @property
    def holds(self) -> bool:
        return self.lower <= self.value <= self.upper


def verify_sandwich(space: MetricSpace, pts: Sequence, anchor) -> SandwichReport:
    """Evaluate ``sum_{i<j} d(p_i, p_j) / (gamma k^2) <= d_H(pts) <= sum_i d(anchor, p_i)``."""
    pts = tuple(pts)
    if anchor not in pts:
        raise MetricError("anchor must be one of the tuple's points")
    k = space.k
    pair_sum = sum((induced_pair_distance(space, pts[i], pts[j])
                    for i in range(k) for j in range(i + 1, k)), Fraction(0))
    lower = pair_sum / (space.gamma * k * k)
    upper = sum((induced_pair_distance(space, anchor, p) for p in pts), Fraction(0))
    return SandwichReport(lower, k_distance(space, pts), upper)


def verify_induced_metric(space: MetricSpace) -> AxiomResult:
    """Symmetry, definiteness and triangle inequality of the induced pair
    distance over the whole support."""
    res = AxiomResult("induced_metric")
    pts = space.points
    d = {(p, q): induced_pair_distance(space, p, q) for p in pts for q in pts}
    for p, q in d:
        res.checked += 1
        if d[p, q] != d[q, p] or (d[p, q] == 0) != (p == q) or d[p, q] < 0:
            res.fail(p=p, q=q, value=d[p, q])
    for p, q, r in itertools.product(pts, repeat=3):
        res.checked += 1
        if d[p, r] > d[p, q] + d[q, r]:
            res.fail(p=p, q=q, r=r)
    return res
