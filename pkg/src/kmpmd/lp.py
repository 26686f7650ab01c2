"""Pair-variable LP relaxation and an exact two-phase simplex.

Models are ``min c.x  s.t.  a_i.x >= b_i,  x >= 0``. The solver pivots on a
dense tableau of exact rationals (gmpy2 ``mpq``) with Bland's rule for both
the entering and the leaving variable.

By default every distinct constraint goes into one tableau. Relaxation
models have 2^m - 2 cut constraints, most of them slack at the optimum, so
``method="rowgen"`` instead runs the tableau on a working subset and adds
violated cuts until the subset optimum is feasible for every constraint.
That point is then optimal for the full model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from gmpy2 import mpq

from .gdk import PairCosts
from .instances import Instance
from .metrics import GuardExceeded
from .numerics import render

DEFAULT_LP_GUARD = 12
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass
class Constraint:
    coeffs: dict[int, Fraction]
    rhs: Fraction
    label: object = None


@dataclass
class LPModel:
    variables: list
    objective: list[Fraction]
    constraints: list[Constraint]
    log: list[str] = field(default_factory=list)
    candidates: int = 0
    pruned: int = 0


def build_p_prime(instance: Instance, guard: int = DEFAULT_LP_GUARD) -> LPModel:
    """One variable per unordered request pair, one cut per subset S with
    ``sum_{e in delta(S)} x_e >= sur(S) (k - sur(S))``. Cuts with a zero right
    side are vacuous and dropped."""
    m, k = instance.m, instance.k
    if m > guard:
        raise GuardExceeded(f"m={m} exceeds LP construction guard {guard}")
    costs = PairCosts(instance)
    scale = 1 / (instance.gamma * k * k)
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    index = {p: i for i, p in enumerate(pairs)}
    objective = [costs.edge(u, v) * scale for u, v in pairs]
    constraints = []
    pruned = 0
    for mask in range(1, (1 << m) - 1):
        size = bin(mask).count("1")
        sur = size % k
        rhs = sur * (k - sur)
        if rhs == 0:
            pruned += 1
            continue
        inside = [u for u in range(m) if mask >> u & 1]
        outside = [u for u in range(m) if not mask >> u & 1]
        coeffs = {index[(min(u, v), max(u, v))]: Fraction(1) for u in inside for v in outside}
        constraints.append(Constraint(coeffs, Fraction(rhs), label=tuple(inside)))
    candidates = (1 << m) - 2 if m else 0
    log = [f"candidates={candidates}", f"pruned_rhs_zero={pruned}", f"kept={len(constraints)}"]
    return LPModel(pairs, objective, constraints, log, candidates, pruned)


@dataclass
class LPSolution:
    status: str
    value: Optional[Fraction]
    x: Optional[list[Fraction]]
    phase1_value: Optional[Fraction]
    pivots: int = 0
    rounds: int = 1
    working_constraints: int = 0


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _Tableau:
    """Dense tableau for ``min c.x, A x >= b, x >= 0`` in equality form."""

    def __init__(self, n: int, objective, rows):
        self.n = n
        r = len(rows)
        # columns: n structural | r surplus/slack | artificials (one per row that needs one)
        self.rows: list[list] = []
        self.basis: list[int] = []
        art_rows = []
        for i, (coeffs, rhs) in enumerate(rows):
            row = [mpq(0)] * (n + r)
            if rhs >= 0:
                for j, a in coeffs.items():
                    row[j] = mpq(a)
                row[n + i] = mpq(-1)
                art_rows.append(i)
                self.basis.append(None)
            else:
                for j, a in coeffs.items():
                    row[j] = mpq(-a)
                row[n + i] = mpq(1)
                self.basis.append(n + i)
            row.append(mpq(abs(rhs)))
            self.rows.append(row)
        self.n_art = len(art_rows)
        self.art_start = n + r
        width = n + r + self.n_art
        for i, row in enumerate(self.rows):
            rhs = row.pop()
            row.extend([mpq(0)] * self.n_art)
            row.append(rhs)
        for a, i in enumerate(art_rows):
            self.rows[i][self.art_start + a] = mpq(1)
            self.basis[i] = self.art_start + a
        self.width = width
        self.objective = [mpq(c) for c in objective] + [mpq(0)] * (width - n)
        self.pivots = 0

    def _price(self, costs) -> list:
        z = list(costs) + [mpq(0)]
        for row, b in zip(self.rows, self.basis):
            cb = costs[b]
            if cb:
                for j, a in enumerate(row):
                    if a:
                        z[j] -= cb * a
        return z

    def _pivot(self, zrow: list, r: int, c: int) -> None:
        prow = self.rows[r]
        p = prow[c]
        if p != 1:
            prow[:] = [a / p for a in prow]
        nz = [j for j, a in enumerate(prow) if a]
        for row in self.rows + [zrow]:
            if row is prow:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        self.basis[r] = c
        self.pivots += 1

    def _optimize(self, zrow: list, allowed: int) -> str:
        while True:
            col = next((j for j in range(allowed) if zrow[j] < 0), None)
            if col is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self._pivot(zrow, best[1], col)

    def solve(self) -> tuple[str, Optional[list], Optional[Fraction], Optional[Fraction]]:
        width = self.width
        phase1_cost = [mpq(0)] * self.art_start + [mpq(1)] * self.n_art
        z1 = self._price(phase1_cost)
        self._optimize(z1, width)
        phase1 = -z1[-1]
        if phase1 > 0:
            return INFEASIBLE, None, None, _to_fraction(phase1)
        # drive zero-level artificials out of the basis, drop redundant rows
        for i in range(len(self.rows) - 1, -1, -1):
            if self.basis[i] >= self.art_start:
                row = self.rows[i]
                col = next((j for j in range(self.art_start) if row[j] != 0), None)
                if col is None:
                    del self.rows[i]
                    del self.basis[i]
                else:
                    self._pivot(z1, i, col)
        for row in self.rows:
            rhs = row[-1]
            del row[self.art_start:]
            row.append(rhs)
        self.width = self.art_start
        z2 = self._price(self.objective[: self.art_start])
        status = self._optimize(z2, self.art_start)
        if status == UNBOUNDED:
            return UNBOUNDED, None, None, _to_fraction(phase1)
        x = [mpq(0)] * self.n
        for row, b in zip(self.rows, self.basis):
            if b < self.n:
                x[b] = row[-1]
        return OPTIMAL, x, -z2[-1], _to_fraction(phase1)


def _solve_rows(model: LPModel, idx: list[int]):
    rows = [(model.constraints[i].coeffs, model.constraints[i].rhs) for i in idx]
    tab = _Tableau(len(model.variables), model.objective, rows)
    status, x, value, phase1 = tab.solve()
    return status, x, value, phase1, tab.pivots


def _dedupe(model: LPModel) -> list[int]:
    """Indices of constraints with distinct (coeffs, rhs); cuts S and V-S coincide."""
    seen = {}
    for i, c in enumerate(model.constraints):
        key = (tuple(sorted(c.coeffs.items())), c.rhs)
        seen.setdefault(key, i)
    return sorted(seen.values())


def simplex_solve(model: LPModel, method: str = "dense", batch: int = 8,
                  dense_limit: int = 40) -> LPSolution:
    """Exact optimum of ``model``.

    ``dense`` puts every distinct constraint in one tableau. ``rowgen`` starts
    from the sparsest constraints and repeatedly adds the ``batch`` most
    violated ones. ``auto`` picks dense for small models.
    """
    distinct = _dedupe(model)
    if method == "auto":
        method = "dense" if len(distinct) <= dense_limit else "rowgen"
    if method == "dense":
        status, x, value, phase1, pivots = _solve_rows(model, distinct)
        return LPSolution(status, None if value is None else _to_fraction(value),
                          None if x is None else [_to_fraction(v) for v in x],
                          phase1, pivots, 1, len(distinct))
    if method != "rowgen":
        raise ValueError(f"unknown method {method!r}")

    cons = model.constraints
    # seed with the smallest-support constraints (singleton cuts on relaxation models)
    order = sorted(distinct, key=lambda i: (len(cons[i].coeffs), i))
    seed = max(1, min(len(order), len(model.variables)))
    working = sorted(order[:seed])
    in_work = set(working)
    rhs_q = {i: mpq(cons[i].rhs) for i in distinct}
    coeff_q = {i: [(j, mpq(a)) for j, a in cons[i].coeffs.items()] for i in distinct}
    total_pivots, rounds, worst_phase1 = 0, 0, Fraction(0)
    while True:
        rounds += 1
        status, x, value, phase1, pivots = _solve_rows(model, working)
        total_pivots += pivots
        worst_phase1 = max(worst_phase1, phase1)
        if status != OPTIMAL:
            if status == INFEASIBLE:
                return LPSolution(status, None, None, phase1, total_pivots, rounds, len(working))
            # unbounded on a subset: fall back to the full constraint set
            status, x, value, phase1, pivots = _solve_rows(model, distinct)
            return LPSolution(status, None if value is None else _to_fraction(value),
                              None if x is None else [_to_fraction(v) for v in x],
                              phase1, total_pivots + pivots, rounds + 1, len(distinct))
        violated = []
        for i in distinct:
            if i in in_work:
                continue
            lhs = sum((a * x[j] for j, a in coeff_q[i]), mpq(0))
            gap = rhs_q[i] - lhs
            if gap > 0:
                violated.append((-gap, i))
        if not violated:
            return LPSolution(OPTIMAL, _to_fraction(value), [_to_fraction(v) for v in x],
                              worst_phase1, total_pivots, rounds, len(working))
        violated.sort()
        for _, i in violated[:batch]:
            in_work.add(i)
        working = sorted(in_work)


def is_feasible(model: LPModel, x) -> bool:
    if any(v < 0 for v in x):
        return False
    return all(sum((a * x[j] for j, a in c.coeffs.items()), Fraction(0)) >= c.rhs
               for c in model.constraints)


def objective_value(model: LPModel, x) -> Fraction:
    return sum((c * v for c, v in zip(model.objective, x)), Fraction(0))


def matching_vector(model: LPModel, partition) -> list[Fraction]:
    """Indicator of all pairs that share a block of ``partition``."""
    inside = set()
    for block in partition:
        block = sorted(block)
        for i, u in enumerate(block):
            for v in block[i + 1:]:
                inside.add((u, v))
    return [Fraction(1) if p in inside else Fraction(0) for p in model.variables]


@dataclass(frozen=True)
class DualityChain:
    dual: Fraction
    pprime: Fraction
    opt: Fraction

    @property
    def holds(self) -> bool:
        return self.dual <= self.pprime <= self.opt


def verify_duality_chain(instance: Instance, dual: Fraction, pprime: Fraction,
                         opt: Fraction) -> DualityChain:
    return DualityChain(Fraction(dual), Fraction(pprime), Fraction(opt))


def _var_name(label) -> str:
    if isinstance(label, tuple):
        return "x_" + "_".join(str(p) for p in label)
    return str(label)


def dump_model(model: LPModel) -> str:
    lines = ["minimize"]
    terms = [f"{render(c)} {_var_name(v)}" for v, c in zip(model.variables, model.objective)]
    lines.append("  " + " + ".join(terms) if terms else "  0")
    lines.append("subject to")
    for i, c in enumerate(model.constraints):
        lhs = " + ".join(
            (_var_name(model.variables[j]) if a == 1 else f"{render(a)} {_var_name(model.variables[j])}")
            for j, a in sorted(c.coeffs.items())
        )
        tag = "" if c.label is None else f" S={list(c.label)}"
        lines.append(f"  c{i}{tag}: {lhs or '0'} >= {render(c.rhs)}")
    lines.append("bounds")
    lines.append("  all variables >= 0")
    lines.extend(f"# {entry}" for entry in model.log)
    return "\n".join(lines) + "\n"


def dump_solution(model: LPModel, sol: LPSolution) -> str:
    lines = [f"status {sol.status}"]
    if sol.value is not None:
        lines.append(f"value {render(sol.value)}")
    if sol.phase1_value is not None:
        lines.append(f"phase1 {render(sol.phase1_value)}")
    lines.append(f"pivots {sol.pivots}")
    lines.append(f"rounds {sol.rounds}")
    if sol.x is not None:
        for v, val in zip(model.variables, sol.x):
            if val:
                lines.append(f"{_var_name(v)} {render(val)}")
    return "\n".join(lines) + "\n"
