"""Acceptance criteria, one test per criterion.

Each test appends a single PASS/FAIL line that pytest prints in its terminal
summary. Run this file directly to get the same lines without pytest.
"""

from __future__ import annotations

import itertools
import random
import sys
import time
from fractions import Fraction as F

import pytest

from conftest import ACCEPTANCE_LINES
from kmpmd.audits import (
    audit_cost_accounting, audit_dual_feasibility, audit_potential_identity, audit_spanning_forest,
)
from kmpmd.bench import rows_to_csv, run_bench, sweep
from kmpmd.gdk import run
from kmpmd.instances import gen_adversarial_line
from kmpmd.lp import OPTIMAL, build_p_prime, simplex_solve
from kmpmd.metrics import (
    DHC, DMAX, explicit_space, line_space, min_hamiltonian_circuit, verify_h_axioms,
    verify_sandwich,
)
from kmpmd.offline import (
    brute_force_opt, check_p_prime_feasibility, enumerate_opt, partition_count,
    verify_optcost_sandwich,
)
from oracles import circuit_oracle

SWEEP_SEED = 0
CHAIN_SEED = 1000


def _record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _random_base(n, seed):
    rng = random.Random(seed)
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = rng.randint(1, 9)
    for via in range(n):
        for i in range(n):
            for j in range(n):
                w[i][j] = min(w[i][j], w[i][via] + w[via][j])
    return [[F(x) for x in row] for row in w]


@pytest.fixture(scope="module")
def main_sweep():
    return sweep(200, seed=SWEEP_SEED, max_m=20)


# -- 1 ----------------------------------------------------------------------

ADVERSARIAL_CASES = [(2, 1, F(1, 100)), (3, 1, F(1, 9)), (2, 3, F(1, 12)), (4, 1, F(1, 16))]


def test_criterion_1_adversarial_closed_forms():
    failures, notes = [], []
    for k, s, eps in ADVERSARIAL_CASES:
        t0 = time.perf_counter()
        m = s * k * k
        inst = gen_adversarial_line(k, s, eps)
        res = run(inst)
        closed = F(2 * m * (k - 1), k) + k + (m - k) * eps
        schedule = [F(1)] + [1 + (2 * i - 2) * eps for i in range(2, s * k + 1)]
        opt = brute_force_opt(inst).value
        claim = k + k * eps + k ** 3 * eps + m * k * eps
        elapsed = time.perf_counter() - t0
        tag = f"(k={k},s={s},eps={eps})"
        checks = {
            "closed_form": res.alg == closed,
            "schedule": sorted(g.time for g in res.groups) == schedule,
            "opt_claim": opt <= claim,
            "runtime": elapsed < 1.0,
        }
        bad = [name for name, ok in checks.items() if not ok]
        notes.append(f"{tag} ALG={res.alg} expected {closed}, OPT={opt}<={claim}, {elapsed:.2f}s")
        failures.extend(f"{tag}:{name}" for name in bad)
    _record(1, "adversarial-line closed forms", not failures,
            ("failed " + ", ".join(failures) + "; " if failures else "") + "; ".join(notes))
    assert not failures, failures


# -- 2 ----------------------------------------------------------------------

def test_criterion_2_competitive_bounds(main_sweep):
    t0 = time.perf_counter()
    violations = 0
    diam_checked = 0
    for inst in main_sweep:
        rep = audit_cost_accounting(run(inst), inst)
        violations += sum(1 for v in rep.violations if "bound" in v)
        diam_checked += "diameter_bound" in rep.details
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 30
    _record(2, "general and diameter bounds", ok,
            f"{len(main_sweep)} instances, {diam_checked} with diameter bound, "
            f"{violations} violations, {elapsed:.1f}s (limit 30s)")
    assert ok


# -- 3 ----------------------------------------------------------------------

def test_criterion_3_duality_chain():
    t0 = time.perf_counter()
    insts = sweep(100, seed=CHAIN_SEED, max_m=10)
    bad = []
    for inst in insts:
        dual = run(inst).dual
        sol = simplex_solve(build_p_prime(inst))
        opt = brute_force_opt(inst).value
        if sol.status != OPTIMAL or sol.phase1_value != 0 or not (dual <= sol.value <= opt):
            bad.append(inst.name)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 300 and max(i.m for i in insts) <= 10
    _record(3, "D' <= P' <= OPT", ok,
            f"{len(insts)} instances (m<=10), {len(bad)} violations, {elapsed:.1f}s (limit 300s)")
    assert ok, bad


# -- 4 ----------------------------------------------------------------------

def test_criterion_4_structural_audits(main_sweep):
    t0 = time.perf_counter()
    counts = {"dual_feasibility": 0, "potential": 0, "forest": 0, "waiting_identity": 0,
              "p_prime_feasibility": 0}
    feasibility_checked = 0
    max_cross = 0
    for inst in main_sweep:
        res = run(inst)
        counts["dual_feasibility"] += len(audit_dual_feasibility(res, inst).violations)
        counts["potential"] += len(audit_potential_identity(res, inst).violations)
        forest = audit_spanning_forest(res)
        counts["forest"] += len(forest.violations)
        max_cross = max(max_cross, forest.details["max_crossing"])
        cost = audit_cost_accounting(res, inst)
        counts["waiting_identity"] += sum(1 for v in cost.violations if v.get("identity") == "waiting")
        if inst.m <= 16:
            feasibility_checked += 1
            counts["p_prime_feasibility"] += not check_p_prime_feasibility(inst, res.partition).ok
            if partition_count(inst.m, inst.k) <= 10**7:
                opt = brute_force_opt(inst)
                counts["p_prime_feasibility"] += not check_p_prime_feasibility(inst, opt.partition).ok
    elapsed = time.perf_counter() - t0
    ok = not any(counts.values())
    _record(4, "structural audits", ok,
            f"violations {counts}; max path crossing {max_cross}; "
            f"{feasibility_checked} instances with m<=16 cut-checked; {elapsed:.1f}s")
    assert ok, counts


# -- 5 ----------------------------------------------------------------------

def test_criterion_5_metric_layer(main_sweep):
    t0 = time.perf_counter()
    failures = []
    spaces = []
    for n in (2, 3, 4):
        for k in (2, 3, 4):
            rng = random.Random(100 * n + k)
            coords = rng.sample(range(0, 20), n)
            spaces.append(("line", line_space(coords, k)))
            for kind in (DMAX, DHC):
                spaces.append((kind, explicit_space(kind, _random_base(n, 10 * n + k), k)))
    for idx, (name, sp) in enumerate(spaces):
        rep = verify_h_axioms(sp, "exhaustive")
        if not rep.ok:
            failures.append(f"axioms {name} n={len(sp.points)} k={sp.k}: {[r.name for r in rep.failures()]}")
        rng = random.Random(idx)
        pts = list(sp.points)
        for _ in range(1000):
            tup = [rng.choice(pts) for _ in range(sp.k)]
            if not verify_sandwich(sp, tup, rng.choice(tup)).holds:
                failures.append(f"sandwich {name} {tup}")
                break
    groups = 0
    for inst in main_sweep:
        for g in run(inst).groups:
            groups += 1
            if not verify_optcost_sandwich(inst, g.members).holds:
                failures.append(f"optcost {inst.name} {g.members}")
    raw = [[0, 10, 1], [10, 0, 1], [1, 1, 0]]
    witnesses = 0
    for kind in (DMAX, DHC):
        for k in (2, 3):
            bad = explicit_space(kind, [[F(x) for x in r] for r in raw], k, check=False)
            tri = verify_h_axioms(bad).results["triangle"]
            w = tri.witness
            if tri.ok or not (w["value"] > w["left"] + w["right"]):
                failures.append(f"corrupted {kind} k={k} produced no valid witness")
            else:
                witnesses += 1
    elapsed = time.perf_counter() - t0
    ok = not failures
    _record(5, "metric layer", ok,
            f"{len(spaces)} spaces exhaustive + 1000 sandwich tuples each, {groups} group sandwiches, "
            f"{witnesses} corrupted-metric witnesses, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures


# -- 6 ----------------------------------------------------------------------

def test_criterion_6_oracles(main_sweep):
    t0 = time.perf_counter()
    mismatches = []
    tuples = 0
    for seed in (1, 2):
        base = _random_base(5, seed)
        for k in range(2, 7):
            sp = explicit_space(DHC, base, k)
            for tup in itertools.combinations_with_replacement(range(5), k):
                tuples += 1
                if min_hamiltonian_circuit(sp, tup) != circuit_oracle(base, tup):
                    mismatches.append(("dhc", seed, tup))
    compared = 0
    for inst in main_sweep:
        if inst.m <= 8:
            compared += 1
            a, b = brute_force_opt(inst), enumerate_opt(inst)
            if (a.value, a.partition) != (b.value, b.partition):
                mismatches.append(("opt", inst.name))
    elapsed = time.perf_counter() - t0
    ok = not mismatches
    _record(6, "oracle cross-checks", ok,
            f"{tuples} circuit multisets (k<=6, 5 points), {compared} OPT comparisons (m<=8), "
            f"{len(mismatches)} mismatches, {elapsed:.1f}s")
    assert ok, mismatches[:5]


# -- 7 ----------------------------------------------------------------------

def test_criterion_7_determinism(main_sweep):
    t0 = time.perf_counter()
    first = rows_to_csv(run_bench(main_sweep)).encode()
    second = rows_to_csv(run_bench(sweep(200, seed=SWEEP_SEED, max_m=20))).encode()
    elapsed = time.perf_counter() - t0
    ok = first == second
    rows = len(first.splitlines()) - 1
    _record(7, "bench determinism", ok,
            f"{rows} rows, {len(first)} bytes, identical={ok}, {elapsed:.1f}s")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
