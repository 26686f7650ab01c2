"""Seeded sweeps and the bench table."""

from __future__ import annotations

import csv
import io
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Iterable, Optional

from .gdk import RunConfig, run
from .instances import Instance, gen_random
from .lp import DEFAULT_LP_GUARD, OPTIMAL, build_p_prime, simplex_solve
from .metrics import DHC, DMAX, LINE
from .numerics import render
from .offline import DEFAULT_PARTITION_GUARD, brute_force_opt, partition_count
from .report import bounds_section

BENCH_COLUMNS = ["name", "m", "k", "gamma", "alg", "dist", "wait", "dual", "pprime", "opt",
                 "ratio", "bounds_ok"]
_KINDS = (LINE, DMAX, DHC)


def sweep(count: int = 200, seed: int = 0, max_m: int = 20, ks=(2, 3, 4)) -> list[Instance]:
    """Round-robin over metric kinds and k; m and the space are drawn per seed."""
    out = []
    for i in range(count):
        kind = _KINDS[i % len(_KINDS)]
        k = ks[(i // len(_KINDS)) % len(ks)]
        rng = random.Random(seed * 1_000_003 + i)
        m = k * rng.randint(1, max_m // k)
        if kind == LINE:
            out.append(gen_random("line_uniform", k, m, seed + i,
                                  {"span": rng.randint(1, 12), "horizon": rng.randint(0, 12)}))
        else:
            out.append(gen_random("explicit_random", k, m, seed + i,
                                  {"metric": kind, "n": rng.randint(2, 6),
                                   "max_weight": rng.randint(1, 8), "horizon": rng.randint(0, 12)}))
    return out


def generated(kind: str, k: int, m: int, count: int, seed: int, params=None) -> list[Instance]:
    return [gen_random(kind, k, m, seed + i, params) for i in range(count)]


def bench_row(inst: Instance, with_lp: bool = True, with_opt: bool = True,
              lp_guard: int = DEFAULT_LP_GUARD,
              opt_guard: int = DEFAULT_PARTITION_GUARD, lp_method: str = "auto") -> dict:
    """Exact values for one instance. P' and OPT are left out beyond their guards.
    ``auto`` solves small relaxations densely and larger ones by adding cuts."""
    res = run(inst, RunConfig(trace_level="summary"))
    pprime: Optional[Fraction] = None
    opt: Optional[Fraction] = None
    if with_lp and inst.m <= lp_guard:
        sol = simplex_solve(build_p_prime(inst, lp_guard), method=lp_method)
        if sol.status == OPTIMAL:
            pprime = sol.value
    if with_opt and partition_count(inst.m, inst.k) <= opt_guard:
        opt = brute_force_opt(inst, opt_guard).value
    ok = all(b["ok"] for b in bounds_section(res, inst).values() if isinstance(b, dict))
    chain = [res.dual] + [v for v in (pprime, opt) if v is not None]
    ok = ok and all(a <= b for a, b in zip(chain, chain[1:]))
    if opt is not None:
        ok = ok and opt <= res.alg
    ratio = None
    if opt is not None:
        # OPT = 0 forces every tight pair to be co-located and simultaneous, so ALG = 0 too
        ratio = res.alg / opt if opt else Fraction(1)
    return {"name": inst.name, "m": inst.m, "k": inst.k, "gamma": inst.gamma, "alg": res.alg,
            "dist": res.distance_cost, "wait": res.waiting_cost, "dual": res.dual,
            "pprime": pprime, "opt": opt, "ratio": ratio, "bounds_ok": ok}


def run_bench(instances: Iterable[Instance], workers: int = 4, **kw) -> list[dict]:
    """One row per instance, in input order. Runs share nothing."""
    instances = list(instances)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda inst: bench_row(inst, **kw), instances))


def _cell(value, exact: bool) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return render(value) if exact else repr(float(value))
    return str(value)


def rows_to_csv(rows: list[dict], exact: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[c], exact) for c in BENCH_COLUMNS])
    return buf.getvalue()


def float_rows(rows: list[dict]) -> list[dict]:
    return [{c: (float(v) if isinstance(v, Fraction) else v) for c, v in row.items()} for row in rows]


def summarize(rows: list[dict]) -> dict:
    ratios = [r["ratio"] for r in rows if r["ratio"] is not None]
    return {
        "instances": len(rows),
        "bounds_ok": sum(1 for r in rows if r["bounds_ok"]),
        "bounds_failed": [r["name"] for r in rows if not r["bounds_ok"]],
        "with_opt": len(ratios),
        "max_ratio": render(max(ratios)) if ratios else None,
        "mean_ratio_float": (sum(float(q) for q in ratios) / len(ratios)) if ratios else None,
    }
