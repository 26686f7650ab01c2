"""Command-line interface.

Exit codes: 0 success, 1 malformed input, 2 guard exceeded, 3 audit violation.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
from fractions import Fraction

from .audits import AuditReport, run_engine_audits
from .bench import float_rows, generated, rows_to_csv, run_bench, summarize, sweep
from .gdk import RunConfig, run
from .instances import (
    InstanceError, gen_adversarial_line, gen_random, read_instance, write_instance,
)
from .lp import (
    DEFAULT_LP_GUARD, OPTIMAL, build_p_prime, dump_model, dump_solution, matching_vector,
    objective_value, simplex_solve, verify_duality_chain,
)
from .metrics import (
    DHC, DMAX, LINE, GuardExceeded, MetricError, explicit_space, line_space, normalize_kind,
    verify_h_axioms, verify_sandwich,
)
from .numerics import RationalParseError, as_rational, render
from .offline import (
    DEFAULT_PARTITION_GUARD, DEFAULT_SUBSET_GUARD, brute_force_opt, check_p_prime_feasibility,
    partition_count, partition_value, verify_optcost_sandwich,
)
from .report import plain, run_report

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which would read as "guard exceeded"
    def error(self, message):
        raise UsageError(message)


def _write_json(doc, path) -> None:
    text = json.dumps(plain(doc), indent=1) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# lower-bound family
# ---------------------------------------------------------------------------

def emit_lowerbound_report(k: int, s: int, epsilon, spacing=2,
                           guard: int = DEFAULT_PARTITION_GUARD) -> dict:
    """Run GD-k on the adversarial line family and check the claimed bounds.

    OPT comes from brute force within ``guard`` and otherwise from the value of
    an explicit feasible schedule, which still bounds OPT from above.
    """
    eps = as_rational(epsilon)
    m = s * k * k
    if not (0 < eps <= Fraction(1, max(k * k, m))):
        raise ValueError(f"epsilon={render(eps)} outside (0, 1/max(k^2, m)]")
    inst = gen_adversarial_line(k, s, eps, spacing)
    res = run(inst)
    alg_lower = m + k + (m - k) * eps
    opt_upper = k + k * eps + k ** 3 * eps + m * k * eps
    if partition_count(m, k) <= guard:
        opt, opt_source = brute_force_opt(inst, guard).value, "brute_force"
    else:
        opt = k * (1 + eps + (k * (k - 1) - 2) * eps + (Fraction(m, k * k) - 1) * k * (k - 1) * eps)
        opt_source = "schedule"
    ratio = res.alg / opt
    ratio_lower = Fraction(m + k, 4 * k)
    checks = {
        "alg_lower": res.alg >= alg_lower,
        "opt_upper": opt <= opt_upper,
        "ratio_lower": ratio >= ratio_lower,
    }
    return {
        "k": k, "s": s, "m": m, "epsilon": render(eps), "spacing": render(as_rational(spacing)),
        "alg": render(res.alg), "alg_lower": render(alg_lower),
        "opt": render(opt), "opt_source": opt_source, "opt_upper": render(opt_upper),
        "ratio": render(ratio), "ratio_lower": render(ratio_lower),
        "group_times": [render(g.time) for g in res.groups],
        "checks": checks, "ok": all(checks.values()),
        "alg_float": float(res.alg), "alg_lower_float": float(alg_lower),
        "opt_float": float(opt), "opt_upper_float": float(opt_upper),
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _params(args) -> dict:
    p = {}
    for key in ("span", "horizon", "n", "max_weight"):
        v = getattr(args, key, None)
        if v is not None:
            p[key] = v
    if getattr(args, "metric", None):
        p["metric"] = args.metric
    if getattr(args, "gamma", None):
        p["gamma"] = args.gamma
    return p


def cmd_gen(args) -> int:
    if args.kind == "adversarial":
        if args.s is None:
            raise UsageError("--s is required for adversarial instances")
        inst = gen_adversarial_line(args.k, args.s, as_rational(args.epsilon), as_rational(args.spacing))
    else:
        if args.m is None:
            raise UsageError("--m is required for random instances")
        inst = gen_random(args.kind, args.k, args.m, args.seed, _params(args))
    write_instance(inst, args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    inst = read_instance(args.instance)
    rate = as_rational(args.rate) if args.rate is not None else None
    res = run(inst, RunConfig(rate_override=rate, trace_level=args.trace))
    audits = run_engine_audits(res, inst) if args.trace == "full" else []
    _write_json(run_report(inst, res, audits), args.out)
    return EXIT_OK


def cmd_opt(args) -> int:
    inst = read_instance(args.instance)
    sol = brute_force_opt(inst, args.guard)
    _write_json({"instance": inst.name, "opt": sol.value, "partition": sol.partition}, args.out)
    return EXIT_OK


def cmd_lp(args) -> int:
    inst = read_instance(args.instance)
    model = build_p_prime(inst, args.guard)
    sol = simplex_solve(model, method=args.method)
    if args.dump:
        with open(args.dump, "w") as fh:
            fh.write(dump_model(model))
            fh.write("\n")
            fh.write(dump_solution(model, sol))
    _write_json({"instance": inst.name, "status": sol.status, "pprime": sol.value,
                 "phase1": sol.phase1_value, "variables": len(model.variables),
                 "constraints": len(model.constraints), "pruned": model.pruned,
                 "candidates": model.candidates}, args.out)
    return EXIT_OK if sol.status == OPTIMAL else EXIT_VIOLATION


def full_audit(inst, lp_guard=DEFAULT_LP_GUARD, opt_guard=DEFAULT_PARTITION_GUARD,
               subset_guard=DEFAULT_SUBSET_GUARD, lp_method="auto") -> dict:
    """Engine audits plus every offline and LP check that fits its guard."""
    res = run(inst)
    reports = run_engine_audits(res, inst)
    skipped = []

    sandwich = AuditReport("optcost_sandwich")
    for grp in res.groups:
        sw = verify_optcost_sandwich(inst, grp.members)
        sandwich.check(sw.holds, group=grp.members, lower=sw.lower, value=sw.value, upper=sw.upper)
    reports.append(sandwich)

    opt = None
    if partition_count(inst.m, inst.k) <= opt_guard:
        opt = brute_force_opt(inst, opt_guard)
        rep = AuditReport("opt_vs_alg")
        offline = partition_value(inst, res.partition)
        rep.check(opt.value <= offline <= res.alg, opt=opt.value, engine_offline=offline, alg=res.alg)
        reports.append(rep)
    else:
        skipped.append("brute_force_opt")

    if inst.m <= subset_guard:
        rep = AuditReport("p_prime_matching_feasibility")
        for label, part in (("engine", res.partition), ("opt", opt.partition if opt else None)):
            if part is None:
                continue
            fr = check_p_prime_feasibility(inst, part, subset_guard)
            rep.check(fr.ok, partition=label, violations=fr.violations)
        reports.append(rep)
    else:
        skipped.append("p_prime_matching_feasibility")

    if inst.m <= lp_guard:
        model = build_p_prime(inst, lp_guard)
        sol = simplex_solve(model, method=lp_method)
        rep = AuditReport("duality_chain")
        rep.check(sol.status == OPTIMAL and sol.phase1_value == 0, status=sol.status, phase1=sol.phase1_value)
        if sol.status == OPTIMAL:
            rep.details["pprime"] = sol.value
            rep.check(res.dual <= sol.value, dual=res.dual, pprime=sol.value)
            if opt is not None:
                chain = verify_duality_chain(inst, res.dual, sol.value, opt.value)
                rep.check(chain.holds, dual=chain.dual, pprime=chain.pprime, opt=chain.opt)
                x = matching_vector(model, opt.partition)
                rep.check(objective_value(model, x) >= sol.value, reason="matching vector below optimum")
        reports.append(rep)
    else:
        skipped.append("duality_chain")

    doc = run_report(inst, res, reports)
    doc["skipped"] = skipped
    doc["ok"] = all(r.ok for r in reports)
    return doc


def cmd_audit(args) -> int:
    inst = read_instance(args.instance)
    doc = full_audit(inst, args.lp_guard, args.guard, args.subset_guard)
    _write_json(doc, args.out)
    return EXIT_OK if doc["ok"] else EXIT_VIOLATION


def _bench_instances(args):
    if args.dir:
        paths = sorted(glob.glob(os.path.join(args.dir, "*.json")))
        return [read_instance(p) for p in paths]
    if args.kind == "sweep":
        return sweep(args.count, args.seed, args.max_m)
    if args.m is None:
        raise UsageError("--m is required for generated bench sweeps")
    return generated(args.kind, args.k, args.m, args.count, args.seed, _params(args))


def cmd_bench(args) -> int:
    rows = run_bench(_bench_instances(args), workers=args.workers, with_lp=not args.no_lp,
                     with_opt=not args.no_opt, lp_guard=args.lp_guard, opt_guard=args.guard)
    summary = summarize(rows)
    if args.out in (None, "-"):
        sys.stdout.write(rows_to_csv(rows))
        sys.stderr.write(json.dumps(summary) + "\n")
        return EXIT_OK
    with open(args.out, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))
    stem = os.path.splitext(args.out)[0]
    with open(stem + ".float.csv", "w", newline="") as fh:
        fh.write(rows_to_csv(rows, exact=False))
    with open(stem + ".summary.json", "w") as fh:
        fh.write(json.dumps(summary, indent=1) + "\n")
    if not args.no_plots:
        from .plots import plot_bench
        plot_bench(float_rows(rows), stem)
    return EXIT_OK


def cmd_check_metric(args) -> int:
    kind = normalize_kind(args.kind)
    if args.instance:
        space = read_instance(args.instance).space
    elif kind == LINE:
        if not args.coords:
            raise UsageError("--coords is required for line spaces")
        space = line_space([as_rational(c) for c in args.coords.split(",")], args.k)
    else:
        inst = gen_random("explicit_random", args.k, args.k, args.seed,
                          {"metric": kind, "n": args.n or 4, "max_weight": args.max_weight or 10})
        space = inst.space
    axioms = verify_h_axioms(space, mode=args.mode, count=args.count, seed=args.seed)
    import random as _random
    rng = _random.Random(args.seed)
    pts = list(space.points)
    sandwich_fail = []
    for _ in range(args.count):
        tup = [rng.choice(pts) for _ in range(space.k)]
        anchor = rng.choice(tup)
        sw = verify_sandwich(space, tup, anchor)
        if not sw.holds:
            sandwich_fail.append({"tuple": tup, "anchor": anchor, "lower": sw.lower,
                                  "value": sw.value, "upper": sw.upper})
    ok = axioms.ok and not sandwich_fail
    _write_json({
        "space": {"kind": space.kind, "k": space.k, "gamma": space.gamma, "points": len(pts)},
        "axioms": {r.name: {"ok": r.ok, "checked": r.checked, "witness": r.witness}
                   for r in axioms.results.values()},
        "sandwich": {"samples": args.count, "failures": sandwich_fail[:10]},
        "ok": ok,
    }, args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_lowerbound(args) -> int:
    doc = emit_lowerbound_report(args.k, args.s, as_rational(args.epsilon), as_rational(args.spacing),
                                 args.guard)
    _write_json(doc, args.out)
    if args.plot:
        from .plots import plot_lowerbound
        plot_lowerbound(doc, args.plot)
    return EXIT_OK if doc["ok"] else EXIT_VIOLATION


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kmpmd", description="Online k-way matching with delays: GD-k and verifiers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def gen_flags(sp, kinds, required=True):
        sp.add_argument("--kind", choices=kinds, required=required)
        sp.add_argument("--k", type=int, default=2)
        sp.add_argument("--m", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--span", type=int)
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--max-weight", dest="max_weight", type=int)
        sp.add_argument("--metric", choices=[DMAX, DHC])
        sp.add_argument("--gamma")

    g = sub.add_parser("gen", help="write an instance document")
    gen_flags(g, ["line_uniform", "explicit_random", "adversarial"])
    g.add_argument("--s", type=int)
    g.add_argument("--epsilon", default="1/100")
    g.add_argument("--spacing", default="2")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run GD-k and write a report")
    r.add_argument("--instance", required=True)
    r.add_argument("--trace", choices=["full", "summary"], default="full")
    r.add_argument("--rate")
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("opt", help="exact offline optimum by brute force")
    o.add_argument("--instance", required=True)
    o.add_argument("--guard", type=int, default=DEFAULT_PARTITION_GUARD)
    o.add_argument("--out")
    o.set_defaults(func=cmd_opt)

    lp = sub.add_parser("lp", help="build and solve the pair relaxation")
    lp.add_argument("--instance", required=True)
    lp.add_argument("--guard", type=int, default=DEFAULT_LP_GUARD)
    lp.add_argument("--method", choices=["dense", "rowgen", "auto"], default="dense")
    lp.add_argument("--dump", help="write the model and solution as text")
    lp.add_argument("--out")
    lp.set_defaults(func=cmd_lp)

    a = sub.add_parser("audit", help="run every audit on one instance")
    a.add_argument("--instance", required=True)
    a.add_argument("--guard", type=int, default=DEFAULT_PARTITION_GUARD)
    a.add_argument("--lp-guard", dest="lp_guard", type=int, default=DEFAULT_LP_GUARD)
    a.add_argument("--subset-guard", dest="subset_guard", type=int, default=DEFAULT_SUBSET_GUARD)
    a.add_argument("--out")
    a.set_defaults(func=cmd_audit)

    b = sub.add_parser("bench", help="tabulate a sweep as CSV")
    gen_flags(b, ["line_uniform", "explicit_random", "sweep"], required=False)
    b.add_argument("--dir", help="bench every *.json instance in a directory")
    b.add_argument("--count", type=int, default=50)
    b.add_argument("--max-m", dest="max_m", type=int, default=20)
    b.add_argument("--workers", type=int, default=4)
    b.add_argument("--guard", type=int, default=DEFAULT_PARTITION_GUARD)
    b.add_argument("--lp-guard", dest="lp_guard", type=int, default=DEFAULT_LP_GUARD)
    b.add_argument("--no-lp", action="store_true")
    b.add_argument("--no-opt", action="store_true")
    b.add_argument("--no-plots", action="store_true")
    b.add_argument("--out", help="CSV path; figures, a float CSV and a summary go next to it")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("check-metric", help="verify the k-point metric axioms and sandwich")
    c.add_argument("--instance")
    c.add_argument("--kind", default=LINE)
    c.add_argument("--k", type=int, default=3)
    c.add_argument("--coords")
    c.add_argument("--n", type=int)
    c.add_argument("--max-weight", dest="max_weight", type=int)
    c.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    c.add_argument("--count", type=int, default=1000)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check_metric)

    lb = sub.add_parser("lowerbound", help="adversarial family report")
    lb.add_argument("--k", type=int, required=True)
    lb.add_argument("--s", type=int, default=1)
    lb.add_argument("--epsilon", required=True)
    lb.add_argument("--spacing", default="2")
    lb.add_argument("--guard", type=int, default=DEFAULT_PARTITION_GUARD)
    lb.add_argument("--plot", help="PNG path for a bar chart")
    lb.add_argument("--out")
    lb.set_defaults(func=cmd_lowerbound)
    return p


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "bench" and not args.dir and args.kind is None:
            raise UsageError("bench needs --dir or --kind")
        return args.func(args)
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, InstanceError, MetricError, RationalParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
