"""JSON-ready report documents. Rationals are rendered as exact strings."""

from __future__ import annotations

from dataclasses import asdict, is_dataclass
from fractions import Fraction

from .audits import AuditReport
from .gdk import RunResult
from .instances import Instance
from .metrics import DMAX, LINE
from .numerics import render


def plain(value):
    """Recursively convert to JSON-compatible values."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, float, str)):
        return value
    if isinstance(value, Fraction):
        return render(value)
    if isinstance(value, dict):
        return {str(plain(k)) if not isinstance(k, str) else k: plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [plain(v) for v in items]
    if is_dataclass(value):
        return plain(asdict(value))
    return str(value)


def instance_section(inst: Instance) -> dict:
    return {"name": inst.name, "k": inst.k, "m": inst.m, "gamma": render(inst.gamma),
            "metric": inst.space.kind}


def result_section(result: RunResult) -> dict:
    doc = {
        "rate": render(result.rate),
        "default_rate": result.default_rate,
        "alg": render(result.alg),
        "distance_cost": render(result.distance_cost),
        "waiting_cost": render(result.waiting_cost),
        "dual": render(result.dual),
        "end_time": render(result.end_time),
        "groups": [
            {"members": list(g.members), "time": render(g.time),
             "distance": render(g.distance), "waiting": render(g.waiting)}
            for g in result.groups
        ],
        "marked": [[u, v, render(t)] for u, v, t in result.marked],
        "event_count": len(result.events),
    }
    if result.trace_level == "full":
        doc["events"] = [
            {"index": ev.index, "kind": ev.kind, "time": render(ev.time),
             "arrived": list(ev.arrived), "merges": [list(e) for e in ev.merges],
             "groups": list(ev.groups), "phi": [render(p) for p in ev.phi]}
            for ev in result.events
        ]
    return doc


def audit_section(reports: list[AuditReport]) -> dict:
    return {
        r.name: {"ok": r.ok, "checks": r.checks, "violations": plain(r.violations[:10]),
                 "violation_count": len(r.violations), "details": plain(r.details)}
        for r in reports
    }


def bounds_section(result: RunResult, inst: Instance) -> dict:
    """Competitive bounds of ALG against k, m, gamma and D'."""
    if not result.default_rate:
        return {"applicable": False, "reason": "non-default rate"}
    k, m, gamma = inst.k, inst.m, inst.gamma
    general = (4 * m * k + k * k) * gamma * result.dual
    doc = {"applicable": True,
           "general": {"value": render(general), "ok": result.alg <= general}}
    if inst.space.kind in (LINE, DMAX):
        diam = (4 * m + k * k) * result.dual
        doc["diameter"] = {"value": render(diam), "ok": result.alg <= diam}
    return doc


def run_report(inst: Instance, result: RunResult, audits: list[AuditReport]) -> dict:
    return {
        "instance": instance_section(inst),
        "result": result_section(result),
        "audits": audit_section(audits),
        "bounds": bounds_section(result, inst),
    }
