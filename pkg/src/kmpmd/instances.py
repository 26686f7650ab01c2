"""Request sequences, the JSON instance document, and instance generators."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

from .metrics import DHC, DMAX, LINE, MetricError, MetricSpace, explicit_space, normalize_kind
from .numerics import RationalParseError, as_rational, render


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class Request:
    id: int
    atime: Fraction
    pos: Any  # Fraction coordinate on a line, int point id otherwise


@dataclass(frozen=True)
class Instance:
    k: int
    space: MetricSpace
    requests: tuple[Request, ...]
    name: str = ""

    @property
    def m(self) -> int:
        return len(self.requests)

    @property
    def gamma(self) -> Fraction:
        return self.space.gamma

    def atime(self, u: int) -> Fraction:
        return self.requests[u].atime

    def pos(self, u: int):
        return self.requests[u].pos


def make_instance(space: MetricSpace, requests, name: str = "") -> Instance:
    """Validate and freeze. Line spaces get their support set to the request
    coordinates."""
    reqs = tuple(requests)
    k = space.k
    if len(reqs) % k:
        raise InstanceError(f"m not a multiple of k (m={len(reqs)}, k={k})")
    for i, r in enumerate(reqs):
        if r.id != i:
            raise InstanceError(f"request ids must be 0..m-1 in order; found {r.id} at index {i}")
        if i and r.atime < reqs[i - 1].atime:
            raise InstanceError(f"non-monotone arrival times at request {i}")
        try:
            space.check_point(r.pos)
        except MetricError as exc:
            raise InstanceError(f"invalid position for request {i}: {exc}") from None
    if space.kind == LINE:
        space = space.with_support([r.pos for r in reqs])
    return Instance(k, space, reqs, name)


# ---------------------------------------------------------------------------
# document format
# ---------------------------------------------------------------------------

def _rat(value, what: str) -> Fraction:
    if isinstance(value, float):
        raise InstanceError(f"{what}: floats are not accepted, use a rational string")
    try:
        return as_rational(value)
    except (RationalParseError, TypeError) as exc:
        raise InstanceError(f"{what}: {exc}") from None


def instance_from_doc(doc: Mapping) -> Instance:
    try:
        k = doc["k"]
        metric = doc["metric"]
        raw_requests = doc["requests"]
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"missing field {exc}") from None
    if not isinstance(k, int) or isinstance(k, bool):
        raise InstanceError("k must be an integer")
    gamma = _rat(doc.get("gamma", "1"), "gamma")
    try:
        kind = normalize_kind(metric["type"])
        if kind == LINE:
            space = MetricSpace(LINE, k, gamma)
        else:
            n = metric["n"]
            lower = metric["dist"]
            if len(lower) != n:
                raise InstanceError(f"dist must have {n} rows")
            dist = [[Fraction(0)] * n for _ in range(n)]
            for i, row in enumerate(lower):
                if len(row) != i:
                    raise InstanceError(f"dist row {i} must hold {i} entries (lower triangle)")
                for j, v in enumerate(row):
                    dist[i][j] = dist[j][i] = _rat(v, f"dist[{i}][{j}]")
            space = explicit_space(kind, dist, k, gamma)
    except MetricError as exc:
        raise InstanceError(str(exc)) from None
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"bad metric object: {exc}") from None

    requests = []
    for i, r in enumerate(raw_requests):
        try:
            rid, at, pos = r["id"], r["atime"], r["pos"]
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"request {i}: missing field {exc}") from None
        at = _rat(at, f"request {i} atime")
        if kind == LINE:
            pos = _rat(pos, f"request {i} pos")
        elif not isinstance(pos, int) or isinstance(pos, bool):
            raise InstanceError(f"request {i}: pos must be an integer point index")
        requests.append(Request(rid, at, pos))
    return make_instance(space, requests, name=str(doc.get("name", "")))


def instance_to_doc(inst: Instance) -> dict:
    space = inst.space
    doc: dict[str, Any] = {}
    if inst.name:
        doc["name"] = inst.name
    doc["k"] = inst.k
    doc["gamma"] = render(space.gamma)
    if space.kind == LINE:
        doc["metric"] = {"type": LINE}
    else:
        doc["metric"] = {
            "type": space.kind,
            "n": space.n,
            "dist": [[render(space.dist[i][j]) for j in range(i)] for i in range(space.n)],
        }
    doc["requests"] = [
        {"id": r.id, "atime": render(r.atime),
         "pos": render(r.pos) if space.kind == LINE else r.pos}
        for r in inst.requests
    ]
    return doc


def load_instance(data: bytes | str) -> Instance:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"parse error: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be an object")
    return instance_from_doc(doc)


def save_instance(inst: Instance) -> bytes:
    return (json.dumps(instance_to_doc(inst), indent=1) + "\n").encode()


def read_instance(path) -> Instance:
    with open(path, "rb") as fh:
        return load_instance(fh.read())


def write_instance(inst: Instance, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_instance(inst))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def adversarial_batch_times(k: int, s: int, epsilon: Fraction) -> list[Fraction]:
    """t_1 = 0 and t_i = 1 + (2i - 3) * epsilon for the s*k batches."""
    return [Fraction(0)] + [1 + (2 * i - 3) * epsilon for i in range(2, s * k + 1)]


def gen_adversarial_line(k: int, s: int, epsilon, spacing=2) -> Instance:
    """Lower-bound family: s*k batches, each placing one request on every one of
    k equally spaced line points. Ids run batch-major, then point order."""
    epsilon = as_rational(epsilon)
    spacing = as_rational(spacing)
    if k < 2 or s < 1:
        raise InstanceError("need k >= 2 and s >= 1")
    if epsilon <= 0 or spacing <= 0:
        raise InstanceError("epsilon and spacing must be positive")
    space = MetricSpace(LINE, k)
    reqs = []
    for t in adversarial_batch_times(k, s, epsilon):
        for j in range(k):
            reqs.append(Request(len(reqs), t, spacing * j))
    return make_instance(space, reqs, name=f"adversarial-k{k}-s{s}-eps{render(epsilon)}")


DEFAULT_PARAMS = {"span": 10, "horizon": 10, "n": 5, "max_weight": 10, "metric": DMAX, "gamma": 1}


def _closure(w: list[list[int]]) -> list[list[int]]:
    n = len(w)
    d = [row[:] for row in w]
    for via in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][via] + d[via][j] < d[i][j]:
                    d[i][j] = d[i][via] + d[via][j]
    return d


def gen_random(kind: str, k: int, m: int, seed: int, params: Mapping | None = None) -> Instance:
    """Seeded random instance.

    ``line_uniform`` draws integer coordinates in [0, span]; ``explicit_random``
    draws a random positive symmetric matrix on ``n`` points and takes its
    shortest-path closure, then uses it as a ``dmax`` or ``dhc`` base. Arrival
    times are sorted integers in [0, horizon].
    """
    p = dict(DEFAULT_PARAMS)
    p.update(params or {})
    if k < 2 or m <= 0 or m % k:
        raise InstanceError(f"m must be a positive multiple of k (m={m}, k={k})")
    if p["span"] < 0 or p["horizon"] < 0 or p["n"] < 1 or p["max_weight"] < 1:
        raise InstanceError(f"invalid params {p}")
    rng = random.Random(seed)
    times = sorted(rng.randint(0, p["horizon"]) for _ in range(m))
    gamma = as_rational(str(p["gamma"]))
    if kind == "line_uniform":
        space = MetricSpace(LINE, k, gamma)
        positions = [Fraction(rng.randint(0, p["span"])) for _ in range(m)]
        name = f"line-k{k}-m{m}-seed{seed}"
    elif kind == "explicit_random":
        n = p["n"]
        w = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                w[i][j] = w[j][i] = rng.randint(1, p["max_weight"])
        metric = normalize_kind(p["metric"])
        if metric not in (DMAX, DHC):
            raise InstanceError("explicit_random needs metric dmax or dhc")
        space = explicit_space(metric, _closure(w), k, gamma)
        positions = [rng.randrange(n) for _ in range(m)]
        name = f"{metric}-n{n}-k{k}-m{m}-seed{seed}"
    else:
        raise InstanceError(f"unknown generator kind {kind!r}")
    reqs = [Request(i, Fraction(t), pos) for i, (t, pos) in enumerate(zip(times, positions))]
    return make_instance(space, reqs, name=name)
