"""Figures for bench and lower-bound reports, drawn from float columns only."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path: str) -> str:
    fig.tight_layout()
    # fixed metadata keeps the output stable across runs
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_bench(rows: list[dict], prefix: str) -> list[str]:
    """``rows`` hold floats (or None) keyed by the bench CSV columns."""
    paths = []
    xs = list(range(len(rows)))

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, [r["alg"] for r in rows], "o-", ms=3, label="ALG")
    ax.plot(xs, [r["dual"] for r in rows], "s-", ms=3, label="D'")
    if any(r["pprime"] is not None for r in rows):
        ax.plot(xs, [r["pprime"] for r in rows], "^", ms=3, label="P'")
    if any(r["opt"] is not None for r in rows):
        ax.plot(xs, [r["opt"] for r in rows], "x", ms=4, label="OPT")
    ax.set_xlabel("instance")
    ax.set_ylabel("cost")
    ax.set_yscale("symlog")
    ax.legend()
    paths.append(_save(fig, f"{prefix}_costs.png"))

    ratios = [(r["m"], r["ratio"]) for r in rows if r["ratio"] is not None]
    if ratios:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.scatter([m for m, _ in ratios], [q for _, q in ratios], s=12)
        ax.set_xlabel("m")
        ax.set_ylabel("ALG / OPT")
        paths.append(_save(fig, f"{prefix}_ratio.png"))
    return paths


def plot_lowerbound(doc: dict, path: str) -> str:
    """Bar chart of ALG, the claimed lower bound on ALG, OPT and the OPT claim."""
    labels = ["ALG", "ALG lower claim", "OPT", "OPT upper claim"]
    vals = [doc["alg_float"], doc["alg_lower_float"], doc["opt_float"], doc["opt_upper_float"]]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, vals, color=["C0", "C0", "C1", "C1"], alpha=0.8)
    ax.set_title(f"k={doc['k']} s={doc['s']} eps={doc['epsilon']}")
    ax.set_ylabel("cost")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    return _save(fig, path)
