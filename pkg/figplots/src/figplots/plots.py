"""Figure rendering: log-log spectra and risk-vs-n curves with error bars."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reader import ResultTable, read_table


def _load_all(paths, family):
    return [read_table(p, family) for p in paths]


def plot_spectrum(paths, out_path: str) -> None:
    """Log-log rank vs eigenvalue, one solid line per alpha per input file,
    with the predicted power-law reference as a dashed line where present
    (zero predictions are skipped)."""
    tables = _load_all(paths, "spectrum")
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for table in tables:
        for alpha in table.alphas():
            rows = table.by_alpha(alpha)
            ranks = table.floats("rank", rows)
            lams = table.floats("lambda", rows)
            pos = [(r, l) for r, l in zip(ranks, lams) if l > 0]
            if not pos:
                continue
            line, = ax.plot(*zip(*pos), label=rf"$\alpha$ = {alpha}")
            preds = table.floats("predicted_lambda", rows)
            ref = [(r, p) for r, p in zip(ranks, preds) if p > 0]
            if ref:
                # anchor the shape-only reference at the first plotted rank
                r0, p0 = ref[0]
                scale = dict(pos).get(r0, pos[0][1]) / p0
                ax.plot([r for r, _ in ref], [p * scale for _, p in ref],
                        linestyle="--", color=line.get_color(), alpha=0.6)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("rank")
    ax.set_ylabel("eigenvalue")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def plot_risk(paths, out_path: str, theory_overlay: bool = False) -> None:
    """Excess risk vs sample size with per-point error bars; one curve per
    alpha per input file, optional dotted theory-prediction overlay."""
    tables = _load_all(paths, "risk")
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for table in tables:
        target = table.rows[0]["target"]
        for alpha in table.alphas():
            rows = sorted(table.by_alpha(alpha), key=lambda r: float(r["n"]))
            ns = table.floats("n", rows)
            means = table.floats("mean_risk", rows)
            errs = table.floats("std_err", rows)
            container = ax.errorbar(
                ns, means, yerr=errs, marker="o", capsize=3,
                label=rf"$\alpha$ = {alpha} ({target})")
            if theory_overlay:
                ax.plot(ns, table.floats("theory_risk", rows),
                        linestyle=":", color=container.lines[0].get_color())
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("sample size n")
    ax.set_ylabel("excess risk")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
