"""Figures written next to the CSV outputs.  Convenience only: nothing in
the test suite depends on their bytes."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "svg.hashsalt": "levyexit",
    "figure.figsize": (5.0, 3.6),
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_scaling(table, fit, path, statistic="q50"):
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        n = table.n
        ax.loglog(n, table.column("q10"), "v", color="0.6", label="q10")
        ax.loglog(n, table.column("q90"), "^", color="0.6", label="q90")
        ax.loglog(n, table.column(statistic), "o", color="C0", label=statistic)
        ax.loglog(n, np.exp(fit.intercept) * n**fit.slope, "-", color="C0",
                  label=f"fit slope {fit.slope:.3f}")
        ref = table.column(statistic)[0] * (n / n[0]) ** fit.theoretical
        ax.loglog(n, ref, "--", color="C3", label=f"theory {fit.theoretical:g}")
        ax.set_xlabel("n")
        ax.set_ylabel("exit time")
        ax.set_title(f"{table.model.value}, alpha = {table.alpha:g}")
        ax.legend(fontsize=8)
        return _save(fig, path)


def plot_phase(scan_walk, scan_flight, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        grid = np.linspace(0.05, 2.0, 200)
        ax.plot(grid, grid / 2, "--", color="C1", lw=1, label="flight theory")
        ax.plot(grid, np.maximum(0.5, grid / 2), "-", color="C0", lw=1, label="walk theory")
        for scan, color, lab in ((scan_walk, "C0", "walk"), (scan_flight, "C1", "flight")):
            if scan:
                a = [s[0] for s in scan]
                ax.errorbar(a, [s[1].slope for s in scan], yerr=[2 * s[1].slope_stderr for s in scan],
                            fmt="o", color=color, label=f"{lab} fit")
        ax.axvline(1.0, color="0.7", lw=0.8)
        ax.set_xlabel("alpha")
        ax.set_ylabel("exponent")
        ax.legend(fontsize=8)
        return _save(fig, path)


def plot_cdf(t, curves, path, xlabel="t", logx=True):
    """``curves`` maps label -> y values on ``t``."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for label, y in curves.items():
            ax.step(t, y, where="post", label=label) if label.startswith("empirical") \
                else ax.plot(t, y, label=label)
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("P{T <= t}")
        ax.legend(fontsize=8)
        return _save(fig, path)


def plot_bounds(k, empirical, bound, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        ax.semilogy(k, empirical, "o", ms=3, label="Monte Carlo")
        ax.semilogy(k, np.minimum(bound, 10.0), "-", label="bound")
        ax.set_xlabel("k")
        ax.set_ylabel("probability")
        ax.legend(fontsize=8)
        return _save(fig, path)


def plot_ccdf(z, columns, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for label, y in columns.items():
            ax.loglog(z, y, label=label)
        ax.set_xlabel("z")
        ax.set_ylabel("P{Z|cos theta| > z}")
        ax.legend(fontsize=8)
        return _save(fig, path)
