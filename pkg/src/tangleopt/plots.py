"""Figure rendering for the CLI report paths.

Each function takes the rows a command is about to write as CSV and
returns a matplotlib figure; the CLI saves it next to the delimited
output.  File format follows the target extension (.svg, .png, .pdf).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["sweep_figure", "compare_figure", "evolve_figure", "save_figure"]


def sweep_figure(taus, lambda_columns, d: int):
    """Schmidt coefficients of the most robust states versus tangle."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for i in range(d):
        ax.plot(taus, lambda_columns[i], label=rf"$\lambda_{{{i}}}$")
    ax.set_xlabel("tangle")
    ax.set_ylabel("Schmidt coefficient")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False, ncol=2)
    fig.tight_layout()
    return fig


def compare_figure(qs, rate_schmidt, rate_general):
    """Schmidt-restricted versus unrestricted optimum, log(-rate) scale."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(qs, [-r for r in rate_schmidt], "-", label="Schmidt-restricted")
    ax.plot(qs, [-r for r in rate_general], "o", mfc="none", label="general states")
    ax.set_yscale("log")
    ax.set_xlabel("q")
    ax.set_ylabel("-(tangle increment)")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def evolve_figure(times, tangle_opt, rand_min=None, rand_median=None, rand_max=None):
    """Tangle decay of the optimized state against the random ensemble."""
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    if rand_min is not None and rand_max is not None:
        ax.fill_between(times, rand_min, rand_max, color="0.8",
                        label="random states (min..max)")
    if rand_median is not None:
        ax.plot(times, rand_median, color="0.5", lw=1.0, label="random median")
    ax.plot(times, tangle_opt, color="k", lw=1.6, label="optimized")
    ax.set_xlabel("time (units of inverse rate)")
    ax.set_ylabel("tangle estimate")
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def save_figure(fig, path: str) -> None:
    fig.savefig(path)
    plt.close(fig)
