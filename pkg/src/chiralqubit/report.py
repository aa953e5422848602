"""Matplotlib rendering of run outputs, written next to the CSV files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "chiralqubit"

_SAVE_KW = {"metadata": {"Date": None}, "bbox_inches": "tight"}


def line_plot(path, x, curves, xlabel="", ylabel="", title="", marker=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, y in curves:
        ax.plot(x, y, label=label, marker=marker, lw=1.2, ms=3)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(curves) > 1:
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def rate_panels(path, t, panels, title=""):
    """One panel per scenario point showing gamma_plus and gamma_minus."""
    n = len(panels)
    ncols = 2 if n > 1 else 1
    nrows = (n + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(5.5 * ncols, 3.2 * nrows),
                             squeeze=False, sharex=True)
    for k, (label, gp, gm) in enumerate(panels):
        ax = axes[k // ncols][k % ncols]
        ax.plot(t, gp, lw=1.0, label="gamma_plus")
        ax.plot(t, gm, lw=1.0, label="gamma_minus")
        ax.axhline(0.0, color="k", lw=0.5)
        ax.set_title(label, fontsize=9)
        ax.grid(alpha=0.3)
        if k == 0:
            ax.legend(fontsize=8)
    for ax in axes[-1]:
        ax.set_xlabel("t (base units)")
    if title:
        fig.suptitle(title)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def level_plot(path, d_over_j, levels, mark=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for k in range(levels.shape[1]):
        ax.plot(d_over_j, levels[:, k], lw=1.2)
    if mark is not None:
        ax.axvline(mark, color="k", ls="--", lw=0.8)
    ax.set_xlabel("D / J")
    ax.set_ylabel("energy (units of J)")
    ax.set_title("trimer level scheme")
    ax.grid(alpha=0.3)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
