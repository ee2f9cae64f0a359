"""Figure rendering for solver reports (written next to the CSV/JSON output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .asymptotics import classify_regime


def plot_profile(path, profile, params) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    r, u = profile.grid.nodes, profile.values
    ax1.plot(r, u, lw=1.2)
    ax1.set_xlabel("r")
    ax1.set_ylabel("u(r)")
    ax1.set_title(f"groundstate profile (N={params.dim}, a={params.alpha:g}, p={params.p:g})")
    pos = u > 0
    ax2.semilogy(r[pos], u[pos], lw=1.2)
    ax2.set_xlabel("r")
    ax2.set_ylabel("u(r)")
    ax2.set_title("log scale")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_decay_trace(path, r, transformed, params, plateau=None) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.plot(r, transformed, lw=1.2, label="transformed tail")
    if plateau is not None:
        ax.axhline(plateau, color="k", ls="--", lw=0.8, label="plateau")
    ax.set_xlabel("r")
    labels = {
        "superlinear": r"$u\,r^{(N-1)/2}e^{r}$",
        "linear": r"$u\,r^{(N-1)/2}e^{A(r)}$",
        "sublinear": r"$u^{2-p}\,r^{N-\alpha}$",
    }
    ax.set_ylabel(labels[classify_regime(params.p)])
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_s_history(path, s_history) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    s = np.asarray(s_history)
    ax.semilogy(np.arange(len(s)), s - s[-1] + 1e-300, lw=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("S - S_final")
    ax.set_title("quotient descent")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
