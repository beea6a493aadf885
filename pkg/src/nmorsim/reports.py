"""Figure rendering for the CLI report path.

Every command that writes delimited output can also render a matching
figure next to it.  Rendering is file-only (Agg backend); nothing here
affects the numerical outputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_sweep_figure(rows, path, dpi: int = 150) -> None:
    """Transmission, rotation and G2(0) against the magnetic field."""
    b = np.array([r.b_gauss for r in rows])
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 8.0), sharex=True)
    axes[0].plot(b, [r.transmission for r in rows], "-o", ms=3, color="tab:blue")
    axes[0].set_ylabel("transmission")
    axes[1].plot(b, [r.rotation for r in rows], "-o", ms=3, color="tab:orange")
    axes[1].set_ylabel("rotation (rad)")
    axes[2].errorbar(b, [r.g2_zero for r in rows],
                     yerr=[r.g2_zero_stderr for r in rows],
                     fmt="-o", ms=3, color="tab:green", capsize=2,
                     label="estimator")
    axes[2].plot(b, [r.g2_analytic for r in rows], "--", color="gray",
                 label="moment closed form")
    axes[2].set_ylabel(r"$G^{(2)}(0)$")
    axes[2].set_xlabel("magnetic field (G)")
    axes[2].legend(fontsize=8)
    for ax in axes:
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def render_trace_figure(pair, corr, path, dpi: int = 150) -> None:
    """Detector traces and, when defined, the delay-resolved G2."""
    n_rows = 2 if corr is not None else 1
    fig, axes = plt.subplots(n_rows, 1, figsize=(6.5, 3.0 * n_rows))
    axes = np.atleast_1d(axes)
    t_us = pair.times * 1e6
    axes[0].plot(t_us, pair.ch1, lw=0.7, label="S1")
    axes[0].plot(t_us, pair.ch2, lw=0.7, label="S2")
    axes[0].set_xlabel("time (us)")
    axes[0].set_ylabel("signal (arb.)")
    axes[0].legend(fontsize=8)
    axes[0].grid(alpha=0.3)
    if corr is not None:
        axes[1].plot(corr.taus * 1e6, corr.values, lw=1.0, color="tab:green")
        axes[1].axhline(0.0, color="k", lw=0.5)
        axes[1].set_xlabel("delay (us)")
        axes[1].set_ylabel(r"$G^{(2)}(\tau)$")
        axes[1].set_ylim(-1.05, 1.05)
        axes[1].grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def render_correlation_figure(corr, path, dpi: int = 150) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.5))
    ax.plot(corr.taus * 1e6, corr.values, lw=1.0, color="tab:green")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_xlabel("delay (us)")
    ax.set_ylabel(r"$G^{(2)}(\tau)$")
    ax.set_ylim(-1.05, 1.05)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
