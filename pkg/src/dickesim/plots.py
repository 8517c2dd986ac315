"""Figure rendering for the CLI report path (optional, behind --plot)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_sweep(rows: list[dict], path) -> Path:
    """Log-log infidelity vs Purcell factor, one curve per target, with the
    analytic prediction overlaid as dashed lines."""
    fig, ax = plt.subplots(figsize=(5.2, 3.9))
    labels = []
    for row in rows:
        if row["target"] not in labels:
            labels.append(row["target"])
    cmap = plt.get_cmap("viridis")
    for i, label in enumerate(labels):
        sel = [r for r in rows if r["target"] == label]
        p = np.array([r["p1d"] for r in sel])
        inf = np.array([r["infidelity"] for r in sel])
        ana = np.array([r["infidelity_analytic"] for r in sel])
        color = cmap(i / max(len(labels) - 1, 1))
        ax.loglog(p, inf, "o-", color=color, label=label, ms=4)
        ax.loglog(p, ana, "--", color=color, alpha=0.5, lw=1)
    ax.set_xlabel(r"$P_\mathrm{1D}$")
    ax.set_ylabel("infidelity")
    ax.legend(fontsize=7, ncol=2)
    ax.grid(True, which="both", alpha=0.25)
    return _save(fig, path)


def plot_trajectory(times, norms, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(times, np.asarray(norms) ** 2, "o-", ms=4)
    ax.set_xlabel(r"time  [$1/\Gamma_\mathrm{1D}$]")
    ax.set_ylabel("squared norm")
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.25)
    return _save(fig, path)


def plot_line_shape(detunings, amplitudes, n_atoms, path) -> Path:
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(detunings, np.abs(amplitudes) ** 2)
    ax.set_xlabel(r"$\delta\omega$  [$\Gamma_\mathrm{1D}$]")
    ax.set_ylabel(r"$|A|^2$")
    ax.set_xlim(-3 * n_atoms, 3 * n_atoms)
    ax.grid(alpha=0.25)
    return _save(fig, path)


def plot_two_photon(detunings, amplitudes, n_atoms, path) -> Path:
    fig, ax = plt.subplots(figsize=(4.6, 3.9))
    extent = [detunings[0], detunings[-1], detunings[0], detunings[-1]]
    ax.imshow(
        np.abs(amplitudes) ** 2,
        origin="lower",
        extent=extent,
        aspect="equal",
        cmap="inferno",
    )
    lim = 3 * n_atoms
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_xlabel(r"$\delta\omega_1$  [$\Gamma_\mathrm{1D}$]")
    ax.set_ylabel(r"$\delta\omega_2$  [$\Gamma_\mathrm{1D}$]")
    return _save(fig, path)
