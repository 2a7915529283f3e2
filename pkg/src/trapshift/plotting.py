"""Figure rendering for the CLI report path.

Each experiment writes a PNG next to its CSV. Figures are deliberately
plain: the CSV is the contract, the plot is the quick look.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "plot_curves",
    "plot_phase",
    "plot_complex_pair",
    "plot_estimates",
    "plot_noise_bands",
    "plot_levels",
]

_DPI = 140


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_curves(path, x, curves: dict, xlabel: str, ylabel: str, title: str):
    """Plain line plot, one labelled curve per dict entry."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, y in curves.items():
        ax.plot(x, y, label=label, lw=1.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=9)
    return _finish(fig, path)


def plot_phase(path, energies, cot_phi, cot_delta, title: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(energies, cot_delta, "k-", lw=1.4, label="cot delta (infinite volume)")
    ax.plot(energies, cot_phi, "ro", ms=3.5, label="cot phi (trap)")
    ax.set_xlabel("E [nat]")
    ax.set_ylabel("cot phase")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=9)
    return _finish(fig, path)


def plot_complex_pair(path, x, lhs, rhs, xlabel, lhs_label, rhs_label, title):
    """Two stacked panels: real and imaginary parts of two complex series."""
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    for ax, part in zip(axes, ("real", "imag")):
        take = np.real if part == "real" else np.imag
        ax.plot(x, take(rhs), "k-", lw=1.4, label=rhs_label)
        ax.plot(x, take(lhs), "ro", ms=3.5, label=lhs_label)
        ax.set_ylabel(f"{part} part")
        ax.legend(frameon=False, fontsize=9)
    axes[1].set_xlabel(xlabel)
    axes[0].set_title(title)
    return _finish(fig, path)


def plot_estimates(path, t, exact_re, exact_im, est_re, est_im, err_re, err_im, title):
    fig, axes = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    axes[0].plot(t, exact_re, "r-", lw=1.4, label="exact")
    axes[0].errorbar(t, est_re, yerr=err_re, fmt="ko", ms=3, lw=1, label="estimate")
    axes[0].set_ylabel("Re")
    axes[1].plot(t, exact_im, "m-", lw=1.4, label="exact")
    axes[1].errorbar(t, est_im, yerr=err_im, fmt="ko", ms=3, lw=1, label="estimate")
    axes[1].set_ylabel("Im")
    axes[1].set_xlabel("t [nat]")
    axes[0].set_title(title)
    for ax in axes:
        ax.legend(frameon=False, fontsize=9)
    return _finish(fig, path)


def plot_noise_bands(path, summaries: dict, ideal_label: str, title: str):
    """95% prediction-interval bands per noise setting plus the ideal curve."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    first = True
    for label, s in summaries.items():
        if first:
            ax.plot(s.times, s.ideal, "r-", lw=1.6, label=ideal_label)
            first = False
        ax.fill_between(s.times, s.lo, s.hi, alpha=0.35, label=label)
        ax.plot(s.times, s.mean, lw=0.8)
    ax.set_xlabel("t [nat]")
    ax.set_ylabel("ancilla signal")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    return _finish(fig, path)


def plot_levels(path, indices, spectra: dict, title: str):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    markers = ["o", "s", "^", "v"]
    for (label, e), mk in zip(spectra.items(), markers):
        ax.plot(indices, e, mk, ms=4, label=label)
    ax.set_xlabel("level index n")
    ax.set_ylabel("energy [nat]")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=9)
    return _finish(fig, path)
