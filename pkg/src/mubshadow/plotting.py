"""Figure rendering for experiment results.

Each function takes an ExperimentResult and writes one PNG next to the
CSV/JSON output.  Figures are a convenience view of the same data; the
delimited files remain the canonical record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import ExperimentResult


def plot_ghz_fidelity(result: ExperimentResult, path: str | Path) -> None:
    ns = [row["n"] for row in result.summary]
    means = [row["mean"] for row in result.summary]
    stds = [row["std"] for row in result.summary]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.axhline(1.0, color="gray", linestyle="--", linewidth=1, label="true fidelity")
    ax.errorbar(ns, means, yerr=stds, fmt="o-", capsize=4, color="#1f77b4",
                label=f"{result.params['ensemble']} shadows")
    ax.set_xlabel("qubits n")
    ax.set_ylabel("estimated GHZ fidelity")
    ax.set_xticks(ns)
    ax.set_title(f"GHZ fidelity, {result.params['shots']} shots, "
                 f"{result.params['runs']} runs")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_noisy_ghz(result: ExperimentResult, path: str | Path) -> None:
    ps = [row["p"] for row in result.summary]
    est = [row["estimate"] for row in result.summary]
    std = [row["std"] for row in result.summary]
    true = [row["true"] for row in result.summary]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ps, true, color="gray", linestyle="--", linewidth=1, label="true 1 - p")
    ax.errorbar(ps, est, yerr=std, fmt="o-", capsize=4, color="#d62728",
                label=f"{result.params['ensemble']} shadows")
    ax.set_xlabel("phase-error probability p")
    ax.set_ylabel("estimated fidelity with clean GHZ")
    ax.set_title(f"noisy GHZ, n={result.params['n']}, "
                 f"{result.params['shots']} shots per run")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_variance_compare(result: ExperimentResult, path: str | Path) -> None:
    labels = [row["observable"] for row in result.rows]
    x = range(len(labels))
    width = 0.2
    fig, ax = plt.subplots(figsize=(6.5, 4))
    for offset, key, color in (
        (-1.5, "var_mub", "#1f77b4"),
        (-0.5, "var_clifford", "#ff7f0e"),
        (0.5, "bound_mub", "#aec7e8"),
        (1.5, "bound_clifford", "#ffbb78"),
    ):
        ax.bar([xi + offset * width for xi in x],
               [row[key] for row in result.rows],
               width=width, label=key.replace("_", " "), color=color)
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels)
    ax.set_ylabel("single-shot variance")
    ax.set_title("estimator variance: MUB vs Clifford rotations")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


PLOTTERS = {
    "ghz-fidelity": plot_ghz_fidelity,
    "noisy-ghz": plot_noisy_ghz,
    "variance-compare": plot_variance_compare,
}
