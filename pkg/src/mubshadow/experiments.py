"""Driver routines for the bundled numerical experiments.

Each experiment returns a result object carrying tidy rows (ready for CSV)
plus the parameters that produced them; the CLI handles files and figures.
Run seeds are derived from (master seed, n, run index) so every cell of an
experiment is independently reproducible.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .clifford import sample_clifford
from .ensembles import make_ensemble
from .mub import build_family
from .shadow import (
    EstimatorConfig,
    Observable,
    acquire,
    estimate,
    exact_single_shot_variance,
)
from .sim import StateModel, sample_branch, sample_outcome


def derive_seed(*parts: int) -> int:
    """Deterministic 64-bit seed from a tuple of integers."""
    ss = np.random.SeedSequence(entropy=list(parts))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ExperimentResult:
    label: str
    params: dict
    rows: list[dict]
    summary: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return asdict(self)


def write_csv(path: str | Path, rows: list[dict], fieldnames: list[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)


def run_ghz_fidelity(
    n_values: tuple[int, ...] = (2, 3, 4, 5, 6),
    shots: int = 10_000,
    runs: int = 10,
    seed: int = 0,
    ensemble_tag: str = "mub",
    k_groups: int = 1,
    threads: int = 1,
) -> ExperimentResult:
    """GHZ self-fidelity per qubit count, repeated over independent runs."""
    rows = []
    summary = []
    for n in n_values:
        obs = Observable.ghz(n)
        model = StateModel.ghz(n)
        estimates = []
        for run in range(runs):
            run_seed = derive_seed(seed, n, run)
            ensemble = make_ensemble(ensemble_tag, n, run_seed)
            shadow = acquire(model, ensemble, shots, run_seed, threads=threads)
            value = estimate(shadow, [obs], EstimatorConfig(k_groups), ensemble)[0]
            estimates.append(value)
            rows.append({"n": n, "run": run, "estimate": value})
        arr = np.array(estimates)
        summary.append(
            {
                "n": n,
                "mean": float(arr.mean()),
                "std": float(arr.std(ddof=1)) if runs > 1 else 0.0,
                "runs": runs,
            }
        )
    params = {
        "ensemble": ensemble_tag, "shots": shots, "runs": runs,
        "seed": seed, "k_groups": k_groups, "n_values": list(n_values),
    }
    return ExperimentResult("ghz-fidelity", params, rows, summary)


def run_noisy_ghz(
    n: int = 3,
    shots: int = 5_000,
    p_values: tuple[float, ...] = tuple(np.round(np.arange(0.0, 1.01, 0.1), 10)),
    runs: int = 10,
    seed: int = 0,
    ensemble_tag: str = "mub",
    k_groups: int = 1,
    threads: int = 1,
) -> ExperimentResult:
    """Fidelity of a phase-noisy GHZ state against the clean one, per p.

    The true value is 1 - p since the two GHZ branches are orthogonal.
    """
    obs = Observable.ghz(n)
    rows = []
    summary = []
    for idx, p in enumerate(p_values):
        model = StateModel.noisy_ghz(n, float(p))
        estimates = []
        for run in range(runs):
            run_seed = derive_seed(seed, n, idx, run)
            ensemble = make_ensemble(ensemble_tag, n, run_seed)
            shadow = acquire(model, ensemble, shots, run_seed, threads=threads)
            value = estimate(shadow, [obs], EstimatorConfig(k_groups), ensemble)[0]
            estimates.append(value)
            rows.append({"p": float(p), "run": run, "estimate": value})
        arr = np.array(estimates)
        summary.append(
            {
                "p": float(p),
                "estimate": float(arr.mean()),
                "std": float(arr.std(ddof=1)) if runs > 1 else 0.0,
                "true": 1.0 - float(p),
            }
        )
    params = {
        "ensemble": ensemble_tag, "n": n, "shots": shots, "runs": runs,
        "seed": seed, "k_groups": k_groups, "p_values": [float(p) for p in p_values],
    }
    return ExperimentResult("noisy-ghz", params, rows, summary)


def empirical_clifford_values(
    n: int, obs: Observable, model: StateModel, samples: int, seed: int
) -> np.ndarray:
    """Single-shot estimator values under freshly sampled Clifford rotations."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    dim = 1 << n
    values = np.empty(samples)
    for i in range(samples):
        _, state = sample_branch(model, rng)
        elem = sample_clifford(n, rng)
        amps = elem.dense @ state
        b = sample_outcome(np.abs(amps) ** 2, rng)
        snapshot = elem.dense[b, :].conj()  # U^dag |b>
        values[i] = (dim + 1) * obs.expectation(snapshot) - obs.trace
    return values


def empirical_clifford_variance(
    n: int, obs: Observable, model: StateModel, samples: int, seed: int
) -> float:
    """Sample variance of the single-shot estimator under Clifford rotations."""
    return float(
        empirical_clifford_values(n, obs, model, samples, seed).var(ddof=1)
    )


def run_variance_compare(
    n_values: tuple[int, ...] = (2, 3),
    samples: int = 100_000,
    seed: int = 0,
) -> ExperimentResult:
    """Exact MUB variance vs empirical Clifford variance for GHZ projectors."""
    rows = []
    for n in n_values:
        fam = build_family(n)
        obs = Observable.ghz(n)
        model = StateModel.ghz(n)
        hs = obs.traceless_hs_norm_sq()
        rows.append(
            {
                "observable": f"ghz-projector-n{n}",
                "var_mub": exact_single_shot_variance(fam, model, obs),
                "var_clifford": empirical_clifford_variance(
                    n, obs, model, samples, derive_seed(seed, n)
                ),
                "bound_mub": 2.0 * hs,
                "bound_clifford": 3.0 * hs,
            }
        )
    params = {"n_values": list(n_values), "samples": samples, "seed": seed}
    return ExperimentResult("variance-compare", params, rows)
