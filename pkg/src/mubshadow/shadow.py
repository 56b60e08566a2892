"""Classical-shadow pipeline: acquisition, reconstruction, estimation.

A shadow is a list of (rotation id, outcome) pairs plus metadata; dense
snapshot matrices only ever appear inside the small-n enumeration oracles
used for cross-checking.  Estimates come from the median of K group means
of per-snapshot values

    X = (2^n + 1) <b| V^dag O V |b> - tr(O),

which is the inverse reconstruction channel A -> (2^n + 1) A - tr(A) I
evaluated without building A.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .ensembles import MUB_TAG, make_ensemble
from .mub import MubFamily, basis_matrix
from .sim import (
    LANE_BRANCH,
    LANE_OUTCOME,
    LANE_ROTATION,
    StateModel,
    sample_branch,
    sample_outcome,
    shot_rng,
)


@dataclass(frozen=True)
class Observable:
    """Rank-1 projector (kept as a statevector) or small dense Hermitian."""

    kind: str
    n: int
    trace: float
    vector: np.ndarray | None = None
    matrix: np.ndarray | None = None
    label: str = ""

    @classmethod
    def projector(cls, amplitudes: np.ndarray, label: str = "projector") -> "Observable":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        dim = amplitudes.shape[0]
        n = dim.bit_length() - 1
        if dim != 1 << n:
            raise ValueError("projector amplitude count must be a power of two")
        norm_sq = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm_sq - 1.0) > 1e-9:
            raise ValueError(f"projector norm^2 {norm_sq} deviates from 1 beyond 1e-9")
        return cls(kind="projector", n=n, trace=1.0, vector=amplitudes, label=label)

    @classmethod
    def dense(cls, matrix: np.ndarray, label: str = "dense") -> "Observable":
        matrix = np.asarray(matrix, dtype=complex)
        dim = matrix.shape[0]
        n = dim.bit_length() - 1
        if matrix.shape != (dim, dim) or dim != 1 << n:
            raise ValueError("dense observable must be square with power-of-two size")
        if np.abs(matrix - matrix.conj().T).max() > 1e-9:
            raise ValueError("dense observable deviates from Hermitian beyond 1e-9")
        return cls(
            kind="dense", n=n, trace=float(np.trace(matrix).real),
            matrix=matrix, label=label,
        )

    @classmethod
    def ghz(cls, n: int) -> "Observable":
        from .sim import ghz_state

        return cls.projector(ghz_state(n), label="ghz-fidelity")

    def expectation(self, state: np.ndarray) -> float:
        """<e|O|e> for a pure state e."""
        if self.kind == "projector":
            return abs(np.vdot(self.vector, state)) ** 2
        return float(np.vdot(state, self.matrix @ state).real)

    def traceless_hs_norm_sq(self) -> float:
        """tr(O_0^2) for O_0 = O - tr(O)/2^n I."""
        dim = 1 << self.n
        if self.kind == "projector":
            return 1.0 - self.trace**2 / dim
        o0 = self.matrix - self.trace / dim * np.eye(dim)
        return float(np.trace(o0 @ o0).real)


@dataclass(frozen=True)
class SnapshotRecord:
    ensemble_tag: str
    rotation_id: int
    outcome: int


@dataclass(frozen=True)
class ShadowMeta:
    n: int
    ensemble: str
    seed: int
    shots: int
    state: str


@dataclass
class ShadowSet:
    """Acquired shadow: metadata plus parallel (rotation id, outcome) arrays."""

    meta: ShadowMeta
    rotation_ids: np.ndarray
    outcomes: np.ndarray

    def __len__(self) -> int:
        return len(self.rotation_ids)

    def records(self) -> Iterator[SnapshotRecord]:
        for j, b in zip(self.rotation_ids, self.outcomes):
            yield SnapshotRecord(self.meta.ensemble, int(j), int(b))


@dataclass(frozen=True)
class EstimatorConfig:
    """Median-of-means group count; K = 1 is the plain mean."""

    k_groups: int = 1

    def __post_init__(self):
        if self.k_groups < 1:
            raise ValueError("group count must be >= 1")


def acquire(
    model: StateModel,
    ensemble,
    shots: int,
    master_seed: int,
    threads: int = 1,
) -> ShadowSet:
    """Run the rotate-and-measure loop `shots` times.

    Shot i draws its rotation from stream (master_seed, i, rotation lane)
    and its outcome from (master_seed, i, outcome lane), so the record
    sequence depends only on the seed, never on `threads`.
    """
    if shots < 1:
        raise ValueError("shot count must be >= 1")
    rotation_ids = np.empty(shots, dtype=np.int64)
    outcomes = np.empty(shots, dtype=np.int64)
    probs_cache: dict[tuple[int, int], np.ndarray] = {}
    branching = model.kind == "noisy_ghz"

    def run_range(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            if branching:
                branch_id, state = sample_branch(
                    model, shot_rng(master_seed, i, LANE_BRANCH)
                )
            else:
                branch_id, state = 0, model.amplitudes
            rot_id, payload = ensemble.draw(i, shot_rng(master_seed, i, LANE_ROTATION))
            if ensemble.cacheable:
                key = (rot_id, branch_id)
                probs = probs_cache.get(key)
                if probs is None:
                    probs = ensemble.outcome_probs(payload, state)
                    probs_cache[key] = probs
            else:
                probs = ensemble.outcome_probs(payload, state)
            outcomes[i] = sample_outcome(probs, shot_rng(master_seed, i, LANE_OUTCOME))
            rotation_ids[i] = rot_id

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        bounds = np.linspace(0, shots, threads + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_range, bounds[:-1], bounds[1:]))
    else:
        run_range(0, shots)

    meta = ShadowMeta(
        n=model.n, ensemble=ensemble.tag, seed=master_seed,
        shots=shots, state=model.describe(),
    )
    return ShadowSet(meta=meta, rotation_ids=rotation_ids, outcomes=outcomes)


# ---------------------------------------------------------------------------
# Persistence: JSON lines, header record first, then one record per shot.

def save_shadow(shadow: ShadowSet, path: str | Path) -> None:
    meta = shadow.meta
    width = meta.n
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "n": meta.n, "ensemble": meta.ensemble, "seed": meta.seed,
            "N": meta.shots, "state": meta.state,
        }
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for j, b in zip(shadow.rotation_ids, shadow.outcomes):
            line = {"j": int(j), "b": format(int(b), f"0{width}b")}
            fh.write(json.dumps(line, separators=(",", ":")) + "\n")


def load_shadow(path: str | Path) -> ShadowSet:
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        meta = ShadowMeta(
            n=int(header["n"]), ensemble=header["ensemble"],
            seed=int(header["seed"]), shots=int(header["N"]),
            state=header.get("state", "unknown"),
        )
        rotation_ids = []
        outcomes = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            rotation_ids.append(int(rec["j"]))
            outcomes.append(int(rec["b"], 2))
    if len(rotation_ids) != meta.shots:
        raise ValueError(
            f"shadow file holds {len(rotation_ids)} records, header says {meta.shots}"
        )
    return ShadowSet(
        meta=meta,
        rotation_ids=np.array(rotation_ids, dtype=np.int64),
        outcomes=np.array(outcomes, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# Reconstruction channel and its enumeration oracle.

def forward_channel(a: np.ndarray) -> np.ndarray:
    """(A + tr(A) I) / (2^n + 1): the ensemble average of snapshot projectors."""
    dim = a.shape[0]
    return (a + np.trace(a) * np.eye(dim)) / (dim + 1)


def inverse_channel(a: np.ndarray) -> np.ndarray:
    """(2^n + 1) A - tr(A) I: undoes forward_channel."""
    dim = a.shape[0]
    return (dim + 1) * a - np.trace(a) * np.eye(dim)


def exact_channel_enum(fam: MubFamily, rho: np.ndarray) -> np.ndarray:
    """Average of tr(rho P) P over all (2^n + 1) 2^n basis projectors.

    Independent of forward_channel: this sums the actual family states,
    so agreement certifies that the family really averages to the
    depolarising channel.
    """
    dim = 1 << fam.n
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(fam.n_bases):
        B = basis_matrix(fam, j)
        weights = np.einsum("ak,ab,bk->k", B.conj(), rho, B).real
        out += (B * weights) @ B.conj().T
    return out / (dim + 1)


# ---------------------------------------------------------------------------
# Per-snapshot estimator values.

def snapshot_expectation(rec: SnapshotRecord, obs: Observable, ensemble) -> float:
    """(2^n + 1) <b|V^dag O V|b> - tr(O) for a single stored record."""
    state = ensemble.snapshot_state(rec.rotation_id, rec.outcome)
    dim = state.shape[0]
    if obs.n != dim.bit_length() - 1:
        raise ValueError("observable and record qubit counts differ")
    return (dim + 1) * obs.expectation(state) - obs.trace


def snapshot_values(
    shadow: ShadowSet, obs: Observable, ensemble=None
) -> np.ndarray:
    """Per-record estimator values, in acquisition order.

    MUB shadows group records by basis; projector observables then need
    one overlap table per basis (an FWHT each) and a lookup per record,
    so no 2^n x 2^n matrix is ever formed.
    """
    if obs.n != shadow.meta.n:
        raise ValueError("observable and shadow qubit counts differ")
    if ensemble is None:
        ensemble = make_ensemble(shadow.meta.ensemble, shadow.meta.n, shadow.meta.seed)
    dim = 1 << shadow.meta.n
    factor = dim + 1
    values = np.empty(len(shadow), dtype=float)
    if shadow.meta.ensemble == MUB_TAG:
        for j in np.unique(shadow.rotation_ids):
            mask = shadow.rotation_ids == j
            bs = shadow.outcomes[mask]
            if obs.kind == "projector":
                table = ensemble.overlap_table(int(j), obs.vector)
                values[mask] = factor * np.abs(table[bs]) ** 2 - obs.trace
            else:
                B = basis_matrix(ensemble.family, int(j))
                diag = np.einsum("ak,ab,bk->k", B.conj(), obs.matrix, B).real
                values[mask] = factor * diag[bs] - obs.trace
    else:
        for i, (rid, b) in enumerate(zip(shadow.rotation_ids, shadow.outcomes)):
            state = ensemble.snapshot_state(int(rid), int(b))
            values[i] = factor * obs.expectation(state) - obs.trace
    return values


def median_of_means(values: np.ndarray, k_groups: int) -> float:
    """Median of K contiguous group means; trailing leftovers are dropped."""
    n_values = len(values)
    if n_values == 0:
        raise ValueError("no snapshot values to estimate from")
    if k_groups > n_values:
        raise ValueError(f"group count {k_groups} exceeds record count {n_values}")
    group_len = n_values // k_groups
    used = values[: k_groups * group_len]
    means = used.reshape(k_groups, group_len).mean(axis=1)
    return float(np.median(means))


def estimate(
    shadow: ShadowSet,
    observables: Sequence[Observable],
    cfg: EstimatorConfig = EstimatorConfig(),
    ensemble=None,
) -> list[float]:
    """Median-of-means estimates of tr(O rho) for each observable."""
    if len(shadow) == 0:
        raise ValueError("empty shadow set")
    if cfg.k_groups > len(shadow):
        raise ValueError("more groups than records")
    if ensemble is None:
        ensemble = make_ensemble(shadow.meta.ensemble, shadow.meta.n, shadow.meta.seed)
    return [
        median_of_means(snapshot_values(shadow, obs, ensemble), cfg.k_groups)
        for obs in observables
    ]


# ---------------------------------------------------------------------------
# Exact enumeration: estimator moments and the shadow norm.

def snapshot_moments(
    fam: MubFamily, model: StateModel, obs: Observable
) -> tuple[float, float]:
    """(mean, variance) of the single-shot estimator over the exact joint
    distribution of (basis, outcome)."""
    rho = model.density()
    dim = 1 << fam.n
    factor = dim + 1
    mean = 0.0
    second = 0.0
    for j in range(fam.n_bases):
        B = basis_matrix(fam, j)
        pr = np.einsum("ak,ab,bk->k", B.conj(), rho, B).real / factor
        if obs.kind == "projector":
            ov = np.abs(B.conj().T @ obs.vector) ** 2
        else:
            ov = np.einsum("ak,ab,bk->k", B.conj(), obs.matrix, B).real
        x = factor * ov - obs.trace
        mean += float(pr @ x)
        second += float(pr @ (x * x))
    return mean, second - mean * mean


def exact_single_shot_variance(
    fam: MubFamily, model: StateModel, obs: Observable
) -> float:
    return snapshot_moments(fam, model, obs)[1]


class ShadowNormResult(NamedTuple):
    value: float
    bound: float  # 2 tr(O_0^2)


def shadow_norm_sq(fam: MubFamily, obs: Observable) -> ShadowNormResult:
    """Squared shadow norm of O - tr(O)/2^n I under the MUB ensemble.

    Exact by enumeration: the worst-case-state second moment is the top
    eigenvalue of S = (2^n + 1) sum_{j,k} tr(O_0 P_jk)^2 P_jk.
    """
    dim = 1 << fam.n
    o_mat = (
        np.outer(obs.vector, obs.vector.conj())
        if obs.kind == "projector"
        else obs.matrix
    )
    o0 = o_mat - np.trace(o_mat).real / dim * np.eye(dim)
    s = np.zeros((dim, dim), dtype=complex)
    for j in range(fam.n_bases):
        B = basis_matrix(fam, j)
        t = np.einsum("ak,ab,bk->k", B.conj(), o0, B).real
        s += (B * (t * t)) @ B.conj().T
    value = float((dim + 1) * np.linalg.eigvalsh(s)[-1].real)
    bound = float(2.0 * np.trace(o0 @ o0).real)
    return ShadowNormResult(value=value, bound=bound)
