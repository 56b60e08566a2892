"""Uniform interface over the two rotation ensembles.

An ensemble can (a) draw one rotation for one shot from that shot's own
random stream, (b) give the outcome distribution of a state under the
rotated measurement, and (c) reproduce the snapshot states V|b> = U^dag|b>
afterwards.  MUB rotations are indexed by basis id and shared across
shots; Clifford rotations are one-off, so their stored id is the shot
index and the element is regenerated from (master_seed, shot) when a
saved shadow is evaluated.

Ensemble objects are read-only after construction apart from an
idempotent phase-vector cache, so shots may be processed concurrently.
"""

from __future__ import annotations

import numpy as np

from . import clifford
from .mub import MubFamily, _quadratic_phases, build_family, mub_state
from .sim import LANE_ROTATION, fwht, shot_rng

MUB_TAG = "mub"
CLIFFORD_TAG = "clifford"

# Above this size the per-basis phase vectors stop being cached (2^n + 1
# vectors of 2^n complexes each would dwarf the states themselves).
_PHASE_CACHE_MAX_QUBITS = 10


class MubEnsemble:
    """The 2^n + 1 mutually unbiased bases as a rotation ensemble."""

    tag = MUB_TAG
    cacheable = True  # outcome distributions depend only on (basis id, state)

    def __init__(self, family: MubFamily):
        self.family = family
        self.n = family.n
        self._phase_cache: dict[int, np.ndarray] = {}

    def diag_phases(self, j: int) -> np.ndarray:
        if self.n > _PHASE_CACHE_MAX_QUBITS:
            return _quadratic_phases(self.family, j)
        phases = self._phase_cache.get(j)
        if phases is None:
            phases = _quadratic_phases(self.family, j)
            self._phase_cache[j] = phases
        return phases

    def draw(self, shot: int, rng: np.random.Generator) -> tuple[int, int]:
        j = int(rng.integers(0, self.family.n_bases))
        return j, j

    def outcome_probs(self, payload: int, state: np.ndarray) -> np.ndarray:
        """Born distribution of `state` in basis j.

        <e_j^b|psi> = 2^(-n/2) FWHT(conj(D_j) psi)[b], so one basis costs
        O(2^n n) instead of a 2^n x 2^n product.
        """
        if payload == 0:
            return np.abs(state) ** 2
        amps = fwht(self.diag_phases(payload).conj() * state)
        return np.abs(amps) ** 2 * 2.0 ** (-self.n)

    def snapshot_state(self, rot_id: int, b: int) -> np.ndarray:
        """V_j |b>, the state that snapshot record (j, b) stands for."""
        return mub_state(self.family, rot_id, b)

    def overlap_table(self, rot_id: int, phi: np.ndarray) -> np.ndarray:
        """<phi | e_j^b> for every outcome b of one basis."""
        if rot_id == 0:
            return phi.conj()
        amps = fwht(self.diag_phases(rot_id) * phi.conj())
        return amps * 2.0 ** (-self.n / 2)


class CliffordEnsemble:
    """Uniformly random Clifford rotations, one fresh element per shot."""

    tag = CLIFFORD_TAG
    cacheable = False

    def __init__(self, n: int, master_seed: int,
                 max_dense_qubits: int = clifford.DEFAULT_MAX_DENSE_QUBITS):
        self.n = n
        self.master_seed = master_seed
        self.max_dense_qubits = max_dense_qubits

    def draw(
        self, shot: int, rng: np.random.Generator
    ) -> tuple[int, clifford.CliffordElement]:
        return shot, clifford.sample_clifford(self.n, rng, self.max_dense_qubits)

    def element(self, rot_id: int) -> clifford.CliffordElement:
        """Replay the element of shot rot_id from its rotation stream."""
        rng = shot_rng(self.master_seed, rot_id, LANE_ROTATION)
        return clifford.sample_clifford(self.n, rng, self.max_dense_qubits)

    def outcome_probs(
        self, payload: clifford.CliffordElement, state: np.ndarray
    ) -> np.ndarray:
        return np.abs(payload.dense @ state) ** 2

    def snapshot_state(self, rot_id: int, b: int) -> np.ndarray:
        return clifford.rotated_basis_state(self.element(rot_id), b)


def make_ensemble(tag: str, n: int, master_seed: int):
    """Ensemble from the fields stored in a shadow-file header."""
    if tag == MUB_TAG:
        return MubEnsemble(build_family(n))
    if tag == CLIFFORD_TAG:
        return CliffordEnsemble(n, master_seed)
    raise ValueError(f"unknown ensemble tag {tag!r}")
