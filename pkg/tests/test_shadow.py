import numpy as np
import pytest

from mubshadow.ensembles import CliffordEnsemble, MubEnsemble, make_ensemble
from mubshadow.mub import build_family, mub_state
from mubshadow.shadow import (
    EstimatorConfig,
    Observable,
    ShadowSet,
    SnapshotRecord,
    acquire,
    estimate,
    exact_channel_enum,
    exact_single_shot_variance,
    forward_channel,
    inverse_channel,
    load_shadow,
    median_of_means,
    save_shadow,
    shadow_norm_sq,
    snapshot_expectation,
    snapshot_moments,
    snapshot_values,
)
from mubshadow.sim import StateModel, ghz_state


def random_density(n, rng):
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_projector(n, rng):
    dim = 1 << n
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return Observable.projector(v / np.linalg.norm(v))


def random_hermitian(n, rng):
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return Observable.dense((a + a.conj().T) / 2)


def mixture_mean(fam, rho, obs):
    """Exact estimator mean for a mixed state via its eigen-decomposition."""
    evals, evecs = np.linalg.eigh(rho)
    total = 0.0
    for w, col in zip(evals, evecs.T):
        if w > 1e-14:
            total += w * snapshot_moments(fam, StateModel.pure(col), obs)[0]
    return total


# ---------------------------------------------------------------------------
# Observable type

def test_observable_validation():
    with pytest.raises(ValueError):
        Observable.projector(np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        Observable.dense(np.array([[0.0, 1.0], [0.0, 0.0]]))
    obs = Observable.dense(np.diag([1.0, -1.0]))
    assert obs.trace == 0.0
    assert obs.traceless_hs_norm_sq() == pytest.approx(2.0)
    ghz = Observable.ghz(3)
    assert ghz.trace == 1.0
    assert ghz.traceless_hs_norm_sq() == pytest.approx(1 - 1 / 8)


# ---------------------------------------------------------------------------
# Reconstruction channel

def test_channel_fixed_points_and_examples():
    eye = np.eye(2) / 2
    assert np.abs(forward_channel(eye) - eye).max() < 1e-15
    assert np.abs(inverse_channel(eye) - eye).max() < 1e-15
    p0 = np.diag([1.0, 0.0])
    assert np.abs(inverse_channel(p0) - np.diag([2.0, -1.0])).max() < 1e-15
    assert np.abs(forward_channel(p0) - np.diag([2 / 3, 1 / 3])).max() < 1e-15


def test_channels_invert_each_other_on_arbitrary_matrices():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3):
        dim = 1 << n
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        assert np.abs(inverse_channel(forward_channel(a)) - a).max() < 1e-12
        assert np.abs(forward_channel(inverse_channel(a)) - a).max() < 1e-12


def test_exact_channel_enum_n1_example():
    fam = build_family(1)
    out = exact_channel_enum(fam, np.diag([1.0 + 0j, 0.0]))
    assert np.abs(out - np.diag([2 / 3, 1 / 3])).max() < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_exact_channel_enum_matches_forward(n):
    fam = build_family(n)
    rng = np.random.default_rng(n)
    for _ in range(10):
        rho = random_density(n, rng)
        assert np.abs(exact_channel_enum(fam, rho) - forward_channel(rho)).max() < 1e-10


# ---------------------------------------------------------------------------
# Snapshot values

def test_snapshot_expectation_single_qubit_examples():
    fam = build_family(1)
    ens = MubEnsemble(fam)
    o0 = Observable.projector(np.array([1.0, 0.0]))
    assert snapshot_expectation(SnapshotRecord("mub", 0, 0), o0, ens) == pytest.approx(2.0)
    assert snapshot_expectation(SnapshotRecord("mub", 1, 0), o0, ens) == pytest.approx(0.5)


def test_snapshot_expectation_matches_dense_channel_route():
    fam = build_family(2)
    ens = MubEnsemble(fam)
    rng = np.random.default_rng(4)
    obs = random_hermitian(2, rng)
    for j in range(5):
        for b in range(4):
            v = mub_state(fam, j, b)
            dense_route = np.trace(
                obs.matrix @ inverse_channel(np.outer(v, v.conj()))
            ).real
            fast = snapshot_expectation(SnapshotRecord("mub", j, b), obs, ens)
            assert fast == pytest.approx(dense_route, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_estimator_mean_equals_trace_for_mixed_states(n):
    fam = build_family(n)
    rng = np.random.default_rng(20 + n)
    for _ in range(5):
        rho = random_density(n, rng)
        obs = random_projector(n, rng)
        target = float(np.vdot(obs.vector, rho @ obs.vector).real)
        assert mixture_mean(fam, rho, obs) == pytest.approx(target, abs=1e-10)


def test_snapshot_values_projector_and_dense_paths_agree():
    n = 3
    fam = build_family(n)
    ens = MubEnsemble(fam)
    model = StateModel.ghz(n)
    shadow = acquire(model, ens, 300, master_seed=5)
    proj = Observable.ghz(n)
    dense = Observable.dense(np.outer(ghz_state(n), ghz_state(n).conj()))
    fast = snapshot_values(shadow, proj, ens)
    slow = snapshot_values(shadow, dense, ens)
    assert np.abs(fast - slow).max() < 1e-10
    single = np.array(
        [snapshot_expectation(rec, proj, ens) for rec in shadow.records()]
    )
    assert np.abs(fast - single).max() < 1e-10


# ---------------------------------------------------------------------------
# Median of means

def test_median_of_means_worked_example():
    values = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    assert median_of_means(values, 3) == pytest.approx(3.5)
    assert median_of_means(values, 1) == pytest.approx(values.mean())


def test_median_of_means_constant_values():
    values = np.full(17, 2.5)
    for k in (1, 2, 3, 5, 17):
        assert median_of_means(values, k) == pytest.approx(2.5)


def test_median_of_means_errors():
    with pytest.raises(ValueError):
        median_of_means(np.array([]), 1)
    with pytest.raises(ValueError):
        median_of_means(np.ones(3), 4)


# ---------------------------------------------------------------------------
# Acquisition

def test_acquire_record_ranges():
    n = 2
    ens = MubEnsemble(build_family(n))
    shadow = acquire(StateModel.ghz(n), ens, 4, master_seed=1)
    assert len(shadow) == 4
    assert shadow.rotation_ids.min() >= 0 and shadow.rotation_ids.max() <= 4
    assert shadow.outcomes.min() >= 0 and shadow.outcomes.max() < 4
    assert shadow.meta.state == "ghz"
    with pytest.raises(ValueError):
        acquire(StateModel.ghz(n), ens, 0, master_seed=1)


def test_acquire_thread_count_does_not_change_records():
    n = 3
    model = StateModel.noisy_ghz(n, 0.3)
    sh1 = acquire(model, MubEnsemble(build_family(n)), 500, master_seed=9, threads=1)
    sh8 = acquire(model, MubEnsemble(build_family(n)), 500, master_seed=9, threads=8)
    assert np.array_equal(sh1.rotation_ids, sh8.rotation_ids)
    assert np.array_equal(sh1.outcomes, sh8.outcomes)


def test_acquire_maximally_mixed_marginals():
    # maximally mixed input, emulated as a uniform random computational ket
    # per shot: outcome b and basis id j should both be uniform
    n = 2
    dim = 1 << n
    fam = build_family(n)
    ens = MubEnsemble(fam)
    rng = np.random.default_rng(0)
    draws = 100_000
    j_counts = np.zeros(fam.n_bases)
    b_counts = np.zeros(dim)
    for i in range(draws):
        ket = np.zeros(dim, dtype=complex)
        ket[rng.integers(dim)] = 1.0
        shadow = acquire(StateModel.pure(ket), ens, 1, master_seed=i)
        j_counts[shadow.rotation_ids[0]] += 1
        b_counts[shadow.outcomes[0]] += 1
    for counts, cells in ((j_counts, fam.n_bases), (b_counts, dim)):
        p = 1 / cells
        sigma = (draws * p * (1 - p)) ** 0.5
        assert np.abs(counts - draws * p).max() < 5 * sigma


def test_shadow_persistence_round_trip(tmp_path):
    n = 3
    ens = MubEnsemble(build_family(n))
    shadow = acquire(StateModel.ghz(n), ens, 50, master_seed=3)
    path = tmp_path / "shadow.jsonl"
    save_shadow(shadow, path)
    first_line = path.read_text().splitlines()[0]
    assert first_line == '{"n":3,"ensemble":"mub","seed":3,"N":50,"state":"ghz"}'
    loaded = load_shadow(path)
    assert loaded.meta == shadow.meta
    assert np.array_equal(loaded.rotation_ids, shadow.rotation_ids)
    assert np.array_equal(loaded.outcomes, shadow.outcomes)


def test_shadow_load_rejects_truncated_file(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"n":1,"ensemble":"mub","seed":0,"N":3,"state":"ghz"}\n{"j":0,"b":"0"}\n')
    with pytest.raises(ValueError):
        load_shadow(path)


# ---------------------------------------------------------------------------
# Estimation

def test_estimate_identity_observable_is_exactly_one():
    n = 2
    ens = MubEnsemble(build_family(n))
    shadow = acquire(StateModel.ghz(n), ens, 64, master_seed=6)
    ident = Observable.dense(np.eye(4) / 4)
    values = snapshot_values(shadow, ident, ens)
    assert np.abs(values - 0.25).max() < 1e-12  # constant per record
    assert estimate(shadow, [ident], EstimatorConfig(4), ens)[0] == pytest.approx(0.25)


def test_estimate_errors():
    n = 2
    ens = MubEnsemble(build_family(n))
    shadow = acquire(StateModel.ghz(n), ens, 10, master_seed=6)
    with pytest.raises(ValueError):
        estimate(shadow, [Observable.ghz(n)], EstimatorConfig(11), ens)
    empty = ShadowSet(shadow.meta, np.array([], dtype=np.int64), np.array([], dtype=np.int64))
    with pytest.raises(ValueError):
        estimate(empty, [Observable.ghz(n)], EstimatorConfig(1), ens)
    with pytest.raises(ValueError):
        estimate(shadow, [Observable.ghz(3)], EstimatorConfig(1), ens)
    with pytest.raises(ValueError):
        EstimatorConfig(0)


def test_estimate_clifford_shadow_and_replay(tmp_path):
    n = 2
    model = StateModel.ghz(n)
    ens = CliffordEnsemble(n, master_seed=13)
    shadow = acquire(model, ens, 400, master_seed=13)
    path = tmp_path / "clifford.jsonl"
    save_shadow(shadow, path)
    loaded = load_shadow(path)
    # estimation reconstructs elements from (seed, shot) alone
    est = estimate(loaded, [Observable.ghz(n)], EstimatorConfig(1))[0]
    assert abs(est - 1.0) < 0.3
    fresh = make_ensemble(loaded.meta.ensemble, n, loaded.meta.seed)
    vals = snapshot_values(loaded, Observable.ghz(n), fresh)
    assert est == pytest.approx(vals.mean())


# ---------------------------------------------------------------------------
# Exact moments, variance, shadow norm

def test_variance_single_qubit_worked_example():
    fam = build_family(1)
    model = StateModel.pure(np.array([1.0, 0.0]))
    obs = Observable.projector(np.array([1.0, 0.0]))
    mean, var = snapshot_moments(fam, model, obs)
    assert mean == pytest.approx(1.0, abs=1e-12)
    assert var == pytest.approx(0.5, abs=1e-12)


def test_variance_of_identity_multiple_is_zero():
    fam = build_family(2)
    model = StateModel.ghz(2)
    obs = Observable.dense(0.7 * np.eye(4))
    assert exact_single_shot_variance(fam, model, obs) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_variance_bounded_by_shadow_norm(n):
    fam = build_family(n)
    rng = np.random.default_rng(60 + n)
    for _ in range(10):
        v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        model = StateModel.pure(v / np.linalg.norm(v))
        obs = random_hermitian(n, rng)
        var = exact_single_shot_variance(fam, model, obs)
        assert var <= shadow_norm_sq(fam, obs).value + 1e-9


def test_shadow_norm_single_qubit_example():
    fam = build_family(1)
    res = shadow_norm_sq(fam, Observable.projector(np.array([1.0, 0.0])))
    assert res.value == pytest.approx(0.75, abs=1e-12)
    assert res.bound == pytest.approx(1.0, abs=1e-12)


def test_shadow_norm_of_identity_is_zero():
    fam = build_family(2)
    res = shadow_norm_sq(fam, Observable.dense(np.eye(4) * 0.3))
    assert res.value == pytest.approx(0.0, abs=1e-12)
    assert res.bound == pytest.approx(0.0, abs=1e-12)


def test_estimator_concentration_matches_exact_variance():
    # empirical std of the K=1 estimator over repetitions vs sqrt(Var/N)
    n = 2
    fam = build_family(n)
    ens = MubEnsemble(fam)
    model = StateModel.ghz(n)
    obs = Observable.ghz(n)
    var = exact_single_shot_variance(fam, model, obs)
    shots, reps = 1000, 200
    ests = np.empty(reps)
    for r in range(reps):
        shadow = acquire(model, ens, shots, master_seed=1000 + r)
        ests[r] = estimate(shadow, [obs], EstimatorConfig(1), ens)[0]
    predicted = (var / shots) ** 0.5
    ratio = ests.std(ddof=1) / predicted
    assert 1 / 1.5 < ratio < 1.5
