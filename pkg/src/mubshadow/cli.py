"""Command-line front end.

Subcommands:
    mub verify|circuits|counts   basis construction and export
    acquire                      run shots and write a shadow file
    estimate                     evaluate observables on a shadow file
    experiment                   canned studies with CSV/JSON/PNG output

Exit codes: 0 success, 1 verification or estimation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .ensembles import CLIFFORD_TAG, MUB_TAG, CliffordEnsemble, MubEnsemble
from .experiments import (
    ExperimentResult,
    run_ghz_fidelity,
    run_noisy_ghz,
    run_variance_compare,
    write_csv,
)
from .mub import (
    IdentityBasisError,
    build_family,
    circuit_qasm,
    emit_circuit,
    family_cz_counts,
    gate_lines,
    verify_unbiased,
)
from .shadow import (
    EstimatorConfig,
    Observable,
    acquire,
    estimate,
    load_shadow,
    save_shadow,
)
from .sim import StateModel, max_statevector_qubits


def _load_amplitude_file(path: str) -> np.ndarray:
    """One amplitude per line as 're im', lexicographic basis order."""
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (re im) per line")
    return data[:, 0] + 1j * data[:, 1]


def _load_dense_file(path: str) -> np.ndarray:
    """Row-major Hermitian matrix, each line 2*2^n floats (re im pairs)."""
    data = np.loadtxt(path, ndmin=2)
    dim = data.shape[0]
    if data.shape[1] != 2 * dim:
        raise ValueError(f"{path}: expected {2 * dim} columns for a {dim}x{dim} matrix")
    return data[:, 0::2] + 1j * data[:, 1::2]


def _parse_state(args) -> StateModel:
    spec = args.state
    if spec == "ghz":
        return StateModel.ghz(args.n)
    if spec == "noisy-ghz":
        return StateModel.noisy_ghz(args.n, args.noise_p)
    amps = _load_amplitude_file(spec)
    model = StateModel.pure(amps)
    if model.n != args.n:
        raise ValueError(f"state file has {model.n} qubits, --n says {args.n}")
    return model


def _parse_observable(spec: str, n: int) -> Observable:
    if spec == "ghz-fidelity":
        return Observable.ghz(n)
    if spec.startswith("dense:"):
        mat = _load_dense_file(spec[len("dense:"):])
        obs = Observable.dense(mat, label=spec)
    else:
        path = spec[len("proj:"):] if spec.startswith("proj:") else spec
        obs = Observable.projector(_load_amplitude_file(path), label=spec)
    if obs.n != n:
        raise ValueError(f"observable has {obs.n} qubits, shadow has {n}")
    return obs


def _make_ensemble(tag: str, n: int, seed: int):
    if tag == MUB_TAG:
        return MubEnsemble(build_family(n))
    return CliffordEnsemble(n, seed)


# ---------------------------------------------------------------------------
# Subcommand handlers; each returns the process exit code.

def _cmd_mub_verify(args) -> int:
    fam = build_family(args.n)
    report = verify_unbiased(fam, tol=args.tol)
    print(
        f"n={args.n}: max unbiasedness deviation {report.max_cross_deviation:.3e} "
        f"(bases {report.worst_cross_pair}), max orthonormality deviation "
        f"{report.max_orthonormality_deviation:.3e}, tol {args.tol:g}"
    )
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def _cmd_mub_circuits(args) -> int:
    fam = build_family(args.n)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    width = max(2, len(str(1 << args.n)))
    marker = out_dir / f"basis_{0:0{width}d}_identity.txt"
    marker.write_text("identity basis: computational, no gates\n", encoding="utf-8")
    suffix = "qasm" if args.format == "qasm" else "txt"
    for j in range(1, (1 << args.n) + 1):
        circ = emit_circuit(fam, j)
        body = (
            circuit_qasm(circ)
            if args.format == "qasm"
            else "\n".join(gate_lines(circ)) + "\n"
        )
        (out_dir / f"basis_{j:0{width}d}.{suffix}").write_text(body, encoding="utf-8")
    print(f"wrote {(1 << args.n)} circuit files and 1 identity marker to {out_dir}")
    return 0


def _cmd_mub_counts(args) -> int:
    fam = build_family(args.n)
    counts = family_cz_counts(fam)
    for j, c in enumerate(counts, start=1):
        print(f"basis {j}: {c} CZ")
    total = sum(counts)
    print(f"total {total}, max {max(counts)}, mean {total / len(counts)}")
    return 0


def _cmd_acquire(args) -> int:
    model = _parse_state(args)
    ensemble = _make_ensemble(args.ensemble, args.n, args.seed)
    shadow = acquire(model, ensemble, args.shots, args.seed, threads=args.threads)
    save_shadow(shadow, args.out)
    print(f"wrote {args.shots} records to {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    shadow = load_shadow(args.shadow)
    obs = _parse_observable(args.observable, shadow.meta.n)
    ensemble = _make_ensemble(shadow.meta.ensemble, shadow.meta.n, shadow.meta.seed)
    values = estimate(shadow, [obs], EstimatorConfig(args.groups), ensemble)
    result = {
        "shadow": str(args.shadow),
        "n": shadow.meta.n,
        "ensemble": shadow.meta.ensemble,
        "records": len(shadow),
        "groups": args.groups,
        "observable": args.observable,
        "estimate": values[0],
    }
    text = json.dumps(result, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


def _write_experiment_outputs(
    result: ExperimentResult, out_dir: Path, no_plot: bool
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = result.label.replace("-", "_")
    if result.label == "ghz-fidelity":
        write_csv(out_dir / f"{stem}.csv", result.rows, ["n", "run", "estimate"])
        write_csv(
            out_dir / f"{stem}_summary.csv", result.summary, ["n", "mean", "std", "runs"]
        )
    elif result.label == "noisy-ghz":
        write_csv(
            out_dir / f"{stem}.csv", result.summary, ["p", "estimate", "std", "true"]
        )
        write_csv(out_dir / f"{stem}_runs.csv", result.rows, ["p", "run", "estimate"])
    else:
        write_csv(
            out_dir / f"{stem}.csv",
            result.rows,
            ["observable", "var_mub", "var_clifford", "bound_mub", "bound_clifford"],
        )
    with open(out_dir / f"{stem}.json", "w", encoding="utf-8") as fh:
        json.dump(result.to_json_dict(), fh, indent=2)
        fh.write("\n")
    if not no_plot:
        from .plotting import PLOTTERS

        PLOTTERS[result.label](result, out_dir / f"{stem}.png")


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part)


def _cmd_experiment(args) -> int:
    if args.name == "ghz-fidelity":
        result = run_ghz_fidelity(
            n_values=_parse_int_list(args.n_list),
            shots=args.shots,
            runs=args.runs,
            seed=args.seed,
            ensemble_tag=args.ensemble,
            threads=args.threads,
        )
    elif args.name == "noisy-ghz":
        p_values = tuple(np.round(np.arange(0.0, 1.0 + 1e-9, args.p_step), 10))
        result = run_noisy_ghz(
            n=args.n,
            shots=args.shots,
            p_values=p_values,
            runs=args.runs,
            seed=args.seed,
            ensemble_tag=args.ensemble,
            threads=args.threads,
        )
    else:
        result = run_variance_compare(
            n_values=_parse_int_list(args.n_list),
            samples=args.samples,
            seed=args.seed,
        )
    out_dir = Path(args.out_dir)
    _write_experiment_outputs(result, out_dir, args.no_plot)
    print(f"experiment {result.label}: outputs in {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mubshadow",
        description="Classical shadow tomography with mutually unbiased bases.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mub = sub.add_parser("mub", help="build, verify and export the basis family")
    mub_sub = mub.add_subparsers(dest="subcommand", required=True)

    p = mub_sub.add_parser("verify", help="check mutual unbiasedness numerically")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_mub_verify)

    p = mub_sub.add_parser("circuits", help="write per-basis gate lists")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["text", "qasm"], default="text")
    p.set_defaults(func=_cmd_mub_circuits)

    p = mub_sub.add_parser("counts", help="print CZ gate counts")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_mub_counts)

    p = sub.add_parser("acquire", help="sample shots and write a shadow file")
    p.add_argument("--state", required=True,
                   help="'ghz', 'noisy-ghz' or an amplitude file")
    p.add_argument("--noise-p", type=float, default=0.0,
                   help="phase-error probability for noisy-ghz")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ensemble", choices=[MUB_TAG, CLIFFORD_TAG], default=MUB_TAG)
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_acquire)

    p = sub.add_parser("estimate", help="evaluate an observable on a shadow file")
    p.add_argument("--shadow", required=True)
    p.add_argument("--observable", required=True,
                   help="'ghz-fidelity', amplitude file, or dense:FILE")
    p.add_argument("--groups", type=int, default=1,
                   help="median-of-means group count K")
    p.add_argument("--out", default=None, help="also write the JSON result here")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a canned study")
    p.add_argument("name", choices=["ghz-fidelity", "noisy-ghz", "variance-compare"])
    p.add_argument("--n", type=int, default=3, help="qubit count (noisy-ghz)")
    p.add_argument("--n-list", default=None,
                   help="comma-separated qubit counts (ghz-fidelity, variance-compare)")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--p-step", type=float, default=0.1)
    p.add_argument("--samples", type=int, default=100_000,
                   help="Clifford sample count (variance-compare)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ensemble", choices=[MUB_TAG, CLIFFORD_TAG], default=MUB_TAG)
    p.add_argument("--out-dir", default="results")
    p.add_argument("--no-plot", action="store_true",
                   help="skip rendering the PNG figure")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if getattr(args, "command", None) == "experiment":
        if args.n_list is None:
            args.n_list = "2,3,4,5,6" if args.name == "ghz-fidelity" else "2,3"
        if args.shots is None:
            args.shots = 10_000 if args.name == "ghz-fidelity" else 5_000

    if getattr(args, "n", None) is not None and args.n > max_statevector_qubits():
        print(
            f"error: n={args.n} exceeds the dense-path limit "
            f"{max_statevector_qubits()} (set SHADOW_MAX_QUBITS to raise it)",
            file=sys.stderr,
        )
        return 1

    try:
        return args.func(args)
    except (ValueError, OSError, IdentityBasisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
