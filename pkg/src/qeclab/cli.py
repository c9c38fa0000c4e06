"""Command-line front end.

Subcommands build codes, run the bound checkers, and mount the attacks;
results go to JSON or CSV, with figures rendered alongside delimited
output.  Exit codes: 0 = claim verified, 1 = violation or witness found
(the expected outcome for ``attack`` and ``witness``), 2 = usage or
configuration error.

``--threads`` caps the BLAS pools (via threadpoolctl when available, env
vars otherwise); results are tolerance-stable across thread counts.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

__version__ = "0.1.0"

THREAD_ENV_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _common_flags(p: argparse.ArgumentParser, *, n_help: str) -> None:
    p.add_argument("--n", type=int, required=True, help=n_help)
    p.add_argument("--seed", type=int, default=0, help="manifest seed (default 0)")
    p.add_argument("--dense-cap", type=int, default=24, help="max qubits for dense vectors")
    p.add_argument("--tol", type=float, default=1e-9, help="numeric tolerance")
    p.add_argument("--threads", type=int, default=None, help="cap BLAS thread pools")
    p.add_argument("--out", type=str, default=None, help="output path")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qeclab",
        description="Verification lab for approximate error correction under controlled noise",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("influence", help="build a balanced low-influence table and profile it")
    _common_flags(p, n_help="building-block width (number of input variables)")
    p.add_argument("--w", type=int, default=None, help="tribe width (default: balance point)")
    p.add_argument("--save-table", type=str, default=None, help="write the table as JSON")
    p.add_argument("--table", type=str, default=None, help="profile this table file instead")
    p.set_defaults(handler=cmd_influence)

    p = sub.add_parser("gram", help="check the basis Gram matrix of the code")
    _common_flags(p, n_help="code length in qubits")
    p.add_argument("--B", type=int, required=True, help="number of block pairs")
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--unbalanced", action="store_true", help="skip balancing (negative control)")
    p.set_defaults(handler=cmd_gram)

    p = sub.add_parser("immunity", help="measure the identity-decoder error against bit-flips")
    _common_flags(p, n_help="code length in qubits")
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--samples", type=int, default=100, help="random codewords")
    p.add_argument("--error-samples", type=int, default=200, help="random control sets")
    p.add_argument("--structured", action="store_true", help="force the structured path")
    p.add_argument("--error", type=str, default=None, help="also evaluate this error-spec JSON file")
    p.set_defaults(handler=cmd_immunity)

    p = sub.add_parser("separation", help="measure max |phi* X*Y psi| over orthonormal pairs")
    _common_flags(p, n_help="code length in qubits")
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--samples", type=int, default=10, help="orthonormal codeword pairs")
    p.add_argument("--error-samples", type=int, default=200, help="random operator pairs")
    p.add_argument("--family", choices=("bitflip", "phaseflip"), default="phaseflip")
    p.add_argument("--alpha-claim", type=float, default=None, help="claimed separation bound")
    p.add_argument("--no-adversarial", action="store_true", help="random draws only")
    p.set_defaults(handler=cmd_separation)

    p = sub.add_parser("attack", help="boost overlap, align phases, report the violation")
    _common_flags(p, n_help="number of qubits")
    p.add_argument("--B", type=int, default=None, help="attack a code pair instead of a random plane")
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--pair", nargs=2, metavar="CODEWORD", default=None,
                   help="attack these two codeword JSON files (needs --table)")
    p.add_argument("--table", type=str, default=None, help="function-table JSON for --pair")
    p.add_argument("--k", type=int, default=2, help="angle grid level")
    p.add_argument(
        "--grid",
        choices=("full", "paper"),
        default="full",
        help="full-circle grid (guaranteed residuals) or the half-circle 'paper' variant",
    )
    p.add_argument("--alpha-claim", type=float, default=0.1)
    p.set_defaults(handler=cmd_attack)

    p = sub.add_parser("witness", help="find a singleton flip violating exact correction")
    _common_flags(p, n_help="code length in qubits")
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--w", type=int, default=None)
    p.add_argument("--witness-tol", type=float, default=1e-3, help="residual threshold")
    p.add_argument("--save-pair", type=str, default=None,
                   help="prefix: write PREFIX_{phi,psi,table}.json for reuse")
    p.set_defaults(handler=cmd_witness)

    p = sub.add_parser("trend", help="immunity error versus code length, CSV plus figure")
    p.add_argument("--n-list", type=str, default="8,16,32,64", help="comma-separated lengths")
    p.add_argument("--B", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--error-samples", type=int, default=50)
    p.add_argument("--dense-cap", type=int, default=24)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", type=str, default="trend.csv")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.set_defaults(handler=cmd_trend)

    return parser


def _manifest(args, command: str) -> "RunManifest":
    from .report import RunManifest

    skip = {"handler", "command"}
    config = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return RunManifest(command=command, config=config, version=__version__)


def _emit(args, manifest, payload: dict) -> None:
    from .report import write_csv_row, write_json_report

    if args.out is None:
        import json

        print(json.dumps({"manifest": manifest.to_dict(), **payload}, sort_keys=True, indent=2))
        return
    manifest.outputs.append(args.out)
    if args.format == "csv":
        write_csv_row(args.out, payload)
    else:
        write_json_report(args.out, manifest, payload)


def _build_block(n_prime: int, w, unbalanced: bool = False):
    from .boolfn import balance, tribes

    raw = tribes(n_prime, w)
    return raw if unbalanced else balance(raw)


def cmd_influence(args) -> int:
    from .boolfn import balance, influence_profile, tribes
    from .fileio import load_function_table, save_function_table

    if args.table:
        f = load_function_table(args.table)
        raw_positive = f.count_positive
    else:
        raw = tribes(args.n, args.w)
        raw_positive = raw.count_positive
        f = balance(raw)
    prof = influence_profile(f)
    payload = {
        "kind": "influence",
        "width": f.width,
        "w": args.w,
        "balanced": f.is_balanced,
        "flips_to_balance": abs(raw_positive - f.size // 2),
        "s": prof.max_influence,
        "per_variable": list(prof.per_variable),
        "pass": True,
    }
    if args.save_table:
        save_function_table(f, args.save_table)
    _emit(args, _manifest(args, "influence"), payload)
    return 0


def cmd_gram(args) -> int:
    import numpy as np

    from .codespace import gram_matrix, make_params

    params = make_params(args.n, args.B)
    f = _build_block(params.n_prime, args.w, unbalanced=args.unbalanced)
    method = "dense" if args.n <= args.dense_cap else "structured"
    g = gram_matrix(f, params, method=method, dense_cap=args.dense_cap)
    expected = 2.0 ** (args.n - 2 * args.B)
    off = g - np.diag(np.diag(g))
    diag_dev = float(np.max(np.abs(np.diag(g) - expected)))
    offdiag_max = float(np.max(np.abs(off))) if params.dim > 1 else 0.0
    ok = diag_dev <= args.tol * expected and offdiag_max <= args.tol * expected
    payload = {
        "kind": "gram",
        "n": args.n,
        "B": args.B,
        "method": method,
        "balanced": f.is_balanced,
        "diag_expected": expected,
        "diag_max_dev": diag_dev,
        "offdiag_max": offdiag_max,
        "pass": bool(ok),
    }
    _emit(args, _manifest(args, "gram"), payload)
    return 0 if ok else 1


def cmd_immunity(args) -> int:
    from .codespace import make_params
    from .verify import VerificationConfig, check_immunity

    params = make_params(args.n, args.B)
    f = _build_block(params.n_prime, args.w)
    structured = args.structured or args.n > args.dense_cap
    cfg = VerificationConfig(
        seed=args.seed,
        codeword_samples=args.samples,
        error_samples=args.error_samples,
        tol=args.tol,
        dense_cap=args.dense_cap,
    )
    extra = None
    if args.error is not None:
        import json

        from .fileio import error_from_dict

        with open(args.error) as fh:
            extra = error_from_dict(json.load(fh))
    rep = check_immunity(f, params, cfg, structured=structured, extra_flips=[extra] if extra else None)
    payload = {**rep.to_dict(), "w": args.w, "structured": structured}
    _emit(args, _manifest(args, "immunity"), payload)
    return 0 if rep.passed else 1


def cmd_separation(args) -> int:
    from .codespace import codeword_vector, make_params, sample_codeword_pair
    from .seeding import named_rng
    from .verify import VerificationConfig, check_separation

    params = make_params(args.n, args.B)
    f = _build_block(params.n_prime, args.w)
    rng = named_rng(args.seed, "separation.pairs")
    pairs = []
    for _ in range(args.samples):
        ca, cb = sample_codeword_pair(params, rng)
        pairs.append(
            (codeword_vector(f, ca, args.dense_cap), codeword_vector(f, cb, args.dense_cap))
        )
    cfg = VerificationConfig(
        seed=args.seed,
        codeword_samples=args.samples,
        error_samples=args.error_samples,
        tol=args.tol,
        dense_cap=args.dense_cap,
        alpha_claim=args.alpha_claim,
    )
    rep = check_separation(pairs, args.family, cfg, adversarial=not args.no_adversarial)
    payload = {**rep.to_dict(), "family": args.family, "B": args.B}
    _emit(args, _manifest(args, "separation"), payload)
    return 0 if rep.passed else 1


def cmd_attack(args) -> int:
    import numpy as np

    from .attacks import (
        alignment_residuals,
        boost_overlap,
        build_phase_partition,
        random_orthonormal_pair,
        realize_as_phase_pair,
    )
    from .noise import apply_partitioned_phase
    from .report import figure_path_for, render_residual_histogram

    if args.pair is not None:
        if args.table is None:
            raise ValueError("--pair needs --table for materialization")
        from .codespace import codeword_vector
        from .fileio import load_codeword, load_function_table

        table = load_function_table(args.table)
        phi = codeword_vector(table, load_codeword(args.pair[0]), args.dense_cap)
        psi = codeword_vector(table, load_codeword(args.pair[1]), args.dense_cap)
        target = "stored-pair"
    elif args.B is None:
        phi, psi = random_orthonormal_pair(args.n, args.seed)
        target = "random-plane"
    else:
        from .codespace import codeword_vector, make_params, sample_codeword_pair

        params = make_params(args.n, args.B)
        f = _build_block(params.n_prime, args.w)
        ca, cb = sample_codeword_pair(params, args.seed)
        phi = codeword_vector(f, ca, args.dense_cap)
        psi = codeword_vector(f, cb, args.dense_cap)
        target = "code-pair"

    overlap_before = float(np.sum(np.abs(phi) * np.abs(psi)))
    b_phi, b_psi, overlap = boost_overlap(phi, psi, args.tol)
    partition = build_phase_partition(b_phi, b_psi, args.k, args.grid, args.dense_cap)
    attack_value = float(abs(np.vdot(b_phi, apply_partitioned_phase(partition, b_psi))))
    residuals = alignment_residuals(b_phi, b_psi, partition)
    bound = (1.0 - math.pi * 2.0**-args.k) * overlap

    realizable = None
    realization_residual = None
    if len(partition.angles) <= 4:
        realization = realize_as_phase_pair(partition)
        realizable = realization is not None
        if realization is not None:
            action = np.exp(1j * realization.angle_table(args.n))
            wanted = np.exp(1j * partition.angle_of())
            realization_residual = float(np.max(np.abs(action - wanted)))

    violated = args.grid == "full" and attack_value > args.alpha_claim
    payload = {
        "kind": "attack",
        "n": args.n,
        "B": args.B,
        "target": target,
        "overlap_before": overlap_before,
        "overlap_after": overlap,
        "k": args.k,
        "grid": args.grid,
        "attack_value": attack_value,
        "bound": bound,
        "alpha_claim": args.alpha_claim,
        "violated": bool(violated),
        "residual_max": float(residuals.max()) if residuals.size else 0.0,
        "realizable_as_pair": realizable,
        "realization_residual": realization_residual,
        "witness": {"seed": args.seed, "k": args.k, "grid": args.grid, "value": attack_value},
        "pass": bool(violated) if args.grid == "full" else None,
    }
    manifest = _manifest(args, "attack")
    if args.out is not None:
        fig = figure_path_for(args.out, "residuals")
        render_residual_histogram(fig, {args.grid: list(residuals)})
        manifest.outputs.append(str(fig))
    _emit(args, manifest, payload)
    return 1 if violated else 0


def cmd_witness(args) -> int:
    from .attacks import find_impossibility_witness
    from .codespace import codeword_vector, make_params, sample_codeword_pair
    from .fileio import error_to_dict, save_codeword, save_function_table

    params = make_params(args.n, args.B)
    f = _build_block(params.n_prime, args.w)
    ca, cb = sample_codeword_pair(params, args.seed)
    phi = codeword_vector(f, ca, args.dense_cap)
    psi = codeword_vector(f, cb, args.dense_cap)
    if args.save_pair:
        save_codeword(ca, f"{args.save_pair}_phi.json")
        save_codeword(cb, f"{args.save_pair}_psi.json")
        save_function_table(f, f"{args.save_pair}_table.json")
    witness = find_impossibility_witness(phi, psi, args.witness_tol)
    payload = {
        "kind": "witness",
        "n": args.n,
        "B": args.B,
        "found": witness is not None,
        "pass": witness is not None,
    }
    if witness is not None:
        payload["witness"] = {
            "error": error_to_dict(witness.flip),
            "q": witness.q,
            "phi_form": [witness.phi_form.real, witness.phi_form.imag],
            "psi_form": [witness.psi_form.real, witness.psi_form.imag],
            "cross_form": [witness.cross_form.real, witness.cross_form.imag],
            "residual": witness.residual,
        }
    _emit(args, _manifest(args, "witness"), payload)
    return 1 if witness is not None else 0


def cmd_trend(args) -> int:
    from .codespace import make_params
    from .report import (
        figure_path_for,
        render_trend_figure,
        write_trend_csv,
    )
    from .verify import VerificationConfig, check_immunity

    lengths = [int(tok) for tok in args.n_list.split(",") if tok]
    rows = []
    for n in lengths:
        params = make_params(n, args.B)
        f = _build_block(params.n_prime, None)
        cfg = VerificationConfig(
            seed=args.seed,
            codeword_samples=args.samples,
            error_samples=args.error_samples,
            tol=args.tol,
            dense_cap=args.dense_cap,
        )
        rep = check_immunity(f, params, cfg, structured=n > args.dense_cap)
        rows.append(
            {
                "n": n,
                "B": args.B,
                "s": rep.s,
                "epsilon_measured": rep.measured,
                "epsilon_bound": rep.epsilon_bound,
                "pass": rep.passed,
            }
        )
    all_pass = all(row["pass"] for row in rows)
    if args.format == "json":
        import json

        from .report import write_json_report

        write_json_report(args.out, _manifest(args, "trend"), {"kind": "trend", "rows": rows})
    else:
        write_trend_csv(args.out, rows)
    render_trend_figure(figure_path_for(args.out), rows)
    return 0 if all_pass else 1


def _cap_threads(count: int) -> None:
    for var in THREAD_ENV_VARS:
        os.environ[var] = str(count)
    try:
        import threadpoolctl

        # Keep the limiter alive for the whole process; it also caps pools
        # that were created before this call.
        global _THREAD_LIMITER
        _THREAD_LIMITER = threadpoolctl.threadpool_limits(limits=count)
    except ImportError:
        pass


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None):
        _cap_threads(args.threads)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
