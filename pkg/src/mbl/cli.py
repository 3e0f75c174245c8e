"""Command-line frontend: estimation, bounds, comparisons, verification.

Subcommands: ``rad`` (complexity estimation), ``bound eval`` (margin risk
bounds with term breakdowns), ``compare`` (order-term table over a grid),
``verify lemma1`` / ``verify thm3`` (numerical verification experiments),
and ``synth`` (dataset generation).

Contract: stdout carries exactly one machine-readable JSON line; logs and
errors go to stderr.  Exit codes: 0 success, 1 verification failed, 2
usage or validation error, 3 resource cap exceeded.  Every completed run
writes a manifest (subcommand, parameters, seed, version, input digests,
duration) so results can be traced and reproduced; rerunning with the same
manifest parameters yields byte-identical primary outputs regardless of
--threads.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .bounds import METHODS, BoundInput, compare_bounds, theorem1_bound, theorem2_bound
from .core import CapExceeded
from .kernel import KernelSupOracle, gram, kernel_rad_bounds, parse_kernel_spec
from .lowerbound import LowerBoundConfig, Theorem3Report, sweep_theorem3, verify_theorem3
from .margin import empirical_margin_cdf, lemma1_sweep, margin_distribution
from .rademacher import (
    TabulatedSupOracle,
    exact_empirical_rademacher,
    mc_empirical_rademacher,
)
from .synth import (
    GeneratorSpec,
    generate,
    read_dataset_csv,
    read_labels_csv,
    read_scores_csv,
    read_tabulated_csv,
    write_dataset_csv,
)

_KERNEL_GRAMMAR = (
    "kernel specs: 'linear', 'rbf:gamma=<float>', 'poly:degree=<int>[,coef=<float>]', "
    "e.g. rbf:gamma=0.5 or poly:degree=2,coef=1 "
    "(coef defaults to 1; parameters parse as Python floats, bit-exact)"
)


@dataclass
class RunManifest:
    """Reproducibility record written alongside every completed run."""

    subcommand: str
    parameters: dict
    seed: int | None
    version: str
    inputs: dict
    duration_s: float


@dataclass
class _RunContext:
    inputs: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)

    def track_input(self, path) -> None:
        self.inputs[str(path)] = _sha256(path)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _fmt17(value: float) -> str:
    return format(float(value), ".17g")


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        items = [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"{flag} must be a comma-separated integer list, got {text!r}") from None
    if not items:
        raise ValueError(f"{flag} must be nonempty")
    return items


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        items = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"{flag} must be a comma-separated number list, got {text!r}") from None
    if not items:
        raise ValueError(f"{flag} must be nonempty")
    return items


def _resolve_threads(value: int | None) -> int:
    if value is None:
        env = os.environ.get("MBL_THREADS", "").strip()
        if env:
            try:
                value = int(env)
            except ValueError:
                raise ValueError(f"MBL_THREADS must be an integer, got {env!r}") from None
        else:
            value = 1
    if value < 1:
        raise ValueError("threads must be >= 1")
    return value


def _cmd_rad(args, ctx: _RunContext) -> tuple[int, dict]:
    source = args.cls
    if source.startswith("tabulated:"):
        path = source[len("tabulated:") :]
        ctx.track_input(path)
        oracle = TabulatedSupOracle(read_tabulated_csv(path))
        n = oracle.cls.n
    elif source.startswith("kernel:"):
        spec = parse_kernel_spec(source[len("kernel:") :])
        if not args.data:
            raise ValueError("kernel classes need --data <dataset csv>")
        if args.lambda_cap is None:
            raise ValueError("kernel classes need --lambda <norm cap>")
        ctx.track_input(args.data)
        dataset = read_dataset_csv(args.data)
        oracle = KernelSupOracle(gram(spec, dataset.points), args.lambda_cap)
        n = dataset.n
    else:
        raise ValueError("--class must be tabulated:<csv> or kernel:<spec>")
    if args.mode == "exact":
        est = exact_empirical_rademacher(oracle, n, convention=args.convention)
    else:
        est = mc_empirical_rademacher(
            oracle, n, args.trials, args.seed, convention=args.convention, threads=args.threads
        )
    payload = {
        "value": est.value,
        "method": est.method,
        "trials": est.trials,
        "std_error": est.std_error,
        "seed": est.seed,
        "convention": args.convention,
        "n": n,
    }
    return 0, payload


def _thm1_rad_value(args, ctx: _RunContext, n: int) -> float:
    if args.rad_value is not None:
        if args.lambda_cap is not None or args.radius is not None or args.kernel or args.data:
            raise ValueError("give --rad or a kernel description (--lambda ...), not both")
        if args.rad_value < 0:
            raise ValueError("--rad must be >= 0")
        return args.rad_value
    if args.lambda_cap is None:
        raise ValueError("thm1 needs --rad, or --lambda with --R or --data")
    if args.data:
        spec = parse_kernel_spec(args.kernel) if args.kernel else parse_kernel_spec("linear")
        ctx.track_input(args.data)
        dataset = read_dataset_csv(args.data)
        if dataset.n != n:
            raise ValueError(f"--data has {dataset.n} rows but the scores file has {n}")
        data_dependent, _ = kernel_rad_bounds(gram(spec, dataset.points), args.lambda_cap)
        return data_dependent
    if args.radius is None:
        raise ValueError("with --lambda give --R (norm-ball worst case) or --data (data dependent)")
    return math.sqrt(args.radius**2 * args.lambda_cap**2 / n)


def _cmd_bound_eval(args, ctx: _RunContext) -> tuple[int, dict]:
    ctx.track_input(args.scores)
    ctx.track_input(args.labels)
    scores = read_scores_csv(args.scores)
    labels = read_labels_csv(args.labels)
    if labels.shape[0] != scores.n:
        raise ValueError(f"labels file has {labels.shape[0]} rows, scores file has {scores.n}")
    k = args.k if args.k is not None else scores.k
    if k != scores.k:
        raise ValueError(f"--k {k} does not match the scores file width {scores.k}")
    n = args.n if args.n is not None else scores.n
    if n != scores.n:
        raise ValueError(f"--n {n} does not match the scores file rows {scores.n}")

    if args.method == "thm1":
        if args.delta is not None and args.delta_grid:
            raise ValueError("give --delta or --delta-grid, not both")
        grid = None
        if args.delta is not None:
            grid = [args.delta]
        elif args.delta_grid:
            grid = _parse_float_list(args.delta_grid, "--delta-grid")
        rad_value = _thm1_rad_value(args, ctx, n)
        inp = BoundInput(
            k=k,
            n=n,
            confidence_t=args.confidence_t,
            rad_value=rad_value,
            margin_cdf=empirical_margin_cdf(scores, labels),
        )
        report = theorem1_bound(inp, delta_grid=grid)
    else:
        if args.rad_value is not None:
            raise ValueError("thm2 does not take --rad: its complexity term is built in")
        if args.delta_grid:
            raise ValueError("thm2 takes a single --delta, not --delta-grid")
        if args.delta is None:
            raise ValueError("thm2 needs --delta")
        if args.lambda_cap is None or args.radius is None:
            raise ValueError("thm2 needs --lambda and --R")
        frac = margin_distribution(scores, labels, args.delta)
        report = theorem2_bound(
            frac, args.radius, args.lambda_cap, k, n, args.delta, args.confidence_t
        )
    payload = {
        "method": report.method,
        "value": report.value,
        "delta_star": report.delta_star,
        "terms": report.terms,
    }
    return 0, payload


def _cmd_compare(args, ctx: _RunContext) -> tuple[int, dict]:
    ks = _parse_int_list(args.k_list, "--k-list")
    ns = _parse_int_list(args.n_list, "--n-list")
    deltas = _parse_float_list(args.delta_list, "--delta-list")
    rows = compare_bounds(ks, ns, deltas)
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["method", "k", "n", "delta", "value", "ratio_to_this_paper"])
        for row in rows:
            writer.writerow(
                [
                    row["method"],
                    str(row["k"]),
                    str(row["n"]),
                    _fmt17(row["delta"]),
                    _fmt17(row["value"]),
                    _fmt17(row["ratio_to_this_paper"]),
                ]
            )
    ctx.outputs.append(args.out)
    payload = {
        "out": args.out,
        "row_count": len(rows),
        "methods": list(METHODS),
        "k_list": ks,
        "n_list": ns,
        "delta_list": deltas,
        "rows": rows,
    }
    return 0, payload


def _cmd_verify_lemma1(args, ctx: _RunContext) -> tuple[int, dict]:
    report = lemma1_sweep(
        args.seeds,
        max_k=args.max_k,
        max_n=args.max_n,
        max_class_size=args.max_class_size,
        base_seed=args.base_seed,
    )
    return (0 if report["pass"] else 1), report


def _write_thm3_csv(path, reports: list[Theorem3Report]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["k", "t", "n", "lhs", "rhs", "ratio"])
        for r in reports:
            writer.writerow(
                [str(r.k), str(r.t), str(r.n), _fmt17(r.lhs), _fmt17(r.rhs), _fmt17(r.ratio)]
            )


def _cmd_verify_thm3(args, ctx: _RunContext) -> tuple[int, dict]:
    if args.sweep:
        ks = _parse_int_list(args.sweep, "--sweep")
        t = args.t if args.t is not None else 4
        reports, summary = sweep_theorem3(
            ks,
            t=t,
            points_per_interval=args.density,
            epsilon=args.epsilon,
            trials=args.trials,
            seed=args.seed,
            threads=args.threads,
        )
        if args.out:
            _write_thm3_csv(args.out, reports)
            ctx.outputs.append(args.out)
        payload = {"rows": [r.to_json_dict() for r in reports], "summary": summary}
        return (0 if summary["pass"] else 1), payload
    if args.k is None:
        raise ValueError("--k is required without --sweep")
    if args.density is not None:
        raise ValueError("--density applies to --sweep runs only")
    config = LowerBoundConfig(
        k=args.k,
        epsilon=args.epsilon,
        t=args.t,
        n=args.n,
        seed=args.seed,
        trials=args.trials,
        convention=args.convention,
    )
    report = verify_theorem3(config, threads=args.threads, variant=args.variant)
    if args.out:
        _write_thm3_csv(args.out, [report])
        ctx.outputs.append(args.out)
    return (0 if report.passed else 1), report.to_json_dict()


def _cmd_synth(args, ctx: _RunContext) -> tuple[int, dict]:
    kind = {"uniform": "uniform_interval", "blobs": "gaussian_blobs"}[args.kind]
    spec = GeneratorSpec(
        kind=kind,
        k=args.k,
        n=args.n,
        seed=args.seed,
        d=args.d,
        spread=args.spread,
        labels_mode=args.labels_mode,
    )
    dataset = generate(spec)
    write_dataset_csv(dataset, args.out)
    ctx.outputs.append(args.out)
    payload = {
        "out": args.out,
        "kind": kind,
        "n": dataset.n,
        "k": dataset.k,
        "d": dataset.d,
        "seed": args.seed,
    }
    return 0, payload


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: MBL_THREADS env var, else 1); never changes results",
    )
    parser.add_argument(
        "--manifest",
        default=None,
        help="manifest path (default: <out>.manifest.json, else mbl_<subcommand>.manifest.json)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mbl",
        description="Multi-class margin bounds lab: complexities, bounds, and verifications.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    rad = sub.add_parser(
        "rad",
        help="estimate an empirical Rademacher complexity",
        description="Estimate the empirical Rademacher complexity of a function class. "
        + _KERNEL_GRAMMAR,
    )
    rad.add_argument(
        "--class",
        dest="cls",
        required=True,
        metavar="SOURCE",
        help="tabulated:<csv> (headerless matrix, one function per row) or kernel:<spec>",
    )
    rad.add_argument("--mode", choices=["exact", "mc"], required=True)
    rad.add_argument("--trials", type=int, default=10000, help="MC trials (mode mc)")
    rad.add_argument("--seed", type=int, default=0)
    rad.add_argument("--data", help="dataset CSV; required for kernel classes")
    rad.add_argument(
        "--lambda", dest="lambda_cap", type=float, help="norm cap; required for kernel classes"
    )
    rad.add_argument("--convention", choices=["signed", "absolute"], default="signed")
    _add_common(rad)
    rad.set_defaults(handler=_cmd_rad)

    bound = sub.add_parser("bound", help="evaluate margin risk bounds")
    bound_sub = bound.add_subparsers(dest="bound_command", required=True)
    beval = bound_sub.add_parser(
        "eval",
        help="evaluate a bound on a scores/labels pair",
        description="Evaluate a margin risk bound. thm1 takes the complexity via --rad, or "
        "--lambda with --R (worst case sqrt(R^2*lambda^2/n)) or --data [--kernel] "
        "(data-dependent lambda*sqrt(trace G)/n). thm2 needs --delta, --lambda and --R. "
        + _KERNEL_GRAMMAR,
    )
    beval.add_argument("--method", choices=["thm1", "thm2"], required=True)
    beval.add_argument("--scores", required=True, help="scores CSV (x_id,score_1,...,score_k)")
    beval.add_argument("--labels", required=True, help="labels CSV (x_id,y)")
    beval.add_argument("--k", type=int, help="class count; default: scores file width")
    beval.add_argument("--n", type=int, help="sample size; default: scores file rows")
    beval.add_argument(
        "--t", dest="confidence_t", type=float, required=True, help="confidence parameter (> 0)"
    )
    beval.add_argument("--delta", type=float, help="margin threshold in (0, 1]")
    beval.add_argument(
        "--delta-grid", dest="delta_grid", help="comma-separated thresholds (thm1 only)"
    )
    beval.add_argument("--rad", dest="rad_value", type=float, help="complexity value (thm1)")
    beval.add_argument("--kernel", help="kernel spec for the data-dependent complexity (thm1)")
    beval.add_argument("--lambda", dest="lambda_cap", type=float, help="norm cap")
    beval.add_argument("--R", dest="radius", type=float, help="data radius bound")
    beval.add_argument("--data", help="dataset CSV for the data-dependent complexity (thm1)")
    _add_common(beval)
    beval.set_defaults(handler=_cmd_bound_eval)

    comp = sub.add_parser("compare", help="tabulate competitor order terms over a grid")
    comp.add_argument("--k-list", dest="k_list", required=True, help="e.g. 2,4,8")
    comp.add_argument("--n-list", dest="n_list", required=True, help="e.g. 100,10000")
    comp.add_argument("--delta-list", dest="delta_list", required=True, help="e.g. 0.1,0.05")
    comp.add_argument("--out", required=True, help="output CSV path")
    _add_common(comp)
    comp.set_defaults(handler=_cmd_compare)

    verify = sub.add_parser("verify", help="run a numerical verification experiment")
    verify_sub = verify.add_subparsers(dest="verify_command", required=True)

    vlem = verify_sub.add_parser(
        "lemma1", help="margin-class subadditivity on random exact instances"
    )
    vlem.add_argument("--seeds", type=int, required=True, help="number of random instances")
    vlem.add_argument("--max-n", dest="max_n", type=int, default=8)
    vlem.add_argument("--max-k", dest="max_k", type=int, default=3)
    vlem.add_argument("--max-class-size", dest="max_class_size", type=int, default=4)
    vlem.add_argument("--base-seed", dest="base_seed", type=int, default=0)
    _add_common(vlem)
    vlem.set_defaults(handler=_cmd_verify_lemma1)

    vthm = verify_sub.add_parser(
        "thm3", help="margin class dominates (1-eps) times the interval-class sum"
    )
    vthm.add_argument("--k", type=int, help="interval count (required without --sweep)")
    vthm.add_argument("--epsilon", type=float, required=True, help="slack in (0, 1)")
    vthm.add_argument("--t", type=int, help="discontinuity budget; default: doubling search")
    vthm.add_argument(
        "--n", type=int, help="sample size (>= 16kt^2); with auto t this is the n budget"
    )
    vthm.add_argument("--trials", type=int, default=1000)
    vthm.add_argument("--seed", type=int, default=0)
    vthm.add_argument(
        "--convention",
        choices=["signed", "absolute"],
        default="absolute",
        help="reference-complexity convention for the t-selection criterion",
    )
    vthm.add_argument(
        "--variant",
        choices=["sum", "union"],
        default="sum",
        help="per-class slots: one class per interval (sum) or the union class",
    )
    vthm.add_argument("--sweep", help="comma-separated k values for a scaling sweep")
    vthm.add_argument(
        "--density",
        type=int,
        help="points per interval for --sweep (default 16t^2); n = density*k",
    )
    vthm.add_argument("--out", help="CSV path for the k,t,n,lhs,rhs,ratio rows")
    _add_common(vthm)
    vthm.set_defaults(handler=_cmd_verify_thm3)

    synth = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    synth.add_argument("--kind", choices=["uniform", "blobs"], required=True)
    synth.add_argument("--k", type=int, required=True)
    synth.add_argument("--n", type=int, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--d", type=int, default=1, help="dimension (blobs)")
    synth.add_argument("--spread", type=float, default=1.0, help="noise scale (blobs)")
    synth.add_argument(
        "--labels-mode",
        dest="labels_mode",
        choices=["single", "uniform"],
        default="single",
        help="uniform kind: all labels k+1 (single) or uniform over [1, k]",
    )
    synth.add_argument("--out", required=True, help="dataset CSV path")
    _add_common(synth)
    synth.set_defaults(handler=_cmd_synth)

    return parser


def _manifest_path(args) -> str:
    if args.manifest:
        return args.manifest
    out = getattr(args, "out", None)
    if out:
        return f"{out}.manifest.json"
    return f"mbl_{args.command}.manifest.json"


def _manifest_parameters(args) -> dict:
    skip = {"handler", "manifest"}
    return {key: value for key, value in sorted(vars(args).items()) if key not in skip}


def _write_manifest(path, manifest: RunManifest) -> None:
    payload = {
        "subcommand": manifest.subcommand,
        "parameters": manifest.parameters,
        "seed": manifest.seed,
        "version": manifest.version,
        "inputs": manifest.inputs,
        "duration_s": manifest.duration_s,
    }
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    ctx = _RunContext()
    start = time.monotonic()
    try:
        args.threads = _resolve_threads(args.threads)
        code, payload = args.handler(args, ctx)
    except CapExceeded as exc:
        print(f"mbl: cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"mbl: error: {exc}", file=sys.stderr)
        return 2
    manifest = RunManifest(
        subcommand=args.command,
        parameters=_manifest_parameters(args),
        seed=getattr(args, "seed", None),
        version=__version__,
        inputs=ctx.inputs,
        duration_s=time.monotonic() - start,
    )
    _write_manifest(_manifest_path(args), manifest)
    sys.stdout.write(json.dumps(payload) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
