"""Command-line entry point for the entrywise anomaly detector and its experiments."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import structlog
from pydantic import ValidationError

from baselines import anomaly_scores, solve_baseline
from config.ranges import BASELINE_IDS, BENCH_METHODS, EXPERIMENT_DETECTOR, default_gamma_grid
from config.settings import settings
from core import read_instance, write_instance
from core.exceptions import ConfigError, EntrywiseError
from core.types import DetectorConfig, GenerationSpec, describe
from detector import EntrywiseDetector, write_detection
from evaluation import method_curve, regret_curve, run_benchmark, write_benchmark, write_regret, write_roc
from evaluation.benchmark import KNOWN_METHODS
from simgen import EnsembleRanges, LowerBoundSpec, gen_ensemble, gen_instance, gen_real_style_instance, write_ensemble
from utils.logging_config import configure_logging

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_ERROR = 2


# ── Config assembly ──────────────────────────────────────────────────────

def _load_config_file(path: Optional[str]) -> Dict[str, Any]:
    """Read the optional JSON config with sections detector/generation/ranges/lowerbound."""
    if path is None:
        return {}
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"config file {file} not found")
    try:
        data = json.loads(file.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed config {file}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config {file} must hold a JSON object")
    return data


def _overrides(args: argparse.Namespace, mapping: Dict[str, str]) -> Dict[str, Any]:
    """Collect flags that were given, renamed to model fields."""
    return {field: getattr(args, flag) for flag, field in mapping.items()
            if getattr(args, flag, None) is not None}


DETECTOR_FLAGS = {
    "rank": "rank", "gamma": "gamma", "moments": "moments", "band_mode": "band_mode",
    "delta": "fixed_delta", "model": "anomaly_model", "completion": "completion_method",
    "fit": "fit_method", "seed": "seed",
}


def detector_config(args: argparse.Namespace, file_config: Dict[str, Any],
                    defaults: Optional[Dict[str, Any]] = None) -> DetectorConfig:
    """Merge defaults, the config file's detector section and flags, later winning."""
    return DetectorConfig(**{**(defaults or {}), **file_config.get("detector", {}),
                             **_overrides(args, DETECTOR_FLAGS)})


def _comma_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _int_list(value: str) -> List[int]:
    try:
        return [int(item) for item in _comma_list(value)]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from e


# ── Subcommands ──────────────────────────────────────────────────────────
# Each command validates everything first and returns a writer, so no file
# is touched unless all inputs are valid.

Writer = Callable[[Path], Any]


def cmd_generate(args: argparse.Namespace, file_config: Dict[str, Any]) -> Writer:
    seed = args.seed if args.seed is not None else 0
    if args.ensemble is not None:
        ranges = EnsembleRanges(**{**file_config.get("ranges", {}),
                                   **_overrides(args, {"n": "n", "m": "m", "model": "anomaly_model"})})
        instances = gen_ensemble(args.ensemble, ranges, seed=seed, threads=args.threads)
        return lambda out: write_ensemble(instances, out, ranges)

    if args.real_style:
        instance = gen_real_style_instance(
            np.random.default_rng(seed),
            p_a=args.p_a if args.p_a is not None else 0.05,
            alpha=args.alpha if args.alpha is not None else 0.2,
        )
        return lambda out: write_instance(instance, out)

    spec = GenerationSpec(**{**file_config.get("generation", {}), **_overrides(args, {
        "n": "n", "m": "m", "rank": "rank", "mean_level": "mean_level", "p_o": "p_o",
        "p_a": "p_a", "alpha": "alpha", "model": "anomaly_model", "seed": "seed",
    })})
    instance = gen_instance(spec, name=args.name)
    return lambda out: write_instance(instance, out)


def cmd_detect(args: argparse.Namespace, file_config: Dict[str, Any]) -> Writer:
    instance = read_instance(args.instance)
    config = detector_config(args, file_config,
                             defaults={"rank": instance.spec.rank} if instance.spec is not None else None)
    detector = EntrywiseDetector(config, threads=args.threads).prepare(instance.observations)
    solution = detector.select()
    report = {
        "config": describe(config),
        "theta_hat": detector.fit.theta_hat.model_dump(mode="json"),
        "objective": detector.fit.objective_value,
        "converged": detector.fit.converged,
        "expected_selected": solution.expected_selected,
        "sampled": len(solution.mask),
        "feasibility_slack": solution.feasibility_slack,
    }

    def write(out: Path) -> None:
        write_detection(out / "detection.csv", instance.observations, detector.band, solution)
        (out / "fit.json").write_text(json.dumps(report, indent=2, sort_keys=True))

    return write


def cmd_baseline(args: argparse.Namespace, file_config: Dict[str, Any]) -> Writer:
    instance = read_instance(args.instance)
    obs = instance.observations
    rank = args.rank or (instance.spec.rank if instance.spec is not None else None)
    if rank is None:
        raise ConfigError("baseline needs --rank when the instance carries no generation parameters")
    decomposition = solve_baseline(obs, args.method, rank, ratio=args.ratio, e=args.budget,
                                   max_cap=args.cap, seed=args.seed or 0)
    scores = pd.DataFrame({"row": obs.rows, "col": obs.cols,
                           "score": anomaly_scores(obs, decomposition, residual=args.method == "soft-impute"),
                           "a_hat": obs.values_at(decomposition.a_hat)})
    report = {"method": args.method, "rank": rank, "iterations": decomposition.iterations,
              "converged": decomposition.converged, "objective": decomposition.objective}

    def write(out: Path) -> None:
        scores.to_csv(out / "scores.csv", index=False, float_format="%.17g")
        pd.DataFrame(decomposition.m_hat).to_csv(out / "m_hat.csv", header=False, index=False,
                                                 float_format="%.17g")
        (out / "baseline.json").write_text(json.dumps(report, indent=2, sort_keys=True))

    return write


def cmd_evaluate(args: argparse.Namespace, file_config: Dict[str, Any]) -> Writer:
    config = detector_config(args, file_config, defaults=EXPERIMENT_DETECTOR)
    instance = read_instance(args.instance)
    instance.require_truth()
    methods = _comma_list(args.methods)
    unknown = [m for m in methods if m not in KNOWN_METHODS]
    if unknown:
        raise ConfigError(f"unknown methods {unknown}; expected a subset of {KNOWN_METHODS}")

    curves, summary = {}, {}
    for method in methods:
        curve, frob, worst = method_curve(instance, method, config, args.scoring,
                                          default_gamma_grid(), args.threads)
        curves[method] = curve
        summary[method] = {"auc": curve.auc, "frob_error": frob, "max_error": worst}

    def write(out: Path) -> None:
        for method, curve in curves.items():
            write_roc(curve, out / f"roc_{method}.csv")
        (out / "report.json").write_text(json.dumps(
            {"instance": instance.name, "scoring": args.scoring, "methods": summary},
            indent=2, sort_keys=True))

    return write


def cmd_bench(args: argparse.Namespace, file_config: Dict[str, Any]) -> Writer:
    config = detector_config(args, file_config, defaults=EXPERIMENT_DETECTOR)
    ranges = EnsembleRanges(**file_config.get("ranges", {}))
    methods = _comma_list(args.methods)
    seed = args.seed if args.seed is not None else 0
    instances = gen_ensemble(args.count, ranges, seed=seed, threads=args.threads)
    frame, summary = run_benchmark(instances, methods, config, args.scoring, threads=args.threads)
    meta = {"count": args.count, "seed": seed, "scoring": args.scoring,
            "ranges": ranges.model_dump(mode="json")}
    return lambda out: write_benchmark(frame, summary, out, meta)


def cmd_lowerbound(args: argparse.Namespace, file_config: Dict[str, Any]) -> Writer:
    spec = LowerBoundSpec(**{**file_config.get("lowerbound", {}), "n": args.sizes[0],
                             **_overrides(args, {"c_star": "c_star"})})
    base_seed = args.seed if args.seed is not None else 0
    seeds = range(base_seed, base_seed + args.seeds)
    curve = regret_curve(args.sizes, spec, seeds, comparator=args.comparator, threads=args.threads)
    return lambda out: write_regret(curve, out / "regret.csv")


COMMANDS = {
    "generate": cmd_generate,
    "detect": cmd_detect,
    "baseline": cmd_baseline,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
    "lowerbound": cmd_lowerbound,
}


# ── Parser ───────────────────────────────────────────────────────────────

def _add_detector_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rank", type=int, help="rank r of the rate estimate")
    parser.add_argument("--gamma", type=float, help="FPR target in (0, 1]")
    parser.add_argument("--moments", type=int, help="number of CDF moments T (default d + 3)")
    parser.add_argument("--band-mode", dest="band_mode", choices=["point", "theoretical", "fixed"])
    parser.add_argument("--delta", type=float, help="band half-width for --band-mode fixed")
    parser.add_argument("--model", help="working anomaly model")
    parser.add_argument("--completion", choices=["svd", "soft-impute"])
    parser.add_argument("--fit", choices=["moments", "mle"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ewad",
        description="Entrywise anomaly detection for partially observed low-rank count matrices.",
    )
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default EWAD_THREADS or {settings.threads})")
    parser.add_argument("--out", type=Path, default=None,
                        help=f"output directory (default EWAD_OUTPUT_DIR or {settings.output_dir})")
    parser.add_argument("--config", help="JSON config with detector/generation/ranges/lowerbound sections")
    parser.add_argument("--log-level", dest="log_level", default=None, help="log level name")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic instance or ensemble")
    gen.add_argument("--n", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--rank", type=int)
    gen.add_argument("--mean-level", dest="mean_level", type=float)
    gen.add_argument("--p-o", dest="p_o", type=float)
    gen.add_argument("--p-a", dest="p_a", type=float)
    gen.add_argument("--alpha", type=float)
    gen.add_argument("--model", help="generating anomaly model")
    gen.add_argument("--name", default="instance")
    gen.add_argument("--ensemble", type=int, help="generate this many instances at the ensemble ranges")
    gen.add_argument("--real-style", dest="real_style", action="store_true",
                     help="sales-panel-shaped instance perturbed by thinning")

    det = sub.add_parser("detect", help="run the entrywise detector on an instance")
    det.add_argument("instance", help="instance directory")
    _add_detector_flags(det)

    base = sub.add_parser("baseline", help="run a baseline decomposition on an instance")
    base.add_argument("instance", help="instance directory")
    base.add_argument("--method", choices=BASELINE_IDS, required=True)
    base.add_argument("--rank", type=int)
    base.add_argument("--ratio", type=float, help="lambda/mu ratio for stable-pcp and rmc")
    base.add_argument("--budget", type=int, help="sparsity budget e for drmf")
    base.add_argument("--cap", type=float, help="entrywise cap for rmc")

    ev = sub.add_parser("evaluate", help="ROC curves of methods on an instance with ground truth")
    ev.add_argument("instance", help="instance directory")
    ev.add_argument("--methods", default=",".join(BENCH_METHODS))
    ev.add_argument("--scoring", choices=["single-solve", "multi-solve"], default="single-solve")
    _add_detector_flags(ev)

    bench = sub.add_parser("bench", help="mean AUC and recovery errors over a synthetic ensemble")
    bench.add_argument("--count", type=int, default=100)
    bench.add_argument("--methods", default=",".join(BENCH_METHODS))
    bench.add_argument("--scoring", choices=["single-solve", "multi-solve"], default="single-solve")
    _add_detector_flags(bench)

    low = sub.add_parser("lowerbound", help="oracle regret on the paired-row family")
    low.add_argument("--sizes", type=_int_list, default=[50, 100, 200])
    low.add_argument("--seeds", type=int, default=20)
    low.add_argument("--c-star", dest="c_star", type=float)
    low.add_argument("--comparator", choices=["ew", "oracle"], default="ew")

    return parser


def run_command(argv: Optional[List[str]] = None) -> int:
    """Parse *argv*, run the subcommand and write its files; return the exit status."""
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    out = args.out if args.out is not None else settings.output_dir

    try:
        if args.threads is not None and args.threads < 1:
            raise ConfigError(f"--threads must be at least 1, got {args.threads}")
        file_config = _load_config_file(args.config)
        writer = COMMANDS[args.command](args, file_config)
        out.mkdir(parents=True, exist_ok=True)
        writer(out)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ()))
        print(f"error: ConfigError: {location + ': ' if location else ''}{first.get('msg')}", file=sys.stderr)
        return EXIT_ERROR
    except EntrywiseError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.exception("unexpected failure", command=args.command)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_UNEXPECTED

    logger.info(f"{args.command} finished", out=str(out))
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
