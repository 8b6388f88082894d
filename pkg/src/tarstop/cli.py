"""Command-line front end.

Subcommands:
  stop      run the screening loop over a run + qrels pair
  evaluate  score previously saved outcomes at a target recall
  compare   run several stopping methods and aggregate their metrics
  sweep     grid-search stopping configurations, flagging the Pareto frontier
  simulate  generate synthetic topics from a spec file and compare methods

Outputs are CSV or JSON, written only after the whole computation
succeeds (no partial files). Every command is deterministic given its
flags and seed; randomized methods default to a fixed seed rather than
wall-clock entropy. Exit codes: 0 success, 2 usage/configuration error,
3 input parse error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import baselines, corpus, metrics, stopping
from .errors import (
    ConfigError,
    ParseError,
    TarStopError,
    TopicNotFoundError,
    ValidationError,
)
from .estimates import ProcessKind
from .rates import RateKind

DEFAULT_SEED = 1729

RATE_NAMES = {
    "exp": RateKind.EXPONENTIAL,
    "hyp": RateKind.HYPERBOLIC,
    "pow": RateKind.POWER_LAW,
    "ap": RateKind.AP_PRIOR,
}
PROCESS_NAMES = {
    "ip": ProcessKind.INHOMOGENEOUS_POISSON,
    "cox": ProcessKind.COX,
}
BATCH_NAMES = {
    "uniform": stopping.BatchSchedule.UNIFORM_FRACTION,
    "autotar": stopping.BatchSchedule.AUTOTAR,
}
MINREL_NAMES = ("static10", "static20", "dynamic")
COMPARE_METHODS = ("ip", "cox", "oracle", "target", "target-adapted", "knee")

METRIC_COLUMNS = [
    "topic", "method", "recall", "cost", "hit_target",
    "RE", "loss_r", "loss_e", "loss_er",
]
OUTCOME_COLUMNS = [
    "topic", "method", "stop_rank", "docs_examined", "rel_found", "hit_end",
]


def _min_rel_rule(name: str) -> stopping.MinRelRule:
    if name == "dynamic":
        return stopping.DynamicMinRel()
    if name == "static10":
        return stopping.StaticMinRel(10)
    if name == "static20":
        return stopping.StaticMinRel(20)
    raise ConfigError(f"unknown min-rel rule {name!r}; expected one of {MINREL_NAMES}")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("stopping configuration")
    g.add_argument("--target-recall", type=float, default=0.9, metavar="L")
    g.add_argument("--confidence", type=float, default=0.95, metavar="P")
    g.add_argument("--alpha", type=float, default=0.025,
                   help="initial screened fraction (default 0.025)")
    g.add_argument("--beta", type=float, default=0.025,
                   help="screened fraction added per checkpoint (default 0.025)")
    g.add_argument("--rate", choices=sorted(RATE_NAMES), default="hyp")
    g.add_argument("--process", choices=sorted(PROCESS_NAMES), default="ip")
    g.add_argument("--nrmse-threshold", type=float, default=0.1)
    g.add_argument("--min-rel", choices=MINREL_NAMES, default="dynamic")
    g.add_argument("--batch", choices=sorted(BATCH_NAMES), default="uniform")
    g.add_argument("--window", type=int, default=25,
                   help="ranks per estimation window (default 25)")
    g.add_argument("--cox-grid", type=int, default=9,
                   help="grid points per parameter for the cox mixture")


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="json")
    parser.add_argument("--output", type=Path, default=None,
                        help="output file; stdout when omitted")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel topic workers (output order is canonical)")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"base seed for randomized methods (default {DEFAULT_SEED})")


def _config_from_args(args: argparse.Namespace, **overrides) -> stopping.StoppingConfig:
    kwargs = dict(
        target_recall=args.target_recall,
        confidence=args.confidence,
        alpha=args.alpha,
        beta=args.beta,
        process=PROCESS_NAMES[args.process],
        rate_kind=RATE_NAMES[args.rate],
        nrmse_threshold=args.nrmse_threshold,
        min_rel_rule=_min_rel_rule(args.min_rel),
        window_size=args.window,
        batch_schedule=BATCH_NAMES[args.batch],
        cox_grid=args.cox_grid,
    )
    kwargs.update(overrides)
    return stopping.StoppingConfig(**kwargs)


def _load_topics(run_path: Path, qrels_path: Path) -> list[corpus.RankedTopic]:
    try:
        run_text = run_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read run file {run_path}: {exc}") from exc
    try:
        qrels_text = qrels_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read qrels file {qrels_path}: {exc}") from exc
    try:
        run = corpus.parse_run(run_text)
    except ParseError as exc:
        raise ParseError(f"{run_path}: {exc}") from exc
    try:
        qrels = corpus.parse_qrels(qrels_text)
    except ParseError as exc:
        raise ParseError(f"{qrels_path}: {exc}") from exc
    topics = corpus.join_all(run, qrels)
    if not topics:
        raise ParseError(f"{run_path}: run file contains no topics")
    return topics


def _topic_seed(base: int, topic_id: str, method: str) -> int:
    # Stable across platforms and process pools, unlike hash().
    digest = hashlib.sha256(f"{base}:{method}:{topic_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def _parallel_map(fn, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --- record serialization ------------------------------------------------


def _curve_record(curve) -> dict | None:
    if curve is None:
        return None
    p = curve.params
    return {
        "kind": p.kind.value,
        "params": {
            k: v
            for k, v in (("a", p.a), ("b", p.b), ("c", p.c), ("n_total", p.n_total))
            if v is not None
        },
        "variance": list(curve.param_variance),
        "nrmse": curve.nrmse,
        "points_used": curve.points_used,
    }


def _estimate_record(est) -> dict | None:
    if est is None:
        return None
    return {
        "interval": list(est.interval),
        "lambda_mass": est.lambda_mass,
        "upper_bound": est.upper_bound,
        "confidence": est.confidence,
        "fallback": est.fallback,
    }


def _trace_record(trace: stopping.IterationTrace) -> dict:
    return {
        "k": trace.k,
        "rel_found": trace.rel_found,
        "gate": trace.gate.value,
        "curve": _curve_record(trace.curve),
        "estimate": _estimate_record(trace.estimate),
        "total_estimate": trace.total_estimate,
        "stop": trace.stop_decision,
    }


def _outcome_record(outcome: stopping.StoppingOutcome, with_traces: bool) -> dict:
    record = {
        "topic": outcome.topic_id,
        "method": outcome.method,
        "stop_rank": outcome.stop_rank,
        "docs_examined": outcome.docs_examined,
        "rel_found": outcome.rel_found,
        "hit_end": outcome.hit_end,
    }
    if with_traces:
        record["traces"] = [_trace_record(t) for t in outcome.traces]
    return record


def _metrics_record(tm: metrics.TopicMetrics) -> dict:
    return {
        "topic": tm.topic_id,
        "method": tm.method,
        "recall": tm.recall,
        "cost": tm.cost,
        "hit_target": tm.hit_target,
        "RE": tm.relative_error,
        "loss_r": tm.loss_r,
        "loss_e": tm.loss_e,
        "loss_er": tm.loss_er,
    }


def _aggregate_record(method: str, cm: metrics.CollectionMetrics) -> dict:
    return {
        "method": method,
        "topics": cm.topics,
        "reliability": cm.reliability,
        "recall_mean": cm.recall.mean, "recall_std": cm.recall.std,
        "cost_mean": cm.cost.mean, "cost_std": cm.cost.std,
        "RE_mean": cm.relative_error.mean, "RE_std": cm.relative_error.std,
        "loss_r_mean": cm.loss_r.mean, "loss_r_std": cm.loss_r.std,
        "loss_e_mean": cm.loss_e.mean, "loss_e_std": cm.loss_e.std,
        "loss_er_mean": cm.loss_er.mean, "loss_er_std": cm.loss_er.std,
    }


def _csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(col)) for col in columns])
    return buf.getvalue()


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return str(value)


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def _agg_path(output: Path) -> Path:
    return output.with_name(output.stem + ".agg" + output.suffix)


def _print_aggregate_table(agg_rows: list[dict], keys: list[str]) -> None:
    if not agg_rows:
        return
    header = keys + ["topics", "reliability", "recall", "cost", "loss_er"]
    print("  ".join(f"{h:>14}" for h in header))
    for row in agg_rows:
        cells = [str(row[k]) for k in keys]
        cells.append(str(row["topics"]))
        cells.append(f"{row['reliability']:.3f}")
        for m in ("recall", "cost", "loss_er"):
            cells.append(f"{row[f'{m}_mean']:.3f}±{row[f'{m}_std']:.3f}")
        print("  ".join(f"{c:>14}" for c in cells))


# --- method runners -------------------------------------------------------


def _run_method(
    method: str,
    topic: corpus.RankedTopic,
    args: argparse.Namespace,
) -> stopping.StoppingOutcome:
    if method in ("ip", "cox"):
        config = _config_from_args(args, process=PROCESS_NAMES[method])
        return stopping.run_stopping(topic, config)
    if method == "oracle":
        return baselines.oracle_stop(topic, args.target_recall)
    if method == "target":
        tc = baselines.TargetConfig(
            target_size=args.target_size,
            seed=_topic_seed(args.seed, topic.topic_id, "target"),
        )
        return baselines.target_stop(topic, tc, method="target")
    if method == "target-adapted":
        # the size formula diverges at recall 1; use the 0.99 convention
        level = min(args.target_recall, 0.99)
        size = baselines.adapted_target_size(level, args.confidence)
        tc = baselines.TargetConfig(
            target_size=size,
            seed=_topic_seed(args.seed, topic.topic_id, "target-adapted"),
        )
        return baselines.target_stop(topic, tc, method="target-adapted")
    if method == "knee":
        kc = baselines.KneeConfig(
            rho_threshold=args.rho,
            alpha=args.alpha,
            beta=args.beta,
            batch_schedule=BATCH_NAMES[args.batch],
        )
        return baselines.knee_stop(topic, kc)
    raise ConfigError(f"unknown method {method!r}")


def _parse_methods(raw: str) -> list[str]:
    names = [m.strip() for m in raw.split(",") if m.strip()]
    for name in names:
        if name == "qbcb":
            raise ConfigError(
                "method 'qbcb' is unavailable: its bound computation is not "
                f"specified here; valid methods: {', '.join(COMPARE_METHODS)}"
            )
        if name not in COMPARE_METHODS:
            raise ConfigError(
                f"unknown method {name!r}; valid methods: {', '.join(COMPARE_METHODS)}"
            )
    if not names:
        raise ConfigError("at least one method is required")
    return names


def _compare_over_topics(
    topics: list[corpus.RankedTopic],
    methods: list[str],
    args: argparse.Namespace,
) -> tuple[list[dict], list[dict], list[dict]]:
    """Per-topic metric rows, aggregate rows, and outcome rows, sorted."""
    pairs = [(t, m) for t in topics for m in methods]

    def run(pair):
        topic, method = pair
        outcome = _run_method(method, topic, args)
        tm = metrics.topic_metrics(outcome, topic, args.target_recall)
        return outcome, tm

    results = _parallel_map(run, pairs, args.jobs)
    results.sort(key=lambda r: (r[1].topic_id, r[1].method))

    topic_rows = [_metrics_record(tm) for _, tm in results]
    outcome_rows = [_outcome_record(o, with_traces=False) for o, _ in results]
    agg_rows = []
    for method in sorted(methods):
        group = [tm for _, tm in results if tm.method == method]
        agg_rows.append(_aggregate_record(method, metrics.aggregate(group)))
    return topic_rows, agg_rows, outcome_rows


def _write_metrics_outputs(
    args: argparse.Namespace,
    topic_rows: list[dict],
    agg_rows: list[dict],
    extra_topic_columns: list[str] | None = None,
    agg_key_columns: list[str] | None = None,
) -> None:
    keys = agg_key_columns or ["method"]
    agg_columns = keys + [
        "topics", "reliability",
        "recall_mean", "recall_std", "cost_mean", "cost_std",
        "RE_mean", "RE_std", "loss_r_mean", "loss_r_std",
        "loss_e_mean", "loss_e_std", "loss_er_mean", "loss_er_std",
    ]
    if "pareto" in (agg_rows[0] if agg_rows else {}):
        agg_columns.append("pareto")
    topic_columns = METRIC_COLUMNS + (extra_topic_columns or [])
    if agg_key_columns:
        topic_columns = agg_key_columns + [
            c for c in topic_columns if c not in ("method",)
        ]
    if args.format == "json":
        payload = {"aggregates": agg_rows, "topics": topic_rows}
        _emit(_json_text(payload), args.output)
    else:
        _emit(_csv_text(topic_rows, topic_columns), args.output)
        if args.output is not None:
            _agg_path(args.output).write_text(
                _csv_text(agg_rows, agg_columns), encoding="utf-8"
            )
    if args.output is not None:
        _print_aggregate_table(agg_rows, keys)


# --- subcommands ----------------------------------------------------------


def _cmd_stop(args: argparse.Namespace) -> int:
    topics = _load_topics(args.run, args.qrels)
    config = _config_from_args(args)

    def run(topic):
        return stopping.run_stopping(topic, config)

    outcomes = _parallel_map(run, topics, args.jobs)
    outcomes.sort(key=lambda o: o.topic_id)
    records = [_outcome_record(o, with_traces=args.trace) for o in outcomes]
    if args.format == "json":
        _emit(_json_text({"method": config.process.value, "outcomes": records}), args.output)
    else:
        _emit(_csv_text(records, OUTCOME_COLUMNS), args.output)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    topics = {t.topic_id: t for t in _load_topics(args.run, args.qrels)}
    try:
        payload = json.loads(args.outcomes.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read outcomes file {args.outcomes}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.outcomes}: invalid JSON: {exc}") from exc
    records = payload.get("outcomes") if isinstance(payload, dict) else payload
    if not isinstance(records, list):
        raise ParseError(
            f"{args.outcomes}: expected a list of outcome records "
            "(or an object with an 'outcomes' list)"
        )

    per_topic = []
    for idx, rec in enumerate(records):
        try:
            outcome = stopping.StoppingOutcome(
                method=rec["method"],
                topic_id=rec["topic"],
                stop_rank=rec["stop_rank"],
                docs_examined=rec["docs_examined"],
                rel_found=rec["rel_found"],
                hit_end=rec["hit_end"],
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(
                f"{args.outcomes}: outcome record {idx} is malformed: {exc}"
            ) from exc
        topic = topics.get(outcome.topic_id)
        if topic is None:
            raise TopicNotFoundError(
                f"outcome topic {outcome.topic_id!r} missing from run/qrels"
            )
        per_topic.append(metrics.topic_metrics(outcome, topic, args.target_recall))
    if not per_topic:
        raise ParseError(f"{args.outcomes}: no outcome records to evaluate")
    per_topic.sort(key=lambda tm: (tm.topic_id, tm.method))

    topic_rows = [_metrics_record(tm) for tm in per_topic]
    agg_rows = []
    for method in sorted({tm.method for tm in per_topic}):
        group = [tm for tm in per_topic if tm.method == method]
        agg_rows.append(_aggregate_record(method, metrics.aggregate(group)))
    _write_metrics_outputs(args, topic_rows, agg_rows)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    methods = _parse_methods(args.methods)
    if "oracle" not in methods:  # the oracle anchors every comparison
        methods.append("oracle")
    topics = _load_topics(args.run, args.qrels)
    topic_rows, agg_rows, _ = _compare_over_topics(topics, methods, args)
    _write_metrics_outputs(args, topic_rows, agg_rows)
    return 0


def _list_flag(raw: str, valid: tuple[str, ...], flag: str) -> list[str]:
    names = [v.strip() for v in raw.split(",") if v.strip()]
    for name in names:
        if name not in valid:
            raise ConfigError(f"{flag}: unknown value {name!r}; expected {valid}")
    if not names:
        raise ConfigError(f"{flag}: at least one value required")
    return names


def _float_list(raw: str, flag: str) -> list[float]:
    try:
        values = [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from exc
    if not values:
        raise ConfigError(f"{flag}: at least one value required")
    return values


def _mark_pareto(agg_rows: list[dict]) -> None:
    """Flag rows not dominated on (cost_mean down, reliability up) within
    each target-recall group."""
    by_level: dict[float, list[dict]] = {}
    for row in agg_rows:
        by_level.setdefault(row["target_recall"], []).append(row)
    for rows in by_level.values():
        for row in rows:
            dominated = any(
                other["cost_mean"] <= row["cost_mean"]
                and other["reliability"] >= row["reliability"]
                and (
                    other["cost_mean"] < row["cost_mean"]
                    or other["reliability"] > row["reliability"]
                )
                for other in rows
            )
            row["pareto"] = not dominated


def _cmd_sweep(args: argparse.Namespace) -> int:
    processes = _list_flag(args.processes, tuple(sorted(PROCESS_NAMES)), "--processes")
    rates = _list_flag(args.rates, tuple(sorted(RATE_NAMES)), "--rates")
    minrels = _list_flag(args.min_rel_rules, MINREL_NAMES, "--min-rel-rules")
    thresholds = _float_list(args.nrmse_thresholds, "--nrmse-thresholds")
    levels = _float_list(args.target_recalls, "--target-recalls")
    confidences = _float_list(args.confidences, "--confidences")

    combos = [
        (proc, rate, thr, mr, level, conf)
        for proc in processes
        for rate in rates
        for thr in thresholds
        for mr in minrels
        for level in levels
        for conf in confidences
    ]
    if len(combos) > 10_000:
        raise ConfigError(
            f"grid of {len(combos)} combinations exceeds the 10000 limit"
        )

    topics = _load_topics(args.run, args.qrels)
    jobs = [(combo, topic) for combo in combos for topic in topics]

    def run(job):
        (proc, rate, thr, mr, level, conf), topic = job
        config = _config_from_args(
            args,
            process=PROCESS_NAMES[proc],
            rate_kind=RATE_NAMES[rate],
            nrmse_threshold=thr,
            min_rel_rule=_min_rel_rule(mr),
            target_recall=level,
            confidence=conf,
        )
        outcome = stopping.run_stopping(topic, config)
        return metrics.topic_metrics(outcome, topic, level)

    results = _parallel_map(run, jobs, args.jobs)

    combo_keys = ["process", "rate", "nrmse_threshold", "min_rel", "target_recall", "confidence"]
    topic_rows = []
    agg_rows = []
    for combo in combos:
        combo_dict = dict(zip(combo_keys, combo))
        group = [tm for job, tm in zip(jobs, results) if job[0] == combo]
        group.sort(key=lambda tm: tm.topic_id)
        for tm in group:
            row = dict(combo_dict)
            row.update(_metrics_record(tm))
            del row["method"]
            topic_rows.append(row)
        agg = _aggregate_record("", metrics.aggregate(group))
        del agg["method"]
        agg_rows.append({**combo_dict, **agg})
    _mark_pareto(agg_rows)
    topic_rows.sort(key=lambda r: tuple(str(r[k]) for k in combo_keys + ["topic"]))
    agg_rows.sort(key=lambda r: tuple(str(r[k]) for k in combo_keys))
    _write_metrics_outputs(args, topic_rows, agg_rows, agg_key_columns=combo_keys)
    return 0


def _load_specs(path: Path) -> list[corpus.SyntheticSpec]:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    entries = payload.get("topics") if isinstance(payload, dict) else payload
    if not isinstance(entries, list) or not entries:
        raise ValidationError(
            f"{path}: expected a non-empty list of topic specs "
            "(or an object with a 'topics' list)"
        )
    specs = []
    for idx, entry in enumerate(entries):
        for key in ("n", "kind", "params", "seed"):
            if key not in entry:
                raise ValidationError(f"{path}: spec {idx} is missing field {key!r}")
        if not isinstance(entry["params"], dict):
            raise ValidationError(f"{path}: spec {idx} field 'params' must be an object")
        specs.append(
            corpus.SyntheticSpec(
                n=entry["n"],
                kind=entry["kind"],
                params={k: float(v) for k, v in entry["params"].items()},
                seed=entry["seed"],
                noise=entry.get("noise", 0.0),
                topic_id=entry.get("topic_id", f"S{idx + 1:03d}"),
            )
        )
    return specs


def _cmd_simulate(args: argparse.Namespace) -> int:
    methods = _parse_methods(args.methods)
    specs = _load_specs(args.spec)
    topics = [corpus.generate_synthetic(spec) for spec in specs]
    effectiveness = {t.topic_id: metrics.ranking_effectiveness(t) for t in topics}
    topic_rows, agg_rows, _ = _compare_over_topics(topics, methods, args)
    for row in topic_rows:
        row["norm_area"] = effectiveness[row["topic"]]
    _write_metrics_outputs(args, topic_rows, agg_rows, extra_topic_columns=["norm_area"])
    return 0


# --- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tarstop",
        description="Decide when to stop screening ranked document lists.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stop = sub.add_parser("stop", help="run the screening loop over run + qrels")
    p_stop.add_argument("--run", type=Path, required=True)
    p_stop.add_argument("--qrels", type=Path, required=True)
    p_stop.add_argument("--trace", action="store_true",
                        help="include per-checkpoint traces (json only)")
    _add_config_flags(p_stop)
    _add_io_flags(p_stop)
    p_stop.set_defaults(func=_cmd_stop)

    p_eval = sub.add_parser("evaluate", help="score saved outcomes at a target recall")
    p_eval.add_argument("--outcomes", type=Path, required=True,
                        help="JSON outcomes file from the stop command")
    p_eval.add_argument("--run", type=Path, required=True)
    p_eval.add_argument("--qrels", type=Path, required=True)
    p_eval.add_argument("--target-recall", type=float, default=0.9, metavar="L")
    _add_io_flags(p_eval)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_cmp = sub.add_parser("compare", help="compare stopping methods")
    p_cmp.add_argument("--run", type=Path, required=True)
    p_cmp.add_argument("--qrels", type=Path, required=True)
    p_cmp.add_argument("--methods", default="ip,oracle",
                       help=f"comma list of {', '.join(COMPARE_METHODS)}")
    p_cmp.add_argument("--target-size", type=int, default=10,
                       help="sample size for the plain target method")
    p_cmp.add_argument("--rho", type=float, default=6.0,
                       help="knee slope-ratio threshold")
    _add_config_flags(p_cmp)
    _add_io_flags(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_sweep = sub.add_parser("sweep", help="grid-search stopping configurations")
    p_sweep.add_argument("--run", type=Path, required=True)
    p_sweep.add_argument("--qrels", type=Path, required=True)
    p_sweep.add_argument("--processes", default="ip")
    p_sweep.add_argument("--rates", default="exp,hyp,pow,ap")
    p_sweep.add_argument("--nrmse-thresholds", default="0.1")
    p_sweep.add_argument("--min-rel-rules", default="dynamic")
    p_sweep.add_argument("--target-recalls", default="0.9")
    p_sweep.add_argument("--confidences", default="0.95")
    _add_config_flags(p_sweep)
    _add_io_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_sim = sub.add_parser("simulate", help="compare methods on synthetic topics")
    p_sim.add_argument("--spec", type=Path, required=True,
                       help="JSON spec file (list of {topic_id, n, kind, params, seed, noise})")
    p_sim.add_argument("--methods", default="ip,oracle")
    p_sim.add_argument("--target-size", type=int, default=10)
    p_sim.add_argument("--rho", type=float, default=6.0)
    _add_config_flags(p_sim)
    _add_io_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, TopicNotFoundError) as exc:
        print(f"tarstop: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValidationError) as exc:
        print(f"tarstop: {exc}", file=sys.stderr)
        return 2
    except TarStopError as exc:
        print(f"tarstop: numeric failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
