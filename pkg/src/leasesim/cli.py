"""Command-line interface.

Subcommands: run, sweep, compare, intent, assure, oracle. Exit codes are
0 (success), 1 (usage or configuration error), and 2 (assurance verdict
fail); nothing else is ever returned.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from ._version import VERSION
from .core import ConfigError
from .environment import ScenarioConfig, scenario_from_dict, scenario_overridden
from .intent import (
    PACKET_SIZE_MB,
    PRIORITY_MULTIPLIER,
    SLOT_DURATION_S,
    TIGHTNESS_BANDS,
    V_BASE,
    assure,
    derive_scenario,
    intent_from_dict,
    intent_to_dict,
    report_to_dict,
    translate_intent,
    translation_from_dict,
    translation_to_dict,
)
from .policies import parse_policy, policy_label
from .reporting import (
    comparison_ranking,
    compare,
    read_realization_csv,
    read_trace_csv,
    report_header,
    summarize,
    summary_to_dict,
    sweep,
    sweep_to_dict,
    write_comparison_series_csv,
    write_json,
    write_summary_json,
    write_sweep_csv,
    write_trace_csv,
)
from .simulator import default_params, offline_min_cost, run

DEFAULT_V_GRID = "1,2,5,10,20,50"
DEFAULT_EPS_GRID = "0.5,1,2"
DEFAULT_COMPARE_POLICIES = "dsf,greedy,periodic:2,price_only:8,queue_threshold:10,myopic"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors by default; here that code is
    reserved for assurance failures, so usage errors exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_float_list(text: str, flag: str) -> list[float]:
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise ConfigError(f"{flag}: empty entry in list {text!r}")
        try:
            values.append(float(part))
        except ValueError:
            raise ConfigError(f"{flag}: {part!r} is not a number") from None
    return values


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _load_scenario(path: str | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    return scenario_from_dict(_load_json(path))


def _summary_json_path(out: str) -> str:
    if out.endswith(".csv"):
        return out[: -len(".csv")] + ".summary.json"
    return out + ".summary.json"


def cmd_run(args) -> int:
    scenario = _load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario_overridden(scenario, seed=args.seed)
    policy = parse_policy(args.policy)
    params = default_params(scenario, v=args.v, eps_d=args.eps)
    trace = run(scenario, policy, params)
    write_trace_csv(trace, args.out)
    summary_path = _summary_json_path(args.out)
    write_summary_json(trace, summary_path)
    summary = summarize(trace)
    print(
        f"wrote {args.out} and {summary_path}: "
        f"cost={summary.accumulated_cost:.2f} "
        f"avg_queue={summary.average_queue:.3f} "
        f"leases={summary.lease_count}"
    )
    return 0


def cmd_sweep(args) -> int:
    scenario = _load_scenario(args.scenario)
    policy = parse_policy(args.policy)
    v_grid = _parse_float_list(args.v, "--v")
    eps_grid = _parse_float_list(args.eps, "--eps")
    table = sweep(scenario, policy, v_grid, eps_grid, common_random_numbers=args.crn)
    write_json(sweep_to_dict(table, scenario), args.out)
    csv_path = args.out[: -len(".json")] + ".csv" if args.out.endswith(".json") else args.out + ".csv"
    write_sweep_csv(table, csv_path)
    print(f"wrote {args.out} and {csv_path}: {len(table.rows)} cells")
    return 0


def cmd_compare(args) -> int:
    scenario = _load_scenario(args.scenario)
    policies = [parse_policy(part.strip()) for part in args.policies.split(",") if part.strip()]
    if not policies:
        raise ConfigError("--policies: no policies given")
    params = default_params(scenario, v=args.v, eps_d=args.eps)
    results = compare(scenario, policies, params)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    series_path = out_dir / "series.csv"
    ranking_path = out_dir / "ranking.json"
    ranking = comparison_ranking(results)
    write_comparison_series_csv(results, series_path)
    write_json(
        {"header": report_header(scenario, params=params), "ranking": ranking},
        ranking_path,
    )
    print(f"wrote {series_path} and {ranking_path}")
    for entry in ranking:
        print(
            f"  {entry['rank']}. {entry['policy']}: "
            f"accumulated_cost={entry['summary']['accumulated_cost']:.2f}"
        )
    return 0


def _translator_header(scenario: ScenarioConfig, slot_duration_s: float, packet_size_mb: float) -> dict:
    header = report_header(scenario)
    header["translator"] = {
        "slot_duration_s": slot_duration_s,
        "packet_size_mb": packet_size_mb,
        "tightness_bands": list(TIGHTNESS_BANDS),
        "v_base": V_BASE,
        "priority_multiplier": PRIORITY_MULTIPLIER,
    }
    return header


def cmd_intent(args) -> int:
    intent = intent_from_dict(_load_json(args.file))
    scenario = _load_scenario(args.scenario)
    translation = translate_intent(
        intent,
        scenario,
        slot_duration_s=args.slot_duration,
        packet_size_mb=args.packet_size,
    )
    document = {
        "header": _translator_header(scenario, args.slot_duration, args.packet_size),
        "intent": intent_to_dict(intent),
        "translation": translation_to_dict(translation),
    }
    if args.out:
        write_json(document, args.out)
        print(
            f"wrote {args.out}: v={translation.params.v:.2f} "
            f"eps_d={translation.params.eps_d:g} "
            f"n_packets={translation.n_packets} "
            f"deadline_slots={translation.deadline_slots} "
            f"feasible={translation.feasible}"
        )
    else:
        json.dump(document, sys.stdout, indent=2)
        print()
    if args.scenario_out:
        derived = derive_scenario(translation, scenario, streaming=args.streaming)
        write_json(asdict(derived), args.scenario_out)
        # stdout must stay parseable JSON when the translation went there
        print(f"wrote {args.scenario_out}", file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_assure(args) -> int:
    trace = read_trace_csv(args.trace)
    intent = intent_from_dict(_load_json(args.intent))
    translation_doc = _load_json(args.translation)
    if isinstance(translation_doc, dict) and "translation" in translation_doc:
        translation_doc = translation_doc["translation"]
    translation = translation_from_dict(translation_doc)
    report = assure(trace, intent, translation)
    print(
        f"verdict: {report.verdict} "
        f"(delivered {report.delivered_packets} of required {report.required_packets} "
        f"within {translation.deadline_slots} slots)"
    )
    for slot, message in report.drift_warnings:
        print(f"  drift warning at slot {slot}: {message}")
    if args.out:
        write_json(
            {
                "header": {"tool": "leasesim", "version": VERSION},
                "intent": intent_to_dict(intent),
                "translation": translation_to_dict(translation),
                "report": report_to_dict(report),
            },
            args.out,
        )
        print(f"wrote {args.out}")
    return 0 if report.verdict == "pass" else 2


def cmd_oracle(args) -> int:
    realization = read_realization_csv(args.realization)
    min_cost, decisions, feasible = offline_min_cost(
        realization, args.initial_backlog, args.deadline
    )
    if feasible:
        schedule = "".join(str(d) for d in decisions)
        print(f"min cost {min_cost:g}, lease schedule {schedule}")
    else:
        print(
            f"infeasible: backlog {args.initial_backlog} cannot be cleared "
            f"within {args.deadline} slots"
        )
    if args.out:
        write_json(
            {
                "header": {"tool": "leasesim", "version": VERSION},
                "initial_backlog": args.initial_backlog,
                "deadline": args.deadline,
                "feasible": feasible,
                "min_cost": min_cost if feasible else None,
                "decisions": decisions,
            },
            args.out,
        )
        print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="leasesim",
        description="Cost- and delay-aware leasing simulator for RIS and spectrum resources.",
    )
    parser.add_argument("--version", action="version", version=f"leasesim {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    p_run = subparsers.add_parser("run", help="simulate one policy, write trace CSV + summary JSON")
    p_run.add_argument("--scenario", help="scenario JSON (defaults used when omitted)")
    p_run.add_argument("--policy", default="dsf", help="policy string: name or name:param")
    p_run.add_argument("--v", type=float, default=10.0, help="cost weight (default 10)")
    p_run.add_argument("--eps", type=float, default=1.0, help="deferral weight (default 1)")
    p_run.add_argument("--seed", type=int, help="override the scenario seed")
    p_run.add_argument("--out", default="trace.csv", help="trace CSV path (default trace.csv)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = subparsers.add_parser("sweep", help="grid of (v, eps) cells, JSON + long CSV")
    p_sweep.add_argument("--scenario", help="scenario JSON (defaults used when omitted)")
    p_sweep.add_argument("--policy", default="dsf", help="policy string")
    p_sweep.add_argument("--v", default=DEFAULT_V_GRID, help=f"comma list (default {DEFAULT_V_GRID})")
    p_sweep.add_argument(
        "--eps", default=DEFAULT_EPS_GRID, help=f"comma list (default {DEFAULT_EPS_GRID})"
    )
    p_sweep.add_argument(
        "--crn",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="share one realization across cells (default on)",
    )
    p_sweep.add_argument("--out", default="sweep.json", help="table JSON path (default sweep.json)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_compare = subparsers.add_parser("compare", help="policies on a common realization")
    p_compare.add_argument("--scenario", help="scenario JSON (defaults used when omitted)")
    p_compare.add_argument(
        "--policies",
        default=DEFAULT_COMPARE_POLICIES,
        help=f"comma list of policy strings (default {DEFAULT_COMPARE_POLICIES})",
    )
    p_compare.add_argument("--v", type=float, default=10.0, help="cost weight (default 10)")
    p_compare.add_argument("--eps", type=float, default=1.0, help="deferral weight (default 1)")
    p_compare.add_argument("--out", default="compare", help="output directory (default compare/)")
    p_compare.set_defaults(func=cmd_compare)

    p_intent = subparsers.add_parser("intent", help="translate an intent JSON into control params")
    p_intent.add_argument("--file", required=True, help="intent JSON path")
    p_intent.add_argument("--scenario", help="scenario JSON (defaults used when omitted)")
    p_intent.add_argument(
        "--slot-duration", type=float, default=SLOT_DURATION_S, help="seconds per slot (default 1)"
    )
    p_intent.add_argument(
        "--packet-size", type=float, default=PACKET_SIZE_MB, help="MB per packet (default 10)"
    )
    p_intent.add_argument("--out", help="translation JSON path (stdout when omitted)")
    p_intent.add_argument("--scenario-out", help="also write the derived scenario JSON here")
    p_intent.add_argument(
        "--streaming",
        action="store_true",
        help="derive a streaming scenario (spread arrivals) instead of bulk backlog",
    )
    p_intent.set_defaults(func=cmd_intent)

    p_assure = subparsers.add_parser("assure", help="verify a trace against an intent")
    p_assure.add_argument("--trace", required=True, help="trace CSV path")
    p_assure.add_argument("--intent", required=True, help="intent JSON path")
    p_assure.add_argument(
        "--translation", required=True, help="translation JSON (as written by the intent command)"
    )
    p_assure.add_argument("--out", help="assurance report JSON path")
    p_assure.set_defaults(func=cmd_assure)

    p_oracle = subparsers.add_parser("oracle", help="offline minimum-cost schedule")
    p_oracle.add_argument(
        "--realization", required=True, help="CSV with arrival/price/availability columns"
    )
    p_oracle.add_argument("--initial-backlog", type=int, required=True, help="packets at slot 1")
    p_oracle.add_argument("--deadline", type=int, required=True, help="slots to clear by (max 16)")
    p_oracle.add_argument("--out", help="result JSON path")
    p_oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits for --help/--version/usage errors
        code = exc.code
        return 0 if code in (None, 0) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
