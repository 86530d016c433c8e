"""Command-line interface.

Subcommands follow the pipeline order: props (state debug), analyze,
correct, fit-map, verify, synth. Exit codes: 0 full success, 2 partial
(some rows excluded or failed), 1 fatal error.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from ._kernels import BACKEND
from .config import load_run_config, load_scenario
from .errors import InsufficientDataError, PolycorrError
from .ingest import ingest_csv, write_campaign_csv
from .refmap import fit_reference_map, load_reference_map, save_reference_map
from .report import (build_report, run_correction_pipeline,
                     write_analysis_csv, write_corrected_csv,
                     write_deviation_series, write_exceptions_csv,
                     write_report_text)
from .synth import generate_synthetic
from .thermo import evaluate_state

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


def _add_common(sub, points: bool = True):
    sub.add_argument("--config", required=True, help="run configuration JSON")
    if points:
        sub.add_argument("--points", required=True, help="campaign CSV")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--eos", choices=["real", "ideal"],
                     help="override the configured EOS mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polycorr",
        description="Correct compressor performance to reference conditions, "
                    "build reference maps, and report deviations.")
    parser.add_argument("--version", action="version",
                        version=f"polycorr {__version__} (kernel: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("props", help="print a thermodynamic state for debugging")
    p.add_argument("--config", required=True)
    p.add_argument("--composition-id", required=True)
    p.add_argument("--p-bar", required=True, type=float)
    p.add_argument("--t-k", required=True, type=float)
    p.add_argument("--eos", choices=["real", "ideal"])

    _add_common(sub.add_parser("analyze", help="uncorrected polytropic analysis"))
    _add_common(sub.add_parser("correct", help="correct points to the reference conditions"))

    p = sub.add_parser("fit-map", help="correct points and fit a reference map")
    _add_common(p)
    p.add_argument("--map", help="map output path (default <out>/reference_map.txt)")
    p.add_argument("--ref-speed", type=float,
                   help="normalization speed, rev/min (default: median corrected speed)")

    p = sub.add_parser("verify", help="correct points and report deviations from a map")
    _add_common(p)
    p.add_argument("--map", required=True, help="reference map file")

    p = sub.add_parser("synth", help="generate a synthetic campaign with ground truth")
    p.add_argument("--config", required=True, help="scenario JSON")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--eos", choices=["real", "ideal"])
    return parser


def _ensure_out(path: str) -> None:
    os.makedirs(path, exist_ok=True)


def _cmd_props(args) -> int:
    config = load_run_config(args.config, eos_override=args.eos)
    comp = config.compositions.get(args.composition_id)
    if comp is None:
        reason = config.invalid_compositions.get(args.composition_id, "not defined")
        print(f"error: composition {args.composition_id!r}: {reason}", file=sys.stderr)
        return EXIT_FATAL
    state = evaluate_state(args.p_bar * 1e5, args.t_k, comp, config.eos_mode,
                           config.db)
    print(f"# state at {args.p_bar!r} bar, {args.t_k!r} K "
          f"({args.composition_id}, {config.eos_mode.value} EOS)")
    for field in ("pressure", "temperature", "z", "cp", "h", "s", "v",
                  "dz_dT", "dz_dP", "dP_dT", "dv_dT", "X", "Y", "k", "mw"):
        print(f"{field}: {getattr(state, field)!r}")
    return EXIT_OK


def _load_and_run(args, analyze_only: bool = False):
    config = load_run_config(args.config, eos_override=args.eos)
    records, excluded = ingest_csv(args.points, config.compositions,
                                   config.invalid_compositions)
    result = run_correction_pipeline(config, records, excluded,
                                     analyze_only=analyze_only)
    return config, result


def _status(result) -> int:
    if result.excluded or result.failed:
        return EXIT_PARTIAL
    return EXIT_OK


def _summarize(stage: str, result) -> None:
    ok = len([o for o in result.outcomes if o.failure is None])
    print(f"{stage}: {ok} rows processed, {len(result.excluded)} excluded, "
          f"{len(result.failed)} failed")


def _cmd_analyze(args) -> int:
    config, result = _load_and_run(args, analyze_only=True)
    _ensure_out(args.out)
    write_analysis_csv(os.path.join(args.out, "analysis.csv"), result)
    write_exceptions_csv(os.path.join(args.out, "exceptions.csv"), result)
    _summarize("analyze", result)
    return _status(result)


def _cmd_correct(args) -> int:
    config, result = _load_and_run(args)
    _ensure_out(args.out)
    write_corrected_csv(os.path.join(args.out, "corrected.csv"), result)
    write_exceptions_csv(os.path.join(args.out, "exceptions.csv"), result)
    _summarize("correct", result)
    return _status(result)


def _cmd_fit_map(args) -> int:
    config, result = _load_and_run(args)
    _ensure_out(args.out)
    refmap = fit_reference_map(result.corrected_points, config.reference,
                               args.ref_speed)
    map_path = args.map or os.path.join(args.out, "reference_map.txt")
    save_reference_map(refmap, map_path)
    write_corrected_csv(os.path.join(args.out, "corrected.csv"), result)
    write_exceptions_csv(os.path.join(args.out, "exceptions.csv"), result)
    _summarize("fit-map", result)
    print(f"fit-map: {refmap.fit_stats.point_count} points, "
          f"flow range {refmap.flow_range[0]:.3f}..{refmap.flow_range[1]:.3f} kg/s, "
          f"map written to {map_path}")
    return _status(result)


def _cmd_verify(args) -> int:
    config, result = _load_and_run(args)
    refmap = load_reference_map(args.map)
    _ensure_out(args.out)
    doc = build_report(config, result, refmap)
    write_report_text(os.path.join(args.out, "report.txt"), doc)
    write_corrected_csv(os.path.join(args.out, "corrected.csv"), result)
    write_exceptions_csv(os.path.join(args.out, "exceptions.csv"), result)
    write_deviation_series(os.path.join(args.out, "head_deviation.dat"),
                           os.path.join(args.out, "power_deviation.dat"), doc)
    if doc.deviations and doc.deviations.avg_delta_head is not None:
        print(f"verify: avg head deviation {doc.deviations.avg_delta_head:.4f}%, "
              f"avg power deviation {doc.deviations.avg_delta_power:.4f}%")
    else:
        print("verify: no eligible points for deviation averages")
    _summarize("verify", result)
    return _status(result)


def _cmd_synth(args) -> int:
    scenario = load_scenario(args.config, seed_override=args.seed,
                             eos_override=args.eos)
    points, truth_map = generate_synthetic(scenario)
    _ensure_out(args.out)
    write_campaign_csv(os.path.join(args.out, "campaign.csv"),
                       ((sp.point, sp.composition_id) for sp in points))
    save_reference_map(truth_map, os.path.join(args.out, "truth_map.txt"))
    with open(os.path.join(args.out, "ground_truth.csv"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write("row,map_flow_kg_s,eta,head_j_kg,n_path\n")
        for i, sp in enumerate(points, start=1):
            fh.write(f"{i},{sp.map_flow!r},{sp.truth_eta!r},"
                     f"{sp.truth_head!r},{sp.truth_n_path!r}\n")
    import json
    comps = {cid: dict(zip(c.names, c.fractions))
             for cid, c in scenario.campaign_compositions}
    ref = scenario.reference.comp_ref
    comps.setdefault("reference", dict(zip(ref.names, ref.fractions)))
    with open(os.path.join(args.out, "compositions.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        json.dump(comps, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"synth: {len(points)} points written to {args.out} "
          f"(scenario {scenario.name!r}, seed {scenario.seed})")
    return EXIT_OK


_HANDLERS = {
    "props": _cmd_props,
    "analyze": _cmd_analyze,
    "correct": _cmd_correct,
    "fit-map": _cmd_fit_map,
    "verify": _cmd_verify,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except InsufficientDataError as exc:
        print(f"error: insufficient data: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except PolycorrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
