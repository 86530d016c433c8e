"""Pipeline driver and report emission.

Runs analyze/correct over ingested records with per-row fault isolation,
and writes the verification report plus flat plot-series files. Every
float is serialized with repr() and no wall-clock time is recorded, so
identical inputs and config produce byte-identical files.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import __version__
from .config import RunConfig
from .correction import CorrectedPoint, correct_point
from .errors import PolycorrError
from .ingest import CampaignRecord
from .performance import PerformanceSummary, analyze_point
from .refmap import DeviationReport, ReferenceMap, campaign_report

REPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class RowOutcome:
    row_number: int
    summary: PerformanceSummary | None
    corrected: CorrectedPoint | None
    failure: str | None   # stage-qualified message when processing failed


@dataclass(frozen=True)
class PipelineResult:
    """Per-row outcomes; every ingested row is accounted for exactly once."""

    outcomes: tuple[RowOutcome, ...]
    excluded: tuple[tuple[int, str], ...]   # ingest-level exclusions

    @property
    def corrected_points(self) -> list[CorrectedPoint]:
        return [o.corrected for o in self.outcomes if o.corrected is not None]

    @property
    def failed(self) -> tuple[tuple[int, str], ...]:
        return tuple((o.row_number, o.failure) for o in self.outcomes
                     if o.failure is not None)


def run_correction_pipeline(config: RunConfig,
                            records: list[CampaignRecord],
                            excluded: list[tuple[int, str]],
                            analyze_only: bool = False) -> PipelineResult:
    """Analyze (and correct) every record, isolating per-row failures."""
    outcomes = []
    for rec in records:
        summary = corrected = None
        failure = None
        try:
            summary = analyze_point(rec.point, config.eos_mode, config.db)
            if not analyze_only:
                corrected = correct_point(summary, config.reference,
                                          config.correction, config.eos_mode,
                                          config.db)
        except PolycorrError as exc:
            stage = "analyze" if summary is None else "correct"
            failure = f"{stage}: {exc}"
        outcomes.append(RowOutcome(rec.row_number, summary, corrected, failure))
    return PipelineResult(outcomes=tuple(outcomes), excluded=tuple(excluded))


@dataclass(frozen=True)
class ReportDocument:
    """Everything the verify stage knows about one campaign run."""

    config_digest: str
    result: PipelineResult
    deviations: DeviationReport | None
    refmap: ReferenceMap | None
    warnings: tuple[str, ...]


def build_report(config: RunConfig, result: PipelineResult,
                 refmap: ReferenceMap) -> ReportDocument:
    corrected = result.corrected_points
    deviations = campaign_report(corrected, refmap) if corrected else None
    warnings = list(config.warnings)
    for outcome in result.outcomes:
        if outcome.corrected is not None:
            for w in outcome.corrected.warnings:
                warnings.append(f"row {outcome.row_number}: {w}")
    return ReportDocument(config_digest=config.digest, result=result,
                          deviations=deviations, refmap=refmap,
                          warnings=tuple(warnings))


# -- emission -------------------------------------------------------------------

ANALYSIS_COLUMNS = (
    "row", "timestamp", "n_inlet", "n_discharge", "n_avg", "k_avg", "X_avg",
    "Y_avg", "eta", "schultz_f", "head_j_kg", "power_w",
)

CORRECTED_COLUMNS = (
    "row", "timestamp", "p2_c_bar", "t2_c_k", "n_c", "n1_c", "n2_c", "eta_c",
    "f_c", "head_c_j_kg", "speed_c_rpm", "mass_flow_c_kg_s", "power_c_w",
    "iterations", "converged", "warnings",
)


def write_analysis_csv(path, result: PipelineResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(ANALYSIS_COLUMNS) + "\n")
        for o in result.outcomes:
            if o.summary is None:
                continue
            s = o.summary
            fh.write(",".join([
                str(o.row_number), s.point.timestamp,
                repr(s.n_inlet), repr(s.n_discharge), repr(s.n_avg),
                repr(s.k_avg), repr(s.X_avg), repr(s.Y_avg), repr(s.eta),
                repr(s.schultz_f), repr(s.head), repr(s.power),
            ]) + "\n")


def write_corrected_csv(path, result: PipelineResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CORRECTED_COLUMNS) + "\n")
        for o in result.outcomes:
            if o.corrected is None:
                continue
            c = o.corrected
            fh.write(",".join([
                str(o.row_number), c.source.timestamp,
                repr(c.p2_c / 1e5), repr(c.t2_c), repr(c.n_c), repr(c.n1_c),
                repr(c.n2_c), repr(c.eta_c), repr(c.f_c), repr(c.head_c),
                repr(c.speed_c), repr(c.mass_flow_c), repr(c.power_c),
                str(c.iterations_used), str(int(c.converged)),
                "|".join(c.warnings).replace(",", ";"),
            ]) + "\n")


def write_exceptions_csv(path, result: PipelineResult) -> None:
    """Ingest exclusions and per-row processing failures, one file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("row,kind,reason\n")
        rows = [(r, "excluded", reason) for r, reason in result.excluded]
        rows += [(r, "failed", reason) for r, reason in result.failed]
        for row, kind, reason in sorted(rows):
            fh.write(f"{row},{kind},{reason.replace(',', ';')}\n")


def write_deviation_series(head_path, power_path,
                           doc: ReportDocument) -> None:
    """Two-column (index, delta-percent) series, one file per quantity."""
    per_point = doc.deviations.per_point if doc.deviations else ()
    with open(head_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# index delta_head_pct\n")
        for idx, d_head, _, _ in per_point:
            fh.write(f"{idx} {d_head!r}\n")
    with open(power_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# index delta_power_pct\n")
        for idx, _, d_power, _ in per_point:
            fh.write(f"{idx} {d_power!r}\n")


def write_report_text(path, doc: ReportDocument) -> None:
    result = doc.result
    dev = doc.deviations
    lines = [
        "# polycorr verification report",
        f"report_format_version: {REPORT_FORMAT_VERSION}",
        f"package_version: {__version__}",
        f"config_digest: {doc.config_digest}",
    ]
    if doc.refmap is not None:
        lines += [
            f"map_n_ref_speed_rpm: {doc.refmap.n_ref_speed!r}",
            f"map_flow_range_kg_s: {doc.refmap.flow_range[0]!r} "
            f"{doc.refmap.flow_range[1]!r}",
        ]
    corrected_count = len(result.corrected_points)
    lines += [
        f"rows_ingested: {corrected_count + len(result.failed) + len(result.excluded)}",
        f"rows_corrected: {corrected_count}",
        f"rows_excluded_at_ingest: {len(result.excluded)}",
        f"rows_failed: {len(result.failed)}",
    ]
    if dev is None or dev.avg_delta_head is None:
        lines += ["avg_delta_head_pct: unavailable",
                  "avg_delta_power_pct: unavailable"]
    else:
        lines += [f"avg_delta_head_pct: {dev.avg_delta_head!r}",
                  f"avg_delta_power_pct: {dev.avg_delta_power!r}"]
    lines.append(f"report_excluded_points: {dev.excluded_count if dev else 0}")

    lines.append("")
    lines.append("[ingest_exclusions]")
    for row, reason in result.excluded:
        lines.append(f"{row} {reason}")
    lines.append("")
    lines.append("[failures]")
    for row, reason in result.failed:
        lines.append(f"{row} {reason}")
    lines.append("")
    lines.append("[report_exclusions]")
    if dev is not None:
        for idx, reason in dev.exclusion_reasons:
            lines.append(f"{idx} {reason}")
    lines.append("")
    lines.append("[per_point]")
    lines.append("# index delta_head_pct delta_power_pct in_range")
    if dev is not None:
        for idx, d_head, d_power, in_range in dev.per_point:
            lines.append(f"{idx} {d_head!r} {d_power!r} {int(in_range)}")
    lines.append("")
    lines.append("[warnings]")
    for w in doc.warnings:
        lines.append(w)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
