"""Campaign CSV ingestion and emission.

Schema (header must match exactly, UTF-8, '.' decimal, LF):

    timestamp,p1_bar,t1_k,p2_bar,t2_k,mass_flow_kg_s,speed_rpm,composition_id

Pressures are converted bar -> Pa at the parse boundary; everything
downstream is SI. Row failures are collected, not fatal, unless every
row fails.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .errors import DataQualityError, SchemaError
from .performance import OperatingPoint
from .thermo import GasComposition

CSV_HEADER = ("timestamp", "p1_bar", "t1_k", "p2_bar", "t2_k",
              "mass_flow_kg_s", "speed_rpm", "composition_id")


@dataclass(frozen=True)
class CampaignRecord:
    """One CSV row mapped to an OperatingPoint, with row provenance."""

    row_number: int  # 1-based data row (header not counted)
    point: OperatingPoint
    composition_id: str


def ingest_csv(path, compositions: dict[str, GasComposition],
               invalid_compositions: dict[str, str] | None = None
               ) -> tuple[list[CampaignRecord], list[tuple[int, str]]]:
    """Read and validate a campaign file.

    Returns (records, excluded) where excluded holds (row_number, reason)
    for every row that did not survive validation.
    """
    invalid_compositions = invalid_compositions or {}
    records: list[CampaignRecord] = []
    excluded: list[tuple[int, str]] = []
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != CSV_HEADER:
            raise SchemaError(
                f"{path}: header mismatch; expected {','.join(CSV_HEADER)}")
        for row_number, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            reason = _validate_row(row, row_number, compositions,
                                   invalid_compositions, records)
            if reason is not None:
                excluded.append((row_number, reason))
    if not records and excluded:
        raise SchemaError(f"{path}: all {len(excluded)} rows failed validation")
    return records, excluded


def _validate_row(row, row_number, compositions, invalid_compositions,
                  records) -> str | None:
    """Append a CampaignRecord or return the exclusion reason."""
    if len(row) != len(CSV_HEADER):
        return f"expected {len(CSV_HEADER)} columns, got {len(row)}"
    timestamp = row[0].strip()
    values = {}
    for name, cell in zip(CSV_HEADER[1:7], row[1:7]):
        try:
            value = float(cell)
        except ValueError:
            return f"non-numeric {name}: {cell.strip()!r}"
        if not math.isfinite(value):
            return f"non-finite {name}"
        values[name] = value
    comp_id = row[7].strip()
    if comp_id in invalid_compositions:
        return f"composition {comp_id!r}: {invalid_compositions[comp_id]}"
    comp = compositions.get(comp_id)
    if comp is None:
        return f"unknown composition {comp_id!r}"
    p1 = values["p1_bar"] * 1e5
    p2 = values["p2_bar"] * 1e5
    t1 = values["t1_k"]
    t2 = values["t2_k"]
    if p1 <= 0.0 or p2 <= 0.0:
        return "non-positive pressure"
    if p2 <= p1:
        return "non-compressing point"
    if t1 <= 0.0:
        return "non-positive inlet temperature"
    if t2 <= t1:
        return "no compression heating (t2 <= t1)"
    try:
        point = OperatingPoint(timestamp=timestamp, p1=p1, t1=t1, p2=p2, t2=t2,
                               mass_flow=values["mass_flow_kg_s"],
                               speed=values["speed_rpm"], comp=comp)
    except DataQualityError as exc:
        return str(exc)
    records.append(CampaignRecord(row_number=row_number, point=point,
                                  composition_id=comp_id))
    return None


def write_campaign_csv(path, rows) -> None:
    """Write campaign rows; floats are repr()'d so output is reproducible.

    `rows` yields (OperatingPoint, composition_id) pairs.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_HEADER) + "\n")
        for point, comp_id in rows:
            fh.write(",".join([
                point.timestamp,
                repr(point.p1 / 1e5),
                repr(point.t1),
                repr(point.p2 / 1e5),
                repr(point.t2),
                repr(point.mass_flow),
                repr(point.speed),
                comp_id,
            ]) + "\n")
