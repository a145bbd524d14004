"""Experiment reports.

``summary.json`` holds the batch statistics and a snapshot of the instance
with the largest gap; ``results.csv`` holds one row per instance with every
:class:`~epdkit.sensitivity.InstanceResult` field, at full precision, so the
summary can be recomputed from it (:func:`read_results` + ``summarize``).

Tuple-valued columns are space-separated; missing values are empty.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

from .sensitivity import BatchStats, ExperimentConfig, InstanceResult

#: Column order of ``results.csv``.
RESULT_COLUMNS = tuple(f.name for f in dataclasses.fields(InstanceResult))

_INT_TUPLES = {"category_counts", "s1_by_category", "s2_by_category", "S1", "S2"}
_FLOAT_TUPLES = {"scenario1", "scenario2"}
_INTS = {"index", "seed", "n_species", "n_internal", "d_max", "lambda_max", "k"}
_STRS = {"category_case"}


def pct(x: float) -> str:
    return f"{100 * x:.2f}"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return " ".join(_cell(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse(name: str, cell: str):
    if cell == "" and name not in _STRS and name not in ("S1", "S2"):
        return None
    if name in _INT_TUPLES:
        return tuple(int(x) for x in cell.split())
    if name in _FLOAT_TUPLES:
        return tuple(float(x) for x in cell.split())
    if name in _INTS:
        return int(cell)
    if name in _STRS:
        return cell
    return float(cell)


def _by_category(counts) -> dict[str, int] | None:
    if counts is None:
        return None
    return {f"category {g}": c for g, c in enumerate(counts, 1) if c}


def summary_document(stats: BatchStats, config: ExperimentConfig | None = None) -> dict:
    r = stats.argmax
    doc = {
        "instances": stats.count,
        "gaps_pooled": 2 * stats.count,
        "gap_mean": stats.gap_mean,
        "gap_std": stats.gap_std,
        "gap_max": stats.gap_max,
        "gap_mean_pct": pct(stats.gap_mean),
        "gap_std_pct": pct(stats.gap_std),
        "gap_max_pct": pct(stats.gap_max),
        "dissimilarity_max": stats.dissimilarity_max,
        "dissimilarity_at_max_gap": stats.dissimilarity_at_max_gap,
        "species_min": stats.min_species,
        "species_max": stats.max_species,
        "max_gap_instance": {
            "index": r.index,
            "n_internal": r.n_internal,
            "n_species": r.n_species,
            "d_max": r.d_max,
            "lambda_max": r.lambda_max,
            "longest_root_path": r.longest_path,
            "shortest_root_path": r.shortest_path,
            "species_per_category": None if r.category_counts is None else list(r.category_counts),
            "scenario1_probabilities": None if r.scenario1 is None else list(r.scenario1),
            "scenario2_probabilities": None if r.scenario2 is None else list(r.scenario2),
            "category_case": r.category_case,
            "rho": r.rho,
            "k": r.k,
            "scenario1_epd_unprotected": r.epd0_1,
            "scenario2_epd_unprotected": r.epd0_2,
            "epd_all_protected": r.total_pd1,
            "scenario1_max_epd": r.epd11,
            "scenario1_distribution_by_category": _by_category(r.s1_by_category),
            "scenario1_epd_of_scenario2_set": r.epd12,
            "gap1": r.gap1,
            "gap1_pct": pct(r.gap1),
            "scenario2_max_epd": r.epd22,
            "scenario2_distribution_by_category": _by_category(r.s2_by_category),
            "scenario2_epd_of_scenario1_set": r.epd21,
            "gap2": r.gap2,
            "gap2_pct": pct(r.gap2),
            "dissimilarity": r.dissimilarity,
        },
    }
    if config is not None:
        # worker count does not affect results; leaving it out keeps serial
        # and parallel reports byte-identical
        doc["config"] = {k: v for k, v in dataclasses.asdict(config).items() if k != "workers"}
    return doc


def write_summary(path, stats: BatchStats, config: ExperimentConfig | None = None) -> Path:
    path = Path(path)
    text = json.dumps(summary_document(stats, config), indent=2) + "\n"
    path.write_text(text, encoding="utf-8")
    return path


def write_results(path, results) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in sorted(results, key=lambda r: r.index):
            w.writerow([_cell(getattr(r, c)) for c in RESULT_COLUMNS])
    return path


def read_results(path) -> list[InstanceResult]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != RESULT_COLUMNS:
            raise ValueError(f"{path}: unexpected columns")
        return [
            InstanceResult(**{c: _parse(c, cell) for c, cell in zip(header, row)})
            for row in reader
        ]


def write_report(
    out_dir,
    stats: BatchStats,
    results,
    config: ExperimentConfig | None = None,
    formats=("summary", "per-instance"),
) -> list[Path]:
    """Write the requested report files into ``out_dir``; returns their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "summary" in formats:
        written.append(write_summary(out / "summary.json", stats, config))
    if "per-instance" in formats:
        written.append(write_results(out / "results.csv", results))
    return written
