"""Artifact serialization and summary derivation.

Every float written to an artifact is first rounded to 12 significant
digits, and summaries are derived from the already-rounded records (not
from in-memory full-precision values).  Two consequences:

* reruns with identical config and fixtures are byte-identical -- no
  timestamps are written anywhere;
* the ``report`` command, which rebuilds summaries from records on
  disk, reproduces the original run's summary bytes exactly.
"""

from __future__ import annotations

import json
import os
import statistics
from typing import Iterable

from cs_probe.errors import UndefinedCorrelationError
from cs_probe.stats import pearson_r

SIG_DIGITS = 12

MASK_RECORDS = "mask_scores.jsonl"
SENTENCE_RECORDS = "sentence_scores.jsonl"
PAIR_RECORDS = "pair_results.jsonl"
SUMMARY = "summary.json"
PLOT = "plot.json"

SCORE_FIELDS = ("acc", "prec", "w_acc", "w_prec")


def canon(value):
    """Round floats to 12 significant digits, recursively; idempotent."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return float(f"{value:.{SIG_DIGITS}g}")
    if isinstance(value, dict):
        return {k: canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canon(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return canon(value.item())
    raise TypeError(f"cannot canonicalize {type(value).__name__}")


def write_jsonl(path: str, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=True))
            fh.write("\n")


def read_jsonl(path: str) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records


def write_json(path: str, obj: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, ensure_ascii=True, indent=2)
        fh.write("\n")


def read_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _correlation_entry(name_x: str, name_y: str, xs: list, ys: list) -> dict:
    entry = {"x": name_x, "y": name_y, "n": len(xs)}
    try:
        entry["r"] = canon(pearson_r(xs, ys)) if len(xs) >= 2 else None
        if len(xs) < 2:
            entry["reason"] = "fewer than two observations"
    except UndefinedCorrelationError:
        entry["r"] = None
        entry["reason"] = "constant series"
    return entry


def derive_cloze_summary(
    mask_records: list[dict],
    sentence_records: list[dict],
    config_echo: dict,
) -> dict:
    scored = [r for r in mask_records if r["status"] == "scored"]
    failed = [r for r in mask_records if r["status"] == "failed"]

    def series(field: str) -> list[tuple[str, float]]:
        return [
            (r["sentence_id"], r["means"][field])
            for r in sentence_records
            if r["means"][field] is not None
        ]

    correlations = []
    for x_name, y_name in (("acc", "prec"), ("w_acc", "w_prec")):
        xs_map = dict(series(x_name))
        pairs = [(xs_map[sid], v) for sid, v in series(y_name) if sid in xs_map]
        correlations.append(
            _correlation_entry(
                f"mean_{x_name}", f"mean_{y_name}",
                [p[0] for p in pairs], [p[1] for p in pairs],
            )
        )
    lengths = {r["sentence_id"]: r["length"] for r in sentence_records}
    len_pairs = [(lengths[sid], v) for sid, v in series("acc")]
    correlations.append(
        _correlation_entry(
            "length", "mean_acc",
            [p[0] for p in len_pairs], [p[1] for p in len_pairs],
        )
    )

    return {
        "command": "cloze-eval",
        "config": config_echo,
        "counts": {
            "sentences": len(sentence_records),
            "masks_total": len(mask_records),
            "masks_scored": len(scored),
            "masks_failed": len(failed),
        },
        "oov": {
            "replacements_used": sum(r.get("used", 0) for r in mask_records),
            "replacements_oov": sum(r.get("oov", 0) for r in mask_records),
        },
        "correlations": correlations,
        "series_definitions": {
            "length": "token count including stopwords and punctuation",
            "score": "per-sentence mean of acc",
        },
    }


def derive_cloze_plot(sentence_records: list[dict]) -> dict:
    series: dict[str, list] = {"sentence_id": [], "length": []}
    for field in SCORE_FIELDS:
        series[f"mean_{field}"] = []
    for r in sentence_records:
        series["sentence_id"].append(r["sentence_id"])
        series["length"].append(r["length"])
        for field in SCORE_FIELDS:
            series[f"mean_{field}"].append(r["means"][field])
    return {"kind": "cloze-series", "series": series}


def _group_stats(values: list[float]) -> dict:
    if not values:
        return {"count": 0, "min": None, "max": None, "median": None, "mean": None}
    return canon(
        {
            "count": len(values),
            "min": min(values),
            "max": max(values),
            "median": float(statistics.median(values)),
            "mean": sum(values) / len(values),
        }
    )


def violin_groups_from_records(pair_records: list[dict]) -> dict[str, list[float]]:
    groups: dict[str, list[float]] = {
        "incorrect_predicted": [],
        "incorrect_gold": [],
        "correct_predicted": [],
    }
    for r in pair_records:
        if r["status"] != "scored":
            continue
        conf = {"a": r["conf_a"], "b": r["conf_b"]}
        if r["correct"]:
            groups["correct_predicted"].append(conf[r["predicted"]])
        else:
            groups["incorrect_predicted"].append(conf[r["predicted"]])
            groups["incorrect_gold"].append(conf[r["gold"]])
    return groups


def derive_confidence_summary(pair_records: list[dict], config_echo: dict) -> dict:
    by_status: dict[str, list[dict]] = {"scored": [], "skipped": [], "not_encodable": []}
    for r in pair_records:
        by_status[r["status"]].append(r)
    scored = by_status["scored"]
    correct = [r for r in scored if r["correct"]]

    def reason_counts(records: list[dict]) -> dict:
        counts: dict[str, int] = {}
        for r in records:
            counts[r["reason"]] = counts.get(r["reason"], 0) + 1
        counts["total"] = len(records)
        return counts

    encodable = len(scored) + len(by_status["skipped"])
    violin = {
        name: _group_stats(values)
        for name, values in violin_groups_from_records(pair_records).items()
    }
    accuracy = canon(len(correct) / len(scored)) if scored else None
    return {
        "command": "confidence-eval",
        "config": config_echo,
        "counts": {
            "dataset": len(pair_records),
            "encodable": encodable,
            "not_encodable": reason_counts(by_status["not_encodable"]),
            "scored": len(scored),
            "skipped": reason_counts(by_status["skipped"]),
            "correct": len(correct),
            "incorrect": len(scored) - len(correct),
        },
        "accuracy": accuracy,
        "violin": violin,
        "oov": {
            "candidates_used": sum(r.get("candidates_used", 0) for r in pair_records),
            "candidates_oov": sum(r.get("candidates_oov", 0) for r in pair_records),
        },
    }


def derive_confidence_plot(pair_records: list[dict]) -> dict:
    return {"kind": "violin", "groups": violin_groups_from_records(pair_records)}


def write_cloze_artifacts(
    out_dir: str,
    mask_records: list[dict],
    sentence_records: list[dict],
    config_echo: dict,
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    write_jsonl(os.path.join(out_dir, MASK_RECORDS), mask_records)
    write_jsonl(os.path.join(out_dir, SENTENCE_RECORDS), sentence_records)
    write_json(
        os.path.join(out_dir, SUMMARY),
        derive_cloze_summary(mask_records, sentence_records, config_echo),
    )
    write_json(os.path.join(out_dir, PLOT), derive_cloze_plot(sentence_records))


def write_confidence_artifacts(
    out_dir: str,
    pair_records: list[dict],
    config_echo: dict,
) -> None:
    os.makedirs(out_dir, exist_ok=True)
    write_jsonl(os.path.join(out_dir, PAIR_RECORDS), pair_records)
    write_json(
        os.path.join(out_dir, SUMMARY),
        derive_confidence_summary(pair_records, config_echo),
    )
    write_json(os.path.join(out_dir, PLOT), derive_confidence_plot(pair_records))
