"""Evaluation runs: wiring datasets, providers, metrics, and reports.

Both runs are deterministic for a fixed config and fixture set: all
randomness flows from the single run seed, fanned out per pair id by a
stable hash, and worker-pool outputs are gathered in input order so
concurrency never affects artifacts.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

from cs_probe import reportio
from cs_probe.cloze import (
    ChoicePair,
    Sentence,
    build_cloze_tests,
    default_stopwords,
    encode_pair,
    load_pair_dataset,
    load_sentence_dataset,
    load_stopwords,
)
from cs_probe.confidence import ClusteringConfig, ConfidenceResult, score_pair
from cs_probe.dispersion import score_sentence
from cs_probe.embeddings import load_embeddings_path
from cs_probe.errors import ConfigError
from cs_probe.gateway import CandidateRequest, FixtureProvider, HttpProvider
from cs_probe.reportio import canon


@dataclass
class RunConfig:
    embeddings: str
    dataset: str
    out: str
    fixture: str | None = None
    lm_url: str | None = None
    dim: int | None = None
    k: int = 5
    candidates_k: int = 30
    n_components: int = 2
    seed: int = 7
    stopwords: str | None = None
    zc_over: str = "choices"
    mass: str = "normalized"
    workers: int = 1
    gmm_restarts: int = 1
    timeout: float = 10.0
    retries: int = 2

    def validate(self) -> None:
        if (self.fixture is None) == (self.lm_url is None):
            raise ConfigError(
                "exactly one candidate provider must be configured: "
                "--fixture or --lm-url (or CS_PROBE_LM_URL)"
            )
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        for name in ("k", "candidates_k", "n_components", "gmm_restarts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")


def derive_seed(run_seed: int, item_id: str) -> int:
    """Stable per-item RNG seed: sha256 of '<seed>:<id>', first 8 bytes."""
    digest = hashlib.sha256(f"{run_seed}:{item_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def make_provider(config: RunConfig):
    if config.fixture is not None:
        return FixtureProvider(config.fixture)
    return HttpProvider(config.lm_url, timeout=config.timeout, retries=config.retries)


def _provider_echo(config: RunConfig) -> dict:
    if config.fixture is not None:
        return {"type": "fixture", "path": config.fixture}
    return {"type": "http", "url": config.lm_url}


def _config_echo(config: RunConfig, command: str) -> dict:
    # out dir and worker width are omitted: neither affects the results,
    # and echoing them would break byte-identity across equivalent runs
    echo = {
        "embeddings": config.embeddings,
        "dim": config.dim,
        "dataset": config.dataset,
        "provider": _provider_echo(config),
        "seed": config.seed,
        "stopwords": config.stopwords or "builtin",
    }
    if command == "cloze-eval":
        echo["k"] = config.k
    else:
        echo.update(
            {
                "candidates_k": config.candidates_k,
                "components": config.n_components,
                "zc_over": config.zc_over,
                "mass": config.mass,
                "gmm_restarts": config.gmm_restarts,
            }
        )
    return echo


def _map_ordered(fn: Callable, items: Iterable, workers: int) -> list:
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _load_stopword_set(config: RunConfig) -> frozenset[str]:
    if config.stopwords is None:
        return default_stopwords()
    with open(config.stopwords, "r", encoding="utf-8") as fh:
        return load_stopwords(fh)


def run_cloze_eval(config: RunConfig) -> dict:
    """Experiment-1 run: mask every content word, score the LM's
    replacements, aggregate per sentence, correlate across sentences."""
    config.validate()
    table = load_embeddings_path(config.embeddings, config.dim)
    stopwords = _load_stopword_set(config)
    sentences = load_sentence_dataset(config.dataset)
    provider = make_provider(config)

    def evaluate(sentence: Sentence):
        items = build_cloze_tests(sentence, stopwords)
        fetched = []
        for item in items:
            record = provider.get(
                CandidateRequest(
                    masked_text=item.masked_text(),
                    request_id=item.request_id,
                    top_k=config.k,
                )
            )
            fetched.append((item, record.candidates))
        report = score_sentence(
            fetched, table, length=len(sentence.tokens), sentence_id=sentence.id
        )
        candidate_counts = {item.mask_index: r.k for item, r in fetched}
        return items, candidate_counts, report

    results = _map_ordered(evaluate, sentences, config.workers)

    mask_records: list[dict] = []
    sentence_records: list[dict] = []
    for items, candidate_counts, report in results:
        by_index = {item.mask_index: item for item in items}
        for mask_index, scores in report.per_mask:
            item = by_index[mask_index]
            mask_records.append(
                canon(
                    {
                        "sentence_id": report.sentence_id,
                        "mask_index": mask_index,
                        "original": item.original,
                        "masked_text": item.masked_text(),
                        "status": "scored",
                        "used": scores.used,
                        "oov": scores.oov,
                        "scores": {
                            name: getattr(scores, name)
                            for name in reportio.SCORE_FIELDS
                        },
                        "notes": scores.notes,
                    }
                )
            )
        for mask_index, error in report.failed:
            item = by_index[mask_index]
            mask_records.append(
                {
                    "sentence_id": report.sentence_id,
                    "mask_index": mask_index,
                    "original": item.original,
                    "masked_text": item.masked_text(),
                    "status": "failed",
                    "error": error,
                    "used": 0,
                    "oov": candidate_counts[mask_index],
                }
            )
        sentence_records.append(
            canon(
                {
                    "sentence_id": report.sentence_id,
                    "length": report.length,
                    "masks": report.n_masks,
                    "masks_scored": len(report.per_mask),
                    "masks_failed": len(report.failed),
                    "means": report.means,
                }
            )
        )

    echo = _config_echo(config, "cloze-eval")
    reportio.write_cloze_artifacts(config.out, mask_records, sentence_records, echo)
    return {
        "mask_records": mask_records,
        "sentence_records": sentence_records,
        "summary": reportio.read_json(os.path.join(config.out, reportio.SUMMARY)),
    }


def run_confidence_eval(config: RunConfig) -> dict:
    """Experiment-2 run: encode pairs, cluster LM candidates for the
    masked slot, and score both answer choices."""
    config.validate()
    table = load_embeddings_path(config.embeddings, config.dim)
    pairs = load_pair_dataset(config.dataset)
    provider = make_provider(config)

    def evaluate(entry):
        pair_id, sent_a, sent_b, gold = entry
        encoded = encode_pair(sent_a, sent_b, gold)
        if not isinstance(encoded, ChoicePair):
            return {"pair_id": pair_id, "status": "not_encodable", "reason": encoded.reason}
        record = provider.get(
            CandidateRequest(
                masked_text=encoded.masked_text(),
                request_id=pair_id,
                top_k=config.candidates_k,
            )
        )
        clustering = ClusteringConfig(
            n_components=config.n_components,
            seed=derive_seed(config.seed, pair_id),
            restarts=config.gmm_restarts,
            zc_over=config.zc_over,
            mass=config.mass,
        )
        result = score_pair(encoded, record.candidates, table, clustering)
        return _pair_record(encoded, result)

    pair_records = [canon(r) for r in _map_ordered(evaluate, pairs, config.workers)]
    echo = _config_echo(config, "confidence-eval")
    reportio.write_confidence_artifacts(config.out, pair_records, echo)
    return {
        "pair_records": pair_records,
        "summary": reportio.read_json(os.path.join(config.out, reportio.SUMMARY)),
    }


def _pair_record(pair: ChoicePair, result: ConfidenceResult) -> dict:
    if result.skipped:
        return {
            "pair_id": result.pair_id,
            "status": "skipped",
            "reason": result.skipped_reason,
            "gold": result.gold,
            "candidates_used": result.candidates_used,
            "candidates_oov": result.candidates_oov,
        }
    return {
        "pair_id": result.pair_id,
        "status": "scored",
        "gold": result.gold,
        "choice_a": pair.choice_a,
        "choice_b": pair.choice_b,
        "diff_index": pair.diff_index,
        "conf_a": result.conf_a,
        "conf_b": result.conf_b,
        "predicted": result.predicted,
        "correct": result.correct,
        "margin": result.margin,
        "candidates_used": result.candidates_used,
        "candidates_oov": result.candidates_oov,
        "clusters": [
            {
                "mass": s.mass,
                "raw_mass": s.raw_mass,
                "size": len(s.member_words),
            }
            for s in result.clusters
        ],
    }


def regenerate_report(out_dir: str) -> str:
    """Rebuild summary.json and plot.json from the records in ``out_dir``.

    The config echo is carried over from the existing summary.  Returns
    which kind of run was found.
    """
    summary_path = os.path.join(out_dir, reportio.SUMMARY)
    if not os.path.exists(summary_path):
        raise ConfigError(f"{out_dir} has no {reportio.SUMMARY} to take the config from")
    config_echo = reportio.read_json(summary_path).get("config", {})

    pair_path = os.path.join(out_dir, reportio.PAIR_RECORDS)
    mask_path = os.path.join(out_dir, reportio.MASK_RECORDS)
    sent_path = os.path.join(out_dir, reportio.SENTENCE_RECORDS)
    if os.path.exists(pair_path):
        pair_records = reportio.read_jsonl(pair_path)
        reportio.write_json(
            summary_path, reportio.derive_confidence_summary(pair_records, config_echo)
        )
        reportio.write_json(
            os.path.join(out_dir, reportio.PLOT),
            reportio.derive_confidence_plot(pair_records),
        )
        return "confidence-eval"
    if os.path.exists(mask_path) and os.path.exists(sent_path):
        mask_records = reportio.read_jsonl(mask_path)
        sentence_records = reportio.read_jsonl(sent_path)
        reportio.write_json(
            summary_path,
            reportio.derive_cloze_summary(mask_records, sentence_records, config_echo),
        )
        reportio.write_json(
            os.path.join(out_dir, reportio.PLOT),
            reportio.derive_cloze_plot(sentence_records),
        )
        return "cloze-eval"
    raise ConfigError(f"{out_dir} holds no cloze or confidence records")
