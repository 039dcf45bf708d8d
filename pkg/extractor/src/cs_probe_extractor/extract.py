"""Batch extraction: run the model over a dataset, write the fixture file.

The output is line-delimited JSON in exactly the schema the cs-probe
fixture provider reads:

    {"request_id": str, "masked_text": str, "model_name": str,
     "candidates": [{"word": str, "p": float}, ...]}

Probabilities are the model's softmax scores over its full vocabulary,
sorted descending and never renormalized.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import IO

from cs_probe_extractor.fillmask import DEFAULT_MODEL, FillMaskModel
from cs_probe_extractor.textprep import (
    dataset_requests,
    default_stopwords,
    load_stopwords,
)

logger = logging.getLogger(__name__)


@dataclass
class ExtractionJob:
    dataset: str
    out: str
    model: str = DEFAULT_MODEL
    top_k: int = 30
    device: str | int = -1
    stopwords: str | None = None


def write_record(sink: IO[str], request_id: str, masked_text: str,
                 model_name: str, candidates) -> None:
    record = {
        "request_id": request_id,
        "masked_text": masked_text,
        "model_name": model_name,
        "candidates": [{"word": w, "p": p} for w, p in candidates],
    }
    sink.write(json.dumps(record, sort_keys=True, ensure_ascii=True))
    sink.write("\n")


def run_extraction(job: ExtractionJob, model: FillMaskModel | None = None) -> dict:
    """Extract candidates for every request of the dataset.

    Per-item model failures skip that item (logged); anything else
    aborts.  Returns counts for the caller's logging.
    """
    if model is None:
        model = FillMaskModel(job.model, device=job.device)
    if job.stopwords is None:
        stopwords = default_stopwords()
    else:
        with open(job.stopwords, "r", encoding="utf-8") as fh:
            stopwords = load_stopwords(fh)
    requests, stats = dataset_requests(job.dataset, stopwords)
    written = 0
    failed = 0
    with open(job.out, "w", encoding="utf-8", newline="\n") as sink:
        for request in requests:
            try:
                candidates = model.propose_clean(request.masked_text, job.top_k)
            except Exception as exc:
                failed += 1
                logger.warning("skipping %s: %s", request.request_id, exc)
                continue
            write_record(
                sink, request.request_id, request.masked_text,
                model.model_name, candidates,
            )
            written += 1
    stats.update({"requests": len(requests), "written": written, "failed": failed})
    return stats
