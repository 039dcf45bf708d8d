"""Candidate providers: the boundary between the metrics and any LM.

The core never talks to a model directly.  It asks a provider for the
top-k candidates of a masked sentence and gets back a validated record;
whether the candidates come from a fixture file or an HTTP fill-mask
endpoint is invisible to the caller.

Fixture schema (JSONL, one record per request):
    {"request_id": str, "masked_text": str, "model_name": str,
     "candidates": [{"word": str, "p": float}, ...]}

Wire protocol:
    POST <base_url>/fill  {"masked_text": "... <mask> ...", "top_k": int}
    -> 200 {"model_name": str, "candidates": [{"word": str, "p": float}, ...]}
    with candidates sorted by descending p.

Candidate probabilities are softmax scores over the full LM vocabulary;
providers never renormalize them -- renormalization over in-vocabulary
survivors is the metric layer's explicit step.
"""

from __future__ import annotations

import json
import logging
import math
import threading
import time
from dataclasses import dataclass
from typing import IO, Iterable

import requests

from cs_probe.dispersion import PROB_SUM_SLACK, ReplacementSet
from cs_probe.errors import (
    FixtureParseError,
    InvalidInputError,
    MissingFixtureError,
    ProtocolError,
    RemoteError,
    TransportError,
)

logger = logging.getLogger(__name__)

MASK_SENTINEL = "<mask>"


@dataclass(frozen=True)
class CandidateRequest:
    masked_text: str
    request_id: str
    top_k: int

    def __post_init__(self):
        if self.masked_text.count(MASK_SENTINEL) != 1:
            raise InvalidInputError(
                f"masked_text must contain exactly one {MASK_SENTINEL!r}: {self.masked_text!r}"
            )
        if self.top_k < 1:
            raise InvalidInputError(f"top_k must be positive, got {self.top_k}")


@dataclass(frozen=True)
class CandidateRecord:
    request_id: str
    candidates: ReplacementSet
    provider: str
    model_name: str


def _parse_candidates(raw, where: str) -> list[tuple[str, float]]:
    if not isinstance(raw, list):
        raise ValueError(f"{where}: 'candidates' must be an array")
    out = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or "word" not in entry or "p" not in entry:
            raise ValueError(f"{where}: candidate {i} must be an object with 'word' and 'p'")
        word, p = entry["word"], entry["p"]
        if not isinstance(word, str) or not word:
            raise ValueError(f"{where}: candidate {i} has invalid word {word!r}")
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not math.isfinite(p):
            raise ValueError(f"{where}: candidate {i} has non-numeric p")
        if p < 0:
            raise ValueError(f"{where}: candidate {i} has negative probability {p}")
        out.append((word, float(p)))
    total = sum(p for _, p in out)
    if total > 1.0 + PROB_SUM_SLACK:
        raise ValueError(f"{where}: probabilities sum to {total}, above 1 + {PROB_SUM_SLACK}")
    return out


class FixtureProvider:
    """Replays candidate records from a JSONL fixture file.

    Lookups are exact-match on request_id.  A duplicated id keeps the
    last record and logs a warning.  Immutable after load.
    """

    name = "fixture"

    def __init__(self, path: str):
        self.path = path
        self._records: dict[str, tuple[str, ReplacementSet]] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FixtureParseError(
                        f"line {line_no}: invalid JSON ({exc.msg})", line_no=line_no
                    ) from None
                try:
                    if not isinstance(obj, dict):
                        raise ValueError("record must be an object")
                    request_id = obj["request_id"]
                    model_name = obj["model_name"]
                    obj["masked_text"]
                    if not isinstance(request_id, str) or not isinstance(model_name, str):
                        raise ValueError("request_id and model_name must be strings")
                    pairs = _parse_candidates(obj["candidates"], "candidates")
                except (KeyError, ValueError) as exc:
                    msg = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
                    raise FixtureParseError(
                        f"line {line_no}: {msg}", line_no=line_no
                    ) from None
                if request_id in self._records:
                    logger.warning(
                        "duplicate fixture record for %r at line %d: last one wins",
                        request_id,
                        line_no,
                    )
                self._records[request_id] = (model_name, ReplacementSet.from_pairs(pairs))

    def __len__(self) -> int:
        return len(self._records)

    def get(self, request: CandidateRequest) -> CandidateRecord:
        try:
            model_name, candidates = self._records[request.request_id]
        except KeyError:
            raise MissingFixtureError(
                f"no fixture record for request id {request.request_id!r} in {self.path}"
            ) from None
        return CandidateRecord(
            request_id=request.request_id,
            candidates=candidates.truncated(request.top_k),
            provider=self.name,
            model_name=model_name,
        )


class HttpProvider:
    """Queries a fill-mask endpoint speaking the wire protocol above.

    Transport failures are retried (``retries`` extra attempts, 5xx
    included); protocol violations fail immediately.  In-flight requests
    are bounded by ``max_in_flight`` and responses are memoized by
    (request_id, top_k) for the life of the provider.
    """

    name = "http"

    def __init__(
        self,
        base_url: str,
        timeout: float = 10.0,
        retries: int = 2,
        max_in_flight: int = 4,
        backoff: float = 0.1,
    ):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self._gate = threading.BoundedSemaphore(max_in_flight)
        self._cache: dict[tuple[str, int], CandidateRecord] = {}
        self._cache_lock = threading.Lock()

    def get(self, request: CandidateRequest) -> CandidateRecord:
        key = (request.request_id, request.top_k)
        with self._cache_lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        record = self._fetch(request)
        with self._cache_lock:
            self._cache[key] = record
        return record

    def _fetch(self, request: CandidateRequest) -> CandidateRecord:
        url = f"{self.base_url}/fill"
        body = {"masked_text": request.masked_text, "top_k": request.top_k}
        last_exc: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt and self.backoff:
                time.sleep(self.backoff * attempt)
            try:
                with self._gate:
                    resp = requests.post(url, json=body, timeout=self.timeout)
            except requests.RequestException as exc:
                last_exc = exc
                logger.warning("attempt %d against %s failed: %s", attempt + 1, url, exc)
                continue
            if resp.status_code >= 500:
                last_exc = RemoteError(
                    f"server error {resp.status_code} from {url}", status=resp.status_code
                )
                logger.warning("attempt %d against %s: status %d", attempt + 1, url, resp.status_code)
                continue
            if resp.status_code != 200:
                raise RemoteError(
                    f"status {resp.status_code} from {url}", status=resp.status_code
                )
            return self._validate(request, resp)
        if isinstance(last_exc, RemoteError):
            raise last_exc
        raise TransportError(
            f"{url} unreachable after {self.retries + 1} attempts: {last_exc}"
        )

    def _validate(self, request: CandidateRequest, resp) -> CandidateRecord:
        try:
            payload = resp.json()
        except ValueError:
            raise ProtocolError("response body is not valid JSON") from None
        if not isinstance(payload, dict) or "model_name" not in payload or "candidates" not in payload:
            raise ProtocolError("response must carry 'model_name' and 'candidates'")
        model_name = payload["model_name"]
        if not isinstance(model_name, str):
            raise ProtocolError("'model_name' must be a string")
        try:
            pairs = _parse_candidates(payload["candidates"], "response")
        except ValueError as exc:
            raise ProtocolError(str(exc)) from None
        probs = [p for _, p in pairs]
        if any(probs[i] < probs[i + 1] for i in range(len(probs) - 1)):
            raise ProtocolError("candidates are not sorted by descending p")
        return CandidateRecord(
            request_id=request.request_id,
            candidates=ReplacementSet.from_pairs(pairs).truncated(request.top_k),
            provider=self.name,
            model_name=model_name,
        )


def write_fixture_record(
    sink: IO[str],
    request_id: str,
    masked_text: str,
    model_name: str,
    candidates: Iterable[tuple[str, float]],
) -> None:
    """Append one record in the fixture schema; field names are fixed."""
    record = {
        "request_id": request_id,
        "masked_text": masked_text,
        "model_name": model_name,
        "candidates": [{"word": w, "p": p} for w, p in candidates],
    }
    sink.write(json.dumps(record, ensure_ascii=True, sort_keys=True))
    sink.write("\n")
