"""Replacement-set dispersion metrics.

For a masked position, the LM proposes a replacement set of (word,
probability) candidates.  Four scores characterize it in embedding
space:

* ``accuracy``   - mean cosine similarity of the replacements to the
  original word (how close the answers are to the truth);
* ``precision``  - mean cosine similarity of the replacements to their
  own mean vector (how tight the answer set is);
* ``weighted_*`` - the same sums with the uniform 1/k weight replaced by
  the LM's probabilities, renormalized over in-vocabulary replacements.

Out-of-vocabulary replacements are skipped and counted, never scored as
zero: silent zeros would bias the means downward unaccountably.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from cs_probe import _kernels
from cs_probe.cloze import ClozeItem
from cs_probe.embeddings import EmbeddingTable
from cs_probe.errors import (
    DegenerateVectorError,
    EmptyInputError,
    InvalidInputError,
    NoUsableReplacementsError,
    OriginalOovError,
    ZeroMassError,
)

PROB_SUM_SLACK = 1e-6


@dataclass(frozen=True)
class ReplacementSet:
    """Top-k LM candidates for one mask, in canonical order.

    Canonical order is descending probability with ties broken by token;
    it makes every downstream computation independent of provider order.
    """

    items: tuple[tuple[str, float], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, float]]) -> "ReplacementSet":
        items = []
        total = 0.0
        for word, p in pairs:
            if not isinstance(word, str) or not word:
                raise InvalidInputError(f"replacement word must be a nonempty string, got {word!r}")
            p = float(p)
            if not math.isfinite(p) or p < 0.0:
                raise InvalidInputError(f"replacement probability must be finite and >= 0, got {p!r}")
            total += p
            items.append((word, p))
        if total > 1.0 + PROB_SUM_SLACK:
            raise InvalidInputError(f"replacement probabilities sum to {total}, above 1 + {PROB_SUM_SLACK}")
        items.sort(key=lambda it: (-it[1], it[0]))
        return cls(items=tuple(items))

    @property
    def k(self) -> int:
        return len(self.items)

    def truncated(self, top_k: int) -> "ReplacementSet":
        return ReplacementSet(items=self.items[:top_k])


@dataclass(frozen=True)
class DispersionScores:
    """The four per-mask scores plus OOV accounting.

    A score is None when undefined for this mask (reason in ``notes``):
    accuracy needs the original in vocabulary, the weighted variants
    need nonzero in-vocabulary probability mass.
    """

    acc: float | None
    prec: float | None
    w_acc: float | None
    w_prec: float | None
    used: int
    oov: int
    notes: dict = field(default_factory=dict)

    FIELDS = ("acc", "prec", "w_acc", "w_prec")


@dataclass(frozen=True)
class SentenceReport:
    sentence_id: str
    length: int
    per_mask: tuple[tuple[int, DispersionScores], ...]
    failed: tuple[tuple[int, str], ...]
    means: dict

    @property
    def n_masks(self) -> int:
        return len(self.per_mask) + len(self.failed)


def _split_in_vocab(r: ReplacementSet, table: EmbeddingTable):
    """Partition replacements into in-vocabulary (words, probs, vectors) and an OOV count."""
    if r.k == 0:
        raise EmptyInputError("replacement set is empty")
    words, probs, vecs = [], [], []
    oov = 0
    for word, p in r.items:
        vec = table.lookup(word)
        if vec is None:
            oov += 1
        else:
            words.append(word)
            probs.append(p)
            vecs.append(vec)
    if not words:
        raise NoUsableReplacementsError("every replacement is out of vocabulary")
    return words, np.array(probs, dtype=np.float64), np.stack(vecs), oov


def _renormalized(probs: np.ndarray) -> np.ndarray:
    mass = float(probs.sum())
    if mass <= 0.0:
        raise ZeroMassError("in-vocabulary replacements have zero probability mass")
    return probs / mass


def _original_vector(original: str, table: EmbeddingTable) -> np.ndarray:
    vec = table.lookup(original)
    if vec is None:
        raise OriginalOovError(f"original word {original!r} has no embedding")
    return vec


def _cosines(vecs: np.ndarray, target: np.ndarray) -> np.ndarray:
    try:
        return _kernels.cosines_to(vecs, target)
    except ValueError as exc:
        raise DegenerateVectorError(str(exc)) from None


def accuracy(r: ReplacementSet, original: str, table: EmbeddingTable) -> tuple[float, int, int]:
    """Mean similarity of in-vocabulary replacements to the original word."""
    target = _original_vector(original, table)
    _, _, vecs, oov = _split_in_vocab(r, table)
    sims = _cosines(vecs, target)
    return float(sims.mean()), len(vecs), oov


def precision(r: ReplacementSet, table: EmbeddingTable) -> tuple[float, int, int]:
    """Mean similarity of in-vocabulary replacements to their mean vector."""
    _, _, vecs, oov = _split_in_vocab(r, table)
    center = _kernels.mean_rows(vecs)
    sims = _cosines(vecs, center)
    return float(sims.mean()), len(vecs), oov


def weighted_accuracy(r: ReplacementSet, original: str, table: EmbeddingTable) -> tuple[float, int, int]:
    """Accuracy with renormalized LM probabilities as weights."""
    target = _original_vector(original, table)
    _, probs, vecs, oov = _split_in_vocab(r, table)
    w = _renormalized(probs)
    sims = _cosines(vecs, target)
    return float(np.dot(w, sims)), len(vecs), oov


def weighted_precision(r: ReplacementSet, table: EmbeddingTable) -> tuple[float, int, int]:
    """Precision with probability weights and a probability-weighted mean vector."""
    _, probs, vecs, oov = _split_in_vocab(r, table)
    w = _renormalized(probs)
    center = _kernels.weighted_mean_rows(vecs, w)
    sims = _cosines(vecs, center)
    return float(np.dot(w, sims)), len(vecs), oov


def score_replacements(r: ReplacementSet, original: str, table: EmbeddingTable) -> DispersionScores:
    """All four scores for one mask, capturing per-score failures.

    Raises only when no replacement is usable at all; individual scores
    degrade to None with a reason in ``notes``.
    """
    _, probs, vecs, oov = _split_in_vocab(r, table)
    used = len(vecs)
    scores: dict[str, float | None] = {}
    notes: dict[str, str] = {}

    target = table.lookup(original)
    if target is None:
        scores["acc"] = scores["w_acc"] = None
        notes["acc"] = notes["w_acc"] = "original_oov"
        sims_orig = None
    else:
        try:
            sims_orig = _cosines(vecs, target)
            scores["acc"] = float(sims_orig.mean())
        except DegenerateVectorError:
            scores["acc"] = scores["w_acc"] = None
            notes["acc"] = notes["w_acc"] = "degenerate_vector"
            sims_orig = None

    try:
        center = _kernels.mean_rows(vecs)
        sims_center = _cosines(vecs, center)
        scores["prec"] = float(sims_center.mean())
    except (DegenerateVectorError, ValueError):
        scores["prec"] = None
        notes["prec"] = "degenerate_vector"

    try:
        w = _renormalized(probs)
    except ZeroMassError:
        scores["w_acc"] = scores["w_prec"] = None
        notes["w_acc"] = notes["w_prec"] = "zero_mass"
        w = None
    if w is not None:
        if sims_orig is not None:
            scores["w_acc"] = float(np.dot(w, sims_orig))
        try:
            wcenter = _kernels.weighted_mean_rows(vecs, w)
            scores["w_prec"] = float(np.dot(w, _cosines(vecs, wcenter)))
        except (DegenerateVectorError, ValueError):
            scores["w_prec"] = None
            notes["w_prec"] = "degenerate_vector"

    return DispersionScores(
        acc=scores.get("acc"),
        prec=scores.get("prec"),
        w_acc=scores.get("w_acc"),
        w_prec=scores.get("w_prec"),
        used=used,
        oov=oov,
        notes=notes,
    )


def score_sentence(
    items: Sequence[tuple[ClozeItem, ReplacementSet]],
    table: EmbeddingTable,
    length: int | None = None,
    sentence_id: str | None = None,
) -> SentenceReport:
    """Per-mask scores plus the four across-mask means for one sentence.

    Masks that fail outright (no usable replacement) are excluded from
    the means and listed with their error.  Each mean averages over the
    masks where that particular score is defined.
    """
    if sentence_id is None:
        sentence_id = items[0][0].sentence_id if items else ""
    if any(item.sentence_id != sentence_id for item, _ in items):
        raise InvalidInputError("items span multiple sentence ids")
    if length is None:
        length = len(items[0][0].masked_tokens) if items else 0

    per_mask: list[tuple[int, DispersionScores]] = []
    failed: list[tuple[int, str]] = []
    for item, r in items:
        try:
            per_mask.append((item.mask_index, score_replacements(r, item.original, table)))
        except (EmptyInputError, NoUsableReplacementsError) as exc:
            failed.append((item.mask_index, type(exc).__name__))

    means: dict[str, float | None] = {}
    for name in DispersionScores.FIELDS:
        values = [getattr(s, name) for _, s in per_mask if getattr(s, name) is not None]
        means[name] = float(np.mean(values)) if values else None
    return SentenceReport(
        sentence_id=sentence_id,
        length=length,
        per_mask=tuple(per_mask),
        failed=tuple(failed),
        means=means,
    )
