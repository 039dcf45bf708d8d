"""Candidate token cleanup.

Fill-mask pipelines emit raw vocabulary pieces: leading-space BPE
tokens, SentencePiece/WordPiece fragments, punctuation, digits.  The
downstream metrics are word-level, so only single clean alphabetic
words (contractions included) survive; everything else is dropped and
the next-ranked candidate is promoted.  Cleanup never reorders the
surviving candidates relative to model rank and never touches the
probabilities.
"""

from __future__ import annotations

import re

_MARKERS = ("Ġ", "▁", "##")  # BPE space, SentencePiece, WordPiece
_WORD = re.compile(r"[A-Za-z]+(?:['’][A-Za-z]+)*\Z")


def clean_token(raw: str) -> str | None:
    """Normalized word form of a raw candidate, or None to drop it."""
    tok = raw.strip()
    for marker in _MARKERS:
        while tok.startswith(marker):
            tok = tok[len(marker):]
    tok = tok.strip()
    if not tok or any(ch.isspace() for ch in tok):
        return None
    if not _WORD.match(tok):
        return None
    return tok


def clean_candidates(
    ranked: list[tuple[str, float]], top_k: int
) -> list[tuple[str, float]]:
    """First ``top_k`` rank-order survivors of the raw candidate list.

    Duplicate surface forms after cleanup keep only their best-ranked
    occurrence.
    """
    out: list[tuple[str, float]] = []
    seen: set[str] = set()
    for raw, p in ranked:
        word = clean_token(raw)
        if word is None or word in seen:
            continue
        seen.add(word)
        out.append((word, p))
        if len(out) == top_k:
            break
    return out
