"""Cloze-test construction and two-sentence choice-pair encoding.

Sentences are tokenized by a whitespace-and-punctuation rule: every
punctuation mark becomes its own token, except an apostrophe between two
word characters, which keeps contractions whole.  A cloze test is built
for every token that is neither a stopword nor pure punctuation; a
choice pair is encodable iff the two sentences have equal length and
differ at exactly one position.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources
from typing import IO, Iterable

from cs_probe.errors import DatasetParseError, EmptyInputError, InvalidInputError

MASK = "<mask>"

_APOSTROPHES = {"'", "’"}


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or unicodedata.category(ch).startswith("M")


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[str, ...]
    raw: str


@dataclass(frozen=True)
class ClozeItem:
    """One masked sentence: token ``mask_index`` replaced by the sentinel."""

    sentence_id: str
    mask_index: int
    original: str
    masked_tokens: tuple[str, ...]

    @property
    def request_id(self) -> str:
        return f"{self.sentence_id}:{self.mask_index}"

    def masked_text(self) -> str:
        return " ".join(self.masked_tokens)

    def unmasked_tokens(self) -> tuple[str, ...]:
        toks = list(self.masked_tokens)
        toks[self.mask_index] = self.original
        return tuple(toks)


@dataclass(frozen=True)
class ChoicePair:
    """Two sentences sharing one masked template, differing in one token."""

    id: str
    shared_masked_tokens: tuple[str, ...]
    diff_index: int
    choice_a: str
    choice_b: str
    gold: str  # "a" | "b"

    def masked_text(self) -> str:
        return " ".join(self.shared_masked_tokens)


@dataclass(frozen=True)
class NotEncodable:
    """Why a sentence pair cannot share a masked template."""

    id: str
    reason: str  # length_mismatch | multi_token_diff | zero_diff


def tokenize(raw: str, sentence_id: str = "") -> Sentence:
    """Split text into word and punctuation tokens.

    Raises :class:`EmptyInputError` on blank input.
    """
    if raw is None or not raw.strip():
        raise EmptyInputError("cannot tokenize empty text")
    tokens: list[str] = []
    buf: list[str] = []
    chars = raw
    n = len(chars)
    for i, ch in enumerate(chars):
        if ch.isspace():
            if buf:
                tokens.append("".join(buf))
                buf = []
        elif _is_word_char(ch):
            buf.append(ch)
        elif ch in _APOSTROPHES and buf and i + 1 < n and _is_word_char(chars[i + 1]):
            buf.append(ch)  # contraction interior: keep "he's" whole
        else:
            if buf:
                tokens.append("".join(buf))
                buf = []
            tokens.append(ch)
    if buf:
        tokens.append("".join(buf))
    return Sentence(id=sentence_id, tokens=tuple(tokens), raw=raw)


def is_punctuation(token: str) -> bool:
    """True when every character of the token is Unicode punctuation."""
    return bool(token) and all(
        unicodedata.category(ch).startswith("P") for ch in token
    )


def load_stopwords(source: IO[str] | Iterable[str]) -> frozenset[str]:
    """One token per line, case-folded; blank lines ignored."""
    words = set()
    for line in source:
        tok = line.strip()
        if tok:
            words.add(tok.lower())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    """The bundled English function-word list (~150 entries)."""
    text = resources.files("cs_probe.data").joinpath("stopwords.txt").read_text("utf-8")
    return load_stopwords(text.splitlines())


def build_cloze_tests(sentence: Sentence, stopwords: frozenset[str]) -> list[ClozeItem]:
    """One ClozeItem per token that is neither a stopword nor punctuation.

    Order follows token order; the list may be empty.
    """
    items = []
    for i, tok in enumerate(sentence.tokens):
        if tok == MASK or is_punctuation(tok) or tok.lower() in stopwords:
            continue
        masked = list(sentence.tokens)
        masked[i] = MASK
        items.append(
            ClozeItem(
                sentence_id=sentence.id,
                mask_index=i,
                original=tok,
                masked_tokens=tuple(masked),
            )
        )
    return items


def encode_pair(sent_a: Sentence, sent_b: Sentence, gold: str) -> ChoicePair | NotEncodable:
    """Align two sentences into a single masked template.

    Encodable iff token counts match and exactly one position differs;
    otherwise returns :class:`NotEncodable` with the reason.
    """
    if gold not in ("a", "b"):
        raise InvalidInputError(f"gold label must be 'a' or 'b', got {gold!r}")
    pair_id = sent_a.id
    if len(sent_a.tokens) != len(sent_b.tokens):
        return NotEncodable(pair_id, "length_mismatch")
    diffs = [
        i for i, (x, y) in enumerate(zip(sent_a.tokens, sent_b.tokens)) if x != y
    ]
    if not diffs:
        return NotEncodable(pair_id, "zero_diff")
    if len(diffs) > 1:
        return NotEncodable(pair_id, "multi_token_diff")
    i = diffs[0]
    masked = list(sent_a.tokens)
    masked[i] = MASK
    return ChoicePair(
        id=pair_id,
        shared_masked_tokens=tuple(masked),
        diff_index=i,
        choice_a=sent_a.tokens[i],
        choice_b=sent_b.tokens[i],
        gold=gold,
    )


def _read_records(path: str, n_fields: int) -> list[tuple[int, list[str]]]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != n_fields:
                raise DatasetParseError(
                    f"line {line_no}: expected {n_fields} tab-separated fields, "
                    f"found {len(fields)}",
                    line_no=line_no,
                )
            records.append((line_no, fields))
    return records


def load_sentence_dataset(path: str) -> list[Sentence]:
    """Read ``id<TAB>sentence`` records; ids must be unique."""
    sentences = []
    seen: set[str] = set()
    for line_no, (sid, text) in _read_records(path, 2):
        if sid in seen:
            raise DatasetParseError(f"line {line_no}: duplicate id {sid!r}", line_no=line_no)
        seen.add(sid)
        try:
            sentences.append(tokenize(text, sentence_id=sid))
        except EmptyInputError:
            raise DatasetParseError(f"line {line_no}: blank sentence", line_no=line_no) from None
    return sentences


def load_pair_dataset(path: str) -> list[tuple[str, Sentence, Sentence, str]]:
    """Read ``id<TAB>sentence_a<TAB>sentence_b<TAB>gold`` records."""
    pairs = []
    seen: set[str] = set()
    for line_no, (pid, text_a, text_b, gold) in _read_records(path, 4):
        if pid in seen:
            raise DatasetParseError(f"line {line_no}: duplicate id {pid!r}", line_no=line_no)
        seen.add(pid)
        if gold not in ("a", "b"):
            raise DatasetParseError(
                f"line {line_no}: gold label must be 'a' or 'b', got {gold!r}",
                line_no=line_no,
            )
        try:
            sa = tokenize(text_a, sentence_id=pid)
            sb = tokenize(text_b, sentence_id=pid)
        except EmptyInputError:
            raise DatasetParseError(f"line {line_no}: blank sentence", line_no=line_no) from None
        pairs.append((pid, sa, sb, gold))
    return pairs
