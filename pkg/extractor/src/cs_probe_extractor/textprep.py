"""Dataset-side text preparation.

This package talks to cs-probe only through its file formats, so the
masked texts and request ids written here must come out of the same
documented rules the evaluator applies:

* whitespace-and-punctuation tokenization, every punctuation mark its
  own token, except an apostrophe between word characters (contractions
  stay whole);
* a cloze request for every token that is neither a stopword nor pure
  punctuation, with request id ``<sentence_id>:<token_index>``;
* a pair request when the two sentences have equal length and differ at
  exactly one token, with request id ``<pair_id>``.

Masked texts join tokens with single spaces and use the ``<mask>``
sentinel.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from importlib import resources

MASK = "<mask>"

_APOSTROPHES = {"'", "’"}


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or unicodedata.category(ch).startswith("M")


def tokenize(raw: str) -> list[str]:
    tokens: list[str] = []
    buf: list[str] = []
    n = len(raw)
    for i, ch in enumerate(raw):
        if ch.isspace():
            if buf:
                tokens.append("".join(buf))
                buf = []
        elif _is_word_char(ch):
            buf.append(ch)
        elif ch in _APOSTROPHES and buf and i + 1 < n and _is_word_char(raw[i + 1]):
            buf.append(ch)
        else:
            if buf:
                tokens.append("".join(buf))
                buf = []
            tokens.append(ch)
    if buf:
        tokens.append("".join(buf))
    return tokens


def is_punctuation(token: str) -> bool:
    return bool(token) and all(
        unicodedata.category(ch).startswith("P") for ch in token
    )


def default_stopwords() -> frozenset[str]:
    text = resources.files("cs_probe_extractor.data").joinpath("stopwords.txt")
    return load_stopwords(text.read_text("utf-8").splitlines())


def load_stopwords(lines) -> frozenset[str]:
    return frozenset(tok.strip().lower() for tok in lines if tok.strip())


@dataclass(frozen=True)
class MaskRequest:
    request_id: str
    masked_text: str


def cloze_requests(sentence_id: str, text: str, stopwords: frozenset[str]) -> list[MaskRequest]:
    tokens = tokenize(text)
    requests = []
    for i, tok in enumerate(tokens):
        if tok == MASK or is_punctuation(tok) or tok.lower() in stopwords:
            continue
        masked = tokens.copy()
        masked[i] = MASK
        requests.append(MaskRequest(f"{sentence_id}:{i}", " ".join(masked)))
    return requests


def pair_request(pair_id: str, text_a: str, text_b: str) -> MaskRequest | None:
    """Shared masked template, or None when the pair is not encodable."""
    ta, tb = tokenize(text_a), tokenize(text_b)
    if len(ta) != len(tb):
        return None
    diffs = [i for i, (x, y) in enumerate(zip(ta, tb)) if x != y]
    if len(diffs) != 1:
        return None
    masked = ta.copy()
    masked[diffs[0]] = MASK
    return MaskRequest(pair_id, " ".join(masked))


def read_tsv(path: str) -> list[list[str]]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 4):
                raise ValueError(
                    f"{path}:{line_no}: expected 2 (sentence) or 4 (pair) fields, "
                    f"found {len(fields)}"
                )
            records.append(fields)
    return records


def dataset_requests(path: str, stopwords: frozenset[str]) -> tuple[list[MaskRequest], dict]:
    """All mask requests of a dataset file, sniffing sentences vs pairs.

    Returns the requests plus counts of skipped (non-encodable) records.
    """
    records = read_tsv(path)
    requests: list[MaskRequest] = []
    stats = {"records": len(records), "not_encodable": 0}
    for fields in records:
        if len(fields) == 2:
            requests.extend(cloze_requests(fields[0], fields[1], stopwords))
        else:
            req = pair_request(fields[0], fields[1], fields[2])
            if req is None:
                stats["not_encodable"] += 1
            else:
                requests.append(req)
    return requests, stats
