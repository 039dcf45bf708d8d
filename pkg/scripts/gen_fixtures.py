#!/usr/bin/env python3
"""Regenerate the bundled test fixtures and golden artifacts.

Everything here is deterministic: word vectors and candidate sets derive
from sha256 hashes, and the golden artifacts are produced by the same
pipeline the CLI runs.  The golden *numbers* are independently verified
against brute-force formula transcriptions in the test suite; this
script only fixes the bytes.

Run from anywhere:  python3 scripts/gen_fixtures.py
"""

import hashlib
import json
import math
import os
import shutil
from pathlib import Path

import numpy as np

from cs_probe.cloze import (
    build_cloze_tests,
    default_stopwords,
    encode_pair,
    load_pair_dataset,
    load_sentence_dataset,
)
from cs_probe.cloze import ChoicePair
from cs_probe.pipeline import RunConfig, run_cloze_eval, run_confidence_eval

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

MODEL_NAME = "toy-lm-v1"

SENTENCES = [
    ("s01", "The farmer plants corn in spring ."),
    ("s02", "Dogs wag their tails when happy ."),
    ("s03", "She pours coffee into a cup ."),
    ("s04", "The librarian shelves books quietly ."),
    ("s05", "Children build castles from sand ."),
    ("s06", "A blacksmith hammers hot metal ."),
    ("s07", "The owl hunts mice at night ."),
    ("s08", "Rain fills the barrel behind the shed ."),
    ("s09", "It is only what it is ."),
    ("s10", "The zeppelin drifted over the harbor ."),
]

PAIRS = [
    ("q01", "He fills the bottle with water .", "He fills the bottle with pebbles .", "a"),
    ("q02", "She reads a book in the library .", "She reads a volcano in the library .", "a"),
    ("q03", "Cows eat gravel in the meadow .", "Cows eat grass in the meadow .", "b"),
    ("q04", "The chef bakes bread in the oven .", "The chef bakes bread in the fridge .", "a"),
    ("q05", "People sleep on beds at night .", "People sleep on nails at night .", "a"),
    ("q06", "The boy drinks milk from a glass .", "The boy drinks sand from a glass .", "a"),
    ("q07", "Fish swim in the toaster .", "Fish swim in the ocean .", "b"),
    ("q08", "She plants flowers in the garden .", "She plants flowers in the quasar .", "a"),
    ("q09", "Birds fly with their wings .", "Birds fly with their anchors .", "a"),
    ("q10", "The sun rises in the east .", "The sun is rising in the east .", "a"),
    ("q11", "A clock hangs on the wall .", "A clock hangs on the wall .", "a"),
    ("q12", "Green apples taste sour .", "Ripe bananas taste sweet .", "a"),
]

# words deliberately left out of the embedding table
OOV_WORDS = {"zeppelin", "quasar"}

EXTRA_VOCAB = [
    "water", "juice", "tea", "soup", "rain", "wine", "syrup",
    "pebbles", "stones", "rocks", "bricks", "dust", "clay",
    "wheat", "barley", "beans", "grapes", "apples", "bananas",
    "hammer", "anvil", "forge", "iron", "steel", "copper",
    "bed", "pillow", "blanket", "nest", "burrow", "den",
    "reads", "writes", "sings", "draws", "paints", "carves",
    "meadow", "field", "valley", "forest", "river", "pond",
    "wings", "feathers", "claws", "paws", "fins", "scales",
]

# request ids with a deliberately unusable candidate list
ALL_OOV_REQUEST = "s06:3"
NEARLY_ALL_OOV_REQUEST = "q09"


def word_rng(word: str, salt: str = "") -> np.random.Generator:
    digest = hashlib.sha256(f"{salt}:{word}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def vector_for(word: str) -> tuple[float, float]:
    rng = word_rng(word, salt="vec")
    theta = rng.uniform(0.0, 2.0 * math.pi)
    radius = rng.uniform(0.5, 1.5)
    return (round(radius * math.cos(theta), 4), round(radius * math.sin(theta), 4))


def build_vocabulary() -> dict[str, tuple[float, float]]:
    words: set[str] = set(EXTRA_VOCAB)
    for _, text in SENTENCES:
        words.update(tok.lower() for tok in text.split() if tok not in {".", ","})
    for _, a, b, _ in PAIRS:
        words.update(tok.lower() for tok in (a + " " + b).split() if tok not in {".", ","})
    words -= OOV_WORDS
    return {w: vector_for(w) for w in sorted(words)}


def pick_candidates(
    vocab: dict[str, tuple[float, float]],
    anchor: tuple[float, float],
    request_id: str,
    n: int,
) -> list[tuple[str, float]]:
    """Thematically plausible candidates: vocabulary ranked by noisy
    cosine similarity to the anchor vector."""
    rng = word_rng(request_id, salt="cand")
    ax, ay = anchor
    an = math.hypot(ax, ay)
    scored = []
    for word, (x, y) in vocab.items():
        cos = (ax * x + ay * y) / (an * math.hypot(x, y))
        scored.append((cos + rng.normal(0.0, 0.35), word))
    scored.sort(reverse=True)
    chosen = [w for _, w in scored[:n]]
    if int(hashlib.sha256(request_id.encode()).hexdigest(), 16) % 4 == 0:
        chosen[-1] = f"oovword_{request_id.replace(':', '_')}"
    probs = np.sort(rng.uniform(0.05, 0.95, size=n))[::-1]
    probs = probs / probs.sum() * 0.75
    return list(zip(chosen, [float(p) for p in probs]))


def fixture_line(request_id: str, masked_text: str, candidates) -> str:
    return json.dumps(
        {
            "request_id": request_id,
            "masked_text": masked_text,
            "model_name": MODEL_NAME,
            "candidates": [{"word": w, "p": p} for w, p in candidates],
        },
        sort_keys=True,
    )


def write_inputs(vocab) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with open(FIXTURES / "embeddings_2d.txt", "w", encoding="utf-8", newline="\n") as fh:
        for word, (x, y) in vocab.items():
            fh.write(f"{word} {x} {y}\n")
    with open(FIXTURES / "sentences_10.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for sid, text in SENTENCES:
            fh.write(f"{sid}\t{text}\n")
    with open(FIXTURES / "pairs_12.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for pid, a, b, gold in PAIRS:
            fh.write(f"{pid}\t{a}\t{b}\t{gold}\n")


def write_candidate_fixtures(vocab) -> None:
    stopwords = default_stopwords()
    lines = []
    for sentence in load_sentence_dataset(str(FIXTURES / "sentences_10.tsv")):
        for item in build_cloze_tests(sentence, stopwords):
            rid = item.request_id
            if rid == ALL_OOV_REQUEST:
                cands = [(f"xq{i}", round(0.2 - 0.03 * i, 4)) for i in range(5)]
            else:
                anchor = vocab.get(item.original.lower(), (1.0, 0.0))
                cands = pick_candidates(vocab, anchor, rid, n=5)
            lines.append(fixture_line(rid, item.masked_text(), cands))
    with open(FIXTURES / "sentence_candidates.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

    lines = []
    for pid, sa, sb, gold in load_pair_dataset(str(FIXTURES / "pairs_12.tsv")):
        encoded = encode_pair(sa, sb, gold)
        if not isinstance(encoded, ChoicePair):
            continue
        if pid == NEARLY_ALL_OOV_REQUEST:
            cands = [(f"yq{i}", round(0.15 - 0.01 * i, 4)) for i in range(7)]
            cands.append(("wings", 0.05))
        else:
            anchor = vocab.get(
                encoded.choice_a.lower(), vocab.get(encoded.choice_b.lower(), (1.0, 0.0))
            )
            cands = pick_candidates(vocab, anchor, pid, n=8)
        lines.append(fixture_line(pid, encoded.masked_text(), cands))
    with open(FIXTURES / "pair_candidates.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def regenerate_goldens() -> None:
    golden = FIXTURES / "golden"
    if golden.exists():
        shutil.rmtree(golden)
    cwd = os.getcwd()
    os.chdir(FIXTURES)  # golden config echoes use these relative paths
    try:
        run_cloze_eval(
            RunConfig(
                embeddings="embeddings_2d.txt",
                dataset="sentences_10.tsv",
                fixture="sentence_candidates.jsonl",
                out=str(golden / "cloze"),
            )
        )
        run_confidence_eval(
            RunConfig(
                embeddings="embeddings_2d.txt",
                dataset="pairs_12.tsv",
                fixture="pair_candidates.jsonl",
                out=str(golden / "confidence"),
            )
        )
    finally:
        os.chdir(cwd)


def main() -> None:
    vocab = build_vocabulary()
    write_inputs(vocab)
    write_candidate_fixtures(vocab)
    regenerate_goldens()
    summary = json.loads((FIXTURES / "golden" / "confidence" / "summary.json").read_text())
    print("confidence counts:", json.dumps(summary["counts"], sort_keys=True))
    print("accuracy:", summary["accuracy"])
    cloze = json.loads((FIXTURES / "golden" / "cloze" / "summary.json").read_text())
    print("cloze counts:", json.dumps(cloze["counts"], sort_keys=True))
    print("correlations:", json.dumps(cloze["correlations"]))


if __name__ == "__main__":
    main()
