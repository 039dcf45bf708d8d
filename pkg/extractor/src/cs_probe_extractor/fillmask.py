"""Thin wrapper around a transformers fill-mask pipeline."""

from __future__ import annotations

import logging

logger = logging.getLogger(__name__)

MASK = "<mask>"

DEFAULT_MODEL = "roberta-large"

# ask for more raw candidates than needed so cleanup can promote
OVERSAMPLE_FACTOR = 4
OVERSAMPLE_PAD = 10


class FillMaskModel:
    """One loaded masked LM exposing ranked (token, probability) lists."""

    def __init__(self, model_name_or_path: str = DEFAULT_MODEL, device: str | int = -1):
        from transformers import pipeline  # heavyweight; imported on use

        self._pipe = pipeline(
            "fill-mask", model=model_name_or_path, tokenizer=model_name_or_path,
            device=device,
        )
        revision = getattr(self._pipe.model.config, "_commit_hash", None)
        self.model_name = f"{model_name_or_path}@{revision or 'local'}"
        self.mask_token = self._pipe.tokenizer.mask_token
        self.vocab_size = self._pipe.tokenizer.vocab_size

    def propose(self, masked_text: str, top_k: int) -> list[tuple[str, float]]:
        """Raw ranked candidates for the single masked slot.

        ``masked_text`` uses the ``<mask>`` sentinel; translation to the
        model's own mask token happens here.
        """
        if masked_text.count(MASK) != 1:
            raise ValueError(f"masked_text must contain exactly one {MASK!r}")
        text = masked_text.replace(MASK, self.mask_token)
        top_k = min(top_k, self.vocab_size)
        results = self._pipe(text, top_k=top_k)
        return [(r["token_str"], float(r["score"])) for r in results]

    def propose_clean(self, masked_text: str, top_k: int) -> list[tuple[str, float]]:
        """Cleaned candidates: raw pool oversampled, fragments dropped,
        next ranks promoted until ``top_k`` clean words or exhaustion."""
        from cs_probe_extractor.cleanup import clean_candidates

        raw_k = min(top_k * OVERSAMPLE_FACTOR + OVERSAMPLE_PAD, self.vocab_size)
        return clean_candidates(self.propose(masked_text, raw_k), top_k)
