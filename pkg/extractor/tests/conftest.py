"""Shared fixtures: a tiny randomly-initialized RoBERTa built offline.

The weights are meaningless (candidates are arbitrary vocabulary
tokens); what the tests need is a real fill-mask pipeline with a real
BPE tokenizer, deterministic outputs, and no network access.
"""

import os

import pytest

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")
os.environ.setdefault("TOKENIZERS_PARALLELISM", "false")

CORPUS = [
    "the cat sat on the mat",
    "dogs have tails and ears",
    "she eats some oranges every day",
    "he filled the bottle with water",
    "birds fly over the green trees",
    "people like warm bread and milk",
    "a child plays in the park",
    "rivers flow into the wide sea",
] * 10


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory) -> str:
    import torch
    from tokenizers import ByteLevelBPETokenizer
    from tokenizers.processors import RobertaProcessing
    from transformers import PreTrainedTokenizerFast, RobertaConfig, RobertaForMaskedLM

    root = tmp_path_factory.mktemp("tiny_roberta")
    corpus_path = root / "corpus.txt"
    corpus_path.write_text("\n".join(CORPUS), encoding="utf-8")

    bpe = ByteLevelBPETokenizer()
    bpe.train(
        [str(corpus_path)], vocab_size=800, min_frequency=1,
        special_tokens=["<s>", "<pad>", "</s>", "<unk>", "<mask>"],
    )
    bpe._tokenizer.post_processor = RobertaProcessing(
        sep=("</s>", bpe.token_to_id("</s>")), cls=("<s>", bpe.token_to_id("<s>")),
    )
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=bpe._tokenizer,
        bos_token="<s>", eos_token="</s>", unk_token="<unk>", pad_token="<pad>",
        mask_token="<mask>", cls_token="<s>", sep_token="</s>",
        model_max_length=64,
    )
    torch.manual_seed(1234)
    config = RobertaConfig(
        vocab_size=bpe.get_vocab_size(), hidden_size=32, num_hidden_layers=1,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=130,
        pad_token_id=1, bos_token_id=0, eos_token_id=2,
    )
    model = RobertaForMaskedLM(config)
    model_dir = root / "model"
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return str(model_dir)


@pytest.fixture(scope="session")
def tiny_model(tiny_model_dir):
    from cs_probe_extractor.fillmask import FillMaskModel

    return FillMaskModel(tiny_model_dir, device=-1)
