import numpy as np
import pytest

from cs_probe.embeddings import EmbeddingTable


@pytest.fixture
def toy_table() -> EmbeddingTable:
    """Small 2-D table used across metric tests."""
    return EmbeddingTable.from_vectors(
        2,
        {
            "east": [1.0, 0.0],
            "north": [0.0, 1.0],
            "west": [-1.0, 0.0],
            "south": [0.0, -1.0],
            "northeast": [1.0, 1.0],
            "near_east": [0.9, 0.1],
            "far_east": [2.0, 0.0],
            "origin": [0.0, 0.0],
        },
    )


def random_table(rng: np.random.Generator, dim: int, n_words: int, prefix: str = "w"):
    """Synthetic table of unit-scale random vectors named w0..wN."""
    vectors = {}
    for i in range(n_words):
        v = rng.normal(size=dim)
        while not np.any(v):
            v = rng.normal(size=dim)
        vectors[f"{prefix}{i}"] = v
    return EmbeddingTable.from_vectors(dim, vectors)
