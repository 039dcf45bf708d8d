"""Word-embedding table: GloVe-text loading, lookup, and vector kernels.

The table is the semantic ruler for every metric in the package: all
similarities and distances are computed in this space.  Tokens are
case-folded to lowercase at load and lookup.  Stored vectors are never
normalized; the kernels normalize on the fly, which keeps a loaded file
byte-reconstructible (see :func:`dump_embeddings`).
"""

from __future__ import annotations

import io
import math
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from cs_probe import _kernels
from cs_probe.errors import (
    DegenerateVectorError,
    DimensionMismatchError,
    EmptyInputError,
    GloveParseError,
    InvalidInputError,
)


def _as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite components")
    return arr


class EmbeddingTable:
    """Immutable word -> vector map of a fixed dimension."""

    __slots__ = ("dim", "_entries")

    def __init__(self, dim: int, entries: Mapping[str, np.ndarray]):
        if dim <= 0:
            raise InvalidInputError(f"dimension must be positive, got {dim}")
        self.dim = int(dim)
        self._entries = dict(entries)

    @classmethod
    def from_vectors(cls, dim: int, vectors: Mapping[str, Iterable[float]]) -> "EmbeddingTable":
        """Build a table from in-memory vectors (tests, synthetic fixtures)."""
        entries: dict[str, np.ndarray] = {}
        for word, v in vectors.items():
            arr = _as_vector(v, name=f"vector for {word!r}")
            if arr.shape[0] != dim:
                raise DimensionMismatchError(
                    f"vector for {word!r} has {arr.shape[0]} components, expected {dim}"
                )
            arr.setflags(write=False)
            entries.setdefault(word.lower(), arr)
        return cls(dim, entries)

    @property
    def count(self) -> int:
        return len(self._entries)

    def lookup(self, word: str) -> np.ndarray | None:
        """Vector for the case-normalized token, or None when absent."""
        return self._entries.get(word.lower())

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def tokens(self) -> Iterator[str]:
        return iter(self._entries)


def sniff_dimension(path: str) -> int:
    """Vector dimension of the first nonempty line of a GloVe text file."""
    with open(path, "rb") as fh:
        for raw in fh:
            fields = raw.decode("utf-8").split()
            if fields:
                return len(fields) - 1
    raise GloveParseError("embedding file has no entries")


def load_embeddings(source: IO[bytes] | IO[str] | Iterable[str], expected_dim: int) -> EmbeddingTable:
    """Parse GloVe text (``token f1 ... fd`` per line) into a table.

    First occurrence of a (case-folded) token wins.  Malformed floats
    raise :class:`GloveParseError`, a wrong component count raises
    :class:`DimensionMismatchError`; both carry the line number.
    """
    if expected_dim <= 0:
        raise InvalidInputError(f"expected_dim must be positive, got {expected_dim}")
    if isinstance(source, bytes):
        source = io.StringIO(source.decode("utf-8"))
    entries: dict[str, np.ndarray] = {}
    for line_no, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        fields = raw.split()
        if not fields:
            continue
        token, values = fields[0], fields[1:]
        if len(values) != expected_dim:
            raise DimensionMismatchError(
                f"line {line_no}: expected {expected_dim} components, found {len(values)}",
                line_no=line_no,
            )
        try:
            vec = np.array([float(x) for x in values], dtype=np.float64)
        except ValueError:
            raise GloveParseError(
                f"line {line_no}: unparsable float component", line_no=line_no
            ) from None
        if not np.all(np.isfinite(vec)):
            raise GloveParseError(
                f"line {line_no}: non-finite component", line_no=line_no
            )
        vec.setflags(write=False)
        entries.setdefault(token.lower(), vec)
    return EmbeddingTable(expected_dim, entries)


def load_embeddings_path(path: str, expected_dim: int | None = None) -> EmbeddingTable:
    """Load from a file path; infers the dimension when not given."""
    if expected_dim is None:
        expected_dim = sniff_dimension(path)
    with open(path, "r", encoding="utf-8") as fh:
        return load_embeddings(fh, expected_dim)


def dump_embeddings(table: EmbeddingTable, sink: IO[str]) -> None:
    """Write the table back to GloVe text; floats use round-trip repr."""
    for token in table.tokens():
        vec = table.lookup(token)
        sink.write(token)
        for x in vec:
            sink.write(" ")
            sink.write(repr(float(x)))
        sink.write("\n")


def cosine_similarity(u, v) -> float:
    """u.v / (|u||v|), clamped to [-1, 1]; exact 1.0 for identical vectors."""
    ua, va = _as_vector(u, "u"), _as_vector(v, "v")
    if ua.shape != va.shape:
        raise InvalidInputError(f"dimension mismatch: {ua.shape[0]} vs {va.shape[0]}")
    try:
        return _kernels.cosine(ua, va)
    except ValueError as exc:
        raise DegenerateVectorError(str(exc)) from None


def cosine_distance(u, v) -> float:
    """1 - cosine_similarity(u, v); lies in [0, 2]."""
    return 1.0 - cosine_similarity(u, v)


def mean_vector(vectors) -> np.ndarray:
    """Componentwise arithmetic mean of a nonempty list of vectors."""
    vecs = [_as_vector(v) for v in vectors]
    if not vecs:
        raise EmptyInputError("mean_vector of empty list")
    dim = vecs[0].shape[0]
    if any(v.shape[0] != dim for v in vecs):
        raise InvalidInputError("vectors have mixed dimensions")
    return _kernels.mean_rows(np.stack(vecs))


def vector_norm(v) -> float:
    arr = _as_vector(v)
    return math.sqrt(float(np.dot(arr, arr)))
