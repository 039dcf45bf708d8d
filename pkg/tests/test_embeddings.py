"""Embedding table: GloVe parsing, lookup semantics, vector kernels."""

import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cs_probe.embeddings import (
    EmbeddingTable,
    cosine_distance,
    cosine_similarity,
    dump_embeddings,
    load_embeddings,
    mean_vector,
)
from cs_probe.errors import (
    DegenerateVectorError,
    DimensionMismatchError,
    EmptyInputError,
    GloveParseError,
    InvalidInputError,
)

finite_components = st.floats(
    min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
)


def vectors(dim: int):
    return st.lists(finite_components, min_size=dim, max_size=dim).map(np.array)


class TestLoading:
    def test_single_line_parses_to_entry(self):
        table = load_embeddings(io.StringIO("cat 0.1 0.2\n"), expected_dim=2)
        assert table.count == 1
        np.testing.assert_array_equal(table.lookup("cat"), [0.1, 0.2])

    def test_empty_stream_gives_empty_table(self):
        table = load_embeddings(io.StringIO(""), expected_dim=2)
        assert table.count == 0

    def test_duplicate_token_first_occurrence_wins(self):
        # five lines, one duplicated token -> 4 distinct entries
        text = "a 1 0\nb 0 1\nc 1 1\na 9 9\nd 0 2\n"
        table = load_embeddings(io.StringIO(text), expected_dim=2)
        assert table.count == 4
        np.testing.assert_array_equal(table.lookup("a"), [1.0, 0.0])

    def test_unparsable_float_reports_line_number(self):
        text = "a 1 0\nb 0 x\n"
        with pytest.raises(GloveParseError) as err:
            load_embeddings(io.StringIO(text), expected_dim=2)
        assert err.value.line_no == 2

    def test_wrong_component_count_is_dimension_error(self):
        with pytest.raises(DimensionMismatchError) as err:
            load_embeddings(io.StringIO("a 1 0\nb 1 2 3\n"), expected_dim=2)
        assert err.value.line_no == 2

    def test_non_finite_component_rejected(self):
        with pytest.raises(GloveParseError):
            load_embeddings(io.StringIO("a nan 0\n"), expected_dim=2)

    def test_lookup_is_case_normalized(self):
        table = load_embeddings(io.StringIO("cat 1 0\n"), expected_dim=2)
        np.testing.assert_array_equal(table.lookup("CAT"), table.lookup("cat"))

    def test_lookup_missing_returns_none(self, toy_table):
        assert toy_table.lookup("absent") is None

    def test_vectors_are_immutable(self, toy_table):
        vec = toy_table.lookup("east")
        with pytest.raises(ValueError):
            vec[0] = 5.0

    def test_round_trip_preserves_every_lookup(self):
        rng = np.random.default_rng(11)
        lines = [
            f"tok{i} " + " ".join(repr(float(x)) for x in rng.normal(size=5))
            for i in range(40)
        ]
        table = load_embeddings(io.StringIO("\n".join(lines)), expected_dim=5)
        sink = io.StringIO()
        dump_embeddings(table, sink)
        reloaded = load_embeddings(io.StringIO(sink.getvalue()), expected_dim=5)
        assert reloaded.count == table.count
        for tok in table.tokens():
            np.testing.assert_array_equal(reloaded.lookup(tok), table.lookup(tok))


class TestCosine:
    def test_identical_unit_vectors(self):
        assert cosine_similarity([1, 0], [1, 0]) == 1.0

    def test_orthogonal(self):
        assert cosine_similarity([1, 0], [0, 1]) == 0.0

    def test_analytic_half_sqrt2(self):
        assert cosine_similarity([1, 1], [1, 0]) == pytest.approx(
            math.sqrt(2) / 2, abs=1e-9
        )

    def test_distance_identical_is_zero(self):
        assert cosine_distance([3, 4], [3, 4]) == 0.0

    def test_distance_opposite_is_two(self):
        assert cosine_distance([1, 0], [-1, 0]) == 2.0

    def test_distance_analytic(self):
        assert cosine_distance([1, 1], [1, 0]) == pytest.approx(
            1 - math.sqrt(2) / 2, abs=1e-9
        )

    def test_zero_norm_is_hard_error(self):
        with pytest.raises(DegenerateVectorError):
            cosine_similarity([0, 0], [1, 0])
        with pytest.raises(DegenerateVectorError):
            cosine_similarity([0, 0], [0, 0])

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            cosine_similarity([1, 0], [1, 0, 0])

    @staticmethod
    def _usable(*vs):
        # subnormal components can underflow the squared norm to zero,
        # which the kernels treat as degenerate
        return all(np.dot(v, v) > 0.0 for v in vs)

    @given(vectors(4))
    def test_self_similarity_is_exactly_one(self, u):
        if not self._usable(u):
            return
        assert cosine_similarity(u, u) == 1.0

    @given(vectors(4), vectors(4))
    def test_symmetry(self, u, v):
        if not self._usable(u, v):
            return
        assert abs(cosine_similarity(u, v) - cosine_similarity(v, u)) < 1e-12

    @given(vectors(3), vectors(3), st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, u, v, alpha):
        if not self._usable(u, v, alpha * u):
            return
        assert cosine_similarity(alpha * u, v) == pytest.approx(
            cosine_similarity(u, v), abs=1e-9
        )

    @given(vectors(5), vectors(5))
    def test_distance_complements_similarity_exactly(self, u, v):
        if not self._usable(u, v):
            return
        # exact by construction: distance is literally 1.0 - similarity
        assert cosine_distance(u, v) == 1.0 - cosine_similarity(u, v)

    def test_range_bounds_on_random_vectors(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            u, v = rng.normal(size=(2, 8))
            c = cosine_similarity(u, v)
            assert -1.0 <= c <= 1.0


class TestMeanVector:
    def test_two_unit_vectors(self):
        np.testing.assert_array_equal(mean_vector([[1, 0], [0, 1]]), [0.5, 0.5])

    def test_single_vector_is_identity(self):
        np.testing.assert_array_equal(mean_vector([[2.5, -1.0]]), [2.5, -1.0])

    def test_three_vectors(self):
        np.testing.assert_array_equal(
            mean_vector([[2, 2], [0, 0], [1, 1]]), [1.0, 1.0]
        )

    def test_empty_list_rejected(self):
        with pytest.raises(EmptyInputError):
            mean_vector([])

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(InvalidInputError):
            mean_vector([[1, 0], [1, 0, 0]])


class TestTableConstruction:
    def test_from_vectors_case_folds(self):
        table = EmbeddingTable.from_vectors(2, {"Cat": [1, 0]})
        assert table.lookup("cAt") is not None

    def test_dimension_checked(self):
        with pytest.raises(DimensionMismatchError):
            EmbeddingTable.from_vectors(2, {"cat": [1, 0, 0]})
