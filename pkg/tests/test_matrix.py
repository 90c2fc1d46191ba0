import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import blockseg as bs
from blockseg import MatrixFormatError, SymmetryViolation

from conftest import symmetric_from


def _write(tmp_path, text, name="m.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadDense:
    def test_symmetric_2x2(self, tmp_path):
        m = bs.load_dense(_write(tmp_path, "1 2\n2 1\n"))
        assert m.n == 2
        assert m.values.tolist() == [[1.0, 2.0], [2.0, 1.0]]

    def test_asymmetric_rejected(self, tmp_path):
        with pytest.raises(SymmetryViolation):
            bs.load_dense(_write(tmp_path, "1 2\n3 1\n"))

    def test_identity_pattern_3x3(self, tmp_path):
        m = bs.load_dense(_write(tmp_path, "1 0 0\n0 1 0\n0 0 1\n"))
        for i in range(3):
            for j in range(3):
                assert m.values[i, j] == m.values[j, i]

    def test_tabs_and_comments(self, tmp_path):
        m = bs.load_dense(_write(tmp_path, "# header\n1\t2\n2\t1\n"))
        assert m.n == 2

    def test_explicit_delimiter(self, tmp_path):
        m = bs.load_dense(_write(tmp_path, "1,2\n2,1\n"), delimiter=",")
        assert m.values[0, 1] == 2.0

    def test_ragged_rows(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_dense(_write(tmp_path, "1 2\n2\n"))

    def test_non_numeric(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_dense(_write(tmp_path, "1 x\n2 1\n"))

    def test_not_square(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_dense(_write(tmp_path, "1 2 3\n3 2 1\n"))

    def test_order_one_rejected(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_dense(_write(tmp_path, "5\n"))

    def test_non_finite_rejected(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_dense(_write(tmp_path, "1 nan\nnan 1\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_dense(tmp_path / "nope.txt")

    def test_tolerance_with_repair(self, tmp_path):
        path = _write(tmp_path, "1 2.0000001\n2 1\n")
        m = bs.load_dense(path, symmetry_tol=1e-3, repair=True)
        assert m.values[0, 1] == m.values[1, 0] == pytest.approx(2.00000005)

    def test_tolerance_without_repair(self, tmp_path):
        path = _write(tmp_path, "1 2.0000001\n2 1\n")
        with pytest.raises(SymmetryViolation):
            bs.load_dense(path, symmetry_tol=1e-3)

    def test_values_immutable(self, tmp_path):
        m = bs.load_dense(_write(tmp_path, "1 2\n2 1\n"))
        with pytest.raises(ValueError):
            m.values[0, 0] = 9.0


class TestLoadTriples:
    def test_single_pair_mirrored(self, tmp_path):
        m = bs.load_triples(_write(tmp_path, "1 2 5\n"), n=2)
        assert m.values.tolist() == [[0.0, 5.0], [5.0, 0.0]]

    def test_diagonal_entry(self, tmp_path):
        m = bs.load_triples(_write(tmp_path, "1 1 3\n"), n=2)
        assert m.values.tolist() == [[3.0, 0.0], [0.0, 0.0]]

    def test_mirrored_records_sum(self, tmp_path):
        m = bs.load_triples(_write(tmp_path, "1 2 2\n2 1 3\n"), n=2)
        assert m.values.tolist() == [[0.0, 5.0], [5.0, 0.0]]

    def test_duplicates_sum(self, tmp_path):
        m = bs.load_triples(_write(tmp_path, "1 2 2\n1 2 2\n1 1 1\n1 1 4\n"), n=2)
        assert m.values.tolist() == [[5.0, 4.0], [4.0, 0.0]]

    def test_index_out_of_range(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_triples(_write(tmp_path, "1 3 5\n"), n=2)

    def test_fractional_index(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_triples(_write(tmp_path, "1.5 2 5\n"), n=2)

    def test_wrong_column_count(self, tmp_path):
        with pytest.raises(MatrixFormatError):
            bs.load_triples(_write(tmp_path, "1 2\n"), n=2)

    def test_roundtrip_through_dense(self, tmp_path, rng):
        m = bs.load_triples(
            _write(tmp_path, "1 2 5\n2 3 1.25\n1 1 2\n3 3 0.5\n"), n=3
        )
        out = tmp_path / "dense.tsv"
        bs.save_dense(m, out)
        again = bs.load_dense(out)
        assert np.array_equal(m.values, again.values)


class TestComputeRanks:
    def test_distinct_row(self):
        vals = np.array([[3.0, 1.0, 2.0], [1.0, 0.0, 9.0], [2.0, 9.0, 0.0]])
        r = bs.compute_ranks(bs.SymMatrix.from_array(vals))
        assert r.ranks[0].tolist() == [3, 1, 2]
        assert not r.has_ties[0]

    def test_tied_row_counts_leq(self):
        r = bs.compute_ranks(bs.SymMatrix.from_array([[1.0, 1.0], [1.0, 1.0]]))
        assert r.ranks.tolist() == [[2, 2], [2, 2]]
        assert r.has_ties.all()

    def test_prefix_example(self, rng):
        vals = symmetric_from(rng, 5).values.copy()
        row = np.array([5.0, 4.0, 3.0, 2.0, 1.0])
        vals[0, :] = row
        vals[:, 0] = row
        r = bs.compute_ranks(bs.SymMatrix.from_array(vals))
        assert r.prefix[0].tolist() == [0, 5, 9, 12, 14, 15]

    def test_tie_free_rows_are_permutations(self, rng):
        r = bs.compute_ranks(symmetric_from(rng, 12))
        for i in range(12):
            assert sorted(r.ranks[i]) == list(range(1, 13))
            assert r.prefix[i, -1] == 12 * 13 // 2

    def test_prefix_resums(self, rng):
        r = bs.compute_ranks(symmetric_from(rng, 9))
        assert np.array_equal(np.cumsum(r.ranks, axis=1), r.prefix[:, 1:])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_monotone_transform_invariance(self, seed):
        g = np.random.default_rng(seed)
        m = symmetric_from(g, 8)
        r0 = bs.compute_ranks(m)
        transformed = np.exp(0.5 * m.values) + 3.0
        transformed = np.ascontiguousarray(transformed)
        r1 = bs.compute_ranks(bs.SymMatrix.from_array(transformed))
        assert np.array_equal(r0.ranks, r1.ranks)

    def test_jitter_breaks_ties(self):
        m = bs.SymMatrix.from_array(np.ones((4, 4)))
        r = bs.compute_ranks(m, jitter_seed=5)
        for i in range(4):
            assert sorted(r.ranks[i]) == [1, 2, 3, 4]
        assert r.has_ties.all()  # flags refer to the pre-jitter values

    def test_jitter_preserves_distinct_order(self, rng):
        m = symmetric_from(rng, 10)
        plain = bs.compute_ranks(m)
        jittered = bs.compute_ranks(m, jitter_seed=123)
        assert np.array_equal(plain.ranks, jittered.ranks)

    def test_jitter_deterministic(self):
        m = bs.SymMatrix.from_array(np.ones((6, 6)))
        a = bs.compute_ranks(m, jitter_seed=9)
        b = bs.compute_ranks(m, jitter_seed=9)
        c = bs.compute_ranks(m, jitter_seed=10)
        assert np.array_equal(a.ranks, b.ranks)
        assert not np.array_equal(a.ranks, c.ranks)


def test_from_array_validations():
    with pytest.raises(MatrixFormatError):
        bs.SymMatrix.from_array(np.zeros((2, 3)))
    with pytest.raises(MatrixFormatError):
        bs.SymMatrix.from_array(np.zeros((1, 1)))
    with pytest.raises(SymmetryViolation):
        bs.SymMatrix.from_array([[0.0, 1.0], [2.0, 0.0]])
