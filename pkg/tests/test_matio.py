import numpy as np
import pytest

from sketchdp import (
    MatrixFormatError,
    format_matrix,
    load_matrix,
    parse_matrix,
    save_matrix,
)
from conftest import random_matrix


class TestDenseFormat:
    def test_layout(self):
        text = format_matrix(np.array([[1.5, -2.0]]), "dense")
        assert text == "dense 1 2\n1.5 -2.0\n"

    def test_round_trip_bitwise(self, tmp_path):
        a = random_matrix(7, 5, seed=1) * 0.1
        a[0, 0] = -0.0
        a[1, 2] = 1e-300
        a[2, 3] = 12345678.987654321
        path = tmp_path / "a.mat"
        save_matrix(a, path, "dense")
        b = load_matrix(path)
        assert np.array_equal(a, b)
        assert np.signbit(b[0, 0])

    def test_hand_written_file_parses(self):
        a = parse_matrix("dense 1 2\n1.5 -2\n")
        assert np.array_equal(a, [[1.5, -2.0]])

    def test_wrong_value_count_names_line(self):
        with pytest.raises(MatrixFormatError, match="line 2"):
            parse_matrix("dense 2 2\n1.0 2.0 3.0\n4.0 5.0 6.0\n")

    def test_truncated_file(self):
        with pytest.raises(MatrixFormatError, match="unexpected end"):
            parse_matrix("dense 3 2\n1 2\n")

    def test_extra_rows_rejected(self):
        with pytest.raises(MatrixFormatError, match="line 4"):
            parse_matrix("dense 2 1\n1\n2\n3\n")

    def test_non_finite_value_names_line(self):
        with pytest.raises(MatrixFormatError, match="line 3"):
            parse_matrix("dense 2 1\n1.0\nnan\n")

    def test_bad_token_names_line(self):
        with pytest.raises(MatrixFormatError, match="line 2"):
            parse_matrix("dense 1 1\nhello\n")


class TestSparseFormat:
    def test_parse_example(self):
        a = parse_matrix("sparse 2 2 1\n0 1 3.0\n")
        assert np.array_equal(a, [[0.0, 3.0], [0.0, 0.0]])

    def test_round_trip_values(self, tmp_path):
        a = np.zeros((6, 9))
        a[0, 3] = 0.1
        a[5, 8] = -7.25
        a[2, 2] = 1e-12
        path = tmp_path / "s.mat"
        save_matrix(a, path, "sparse")
        assert np.array_equal(load_matrix(path), a)

    def test_format_counts_nonzeros(self):
        a = np.zeros((3, 3))
        a[1, 1] = 2.0
        text = format_matrix(a, "sparse")
        assert text == "sparse 3 3 1\n1 1 2.0\n"

    def test_index_out_of_range(self):
        with pytest.raises(MatrixFormatError, match="line 2"):
            parse_matrix("sparse 2 2 1\n0 5 1.0\n")

    def test_wrong_entry_count(self):
        with pytest.raises(MatrixFormatError, match="unexpected end"):
            parse_matrix("sparse 2 2 2\n0 0 1.0\n")


class TestHeaders:
    def test_unknown_format(self):
        with pytest.raises(MatrixFormatError, match="line 1"):
            parse_matrix("matrixy 2 2\n")

    def test_dense_header_arity(self):
        with pytest.raises(MatrixFormatError, match="line 1"):
            parse_matrix("dense 2\n")

    def test_empty_file(self):
        with pytest.raises(MatrixFormatError, match="line 1"):
            parse_matrix("")

    def test_nonpositive_dims(self):
        with pytest.raises(MatrixFormatError, match="line 1"):
            parse_matrix("dense 0 2\n")


class TestSaveValidation:
    def test_rejects_non_finite(self, tmp_path):
        a = np.array([[1.0, np.inf]])
        with pytest.raises(ValueError):
            save_matrix(a, tmp_path / "bad.mat")

    def test_rejects_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            save_matrix(np.eye(2), tmp_path / "x.mat", "csv")
