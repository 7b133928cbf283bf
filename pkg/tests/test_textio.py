from fractions import Fraction
import json

import pytest

from src.algebra.matrix import Mat
from src.codes.distributions import from_weights
from src.codes.rank_metric import gabidulin
from src.errors import FormatError
from src.tools.textio import (
    dumps_distribution,
    dumps_matrices,
    dumps_vectors,
    header,
    loads_distribution,
    loads_matrices,
    loads_vectors,
    read_code,
    read_distribution,
    read_matrices,
    read_vectors,
    write_code,
    write_distribution,
)


class TestMatrices:
    def test_layout(self, gf2):
        X = Mat.from_rows(gf2, [[1, 0, 1], [0, 1, 1]])
        text = dumps_matrices([X, Mat.zeros(gf2, 2, 3)])
        assert text == "# q=2 m=2 n=3\n1 0 1\n0 1 1\n\n0 0 0\n0 0 0\n"
        field, m, n, mats = loads_matrices(text)
        assert (field, m, n) == (gf2, 2, 3)
        assert mats[0] == X

    def test_extension_header_names_modulus(self, gf4):
        assert header(gf4, 2, 2) == "# q=4 m=2 n=2 poly=1,1,1"
        field, _, _, _ = loads_matrices("# q=4 m=1 n=1 poly=1,1,1\n3\n")
        assert field == gf4

    def test_empty_file_needs_shape(self, gf2):
        with pytest.raises(FormatError):
            dumps_matrices([])
        assert dumps_matrices([], gf2, (2, 2)) == "# q=2 m=2 n=2\n"

    @pytest.mark.parametrize("text,line", [
        ("q=2 m=2 n=2\n", "line 1"),
        ("# q=6 m=1 n=1\n1\n", "line 1"),
        ("# q=2 m=2 n=2\n1 0\n", "line 2"),
        ("# q=2 m=2 n=2\n1 0\n0 1\n\n1 0\n0 x\n", "line 6"),
        ("# q=3 m=1 n=2\n1 3\n", "line 2"),
    ])
    def test_errors_name_the_line(self, text, line):
        with pytest.raises(FormatError) as info:
            loads_matrices(text)
        assert line in info.value.message

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            read_matrices(tmp_path / "absent.txt")


class TestCodes:
    def test_sidecar(self, gf2, tmp_path):
        code = gabidulin(3, 2, 1, gf2)
        path, sidecar = write_code(tmp_path / "g.txt", code, k=1)
        assert sidecar.name == "g.txt.json"
        meta = json.loads(sidecar.read_text())
        assert meta["size"] == 8
        assert meta["is_mrd"] is True
        assert meta["rank_distance"] == 2
        assert read_code(path) == code

    def test_code_without_codewords(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("# q=2 m=2 n=2\n")
        with pytest.raises(FormatError):
            read_code(path)


class TestDistributions:
    def test_file_round_trip(self, gf2, tmp_path):
        D = from_weights(gf2, 1, 2, {0: "1/3", 3: "2/3"})
        assert "w 2/3\n1 1" in dumps_distribution(D)
        assert read_distribution(write_distribution(tmp_path / "d.txt", D)) == D

    def test_integer_weight(self, gf2):
        D = loads_distribution("# q=2 m=1 n=1\nw 1\n1\n")
        assert D[Mat.identity(gf2, 1)] == 1

    @pytest.mark.parametrize("text", [
        "# q=2 m=1 n=1\n1\n",
        "# q=2 m=1 n=1\nw 1/0\n1\n",
        "# q=2 m=1 n=1\nw 1/2\n1\n\nw 1/2\n1\n",
        "# q=2 m=1 n=1\nw 1/2\n1\n",
        "",
    ])
    def test_invalid(self, text):
        with pytest.raises(FormatError):
            loads_distribution(text)

    def test_weights_are_exact(self, gf3):
        D = loads_distribution("# q=3 m=1 n=1\nw 1/3\n0\n\nw 1/3\n1\n\nw 1/3\n2\n")
        assert set(D.weights.values()) == {Fraction(1, 3)}


class TestVectors:
    def test_comments_and_blanks(self, tmp_path):
        path = tmp_path / "v.txt"
        path.write_text("# two vectors\n0 1 1\n\n1 0 2\n")
        assert read_vectors(path, 3) == [(0, 1, 1), (1, 0, 2)]
        assert dumps_vectors([(0, 1, 1)]) == "0 1 1\n"

    @pytest.mark.parametrize("text", ["0 2\n", "0 a\n", "0 1\n1\n"])
    def test_invalid(self, text):
        with pytest.raises(FormatError):
            loads_vectors(text, 2)
