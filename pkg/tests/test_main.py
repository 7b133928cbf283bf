import json

import pytest

from src.main import build_parser, main


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestParser:
    def test_global_flags_before_and_after_command(self):
        parser = build_parser()
        assert parser.parse_args(["--q", "3", "geom", "stats", "--m", "2", "--n", "2"]).q == 3
        assert parser.parse_args(["geom", "stats", "--m", "2", "--n", "2", "--q", "5"]).q == 5
        assert parser.parse_args(["geom", "stats", "--m", "2", "--n", "2"]).q == 2

    def test_command_required(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2


class TestCommands:
    def test_homweight_table_is_tsv(self, capsys):
        assert main(["homweight", "table", "--m", "2", "--n", "3", "--side", "left"]) == 0
        assert capsys.readouterr().out == "rank\tweight\n1\t1/42\n2\t1/84\n"

    def test_homweight_total(self, capsys):
        code, payload = run_json(capsys, "homweight", "total", "--m", "2", "--n", "3", "--side", "right")
        assert code == 0
        assert payload["total"] == "64"

    def test_homweight_cosets(self, capsys):
        code, payload = run_json(capsys, "homweight", "cosets", "--m", "2", "--n", "3", "--side", "right",
                                 "--basis", "1,0")
        assert len(payload) == 8
        assert payload[1]["rank_census"] == {"0": 0, "1": 2, "2": 6}

    def test_count(self, capsys):
        code, payload = run_json(capsys, "count", "gaussian", "4", "2")
        assert payload == {"formula": 35, "brute_force": 35, "match": True}

    def test_count_arity(self):
        with pytest.raises(SystemExit) as info:
            main(["count", "gaussian", "4"])
        assert info.value.code == 2

    def test_geom_stats_over_ternary_field(self, capsys):
        code, payload = run_json(capsys, "geom", "stats", "--m", "2", "--n", "2", "--q", "3")
        assert payload["points"] == 81

    def test_gabidulin_round_trip(self, capsys, tmp_path):
        path = tmp_path / "g.txt"
        code, payload = run_json(capsys, "code", "gabidulin", "--m", "3", "--n", "2", "--k", "1", "--out", str(path))
        assert payload["is_mrd"] and payload["size"] == 8
        code, payload = run_json(capsys, "code", "check", "--in", str(path), "--k", "1")
        assert payload["is_mrd"]
        assert payload["rank_distance"] == 2
        code, payload = run_json(capsys, "dist", "check", "--uniform", str(path), "--k", "2")
        assert payload["k_good"] is False
        assert set(payload["witness"]) == {"M", "K", "probability"}
        code, payload = run_json(capsys, "dist", "classify", "--uniform", str(path), "--k", "1")
        assert payload["is_minimum"] and payload["mrd_support"]

    def test_dist_needs_a_source(self):
        with pytest.raises(SystemExit):
            main(["dist", "check", "--k", "1"])

    def test_check_dense(self, capsys, tmp_path):
        path = tmp_path / "points.txt"
        path.write_text("# q=2 m=2 n=2\n0 0\n0 0\n")
        code, payload = run_json(capsys, "geom", "check-dense", "--k", "1", "--in", str(path))
        assert payload["k_dense"] is False
        assert payload["unblocked_flat"]["side"] == "right"

    def test_search_minimum(self, capsys, tmp_path):
        out = tmp_path / "witness.txt"
        code, payload = run_json(capsys, "search", "min-dense", "--m", "3", "--n", "2", "--k", "1", "--out", str(out))
        assert code == 0
        assert payload["minimum"] == 6 and payload["proof"]
        assert out.read_text().startswith("# q=2 m=3 n=2")

    def test_search_decide(self, capsys):
        code, payload = run_json(capsys, "search", "min-dense", "--m", "3", "--n", "2", "--k", "1", "--decide", "5")
        assert payload["feasible"] is False

    def test_search_budget_exhausted(self, capsys):
        code = main(["search", "min-dense", "--m", "3", "--n", "2", "--k", "2", "--budget-nodes", "1"])
        captured = capsys.readouterr()
        assert code == 1
        assert json.loads(captured.out)["proof"] is False
        assert '"budget_exhausted"' in captured.err

    def test_search_rejects_large_k(self):
        with pytest.raises(SystemExit) as info:
            main(["search", "min-dense", "--m", "3", "--n", "2", "--k", "3"])
        assert info.value.code == 2

    def test_joint_laws(self, capsys):
        code, payload = run_json(capsys, "rc", "joint-check", "--m", "2", "--n", "2", "--k", "2")
        assert payload["holds"] and payload["target"] == "1/16"
        code, payload = run_json(capsys, "rc", "joint-check", "--m", "2", "--n", "2", "--k", "2", "--mode", "affine")
        assert payload["holds"] and payload["target"] == "1/64"

    def test_intersect(self, capsys):
        code, payload = run_json(capsys, "rc", "intersect", "--m", "2", "--n", "3", "--k", "2", "--bound")
        assert payload["bound"] == "81/32"
        code, payload = run_json(capsys, "rc", "intersect", "--m", "2", "--n", "3", "--k", "1")
        assert payload["exact"] == "0"

    def test_fset_extract_from_file(self, capsys, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("0 0 1 1\n0 1 0 1\n0 0 1 1\n")
        code, payload = run_json(capsys, "rc", "fset-extract", "--in", str(path))
        assert payload["kept"] == [[0, 1, 0, 1]]
        assert payload["family"] == "singletons_2_2"

    def test_fset_extract_is_seeded(self, capsys):
        _, first = run_json(capsys, "rc", "fset-extract", "--family", "separating", "--n", "6", "--seed", "4")
        _, second = run_json(capsys, "rc", "fset-extract", "--family", "separating", "--n", "6", "--seed", "4")
        assert first == second


class TestErrors:
    def test_bad_field_is_a_computational_error(self, capsys):
        assert main(["geom", "stats", "--m", "2", "--n", "2", "--q", "6"]) == 1
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "non_prime_characteristic"

    def test_enumeration_cap_flag(self, capsys):
        assert main(["--cap", "4", "code", "gabidulin", "--m", "3", "--n", "2", "--k", "1"]) == 1
        assert "enumeration_too_large" in capsys.readouterr().err

    def test_invalid_configuration(self):
        with pytest.raises(SystemExit) as info:
            main(["--threads", "0", "geom", "stats", "--m", "2", "--n", "2"])
        assert info.value.code == 2

    def test_bad_file(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not a header\n")
        assert main(["code", "check", "--in", str(path), "--k", "1"]) == 1
        assert "format_error" in capsys.readouterr().err


class TestVerify:
    def test_fast_battery(self, capsys):
        code, payload = run_json(capsys, "verify", "--fast", "--json")
        assert code == 0
        assert payload["scope"] == "fast"
        assert all(check["passed"] for check in payload["checks"])
