import csv
import io
import json
import math

import pytest

from truncdim import (
    ExplicitWeights,
    ProductWeights,
    subset_sum_oracle,
    trunc_bound_product,
    truncation_dimension,
)
from truncdim.cli import DIM_FIELDS, load_expected_tables, main, parse_eps_grid


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv, "--format", "json")
    assert code == 0, text
    return json.loads(text)


class TestEpsGrid:
    @pytest.mark.parametrize(
        "text, expected",
        [("1e-1..1e-6", [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]), ("1e-3", [1e-3]),
         ("0.1,0.05", [0.1, 0.05]), ("1e-2..1e-2", [1e-2]), ("10", [10.0])],
    )
    def test_parse(self, text, expected):
        assert parse_eps_grid(text) == expected

    @pytest.mark.parametrize("text", ["1e-1..2e-3", "x", "-1", "0"])
    def test_bad(self, text):
        with pytest.raises(Exception):
            parse_eps_grid(text)


class TestDim:
    def test_p2_table(self):
        code, text = run("dim", "--alpha", "2,3,4,5", "--p", "2", "--c1", "1", "--eps", "1e-1..1e-6")
        assert code == 0
        for cell in ("8973", "1933", "210", "43", "18"):
            assert cell in text

    def test_single_cell(self):
        assert run_json("dim", "--alpha", "2", "--p", "1", "--c1", "1", "--eps", "1e-2")[0]["dim_trnc"] == 9

    def test_huge_eps(self):
        assert run_json("dim", "--gamma", "1,0.5", "--p", "2", "--c1", "1", "--eps", "10")[0]["dim_trnc"] == 1

    def test_csv_header(self):
        code, text = run("dim", "--alpha", "2,3", "--p", "1,2", "--c1", "1", "--eps", "1e-1..1e-2",
                         "--format", "csv")
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == DIM_FIELDS
        assert len(rows) == 1 + 2 * 2 * 2

    def test_json_round_trip(self):
        rows = run_json("dim", "--alpha", "3", "--p", "2", "--c1", "1", "--eps", "1e-3")
        r = rows[0]
        res = truncation_dimension(ProductWeights.polynomial(r["alpha"]), 1.0, r["epsilon"], r["p"])
        assert res.k_star == r["dim_trnc"]
        assert res.bound_at_k_star == r["bound_at_k"]
        assert res.bound_at_previous == r["bound_at_k_minus_1"]

    def test_c1_from_kernel(self):
        rows = run_json("dim", "--alpha", "3", "--p", "2", "--eps", "1e-3", "--kernel", "anchored-step",
                        "--q", "2", "--p1", "2")
        expect = truncation_dimension(ProductWeights.polynomial(3), 2**-0.5, 1e-3, 2).k_star
        assert rows[0]["dim_trnc"] == expect

    def test_verify(self):
        code, text = run("dim", "--gamma", "0.9,0.5,0.3,0.2", "--s", "4", "--p", "2", "--c1", "1",
                         "--eps", "0.1", "--verify")
        assert code == 0

    def test_missing_weights(self):
        assert run("dim", "--p", "2", "--c1", "1", "--eps", "1e-2")[0] == 1


class TestError:
    def test_sup_form(self):
        assert run_json("error", "--alpha", "3", "--p", "1", "--c1", "1", "--k", "4")[0]["bound"] == 0.008

    def test_table_cell(self):
        r = run_json("error", "--alpha", "2", "--p", "2", "--c1", "1", "--k", "90")[0]
        assert r["bound"] <= 1e-3
        assert r["bound"] == trunc_bound_product(ProductWeights.polynomial(2), 1.0, 90, 2).bound

    def test_gamma_file_exact(self, tmp_path):
        f = tmp_path / "w.json"
        f.write_text(json.dumps({"s": 3, "weights": {"": 1, "1": 0.8, "2": 0.5, "3": 0.4,
                                                     "1,2": 0.3, "1,3": 0.2, "2,3": 0.1, "1,2,3": 0.05}}))
        r = run_json("error", "--gamma-file", str(f), "--exact", "--k", "2", "--pstar", "2", "--c1", "1",
                     "--verify")[0]
        w = ExplicitWeights(3, {(): 1, (1,): 0.8, (2,): 0.5, (3,): 0.4, (1, 2): 0.3, (1, 3): 0.2,
                                (2, 3): 0.1, (1, 2, 3): 0.05})
        assert r["bound"] == pytest.approx(math.sqrt(subset_sum_oracle(w, 1.0, 2, 2)), rel=1e-14)

    def test_gamma_file_product(self, tmp_path):
        f = tmp_path / "g.json"
        f.write_text(json.dumps({"gamma": [1, 0.25, 0.111]}))
        r = run_json("error", "--gamma-file", str(f), "--k", "1", "--p", "2", "--c1", "1")[0]
        assert r["bound"] > 0

    def test_bad_gamma_file(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("[1, 2]")
        assert run("error", "--gamma-file", str(f), "--k", "1", "--c1", "1")[0] == 1

    def test_divergent_weights(self):
        assert run("error", "--alpha", "0.5", "--p", "2", "--c1", "1", "--k", "3")[0] == 3


class TestConstant:
    def test_step(self):
        r = run_json("constant", "--kernel", "anchored-step", "--density", "uniform", "--problem", "approx",
                     "--q", "2", "--p1", "2")[0]
        assert r["value"] == pytest.approx(0.70711, abs=5e-6) and r["exactness"] == "exact"

    def test_infinite(self):
        argv = ["constant", "--kernel", "polyexp", "--r", "1", "--lambda", "-1", "--density", "exp",
                "--mu", "0.5", "--problem", "approx", "--q", "2", "--p1", "1"]
        code, text = run(*argv)
        assert code == 0 and "inf" in text
        assert run(*argv, "--require-finite")[0] == 3
        assert math.isinf(run_json(*argv)[0]["value"])

    def test_integration(self):
        r = run_json("constant", "--kernel", "polyexp", "--r", "2", "--lambda", "0", "--density", "exp",
                     "--mu", "2", "--problem", "int", "--p1", "1")[0]
        assert r["value"] == 0.5

    def test_kappa_hat_at_point(self):
        r = run_json("constant", "--kernel", "anchored-step", "--p1", "2", "--x", "0.25")[0]
        assert r["value"] == 0.5

    def test_incompatible(self):
        assert run("constant", "--kernel", "anchored-step", "--density", "exp")[0] == 1


class TestEmbedding:
    def test_product(self):
        r = run_json("embedding", "--alpha", "2", "--s", "3", "--m1", "1", "--p1", "1", "--p2", "1")[0]
        assert r["value"] == pytest.approx(25 / 9, rel=1e-15)

    def test_zero(self):
        r = run_json("embedding", "--alpha", "2", "--s", "3", "--m1", "0", "--p1", "1", "--p2", "1")[0]
        assert r["value"] == 1.0

    def test_interpolated(self):
        r = run_json("embedding", "--p1", "2", "--p2", "2", "--m1", "1", "--minf", "3", "--gamma", "1",
                     "--s", "1")[0]
        assert r["value"] == pytest.approx(2 * math.sqrt(2), rel=1e-15)
        assert r["exactness"] == "upper-bound"


class TestReproduce:
    def test_default(self):
        code, text = run("reproduce")
        assert code == 0
        assert "summary: 46/48 cells match, 2 off by one, 0 mismatched" in text
        assert "off-by-one: p=2 alpha=4 eps=0.1" in text

    def test_midpoint_rule_matches_all(self):
        code, text = run("reproduce", "--tail-rule", "midpoint-integral")
        assert code == 0 and "48/48 cells match" in text

    def test_csv(self, capsys):
        code, text = run("reproduce", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(text)))
        assert code == 0 and len(rows) == 48
        assert {"p", "alpha", "epsilon", "dim_trnc"} <= set(rows[0])

    def test_loose_tolerance_is_flagged(self):
        code, text = run("reproduce", "--tol", "1e-3")
        assert "straddle:" in text
        assert code in (0, 2)

    def test_expected_tables(self):
        tables, epss = load_expected_tables()
        assert epss == [1.0 / 10**m for m in range(1, 7)]
        assert len(tables) == 48
        assert [tables[2, 2, e] for e in epss] == [4, 19, 90, 416, 1933, 8973]
        assert [tables[1, 5, e] for e in epss] == [1, 2, 3, 6, 9, 15]


class TestConfig:
    def test_file_supplies_defaults(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# defaults\nalpha = 2\np = 1\nc1 = 1\neps = 1e-2\nformat = json\n")
        code, text = run("dim", "--config", str(cfg))
        assert code == 0 and json.loads(text)[0]["dim_trnc"] == 9

    def test_flags_win(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("alpha = 2\np = 1\nc1 = 1\neps = 1e-2\n")
        code, text = run("dim", "--config", str(cfg), "--eps", "1e-3", "--format", "json")
        assert json.loads(text)[0]["dim_trnc"] == 31

    def test_boolean_key(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("require-finite = yes\nkernel = polyexp\nlambda = -1\nmu = 0.5\np1 = 1\n")
        assert run("constant", "--config", str(cfg))[0] == 3

    @pytest.mark.parametrize("body", ["colour = red\n", "verify = maybe\n", "[section]\nx=1\n"])
    def test_bad_config(self, tmp_path, body):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(body)
        assert run("dim", "--config", str(cfg))[0] == 1

    def test_missing_file(self, tmp_path):
        assert run("dim", "--config", str(tmp_path / "nope.cfg"))[0] == 1


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["dim", "--p", "zero"], ["dim", "--format", "xml"]])
def test_usage_errors_exit_one(argv):
    assert run(*argv)[0] == 1
