import csv
import io
import json
import math
import subprocess
import sys

import pytest

from interactive_rd.cli import CommandRequest, dispatch, fmt_number, main, parse_range, render_json
from interactive_rd.errors import DomainError
from interactive_rd.info_core import binary_entropy

H25 = 0.81127812445913286391


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


class TestCommands:
    def test_rho1_dsbs(self, capsys):
        doc = run_json(capsys, "rho1", "--dsbs-p", "0.25", "--distortion", "0.5")
        assert float(doc["results"]["rho1"]) == pytest.approx(1.5 * H25, abs=1e-9)
        assert set(doc) == {"command", "params", "results", "verdicts", "runtime_s"}
        assert doc["command"] == "rho1"
        assert isinstance(doc["runtime_s"], float)

    def test_rho1_oracle_on_request(self, capsys):
        doc = run_json(capsys, "rho1", "--dsbs-p", "0.25", "--distortion", "0.5", "--grid-res", "32", "--refine", "1")
        r = doc["results"]
        assert float(r["rho1_oracle"]) <= float(r["rho1_exact"]) + 1e-9
        assert float(r["rho1_exact"]) - float(r["rho1_oracle"]) < 5e-3
        assert doc["verdicts"]["oracle_below_exact"] is True

    def test_wz_rate(self, capsys):
        doc = run_json(capsys, "wz-rate", "--p", "0.2", "--q", "0.3", "--distortion", "0.4")
        assert float(doc["results"]["rate"]) > 0

    def test_gain_detect(self, capsys):
        doc = run_json(capsys, "gain-detect", "--p", "1e-6", "--q", "0.1", "--alpha0e", "0.5")
        assert doc["verdicts"]["valid"] is True
        assert float(doc["results"]["gap_lower"]) == pytest.approx(5.1637623654364254e-06, rel=1e-8)

    def test_gain_detect_invalid(self, capsys):
        doc = run_json(capsys, "gain-detect", "--p", "0.25", "--q", "0.1", "--alpha0e", "0.5")
        assert doc["verdicts"]["valid"] is False

    def test_gain_search(self, capsys):
        doc = run_json(capsys, "gain-search", "--q", "0.1", "--alpha0e", "0.5", "--margin", "0")
        assert float(doc["results"]["p"]) <= 1e-2

    def test_two_msg(self, capsys):
        doc = run_json(capsys, "two-msg", "--p", "1e-200", "--q", "0.1", "--alpha", "0.5")
        assert float(doc["results"]["sum_ratio"]) == pytest.approx(8.16, abs=0.02)

    def test_ratio_search(self, capsys):
        doc = run_json(capsys, "ratio-search", "--L", "5")
        r = doc["results"]
        assert float(r["sum_ratio"]) > 5 and float(r["split_ratio"]) < 0.2

    def test_entropy_ratio(self, capsys):
        doc = run_json(capsys, "entropy-ratio", "--slope", "2", "--p", "1e-12")
        assert float(doc["results"]["ratio"]) == pytest.approx(1.95158, abs=1e-5)

    def test_reproduce(self, capsys):
        doc = run_json(capsys, "reproduce-paper")
        assert float(doc["results"]["remark2_ratio"]) == pytest.approx(8.16, abs=0.02)
        assert all(doc["verdicts"].values())
        assert doc["runtime_s"] < 10

    def test_text_shows_reference_values(self, capsys):
        code, out, _ = run(capsys, "reproduce-paper")
        assert code == 0
        line = next(l for l in out.splitlines() if l.strip().startswith("remark2_ratio "))
        assert "8.16" in line

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "rho1", "--dsbs-p", "0.25", "--distortion", "0.5", "--format", "csv")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) >= 2


class TestSerialization:
    def test_fmt_number(self):
        assert fmt_number(0.1) == "0.10000000000000001"
        assert fmt_number(math.inf) == "inf"
        assert float(fmt_number(1 / 3)) == 1 / 3

    def test_sorted_keys(self, capsys):
        _, out, _ = run(capsys, "gain-detect", "--p", "1e-6", "--q", "0.1", "--alpha0e", "0.5", "--format", "json")
        doc = json.loads(out)
        assert list(doc["results"]) == sorted(doc["results"])
        assert list(doc) == sorted(doc)

    def test_deterministic_apart_from_runtime(self):
        req = CommandRequest("gain-detect", {"p": "1e-6", "q": "0.1", "alpha0e": "0.5"}, "json", None)
        docs = [json.loads(render_json(dispatch(req))) for _ in range(2)]
        for d in docs:
            d.pop("runtime_s")
        assert json.dumps(docs[0], sort_keys=True) == json.dumps(docs[1], sort_keys=True)

    def test_file_instance_with_infinite_entries(self, tmp_path, capsys):
        joint = tmp_path / "j.json"
        dist = tmp_path / "d.json"
        joint.write_text(json.dumps({"alphabet_sizes": [2, 2], "values": [0.4, 0.1, 0.1, 0.4]}))
        dist.write_text(json.dumps({"alphabet_sizes": [2, 3], "values": [0, 1, "inf", "inf", 1, 0]}))
        doc = run_json(capsys, "rho1", "--joint", str(joint), "--dist", str(dist), "--distortion", "0.3")
        assert float(doc["results"]["rho1"]) == pytest.approx(1.3 * binary_entropy(0.2), abs=1e-9)


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["rho1", "--dsbs-p", "1.5", "--distortion", "0.5"],
            ["rho1", "--dsbs-p", "abc", "--distortion", "0.5"],
            ["rho1", "--distortion", "0.5"],
            ["frobnicate"],
            [],
            ["gain-detect", "--p", "1e-6", "--q", "0.6", "--alpha0e", "0.5"],
            ["sweep", "--target", "rho1"],
        ],
    )
    def test_domain_exit_two(self, capsys, argv):
        code, out, err = run(capsys, *argv)
        assert code == 2
        assert out == ""
        assert err.count("\n") == 1 and err.startswith("error:")

    def test_search_exhausted_exit_three(self, capsys):
        code, out, err = run(capsys, "gain-search", "--q", "0.499", "--alpha0e", "0.99", "--margin", "0.1")
        assert code == 3 and out == "" and err.count("\n") == 1

    def test_missing_file_exit_one(self, capsys, tmp_path):
        code, out, err = run(capsys, "rho1", "--joint", str(tmp_path / "nope.json"), "--dist", str(tmp_path / "x.json"),
                             "--distortion", "0.3")
        assert code == 1 and out == "" and err.count("\n") == 1

    def test_bad_document_names_field(self, capsys, tmp_path):
        joint = tmp_path / "j.json"
        joint.write_text(json.dumps({"alphabet_sizes": [2, 2], "values": [0.5, 0.5]}))
        dist = tmp_path / "d.json"
        dist.write_text(json.dumps({"alphabet_sizes": [2, 2], "values": [0, 1, 1, 0]}))
        code, _, err = run(capsys, "rho1", "--joint", str(joint), "--dist", str(dist), "--distortion", "0.3")
        assert code == 2 and "values" in err

    def test_unwritable_output(self, capsys, tmp_path):
        code, out, err = run(capsys, "reproduce-paper", "--out", str(tmp_path / "missing" / "r.json"))
        assert code == 1 and out == ""


class TestSweep:
    def test_rho1_column(self, capsys):
        code, out, _ = run(capsys, "sweep", "--target", "rho1", "--dsbs-p", "0.25", "--range", "distortion=lin:0:1:11")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 11
        for row in rows:
            D = float(row["distortion"])
            assert float(row["rho1"]) == pytest.approx((1 + D) * H25, abs=1e-9)

    def test_gain_detect_relative_gap_increases(self, capsys):
        code, out, _ = run(capsys, "sweep", "--target", "gain-detect", "--q", "0.1", "--alpha0e", "0.5",
                           "--range", "p=geom:1e-2:1e-20:19")
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        rel = [float(r["relative_gap"]) for r in rows]
        assert all(b > a for a, b in zip(rel, rel[1:]))
        assert float(rows[-1]["gap_lower"]) > 0

    def test_grid_order_two_ranges(self, capsys):
        code, out, _ = run(capsys, "sweep", "--target", "two-msg", "--alpha", "0.5",
                           "--range", "p=geom:1e-3:1e-1:3", "--range", "q=lin:0.1:0.3:2")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [(float(r["p"]), float(r["q"])) for r in rows] == [
            (p, q) for p in (1e-3, 1e-2, 1e-1) for q in (0.1, 0.3)
        ]

    def test_empty_range_header_only(self, capsys):
        code, out, _ = run(capsys, "sweep", "--target", "rho1", "--dsbs-p", "0.25", "--range", "distortion=lin:0:1:0")
        assert code == 0
        assert out.strip().splitlines() == ["distortion,rho1"]

    def test_too_large(self, capsys):
        code, _, err = run(capsys, "sweep", "--target", "rho1", "--dsbs-p", "0.25",
                           "--range", "distortion=lin:0:1:1001", "--range", "p=lin:0.1:0.2:1000")
        assert code == 2 and "limit" in err

    def test_three_ranges(self, capsys):
        code, _, _ = run(capsys, "sweep", "--target", "two-msg", "--range", "p=lin:0.1:0.2:2",
                         "--range", "q=lin:0.1:0.2:2", "--range", "alpha=lin:0.1:0.2:2")
        assert code == 2

    @pytest.mark.parametrize("spec", ["p", "p=lin:0:1", "p=cubic:0:1:3", "p=geom:0:1:3", "p=lin:0:1:-1"])
    def test_parse_range_errors(self, spec):
        with pytest.raises(DomainError):
            parse_range(spec)


class TestOutput:
    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "r.json"
        code, out, _ = run(capsys, "rho1", "--dsbs-p", "0.25", "--distortion", "0.5", "--format", "json",
                           "--out", str(target))
        assert code == 0 and out == ""
        assert float(json.loads(target.read_text())["results"]["rho1"]) == pytest.approx(1.5 * H25, abs=1e-9)

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "interactive_rd", "entropy-ratio", "--slope", "1", "--p", "0.1", "--format", "json"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert float(json.loads(proc.stdout)["results"]["ratio"]) == 1.0
