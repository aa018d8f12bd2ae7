import json
from fractions import Fraction

import numpy as np
import pytest

from backends import get_backend
from report import Report, encode


@pytest.fixture
def exact():
    return get_backend("exact")


@pytest.fixture
def report(exact):
    """Fixture to provide a report with one passed and one failed check."""
    report = Report("weyl", exact, {"n": 1, "seed": 42})
    report.add("alpha-solve", "weyl-correction", True, f=Fraction(1, 96))
    report.add("wqc2-routes", "wqc2-obstruction", False, difference=0.5)
    return report


class TestEncode:
    """Test class for the conversion of check details into JSON values."""

    def test_exact_scalars(self, exact):
        assert encode(Fraction(3, 4), exact) == "3/4"
        assert encode(Fraction(4, 2), exact) == 2

    def test_float_scalars(self):
        assert encode(Fraction(1, 4), get_backend("float")) == 0.25

    def test_containers(self, exact):
        """Test dicts, tuples, sets and numpy values."""
        value = {1: (Fraction(1, 2), None), "s": {3, 1}, "b": np.bool_(True), "i": np.int64(7)}
        assert encode(value, exact) == {"1": ["1/2", None], "s": [1, 3], "b": True, "i": 7}

    def test_arrays(self, exact):
        assert encode(exact.array([[Fraction(1, 3), 0]]), exact) == [["1/3", 0]]

    def test_unknown_type(self, exact):
        with pytest.raises(TypeError):
            encode(object(), exact)


class TestReport:
    """Test class for Report."""

    def test_passed(self, report):
        assert not report.passed
        assert [check.name for check in report.failed_checks] == ["wqc2-routes"]

    def test_empty_report_passes(self, exact):
        assert Report("algebra", exact).passed

    def test_details_are_encoded(self, report):
        assert report.checks[0].details == {"f": "1/96"}

    def test_failed_check_is_logged(self, exact, caplog):
        Report("algebra", exact).add("jacobi", "jacobi-identity", False, failures=2)
        assert "Check jacobi (jacobi-identity) failed" in caplog.text

    def test_extend_prefixes_names(self, report, exact):
        """Test that merged checks and results carry the prefix."""
        combined = Report("selftest", exact)
        report.add_result("n", 1)
        combined.extend(report, "weyl")
        assert [check.name for check in combined.checks] == ["weyl.alpha-solve", "weyl.wqc2-routes"]
        assert combined.results == {"weyl.n": 1}
        assert not combined.passed

    def test_to_dict(self, report):
        document = report.to_dict()
        assert document["schema"] == 1
        assert document["command"] == "weyl"
        assert document["mode"] == "exact"
        assert document["parameters"] == {"n": 1, "seed": 42}
        assert document["passed"] is False
        assert document["checks"][1] == {"name": "wqc2-routes", "ref": "wqc2-obstruction", "passed": False,
                                         "details": {"difference": 0.5}}

    def test_to_json_is_valid(self, report):
        assert json.loads(report.to_json()) == report.to_dict()

    def test_message(self, report):
        """Test the markdown summary lists every check and details the failed ones."""
        message = report.message
        assert message.startswith("# qcweyl weyl: FAILED")
        assert "| alpha-solve | weyl-correction | ok |" in message
        assert "## wqc2-routes" in message

    def test_html(self, report):
        html = report.to_html()
        assert "<table>" in html
        assert "<h1>" in html


class TestWrite:
    """Test class for writing reports."""

    def test_write_to_stdout(self, report, capsys):
        report.write(None)
        assert json.loads(capsys.readouterr().out)["command"] == "weyl"

    def test_write_to_file(self, report, tmp_path):
        path = tmp_path / "report.json"
        report.write(str(path))
        assert json.loads(path.read_text())["passed"] is False
        assert not (tmp_path / "report.html").exists()

    def test_write_html(self, report, tmp_path):
        """Test that an HTML rendering is written next to the JSON report."""
        path = tmp_path / "report.json"
        report.write(str(path), html=True)
        assert "<table>" in (tmp_path / "report.html").read_text()
