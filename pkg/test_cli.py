"""
End-to-end tests of the command line: exit codes, summaries, output files,
batch manifests and report reverification.
"""
import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.cli import main
from src.sources.batch import parse_manifest
from src.sources.reports import ReportDocument, reload_and_reverify
from src.utils.config import reset_config
from src.utils.errors import ParseError


@pytest.fixture(autouse=True)
def fresh_config():
    reset_config()
    yield
    reset_config()


def _lattice_file(path: Path, gram, name=None) -> str:
    data = {"rank": len(gram), "gram": gram}
    if name:
        data["name"] = name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestUsage:
    """Argument handling and exit codes."""

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "slopeforge" in capsys.readouterr().out

    def test_missing_input(self):
        assert main(["filtration"]) == 1

    def test_unknown_lattice(self, capsys):
        assert main(["filtration", "--in", "E9"]) == 1
        assert "available" in capsys.readouterr().err

    def test_malformed_file(self, tmp_path, capsys):
        path = _lattice_file(tmp_path / "bad.json", [["2", "1"], ["0", "2"]])
        assert main(["filtration", "--in", path]) == 1
        assert "row 1, col 2" in capsys.readouterr().err

    def test_not_positive_definite(self, tmp_path):
        path = _lattice_file(tmp_path / "indef.json", [["1", "2"], ["2", "1"]])
        assert main(["filtration", "--in", path]) == 1

    def test_rank_cap(self, capsys):
        assert main(["tensor", "--a", "Z3", "--b", "Z3", "--rank-cap", "4"]) == 1
        assert "rank cap" in capsys.readouterr().err

    def test_budget_exhaustion_is_inconclusive(self):
        assert main(["rankin", "--in", "E8", "--budget-nodes", "3"]) == 3
        reset_config()
        assert main(["--budget-nodes", "3", "rankin", "--in", "E8"]) == 3


class TestCommands:
    """Summaries printed by each command."""

    def test_catalog_entry_is_a_lattice_file(self, capsys):
        assert main(["catalog", "A2"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data == {"name": "A2", "rank": 2, "gram": [["2", "1"], ["1", "2"]]}

    def test_catalog_listing(self, capsys):
        assert main(["catalog"]) == 0
        out = capsys.readouterr().out
        assert "E8" in out and "diag_1_4xdual" in out

    def test_filtration_semistable(self, capsys):
        assert main(["filtration", "--in", "A2"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "semistable, H_r^2 = 3^(1/2)"

    def test_filtration_from_file(self, tmp_path, capsys):
        path = _lattice_file(tmp_path / "e.json", [["1", "0"], ["0", "4"]])
        assert main(["filtration", "--in", path]) == 0
        assert capsys.readouterr().out.startswith("unstable, length 2, quotient H_r^2 = 1 < 4")

    def test_rankin(self, capsys):
        assert main(["rankin", "--in", "A2"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "d_1 = 2, d_2 = 3"

    def test_aut(self, capsys):
        assert main(["aut", "--in", "Z2"]) == 0
        assert capsys.readouterr().out.startswith("|Aut| = 8")

    def test_isodual(self, capsys):
        assert main(["isodual", "--in", "diag(1,4)"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("isodual, c = 1/4, types orthogonal+symplectic, signature 0, Witt index 1")

    def test_not_isodual(self, capsys):
        assert main(["isodual", "--in", "diag_1_1_4"]) == 0
        assert capsys.readouterr().out.startswith("not isodual")

    def test_tensor_bost(self, capsys):
        assert main(["tensor", "--a", "diag(1,4)", "--b", "diag(1,4)", "--check-bost"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "equal, H_min = 1"

    def test_tensor_checks(self, capsys):
        code = main(["tensor", "--a", "diag_1_4", "--b", "Z2", "--check-redsi", "--check-r2"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "redsi: hypothesis satisfied, conclusion verified"
        assert lines[1] == "r2: hypothesis satisfied, conclusion verified"

    def test_analyze(self, capsys):
        assert main(["analyze", "--in", "A2"]) == 0
        out = capsys.readouterr().out
        assert "filtration: semistable" in out
        assert "rankin: d_1 = 2, d_2 = 3" in out


class TestOutputFiles:
    """Polygon files, reports and batch runs."""

    def test_polygon_csv(self, tmp_path):
        csv = tmp_path / "poly.csv"
        assert main(["polygon", "--in", "diag_1_4", "--csv", str(csv)]) == 0
        assert csv.read_text(encoding="utf-8").splitlines() == ["dim,sq_height", "0,1", "1,1", "2,4"]

    def test_polygon_svg_is_deterministic(self, tmp_path):
        first, second = tmp_path / "a.svg", tmp_path / "b.svg"
        assert main(["polygon", "--in", "diag_1_4", "--svg", str(first)]) == 0
        assert main(["polygon", "--in", "diag_1_4", "--svg", str(second)]) == 0
        data = first.read_bytes()
        assert data == second.read_bytes()
        assert b"canonical-polygon" in data
        assert b"(2, 4)" in data

    def test_report_round_trip(self, tmp_path, capsys):
        report = tmp_path / "report.json"
        assert main(["isodual", "--in", "diag_1_4", "--out", str(report)]) == 0
        document = ReportDocument.load(report)
        assert document.command == "isodual"
        assert document.results[0]["witnesses"]
        assert reload_and_reverify(document).passed
        capsys.readouterr()
        assert main(["reverify", "--report", str(report)]) == 0
        assert "pass" in capsys.readouterr().out

    def test_tampered_report_fails(self, tmp_path):
        report = tmp_path / "report.json"
        assert main(["filtration", "--in", "diag_1_4", "--out", str(report)]) == 0
        data = json.loads(report.read_text(encoding="utf-8"))
        for witness in data["results"][0]["witnesses"]:
            if witness["type"] == "sublattice":
                witness["det"] = "5"
        report.write_text(json.dumps(data), encoding="utf-8")
        assert main(["reverify", "--report", str(report)]) == 2

    def test_batch(self, tmp_path, capsys):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({
            "experiments": [
                {"kind": "filtration", "a": "A2"},
                {"kind": "tensor", "a": "diag_1_4", "b": "Z2", "checks": ["bost", "c1"]},
                {"kind": "isodual", "a": "diag_1_4", "sweep": False},
            ]
        }), encoding="utf-8")
        out = tmp_path / "batch.json"
        assert main(["batch", "--manifest", str(manifest), "--out", str(out), "--no-progress"]) == 0
        document = ReportDocument.load(out)
        assert [r["index"] for r in document.results] == [0, 1, 2]
        assert [r["kind"] for r in document.results] == ["filtration", "tensor", "isodual"]
        assert document.status == "pass"
        assert "tensor(diag_1_4, Z2): pass" in capsys.readouterr().out

    def test_batch_entry_errors(self, tmp_path):
        manifest = tmp_path / "manifest.json"
        manifest.write_text(json.dumps({
            "experiments": [
                {"kind": "filtration", "a": "A2"},
                {"kind": "filtration", "a": "nowhere"},
                {"kind": "tensor", "a": "Z3", "b": "Z3", "rank_cap": 4},
            ]
        }), encoding="utf-8")
        out = tmp_path / "batch.json"
        assert main(["batch", "--manifest", str(manifest), "--out", str(out), "--no-progress"]) == 1
        statuses = [r["status"] for r in ReportDocument.load(out).results]
        assert statuses == ["pass", "error", "error"]

    def test_manifest_validation(self):
        with pytest.raises(ParseError) as info:
            parse_manifest({"experiments": [{"kind": "filtration", "a": "A2"}, {"kind": "tensor", "a": "A2"}]})
        assert info.value.row == 2
        with pytest.raises(ParseError):
            parse_manifest({"experiments": [{"kind": "filtration", "a": "A2", "colour": "red"}]})
        with pytest.raises(ParseError):
            parse_manifest([])
