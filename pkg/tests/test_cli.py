import json
import os

import pytest

from lttower.cli import EXIT_BUDGET, EXIT_USAGE, dumps, main, strip_timing

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")
REFERENCE = {
    "cohomology_borel_p5": ["cohomology", "--borel", "-p", "5", "-n", "1"],
    "tower_sdr_p3": ["tower", "--sdr", "-p", "3", "--levels", "4"],
    "fgl_height_h2": ["fgl", "--height", "-p", "3", "--h", "2", "--reduce", "p,u"],
}


def run(argv, capsys):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


@pytest.mark.parametrize("name", sorted(REFERENCE))
def test_golden_reports(name, capsys):
    code, report = run(REFERENCE[name], capsys)
    assert code == 0
    path = os.path.join(GOLDEN, f"{name}.json")
    text = dumps(strip_timing(report))
    if os.environ.get("LTTOWER_UPDATE_GOLDEN"):
        with open(path, "w") as fh:
            fh.write(text)
    with open(path) as fh:
        assert fh.read() == text


def test_reference_payloads(capsys):
    _, rep = run(REFERENCE["cohomology_borel_p5"], capsys)
    assert rep["result"]["borel"]["h1"]["order"] == 1 and rep["status"] == "pass"
    _, rep = run(REFERENCE["tower_sdr_p3"], capsys)
    assert rep["result"]["sdr"]["valid"] is True
    _, rep = run(REFERENCE["fgl_height_h2"], capsys)
    assert rep["result"]["height"]["h"] == 2


def test_every_claim_has_a_status(capsys):
    _, rep = run(["phigamma", "--random", "2"], capsys)
    assert rep["checks"] and all(c["status"] in ("pass", "fail", "info") for c in rep["checks"])
    assert rep["schema_version"] == "1.0" and "seconds" in rep["timing"]


def test_exit_codes(capsys):
    code, rep = run(["cohomology", "-p", "9"], capsys)
    assert code == EXIT_USAGE and rep["status"] == "error"
    code, rep = run(["galois", "--h", "3", "-n", "2", "--kind", "gl", "--budget", "10"], capsys)
    assert code == EXIT_BUDGET and rep["error"]["type"] == "BudgetExceeded"
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == EXIT_USAGE


def test_failed_check_exits_one(capsys, monkeypatch):
    from lttower import cli
    monkeypatch.setattr(cli, "expected_height", lambda *a: 99)
    code, rep = run(["fgl", "--height", "--hom-bound", "1"], capsys)
    assert code == 1 and rep["status"] == "fail"


def test_output_directory(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LTTOWER_OUTPUT_DIR", str(tmp_path))
    code, rep = run(["galois"], capsys)
    saved = json.loads((tmp_path / "galois.json").read_text())
    assert code == 0 and saved == rep
    assert [p.name for p in tmp_path.iterdir()] == ["galois.json"]  # no temp files left
    out = tmp_path / "sub" / "x.json"
    run(["galois", "-o", str(out)], capsys)
    assert out.exists()


def test_seeded_runs_are_identical(capsys):
    argv = ["cohomology", "--cyclic", "--instances", "4", "--seed", "11"]
    _, a = run(argv, capsys)
    _, b = run(argv, capsys)
    assert dumps(strip_timing(a)) == dumps(strip_timing(b))
    _, c = run(argv[:-1] + ["12"], capsys)
    assert strip_timing(c)["result"] != strip_timing(a)["result"]
