import io
import subprocess
import sys

import pytest

from torsorext.catalog import EXAMPLES
from torsorext.cli import main


def run(argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("key", sorted(EXAMPLES))
def test_example_exit_codes(key):
    code, out, err = run(["examples", "--id", key])
    assert code == (2 if key == "guard-stop" else 0), err
    if code == 2:
        assert "offending fibre" in err


def test_listing_and_show():
    code, out, _ = run(["examples"])
    assert code == 0 and set(out.split()) == set(EXAMPLES)
    code, out, _ = run(["examples", "--id", "extend-direct", "--show"])
    assert out == EXAMPLES["extend-direct"]


def test_output_is_deterministic():
    a = run(["examples", "--id", "extend-blowup"])[1]
    b = run(["examples", "--id", "extend-blowup"])[1]
    assert a == b


@pytest.mark.parametrize("key", ["extend-direct", "iterate", "extend-blowup", "m-group"])
def test_result_document_verifies(key, tmp_path):
    code, out, _ = run(["examples", "--id", key])
    assert code == 0
    path = tmp_path / "result.txt"
    path.write_text(out)
    code, vout, err = run(["verify", "-i", str(path)])
    assert code == 0, err
    assert vout.strip().endswith("result: PASS")


def test_stdin_input(monkeypatch):
    code, out, _ = run(["blowup"], stdin=EXAMPLES["iterate"], monkeypatch=monkeypatch)
    assert code == 0 and out.startswith("torsor-problem v1")


def test_output_file(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text(EXAMPLES["iterate"])
    dst = tmp_path / "out.txt"
    code, _, _ = run(["blowup", "-i", str(src), "-o", str(dst)])
    assert code == 0 and dst.read_text().startswith("torsor-problem v1")


@pytest.mark.parametrize("mutate, where", [
    (lambda t: t.replace("relations = z^2 - z - pi^2*y", "relations = z^2 - z - pi^2*w"), "[torsor T] relations"),
    (lambda t: t.replace("p = 2", "p = 4"), "p"),
    (lambda t: t.replace("torsor-problem v1", "something else"), ""),
])
def test_input_errors_exit_one(mutate, where, tmp_path):
    src = tmp_path / "bad.txt"
    src.write_text(mutate(EXAMPLES["iterate"]))
    code, _, err = run(["blowup", "-i", str(src)])
    assert code == 1
    assert where in err


def test_missing_file():
    code, _, err = run(["verify", "-i", "/nonexistent/problem.txt"])
    assert code == 1 and "cannot read" in err


def test_too_many_blowups():
    code, _, err = run(["blowup", "-i", "-", "--times", "3"], stdin=EXAMPLES["iterate"],
                       monkeypatch=pytest.MonkeyPatch())
    assert code == 2 and "offending fibre" in err


def test_fuzz_roundtrip():
    code, out, _ = run(["fuzz-roundtrip", "--count", "20", "--p", "3"])
    assert code == 0 and "20/20" in out


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "torsorext.cli", "examples"], capture_output=True, text=True)
    assert res.returncode == 0 and "extend-direct" in res.stdout
