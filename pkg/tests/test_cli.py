import json

import pytest

from wittdisp.cli import main
from wittdisp.config import CACHE_ENV
from wittdisp.rings import FiniteField
from wittdisp.witt import WittRing


@pytest.fixture(autouse=True)
def _no_disk_cache(monkeypatch):
    monkeypatch.delenv(CACHE_ENV, raising=False)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_slopes(capsys):
    code, body = _run(capsys, ["slopes", "--b", "[[1,0],[0,2]]"])
    assert code == 0
    assert body["kind"] == "slopes"
    assert body["slopes"] == [["0/1", 1], ["1/1", 1]]


def test_adlv_gl1(capsys):
    code, body = _run(capsys, ["adlv", "--h", "1", "--d", "0", "--window", "3"])
    assert code == 0
    assert body["count"] == 7
    assert body["label"] == "fixed-point count at extension 1"


def test_adlv_table(capsys):
    code = main(["adlv", "--h", "1", "--d", "0", "--max-extension", "2", "--table"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == 0
    assert lines[1:] == ["1\t3", "2\t3"]


def test_witt_add(capsys):
    code, body = _run(capsys, ["witt", "add", "--n", "2", "--x", "[1,0]", "--y", "[1,0]"])
    W = WittRing.over(FiniteField.of(2), 2)
    assert code == 0
    assert body["result"]["coeffs"] == W.vec([0, 1]).to_json()["coeffs"]


def test_precondition_exit_code(capsys):
    code, body = _run(capsys, ["witt", "add", "--p", "4"])
    assert code == 2
    assert body["error"] == "ConfigError"


def test_resource_cap_exit_code(capsys):
    code, body = _run(capsys, ["classify", "--n", "1", "--cap", "10"])
    assert code == 3
    assert body["error"] == "SearchSpaceTooLarge"


def test_selftest_quick(capsys):
    code, body = _run(capsys, ["selftest", "--quick", "--only", "ghost_identities"])
    assert code == 0
    assert body["ok"]
    assert list(body["properties"]) == ["ghost_identities"]


def test_output_file(tmp_path, capsys):
    out = tmp_path / "slopes.json"
    code = main(["slopes", "--b", "[[1,0],[0,2]]", "-o", str(out)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text(encoding="utf-8"))["kind"] == "slopes"


def test_deform_lifts(capsys):
    code, body = _run(capsys, ["deform", "lifts", "--U0", "[[0,1],[1,0]]", "--n", "2"])
    assert code == 0
    assert body["count"] == 2
