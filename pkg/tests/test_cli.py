import io
import json
import subprocess
import sys

import pytest

from kbeta import catalog_build, presfile
from kbeta.catalog import CatalogKey, path_for
from kbeta.cli import run


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def invoke_json(*argv):
    code, text = invoke(*argv, "--json", "--no-timings")
    return code, json.loads(text)


def test_validate_p33():
    code, doc = invoke_json("validate", "--family", "P33", "--p", "3", "--cap", "8")
    assert code == 0
    assert doc["passed"] is True
    for field in ("command", "key", "checks", "passed", "solutions", "dims", "timings_ms"):
        assert field in doc
    assert doc["dims"][0]["values"] == [1, 2, 4, 6, 7, 8, 9, 10, 12]


def test_rigidity_p33_text():
    code, text = invoke("rigidity", "--family", "P33", "--p", "3", "--cap", "8")
    assert code == 0
    assert "all surjective: true" in text
    assert "#0: identity" in text


def test_compare_ppn4():
    code, doc = invoke_json("compare", "--family", "Ppn", "--p", "3", "--n", "4", "--cap", "6")
    assert code == 0
    rows = [d["values"] for d in doc["dims"]]
    assert len(rows) == 2 and rows[0] == rows[1]


def test_compare_failure_exits_one(tmp_path):
    pres = presfile.load(path_for(CatalogKey("P33", 3))).without_relation("yy'=0")
    f = tmp_path / "broken.json"
    presfile.dump(pres, f)
    code, doc = invoke_json("compare", "--family", "P33", "--p", "3", "--file", str(f), "--cap", "4")
    assert code == 1
    (check,) = doc["checks"]
    assert check["status"] == "fail" and check["degree"] == 2


@pytest.mark.parametrize("argv", [
    ["validate"],
    ["validate", "--family", "P33"],
    ["validate", "--family", "P33", "--p", "5"],
    ["betti", "--family", "Cyclic", "--p", "3", "--i", "1"],
    ["tower", "--family", "P33", "--p", "3"],
    ["hilbert", "--family", "P33", "--p", "3", "--cap", "0"],
    ["rigidity", "--file", "/nonexistent.json"],
])
def test_usage_errors_exit_two(argv):
    code, _ = invoke(*argv)
    assert code == 2


def test_unknown_command_exits_two():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2


def test_reports_are_byte_stable():
    argv = ("bss", "--family", "Ppn", "--p", "3", "--n", "5", "--json", "--no-timings")
    assert invoke(*argv) == invoke(*argv)


def test_timings_present_by_default():
    code, text = invoke("hilbert", "--family", "P33", "--p", "3", "--json")
    assert code == 0
    assert "hilbert" in json.loads(text)["timings_ms"]


def test_bss_cyclic():
    code, doc = invoke_json("bss", "--family", "Cyclic", "--p", "3", "--i", "3")
    assert code == 0
    assert doc["dims"][-1] == {"name": "E_4", "values": [1, 0, 0, 0, 0, 0, 0, 0, 0]}


def test_tower_and_weakgen():
    assert invoke("tower", "--family", "Ppn", "--p", "3", "--n", "6")[0] == 0
    code, doc = invoke_json("weakgen", "--family", "P33", "--p", "3")
    assert code == 0 and doc["scanned"] == 48


def test_p5_rigidity_defaults_to_forced_steps():
    code, doc = invoke_json("rigidity", "--family", "Pp3", "--p", "5")
    assert code == 0
    assert doc["forced_steps"]["passed"] is True
    assert doc["solutions"] == []


def test_p5_full_scan_respects_budget():
    code, doc = invoke_json("rigidity", "--family", "Pp3", "--p", "5", "--full", "--budget", "3")
    assert code == 1
    assert doc["checks"][0]["check"] == "search"


def test_lambda_variant_file(tmp_path):
    f = tmp_path / "lam2.json"
    presfile.dump(catalog_build.pp3(p=5, lam=2), f)
    code, doc = invoke_json("rigidity", "--file", str(f))
    assert code == 0 and doc["forced_steps"]["passed"]


def test_data_dir_env(tmp_path, monkeypatch):
    key = CatalogKey("Cyclic", 3, None, 1)
    (tmp_path / f"{key.stem}.json").write_text(path_for(key).read_text())
    monkeypatch.setenv("KBETA_DATA_DIR", str(tmp_path))
    assert invoke("hilbert", "--family", "Cyclic", "--p", "3", "--i", "1")[0] == 0
    assert invoke("hilbert", "--family", "Cyclic", "--p", "3", "--i", "2")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kbeta", "hilbert", "--family", "Cyclic", "--p", "5",
                           "--i", "1", "--cap", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "hilbert: 1 1 1 1" in proc.stdout
