import hashlib
import json
import subprocess
import sys

import pytest

from voalab.cli import load_config, main, ConfigError

VIRASORO = """
seed = 11
suites = ["virasoro"]
maxWeight = "6"

[lattice]
type = "A1"
p = 2
"""


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_suite_catalog(capsys):
    assert main(["suites"]) == 0
    catalog = json.loads(capsys.readouterr().out)
    names = [s["name"] for s in catalog]
    assert len(names) >= 10
    for required in ("virasoro", "screening-commute", "triplet-kernel", "strong-generation", "c2-structure",
                     "singlet-zhu", "tv1-com2", "locality", "log-deform", "wpp2-generators"):
        assert required in names
    assert all(s["anchor"] for s in catalog)


def test_virasoro_run_passes(tmp_path):
    out = tmp_path / "r.json"
    assert main(["run", "--config", write(tmp_path, VIRASORO), "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert body["status"] == "pass"
    assert body["config"]["lattice"] == {"type": "A1", "p": 2}
    assert body["config"]["seed"] == 11
    for check in body["suites"][0]["checks"]:
        assert set(check) == {"name", "anchor", "status", "details", "counterexample"}
        assert check["status"] == "pass"
    assert "timings" not in body


def test_rerun_is_byte_identical(tmp_path, monkeypatch):
    cfg = write(tmp_path, VIRASORO)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["run", "--config", cfg, "--out", str(a)]) == 0
    monkeypatch.setenv("VOALAB_THREADS", "2")
    assert main(["run", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    side = json.loads((tmp_path / "b.json.timings.json").read_text())
    assert side["workers"] == 2
    assert side["canonicalSha256"] == hashlib.sha256(b.read_bytes()).hexdigest()


def test_parallel_workers_give_same_report(tmp_path, monkeypatch):
    cfg = write(tmp_path, VIRASORO.replace('["virasoro"]', '["virasoro", "triplet-kernel", "character"]'))
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    monkeypatch.setenv("VOALAB_THREADS", "1")
    assert main(["run", "--config", cfg, "--out", str(a)]) == 0
    monkeypatch.setenv("VOALAB_THREADS", "3")
    assert main(["run", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_csv_has_dimension_tables_only(tmp_path):
    out = tmp_path / "dims.csv"
    cfg = write(tmp_path, VIRASORO.replace('["virasoro"]', '["character"]'))
    assert main(["run", "--config", cfg, "--out", str(out), "--format", "csv"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "suite,table,weight,dim"
    assert "character,M(1) graded dimension,6,11" in lines


def test_failed_check_exits_one(tmp_path):
    text = VIRASORO.replace('["virasoro"]', '["tv1-com2"]') + "\n[params.tv1-com2]\nlevels = 1\nmodeRange = 1\n"
    out = tmp_path / "r.json"
    assert main(["run", "--config", write(tmp_path, text), "--out", str(out)]) == 1
    body = json.loads(out.read_text())
    failed = [c for s in body["suites"] for c in s["checks"] if c["status"] == "fail"]
    assert failed and all(c["counterexample"] for c in failed)


@pytest.mark.parametrize("text", [
    VIRASORO.replace('["virasoro"]', '["nonexistent"]'),
    VIRASORO.replace('"6"', "6.5"),
    VIRASORO.replace("p = 2", "p = 2\npprime = 3"),
    VIRASORO.replace('["virasoro"]', '["wpp2-generators"]'),
    VIRASORO + "\n[params.virasoro]\nbogus = 1\n",
    VIRASORO + "\nextra = 1\n",
    "suites = [\"virasoro\"]\n",
    "not toml ==",
])
def test_config_errors_exit_two(tmp_path, text, capsys):
    assert main(["run", "--config", write(tmp_path, text)]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_suite_rejected_before_work():
    with pytest.raises(ConfigError):
        load_config(VIRASORO.replace('["virasoro"]', '["virasoro", "nonexistent"]'))


def test_missing_config_and_bad_threads(tmp_path, monkeypatch):
    assert main(["run", "--config", str(tmp_path / "missing.toml")]) == 2
    monkeypatch.setenv("VOALAB_THREADS", "zero")
    assert main(["run", "--config", write(tmp_path, VIRASORO)]) == 2


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2


def test_char_command(capsys):
    assert main(["char", "--p", "2", "--coset", "3/4", "--max-weight", "35/8"]) == 0
    assert capsys.readouterr().out.splitlines() == ["weight,dim", "3/8,2", "11/8,2", "19/8,4", "27/8,6", "35/8,12"]
    assert main(["char", "--p", "2", "--coset", "0", "--max-weight", "6", "--fock-only"]) == 0
    assert capsys.readouterr().out.splitlines()[1:] == [f"{w},{d}" for w, d in enumerate([1, 1, 2, 3, 5, 7, 11])]


def test_char_rejects_bad_rational(capsys):
    assert main(["char", "--p", "2", "--coset", "x/y", "--max-weight", "3"]) == 2


def test_console_script(tmp_path):
    cfg = write(tmp_path, VIRASORO.replace('["virasoro"]', '["character"]'))
    proc = subprocess.run([sys.executable, "-m", "voalab.cli", "run", "--config", cfg], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["schemaVersion"] == 1
