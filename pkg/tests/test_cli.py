"""CLI behavior and byte-stable golden outputs for the shipped documents."""

import contextlib
import io
import json
import os
import pathlib
import subprocess
import sys

import pytest

from limitspace import cli

ROOT = pathlib.Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"

sys.path.insert(0, str(ROOT / "scripts"))
from regen_golden import GOLDEN_COMMANDS, run_cli  # noqa: E402


@pytest.fixture(autouse=True)
def _in_repo_root(monkeypatch):
    monkeypatch.chdir(ROOT)


@pytest.mark.parametrize("name,argv", GOLDEN_COMMANDS,
                         ids=[n for n, _ in GOLDEN_COMMANDS])
def test_golden_outputs(name, argv):
    code, out = run_cli(argv)
    assert out == (GOLDEN / f"{name}.out").read_text(encoding="utf-8")
    assert f"{code}\n" == (GOLDEN / f"{name}.exit").read_text(encoding="utf-8")


def test_golden_outputs_are_run_to_run_stable():
    for name, argv in GOLDEN_COMMANDS[:6]:
        assert run_cli(argv) == run_cli(argv)


@pytest.mark.parametrize("seed", ["0", "1", "random"])
def test_byte_stability_across_hash_seeds(seed):
    env = dict(os.environ, PYTHONHASHSEED=seed, PYTHONPATH=str(ROOT / "src"))
    by_name = dict(GOLDEN_COMMANDS)
    for name in ("pi1_cycle", "quotient_limit"):
        argv = by_name[name]
        proc = subprocess.run(
            [sys.executable, "-m", "limitspace.cli", *argv],
            capture_output=True, text=True, env=env, cwd=ROOT)
        assert proc.stdout == (GOLDEN / f"{name}.out").read_text(encoding="utf-8")


def test_quotient_modes_agree_bytewise():
    _, out1 = run_cli(["quotient", "data/eight_cycle.json",
                       "data/collapse_map.json", "--mode", "limit"])
    _, out2 = run_cli(["quotient", "data/eight_cycle.json",
                       "data/collapse_map.json", "--mode", "pstop"])
    assert out1 == out2


def test_exit_codes():
    assert run_cli(["is-connected", "data/eight_cycle.json"])[0] == 0
    assert run_cli(["is-connected", "data/two_points.json"])[0] == 1
    assert run_cli(["lift-map", "data/double_cover_atlas.json",
                    "data/cycle_inclusion.json", "--basepoints", "v0,e0"])[0] == 1


def test_bad_input_is_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert cli.main(["validate", str(bad)]) == 3
    assert "error:" in capsys.readouterr().err
    assert cli.main(["close", str(tmp_path / "missing.json")]) == 3


def test_validate_rejects_semantic_defects(tmp_path):
    doc = {"format": "limitspace.space/1", "points": ["a", "b"],
           "vmax": {"a": ["b"], "b": ["b"]}, "metadata": {}}
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    code, out = run_cli(["validate", str(path)])
    assert code == 1 and json.loads(out)["valid"] is False


def test_non_surjective_quotient_is_input_error(tmp_path):
    m = {"format": "limitspace.map/1",
         "table": {"a": "u", "b": "u"}}
    s = {"format": "limitspace.space/1", "points": ["a", "b"],
         "vmax": {"a": ["a"], "b": ["b"]}, "metadata": {}}
    sp = tmp_path / "s.json"
    mp = tmp_path / "m.json"
    sp.write_text(json.dumps(s), encoding="utf-8")
    mp.write_text(json.dumps(m), encoding="utf-8")
    code, _ = run_cli(["quotient", str(sp), str(mp), "--mode", "limit"])
    assert code == 0  # collapsing both points onto u is a fine surjection
    m["table"]["b"] = "w"
    m["table"]["extra"] = "u"
    mp.write_text(json.dumps(m), encoding="utf-8")
    code, _ = run_cli(["quotient", str(sp), str(mp), "--mode", "limit"])
    assert code == 0
    del m["table"]["a"]
    mp.write_text(json.dumps(m), encoding="utf-8")
    assert run_cli(["quotient", str(sp), str(mp), "--mode", "limit"])[0] == 3


def test_comma_in_product_factor_names_is_input_error(tmp_path):
    doc = {"format": "limitspace.space/1", "points": ["a,b", "c"],
           "vmax": {"a,b": ["a,b"], "c": ["c"]}, "metadata": {}}
    path = tmp_path / "odd.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    assert run_cli(["product", str(path), str(path)])[0] == 3


def test_lift_map_budget_starvation_is_exit_2():
    code, out = run_cli(["lift-map", "data/double_cover_atlas.json",
                         "data/cycle_inclusion.json",
                         "--basepoints", "v0,e0", "--budget", "1"])
    assert code == 2
    assert json.loads(out)["status"] == "indeterminate"


def test_pi1_budget_starvation_is_exit_2():
    code, out = run_cli(["pi1", "data/eight_cycle.json", "--base", "v0",
                        "--max-len", "24", "--budget", "1"])
    assert code == 2
    assert json.loads(out)["verdict"] == "inconclusive"


def test_stdin_input():
    text = (ROOT / "data" / "eight_cycle.json").read_text(encoding="utf-8")
    stdin = io.StringIO(text)
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        old = sys.stdin
        sys.stdin = stdin
        try:
            code = cli.main(["is-connected", "-"])
        finally:
            sys.stdin = old
    assert code == 0 and json.loads(buf.getvalue())["connected"] is True


def test_universal_cover_document_shape():
    code, out = run_cli(["universal-cover", "data/eight_cycle.json",
                         "--base", "v0", "--radius", "6"])
    assert code == 0
    doc = json.loads(out)
    assert doc["format"] == "limitspace.fragment/1"
    assert len(doc["classes"]) == 2 * 6 + 1 + 2  # line of 13 plus the rim
    assert doc["report"]["ok"] is True
    interior = [c for c in doc["classes"] if c["interior"]]
    assert len(interior) == 13
