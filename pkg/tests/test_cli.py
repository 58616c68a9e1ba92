import io
import json
import subprocess
import sys
import time

import pytest

from bapal import cli, fmp
from bapal.kripke import save
from bapal.syntax import to_text


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    text = out.getvalue()
    data = json.loads(text) if text.strip().startswith("{") else text
    return code, data, err.getvalue()


@pytest.fixture
def fig1(tmp_path):
    path = tmp_path / "fig1.json"
    save(fmp.fig1_model(), path)
    return str(path)


def test_parse():
    code, out, _ = run("parse", "[K a p] K b q")
    assert code == 0 and out["modal_depth"] == 2 and out["quantifier_depth"] == 0
    assert out["config"]["engine"] == "pruned"


def test_parse_closure():
    code, out, _ = run("parse", "--closure", "K a p")
    assert code == 0 and len(out["closure"]) == 6 and out["fresh_count"] == "6"


def test_formula_from_file(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("p & ~p\n")
    code, out, _ = run("sat", "--formula", f"@{f}")
    assert code == 1 and out["outcome"] == "unsat"


def test_nf():
    code, out, _ = run("nf", "[p] q")
    assert code == 0 and out["steps"][0]["axiom"] == "AP"


def test_sat_outcomes():
    assert run("sat", "p & ~p")[0] == 1
    code, out, _ = run("sat", "p & ~K a p")
    assert code == 0 and out["witness"]["state"]
    code, out, _ = run("--engine", "faithful", "sat", "box p")
    assert code == 2 and out["exhausted"]["dimension"] == "engine"


def test_check_fig1(fig1, tmp_path):
    f = tmp_path / "fmp.txt"
    f.write_text(to_text(fmp.fmp_formula()))
    code, out, _ = run("check", "--model", fig1, "--world", "A", "--formula", f"@{f}")
    assert code == 1 and out["value"] is False
    assert run("check", "--model", fig1, "x")[0] == 0  # designated world A


def test_ext(fig1):
    code, out, _ = run("ext", "--model", fig1, "x")
    assert out["extension"] == ["A", "B"]


def test_bisim(fig1):
    code, out, _ = run("bisim", "--model", fig1, "--world", "A", "--other-world", "B")
    assert code == 1 and out["bisimilar"] is False
    code, out, _ = run("bisim", "--kind", "q", "--atoms", "x", "--model", fig1, "--world", "B",
                       "--other-world", "B")
    assert code == 0 and out["witness"]["atoms"] == ["x"]
    code, out, _ = run("bisim", "--kind", "n", "--depth", "0", "--model", fig1, "--world", "C",
                       "--other-world", "D")
    assert code == 1
    assert run("bisim", "--kind", "n", "--model", fig1)[0] == 64


def test_image_and_actualise(fig1, tmp_path):
    code, out, _ = run("image", "--model", fig1, "K b x")
    assert code == 0 and len(out["worlds"]) == 4
    out.pop("config")
    pm = tmp_path / "pm.json"
    pm.write_text(json.dumps(out))
    code, out, _ = run("actualise", "--pseudo", str(pm), "--copies", "2")
    assert code == 0 and len(out["worlds"]) == 8
    assert out["metadata"]["copies"] == 2


def test_fmp_command():
    code, out, _ = run("fmp", "--max-worlds", "3")
    assert code == 0 and out["outcome"] == "none_found"
    assert out["fig1_failing_conjuncts"] == [5]


def test_gen_deterministic():
    a = run("gen", "--seed", "4")[1]
    b = run("gen", "--seed", "4")[1]
    assert a == b and a["metadata"]["seed"] == 4


def test_byte_identical_output():
    outs = set()
    for _ in range(2):
        buf = io.StringIO()
        cli.run(["sat", "K a p & ~K b p"], buf, io.StringIO())
        outs.add(buf.getvalue())
    assert len(outs) == 1


def test_text_format():
    code, out, _ = run("--format", "text", "parse", "p")
    assert code == 0 and "modal_depth: 0" in out


@pytest.mark.parametrize("argv,code", [
    ([], 64),
    (["sat"], 64),
    (["bogus"], 64),
    (["sat", "p &"], 65),
    (["check", "--model", "/nonexistent.json", "p"], 65),
])
def test_error_codes(argv, code):
    got, _, err = run(*argv)
    assert got == code and err.startswith("bapal:")


def test_bad_model_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"worlds": ["u"], "relations": {"a": [["v"]]}, "agents": ["a"]}')
    assert run("ext", "--model", str(path), "p")[0] == 65


def test_config_file_and_env(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"engine": "faithful", "seed": 9}))
    code, out, _ = run("--config", str(cfg), "sat", "p")
    assert out["engine"] == "faithful" and out["config"]["seed"] == 9
    monkeypatch.setenv(cli.CONFIG_ENV, str(cfg))
    assert run("gen")[1]["metadata"]["seed"] == 9
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert run("--config", str(cfg), "parse", "p")[0] == 65


def test_timeout_is_honoured():
    start = time.monotonic()
    code, out, _ = run("sat", "--timeout", "0.5", "dia K a p & ~p")
    assert code == 2 and out["outcome"] == "resource_exhausted"
    assert time.monotonic() - start < 1.0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bapal", "parse", "K a p"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["modal_depth"] == 1
