import json

import pytest

from dlsat import cli
from dlsat.syntax import parse_knowledge_base


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def test_sat_unsat(capsys, files):
    code, out, _ = run(capsys, "sat", files("u.cpt", "A & !A\n"))
    assert code == 1 and "verdict: unsatisfiable" in out


def test_sat_applies_nnf(capsys, files):
    code, out, _ = run(capsys, "sat", files("n.cpt", "!(A | !A)\n"))
    assert code == 1
    code, out, _ = run(capsys, "sat", files("m.cpt", "!(A & !A)\n"))
    assert code == 0 and out.startswith("verdict: satisfiable")


def test_sat_with_tbox_and_model(capsys, files):
    c = files("c.cpt", "A\n")
    kb = files("kb.kb", "gci A <= some r. A\n")
    code, out, _ = run(capsys, "sat", c, "--tbox", kb, "--model")
    assert code == 0 and "verdict: satisfiable" in out
    assert "domain: 0" in out and "r: (0,0)" in out
    code, out, _ = run(capsys, "sat", c, "--tbox", kb, "--model", "--json")
    data = json.loads(out)
    assert data["model"] == {"domain": [0], "atoms": {"A": [0]}, "roles": {"r": [[0, 0]]}}


def test_sat_engine_with_tbox_is_an_input_error(capsys, files):
    code, _, err = run(capsys, "sat", files("c.cpt", "A\n"), "--engine", "sat",
                       "--tbox", files("kb.kb", "gci A <= B\n"))
    assert code == 2 and "empty TBox" in err


@pytest.mark.parametrize("engine", ["tableau", "sat", "bruteforce"])
def test_engines_agree(capsys, files, engine):
    c = files("c.cpt", "some r. A & some r. !A & only r. (A | B)\n")
    code, out, _ = run(capsys, "sat", c, "--engine", engine, "--max-domain", "3")
    assert code == 0 and out.splitlines()[0] == "verdict: satisfiable"


def test_parse_error_exit_code(capsys, files):
    code, _, err = run(capsys, "sat", files("bad.cpt", "A & & B\n"))
    assert code == 2 and "1:5: syntax-error" in err
    code, _, err = run(capsys, "sat", "/nonexistent/x.cpt")
    assert code == 2
    code, _, err = run(capsys, "sat", files("c.cpt", "A\n"), "--tbox",
                       files("cyc.kb", "def A = B\ndef B = A\n"))
    assert code == 2 and "cyclic-definition" in err


def test_no_color_when_piped(capsys, files, monkeypatch):
    monkeypatch.delenv("NO_COLOR", raising=False)
    _, out, _ = run(capsys, "sat", files("c.cpt", "A\n"))
    assert "\033[" not in out


def test_analyze(capsys, files):
    code, out, _ = run(capsys, "analyze", files("c.cpt", "some r. A & only r. B\n"))
    assert code == 0
    assert "union_count=0" in out and "full_existential_count=1" in out
    assert "fragment=ALE" in out
    code, out, _ = run(capsys, "analyze", files("a.cpt", "A | B\n"), "--json")
    data = json.loads(out)
    assert data["fragment"] == "ALU" and ["existentials", "para-NP-c"] in data["regimes"]
    code, out, _ = run(capsys, "analyze", files("a.cpt", "A\n"), "--tbox",
                       files("kb.kb", "def A = some r. B\ngci top <= A\n"), "--json")
    assert json.loads(out)["impacted_size"] == 4


def test_reduce(capsys, files, tmp_path):
    out_path = tmp_path / "out.kb"
    code, out, _ = run(capsys, "reduce", files("g.kb", "gci B <= C\ngci C <= B\n"),
                       "--out", str(out_path))
    assert code == 0 and "fresh: Fresh" in out
    kb = parse_knowledge_base(out_path.read_text())
    assert len(kb.gcis) == 1 and kb.definitions[0][0] == "Fresh"
    code, out, _ = run(capsys, "reduce", files("e.kb", ""))
    assert code == 0 and "def Fresh = top" in out
    code, _, err = run(capsys, "reduce", files("d.kb", "def A = B\n"))
    assert code == 2


def test_encode(capsys, files):
    code, out, _ = run(capsys, "encode", files("c.cpt", "A & !A\n"))
    assert code == 0 and "p cnf 3 4" in out
    code, _, _ = run(capsys, "encode", files("c.cpt", "A\n"), "--tbox", files("k.kb", ""))
    assert code == 2


def test_gen(capsys, tmp_path):
    code, first, _ = run(capsys, "gen", "--seed", "1", "--unions", "2", "--existentials", "1")
    _, second, _ = run(capsys, "gen", "--seed", "1", "--unions", "2", "--existentials", "1")
    assert code == 0 and first == second
    code, _, _ = run(capsys, "gen", "--existentials", "1", "--max-depth", "0")
    assert code == 2
    code, _, _ = run(capsys, "gen", "--count", "3", "--gcis", "1", "--out", str(tmp_path / "corp"))
    assert code == 0
    assert len(list((tmp_path / "corp").glob("*.cpt"))) == 3
    assert len(list((tmp_path / "corp").glob("*.kb"))) == 3


def _corpus(tmp_path, n=10):
    d = tmp_path / "corpus"
    d.mkdir()
    for i in range(n):
        (d / f"u{i:02d}.cpt").write_text(f"A{i} & !A{i}\n")
    return d


def test_bench_trivially_unsat(capsys, tmp_path):
    d = _corpus(tmp_path)
    code, out, _ = run(capsys, "bench", str(d), "--engines", "tableau,bruteforce")
    records = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and len(records) == 20
    assert all(r["verdict"] == "unsatisfiable" for r in records)
    assert list(records[0])[:3] == ["instance", "engine", "verdict"]


def test_bench_detects_disagreement(capsys, tmp_path, monkeypatch):
    d = _corpus(tmp_path, 3)
    real = cli.ENGINES["sat"]

    def lying(c, kb, max_domain):
        out = real(c, kb, max_domain)
        if "A1" in str(c):
            out.verdict = "satisfiable"
        return out

    monkeypatch.setitem(cli.ENGINES, "sat", lying)
    code, _, err = run(capsys, "bench", str(d), "--engines", "tableau,sat")
    assert code == 3 and "u01" in err


def test_bench_bounded_no_model_against_small_model(capsys, tmp_path, monkeypatch):
    d = tmp_path / "c"
    d.mkdir()
    (d / "x.cpt").write_text("A\n")
    real = cli.ENGINES["bruteforce"]

    def blind(c, kb, max_domain):
        out = real(c, kb, max_domain)
        return cli.Outcome("unsatisfiable", False, out.stats)

    monkeypatch.setitem(cli.ENGINES, "bruteforce", blind)
    code, _, _ = run(capsys, "bench", str(d), "--engines", "tableau,bruteforce")
    assert code == 3


def test_bench_empty_corpus(capsys, tmp_path, files):
    (tmp_path / "empty").mkdir()
    code, out, _ = run(capsys, "bench", str(tmp_path / "empty"))
    assert code == 0 and out == ""
    code, _, _ = run(capsys, "bench", str(tmp_path / "empty"), "--engines", "nope")
    assert code == 2


def test_bench_with_tbox_skips_sat(capsys, tmp_path):
    d = tmp_path / "c"
    d.mkdir()
    (d / "x.cpt").write_text("A\n")
    (d / "x.kb").write_text("gci A <= some r. A\n")
    code, out, _ = run(capsys, "bench", str(d), "--engines", "tableau,sat,bruteforce")
    verdicts = [json.loads(l)["verdict"] for l in out.splitlines()]
    assert code == 0 and verdicts == ["satisfiable", "skipped", "satisfiable"]
