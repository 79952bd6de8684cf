from __future__ import annotations

import io as stdio
import json

import pytest

from modpchain import io
from modpchain.chain import IntegerChain
from modpchain.cli import RunConfig, main, run
from modpchain.complex import build_complex
from modpchain.errors import ParamOutOfRange


def call(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(path, K, **chains):
    io.write_json(path, io.chain_document(K, chains))
    return path


@pytest.fixture
def bundle(tmp_path, capsys):
    path = tmp_path / "pb.json"
    code, _, _ = call(["gen", "parallel-bundle", "--k", 2, "--seed", 0, "--out", path], capsys)
    assert code == 0
    return path


def test_repair_then_verify(tmp_path, bundle, capsys):
    out, cert = tmp_path / "out.json", tmp_path / "cert.json"
    code, text, _ = call(["repair", "--p", 2, "--in", bundle, "--out", out, "--cert", cert, "--json"], capsys)
    assert code == 0
    report = json.loads(text)
    assert report["iterations"] == 1 and report["coeffs"] == {"0": -1, "1": 1}
    assert len(json.loads(cert.read_text())["trace"]) == 1
    code, text, _ = call(["verify", "--p", 2, bundle, out, cert], capsys)
    assert code == 0 and "FAIL" not in text and text.count("PASS") == 6


def test_verify_rejects_tampering(tmp_path, bundle, capsys):
    out, cert = tmp_path / "out.json", tmp_path / "cert.json"
    call(["repair", "--p", 2, "--in", bundle, "--out", out, "--cert", cert], capsys)
    doc = json.loads(cert.read_text())
    doc["quotient"] = {"0": -2}
    cert.write_text(json.dumps(doc))
    code, text, _ = call(["verify", "--p", 2, bundle, out, cert], capsys)
    assert code == 1 and "FAIL divisibility" in text
    code, _, _ = call(["verify", "--p", 3, bundle, out, cert], capsys)
    assert code == 1


def test_equiv_codes(tmp_path, capsys):
    K = build_complex([[0], [1]], [(0, 1)])
    a = write(tmp_path / "a.json", K, T=IntegerChain(K, 1, {0: 4}))
    b = write(tmp_path / "b.json", K, T=IntegerChain(K, 1, {0: 1}))
    code, text, _ = call(["equiv", "--p", 3, a, b, "--json"], capsys)
    assert code == 0 and json.loads(text)["quotient"] == {"0": 1}
    code, _, _ = call(["equiv", "--p", 2, a, b], capsys)
    assert code == 1


def test_flatnorm_single_edge(tmp_path, capsys):
    K = build_complex([[0], [3]], [(0, 1)])
    f = write(tmp_path / "e.json", K, T=IntegerChain(K, 0, {0: -1, 1: 1}))
    code, text, _ = call(["flatnorm", "--p", 2, "--bound", 3, "--in", f, "--json"], capsys)
    assert code == 0 and json.loads(text)["value"] == 2
    code, text, _ = call(["flatnorm", "--in", f, "--relax", "--json"], capsys)
    rep = json.loads(text)
    assert rep["value"] == rep["relaxation"] == 2


def test_flatnorm_rational_value(tmp_path, capsys):
    K = build_complex([[0], ["1/2"]], [(0, 1)])
    f = write(tmp_path / "e.json", K, T=IntegerChain(K, 0, {0: -1, 1: 1}))
    code, text, _ = call(["flatnorm", "--in", f, "--json"], capsys)
    rep = json.loads(text)
    assert rep["value"] == "1/2" and rep["exact"] is True and rep["S"] == {"0": 1}


def test_flatnorm_guardrail(tmp_path, capsys):
    K = build_complex([[0], [1]], [(0, 1)] * 13)
    f = write(tmp_path / "big.json", K, T=IntegerChain(K, 0, {0: 1, 1: -1}))
    code, _, err = call(["flatnorm", "--in", f], capsys)
    assert code == 2 and "limit" in err
    code, _, _ = call(["flatnorm", "--in", f, "--force"], capsys)
    assert code == 0


def test_select_and_pmass(tmp_path, capsys):
    K = build_complex([[0], [1]], [(0, 1)])
    f = write(tmp_path / "t.json", K, T=IntegerChain(K, 1, {0: 5}))
    code, text, _ = call(["select", "--p", 3, "--in", f], capsys)
    assert code == 0 and json.loads(text)["chains"]["select"]["coeffs"] == {"0": -1}
    code, text, _ = call(["pmass", "--p", 3, "--in", f, "--json"], capsys)
    assert json.loads(text)["pmass"] == 1


def test_grid_commands(tmp_path, capsys):
    g = tmp_path / "g.json"
    g.write_text('{"version": 1, "dims": [3], "theta": [1, 2, 1]}')
    code, text, _ = call(["grid-check", "--p", 3, "--theta", g, "--json"], capsys)
    rep = json.loads(text)
    assert code == 0 and rep["select_boundary_mass"] == 6 and rep["bound"] == 8 and rep["ratio"] == "3/4"
    code, _, err = call(["grid-check", "--p", 3, "--theta", g, "--dims", "4,4"], capsys)
    assert code == 2 and "dims" in err
    rd = tmp_path / "rd"
    code, text, _ = call(["grid-random", "--p", 3, "--dims", "4,4", "--range", 9, "--seed", 7, "--count", 5, "--report-dir", rd, "--json"], capsys)
    assert code == 0 and json.loads(text)["failures"] == 0
    assert (rd / "grid_sweep.tsv").read_text().count("\n") == 6
    assert (rd / "grid_sweep.png").read_bytes().startswith(b"\x89PNG")


def test_gen_random_grid_is_valid(tmp_path, capsys):
    code, text, _ = call(["gen", "random-grid", "--dims", "3,3", "--range", 10, "--seed", 7], capsys)
    assert code == 0
    doc = io.parse_json(text)
    io.validate(doc, "grid_document")
    assert io.grid_from_document(doc).dims == (3, 3)


def test_gen_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        call(["gen", "random-1chain", "--seed", 1, "--out", f], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_zerosum_and_cone(tmp_path, capsys):
    K = build_complex([[0, 0], [2, 0]], [])
    f = write(tmp_path / "r.json", K, R=IntegerChain(K, 0, {0: -1, 1: 1}))
    code, _, _ = call(["zerosum", "--p", 2, "--in", f], capsys)
    assert code == 0
    g = write(tmp_path / "r1.json", K, R=IntegerChain(K, 0, {0: 1}))
    code, _, _ = call(["zerosum", "--p", 2, "--in", g], capsys)
    assert code == 1
    out = tmp_path / "cone.json"
    code, _, _ = call(["cone", "--in", f, "--apex", "1,1", "--out", out], capsys)
    assert code == 0
    K2, chains = io.read_chains(out)
    assert chains["cone"].coeffs == {0: -1, 1: 1}
    code, _, err = call(["cone", "--in", f, "--apex", "0,0"], capsys)
    assert code == 2 and "apex" in err
    code, _, _ = call(["cone", "--in", f, "--apex", "0.5,1"], capsys)
    assert code == 2


def test_usage_errors(tmp_path, capsys):
    assert call(["pmass", "--in", "x.json"], capsys)[0] == 2
    assert call([], capsys)[0] == 2
    assert call(["gen", "path-graph"], capsys)[0] == 2
    assert call(["gen", "path-graph", "--seed", -1], capsys)[0] == 2
    code, _, err = call(["pmass", "--p", 3, "--in", tmp_path / "missing.json"], capsys)
    assert code == 2 and "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{"version": 1,\n "vertices": [[0.5]]}')
    code, _, err = call(["pmass", "--p", 3, "--in", bad], capsys)
    assert code == 2


def test_internal_error_exit_code(tmp_path, bundle, capsys, monkeypatch):
    import importlib

    rp = importlib.import_module("modpchain.repair")
    monkeypatch.setattr(rp, "flip_along_path", lambda chain, path, p: chain)
    code, _, err = call(["repair", "--p", 2, "--in", bundle, "--out", tmp_path / "o.json"], capsys)
    assert code == 3 and "internal" in err


def test_manifest(tmp_path, bundle, capsys):
    m = tmp_path / "runs.json"
    m.write_text(json.dumps({"version": 1, "runs": [
        {"args": ["pmass", "--p", "2", "--in", str(bundle)]},
        {"args": ["zerosum", "--p", "2", "--in", str(bundle)]},
    ]}))
    code, out, err = call(["--manifest", m], capsys)
    # the second run fails: the bundle holds a 1-chain
    assert code == 2 and "# run 0 exit 0" in err and "# run 1 exit 2" in err
    assert out.startswith("p: 2")


def test_run_config_invariants():
    with pytest.raises(ParamOutOfRange):
        RunConfig("repair")
    with pytest.raises(ParamOutOfRange):
        RunConfig("gen", options={"kind": "path-graph"})
    with pytest.raises(ParamOutOfRange):
        RunConfig("select", p=1)
    buf = stdio.StringIO()
    code = run(RunConfig("gen", seed=3, options={"kind": "path-graph", "n": 2}), buf, stdio.StringIO())
    assert code == 0 and json.loads(buf.getvalue())["edges"] == [[0, 1], [1, 2]]
