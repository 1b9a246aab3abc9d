import json
import random

import pytest

from wpstensor.cli import main
from wpstensor.corpus import (
    CORPUS,
    all_systems,
    corrected_H_certificate,
    different_invariants_pair,
    e1_pair,
    literal_H_certificate,
)
from wpstensor.io import (
    DocumentError,
    dump_certificate,
    dump_element,
    dump_system,
    parse_certificate,
    parse_element,
    parse_system,
)
from wpstensor.randomized import random_element
from wpstensor.wps import matrix_system


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _result(out: str) -> dict:
    lines = [l for l in out.splitlines() if l.startswith("RESULT ")]
    assert len(lines) == 1
    return json.loads(lines[0][len("RESULT "):])


@pytest.mark.parametrize("name,system", all_systems())
def test_system_roundtrip(name, system):
    doc = dump_system(system)
    again = parse_system(json.loads(json.dumps(doc)))
    assert again == system
    assert dump_system(again) == doc


def test_shorthands():
    assert parse_system({"matrix": [[0, "2"], ["3/2", 0]]}) == matrix_system([[0, 2], ["3/2", 0]])
    g = parse_system({"graph": {"points": 2, "edges": [[1, 0], [0, 1]]}})
    assert g.finite_edge_weights == {(1, 0): 1, (0, 1): 1}


@pytest.mark.parametrize("doc,where", [
    ({"branches": []}, "document"),
    ({"space": {"type": "blob"}, "branches": []}, "space.type"),
    ({"space": {"type": "finite", "points": [0]}, "branches": [{"domain": [0], "map": [[0, 0]], "weight": [[0, 0.5]]}]},
     "branches[0].weight[0]"),
    ({"space": {"type": "intervals", "components": [["0", "1"]]},
      "branches": [{"domain": [0], "map": {"breakpoints": ["0", "1"], "values": ["0"]}, "weight": "1"}]},
     "branches[0].map.pieces[0]"),
    ({"space": {"type": "intervals", "components": [["0", "1"]]},
      "branches": [{"domain": [3], "map": "identity", "weight": "1"}]}, "branches[0].domain"),
    ({"matrix": [[0, -1], [1, 0]]}, "matrix"),
])
def test_parse_errors_name_the_field(doc, where):
    with pytest.raises(DocumentError) as exc:
        parse_system(doc)
    assert exc.value.where == where


def test_certificate_roundtrip():
    sig, _ = different_invariants_pair()
    for cert in (literal_H_certificate(), corrected_H_certificate()):
        doc = dump_certificate(cert)
        again = parse_certificate(json.loads(json.dumps(doc)), sig)
        assert again.C == cert.C and again.gamma == cert.gamma and again.H.branches == cert.H.branches


def test_element_roundtrip():
    s = matrix_system([[0, 2], [3, 1]])
    T = random_element(random.Random(0), s, 3)
    again = parse_element(json.loads(json.dumps(dump_element(T))), s)
    assert again.coeffs == {n: c for n, c in T.coeffs.items()}


def test_cli_analyze_e1(tmp_path, capsys):
    w, _ = e1_pair()
    code = main(["analyze", _write(tmp_path, "w.json", dump_system(w))])
    rec = _result(capsys.readouterr().out)
    assert code == 0
    assert rec["branching_points"] == ["0"] and rec["branching_edges"] == [["0", "0"]]
    assert rec["fixed_points"] == [["0", "1"]]


def test_cli_analyze_sink(tmp_path, capsys):
    code = main(["analyze", _write(tmp_path, "s.json", {"matrix": [[0, 1, 0], [1, 0, 0], [1, 0, 0]]})])
    out = capsys.readouterr().out
    assert code == 0 and "not well-supported" in out


def test_cli_conjugacy_exit_codes_and_replay(tmp_path, capsys):
    w, u = e1_pair()
    a, b = _write(tmp_path, "a.json", dump_system(w)), _write(tmp_path, "b.json", dump_system(u))
    assert main(["conjugacy", a, b, "--relation", "btc"]) == 1
    rec = _result(capsys.readouterr().out)
    assert rec["witness"]["edge"] == ["0", "0"]
    wit = _write(tmp_path, "wit.json", rec)
    assert main(["conjugacy", a, b, "--replay", wit]) == 1
    assert _result(capsys.readouterr().out)["replay"]["violates"] is True
    assert main(["conjugacy", a, b, "--relation", "woc"]) == 1
    assert _result(capsys.readouterr().out)["witness"]["kind"] == "forced"
    assert main(["conjugacy", a, b, "--relation", "graph"]) == 0


def test_cli_certificate_path_witness(tmp_path, capsys):
    sig, tau = different_invariants_pair()
    a, b = _write(tmp_path, "a.json", dump_system(sig)), _write(tmp_path, "b.json", dump_system(tau))
    cert = _write(tmp_path, "c.json", dump_certificate(literal_H_certificate()))
    assert main(["conjugacy", a, b, "--certificate", cert]) == 1
    rec = _result(capsys.readouterr().out)
    assert rec["witness"]["source"] == "2/3" and rec["witness"]["repeat"] == 10
    wit = _write(tmp_path, "wit.json", rec)
    assert main(["conjugacy", a, b, "--certificate", cert, "--replay", wit]) == 1
    good = _write(tmp_path, "g.json", dump_certificate(corrected_H_certificate()))
    assert main(["conjugacy", a, b, "--certificate", good]) == 0
    assert main(["conjugacy", a, b]) == 2


def test_cli_finite_woc_emits_certificate(tmp_path, capsys):
    a = _write(tmp_path, "a.json", {"matrix": [[0, 1], [1, 0]]})
    b = _write(tmp_path, "b.json", {"matrix": [[0, 2], [3, 0]]})
    assert main(["conjugacy", a, b, "--relation", "woc"]) == 0
    rec = _result(capsys.readouterr().out)
    assert rec["certificate"]["C"] == "1"


def test_cli_fock(tmp_path, capsys):
    s = _write(tmp_path, "s.json", {"matrix": [[0, 2], [3, 1]]})
    ident = _write(tmp_path, "i.json", {"N": 3, "coefficients": [{"degree": 0, "values": [[[0], "1"], [[1], "1"]]}]})
    assert main(["fock", s, ident, "--op", "norm"]) == 0
    assert _result(capsys.readouterr().out)["value"] == pytest.approx(1.0)
    T = random_element(random.Random(1), matrix_system([[0, 2], [3, 1]]), 3)
    el = _write(tmp_path, "t.json", dump_element(T))
    assert main(["fock", s, el, "--op", "fourier"]) == 0
    assert _result(capsys.readouterr().out)["reassembled_identical"] is True
    w, _ = e1_pair()
    iv = _write(tmp_path, "w.json", dump_system(w))
    assert main(["fock", iv, ident]) == 3


def test_cli_input_errors(tmp_path, capsys):
    assert main(["analyze", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["analyze", str(bad)]) == 3
    assert main(["examples", "no-such-entry"]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["conjugacy", "only-one.json"])
    assert exc.value.code == 3


def test_cli_examples_all(capsys):
    assert main(["examples", "all"]) == 0
    rec = _result(capsys.readouterr().out)
    assert rec["all_ok"] and set(rec["examples"]) == set(CORPUS)


def test_cli_selfcheck(capsys):
    assert main(["--seed", "3", "selfcheck", "--count", "10"]) == 0
