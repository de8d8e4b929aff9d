import json

import pytest

from lcskt import cli
from lcskt.dsl import parse_form, parse_real_dsl

H16 = "d2 = 11'\nd3 = 12 - 12'\n"
NONNIL = """\
param A = (1,1)
param E = (3/5,4/5)
param b = 2
d2 = E*13 + 13'
d3 = A*11' + i*b*12' - i*b*conj(E)*21'
"""


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text in {"h16.cplx": H16, "nonnil.cplx": NONNIL, "ab.lcs": "(0,0,0,0,0,0)\n",
                       "broken.lcs": "(0,0,0,12,34)\n", "bad.lcs": "(0,0,12", "l23.lcs": "(26,-16,46,0,0,0)\n",
                       "l8.lcs": "param p = 4\nparam q = -1\nparam s = -1\n(p*16, q*26, q*36, s*46+56, s*56-46, 0)\n",
                       "nonint.lcs": "(0,0,0,0,12,13)\n"}.items():
        path = tmp_path / name
        path.write_text(text)
        out[name] = str(path)
    return out


def run(capsys, *argv):
    code = cli.main(["--json", *argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_check_h16(capsys, files):
    code, rep = run(capsys, "check", files["h16.cplx"])
    assert code == 0
    assert rep["jacobi"] == "ok" and rep["step"] == 3 and rep["unimodular"] is True


def test_check_abelian_and_broken(capsys, files):
    assert run(capsys, "check", files["ab.lcs"])[1]["step"] == 1
    code, rep = run(capsys, "check", files["broken.lcs"])
    assert code == 3 and rep["jacobi"] == "violated" and len(rep["triple"]) == 3


def test_parse_error_exit_code(capsys, files):
    code, rep = run(capsys, "parse", files["bad.lcs"])
    assert code == 2 and rep["error"] == "ParseError"
    assert "column 8" in rep["message"]


def test_parse_canonical_output_reparses(capsys, files):
    code, rep = run(capsys, "parse", files["l8.lcs"])
    assert code == 0
    assert parse_real_dsl(rep["algebra"]) == parse_real_dsl(open(files["l8.lcs"]).read())


def test_hermitian_l23(capsys):
    code, rep = run(capsys, "hermitian", "catalog:l23_0_adapted")
    assert code == 0
    assert rep["H"] == "136"
    assert rep["flags"]["skt"] and rep["flags"]["lcb"] and not rep["flags"]["balanced"]
    for key in ("omega", "H", "lee", "d_omega"):
        assert str(parse_form(rep[key], 6)) == rep[key]


def test_hermitian_l23_f_basis(capsys, files):
    code, rep = run(capsys, "hermitian", files["l23.lcs"], "--J", "1>2,3>5,4>6")
    assert code == 0
    assert rep["H"] == "346" and rep["dH"] == "0"


def test_hermitian_kahler_flags(capsys, files):
    code, rep = run(capsys, "hermitian", files["ab.lcs"], "--J", "1>2,3>4,5>6")
    assert code == 0 and all(rep["flags"].values())


def test_hermitian_l8_not_skt(capsys, files):
    code, rep = run(capsys, "hermitian", files["l8.lcs"], "--J", "1>6,2>3,4>5")
    assert code == 0 and rep["flags"]["skt"] is False


def test_real_file_needs_J(capsys, files):
    assert run(capsys, "hermitian", files["l8.lcs"])[0] == 2


def test_non_integrable_exit(capsys, files):
    assert run(capsys, "hermitian", files["nonint.lcs"], "--J", "1>2,3>4,5>6")[0] == 4


def test_non_positive_metric_exit(capsys, files):
    code, _ = run(capsys, "hermitian", files["h16.cplx"], "--metric", "diag:1,1,-1,-1,1,1")
    assert code == 5


def test_solve_h16(capsys, files):
    code, rep = run(capsys, "solve", files["h16.cplx"])
    assert code == 0
    assert rep["classification"] == "NONTRIVIAL_LCSKT"
    assert rep["alpha"] == "4*3"
    assert parse_form(rep["alpha"], 6) is not None


def test_solve_nonnil_and_abelian(capsys, files):
    assert run(capsys, "solve", files["nonnil.cplx"])[1]["classification"] == "NOT_LCSKT"
    assert run(capsys, "solve", files["ab.lcs"], "--J", "1>2,3>4,5>6")[1]["classification"] == "KAHLER_LIKE"


def test_solve_catalog_entry(capsys):
    code, rep = run(capsys, "solve", "catalog:h8")
    assert code == 0 and rep["summary"] == "TRIVIAL_LCSKT: span(1, 2)"


def test_param_override(capsys, files):
    code, rep = run(capsys, "parse", files["l8.lcs"], "--param", "s=0")
    assert rep["algebra"] == "(4*16,-26,-36,56,-46,0)"


def test_invalid_param_exit(capsys, files):
    assert run(capsys, "solve", files["nonnil.cplx"], "--param", "E=2")[0] == 2


def test_almost_abelian_l23(capsys):
    code, rep = run(capsys, "almost-abelian", "--data", "l23_0", "--t0", "6.283185307179586", "--t0", "1")
    assert code == 0
    assert rep["H"] == "136" and rep["dH"] == "0" and rep["ricci_bismut"] == "-16"
    assert [x["integral"] for x in rep["lattice"]] == [True, False]


def test_almost_abelian_explicit_matrices(capsys):
    code, rep = run(capsys, "almost-abelian", "--a", "4", "--A=-1,0,0,0;0,-1,0,0;0,0,-1,1;0,0,-1,-1",
                    "--J1=0,-1,0,0;1,0,0,0;0,0,0,-1;0,0,1,0")
    assert code == 0 and rep["classification"] == "NONTRIVIAL_LCSKT"
    assert rep["nondegenerate"]["lcskt"] is True


def test_sweep_is_deterministic(capsys, tmp_path):
    argv = ("sweep", "--family", "nil-e1", "--draws", "8", "--seed", "3", "--reproducer-dir", str(tmp_path))
    cli.main(["--json", *argv])
    first = capsys.readouterr().out
    cli.main(["--json", *argv])
    assert capsys.readouterr().out == first
    rep = json.loads(first)
    assert rep["checks"]["dH_closed_form"] == {"pass": 8, "fail": 0}


def test_sweep_forced_zero_dH(capsys, tmp_path):
    code, rep = run(capsys, "sweep", "--family", "nil-e1", "--draws", "6", "--param", "B=0", "--param", "C=0",
                    "--param", "rho=0", "--reproducer-dir", str(tmp_path))
    assert code == 0 and rep["dH_zero_draws"] == 6


def test_sweep_failure_writes_reproducer(capsys, tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "dH_closed_form_check", lambda *a, **k: False)
    code, rep = run(capsys, "sweep", "--family", "nonnil", "--draws", "2", "--reproducer-dir", str(tmp_path))
    assert code == 11
    assert len(rep["failures"]) == 2
    repro = json.loads(open(rep["failures"][0]["reproducer"]).read())
    assert repro["failed"] == ["dH_closed_form"] and repro["draw"] == 0


def test_reproduce(capsys):
    code, rep = run(capsys, "reproduce", "l23-lattice-2pi")
    assert code == 0 and rep["scenarios"][0]["match"]
    code, rep = run(capsys, "reproduce", "h16-basis-change")
    assert code == 0
    assert run(capsys, "reproduce", "no-such-id")[0] == 2


def test_reproduce_all_reports_mismatches(capsys):
    code, rep = run(capsys, "reproduce", "--all")
    assert code == 10
    assert set(rep["mismatches"]) == {"h16-alpha", "biinvariant-dH", "h8-basis-change", "h16-domega",
                                      "l8-dH", "l23-alpha"}


def test_human_output(capsys, files):
    assert cli.main(["check", files["h16.cplx"]]) == 0
    out = capsys.readouterr().out
    assert "step: 3" in out


def test_json_identical_across_runs(capsys, files):
    outs = []
    for _ in range(2):
        cli.main(["--json", "solve", files["h16.cplx"]])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
