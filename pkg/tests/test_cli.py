import json

import pytest

from jordan_attractors.cli import main, parse_charge, parse_form
from jordan_attractors.jordan import build_stu


def run(capsys, *argv):
    rc = main(list(argv))
    return rc, capsys.readouterr()


def test_solve_nonbps(capsys):
    rc, out = run(capsys, "solve", "--form", "1,0,0,1")
    assert rc == 0
    d = json.loads(out.out)
    assert json.dumps(d)         # plain JSON
    assert "tau" in json.dumps(d)


def test_solve_bps(capsys):
    rc, out = run(capsys, "solve", "--form", "0,1,0,-1")
    assert rc == 0 and '"field_D": -3' in out.out


def test_solve_deterministic(capsys):
    _, a = run(capsys, "solve", "--form", "2,-1,3,5")
    _, b = run(capsys, "solve", "--form", "2,-1,3,5")
    assert a.out == b.out


@pytest.mark.parametrize("form", ["0,0,0,0", "1,2,3", "a,b,c,d"])
def test_bad_forms(capsys, form):
    rc, out = run(capsys, "solve", "--form", form)
    assert rc in (2, 3) and out.err.startswith("jattr:")


def test_degenerate_form_is_reported(capsys):
    rc, out = run(capsys, "solve", "--form", "1,2,1,0")      # x (x + y)^2
    assert rc == 0 and json.loads(out.out)["class"] == "degenerate"


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as e:
        main(["solve", "--nope"])
    assert e.value.code == 2


def test_enumerate(capsys, tmp_path):
    rc, out = run(capsys, "enumerate", "--bound", "50")
    lines = out.out.strip().splitlines()
    assert rc == 0 and lines[0].startswith("a,b,c,d,disc")
    p = tmp_path / "f.csv"
    assert main(["enumerate", "--bound", "50", "--out", str(p)]) == 0
    assert p.read_text().strip().splitlines() == lines


def test_check_5d(capsys):
    rc, out = run(capsys, "check", "5d", "--model", "stu", "--charge", "q=1:2:3")
    assert rc == 0 and json.loads(out.out)["ok"] is True


def test_check_5d_bad_charge(capsys):
    rc, _ = run(capsys, "check", "5d", "--model", "stu", "--charge", "q=1:-2:3")
    assert rc == 3


def test_check_axioms(capsys):
    rc, out = run(capsys, "check", "axioms", "--algebra", "quaternion", "--samples", "20")
    assert rc == 0 and json.loads(out.out)["ok"] is True


def test_distribution(capsys, tmp_path):
    p = tmp_path / "h.csv"
    rc, out = run(capsys, "distribution", "--bound", "300", "--nx", "4", "--ny", "4", "--out", str(p))
    assert rc == 0 and p.exists() and (tmp_path / "h.csv.json").exists()
    d = json.loads(out.out)
    assert d["mass"] == 1.0 and 0 <= d["comparison"]["tv"] <= 1


def test_parsers():
    assert parse_form("1, -2,3,4").coeffs == (1, -2, 3, 4)
    g = parse_charge("p0=1,q0=2,p=1:0:0", build_stu())
    assert g.p0 == 1 and g.q0 == 2 and g.p == (1, 0, 0)
