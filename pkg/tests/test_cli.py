import io
import subprocess
import sys
from fractions import Fraction as F

import pytest

from cantorprod import cli
from cantorprod.constructions import PaperPairSpec, paper_pair
from cantorprod.core import read_union_csv, refine, union_csv
from cantorprod.thickness import Indeterminate


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def mid3(tmp_path, capsys):
    path = tmp_path / "mid3.spec"
    assert cli.main(["construct", "--middle-alpha", "1/3", "-o", str(path)]) == 0
    capsys.readouterr()
    return str(path)


@pytest.fixture
def t15(tmp_path, capsys):
    path = tmp_path / "t15.spec"
    assert cli.main(["construct", "--theorem", "T15_twoComponents", "--params", "M=2,N=2",
                     "-o", str(path)]) == 0
    capsys.readouterr()
    return str(path)


def test_thickness_mid3(mid3, capsys):
    assert run(["thickness", "--construction", mid3, "--depth", "5"], capsys)[:2] == (0, "1/1\n")


def test_region_map_header(capsys):
    code, out, _ = run(["region-map", "--condition", "cond465", "--range", "0.5:4:0.05"], capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "M_num,M_den,N_num,N_den,verdict"
    assert len(lines) == 1 + 71 * 71
    assert "2,1,2,1,holds" in lines and "1,1,1,1,fails" in lines


def test_verify_t15(tmp_path, capsys):
    cert = tmp_path / "cert.txt"
    table = tmp_path / "sweep.csv"
    code, out, _ = run(["verify", "--scenario", "thm4-twoComponents", "--params", "M=2,N=2",
                        "--max-depth", "6", "--csv", str(table), "--certificate", str(cert)],
                       capsys)
    assert code == 0
    assert "status: match" in out and "certificate:" in out and "gap=100/49,121/49" in out
    assert table.read_text().startswith("depth,components,")
    code, out, _ = run(["verify", "--recheck", str(cert)], capsys)
    assert code == 0 and "valid" in out


def test_verify_list(capsys):
    code, out, _ = run(["verify", "--list"], capsys)
    assert code == 0 and "thm2-positive:" in out


def test_round_trip_byte_identical(t15, tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert cli.main(["refine", "--construction", t15, "--name", "L", "--depth", "3",
                         "-o", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    pair = paper_pair(PaperPairSpec("T15_twoComponents", F(2), F(2)))
    assert a.read_text() == union_csv(refine(pair.L, 3, 12).intervals)


def test_product_and_sum(t15, mid3, capsys):
    code, out, _ = run(["product", "--construction", t15, "--depth", "4"], capsys)
    assert code == 0
    assert read_union_csv(io.StringIO(out)).intervals == ((F(-250, 49), F(100, 49)),
                                                           (F(121, 49), F(625, 49)))
    code, out, err = run(["product", "--construction", t15, "--sweep", "3:5"], capsys)
    assert code == 0 and out.count("\n") == 4 and "Components(2)" in err
    code, out, _ = run(["sum", "--construction", mid3, "--right", "K", "--depth", "4"], capsys)
    assert out.splitlines()[1] == "0,1,2,1"


def test_gap_commands(tmp_path, capsys):
    spec = tmp_path / "ms.spec"
    assert cli.main(["construct", "--middle-stack", "1", "-o", str(spec)]) == 0
    code, out, _ = run(["classify-gaps", "--construction", str(spec), "--depth", "1",
                        "--C", "2", "--stack-blocks", "2"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "gap_left,gap_right,ratio,tag"
    assert "1/3,2/3,1/1,bad" in out
    code, out, _ = run(["split", "--construction", str(spec), "--depth", "1", "--C", "2",
                        "--stack-blocks", "2"], capsys)
    assert "gap 1: (1/3, 2/3)" in out


def test_intersect(tmp_path, capsys):
    spec = tmp_path / "w.spec"
    assert cli.main(["construct", "--theorem", "Williams_intersection", "--params", "M=2,N=2",
                     "-o", str(spec)]) == 0
    code, out, err = run(["intersect", "--construction", str(spec), "--sweep", "2:4"], capsys)
    assert code == 0 and "4/25, 4/25" in err


def test_cm(capsys):
    code, out, _ = run(["construct", "--cm", "1,1/10"], capsys)
    assert code == 0 and "negscale=sqrt(" in out


@pytest.mark.parametrize("argv,flag", [
    (["thickness", "--construction", "x.spec", "--depth", "x"], "--depth"),
    (["thickness", "--construction", "missing.spec", "--depth", "2"], "--construction"),
    (["thickness", "--construction", "x.spec", "--depth", "2", "--bogus"], "--bogus"),
    (["verify", "--scenario", "nope"], "--scenario"),
    (["verify", "--scenario", "thm4-twoComponents", "--params", "M=3,N=3"], "--params"),
    (["verify", "--scenario", "thm2-positive", "--params", "M=2,N"], "--params"),
    (["region-map", "--condition", "foo", "--range", "1:2:1/2"], "--condition"),
    (["region-map", "--condition", "cond465", "--range", "1:2"], "--range"),
    (["construct", "--theorem", "T15_twoComponents"], "--params"),
    (["construct", "--middle-alpha", "2"], "--middle-alpha"),
    (["refine", "--construction", "x.spec", "--depth", "1", "--stack-blocks", "0"],
     "--stack-blocks"),
    (["sum", "--construction", "x.spec"], "--depth"),
    (["frobnicate"], "frobnicate"),
])
def test_usage_errors(argv, flag, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert flag in err


def test_unknown_output_name(mid3, capsys):
    code, _, err = run(["refine", "--construction", mid3, "--name", "Q", "--depth", "1"], capsys)
    assert code == 2 and "--name" in err


def test_bad_spec_file(tmp_path, capsys):
    p = tmp_path / "bad.spec"
    p.write_text("version=1\nnode a what\n")
    code, _, err = run(["thickness", "--construction", str(p), "--depth", "1"], capsys)
    assert code == 2 and "--construction" in err


def test_computational_failure_exit(mid3, capsys, monkeypatch):
    def boom(_):
        raise Indeterminate("undecided")
    monkeypatch.setattr(cli, "thickness", boom)
    code, _, err = run(["thickness", "--construction", mid3, "--depth", "1"], capsys)
    assert code == 4 and "undecided" in err


def test_module_entry_point(mid3):
    r = subprocess.run([sys.executable, "-m", "cantorprod", "thickness", "--construction", mid3,
                        "--depth", "3"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "1/1\n"
