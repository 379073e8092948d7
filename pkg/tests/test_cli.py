import io
from fractions import Fraction
import subprocess
import sys

from wreathplane.cli import main
from wreathplane.dynamics import nsd_constant
from wreathplane.projgeo import ProjMap
from wreathplane.scalar import Place


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_classify_reports(corpus, tmp_path):
    f = tmp_path / "ut.scn"
    f.write_text("[based_space]\nelements = a b\nbasepoint = a\ngenerators = (a b)\n"
                 "[ambient]\nplane = rational\n[gamma]\n"
                 "s = [[1,1,0],[0,1,1],[0,0,1]]\nt = [[1,0,1],[0,1,2],[0,0,1]]\n")
    code, text = run("classify", str(f))
    assert code == 0 and text.startswith("classification: CommonFixedPoint\npoint: [1:0:0]\n")
    code, text = run("classify", str(corpus / "diag421-single-swap.scn"))
    assert code == 0 and "classification: VeryProximalWitness\nword: t\nplace: real\n" in text


def test_malformed_input_exits_2(tmp_path, capsys):
    f = tmp_path / "bad.scn"
    f.write_text("[based_space]\nelements = a b\nbasepoint = a\n[ambient]\nplane = rational\n"
                 "[gamma]\nt = [[1,2,0],[0,1,0],[0,0,x]]\n")
    code, _ = run("classify", str(f))
    assert code == 2 and "line 7, column 5" in capsys.readouterr().err
    assert run("classify", str(tmp_path / "missing.scn"))[0] == 2
    assert run("orbit", str(f.parent / "missing.scn"), "--point", "[1:0:0]")[0] == 2


def test_flag_validation(corpus):
    scn = str(corpus / "diag421-single-swap.scn")
    assert run("nsd", scn, "--epsilon", "2")[0] == 2
    assert run("orbit", scn, "--point", "[1:0]")[0] == 2
    assert run("orbit", scn, "--point", "[1:0:0]", "--word", "q")[0] == 2
    assert run("trajectory", scn, "--point", "[1:1:1]", "--steps", "-1")[0] == 2
    assert run("classify", scn, "--places", "padic(x)")[0] == 2
    assert run("nsd", str(corpus / "gf2-fixed.scn"), "--epsilon", "1/4")[0] == 2


def test_decide_and_orbit(corpus):
    code, text = run("decide", str(corpus / "diag421-orbit-swaps.scn"))
    assert code == 0 and text.startswith("verdict: FixedPointFound\n")
    code, text = run("orbit", str(corpus / "rotation-rational.scn"), "--point", "[1:0:1]")
    assert code == 0 and "status: Periodic(4)" in text


def test_trajectory_identity_is_constant(corpus):
    code, text = run("trajectory", str(corpus / "trivial-gf2.scn"), "--point", "[1:1:0]",
                     "--steps", "4")
    rows = text.splitlines()
    assert code == 0 and rows[0] == "step,x1,x2,x3,dist_to_p_plus"
    assert [r.split(",", 1)[1] for r in rows[1:]] == ["1,1,0,none"] * 5


def test_trajectory_csv_and_svg(corpus, tmp_path):
    scn = str(corpus / "diag421-single-swap.scn")
    code, text = run("trajectory", scn, "--point", "[1:1:1]", "--steps", "3")
    rows = text.splitlines()
    assert rows[2].startswith("1,1,1/2,1/4,")
    dists = [float(r.rsplit(",", 1)[1]) for r in rows[1:]]
    assert dists == sorted(dists, reverse=True)
    out = tmp_path / "t.svg"
    code, text = run("trajectory", scn, "--point", "[0:1:0]", "--steps", "3", "--format", "svg",
                     "--output", str(out))
    svg = out.read_text()
    assert code == 0 and text == ""
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800"')
    assert svg.count("<circle") == 4 and 'fill="#cc3333"' in svg  # [0:1:0] is off the chart


def test_nsd_matches_library(corpus):
    code, text = run("nsd", str(corpus / "diag421-single-swap.scn"), "--epsilon", "1/4")
    res = nsd_constant(ProjMap.diag(4, 2, 1), Place.real(), Fraction(1, 4))
    assert code == 0 and f"N: {res.N}\n" in text


def test_check_metric_suite():
    code, text = run("check", "--suite", "metric")
    assert code == 0 and text.startswith("metric: PASS")


def test_module_entry_point(corpus):
    proc = subprocess.run([sys.executable, "-m", "wreathplane", "classify",
                           str(corpus / "trivial-gf2.scn")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("classification: CommonFixedPoint")
