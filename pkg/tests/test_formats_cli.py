import io
from fractions import Fraction

import pytest

from sparkcx import formats
from sparkcx.cli import main
from sparkcx.fixtures import circle, fixture
from sparkcx.formats import ParseError


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, buf.getvalue()


def test_parse_number():
    assert formats.parse_number("3/6") == Fraction(1, 2)
    assert formats.parse_number("-4/2") == -2
    for bad in ("3/0", "1.5", "1/-2", "x"):
        with pytest.raises(ParseError):
            formats.parse_number(bad)


def test_scx_round_trip_and_errors():
    K = circle(4)
    text = formats.dump_scx(K)
    assert formats.parse_scx(text) == K
    assert formats.dump_scx(formats.parse_scx(text)) == text
    with pytest.raises(ParseError) as err:
        formats.parse_scx("scx v1\nvertices 3\nsimplex 1 0\n")
    assert err.value.line == 3
    for bad in ("scx v2\n", "scx v1\nvertices 2\nsimplex 0 2\n",
                "scx v1\nvertices 2\nsimplex 0 1\nsimplex 0 1\n", ""):
        with pytest.raises(ParseError):
            formats.parse_scx(bad)


def test_spc_round_trip_validates():
    S = fixture("circle6").spark_complex
    text = formats.dump_spc(S)
    data = formats.parse_spc(text)
    from sparkcx.sparks import validate_spark_complex
    S2 = validate_spark_complex(*formats.build_spark_data(data))
    assert S2.F.ranks == S.F.ranks and S2.I.ranks == S.I.ranks
    assert formats.dump_spc(S2) == text


def test_spc_shape_errors_name_the_block():
    text = "spc v1\ncomplex I z\nrank 0 1\ndeg 0 rows 2 cols 1\n1\n"
    with pytest.raises(ParseError) as err:
        formats.parse_spc(text)
    assert err.value.block is not None or err.value.line is not None


def test_spk_and_lbd_round_trip():
    d = formats.parse_spk("spk v1\ndegree 0\na 1/2 -3\nr\n")
    assert (d.degree, d.a, d.r) == (0, [Fraction(1, 2), -3], [])
    with pytest.raises(ParseError):
        formats.parse_spk("spk v1\ndegree 0\na 1\n")
    g, A = formats.parse_lbd("lbd v1\ng 1/3\nA 0 0\n")
    assert g == [Fraction(1, 3)] and A == [0, 0]


def test_cli_cohomology_and_exit_codes(tmp_path):
    code, out = run("cohomology", "rp2", "--coeff", "z")
    assert code == 0 and "H^2: Z/2" in out and out.endswith("status: ok\n")
    assert run("cohomology", "nosuch")[0] == 2
    assert run("no-such-command")[0] == 2
    bad = tmp_path / "bad.scx"
    bad.write_text("scx v1\nvertices 2\nsimplex 1 0\n")
    code, out = run("cohomology", str(bad))
    assert code == 2 and "line 3" in out


def test_cli_check_cover_reports_failures():
    code, out = run("check-cover", "octahedron")
    assert "FAIL" in out


def test_cli_axiom_violation_exits_one():
    code, out = run("check-axioms", "circle6", "--violation", "duplicate-index")
    assert code == 1 and "axiom (iii)" in out and "witness: [0 0 0 0 0 0 1]" in out
    assert run("check-axioms", "circle6")[0] == 0


def test_cli_spark_eq_example():
    code, out = run("spark-eq", "circle6", "const:1/2", "const:3/2")
    assert code == 0 and "decision: equivalent" in out and "witness.s: [-1 -1 -1 -1 -1 -1]" in out
    code, out = run("spark-eq", "circle6", "const:1/2", "const:1/3")
    assert code == 0 and "decision: not equivalent" in out


def test_cli_is_deterministic():
    args = ("grid", "circle6", "--budget", "8", "--seed", "7", "--degree", "0")
    assert run(*args) == run(*args)


def test_cli_spark_file_round_trip(tmp_path):
    out_file = tmp_path / "p.spk"
    code, _ = run("product", "circle6", "const:1/2", "const:1/3", "--out", str(out_file))
    assert code == 0
    code, out = run("spark-eq", "circle6", str(out_file), str(out_file))
    assert code == 0 and "decision: equivalent" in out


def test_cli_bundle_holonomy(tmp_path):
    lbd = tmp_path / "flat.lbd"
    assert run("bundle", "flat", "circle6", "--holonomy", "1/3", "--out", str(lbd))[0] == 0
    code, out = run("bundle", "holonomy", "circle6", str(lbd))
    assert code == 0 and "holonomy 0: 1/3" in out


def test_cli_dump_fixtures(tmp_path):
    code, out = run("selftest", "--quick", "--dump-fixtures", str(tmp_path))
    assert code == 0
    text = (tmp_path / "rp2.scx").read_text()
    assert formats.parse_scx(text) == fixture("rp2").base
    code, out = run("cohomology", str(tmp_path / "rp2.scx"))
    assert code == 0 and "H^2: Z/2" in out


def test_cli_quick_selftest_passes():
    code, out = run("selftest", "--quick")
    assert code == 0 and "FAIL" not in out


def test_cli_push_then_lift(tmp_path):
    spk = tmp_path / "pushed.spk"
    assert run("push", "rp2", "const:1/5", "--out", str(spk))[0] == 0
    code, out = run("lift", "rp2", str(spk))
    assert code == 0 and "lifted.a: [" + " ".join(["1/5"] * 3) in out
    assert run("lift", "rp2", "const:1/5")[0] == 0
