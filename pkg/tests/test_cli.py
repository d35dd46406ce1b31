import json
from pathlib import Path

import pytest

from foldsat.cli import (format_signature, format_structure, format_theory,
                         main, parse_formula, parse_signature,
                         parse_structure, parse_theory)
from foldsat.errors import ParseError
from foldsat.finsem import eval_prop
from foldsat.isogen import iso_formula
from foldsat.pretty import pformat
from foldsat.stdlib import builtin_signature, corpus, tcat_axioms

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="module")
def lcat():
    return builtin_signature("lcat")


@pytest.fixture(scope="module")
def models():
    return corpus()


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def p(name):
    return str(CORPUS / name)


# -- round-trips ---------------------------------------------------------

def test_signature_roundtrip():
    for name in ("lrg", "lrg_eq", "lcat"):
        sig = builtin_signature(name)
        back = parse_signature(format_signature(sig))
        assert back.sorts == sig.sorts
        assert back.levels == sig.levels
        assert [(g.name, g.dom, g.cod) for g in back.gens] \
            == [(g.name, g.dom, g.cod) for g in sig.gens]


def test_structure_roundtrip(lcat, models):
    for name, M in models.items():
        back = parse_structure(format_structure(M, name), lcat)
        assert back.carriers == M.carriers
        assert back.maps == M.maps


def test_theory_roundtrip(lcat, models):
    axioms = tcat_axioms()
    back = parse_theory(format_theory(axioms, "tcat", lcat), lcat)
    assert [n for n, _ in back] == [n for n, _ in axioms]
    M = models["Z2Cat"]
    for (_, phi), (_, psi) in zip(axioms, back):
        assert pformat(psi) == pformat(phi)
        assert eval_prop(M, psi) == eval_prop(M, phi)


def test_formula_roundtrip_gen_iso():
    for signame, K in (("lrg", "O"), ("lrg", "A"), ("lcat", "O")):
        sig = builtin_signature(signame)
        x, y, phi = iso_formula(sig, K)
        env = {v.name: v for v in x.dep() | y.dep()}
        back = parse_formula(pformat(phi), sig, env)
        assert pformat(back) == pformat(phi)


def test_formula_connectives(lcat, models):
    M = models["TermCat"]
    phi = parse_formula(
        "forall x:O. (exists f:A(x,x). I(f)) & (true | false)", lcat)
    assert eval_prop(M, phi)
    psi = parse_formula("forall x:O. forall y:O. forall f:A(x,y). "
                        "A(x,y) ~= A(y,x)", lcat)
    assert eval_prop(M, psi)


def test_parse_errors(lcat):
    with pytest.raises(ParseError):
        parse_formula("forall x:O", lcat)
    with pytest.raises(ParseError):
        parse_formula("forall x:Q. true", lcat)
    with pytest.raises(ParseError):
        parse_formula("forall x:O. A(x,y)", lcat)
    with pytest.raises(ParseError):
        parse_formula("forall f:A. true", lcat)
    with pytest.raises(ParseError):
        parse_structure("structure X over wrong { }", lcat)


def test_corpus_files_match_builtins(lcat, models):
    for name, M in models.items():
        disk = parse_structure((CORPUS / f"{name}.str").read_text(), lcat)
        assert disk.carriers == M.carriers
        assert disk.maps == M.maps


# -- commands ------------------------------------------------------------

def test_check_sig(capsys):
    code, out, _ = run(capsys, "check-sig", p("lcat.folds"))
    assert code == 0 and "lcat" in out


def test_check_sig_error(capsys, tmp_path):
    bad = tmp_path / "bad.folds"
    bad.write_text("signature bad { sort X { f: X }; }")
    code, _, err = run(capsys, "check-sig", str(bad))
    assert code == 2 and "error:" in err


def test_levels(capsys):
    code, out, _ = run(capsys, "levels", p("lrg.folds"))
    assert code == 0 and out.strip() == "I:1 A:2 O:3"
    code, out, _ = run(capsys, "levels", p("lcat.folds"))
    assert code == 0 and out.strip() == "comp:1 I:1 eqA:1 A:2 O:3"


def test_compat(capsys):
    code, out, _ = run(capsys, "compat", p("lrg.folds"), "x:O")
    assert code == 0
    assert "A" in out.split()


def test_gen_iso(capsys):
    code, out, _ = run(capsys, "gen-iso", p("lrg.folds"), "O")
    assert code == 0 and "~=" in out
    code, verbose_out, _ = run(capsys, "gen-iso", p("lrg.folds"), "O",
                               "--verbose")
    assert code == 0 and "var x:O" in verbose_out


def test_eval(capsys):
    code, out, _ = run(capsys, "eval", p("lcat.folds"), p("TermCat.str"),
                       "-e", "forall x:O. exists f:A(x,x). I(f)")
    assert code == 0 and out.strip() == "true"
    code, out, _ = run(capsys, "eval", p("lcat.folds"), p("Arrow2.str"),
                       "-e", "forall x:O. forall y:O. exists f:A(x,y). "
                             "true")
    assert code == 1 and out.strip() == "false"
    code, out, _ = run(capsys, "eval", p("lcat.folds"), p("Z2Cat.str"),
                       "-e", "sum x:O. sum f:A(x,x). eqA(f,f)", "--card")
    assert code == 0 and out.strip() == "2"


def test_eval_rejects_open_formula(capsys):
    code, _, err = run(capsys, "eval", p("lcat.folds"), p("TermCat.str"),
                       "-e", "exists f:A(x,x). I(f)")
    assert code == 2 and "error:" in err


def test_check_model(capsys):
    code, out, _ = run(capsys, "check-model", p("lcat.folds"),
                       p("tcat.thy"), p("WalkIso.str"))
    assert code == 0 and "model: ok" in out


def test_check_model_failure(capsys, tmp_path):
    bad = tmp_path / "NoId.str"
    bad.write_text("structure NoId over lcat {\n"
                   "  O = { x };\n  A = { f(x,x) };\n"
                   "  comp = { m(f,f,f) };\n  I = { };\n"
                   "  eqA = { e(f,f) };\n}\n")
    code, out, _ = run(capsys, "check-model", p("lcat.folds"),
                       p("tcat.thy"), str(bad))
    assert code == 1 and "I1-exists: FAILED" in out


def test_sat(capsys):
    code, out, _ = run(capsys, "sat", p("lcat.folds"), p("TermCat.str"),
                       "--total")
    assert code == 0 and "total: yes" in out
    code, out, _ = run(capsys, "sat", p("lcat.folds"), p("Z2Cat.str"),
                       "--total")
    assert code == 1 and "level 3: not saturated" in out
    code, _, _ = run(capsys, "sat", p("lcat.folds"), p("Z2Cat.str"),
                     "--level", "2")
    assert code == 0


def test_hom(capsys):
    code, out, _ = run(capsys, "hom", p("lcat.folds"), p("Arrow2.str"),
                       p("TermCat.str"))
    assert code == 0 and "hom found" in out
    code, _, _ = run(capsys, "hom", p("lcat.folds"), p("Arrow2.str"),
                     p("TermCat.str"), "--fibsurj")
    assert code == 1
    code, _, _ = run(capsys, "hom", p("lcat.folds"), p("WalkIso.str"),
                     p("TermCat.str"), "--fibsurj")
    assert code == 0


def test_equiv(capsys):
    code, out, _ = run(capsys, "equiv", p("lcat.folds"), p("WalkIso.str"),
                       p("TermCat.str"))
    assert code == 0 and "span found" in out
    code, out, _ = run(capsys, "equiv", p("lcat.folds"), p("Arrow2.str"),
                       p("Chain3.str"))
    assert code == 1 and "not equivalent" in out
    code, out, _ = run(capsys, "equiv", p("lcat.folds"), p("WalkIso.str"),
                       p("Z2Cat.str"))
    assert code == 2 and "inconclusive" in out


def test_hsip(capsys):
    code, out, _ = run(capsys, "hsip", p("lcat.folds"), p("tcat.thy"),
                       p("TermCat.str"), p("TermCat.str"))
    assert code == 0 and "isomorphic" in out.strip()
    code, out, _ = run(capsys, "hsip", p("lcat.folds"), p("tcat.thy"),
                       p("Arrow2.str"), p("Chain3.str"))
    assert code == 1 and "not isomorphic" in out
    code, _, err = run(capsys, "hsip", p("lcat.folds"), p("tcat.thy"),
                       p("WalkIso.str"), p("TermCat.str"))
    assert code == 2 and "error:" in err


def test_json_output(capsys):
    code, out, _ = run(capsys, "--json", "levels", p("lrg.folds"))
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"ok", "witness", "report"}
    assert payload["ok"] is True
    assert payload["witness"] == {"I": 1, "A": 2, "O": 3}
    code, out, _ = run(capsys, "--json", "check-sig", p("nope.folds"))
    assert code == 2
    assert json.loads(out)["ok"] is False
