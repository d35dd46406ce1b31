import pytest

from foldsat.errors import (FunctorialityError, InvalidBoundary, NonTotalMap,
                            NotSaturatedPrecondition, OpenFormula,
                            UnboundVariable, UnknownSort)
from foldsat.finsem import (boundary_instances, boundary_of,
                            card_iso_elems, check_saturation,
                            equiv_card_via_bijections,
                            equiv_card_via_formula, eval_card, eval_prop,
                            fiber, ind_truth_elems, satisfies,
                            saturation_profile, validate_structure)
from foldsat.isogen import ind
from foldsat.stdlib import builtin_signature, corpus
from foldsat.synkit import (And, Atom, Bottom, Exists, Forall, Iff, Implies,
                            Or, Top, mk_var)


@pytest.fixture(scope="module")
def lrg():
    return builtin_signature("lrg")


@pytest.fixture(scope="module")
def lcat():
    return builtin_signature("lcat")


@pytest.fixture(scope="module")
def models():
    return corpus()


@pytest.fixture(scope="module")
def rg2(lrg):
    # two objects, one arrow x -> y, no identity witnesses
    return validate_structure(lrg, {
        "carriers": {"O": ["x", "y"], "A": ["u"], "I": []},
        "maps": {"d": {"u": "x"}, "c": {"u": "y"}, "i": {}},
    })


# -- validate_structure -------------------------------------------------

def test_validate_termcat(models):
    M = models["TermCat"]
    assert M.carrier("O") == ("*",)
    assert M.carrier("A") == ("id",)
    assert len(M.carrier("I")) == 1


def test_validate_empty_structure(lrg):
    M = validate_structure(lrg, {"carriers": {}, "maps": {}})
    assert M.carrier("O") == ()


def test_validate_rejects_broken_equation(lrg):
    raw = {
        "carriers": {"O": ["x", "y"], "A": ["u"], "I": ["w"]},
        "maps": {"d": {"u": "x"}, "c": {"u": "y"}, "i": {"w": "u"}},
    }
    with pytest.raises(FunctorialityError):
        validate_structure(lrg, raw)


def test_validate_rejects_partial_map(lrg):
    raw = {
        "carriers": {"O": ["x"], "A": ["u"], "I": []},
        "maps": {"d": {"u": "x"}, "c": {}, "i": {}},
    }
    with pytest.raises(NonTotalMap):
        validate_structure(lrg, raw)


def test_validate_rejects_unknown_sort(lrg):
    with pytest.raises(UnknownSort):
        validate_structure(lrg, {"carriers": {"B": []}, "maps": {}})


# -- fibers -------------------------------------------------------------

def test_fiber_walkiso_arrow(models):
    M = models["WalkIso"]
    sig = M.sig
    delta = {sig.cls(("d",)): "a", sig.cls(("c",)): "b"}
    assert fiber(M, "A", delta) == ("u",)


def test_fiber_over_empty_boundary_is_carrier(models):
    M = models["WalkIso"]
    assert fiber(M, "O", {}) == M.carrier("O")


def test_i_boundary_over_non_endo_rejected(models):
    M = models["WalkIso"]
    sig = M.sig
    with pytest.raises(InvalidBoundary):
        fiber(M, "I", {q: "u" for q in sig.out("I")
                       if q.cod == "A"} | {q: ("a" if q.path[-1] == "d"
                                               else "b")
                                           for q in sig.out("I")
                                           if q.cod == "O"})


def test_i_boundary_instances_only_over_endos(models):
    M = models["WalkIso"]
    endos = {delta[M.sig.cls(("i",))]
             for delta in boundary_instances(M, "I")}
    assert endos == {"ida", "idb"}


def test_boundary_of_roundtrip(models):
    M = models["Arrow2"]
    for K in M.sig.sorts:
        for e in M.carrier(K):
            delta = boundary_of(M, K, e)
            assert e in fiber(M, K, delta)


# -- eval_card ----------------------------------------------------------

def test_top_bottom(models):
    M = models["TermCat"]
    assert eval_card(M, Top()) == 1
    assert eval_card(M, Bottom()) == 0
    assert eval_prop(M, Bottom()) is False


def test_rg2_display_example(rg2, lrg):
    x = mk_var(lrg, "x", "O")
    f = mk_var(lrg, "f", "A", {"d": x, "c": x})
    w = mk_var(lrg, "w", "I", {"i": f})
    phi = Exists(x, Forall(f, Atom(w)))
    assert eval_card(rg2, phi) == 1
    assert eval_card(rg2, Exists(x, Forall(f, Atom(w)),
                                 untruncated=True)) == 2


def test_connective_counts(models):
    M = models["Z2Cat"]
    sig = M.sig
    x = mk_var(sig, "x", "O")
    f = mk_var(sig, "f", "A", {"d": x, "c": x})
    some = Exists(x, Exists(f, Atom(mk_var(sig, "w", "I", {"i": f})),
                            untruncated=True), untruncated=True)
    # exactly one of the two endo-arrows has an identity witness
    assert eval_card(M, some) == 1
    every = Exists(x, Forall(f, Atom(mk_var(sig, "w", "I", {"i": f}))))
    assert eval_card(M, every) == 0
    assert eval_card(M, Implies(some, every)) == 0
    assert eval_card(M, Implies(every, some)) == 1
    assert eval_card(M, Iff(some, every)) == 0
    assert eval_card(M, Or((some, every))) == 1
    assert eval_card(M, And((some, every))) == 0


def test_untruncated_sum_counts_witnesses(models):
    M = models["Z2Cat"]
    sig = M.sig
    x = mk_var(sig, "x", "O")
    f = mk_var(sig, "f", "A", {"d": x, "c": x})
    e = mk_var(sig, "e", "eqA", {"s": f, "t": f})
    phi = Exists(x, Exists(f, Atom(e), untruncated=True), untruncated=True)
    assert eval_card(M, phi) == 2  # both arrows are self-equal


def test_unbound_variable_rejected(models, lcat):
    M = models["TermCat"]
    x = mk_var(lcat, "x", "O")
    f = mk_var(lcat, "f", "A", {"d": x, "c": x})
    with pytest.raises(UnboundVariable):
        eval_card(M, Atom(mk_var(lcat, "w", "I", {"i": f})))


def test_z2_object_iso_card(models):
    # the two bijection families on the hom-fiber, one per arrow,
    # counted once per generated conjunct
    M = models["Z2Cat"]
    assert card_iso_elems(M, "O", "*", "*") == 2 ** 6


def test_walkiso_object_iso_card(models):
    M = models["WalkIso"]
    assert card_iso_elems(M, "O", "a", "b") == 1
    assert card_iso_elems(M, "O", "a", "a") == 1


def test_arrow2_object_iso_card(models):
    M = models["Arrow2"]
    assert card_iso_elems(M, "O", "0", "1") == 0


def test_memoization_consistency(models):
    M = models["Z2Cat"]
    a = card_iso_elems(M, "O", "*", "*")
    b = card_iso_elems(M, "O", "*", "*")
    assert a == b


# -- satisfies ----------------------------------------------------------

def test_satisfies_empty_theory(models):
    ok, report = satisfies(models["TermCat"], [])
    assert ok and report == []


def test_satisfies_rejects_open_axiom(models, lcat):
    x = mk_var(lcat, "x", "O")
    f = mk_var(lcat, "f", "A", {"d": x, "c": x})
    with pytest.raises(OpenFormula):
        satisfies(models["TermCat"],
                  [("open", Atom(mk_var(lcat, "w", "I", {"i": f})))])


def test_satisfies_reports_failing_axiom(rg2, lrg):
    x = mk_var(lrg, "x", "O")
    f = mk_var(lrg, "f", "A", {"d": x, "c": x})
    w = mk_var(lrg, "w", "I", {"i": f})
    theory = [("has-endo-identity", Forall(x, Exists(f, Atom(w))))]
    ok, report = satisfies(rg2, theory)
    assert not ok
    assert report == [{"axiom": "has-endo-identity", "ok": False}]


# -- saturation ---------------------------------------------------------

def test_z2_saturation_violation_at_O(models):
    violations = check_saturation(models["Z2Cat"], "O")
    assert len(violations) == 1
    v = violations[0]
    assert v["sort"] == "O" and v["pair"] == ("*", "*")
    assert v["boundary"] == {} and v["card"] > 1


def test_walkiso_saturation_violations_at_O(models):
    violations = check_saturation(models["WalkIso"], "O")
    pairs = {v["pair"] for v in violations}
    assert pairs == {("a", "b"), ("b", "a")}
    assert all(v["card"] >= 1 for v in violations)


def test_one_saturation_is_subsingleton_fibers(models):
    for M in models.values():
        expected = all(
            len(fiber(M, K, d)) <= 1
            for K in M.sig.sorts if M.sig.level(K) == 1
            for d in boundary_instances(M, K))
        assert saturation_profile(M)[1] == expected


def test_saturation_profiles(models):
    for name in ("TermCat", "Arrow2", "Chain3", "Disc1", "Disc2", "Disc3",
                 "SquarePoset"):
        assert saturation_profile(models[name])["total"], name
    for name in ("WalkIso", "Z2Cat"):
        p = saturation_profile(models[name])
        assert p[1] and p[2] and not p[3], name
    assert not saturation_profile(models["DoubledI"])[1]


def test_saturation_monotone(models):
    for M in models.values():
        p = saturation_profile(M)
        for n in range(2, M.sig.height + 1):
            if p[n]:
                assert p[n - 1]


# -- equivalence-card cross-check ---------------------------------------

def test_equiv_card_bijections_termcat(models):
    M = models["TermCat"]
    sig = M.sig
    d = {sig.cls(("d",)): "*", sig.cls(("c",)): "*"}
    assert equiv_card_via_bijections(M, "A", d, d) == 1
    assert equiv_card_via_formula(M, "A", d, d) == 1


def test_equiv_card_walkiso_cross_fibers(models):
    M = models["WalkIso"]
    sig = M.sig
    dab = {sig.cls(("d",)): "a", sig.cls(("c",)): "b"}
    dba = {sig.cls(("d",)): "b", sig.cls(("c",)): "a"}
    assert equiv_card_via_bijections(M, "A", dab, dba) == 1
    assert equiv_card_via_formula(M, "A", dab, dba) == 1


def test_equiv_card_unequal_fibers_is_zero(models):
    M = models["Arrow2"]
    sig = M.sig
    d01 = {sig.cls(("d",)): "0", sig.cls(("c",)): "1"}
    d10 = {sig.cls(("d",)): "1", sig.cls(("c",)): "0"}
    assert equiv_card_via_bijections(M, "A", d01, d10) == 0


def test_equiv_card_requires_saturation(models):
    M = models["DoubledI"]
    sig = M.sig
    d = {sig.cls(("d",)): "*", sig.cls(("c",)): "*"}
    with pytest.raises(NotSaturatedPrecondition):
        equiv_card_via_bijections(M, "A", d, d)


# -- Ind truth laws -----------------------------------------------------

def test_ind_truth_reflexive(models):
    for M in models.values():
        for K in M.sig.sorts:
            for e in M.carrier(K):
                assert card_iso_elems(M, K, e, e) >= 1


def test_ind_truth_symmetric_z2(models):
    M = models["Z2Cat"]
    for a in M.carrier("A"):
        for b in M.carrier("A"):
            assert (ind_truth_elems(M, "A", a, b)
                    == ind_truth_elems(M, "A", b, a))


def test_ind_distinguishes_arrows_in_group(models):
    M = models["Z2Cat"]
    assert ind_truth_elems(M, "A", "e", "e")
    assert not ind_truth_elems(M, "A", "e", "s")
