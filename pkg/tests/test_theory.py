import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from csc import DATA
from csc.finite import dihedral
from csc.semantics import load_model, writer_model, writer_theory
from csc.syntax import (
    UNIT, Arrow, Const, Context, Free, Ground, MonS, MonT, Prod, parse_context, parse_term,
    parse_type,
)
from csc.theory import (
    IllTypedComponent, IllTypedTranslation, Translation, TranslationTransformation,
    UnknownGroundType, check_transformation, check_translation, format_theory,
    identity_translation, load_theory, load_translation, parse_axiom, parse_theory,
    type_equal, validate_theory,
)
from csc.typecheck import infer

from strategies import typed_terms, types

A, B, G = Ground("A"), Ground("B"), Ground("G")
TH_D4 = writer_theory(dihedral(4))
D4_MODEL = writer_model(dihedral(4))


def test_type_equal_examples():
    empty = parse_theory("ground A")
    assert type_equal(empty, A, A)
    assert not type_equal(empty, MonS(A), MonT(A))
    th = parse_theory("ground G\ntype-eq G = 1")
    assert type_equal(th, parse_type("T G -> G"), parse_type("T 1 -> 1"))
    assert not type_equal(th, parse_type("T G"), parse_type("S 1"))


def test_type_equal_chains_axioms():
    th = parse_theory("ground A\nground B\nground C\ntype-eq A = B\ntype-eq T B = C")
    assert type_equal(th, parse_type("T A"), Ground("C"))
    assert type_equal(th, parse_type("C -> A"), parse_type("T A -> B"))
    assert not type_equal(th, Ground("C"), A)


def test_unknown_ground_is_an_error():
    with pytest.raises(UnknownGroundType):
        type_equal(parse_theory("ground A"), A, Ground("Nope"))


AXIOMS = st.lists(st.tuples(types, types), max_size=3)


@settings(max_examples=200, deadline=None)
@given(AXIOMS, types, types, types)
def test_type_equality_is_a_congruence(axioms, a, b, c):
    th = parse_theory("ground A\nground B")
    th = type(th)(th.ground_types, (), tuple(axioms), (), "t")
    assert type_equal(th, a, a)
    assert type_equal(th, a, b) == type_equal(th, b, a)
    if type_equal(th, a, b):
        assert type_equal(th, MonT(a), MonT(b))
        assert type_equal(th, MonS(a), MonS(b))
        assert type_equal(th, Arrow(a, c), Arrow(b, c))
        assert type_equal(th, Prod(c, a), Prod(c, b))
        if type_equal(th, b, c):
            assert type_equal(th, a, c)
    for lhs, rhs in axioms:
        assert type_equal(th, lhs, rhs)


def test_validate_theory():
    assert validate_theory(parse_theory("")) == []
    diags = validate_theory(parse_theory("const c : G"))
    assert [d.kind for d in diags] == ["UnknownGroundType"]
    bad = parse_theory("ground A\nconst c : A\naxiom [] |- c c = c : A")
    assert [d.kind for d in validate_theory(bad)] == ["IllTypedAxiom"]
    wrong_type = parse_theory("ground A\nconst c : A\naxiom [] |- c = c : T A")
    # one diagnostic per offending side
    assert [d.kind for d in validate_theory(wrong_type)] == ["IllTypedAxiom"] * 2


def test_theory_file_round_trip():
    th = load_theory(DATA / "th_d4.csct")
    assert validate_theory(th) == []
    again = parse_theory(format_theory(th))
    assert again.constants == th.constants
    assert [(a.lhs, a.rhs, a.type) for a in again.term_axioms] == \
        [(a.lhs, a.rhs, a.type) for a in th.term_axioms]
    assert len(th.term_axioms) == 64 + 4 + 2 + 2


def test_parse_axiom_with_context():
    ax = parse_axiom("[x : T 1] |- do_T _ <- g; x = do_T _ <- x; g : T 1", {"g"})
    assert ax.ctx.names() == ["x"]
    assert ax.type == MonT(UNIT)
    assert ax.lhs.head == Const("g")


def test_parse_errors_name_the_line():
    with pytest.raises(Exception, match="line 2"):
        parse_theory("ground A\nconst c A\n")
    with pytest.raises(Exception, match="line 1"):
        parse_theory("frobnicate")


# ------------------------------------------------------------ translations


def test_identity_translation_verified():
    assert check_translation(identity_translation(TH_D4)).status == "Verified"


def test_d4_self_translation_verified():
    v = Translation(TH_D4, TH_D4, (), tuple((c, Const(c)) for c, _ in TH_D4.constants))
    assert check_translation(v).status == "Verified"


def test_reflection_translation_fails_with_countermodel():
    v = load_translation(DATA / "z2_to_d4_reflection.csctr")
    res = check_translation(v, oracle=load_model(DATA / "d4.cscm", v.target))
    assert res.status == "FailedAt"
    assert res.at.ctx.names() == ["x"]
    assert check_translation(v, budget=100).status == "Unknown"


def test_rotation_translation_verified():
    v = load_translation(DATA / "z2_to_d4_rotation.csctr")
    assert check_translation(v).status == "Verified"


def test_ill_typed_translation():
    v = load_translation(DATA / "z2_to_d4_rotation.csctr")
    bad = Translation(v.source, v.target, (), (("g", Const("zact_r2")),))
    with pytest.raises(IllTypedTranslation):
        check_translation(bad)
    with pytest.raises(IllTypedTranslation):
        Translation(v.source, v.target).term(Const("g"))


def test_translations_compose():
    z2 = load_translation(DATA / "z2_to_d4_rotation.csctr")
    square = Translation(TH_D4, TH_D4, (), tuple(
        (c, Const(c)) for c, _ in TH_D4.constants))
    both = z2.compose(square)
    assert both.term(Const("g")) == Const("act_r2")
    assert check_translation(both, budget=4000).status == "Verified"


@settings(max_examples=100, deadline=None)
@given(typed_terms(TH_D4))
def test_translation_commutes_with_typing(sample):
    ctx, m, ty = sample
    th2 = parse_theory(format_theory(TH_D4) + "ground U\ntype-eq U = 1\n")
    v = Translation(TH_D4, th2, (), (("act_e", parse_term("ret_T *")),))
    assert type_equal(th2, infer(th2, v.context(ctx), v.term(m)), v.type(ty))


def _identity_alpha(types_, body="x"):
    v = identity_translation(TH_D4)
    return TranslationTransformation(v, v, tuple((t, parse_term(body, frozenset(
        c for c, _ in TH_D4.constants))) for t in types_))


PROBES = [
    (parse_context("[y : T 1]"), parse_term("y"), MonT(UNIT)),
    (parse_context("[y : T 1]"), parse_term("do_T _ <- act_s; y", frozenset({"act_s"})), MonT(UNIT)),
]


def test_identity_transformation_verified():
    alpha = _identity_alpha([MonT(UNIT)])
    assert check_transformation(alpha, PROBES).status == "Verified"


def test_mismatched_component_fails_on_constant_probe():
    alpha = _identity_alpha([MonT(UNIT)], "do_T _ <- act_r; x")
    probe = (parse_context("[y : T 1]"), Const("act_s"), MonT(UNIT))
    # identity probe: both sides reduce to the component itself
    assert check_transformation(alpha, PROBES[:1]).status == "Verified"
    res = check_transformation(alpha, [probe], oracle=D4_MODEL)
    assert res.status == "FailedAt"
    assert res.at is probe


def test_ill_typed_component():
    alpha = _identity_alpha([MonT(UNIT)], "zact_e")
    with pytest.raises(IllTypedComponent):
        check_transformation(alpha, PROBES)
    with pytest.raises(IllTypedComponent):
        _identity_alpha([]).component(MonT(UNIT))
