import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from csc import typecheck as tc
from csc.equiv import normalize
from csc.finite import dihedral
from csc.fuzz import TermGenerator, base_types, random_context
from csc.semantics import writer_theory
from csc.syntax import UNIT, Arrow, Const, Context, Ground, parse_term, substitute
from csc.theory import Theory, parse_theory, type_equal

from fixtures import GOLDEN_THEORY, NEGATIVE, POSITIVE, expected_type, parse_fixture
from strategies import typed_terms

A = Ground("A")
TH_D4 = writer_theory(dihedral(4))


@pytest.mark.parametrize("ctx, term, ty", POSITIVE)
def test_positive_golden(ctx, term, ty):
    c, m = parse_fixture(ctx, term)
    assert type_equal(GOLDEN_THEORY, tc.infer(GOLDEN_THEORY, c, m), expected_type(ty))
    assert tc.check(GOLDEN_THEORY, c, m, expected_type(ty))


@pytest.mark.parametrize("ctx, term, error", NEGATIVE)
def test_negative_golden(ctx, term, error):
    c, m = parse_fixture(ctx, term)
    with pytest.raises(getattr(tc, error)):
        tc.infer(GOLDEN_THEORY, c, m)


def test_unknown_constant():
    with pytest.raises(tc.ConstantUnknown):
        tc.infer(Theory(), Context(), Const("nope"))


def test_errors_share_a_base_class():
    for _, _, error in NEGATIVE:
        assert issubclass(getattr(tc, error), tc.TypeCheckError)


def test_check_examples():
    th = parse_theory("ground A\nground G\ntype-eq G = 1")
    x = Context((("x", A),))
    assert tc.check(th, x, parse_term("x"), A)
    assert tc.check(th, Context(), parse_term("*"), Ground("G"))
    assert not tc.check(th, Context(), parse_term("*"), Arrow(A, A))


def test_conversion_at_elimination_positions():
    th = parse_theory("ground A\nground G\ntype-eq G = A -> A")
    ctx = Context((("f", Ground("G")), ("a", A)))
    assert tc.infer(th, ctx, parse_term("f a")) == A


@settings(max_examples=150, deadline=None)
@given(typed_terms(TH_D4))
def test_generated_terms_have_their_type(sample):
    ctx, m, ty = sample
    assert type_equal(TH_D4, tc.infer(TH_D4, ctx, m), ty)


@settings(max_examples=100, deadline=None)
@given(typed_terms(TH_D4))
def test_subject_reduction(sample):
    ctx, m, ty = sample
    _, trace = normalize(TH_D4, ctx, m)
    for step in trace.steps:
        assert type_equal(TH_D4, tc.infer(TH_D4, ctx, step.after), ty), step.rule


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_substitution_preserves_typing(seed):
    rng = random.Random(seed)
    gen = TermGenerator(TH_D4, rng, base_types(TH_D4), 3)
    ctx = random_context(gen)
    a, b = rng.choice(gen.small), rng.choice(gen.types)
    n = gen.term(b, ctx, (a,))
    m = gen.term(a, ctx)
    assert tc.check(TH_D4, ctx, substitute(n, m), b)


@settings(max_examples=100, deadline=None)
@given(typed_terms(TH_D4))
def test_weakening(sample):
    ctx, m, ty = sample
    wider = ctx.extend("unused_var", Arrow(UNIT, UNIT))
    assert type_equal(TH_D4, tc.infer(TH_D4, wider, m), tc.infer(TH_D4, ctx, m))
