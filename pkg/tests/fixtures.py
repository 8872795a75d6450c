"""Shared fixtures: typechecker goldens and small theories."""

from csc.syntax import parse_context, parse_term, parse_type
from csc.theory import parse_theory

GOLDEN_THEORY = parse_theory("""
name golden
ground A
ground B
ground G
type-eq G = 1
const m : S A
const n : T B
const k : A -> T B
const a : A
""")

CONSTS = frozenset(c for c, _ in GOLDEN_THEORY.constants)

# (context, term, expected type)
POSITIVE = [
    ("[]", "*", "1"),
    ("[x:A]", "x", "A"),
    ("[]", "a", "A"),
    ("[]", r"\x:A. x", "A -> A"),
    ("[f:A -> B, x:A]", "f x", "B"),
    ("[x:A, y:B]", "<x, y>", "A * B"),
    ("[p:A * B]", "fst p", "A"),
    ("[p:A * B]", "snd p", "B"),
    ("[x:A]", "ret_T x", "T A"),
    ("[x:A]", "ret_S x", "S A"),
    ("[x:A]", "iota (ret_S x)", "T A"),
    ("[]", r"\x:A. do_S y <- ret_S x; ret_S y", "A -> S A"),
    ("[]", "do_T x <- iota m; k x", "T B"),
    ("[]", "do_T x <- n; do_T y <- iota m; ret_T <y, x>", "T (A * B)"),
    ("[]", "do_S x <- m; do_S y <- m; ret_S <x, y>", "S (A * A)"),
    ("[]", "iota (do_S x <- m; ret_S x)", "T A"),
    ("[g:G]", "<g, *>", "G * 1"),
    ("[g:G, f:1 -> B]", "f g", "B"),
    ("[u:T G]", r"do_T x <- u; ret_T (\y:1. x)", "T (1 -> G)"),
    ("[h:(A -> S B) * A]", "iota ((fst h) (snd h))", "T B"),
]

# (context, term, expected exception class name)
NEGATIVE = [
    ("[]", "iota n", "IotaExpectsS"),
    ("[u:T A]", "iota u", "IotaExpectsS"),
    ("[]", "x", "UnboundVariable"),
    ("[x:A]", "x x", "NotAFunction"),
    ("[x:A]", "fst x", "NotAProduct"),
    ("[x:A]", "do_T y <- x; ret_T y", "NotMonadic"),
    ("[]", "do_S x <- n; ret_S x", "FlavourMismatch"),
    ("[]", "do_T x <- n; ret_S x", "FlavourMismatch"),
    ("[f:A -> B]", "f *", "ArgumentMismatch"),
    ("[]", "zz", "UnboundVariable"),
]


def parse_fixture(ctx: str, term: str):
    c = parse_context(ctx)
    return c, parse_term(term, CONSTS - set(c.names()))


def expected_type(src: str):
    return parse_type(src)
