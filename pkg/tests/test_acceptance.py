"""Acceptance criteria, one test each, with wall-clock limits.

Each criterion prints a ``PASS``/``FAIL`` line with its timing, collected in
the pytest terminal summary (see ``conftest.py``) or printed directly when the
module is run as a script.  Criteria listed in ``UNATTAINABLE`` are expected to
fail; the reason is given in their detail line.
"""

from __future__ import annotations

import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from csc.centre import (  # noqa: E402
    CentreSubmonad, IdentityMonad, WriterMonad, centre_at, check_commutative, check_monad_laws,
    continuation, d4_noncentralisable_witness, is_central_morphism, kleisli_arrow,
    monoid_centre, semiring_monad, verify_centre_iso, writer,
)
from csc.centre import test_objects as make_tests  # noqa: E402
from csc.equiv import decide_equal, normal_form, normalize  # noqa: E402
from csc.finite import (  # noqa: E402
    FinFunction, bool_matrices, booleans, cyclic, dihedral, sized, symmetric,
)
from csc.fuzz import TermGenerator, base_types, derivable_pair, random_context  # noqa: E402
from csc.semantics import compare_terms, writer_model, writer_theory  # noqa: E402
from csc.syntax import Context, parse_context, parse_term  # noqa: E402
from csc.theory import parse_theory  # noqa: E402
from csc.typecheck import TypeCheckError, infer  # noqa: E402

from fixtures import GOLDEN_THEORY, NEGATIVE, POSITIVE, expected_type, parse_fixture  # noqa: E402
from oracles import boolean_matrices_2x2, brute_centre  # noqa: E402

D4 = dihedral(4)
TESTS = make_tests((1, 2))
RESULTS: list[str] = []
# the law suite cannot be exhaustive at size 3 for the continuation and
# semiring monads: T T T X has more than 2^65536 elements there
UNATTAINABLE = {8}


def _d4():
    th = writer_theory(D4)
    return th, writer_model(D4), frozenset(c for c, _ in th.constants)


# -------------------------------------------------------------- criteria


def c1():
    z = monoid_centre(D4)
    return z.size == 2, f"|Z(D4)| = {z.size}: {list(z.carrier.labels)}", 1e-3


def c2():
    t = writer(D4)
    bad = []
    for n in (1, 2, 3):
        res = centre_at(t, sized(n), TESTS)
        want = sorted(f"({a},{c})" for a in range(n) for c in ("e", "r2"))
        if sorted(res.labels()) != want or not res.stable:
            bad.append(n)
    return not bad, f"X x Z(D4) at |X| = 1..3; mismatches at {bad}", 1.0


def c3():
    cases = [(cyclic(2), True), (cyclic(3), True), (monoid_centre(D4), True), (D4, False),
             (symmetric(3), False)]
    objs = [sized(n) for n in range(4)]
    got = {m.name: check_commutative(writer(m), objs) for m, _ in cases}
    ok = all(got[m.name] == want == m.is_commutative() for m, want in cases)
    return ok, f"commutative: {got}", 5.0


def c4():
    t = continuation(2)
    one = sized(1)
    res = centre_at(t, one, TESTS)
    ok = res.elements == [t.eta_at(one, 0)] and t.obj(one).size == 4
    return ok, f"{len(res.elements)} of {t.obj(one).size}: {res.labels()}", 1.0


def c5():
    rep = verify_centre_iso(writer(D4), sized(1), sized(1), test_objects=TESTS)
    ok = (rep.kleisli_morphisms, rep.central, rep.factoring, len(rep.mismatches)) == (8, 2, 2, 0)
    return ok, str(rep), 1.0


def c6():
    rep = d4_noncentralisable_witness()
    ok = rep.central_endo_homset == 2 and not rep.power_of_8
    return ok, f"central endo-homset {rep.central_endo_homset}, hom-set sizes {rep.hom_sizes}", 1.0


def c7():
    elems, _, mul = boolean_matrices_2x2()
    zs = {"".join(map(str, m)) for m in brute_centre(elems, mul)}
    s = bool_matrices(2)
    res = centre_at(semiring_monad(s), sized(1), TESTS)
    got = {s.carrier.label(v) for v in res.elements}
    return got == zs, f"centre {sorted(got)} vs Z(S) {sorted(zs)}", 30.0


class _ForgetfulWriter(WriterMonad):
    def mu_at(self, x, tt):
        return tt // self.monoid.size


def c8():
    objs = [sized(n) for n in range(4)]
    monads = [IdentityMonad(), writer(cyclic(2)), writer(D4), continuation(2),
              semiring_monad(bool_matrices(2)), semiring_monad(booleans())]
    notes, ok = [], True
    for t in monads:
        rep = check_monad_laws(t, objs)
        ok &= rep.ok and rep.exhaustive
        notes.append(f"{t.name} {'ok' if rep.ok else 'FAILED'} {rep.counts()}")
    control = check_monad_laws(_ForgetfulWriter(D4), objs[:3])
    caught = bool(control.failures) and all(c.witness for c in control.failures)
    ok &= caught
    notes.append(f"corrupted mu caught: {caught}")
    return ok, "; ".join(notes), 60.0


def c9():
    golden = parse_theory("ground A\nground B\nconst m : S A\nconst n : T B")
    gc = frozenset({"m", "n"})
    pairs = [
        ("[v : A, k : A -> T B]", "do_T x <- ret_T v; k x", "k v"),
        ("[v : A]", "iota (ret_S v)", "ret_T v"),
        ("[]", "do_T x <- iota m; do_T y <- n; ret_T <x, y>",
         "do_T y <- n; do_T x <- iota m; ret_T <x, y>"),
    ]
    golden_ok = all(
        normal_form(golden, c, parse_term(a, gc)) == normal_form(golden, c, parse_term(b, gc))
        for c, a, b in ((parse_context(ctx), a, b) for ctx, a, b in pairs))

    th, model, consts = _d4()
    composed = 0
    for c in D4.carrier.labels:
        for d in D4.carrier.labels:
            prod = D4.carrier.label(D4.mult[D4.element(c)][D4.element(d)])
            a = parse_term(f"do_T _ <- act_{c}; act_{d}", consts)
            b = parse_term(f"act_{prod}", consts)
            composed += decide_equal(th, Context(), a, b, budget=2000).kind == "Equal"

    rng = random.Random(20240)
    fuzz_ok = 0
    for _ in range(500):
        ctx, a, b, _ = derivable_pair(th, random.Random(rng.getrandbits(32)), model=model)
        v = decide_equal(th, ctx, a, b, budget=2000)
        fuzz_ok += v.kind == "Equal" and compare_terms(model, th, ctx, a, b) is None
    ok = golden_ok and composed == 64 and fuzz_ok == 500
    return ok, f"goldens {golden_ok}; compositions {composed}/64; fuzzed pairs {fuzz_ok}/500", 120.0


def c10():
    th, model, consts = _d4()
    a = parse_term("do_T _ <- act_r; act_s", consts)
    b = parse_term("do_T _ <- act_s; act_r", consts)
    v = decide_equal(th, Context(), a, b, oracle=model)
    ok = v.kind == "Distinct" and v.witness is not None
    return ok, f"{v.kind} {v.witness}", 1.0


def c11():
    pos = sum(infer(GOLDEN_THEORY, *parse_fixture(c, m)) == expected_type(ty)
              for c, m, ty in POSITIVE)
    neg = 0
    for c, m, err in NEGATIVE:
        try:
            infer(GOLDEN_THEORY, *parse_fixture(c, m))
        except TypeCheckError as e:
            neg += type(e).__name__ == err
    iota_rejected = any(err == "IotaExpectsS" for _, _, err in NEGATIVE)
    ok = (len(POSITIVE), len(NEGATIVE)) == (20, 10) and pos == 20 and neg == 10 and iota_rejected
    return ok, f"positive {pos}/{len(POSITIVE)}, negative {neg}/{len(NEGATIVE)}", 1.0


def _kleisli(t, tests, rng, x, y, cache):
    key = (t.name, y.size)
    if key not in cache:
        cache[key] = centre_at(t, y, tests).elements
    ty = t.obj(y)
    if rng.random() < 0.5:
        table = [rng.choice(cache[key]) for _ in range(x.size)]
    else:
        table = [rng.randrange(ty.size) for _ in range(x.size)]
    return kleisli_arrow(table, x, y, t)


def c12():
    trials = 1000
    rng = random.Random(7)
    # continuation centrality is checked against one-element test objects
    monads = [(writer(D4), TESTS), (writer(symmetric(3)), TESTS),
              (continuation(2), make_tests((1,)))]
    cache: dict = {}
    failures = {}

    pre = post = 0
    for _ in range(trials):
        t, tests = rng.choice(monads)
        w, x, y, z = (sized(rng.randint(1, 2)) for _ in range(4))
        f = _kleisli(t, tests, rng, x, y, cache)
        if not is_central_morphism(t, f, tests):
            pre += 1
            post += 1
            continue
        g = [rng.randrange(x.size) for _ in range(w.size)]
        pre += is_central_morphism(t, kleisli_arrow([f(i) for i in g], w, y, t), tests)
        h = FinFunction(y, z, tuple(rng.randrange(z.size) for _ in range(y.size)))
        moved = [t.fmap_at(h, f(a)) for a in range(x.size)]
        post += is_central_morphism(t, kleisli_arrow(moved, x, z, t), tests)
    failures["pre-composition"] = trials - pre
    failures["post-composition"] = trials - post

    centred = [(writer(D4), TESTS), (writer(symmetric(3)), TESTS), (continuation(2), TESTS),
               (semiring_monad(bool_matrices(2)), TESTS), (CentreSubmonad(writer(D4), TESTS), TESTS)]
    results: dict = {}
    eta = inj = 0
    for _ in range(trials):
        k = rng.randrange(len(centred))
        t, tests = centred[k]
        n = rng.randint(0, 2)
        if (k, n) not in results:
            results[(k, n)] = centre_at(t, sized(n), tests)
        res = results[(k, n)]
        x = sized(n)
        if n == 0:
            eta += 1
        else:
            eta += t.eta_at(x, rng.randrange(n)) in set(res.elements)
        table = res.inclusion.table
        if len(table) < 2:
            inj += 1
        else:
            i, j = rng.sample(range(len(table)), 2)
            inj += table[i] != table[j]
    failures["eta-image"] = trials - eta
    failures["injectivity"] = trials - inj

    th, model, _ = _d4()
    confluent = 0
    for seed in range(trials):
        r = random.Random(seed)
        gen = TermGenerator(th, r, base_types(th, model), 3, model)
        ctx = random_context(gen)
        m = gen.term(r.choice(gen.types), ctx)
        confluent += normalize(th, ctx, m, rng=random.Random(seed + 1))[0] == normal_form(th, ctx, m)
    failures["confluence"] = trials - confluent
    ok = not any(failures.values())
    return ok, f"{trials} trials each; failures {failures}", 300.0


CRITERIA = [
    (1, "centre of D4 has 2 elements", c1),
    (2, "writer centre is X x Z(D4)", c2),
    (3, "writer commutative iff monoid commutative", c3),
    (4, "continuation centre is the eta-image", c4),
    (5, "Kleisli iso count for writer(D4)", c5),
    (6, "D4 cardinality obstruction", c6),
    (7, "matrix semiring centre is Z(S)", c7),
    (8, "monad-law suite with negative control", c8),
    (9, "equational engine goldens, compositions, fuzz", c9),
    (10, "refutation of swapped actions", c10),
    (11, "typechecker golden suite", c11),
    (12, "property suites, 1000 trials each", c12),
]


def run_criterion(number, title, fn):
    start = time.perf_counter()
    ok, detail, limit = fn()
    elapsed = time.perf_counter() - start
    passed = ok and elapsed < limit
    line = (f"{'PASS' if passed else 'FAIL'} criterion {number:2d} ({elapsed:.4f}s, limit "
            f"{limit:g}s) {title}: {detail}")
    RESULTS.append(line)
    return passed, line


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn):
    passed, line = run_criterion(number, title, fn)
    print(line)
    if not passed and number in UNATTAINABLE:
        pytest.xfail(line)
    assert passed, line


if __name__ == "__main__":
    failed = 0
    for n, title, fn in CRITERIA:
        passed, line = run_criterion(n, title, fn)
        print(line, flush=True)
        failed += not passed
    sys.exit(1 if failed else 0)
