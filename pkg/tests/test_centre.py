import itertools
import time

import pytest
from hypothesis import given, settings, strategies as st

from csc.centre import (
    CentreSubmonad, FiniteMonadSpec, IdentityMonad, ListMonad, SemiringMonad, WriterMonad,
    centre_at, check_commutative, check_monad_laws, continuation, d4_noncentralisable_witness,
    is_central_morphism, kleisli_arrow, monoid_centre, semiring_centre, semiring_monad,
    test_objects as make_tests, verify_centre_iso, writer,
)
from csc.finite import (
    FinFunction, FinSemiring, SizeBlowup, bool_matrices, booleans, cyclic, dihedral, finset,
    integers_mod, sized, symmetric,
)

from oracles import boolean_matrices_2x2, brute_centre, permutation_group

D4 = dihedral(4)
TESTS = make_tests((1, 2))


def small(n):
    return [sized(k) for k in range(n + 1)]


# ---------------------------------------------------------------- monoids


def test_symmetric_group_centre_matches_brute_force():
    elems, op = permutation_group(3)
    expected = {"".join(map(str, p)) for p in brute_centre(elems, op)}
    z = monoid_centre(symmetric(3))
    assert set(z.carrier.labels) == expected == {"012"}


def test_d4_centre_has_two_elements():
    # D4 as symmetries of a square acting on its corners
    r, s = (1, 2, 3, 0), (0, 3, 2, 1)
    elems = {tuple(range(4))}
    frontier = [tuple(range(4))]
    while frontier:
        p = frontier.pop()
        for g in (r, s):
            q = tuple(g[p[i]] for i in range(4))
            if q not in elems:
                elems.add(q)
                frontier.append(q)
    op = lambda p, q: tuple(p[q[i]] for i in range(4))
    brute = brute_centre(sorted(elems), op)
    assert len(elems) == 8 and len(brute) == 2
    assert tuple(r[r[i]] for i in range(4)) in brute

    z = monoid_centre(D4)
    assert z.size == 2
    assert set(z.carrier.labels) == {"e", "r2"}
    assert z.is_commutative()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_writer_centre_is_base_times_monoid_centre(n):
    x = sized(n)
    res = centre_at(writer(D4), x, TESTS)
    expected = sorted(f"({a},{c})" for a in range(n) for c in ("e", "r2"))
    assert sorted(res.labels()) == expected
    assert res.stable


@pytest.mark.parametrize("m, commutative", [
    (cyclic(2), True), (cyclic(3), True), (monoid_centre(D4), True), (D4, False), (symmetric(3), False),
])
def test_writer_commutative_iff_monoid_commutative(m, commutative):
    assert m.is_commutative() == commutative
    assert check_commutative(writer(m), small(3)) == commutative


# ----------------------------------------------------------- continuation


def test_continuation_centre_is_eta_image():
    c = continuation(2)
    for n in (1, 2):
        x = sized(n)
        res = centre_at(c, x, TESTS)
        assert sorted(res.elements) == sorted(c.eta_at(x, a) for a in range(n))
        assert res.stable
    assert c.obj(sized(1)).size == 4


# at 2 x 2 the generic composites need 2^32 continuations
@pytest.mark.parametrize("nx, ny", [(1, 1), (1, 2), (2, 1)])
def test_continuation_commutation_matches_generic_composites(nx, ny):
    c = continuation(2)
    x, y = sized(nx), sized(ny)
    for t in range(c.obj(x).size):
        for s in range(c.obj(y).size):
            assert c.commutation(x, y, t, s) == FiniteMonadSpec.commutation(c, x, y, t, s)


def test_continuation_right_strength_matches_generic():
    c = continuation(2)
    for nx, ny in [(1, 2), (2, 2), (2, 1)]:
        x, y = sized(nx), sized(ny)
        for t in range(c.obj(x).size):
            for b in range(ny):
                assert c.tau_prime_at(x, y, t, b) == FiniteMonadSpec.tau_prime_at(c, x, y, t, b)


def test_continuation_central_maps_factor_through_eta():
    c = continuation(2)
    rep = verify_centre_iso(c, sized(1), sized(1), test_objects=TESTS)
    assert rep.ok and rep.kleisli_morphisms == 4 and rep.central == 1


# ------------------------------------------------------------- semirings


def test_matrix_semiring_centre_is_centre_coefficients():
    elems, _, mul = boolean_matrices_2x2()
    zs = {"".join(map(str, m)) for m in brute_centre(elems, mul)}
    assert zs == {"0000", "1001"}

    s = bool_matrices(2)
    assert set(semiring_centre(s).carrier.labels) == zs
    t = semiring_monad(s)
    res = centre_at(t, sized(1), TESTS)
    # over a one-element set a coefficient vector is a single coefficient
    assert {s.carrier.label(v) for v in res.elements} == zs


@pytest.mark.parametrize("s", [booleans(), integers_mod(3)], ids=["B", "Z3"])
def test_commutative_semiring_monad_is_commutative(s):
    t = semiring_monad(s)
    assert check_commutative(t, small(2))
    res = centre_at(t, sized(2), TESTS)
    assert res.elements == list(range(t.obj(sized(2)).size))


def test_semiring_monad_requires_zero_first():
    # the Booleans with 1 listed before 0
    swapped = FinSemiring(finset(["1", "0"], "B'"), 1, 0, ((0, 0), (0, 1)), ((0, 1), (1, 1)), "B'")
    with pytest.raises(ValueError):
        SemiringMonad(swapped)


# ------------------------------------------------------------------ lists


def test_list_centre_within_cap():
    lst = ListMonad(3)
    res = centre_at(lst, sized(2), TESTS)
    assert res.labels() == ["[]", "[0]", "[1]"]
    with pytest.raises(SizeBlowup):
        lst.from_list(sized(1), [0] * 4)


# -------------------------------------------------------------- law suite


@pytest.mark.parametrize("t", [writer(D4), writer(cyclic(3)), IdentityMonad()],
                         ids=lambda t: t.name)
def test_law_suite_passes(t):
    rep = check_monad_laws(t, small(2))
    assert rep.ok and rep.exhaustive, str(rep)


def test_law_suite_reports_infeasible_rather_than_failing():
    rep = check_monad_laws(continuation(2), small(2))
    assert rep.ok
    assert rep.counts().get("infeasible", 0) > 0


class _ForgetfulWriter(WriterMonad):
    """Multiplication that drops the outer annotation."""

    def mu_at(self, x, tt):
        nm = self.monoid.size
        inner = tt // nm
        return inner


def test_corrupted_multiplication_is_caught():
    rep = check_monad_laws(_ForgetfulWriter(D4), small(2))
    assert not rep.ok
    failed = {c.law for c in rep.failures}
    assert "unit.right" in failed
    assert all(c.witness.startswith("at ") for c in rep.failures)


def test_centre_submonad_is_a_commutative_monad():
    z = CentreSubmonad(writer(D4), TESTS)
    rep = check_monad_laws(z, small(2))
    assert rep.ok and rep.exhaustive, str(rep)
    assert check_commutative(z, small(2))


# ----------------------------------------------------- iso and D4 example


def test_writer_iso_at_unit():
    rep = verify_centre_iso(writer(D4), sized(1), sized(1), test_objects=TESTS)
    assert (rep.kleisli_morphisms, rep.central, rep.factoring, rep.mismatches) == (8, 2, 2, [])


def test_writer_iso_on_larger_sets():
    rep = verify_centre_iso(writer(D4), sized(2), sized(1), test_objects=TESTS)
    assert rep.ok and rep.kleisli_morphisms == 64 and rep.central == 4


def test_iso_refuses_huge_homsets():
    with pytest.raises(SizeBlowup):
        verify_centre_iso(writer(D4), sized(5), sized(3), test_objects=TESTS)


def test_d4_obstruction():
    rep = d4_noncentralisable_witness()
    assert rep.central_endo_homset == 2
    assert not rep.power_of_8 and rep.obstruction
    assert all(k & (k - 1) == 0 and (k.bit_length() - 1) % 3 == 0 for k in rep.hom_sizes)
    assert rep.rotations_commutative
    assert set(rep.rotations_noncentral) == {"r", "r3"}
    assert rep.centre_elements_central
    assert "no centre exists" in str(rep)


def test_central_morphism_examples():
    one = sized(1)
    w = writer(D4)
    for label, central in [("e", True), ("r2", True), ("r", False), ("s", False), ("sr3", False)]:
        f = kleisli_arrow([w.element(one, 0, label)], one, one, w)
        assert is_central_morphism(w, f, TESTS) == central
    z2 = writer(cyclic(2))
    x, y = sized(2), sized(2)
    ty = z2.obj(y)
    for table in itertools.product(range(ty.size), repeat=x.size):
        assert is_central_morphism(z2, kleisli_arrow(table, x, y, z2), TESTS)


def test_central_morphism_needs_its_result_object():
    w = writer(D4)
    f = FinFunction(sized(1), w.obj(sized(1)), (0,))
    with pytest.raises(ValueError):
        is_central_morphism(w, f, TESTS)


def test_centre_report_json():
    res = centre_at(writer(D4), sized(1), TESTS)
    data = res.to_json()
    assert data["carrier_size"] == 2 and data["monad_object_size"] == 8
    assert data["test_object_sizes"] == [1, 2] and data["stable"] is True


def test_centre_timing_budget():
    start = time.perf_counter()
    for n in (1, 2, 3):
        centre_at(writer(D4), sized(n), TESTS)
    assert time.perf_counter() - start < 1.0


# -------------------------------------------------------------- properties

# centrality in the continuation monad is checked against one-element test
# objects only: a two-element one needs 2^32 continuations at |Y| = 2
MONADS = {"writer": (writer(D4), TESTS), "cont": (continuation(2), make_tests((1,)))}


def _random_kleisli(t, tests, data, x, y):
    ty = t.obj(y)
    if data.draw(st.booleans()):
        centre = centre_at(t, y, tests).elements
        table = [data.draw(st.sampled_from(centre)) for _ in range(x.size)]
    else:
        table = [data.draw(st.integers(0, ty.size - 1)) for _ in range(x.size)]
    return kleisli_arrow(table, x, y, t)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(MONADS)), st.integers(1, 2), st.integers(1, 2), st.integers(1, 2),
       st.data())
def test_precomposition_keeps_centrality(name, nw, nx, ny, data):
    t, tests = MONADS[name]
    w, x, y = sized(nw), sized(nx), sized(ny)
    f = _random_kleisli(t, tests, data, x, y)
    g = [data.draw(st.integers(0, nx - 1)) for _ in range(nw)]
    if is_central_morphism(t, f, tests):
        assert is_central_morphism(t, kleisli_arrow([f(i) for i in g], w, y, t), tests)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(MONADS)), st.integers(1, 2), st.integers(1, 2), st.integers(1, 2),
       st.data())
def test_postcomposition_keeps_centrality(name, nx, ny, nz, data):
    t, tests = MONADS[name]
    x, y, z = sized(nx), sized(ny), sized(nz)
    f = _random_kleisli(t, tests, data, x, y)
    h = FinFunction(y, z, tuple(data.draw(st.integers(0, nz - 1)) for _ in range(ny)))
    if is_central_morphism(t, f, tests):
        moved = [t.fmap_at(h, f(a)) for a in range(nx)]
        assert is_central_morphism(t, kleisli_arrow(moved, x, z, t), tests)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["writer", "cont", "mat", "s3"]), st.integers(0, 2))
def test_centre_contains_eta_image_and_includes_injectively(name, n):
    t = {"writer": writer(D4), "cont": continuation(2), "mat": semiring_monad(bool_matrices(2)),
         "s3": writer(symmetric(3))}[name]
    x = sized(n)
    res = centre_at(t, x, TESTS)
    assert {t.eta_at(x, a) for a in range(n)} <= set(res.elements)
    table = res.inclusion.table
    assert len(set(table)) == len(table)
