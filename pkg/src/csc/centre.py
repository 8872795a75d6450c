"""Strong monads on finite sets as executable data, and their centres.

A :class:`FiniteMonadSpec` supplies the object map and the unit,
multiplication, strength and functor action pointwise on element indices.
Tables (:class:`~csc.finite.FinFunction`) are derived from the pointwise
operations on demand.  The right strength is always derived from the left
strength and the symmetry.

The centre of ``T`` at ``X`` is quantified over all sets ``Y``; here it is
computed against a finite list of test objects, so it is an upper
approximation of the true centre unless the test objects are known to
suffice (they do for writer monads, where ``|Y| = 1`` already decides it).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .finite import (
    DEFAULT_SIZE_CAP, MAX_EXPONENT, ONE, FinFunction, FinMonoid, FinSemiring, FinSet, SizeBlowup,
    check_cap, show_size, decode_table, encode_table, exponential, finset, from_entries, identity,
    nonzero_entries, product,
    sized, swap, tabulate,
)


def _digit(index: int, length: int, base: int, pos: int) -> int:
    """Entry ``pos`` of the table encoded by ``index``."""
    return (index // base ** (length - 1 - pos)) % base


class NotInCarrier(Exception):
    pass


class FiniteMonadSpec:
    """Base class; subclasses implement ``obj``, ``fmap_at``, ``eta_at``,
    ``mu_at`` and ``tau_at``."""

    name = "T"
    # relative cost of one pointwise operation, used by the law suite to
    # decide between exhaustive and sampled checking
    op_cost = 1

    def __init__(self, size_cap: int = DEFAULT_SIZE_CAP):
        self.size_cap = size_cap
        self._tables: dict = {}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    # primitives -------------------------------------------------------

    def obj(self, x: FinSet) -> FinSet:
        raise NotImplementedError

    def fmap_at(self, f: FinFunction, t: int) -> int:
        raise NotImplementedError

    def eta_at(self, x: FinSet, a: int) -> int:
        raise NotImplementedError

    def mu_at(self, x: FinSet, tt: int) -> int:
        raise NotImplementedError

    def tau_at(self, x: FinSet, y: FinSet, a: int, t: int) -> int:
        """Left strength ``X x T Y -> T(X x Y)``."""
        raise NotImplementedError

    # derived ----------------------------------------------------------

    def bind_at(self, g: FinFunction, t: int) -> int:
        """``mu . T g`` at ``t``; subclasses may shortcut the composite."""
        return self.mu_at(g.cod_base, self.fmap_at(g, t))

    def tau_prime_at(self, x: FinSet, y: FinSet, t: int, b: int) -> int:
        """Right strength ``T X x Y -> T(X x Y)``, i.e. ``T(swap) . tau . swap``."""
        return self.fmap_at(self._cached(("swap", y.key, x.key), lambda: swap(y, x)),
                            self.tau_at(y, x, b, t))

    def _cached(self, key, make):
        try:
            return self._tables[key]
        except KeyError:
            v = self._tables[key] = make()
            return v

    def fmap(self, f: FinFunction) -> FinFunction:
        return tabulate(self.obj(f.dom), self.obj(f.cod), lambda t: self.fmap_at(f, t),
                        self.size_cap)

    def eta(self, x: FinSet) -> FinFunction:
        return self._cached(("eta", x.key), lambda: tabulate(
            x, self.obj(x), lambda a: self.eta_at(x, a), self.size_cap))

    def mu(self, x: FinSet) -> FinFunction:
        tx = self.obj(x)
        return self._cached(("mu", x.key), lambda: tabulate(
            self.obj(tx), tx, lambda tt: self.mu_at(x, tt), self.size_cap))

    def tau(self, x: FinSet, y: FinSet) -> FinFunction:
        ty = self.obj(y)
        nt = ty.size
        return self._cached(("tau", x.key, y.key), lambda: tabulate(
            product(x, ty), self.obj(product(x, y)),
            lambda i: self.tau_at(x, y, i // nt, i % nt), self.size_cap))

    def tau_prime(self, x: FinSet, y: FinSet) -> FinFunction:
        ny = y.size
        return self._cached(("tau'", x.key, y.key), lambda: tabulate(
            product(self.obj(x), y), self.obj(product(x, y)),
            lambda i: self.tau_prime_at(x, y, i // ny, i % ny), self.size_cap))

    def kleisli(self, f: FinFunction, g: FinFunction, z: FinSet) -> FinFunction:
        """``g . f`` in the Kleisli category, for ``f: X -> T Y``, ``g: Y -> T Z``."""
        gg = _with_base(g, z)
        return FinFunction(f.dom, self.obj(z), tuple(self.bind_at(gg, t) for t in f.table))

    def commutation(self, x: FinSet, y: FinSet, t: int, s: int) -> tuple[int, int]:
        """Both sides of the centre condition at ``t in T X``, ``s in T Y``:
        ``mu(T tau'(tau(t, s)))`` and ``mu(T tau(tau'(t, s)))``."""
        tx, ty = self.obj(x), self.obj(y)
        xy = product(x, y)
        lhs = self.bind_at(_with_base(self.tau_prime(x, y), xy), self.tau_at(tx, y, t, s))
        rhs = self.bind_at(_with_base(self.tau(x, y), xy), self.tau_prime_at(x, ty, t, s))
        return lhs, rhs

    def commutes(self, x: FinSet, y: FinSet, t: int, s: int) -> bool:
        lhs, rhs = self.commutation(x, y, t, s)
        return lhs == rhs


class _KleisliArrow(FinFunction):
    """A FinFunction ``A -> T B`` that remembers ``B``."""


def _with_base(g: FinFunction, base: FinSet) -> FinFunction:
    if getattr(g, "cod_base", None) == base:
        return g
    k = object.__new__(_KleisliArrow)
    object.__setattr__(k, "dom", g.dom)
    object.__setattr__(k, "cod", g.cod)
    object.__setattr__(k, "table", g.table)
    object.__setattr__(k, "cod_base", base)
    return k


def kleisli_arrow(table, dom: FinSet, base: FinSet, t: FiniteMonadSpec) -> FinFunction:
    """Build ``f: dom -> T base`` from a table of ``T base`` indices."""
    return _with_base(FinFunction(dom, t.obj(base), tuple(table)), base)


# ----------------------------------------------------------- the monads


class IdentityMonad(FiniteMonadSpec):
    name = "Id"

    def obj(self, x):
        return x

    def fmap_at(self, f, t):
        return f(t)

    def eta_at(self, x, a):
        return a

    def mu_at(self, x, tt):
        return tt

    def tau_at(self, x, y, a, t):
        return a * y.size + t


class WriterMonad(FiniteMonadSpec):
    """``T X = X x M`` for a finite monoid ``M``."""

    def __init__(self, monoid: FinMonoid, size_cap: int = DEFAULT_SIZE_CAP):
        super().__init__(size_cap)
        self.monoid = monoid
        self.name = f"writer({monoid.name})"

    def obj(self, x):
        m = self.monoid.carrier
        nm = m.size
        return FinSet(x.size * nm, key=(self.name, x.key),
                      label_fn=lambda i: f"({x.label(i // nm)},{m.label(i % nm)})")

    def fmap_at(self, f, t):
        nm = self.monoid.size
        a, c = divmod(t, nm)
        return f(a) * nm + c

    def eta_at(self, x, a):
        return a * self.monoid.size + self.monoid.unit

    def mu_at(self, x, tt):
        nm = self.monoid.size
        inner, c2 = divmod(tt, nm)
        a, c1 = divmod(inner, nm)
        # the outer annotation was written first
        return a * nm + self.monoid.mult[c2][c1]

    def tau_at(self, x, y, a, t):
        nm = self.monoid.size
        b, c = divmod(t, nm)
        return (a * y.size + b) * nm + c

    def bind_at(self, g, t):
        nm = self.monoid.size
        a, c1 = divmod(t, nm)
        b, c2 = divmod(g(a), nm)
        return b * nm + self.monoid.mult[c1][c2]

    def element(self, x: FinSet, a: int, label: str) -> int:
        return a * self.monoid.size + self.monoid.element(label)


class ContinuationMonad(FiniteMonadSpec):
    """``T X = [[X, R], R]`` for an ``r``-element answer set ``R``.

    An element is the table of its values on every continuation ``X -> R``,
    continuations being listed in the index order of ``R^X``.
    """

    max_continuations = 1 << 16
    op_cost = 8

    def __init__(self, r: int = 2, size_cap: int = DEFAULT_SIZE_CAP):
        super().__init__(size_cap)
        self.r = r
        self.answers = FinSet(r, tuple(f"s{k}" for k in range(r)), key=("answers", r))
        self.name = f"cont({r})"
        self._splits: dict = {}

    def obj(self, x):
        return exponential(exponential(x, self.answers), self.answers)

    def _conts(self, n: int):
        """Every continuation on an ``n``-element set, as a tuple of answers."""
        if self.r ** n > self.max_continuations:
            raise SizeBlowup(f"{self.r}^{n} continuations cannot be enumerated")
        return itertools.product(range(self.r), repeat=n)

    def _index(self, digits) -> int:
        return encode_table(digits, self.r)

    def _values(self, x: FinSet, t: int) -> list[int]:
        if x.size > MAX_EXPONENT or self.r ** x.size > self.max_continuations:
            raise SizeBlowup(f"{self.r}^{x.size} continuations cannot be enumerated")
        return decode_table(t, self.r ** x.size, self.r)

    def eta_at(self, x, a):
        return self._index(k[a] for k in self._conts(x.size))

    def fmap_at(self, f, t):
        vals = self._values(f.dom, t)
        table = f.table
        return self._index(vals[self._index(h[v] for v in table)]
                           for h in self._conts(f.cod.size))

    def mu_at(self, x, tt):
        tx = self.obj(x)
        vals = decode_table(tt, self.r ** tx.size, self.r)
        inner = [self._values(x, u) for u in range(tx.size)]
        return self._index(vals[self._index(u[k] for u in inner)]
                           for k in range(self.r ** x.size))

    def tau_at(self, x, y, a, t):
        vals = self._values(y, t)
        ny = y.size
        lo = a * ny
        return self._index(vals[self._index(h[lo:lo + ny])]
                           for h in self._conts(x.size * ny))

    def tau_prime_at(self, x, y, t, b):
        vals = self._values(x, t)
        nx, ny = x.size, y.size
        return self._index(vals[self._index(h[a * ny + b] for a in range(nx))]
                           for h in self._conts(nx * ny))

    def bind_at(self, g, t):
        vals = self._values(g.dom, t)
        inner = [self._values(g.cod_base, v) for v in g.table]
        return self._index(vals[self._index(u[k] for u in inner)]
                           for k in range(self.r ** g.cod_base.size))

    def _split(self, nx: int, ny: int):
        """For every continuation ``k`` on ``X x Y``, the indices of its
        curried forms ``y |-> (x |-> k(x, y))`` and ``x |-> (y |-> k(x, y))``."""
        key = (nx, ny)
        if key not in self._splits:
            cols, rows = [], []
            for k in self._conts(nx * ny):
                cols.append([self._index(k[a * ny + b] for a in range(nx)) for b in range(ny)])
                rows.append([self._index(k[a * ny:(a + 1) * ny]) for a in range(nx)])
            self._splits[key] = (cols, rows)
        return self._splits[key]

    def _sides(self, x, y, t, s):
        # the two composites send k: X x Y -> R to s(y |-> t(x |-> k(x, y)))
        # and t(x |-> s(y |-> k(x, y))) respectively
        tv, sv = self._values(x, t), self._values(y, s)
        r = self.r
        cols, rows = self._split(x.size, y.size)
        for col, row in zip(cols, rows):
            i = 0
            for c in col:
                i = i * r + tv[c]
            j = 0
            for c in row:
                j = j * r + sv[c]
            yield sv[i], tv[j]

    def commutation(self, x, y, t, s):
        pairs = list(self._sides(x, y, t, s))
        return self._index(a for a, _ in pairs), self._index(b for _, b in pairs)

    def commutes(self, x, y, t, s):
        return all(a == b for a, b in self._sides(x, y, t, s))

    def run(self, x: FinSet, t: int, k: FinFunction) -> int:
        """Apply ``t`` to the continuation ``k: X -> R``."""
        return self._values(x, t)[self._index(k.table)]


class SemiringMonad(FiniteMonadSpec):
    """Finite formal sums ``sum s_i x_i``; over a finite ``X`` these are the
    coefficient vectors ``X -> S``.

    Vectors are handled through their nonzero entries, which requires the
    zero of the semiring to be its first element.
    """

    def __init__(self, semiring: FinSemiring, size_cap: int = DEFAULT_SIZE_CAP):
        if semiring.zero != 0:
            raise ValueError("the zero of the semiring must be its first element")
        super().__init__(size_cap)
        self.s = semiring
        self.name = f"T_{semiring.name}"

    def obj(self, x):
        return exponential(x, self.s.carrier)

    def vec(self, x: FinSet, t: int) -> list[int]:
        return decode_table(t, x.size, self.s.size)

    def _entries(self, x: FinSet, t: int):
        return nonzero_entries(t, x.size, self.s.size)

    def _encode(self, x: FinSet, acc: dict) -> int:
        return from_entries(((k, v) for k, v in acc.items() if v), x.size, self.s.size)

    def eta_at(self, x, a):
        return from_entries([(a, self.s.one)], x.size, self.s.size)

    def fmap_at(self, f, t):
        add = self.s.add
        acc: dict = {}
        for a, c in self._entries(f.dom, t):
            b = f(a)
            acc[b] = add[acc.get(b, 0)][c]
        return self._encode(f.cod, acc)

    def _sum(self, x: FinSet, pairs, base: FinSet) -> int:
        # sum of c * u over (c, u) with u a vector on base
        add, mul = self.s.add, self.s.mul
        acc: dict = {}
        for c, u in pairs:
            for b, d in self._entries(base, u):
                acc[b] = add[acc.get(b, 0)][mul[c][d]]
        return self._encode(base, acc)

    def mu_at(self, x, tt):
        return self._sum(x, ((c, u) for u, c in self._entries(self.obj(x), tt)), x)

    def tau_at(self, x, y, a, t):
        ny = y.size
        return from_entries([(a * ny + b, c) for b, c in self._entries(y, t)],
                            x.size * ny, self.s.size)

    def bind_at(self, g, t):
        return self._sum(g.cod_base, ((c, g(a)) for a, c in self._entries(g.dom, t)),
                         g.cod_base)


class ListMonad(FiniteMonadSpec):
    """Lists of length at most ``cap``.

    Not a monad on the nose: multiplication can leave the cap, in which case
    :class:`SizeBlowup` is raised.  Only :meth:`commutation` (which works on
    uncapped tuples) is meant for use.
    """

    def __init__(self, cap: int = 3, size_cap: int = DEFAULT_SIZE_CAP):
        super().__init__(size_cap)
        self.cap = cap
        self.name = f"list({cap})"

    def _offsets(self, n: int) -> list[int]:
        offs, total = [], 0
        for length in range(self.cap + 1):
            offs.append(total)
            total += n ** length
        offs.append(total)
        return offs

    def obj(self, x):
        n = x.size
        total = self._offsets(n)[-1]
        return FinSet(total, key=(self.name, x.key),
                      label_fn=lambda i: "[" + ",".join(x.label(a) for a in self.to_list(x, i)) + "]")

    def to_list(self, x: FinSet, i: int) -> tuple:
        offs = self._offsets(x.size)
        for length in range(self.cap + 1):
            if i < offs[length + 1]:
                return tuple(decode_table(i - offs[length], length, x.size))
        raise IndexError(i)

    def from_list(self, x: FinSet, items) -> int:
        items = tuple(items)
        if len(items) > self.cap:
            raise SizeBlowup(f"list of length {len(items)} exceeds cap {self.cap}")
        return self._offsets(x.size)[len(items)] + encode_table(items, x.size)

    def eta_at(self, x, a):
        return self.from_list(x, (a,))

    def fmap_at(self, f, t):
        return self.from_list(f.cod, [f(a) for a in self.to_list(f.dom, t)])

    def mu_at(self, x, tt):
        tx = self.obj(x)
        return self.from_list(x, [a for u in self.to_list(tx, tt) for a in self.to_list(x, u)])

    def tau_at(self, x, y, a, t):
        return self.from_list(product(x, y), [a * y.size + b for b in self.to_list(y, t)])

    def commutation(self, x, y, t, s):
        ts, ss = self.to_list(x, t), self.to_list(y, s)
        # mu . T tau' . tau: for each y in s, run t
        lhs = tuple((a, b) for b in ss for a in ts)
        # mu . T tau . tau': for each x in t, run s
        rhs = tuple((a, b) for a in ts for b in ss)
        return lhs, rhs


class CentreSubmonad(FiniteMonadSpec):
    """The centre of ``base`` with its monad structure restricted from ``base``."""

    def __init__(self, base: FiniteMonadSpec, test_objects, size_cap: int = DEFAULT_SIZE_CAP):
        super().__init__(size_cap)
        self.base = base
        self.test_objects = tuple(test_objects)
        self.name = f"Z({base.name})"
        self._carriers: dict = {}

    def carrier(self, x: FinSet) -> tuple:
        # the bundled monads act on element indices only, so the carrier
        # depends on the size of x and not on its labels
        key = x.size
        if key not in self._carriers:
            res = centre_at(self.base, sized(x.size), self.test_objects)
            self._carriers[key] = (tuple(res.elements), {u: k for k, u in enumerate(res.elements)})
        return self._carriers[key][0]

    def locate(self, x: FinSet, u: int) -> int:
        self.carrier(x)
        try:
            return self._carriers[x.size][1][u]
        except KeyError:
            raise NotInCarrier(f"{self.base.obj(x).label(u)} is not central") from None

    def obj(self, x):
        car = self.carrier(x)
        tx = self.base.obj(x)
        return FinSet(len(car), key=(self.name, x.key),
                      label_fn=lambda i: tx.label(car[i]))

    def iota_at(self, x: FinSet, z: int) -> int:
        return self.carrier(x)[z]

    def iota(self, x: FinSet) -> FinFunction:
        return FinFunction(self.obj(x), self.base.obj(x), self.carrier(x))

    def eta_at(self, x, a):
        return self.locate(x, self.base.eta_at(x, a))

    def fmap_at(self, f, t):
        return self.locate(f.cod, self.base.fmap_at(f, self.carrier(f.dom)[t]))

    def mu_at(self, x, zz):
        zx = self.obj(x)
        outer = self.carrier(zx)[zz]  # in T(Z X)
        return self.locate(x, self.base.bind_at(_with_base(self.iota(x), x), outer))

    def tau_at(self, x, y, a, t):
        return self.locate(product(x, y), self.base.tau_at(x, y, a, self.carrier(y)[t]))


def writer(monoid: FinMonoid) -> WriterMonad:
    return WriterMonad(monoid)


def continuation(r: int = 2) -> ContinuationMonad:
    return ContinuationMonad(r)


def semiring_monad(s: FinSemiring) -> SemiringMonad:
    return SemiringMonad(s)


# ------------------------------------------------------------- centres


def monoid_centre(m: FinMonoid) -> FinMonoid:
    n = m.size
    elems = [a for a in range(n) if all(m.mult[a][b] == m.mult[b][a] for b in range(n))]
    return m.submonoid(elems, f"Z({m.name})")


def semiring_centre(s: FinSemiring) -> FinSemiring:
    n = s.size
    elems = [a for a in range(n) if all(s.mul[a][b] == s.mul[b][a] for b in range(n))]
    return s.subsemiring(elems, f"Z({s.name})")


def test_objects(sizes=(1, 2)) -> list[FinSet]:
    return [sized(k) for k in sizes]


@dataclass
class CentreResult:
    base: FinSet
    carrier: FinSet
    inclusion: FinFunction
    elements: list
    test_objects_used: list
    stable: bool

    def labels(self) -> list[str]:
        cod = self.inclusion.cod
        return [cod.label(u) for u in self.elements]

    def to_json(self) -> dict:
        return {
            "base_size": self.base.size,
            "monad_object_size": self.inclusion.cod.size,
            "carrier_size": len(self.elements),
            "carrier": self.labels(),
            "test_object_sizes": [y.size for y in self.test_objects_used],
            "stable": self.stable,
        }


def _central_elements(t: FiniteMonadSpec, x: FinSet, candidates, objs) -> list:
    keep = []
    for u in candidates:
        ok = True
        for y in objs:
            for s in range(t.obj(y).size):
                if not t.commutes(x, y, u, s):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            keep.append(u)
    return keep


def centre_at(t: FiniteMonadSpec, x: FinSet, test_objects=None) -> CentreResult:
    tests = list(test_objects) if test_objects is not None else globals()["test_objects"]()
    tx = t.obj(x)
    check_cap(tx.size, t.size_cap, f"{t.name} at a {x.size}-element set")
    for y in tests:
        check_cap(tx.size * t.obj(y).size, t.size_cap * 10, "centre search space")
    if tests:
        largest = max(range(len(tests)), key=lambda k: tests[k].size)
        rest = tests[:largest] + tests[largest + 1:]
    else:
        largest, rest = None, []
    without = _central_elements(t, x, range(tx.size), rest)
    elements = _central_elements(t, x, without, [tests[largest]]) if tests else without
    carrier = FinSet(len(elements), key=("centre", t.name, x.key, tuple(y.key for y in tests)),
                     label_fn=lambda i: tx.label(elements[i]))
    return CentreResult(x, carrier, FinFunction(carrier, tx, tuple(elements)), elements,
                        tests, elements == without)


def is_central_morphism(t: FiniteMonadSpec, f: FinFunction, test_objects=None,
                        base: FinSet | None = None) -> bool:
    """Premonoidal centrality of ``f: X -> T Y`` in the Kleisli category.

    ``f`` is tested against the generic morphism ``id: T Y' -> T Y'`` for each
    test object ``Y'``, i.e. the two composites ``(Y (x)r id) . (f (x)l TY')``
    and ``(f (x)l Y') . (X (x)r id)`` are compared on ``X x T Y'``.
    """
    tests = list(test_objects) if test_objects is not None else globals()["test_objects"]()
    y = base if base is not None else getattr(f, "cod_base", None)
    if y is None:
        raise ValueError("the result object of the Kleisli arrow is required")
    x = f.dom
    for y2 in tests:
        ty2 = t.obj(y2)
        yy2 = product(y, y2)
        # Y (x)r id_{TY'}: Y x TY' -> T(Y x Y')
        right_y = _with_base(t.tau(y, y2), yy2)
        # f (x)l Y': X x Y' -> T(Y x Y')
        n2 = y2.size
        left_f = _with_base(tabulate(product(x, y2), t.obj(yy2),
                                     lambda i: t.tau_prime_at(y, y2, f(i // n2), i % n2)), yy2)
        for a in range(x.size):
            fa = f(a)
            for s in range(ty2.size):
                # (f (x)l TY')(a, s) = tau'(f a, s) in T(Y x TY')
                lhs = t.bind_at(right_y, t.tau_prime_at(y, ty2, fa, s))
                # (X (x)r id)(a, s) = tau(a, s) in T(X x Y')
                rhs = t.bind_at(left_f, t.tau_at(x, y2, a, s))
                if lhs != rhs:
                    return False
    return True


def check_commutative(t: FiniteMonadSpec, objects) -> bool:
    objects = list(objects)
    for x in objects:
        for y in objects:
            for u in range(t.obj(x).size):
                for s in range(t.obj(y).size):
                    if not t.commutes(x, y, u, s):
                        return False
    return True


# ------------------------------------------------------------ law suite


@dataclass
class LawCheck:
    law: str
    sizes: tuple
    status: str  # exhaustive | sampled | infeasible | failed
    checked: int = 0
    domain_size: int | None = None
    witness: str = ""

    def to_json(self) -> dict:
        return {"law": self.law, "sizes": list(self.sizes), "status": self.status,
                "checked": self.checked,
                "domain_size": None if self.domain_size is None else show_size(self.domain_size),
                "witness": self.witness}


@dataclass
class LawReport:
    monad: str
    checks: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.status == "failed"]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def exhaustive(self) -> bool:
        return all(c.status == "exhaustive" for c in self.checks)

    def counts(self) -> dict:
        out: dict = {}
        for c in self.checks:
            out[c.status] = out.get(c.status, 0) + 1
        return out

    def to_json(self) -> dict:
        return {"monad": self.monad, "ok": self.ok, "counts": self.counts(),
                "checks": [c.to_json() for c in self.checks]}

    def __str__(self):
        lines = [f"{self.monad}: {'PASS' if self.ok else 'FAIL'} {self.counts()}"]
        for c in self.failures:
            lines.append(f"  {c.law} at sizes {c.sizes}: {c.witness}")
        return "\n".join(lines)


def _assoc(x: FinSet, y: FinSet, z: FinSet) -> FinFunction:
    ny, nz = y.size, z.size
    return FinFunction(product(product(x, y), z), product(x, product(y, z)),
                       tuple(a * ny * nz + b * nz + c
                             for a in range(x.size) for b in range(ny) for c in range(nz)))


def _snd(x: FinSet) -> FinFunction:
    return FinFunction(product(ONE, x), x, tuple(range(x.size)))


def _fn(dom: FinSet, cod: FinSet, index: int) -> FinFunction:
    return FinFunction(dom, cod, tuple(decode_table(index, dom.size, cod.size)))


def check_monad_laws(t: FiniteMonadSpec, objects, work_cap: int = 4_000_000,
                     samples: int = 8, seed: int = 0, max_point_bits: int = 1 << 17) -> LawReport:
    """Check functor, monad and strength laws at every choice of listed objects.

    The cost of one point of a law instance at sizes ``n1, n2, ...`` is
    estimated by the bit length of ``T T Z`` with ``|Z| = n1 * n2 * ...``.
    An instance is checked exhaustively when its domain size times that cost
    stays within ``work_cap``, on ``samples`` seeded random points when the
    cost is at most ``max_point_bits``, and is reported ``infeasible``
    otherwise.
    """
    rng = random.Random(seed)
    report = LawReport(t.name)
    objects = list(objects)
    weight: dict = {}

    def point_cost(sizes):
        n = max(max(sizes), math.prod(sizes))
        if n not in weight:
            try:
                weight[n] = t.obj(t.obj(sized(n))).size.bit_length()
            except SizeBlowup:
                weight[n] = None
        return weight[n]

    def run(law, sizes, spaces_fn, pred):
        cost = point_cost(sizes)
        try:
            if cost is None or cost > max_point_bits:
                raise SizeBlowup(f"elements of T T Z with |Z| = {math.prod(sizes)} are too large")
            spaces = spaces_fn()
            total = math.prod(s.size for s in spaces)
        except SizeBlowup as e:
            report.checks.append(LawCheck(law, sizes, "infeasible", witness=str(e)))
            return
        if total == 0:
            points = iter(())
            status = "exhaustive"
        elif total * cost * t.op_cost <= work_cap:
            points = itertools.product(*(range(s.size) for s in spaces))
            status = "exhaustive"
        else:
            points = (tuple(rng.randrange(s.size) for s in spaces) for _ in range(samples))
            status = "sampled"
        n = 0
        try:
            for p in points:
                n += 1
                ok, detail = pred(*p)
                if not ok:
                    report.checks.append(LawCheck(law, sizes, "failed", n, total,
                                                  f"at {p}: {detail}"))
                    return
        except SizeBlowup as e:
            report.checks.append(LawCheck(law, sizes, "infeasible", n, total, str(e)))
            return
        except NotInCarrier as e:
            report.checks.append(LawCheck(law, sizes, "failed", n, total, str(e)))
            return
        report.checks.append(LawCheck(law, sizes, status, n, total))

    def eq(a, b):
        return a == b, f"{a} != {b}"

    for x in objects:
        sz = (x.size,)
        tx = lambda x=x: t.obj(x)
        run("functor.id", sz, lambda: [tx()],
            lambda u, x=x: eq(t.fmap_at(identity(x), u), u))
        run("unit.left", sz, lambda: [tx()],
            lambda u, x=x: eq(t.mu_at(x, t.eta_at(t.obj(x), u)), u))
        run("unit.right", sz, lambda: [tx()],
            lambda u, x=x: eq(t.mu_at(x, t.fmap_at(t.eta(x), u)), u))
        run("mu.assoc", sz, lambda x=x: [t.obj(t.obj(t.obj(x)))],
            lambda w, x=x: eq(t.mu_at(x, t.fmap_at(t.mu(x), w)), t.mu_at(x, t.mu_at(t.obj(x), w))))
        run("strength.unit", sz, lambda: [tx()],
            lambda u, x=x: eq(t.fmap_at(_snd(x), t.tau_at(ONE, x, 0, u)), u))

    for x, y in itertools.product(objects, repeat=2):
        sz = (x.size, y.size)
        xy = product(x, y)
        run("eta.natural", sz, lambda x=x, y=y: [exponential(x, y), x],
            lambda f, a, x=x, y=y: eq(t.fmap_at(_fn(x, y, f), t.eta_at(x, a)),
                                      t.eta_at(y, _fn(x, y, f)(a))))
        run("mu.natural", sz, lambda x=x, y=y: [exponential(x, y), t.obj(t.obj(x))],
            lambda f, w, x=x, y=y: eq(t.fmap_at(_fn(x, y, f), t.mu_at(x, w)),
                                      t.mu_at(y, t.fmap_at(t.fmap(_fn(x, y, f)), w))))
        run("bind.agrees", sz, lambda x=x, y=y: [exponential(x, t.obj(y)), t.obj(x)],
            lambda g, u, x=x, y=y: eq(t.bind_at(_with_base(_fn(x, t.obj(y), g), y), u),
                                      t.mu_at(y, t.fmap_at(_fn(x, t.obj(y), g), u))))
        # on sets the strength is forced to be T(y |-> (a, y))
        run("strength.canonical", sz, lambda x=x, y=y: [x, t.obj(y)],
            lambda a, u, x=x, y=y, xy=xy: eq(
                t.tau_at(x, y, a, u),
                t.fmap_at(FinFunction(y, xy, tuple(a * y.size + b for b in range(y.size))), u)))
        run("strength.eta", sz, lambda x=x, y=y: [x, y],
            lambda a, b, x=x, y=y, xy=xy: eq(t.tau_at(x, y, a, t.eta_at(y, b)),
                                             t.eta_at(xy, a * y.size + b)))
        run("strength.mu", sz, lambda x=x, y=y: [x, t.obj(t.obj(y))],
            lambda a, w, x=x, y=y, xy=xy: eq(
                t.tau_at(x, y, a, t.mu_at(y, w)),
                t.mu_at(xy, t.fmap_at(t.tau(x, y), t.tau_at(x, t.obj(y), a, w)))))
        run("strength.natural", sz,
            lambda x=x, y=y: [exponential(x, x), exponential(y, y), x, t.obj(y)],
            lambda f, g, a, u, x=x, y=y: eq(
                t.tau_at(x, y, _fn(x, x, f)(a), t.fmap_at(_fn(y, y, g), u)),
                t.fmap_at(_product_fn(_fn(x, x, f), _fn(y, y, g)), t.tau_at(x, y, a, u))))

    for x, y, z in itertools.product(objects, repeat=3):
        sz = (x.size, y.size, z.size)
        run("functor.comp", sz,
            lambda x=x, y=y, z=z: [exponential(x, y), exponential(y, z), t.obj(x)],
            lambda f, g, u, x=x, y=y, z=z: eq(
                t.fmap_at(_fn(x, y, f).then(_fn(y, z, g)), u),
                t.fmap_at(_fn(y, z, g), t.fmap_at(_fn(x, y, f), u))))
        run("strength.assoc", sz, lambda x=x, y=y, z=z: [x, y, t.obj(z)],
            lambda a, b, u, x=x, y=y, z=z: eq(
                t.fmap_at(_assoc(x, y, z), t.tau_at(product(x, y), z, a * y.size + b, u)),
                t.tau_at(x, product(y, z), a, t.tau_at(y, z, b, u))))
    return report


def _product_fn(f: FinFunction, g: FinFunction) -> FinFunction:
    from .finite import product_map

    return product_map(f, g)


# ------------------------------------------- isomorphism and the D4 demo


@dataclass
class IsoReport:
    monad: str
    x_size: int
    y_size: int
    kleisli_morphisms: int
    central: int
    factoring: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.central == self.factoring

    def to_json(self) -> dict:
        return {"monad": self.monad, "x_size": self.x_size, "y_size": self.y_size,
                "kleisli_morphisms": self.kleisli_morphisms, "central": self.central,
                "factoring_through_centre": self.factoring,
                "mismatches": self.mismatches, "ok": self.ok}

    def __str__(self):
        return (f"{self.monad} X={self.x_size} Y={self.y_size}: {self.kleisli_morphisms} "
                f"Kleisli morphisms, {self.central} central, {self.factoring} factor "
                f"through the centre, {len(self.mismatches)} mismatches")


ISO_ENUM_CAP = 10 ** 6


def verify_centre_iso(t: FiniteMonadSpec, x: FinSet, y: FinSet, centre: CentreResult | None = None,
                      test_objects=None) -> IsoReport:
    """Compare premonoidal centrality of every ``f: X -> T Y`` with factoring
    through the centre inclusion at ``Y``."""
    tests = list(test_objects) if test_objects is not None else globals()["test_objects"]()
    ty = t.obj(y)
    total = ty.size ** x.size
    check_cap(total, ISO_ENUM_CAP, "Kleisli hom-set")
    if centre is None:
        centre = centre_at(t, y, tests)
    members = set(centre.elements)
    if len(set(centre.inclusion.table)) != len(centre.inclusion.table):
        raise AssertionError("centre inclusion is not injective")
    central = factoring = 0
    mismatches = []
    for table in itertools.product(range(ty.size), repeat=x.size):
        f = kleisli_arrow(table, x, y, t)
        c = is_central_morphism(t, f, tests)
        fac = all(v in members for v in table)
        central += c
        factoring += fac
        if c != fac:
            mismatches.append([ty.label(v) for v in table])
    return IsoReport(t.name, x.size, y.size, total, central, factoring, mismatches)


def _is_power_of(n: int, base: int) -> bool:
    if n < 1:
        return False
    while n % base == 0:
        n //= base
    return n == 1


@dataclass
class D4Report:
    central_endo_homset: int
    kleisli_endo_homset: int
    hom_sizes: list
    power_of_8: bool
    rotations_commutative: bool
    rotations_noncentral: list
    centre_elements_central: bool
    centre_labels: list

    @property
    def obstruction(self) -> bool:
        return not self.power_of_8

    def to_json(self) -> dict:
        return dict(self.__dict__, obstruction=self.obstruction)

    def __str__(self):
        return "\n".join([
            f"|Z(C_M)[1,1]| = {self.central_endo_homset} (of {self.kleisli_endo_homset} "
            f"Kleisli endomorphisms of 1); central elements {self.centre_labels}",
            f"hom-set sizes in C are powers of 8, e.g. {self.hom_sizes}",
            f"{self.central_endo_homset} is a power of 8: {self.power_of_8}"
            + ("  -> no centre exists" if self.obstruction else ""),
            f"rotations form a commutative submonoid: {self.rotations_commutative}; "
            f"non-central rotations: {self.rotations_noncentral}",
            f"every element of Z(D4) is central: {self.centre_elements_central}",
        ])


def d4_noncentralisable_witness() -> D4Report:
    from .finite import dihedral

    d4 = dihedral(4)
    t = WriterMonad(d4)
    carrier = d4.carrier
    # objects of C are the powers of D4; D4^0 = 1
    tests = [ONE, FinSet(carrier.size, carrier.labels, key=("D4^1",))]
    t1 = t.obj(ONE)
    central = []
    for v in range(t1.size):
        if is_central_morphism(t, kleisli_arrow([v], ONE, ONE, t), tests):
            central.append(t1.label(v))
    homs = sorted({(8 ** b) ** (8 ** a) for a in range(2) for b in range(2)})
    rotations = [d4.element(l) for l in ("e", "r", "r2", "r3")]
    rot = d4.submonoid(rotations, "Rot")
    noncentral = [d4.carrier.label(r) for r in rotations
                  if not is_central_morphism(t, kleisli_arrow([t.eta_at(ONE, 0) - d4.unit + r], ONE, ONE, t),
                                             tests)]
    z = monoid_centre(d4)
    zc = all(is_central_morphism(t, kleisli_arrow([p], ONE, ONE, t), tests)
             for p in z.parent_index)
    return D4Report(len(central), t1.size, homs, _is_power_of(len(central), 8),
                    rot.is_commutative(), noncentral, zc, central)
