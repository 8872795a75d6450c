"""Finite sets, functions as tables, finite monoids and semirings.

Elements of a :class:`FinSet` are the indices ``0 .. size-1``.  Encodings used
throughout the package:

* product ``A x B``: ``index(a, b) = a * |B| + b``
* function space ``B^A``: a table ``t`` of length ``|A|`` is the base-``|B|``
  numeral whose most significant digit is ``t[0]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

DEFAULT_SIZE_CAP = 1_000_000
# largest domain for which a function space is still represented by index
MAX_EXPONENT = 1 << 20


class SizeBlowup(Exception):
    pass


class FinSet:
    """A finite set identified by a structural ``key``.

    Labels are produced lazily so that very large carriers (such as iterated
    continuation objects) can be handled by index without being listed.
    """

    __slots__ = ("size", "key", "_label_fn", "_labels")

    def __init__(self, size: int, labels=None, key=None, label_fn=None):
        self.size = size
        self._labels = tuple(labels) if labels is not None else None
        if self._labels is not None:
            if len(self._labels) != size:
                raise ValueError("label count does not match size")
            if len(set(self._labels)) != size:
                raise ValueError("labels must be distinct")
        self._label_fn = label_fn
        self.key = key if key is not None else ("set", self._labels)

    def __eq__(self, other):
        return isinstance(other, FinSet) and self.size == other.size and self.key == other.key

    def __hash__(self):
        return hash((self.size, self.key))

    def __repr__(self):
        return f"FinSet(size={self.size}, key={self.key!r})"

    def label(self, i: int) -> str:
        if self._labels is not None:
            return self._labels[i]
        if self._label_fn is not None:
            return self._label_fn(i)
        return str(i)

    @property
    def labels(self) -> tuple:
        if self._labels is None:
            if self.size > DEFAULT_SIZE_CAP:
                raise SizeBlowup(f"refusing to list {self.size} labels")
            self._labels = tuple(self.label(i) for i in range(self.size))
        return self._labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"{label!r} is not an element") from None

    def __iter__(self):
        return iter(range(self.size))


def finset(labels, name: str | None = None) -> FinSet:
    labels = tuple(labels)
    return FinSet(len(labels), labels, key=("set", name, labels) if name else None)


def sized(n: int) -> FinSet:
    """The canonical ``n``-element set ``{0, ..., n-1}``."""
    return FinSet(n, tuple(str(i) for i in range(n)), key=("sized", n))


ONE = FinSet(1, ("*",), key=("one",))


def show_size(size: int) -> str:
    """Decimal for sizes that fit in 64 bits, a power of two otherwise."""
    return str(size) if size.bit_length() <= 64 else f"about 2^{size.bit_length() - 1}"


def check_cap(size: int, cap: int = DEFAULT_SIZE_CAP, what: str = "set"):
    if size > cap:
        shown = show_size(size)
        raise SizeBlowup(f"{what} has {shown} elements, above the cap of {cap}")


def product(a: FinSet, b: FinSet) -> FinSet:
    nb = b.size
    return FinSet(a.size * nb, key=("prod", a.key, b.key),
                  label_fn=lambda i: f"({a.label(i // nb)},{b.label(i % nb)})")


def pair(b: FinSet, x: int, y: int) -> int:
    return x * b.size + y


def unpair(b: FinSet, i: int) -> tuple[int, int]:
    return divmod(i, b.size)


def exponential(a: FinSet, b: FinSet) -> FinSet:
    """The set ``b^a`` of functions from ``a`` to ``b``."""
    if b.size > 1 and a.size > MAX_EXPONENT:
        raise SizeBlowup(f"function space of {b.size}^{a.size:.3g} elements cannot be represented"
                          if a.size < 1 << 1000 else "function space cannot be represented")
    size = b.size ** a.size

    def lab(i):
        t = decode_table(i, a.size, b.size)
        return "[" + ",".join(f"{a.label(k)}->{b.label(v)}" for k, v in enumerate(t)) + "]"

    return FinSet(size, key=("exp", a.key, b.key), label_fn=lab)


_SPLIT = 64


def encode_table(table, base: int) -> int:
    """Read ``table`` as a base-``base`` numeral, most significant entry first."""
    table = list(table)
    if base == 2 and len(table) > _SPLIT:
        return int("".join("1" if v else "0" for v in table), 2)
    return _encode(table, base, 0, len(table))


def _encode(table, base, lo, hi):
    if hi - lo <= _SPLIT:
        i = 0
        for v in table[lo:hi]:
            i = i * base + v
        return i
    mid = (lo + hi) // 2
    return _encode(table, base, lo, mid) * base ** (hi - mid) + _encode(table, base, mid, hi)


def decode_table(index: int, length: int, base: int) -> list[int]:
    """Inverse of :func:`encode_table` for tables of the given length."""
    if base == 2 and length > _SPLIT:
        return [int(c) for c in format(index, "b").zfill(length)[-length:]]
    out = [0] * length
    _decode(index, base, out, 0, length)
    return out


def _split(index: int, base: int, digits: int) -> tuple[int, int]:
    if base & (base - 1) == 0:
        shift = (base.bit_length() - 1) * digits
        return index >> shift, index & ((1 << shift) - 1)
    return divmod(index, base ** digits)


def from_entries(entries, length: int, base: int) -> int:
    """Encode a table given by its nonzero ``(position, entry)`` pairs."""
    if base & (base - 1) == 0:
        bits = base.bit_length() - 1
        return sum(v << (bits * (length - 1 - k)) for k, v in entries)
    return sum(v * base ** (length - 1 - k) for k, v in entries)


def nonzero_entries(index: int, length: int, base: int) -> list[tuple[int, int]]:
    """The ``(position, entry)`` pairs of a table with a nonzero entry,
    found without expanding long runs of zeros."""
    out: list = []
    _sparse(index, base, out, 0, length)
    return out


def _sparse(index, base, out, lo, hi):
    if index == 0:
        return
    if hi - lo <= _SPLIT:
        digits = []
        for _ in range(hi - lo):
            index, d = divmod(index, base)
            digits.append(d)
        out.extend((hi - 1 - k, d) for k, d in reversed(list(enumerate(digits))) if d)
        return
    mid = (lo + hi) // 2
    high, low = _split(index, base, hi - mid)
    _sparse(high, base, out, lo, mid)
    _sparse(low, base, out, mid, hi)


def _decode(index, base, out, lo, hi):
    if index == 0:
        return
    if hi - lo <= _SPLIT:
        for k in range(hi - 1, lo - 1, -1):
            index, out[k] = divmod(index, base)
        return
    mid = (lo + hi) // 2
    high, low = _split(index, base, hi - mid)
    _decode(high, base, out, lo, mid)
    _decode(low, base, out, mid, hi)


@dataclass(frozen=True)
class FinFunction:
    dom: FinSet
    cod: FinSet
    table: tuple

    def __post_init__(self):
        if len(self.table) != self.dom.size:
            raise ValueError("table length does not match the domain")
        n = self.cod.size
        for v in self.table:
            if not 0 <= v < n:
                raise ValueError(f"table entry {v} outside codomain of size {n}")

    def __call__(self, i: int) -> int:
        return self.table[i]

    def then(self, g: "FinFunction") -> "FinFunction":
        if g.dom != self.cod:
            raise ValueError("composing functions with mismatched (co)domains")
        return FinFunction(self.dom, g.cod, tuple(g.table[v] for v in self.table))

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def image(self) -> set:
        return set(self.table)

    def __str__(self):
        rows = ", ".join(f"{self.dom.label(i)} -> {self.cod.label(v)}"
                         for i, v in enumerate(self.table))
        return "{" + rows + "}"


def tabulate(dom: FinSet, cod: FinSet, fn, cap: int = DEFAULT_SIZE_CAP) -> FinFunction:
    check_cap(dom.size, cap, "function domain")
    return FinFunction(dom, cod, tuple(fn(i) for i in range(dom.size)))


def identity(x: FinSet) -> FinFunction:
    return FinFunction(x, x, tuple(range(x.size)))


def all_functions(dom: FinSet, cod: FinSet, cap: int = DEFAULT_SIZE_CAP):
    check_cap(cod.size ** dom.size, cap, "function space")
    for t in itertools.product(range(cod.size), repeat=dom.size):
        yield FinFunction(dom, cod, t)


def swap(a: FinSet, b: FinSet) -> FinFunction:
    """``a x b -> b x a``."""
    return FinFunction(product(a, b), product(b, a),
                       tuple(y * a.size + x for x in range(a.size) for y in range(b.size)))


def product_map(f: FinFunction, g: FinFunction) -> FinFunction:
    nb = g.cod.size
    return FinFunction(product(f.dom, g.dom), product(f.cod, g.cod),
                       tuple(f(x) * nb + g(y) for x in range(f.dom.size) for y in range(g.dom.size)))


# ------------------------------------------------------------- monoids


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class FinMonoid:
    carrier: FinSet
    unit: int
    mult: tuple  # mult[a][b]
    name: str = "M"
    parent_index: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.carrier.size
        if len(self.mult) != n or any(len(r) != n for r in self.mult):
            raise AlgebraError("multiplication table must be square")
        m = self.mult
        for a in range(n):
            if m[self.unit][a] != a or m[a][self.unit] != a:
                raise AlgebraError(f"unit law fails at {self.carrier.label(a)}")
        for a, b, c in itertools.product(range(n), repeat=3):
            if m[m[a][b]][c] != m[a][m[b][c]]:
                raise AlgebraError(
                    f"associativity fails at ({self.carrier.label(a)}, "
                    f"{self.carrier.label(b)}, {self.carrier.label(c)})")

    @property
    def size(self) -> int:
        return self.carrier.size

    def __call__(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def element(self, label: str) -> int:
        return self.carrier.index(label)

    def is_commutative(self) -> bool:
        n = self.size
        return all(self.mult[a][b] == self.mult[b][a] for a in range(n) for b in range(n))

    def submonoid(self, elements, name: str | None = None) -> "FinMonoid":
        elems = sorted(set(elements))
        if self.unit not in elems:
            raise AlgebraError("a submonoid must contain the unit")
        pos = {e: k for k, e in enumerate(elems)}
        try:
            table = tuple(tuple(pos[self.mult[a][b]] for b in elems) for a in elems)
        except KeyError:
            raise AlgebraError("subset is not closed under multiplication") from None
        labels = tuple(self.carrier.label(e) for e in elems)
        return FinMonoid(finset(labels, name or f"sub({self.name})"), pos[self.unit], table,
                         name or f"sub({self.name})", tuple(elems))


def monoid_from_table(labels, unit: str, rows, name: str = "M") -> FinMonoid:
    carrier = finset(labels, name)
    idx = {l: i for i, l in enumerate(carrier.labels)}
    table = tuple(tuple(idx[v] for v in row) for row in rows)
    return FinMonoid(carrier, idx[unit], table, name)


def cyclic(n: int) -> FinMonoid:
    labels = tuple("e" if k == 0 else f"g{k}" for k in range(n))
    return FinMonoid(finset(labels, f"Z{n}"), 0,
                     tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), f"Z{n}")


def dihedral(n: int = 4) -> FinMonoid:
    """Symmetries of the regular ``n``-gon; element ``(f, k)`` is ``s^f r^k``."""
    elems = [(f, k) for f in (0, 1) for k in range(n)]

    def lab(f, k):
        rot = "" if k == 0 else ("r" if k == 1 else f"r{k}")
        if f == 0:
            return rot or "e"
        return "s" + rot

    def mul(a, b):
        (f, j), (g, k) = a, b
        # r^j s = s r^-j
        return ((f + g) % 2, ((-j if g else j) + k) % n)

    idx = {e: i for i, e in enumerate(elems)}
    table = tuple(tuple(idx[mul(a, b)] for b in elems) for a in elems)
    name = f"D{n}"
    return FinMonoid(finset([lab(*e) for e in elems], name), 0, table, name)


def symmetric(n: int = 3) -> FinMonoid:
    perms = list(itertools.permutations(range(n)))
    idx = {p: i for i, p in enumerate(perms)}
    # (p q)(i) = p(q(i))
    table = tuple(tuple(idx[tuple(p[q[i]] for i in range(n))] for q in perms) for p in perms)
    name = f"S{n}"
    return FinMonoid(finset(["".join(map(str, p)) for p in perms], name),
                     idx[tuple(range(n))], table, name)


# ------------------------------------------------------------ semirings


@dataclass(frozen=True)
class FinSemiring:
    carrier: FinSet
    zero: int
    one: int
    add: tuple
    mul: tuple
    name: str = "R"
    parent_index: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        n = self.carrier.size
        a, m = self.add, self.mul
        lab = self.carrier.label
        for x in range(n):
            if a[self.zero][x] != x:
                raise AlgebraError(f"0 is not an additive unit at {lab(x)}")
            if m[self.one][x] != x or m[x][self.one] != x:
                raise AlgebraError(f"1 is not a multiplicative unit at {lab(x)}")
            if m[self.zero][x] != self.zero or m[x][self.zero] != self.zero:
                raise AlgebraError(f"0 does not annihilate {lab(x)}")
            for y in range(n):
                if a[x][y] != a[y][x]:
                    raise AlgebraError("addition is not commutative")
        for x, y, z in itertools.product(range(n), repeat=3):
            if a[a[x][y]][z] != a[x][a[y][z]]:
                raise AlgebraError("addition is not associative")
            if m[m[x][y]][z] != m[x][m[y][z]]:
                raise AlgebraError("multiplication is not associative")
            if m[x][a[y][z]] != a[m[x][y]][m[x][z]] or m[a[x][y]][z] != a[m[x][z]][m[y][z]]:
                raise AlgebraError(f"distributivity fails at ({lab(x)}, {lab(y)}, {lab(z)})")

    @property
    def size(self) -> int:
        return self.carrier.size

    def is_commutative(self) -> bool:
        n = self.size
        return all(self.mul[x][y] == self.mul[y][x] for x in range(n) for y in range(n))

    def subsemiring(self, elements, name: str | None = None) -> "FinSemiring":
        elems = sorted(set(elements))
        pos = {e: k for k, e in enumerate(elems)}
        try:
            add = tuple(tuple(pos[self.add[x][y]] for y in elems) for x in elems)
            mul = tuple(tuple(pos[self.mul[x][y]] for y in elems) for x in elems)
            zero, one = pos[self.zero], pos[self.one]
        except KeyError:
            raise AlgebraError("subset is not a subsemiring") from None
        nm = name or f"sub({self.name})"
        return FinSemiring(finset([self.carrier.label(e) for e in elems], nm),
                           zero, one, add, mul, nm, tuple(elems))


def booleans() -> FinSemiring:
    return FinSemiring(finset(["0", "1"], "B"), 0, 1,
                       ((0, 1), (1, 1)), ((0, 0), (0, 1)), "B")


def integers_mod(n: int) -> FinSemiring:
    r = range(n)
    return FinSemiring(finset([str(k) for k in r], f"Z/{n}"), 0, 1 % n,
                       tuple(tuple((x + y) % n for y in r) for x in r),
                       tuple(tuple((x * y) % n for y in r) for x in r), f"Z/{n}")


def bool_matrices(k: int = 2) -> FinSemiring:
    """``k x k`` matrices over the Boolean semiring (or, and)."""
    cells = k * k
    mats = list(itertools.product((0, 1), repeat=cells))
    idx = {m: i for i, m in enumerate(mats)}

    def madd(a, b):
        return tuple(x | y for x, y in zip(a, b))

    def mmul(a, b):
        return tuple(
            int(any(a[i * k + l] and b[l * k + j] for l in range(k)))
            for i in range(k) for j in range(k))

    zero = tuple([0] * cells)
    one = tuple(int(i == j) for i in range(k) for j in range(k))
    labels = ["".join(map(str, m)) for m in mats]
    name = f"Mat{k}(B)"
    return FinSemiring(finset(labels, name), idx[zero], idx[one],
                       tuple(tuple(idx[madd(a, b)] for b in mats) for a in mats),
                       tuple(tuple(idx[mmul(a, b)] for b in mats) for a in mats), name)
