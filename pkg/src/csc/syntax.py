"""Types and terms of the central submonad calculus.

Terms are nameless: bound variables are de Bruijn indices (``Var``), free
variables keep their names (``Free``) and are resolved against a context by
name.  Binder names survive only as ``hint`` metadata, which is ignored by
equality, so structural equality *is* alpha-equivalence.

Concrete syntax::

    types   1 | G | A -> B | A * B | S A | T A
    terms   x | * | \\x:A. M | M N | <M, N> | fst M | snd M
            | ret_S M | ret_T M | iota M
            | do_S x <- M; N | do_T x <- M; N

``->`` is right associative, ``*`` binds tighter than ``->`` and ``S``/``T``
bind tightest.  ``_`` or ``*`` may be used as an unused do/lambda binder.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class Unit:
    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True)
class Ground:
    name: str

    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True)
class Prod:
    left: "Type"
    right: "Type"

    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True)
class MonT:
    inner: "Type"

    def __str__(self):
        return pretty_type(self)


@dataclass(frozen=True)
class MonS:
    inner: "Type"

    def __str__(self):
        return pretty_type(self)


Type = Union[Unit, Ground, Arrow, Prod, MonT, MonS]

UNIT = Unit()


def mon(flavour: str, inner: Type) -> Type:
    if flavour == "T":
        return MonT(inner)
    if flavour == "S":
        return MonS(inner)
    raise ValueError(f"unknown monad flavour {flavour!r}")


def flavour_of(ty: Type) -> str | None:
    if isinstance(ty, MonT):
        return "T"
    if isinstance(ty, MonS):
        return "S"
    return None


def type_children(ty: Type) -> tuple:
    match ty:
        case Arrow(a, b) | Prod(a, b):
            return (a, b)
        case MonT(a) | MonS(a):
            return (a,)
    return ()


def ground_names(ty: Type) -> set[str]:
    if isinstance(ty, Ground):
        return {ty.name}
    out: set[str] = set()
    for c in type_children(ty):
        out |= ground_names(c)
    return out


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    """Bound variable as a de Bruijn index (0 = innermost binder)."""

    index: int
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Free:
    name: str


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class Lam:
    annot: Type
    body: "Term"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"


@dataclass(frozen=True)
class Proj:
    i: int
    arg: "Term"


@dataclass(frozen=True)
class Ret:
    flavour: str
    arg: "Term"


@dataclass(frozen=True)
class Iota:
    arg: "Term"


@dataclass(frozen=True)
class Do:
    flavour: str
    head: "Term"
    body: "Term"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Const:
    name: str


Term = Union[Var, Free, Star, Lam, App, Pair, Proj, Ret, Iota, Do, Const]

STAR = Star()


@dataclass(frozen=True)
class Context:
    """Ordered list of named hypotheses; lookup is by name only."""

    entries: tuple[tuple[str, Type], ...] = ()

    def __post_init__(self):
        names = [n for n, _ in self.entries]
        if len(set(names)) != len(names):
            raise ValueError(f"repeated name in context: {names}")

    def lookup(self, name: str) -> Type | None:
        for n, t in self.entries:
            if n == name:
                return t
        return None

    def extend(self, name: str, ty: Type) -> "Context":
        return Context(self.entries + ((name, ty),))

    def names(self) -> list[str]:
        return [n for n, _ in self.entries]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __str__(self):
        return ", ".join(f"{n}:{pretty_type(t)}" for n, t in self.entries)


EMPTY = Context()


# ------------------------------------------------------- term structure


def children(t: Term) -> list[tuple[Term, int]]:
    """Immediate subterms paired with the number of binders crossed."""
    match t:
        case Lam(_, body):
            return [(body, 1)]
        case App(f, a):
            return [(f, 0), (a, 0)]
        case Pair(a, b):
            return [(a, 0), (b, 0)]
        case Proj(_, a) | Ret(_, a) | Iota(a):
            return [(a, 0)]
        case Do(_, h, b):
            return [(h, 0), (b, 1)]
    return []


def rebuild(t: Term, kids: list[Term]) -> Term:
    match t:
        case Lam(a, _, hint):
            return Lam(a, kids[0], hint)
        case App():
            return App(kids[0], kids[1])
        case Pair():
            return Pair(kids[0], kids[1])
        case Proj(i, _):
            return Proj(i, kids[0])
        case Ret(x, _):
            return Ret(x, kids[0])
        case Iota():
            return Iota(kids[0])
        case Do(x, _, _, hint):
            return Do(x, kids[0], kids[1], hint)
    return t


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c, _ in children(t))


def subterms(t: Term, path: tuple = (), depth: int = 0) -> Iterator[tuple[tuple, Term, int]]:
    """Yield (path, subterm, binder depth) in pre-order."""
    yield path, t, depth
    for k, (c, d) in enumerate(children(t)):
        yield from subterms(c, path + (k,), depth + d)


def get_at(t: Term, path: tuple) -> Term:
    for k in path:
        t = children(t)[k][0]
    return t


def replace_at(t: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    kids = [c for c, _ in children(t)]
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return rebuild(t, kids)


def free_names(t: Term) -> set[str]:
    if isinstance(t, Free):
        return {t.name}
    out: set[str] = set()
    for c, _ in children(t):
        out |= free_names(c)
    return out


def const_names(t: Term) -> set[str]:
    if isinstance(t, Const):
        return {t.name}
    out: set[str] = set()
    for c, _ in children(t):
        out |= const_names(c)
    return out


def loose_indices(t: Term, depth: int = 0) -> set[int]:
    """De Bruijn indices that escape ``t`` (relative to its root)."""
    if isinstance(t, Var):
        return {t.index - depth} if t.index >= depth else set()
    out: set[int] = set()
    for c, d in children(t):
        out |= loose_indices(c, depth + d)
    return out


def occurs(t: Term, index: int) -> bool:
    return index in loose_indices(t)


# --------------------------------------------------------- substitution


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    if d == 0:
        return t
    match t:
        case Var(i, hint):
            if i >= cutoff:
                if i + d < 0:
                    raise ValueError("negative de Bruijn index after shift")
                return Var(i + d, hint)
            return t
        case Free() | Star() | Const():
            return t
    return rebuild(t, [shift(c, d, cutoff + b) for c, b in children(t)])


def subst(t: Term, j: int, s: Term) -> Term:
    """Replace index ``j`` by ``s`` (indices of ``s`` relative to ``t``'s root)."""
    match t:
        case Var(i):
            return s if i == j else t
        case Free() | Star() | Const():
            return t
    return rebuild(t, [subst(c, j + b, shift(s, b)) for c, b in children(t)])


def substitute(body: Term, replacement: Term) -> Term:
    """``body[replacement/0]`` for a body sitting under one binder."""
    return shift(subst(body, 0, shift(replacement, 1)), -1)


def subst_free(t: Term, name: str, s: Term) -> Term:
    """Replace the named free variable ``name`` by ``s`` avoiding capture."""
    match t:
        case Free(n):
            return s if n == name else t
        case Var() | Star() | Const():
            return t
    return rebuild(t, [subst_free(c, name, shift(s, b)) for c, b in children(t)])


def close_over(t: Term, name: str) -> Term:
    """Abstract the free name into index 0, for use as a binder body."""

    def go(u: Term, depth: int) -> Term:
        match u:
            case Free(n) if n == name:
                return Var(depth, name)
            case Var(i, hint):
                return Var(i + 1, hint) if i >= depth else u
            case Free() | Star() | Const():
                return u
        return rebuild(u, [go(c, depth + b) for c, b in children(u)])

    return go(t, 0)


def alpha_eq(a: Term, b: Term) -> bool:
    return a == b


# --------------------------------------------------------- pretty print


def pretty_type(ty: Type, prec: int = 0) -> str:
    match ty:
        case Unit():
            return "1"
        case Ground(n):
            return n
        case MonT(a) | MonS(a):
            s = f"{flavour_of(ty)} {pretty_type(a, 3)}"
            return f"({s})" if prec > 2 else s
        case Prod(a, b):
            s = f"{pretty_type(a, 1)} * {pretty_type(b, 2)}"
            return f"({s})" if prec > 1 else s
        case Arrow(a, b):
            s = f"{pretty_type(a, 1)} -> {pretty_type(b, 0)}"
            return f"({s})" if prec > 0 else s
    raise TypeError(f"not a type: {ty!r}")


def _fresh(hint: str, taken: set[str]) -> str:
    base = hint if hint and hint not in ("_", "*") else "x"
    if base in RESERVED:
        base = base + "'"
    name = base
    k = 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


def pretty(t: Term, names: list[str] | None = None) -> str:
    """Render a term; bound names are chosen to avoid capture."""
    names = list(names or [])
    taken = free_names(t) | const_names(t)
    return _pp(t, names, taken, 0)


def _binder(body: Term, hint: str, names: list[str], taken: set[str]) -> str:
    if not occurs(body, 0) and hint in ("_", "*"):
        return "_"
    return _fresh(hint, taken | set(names))


def _pp(t: Term, names: list[str], taken: set[str], prec: int) -> str:
    # prec: 0 = open (lam/do allowed), 1 = application head, 2 = atom
    match t:
        case Var(i):
            if i < len(names):
                return names[len(names) - 1 - i]
            return f"#{i - len(names)}"
        case Free(n) | Const(n):
            return n
        case Star():
            return "*"
        case Pair(a, b):
            return f"<{_pp(a, names, taken, 0)}, {_pp(b, names, taken, 0)}>"
        case Lam(ty, body, hint):
            x = _binder(body, hint, names, taken)
            s = f"\\{x}:{pretty_type(ty)}. {_pp(body, names + [x], taken, 0)}"
            return f"({s})" if prec > 0 else s
        case Do(fl, head, body, hint):
            x = _binder(body, hint, names, taken)
            s = (f"do_{fl} {x} <- {_pp(head, names, taken, 1)}; "
                 f"{_pp(body, names + [x], taken, 0)}")
            return f"({s})" if prec > 0 else s
        case App(f, a):
            s = f"{_pp(f, names, taken, 1)} {_pp(a, names, taken, 2)}"
            return f"({s})" if prec > 1 else s
        case Proj(i, a):
            s = f"{'fst' if i == 1 else 'snd'} {_pp(a, names, taken, 2)}"
            return f"({s})" if prec > 1 else s
        case Ret(fl, a):
            s = f"ret_{fl} {_pp(a, names, taken, 2)}"
            return f"({s})" if prec > 1 else s
        case Iota(a):
            s = f"iota {_pp(a, names, taken, 2)}"
            return f"({s})" if prec > 1 else s
    raise TypeError(f"not a term: {t!r}")


# -------------------------------------------------------------- parsing


RESERVED = {"fst", "snd", "ret_S", "ret_T", "iota", "do_S", "do_T", "S", "T"}


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{extra}")


@dataclass(frozen=True)
class Token:
    kind: str  # ident, num, sym, eof
    text: str
    line: int
    col: int


_SYMBOLS = ["<-", "->", "|-", "\\", "λ", "ι", "×", "→", ".", ":", "(", ")",
            "<", ">", ",", ";", "*", "[", "]", "="]


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        if ch.isalpha() and ch not in "λι" or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] in "_'") and src[j] not in "λι×→":
                j += 1
            toks.append(Token("ident", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("num", src[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if src.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, src: str, constants=frozenset()):
        self.toks = tokenize(src)
        self.pos = 0
        self.constants = frozenset(constants)

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, message: str, expected=()):
        t = self.tok
        raise ParseError(message, t.line, t.col, expected)

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "ident", "num") and t.text in texts

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"unexpected {self.tok.text or 'end of input'!r}", [text])
        t = self.tok
        self.pos += 1
        return t

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in RESERVED:
            self.error(f"expected identifier, got {t.text or 'end of input'!r}", ["identifier"])
        self.pos += 1
        return t.text

    def done(self):
        if self.tok.kind != "eof":
            self.error(f"trailing input {self.tok.text!r}", ["end of input"])

    # types ----------------------------------------------------------

    def type_(self) -> Type:
        left = self.prod_type()
        if self.at("->", "→"):
            self.pos += 1
            return Arrow(left, self.type_())
        return left

    def prod_type(self) -> Type:
        t = self.mon_type()
        while self.at("*", "×"):
            self.pos += 1
            t = Prod(t, self.mon_type())
        return t

    def mon_type(self) -> Type:
        if self.at("S", "T"):
            fl = self.tok.text
            self.pos += 1
            return mon(fl, self.mon_type())
        return self.atom_type()

    def atom_type(self) -> Type:
        t = self.tok
        if t.kind == "num" and t.text == "1":
            self.pos += 1
            return UNIT
        if self.at("("):
            self.pos += 1
            ty = self.type_()
            self.expect(")")
            return ty
        if t.kind == "ident" and t.text not in RESERVED:
            self.pos += 1
            return Ground(t.text)
        self.error(f"unexpected {t.text or 'end of input'!r} in type",
                   ["1", "(", "S", "T", "ground type"])

    # terms ----------------------------------------------------------

    def term(self, scope: list[str]) -> Term:
        if self.at("\\", "λ"):
            self.pos += 1
            x = self.binder()
            self.expect(":")
            ty = self.type_()
            self.expect(".")
            return Lam(ty, self.term(scope + [x]), x)
        if self.at("do_S", "do_T"):
            fl = self.tok.text[-1]
            self.pos += 1
            x = self.binder()
            self.expect("<-")
            head = self.term(scope)
            self.expect(";")
            return Do(fl, head, self.term(scope + [x]), x)
        return self.application(scope)

    def binder(self) -> str:
        if self.at("_", "*"):
            self.pos += 1
            return "_"
        return self.ident()

    _ATOM_START = ("(", "<", "*", "fst", "snd", "ret_S", "ret_T", "iota", "ι")

    def starts_unary(self) -> bool:
        t = self.tok
        if t.kind == "ident" and t.text not in ("do_S", "do_T", "S", "T"):
            return True
        return t.kind == "sym" and t.text in self._ATOM_START

    def application(self, scope: list[str]) -> Term:
        t = self.unary(scope)
        while self.starts_unary():
            t = App(t, self.unary(scope))
        return t

    def unary(self, scope: list[str]) -> Term:
        if self.at("fst", "snd"):
            i = 1 if self.tok.text == "fst" else 2
            self.pos += 1
            return Proj(i, self.unary(scope))
        if self.at("ret_S", "ret_T"):
            fl = self.tok.text[-1]
            self.pos += 1
            return Ret(fl, self.unary(scope))
        if self.at("iota", "ι"):
            self.pos += 1
            return Iota(self.unary(scope))
        return self.atom(scope)

    def atom(self, scope: list[str]) -> Term:
        t = self.tok
        if self.at("*"):
            self.pos += 1
            return STAR
        if self.at("("):
            self.pos += 1
            m = self.term(scope)
            self.expect(")")
            return m
        if self.at("<"):
            self.pos += 1
            a = self.term(scope)
            self.expect(",")
            b = self.term(scope)
            self.expect(">")
            return Pair(a, b)
        if t.kind == "ident" and t.text not in RESERVED and t.text != "_":
            self.pos += 1
            name = t.text
            for k in range(len(scope) - 1, -1, -1):
                if scope[k] == name:
                    return Var(len(scope) - 1 - k, name)
            if name in self.constants:
                return Const(name)
            return Free(name)
        self.error(f"unexpected {t.text or 'end of input'!r} in term",
                   ["identifier", "*", "(", "<", "\\", "do_S", "do_T",
                    "fst", "snd", "ret_S", "ret_T", "iota"])

    def context(self) -> Context:
        entries = []
        if self.at("]"):
            return Context()
        while True:
            x = self.ident()
            self.expect(":")
            entries.append((x, self.type_()))
            if not self.at(","):
                break
            self.pos += 1
        return Context(tuple(entries))


def parse_type(src: str) -> Type:
    p = Parser(src)
    ty = p.type_()
    p.done()
    return ty


def parse_term(src: str, constants=frozenset()) -> Term:
    """Parse a term; unbound identifiers in ``constants`` become ``Const``."""
    p = Parser(src, constants)
    t = p.term([])
    p.done()
    return t


def parse_context(src: str) -> Context:
    """Parse ``x:A, y:B`` (optionally bracketed)."""
    p = Parser(src)
    bracket = p.at("[")
    if bracket:
        p.pos += 1
    ctx = p.context()
    if bracket:
        p.expect("]")
    p.done()
    return ctx
