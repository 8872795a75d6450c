"""Theories: ground types, constants, type equations and term equations.

Type equality is decided by congruence closure.  The closure is computed once
per theory over the subterms of the type axioms; any other type is placed in
a class by its constructor signature over the classes of its children, which
is complete because type constructors are free apart from the axioms.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from pathlib import Path

from .syntax import (
    UNIT, Arrow, Const, Context, Free, Ground, Lam, MonS, MonT, Prod, Term, Type, Unit,
    children, const_names, ground_names, mon, parse_context, parse_term,
    parse_type, pretty, pretty_type, rebuild, subst_free, type_children,
)


class TheoryError(Exception):
    pass


class UnknownGroundType(TheoryError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown ground type {name!r}")


@dataclass(frozen=True)
class Axiom:
    ctx: Context
    lhs: Term
    rhs: Term
    type: Type
    name: str = ""

    def __str__(self):
        return f"[{self.ctx}] |- {pretty(self.lhs)} = {pretty(self.rhs)} : {pretty_type(self.type)}"


@dataclass(frozen=True)
class Theory:
    ground_types: frozenset = frozenset()
    constants: tuple = ()  # ((name, Type), ...)
    type_axioms: tuple = ()  # ((Type, Type), ...)
    term_axioms: tuple = ()  # (Axiom, ...)
    name: str = "theory"

    @functools.cached_property
    def const_types(self) -> dict[str, Type]:
        return dict(self.constants)

    @functools.cached_property
    def classes(self) -> "_TypeClasses":
        return _TypeClasses(self.type_axioms)

    def const_type(self, name: str) -> Type | None:
        return self.const_types.get(name)

    def with_axioms(self, *axioms: Axiom) -> "Theory":
        return Theory(self.ground_types, self.constants, self.type_axioms,
                      self.term_axioms + tuple(axioms), self.name)

    def __hash__(self):
        return id(self)

    def __eq__(self, other):
        return self is other


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    subject: object = field(default=None, compare=False)

    def __str__(self):
        return f"{self.kind}: {self.message}"


# ------------------------------------------------------- type equality


def _ctor(ty: Type):
    match ty:
        case Ground(n):
            return ("G", n)
    return (type(ty).__name__,)


class _TypeClasses:
    def __init__(self, axioms):
        nodes: dict[Type, int] = {}

        def add(ty: Type):
            if ty in nodes:
                return
            for c in type_children(ty):
                add(c)
            nodes[ty] = len(nodes)

        for a, b in axioms:
            add(a)
            add(b)
        parent = list(range(len(nodes)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i, j):
            i, j = find(i), find(j)
            if i != j:
                parent[max(i, j)] = min(i, j)
                return True
            return False

        for a, b in axioms:
            union(nodes[a], nodes[b])
        changed = True
        while changed:
            changed = False
            table: dict = {}
            for ty, i in nodes.items():
                sig = (_ctor(ty), tuple(find(nodes[c]) for c in type_children(ty)))
                if sig in table:
                    changed |= union(table[sig], i)
                else:
                    table[sig] = i
        self.nodes = nodes
        self.find = find
        self.signatures = {
            (_ctor(ty), tuple(find(nodes[c]) for c in type_children(ty))): find(i)
            for ty, i in nodes.items()
        }
        members: dict[int, list[Type]] = {}
        for ty, i in nodes.items():
            members.setdefault(find(i), []).append(ty)
        self.members = members

    def cid(self, ty: Type):
        if ty in self.nodes:
            return self.find(self.nodes[ty])
        sig = (_ctor(ty), tuple(self.cid(c) for c in type_children(ty)))
        return self.signatures.get(sig, sig)

    def class_members(self, ty: Type) -> list[Type]:
        c = self.cid(ty)
        out = [ty]
        if isinstance(c, int):
            out += [m for m in self.members.get(c, []) if m != ty]
        return out


def check_grounds(th: Theory, ty: Type) -> None:
    for g in ground_names(ty):
        if g not in th.ground_types:
            raise UnknownGroundType(g)


def type_equal(th: Theory, a: Type, b: Type) -> bool:
    check_grounds(th, a)
    check_grounds(th, b)
    if a == b:
        return True
    if not th.type_axioms:
        return False
    return th.classes.cid(a) == th.classes.cid(b)


def expose(th: Theory, ty: Type, kind) -> Type | None:
    """Return a member of ty's equality class that is an instance of ``kind``."""
    if isinstance(ty, kind):
        return ty
    if not th.type_axioms:
        return None
    found = [m for m in th.classes.class_members(ty) if isinstance(m, kind)]
    if not found:
        return None
    return min(found, key=pretty_type)


def is_unit(th: Theory, ty: Type) -> bool:
    return isinstance(ty, Unit) or (bool(th.type_axioms) and type_equal(th, ty, UNIT))


# ---------------------------------------------------------- validation


def validate_theory(th: Theory) -> list[Diagnostic]:
    from .typecheck import TypeCheckError, check

    out: list[Diagnostic] = []

    def grounds(ty: Type, where: str):
        for g in sorted(ground_names(ty) - th.ground_types):
            out.append(Diagnostic("UnknownGroundType", f"{g!r} in {where}", g))

    for name, ty in th.constants:
        grounds(ty, f"constant {name}")
    for a, b in th.type_axioms:
        grounds(a, "type axiom")
        grounds(b, "type axiom")
    if out:
        return out
    for k, ax in enumerate(th.term_axioms):
        label = ax.name or f"axiom #{k}"
        bad = False
        for _, ty in ax.ctx:
            if ground_names(ty) - th.ground_types:
                bad = True
        grounds(ax.type, label)
        if bad or ground_names(ax.type) - th.ground_types:
            out.append(Diagnostic("UnknownGroundType", f"in context of {label}", ax))
            continue
        for side, term in (("left", ax.lhs), ("right", ax.rhs)):
            try:
                ok = check(th, ax.ctx, term, ax.type)
            except TypeCheckError as e:
                out.append(Diagnostic("IllTypedAxiom", f"{label}, {side} side: {e}", ax))
                continue
            if not ok:
                out.append(Diagnostic("IllTypedAxiom",
                                      f"{label}, {side} side does not have type "
                                      f"{pretty_type(ax.type)}", ax))
    return out


# ---------------------------------------------------------- file format


def parse_theory(text: str, name: str = "theory") -> Theory:
    """Read the line-oriented ``.csct`` format."""
    grounds: list[str] = []
    consts: list[tuple[str, Type]] = []
    type_axioms: list[tuple[Type, Type]] = []
    raw_axioms: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "name":
                name = rest
            elif word == "ground":
                grounds.append(rest)
            elif word == "type-eq":
                lhs, eq, rhs = rest.partition("=")
                if not eq:
                    raise TheoryError("type-eq needs '='")
                type_axioms.append((parse_type(lhs), parse_type(rhs)))
            elif word == "const":
                c, colon, ty = rest.partition(":")
                if not colon:
                    raise TheoryError("const needs ':'")
                consts.append((c.strip(), parse_type(ty)))
            elif word == "axiom":
                raw_axioms.append((lineno, rest))
            else:
                raise TheoryError(f"unknown directive {word!r}")
        except TheoryError as e:
            raise TheoryError(f"line {lineno}: {e}") from None
        except Exception as e:  # ParseError
            raise TheoryError(f"line {lineno}: {e}") from None
    cnames = frozenset(c for c, _ in consts)
    axioms = []
    for lineno, rest in raw_axioms:
        try:
            axioms.append(parse_axiom(rest, cnames, name=f"line {lineno}"))
        except Exception as e:
            raise TheoryError(f"line {lineno}: {e}") from None
    return Theory(frozenset(grounds), tuple(consts), tuple(type_axioms), tuple(axioms), name)


def parse_axiom(src: str, constants=frozenset(), name: str = "") -> Axiom:
    """``[x:A, y:B] |- M = N : C``; the context bracket may be omitted."""
    src = src.strip()
    ctx = Context()
    if src.startswith("["):
        close = src.index("]")
        ctx = parse_context(src[: close + 1])
        src = src[close + 1:].strip()
    if src.startswith("|-"):
        src = src[2:]
    body, colon, ty = src.rpartition(":")
    if not colon:
        raise TheoryError("axiom needs ': <type>'")
    lhs, eq, rhs = body.partition("=")
    if not eq:
        raise TheoryError("axiom needs '='")
    cn = frozenset(constants) - set(ctx.names())
    return Axiom(ctx, parse_term(lhs, cn), parse_term(rhs, cn), parse_type(ty), name)


def load_theory(path) -> Theory:
    path = Path(path)
    return parse_theory(path.read_text(encoding="utf-8"), name=path.stem)


def format_theory(th: Theory) -> str:
    lines = [f"name {th.name}"]
    lines += [f"ground {g}" for g in sorted(th.ground_types)]
    lines += [f"type-eq {pretty_type(a)} = {pretty_type(b)}" for a, b in th.type_axioms]
    lines += [f"const {c} : {pretty_type(t)}" for c, t in th.constants]
    for ax in th.term_axioms:
        lines.append(f"axiom [{ax.ctx}] |- {pretty(ax.lhs)} = {pretty(ax.rhs)} : {pretty_type(ax.type)}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------- translations


class IllTypedTranslation(TheoryError):
    pass


class IllTypedComponent(TheoryError):
    pass


@dataclass(frozen=True)
class Translation:
    source: Theory
    target: Theory
    ground_map: tuple = ()  # ((name, Type), ...)
    const_map: tuple = ()  # ((name, Term), ...)

    @functools.cached_property
    def grounds(self) -> dict:
        return dict(self.ground_map)

    @functools.cached_property
    def consts(self) -> dict:
        return dict(self.const_map)

    def type(self, ty: Type) -> Type:
        match ty:
            case Unit():
                return ty
            case Ground(n):
                if n in self.grounds:
                    return self.grounds[n]
                if n in self.target.ground_types:
                    return ty
                raise IllTypedTranslation(f"ground type {n!r} is not mapped")
            case Arrow(a, b):
                return Arrow(self.type(a), self.type(b))
            case Prod(a, b):
                return Prod(self.type(a), self.type(b))
            case MonT(a):
                return MonT(self.type(a))
            case MonS(a):
                return MonS(self.type(a))
        raise TypeError(ty)

    def term(self, t: Term) -> Term:
        match t:
            case Const(c):
                if c in self.consts:
                    return self.consts[c]
                if self.target.const_type(c) is not None:
                    return t
                raise IllTypedTranslation(f"constant {c!r} is not mapped")
            case Lam(a, body, hint):
                return Lam(self.type(a), self.term(body), hint)
        kids = [self.term(c) for c, _ in children(t)]
        return rebuild(t, kids) if kids else t

    def context(self, ctx: Context) -> Context:
        return Context(tuple((n, self.type(a)) for n, a in ctx))

    def compose(self, then: "Translation") -> "Translation":
        """``then . self`` (apply self first)."""
        gm = tuple((g, then.type(self.type(Ground(g)))) for g in sorted(self.source.ground_types))
        cm = tuple((c, then.term(self.term(Const(c)))) for c, _ in self.source.constants)
        return Translation(self.source, then.target, gm, cm)


def identity_translation(th: Theory) -> Translation:
    return Translation(th, th)


def validate_translation(v: Translation) -> list[Diagnostic]:
    from .typecheck import TypeCheckError, check

    out = []
    for c, ty in v.source.constants:
        try:
            vt = v.type(ty)
            term = v.term(Const(c))
            if not check(v.target, Context(), term, vt):
                out.append(Diagnostic("IllTypedTranslation",
                                      f"{c} does not translate to a term of type {pretty_type(vt)}", c))
        except (TypeCheckError, TheoryError) as e:
            out.append(Diagnostic("IllTypedTranslation", f"{c}: {e}", c))
    return out


@dataclass(frozen=True)
class CheckResult:
    status: str  # "Verified" | "FailedAt" | "Unknown"
    at: object = None
    detail: str = ""

    def __str__(self):
        if self.status == "FailedAt":
            return f"FailedAt({self.at}): {self.detail}"
        return self.status + (f": {self.detail}" if self.detail else "")


def check_translation(v: Translation, budget: int = 2000, oracle=None) -> CheckResult:
    """Check every source axiom is provable (or refuted by ``oracle``) in the target."""
    from .equiv import decide_equal

    diags = validate_translation(v)
    if diags:
        raise IllTypedTranslation("; ".join(map(str, diags)))
    for a, b in v.source.type_axioms:
        if not type_equal(v.target, v.type(a), v.type(b)):
            return CheckResult("FailedAt", (a, b), "translated type equation does not hold")
    unknown = []
    for k, ax in enumerate(v.source.term_axioms):
        ctx = v.context(ax.ctx)
        verdict = decide_equal(v.target, ctx, v.term(ax.lhs), v.term(ax.rhs),
                               budget=budget, oracle=oracle)
        if verdict.kind == "Distinct":
            return CheckResult("FailedAt", ax, str(verdict))
        if verdict.kind == "Unknown":
            unknown.append(ax.name or f"axiom #{k}")
    if unknown:
        return CheckResult("Unknown", None, f"unproved within budget: {', '.join(unknown)}")
    return CheckResult("Verified")


@dataclass(frozen=True)
class TranslationTransformation:
    source: Translation
    target: Translation
    components: tuple = ()  # ((Type, Term), ...) term over the free variable "x"
    var: str = "x"

    @functools.cached_property
    def table(self) -> dict:
        return dict(self.components)

    def component(self, ty: Type) -> Term:
        if ty in self.table:
            return self.table[ty]
        raise IllTypedComponent(f"no component at type {pretty_type(ty)}")


def check_transformation(alpha: TranslationTransformation, probes, budget: int = 2000,
                         oracle=None) -> CheckResult:
    """Naturality ``alpha_B[V(f)/x] = V'(f)[alpha_A/x]`` for each probe ``(x:A |- f : B)``."""
    from .equiv import decide_equal
    from .typecheck import TypeCheckError, check

    v, w = alpha.source, alpha.target
    th = v.target
    x = alpha.var
    for ty, comp in alpha.components:
        try:
            ok = check(th, Context(((x, v.type(ty)),)), comp, w.type(ty))
        except TypeCheckError as e:
            raise IllTypedComponent(f"component at {pretty_type(ty)}: {e}") from None
        if not ok:
            raise IllTypedComponent(f"component at {pretty_type(ty)} has the wrong type")
    unknown = []
    for probe in probes:
        ctx, f, b = probe
        (y, a), = ctx.entries
        fv = v.term(f)
        fw = w.term(f)
        lhs = subst_free(alpha.component(b), x, subst_free(fv, y, Free(x)))
        rhs = subst_free(subst_free(fw, y, Free("__alpha_arg")), "__alpha_arg",
                         alpha.component(a))
        tctx = Context(((x, v.type(a)),))
        verdict = decide_equal(th, tctx, lhs, rhs, budget=budget, oracle=oracle)
        if verdict.kind == "Distinct":
            return CheckResult("FailedAt", probe, str(verdict))
        if verdict.kind == "Unknown":
            unknown.append(pretty(f))
    if unknown:
        return CheckResult("Unknown", None, f"undecided probes: {', '.join(unknown)}")
    return CheckResult("Verified")


def parse_translation(text: str, base: Path | None = None, loader=load_theory) -> Translation:
    src = tgt = None
    grounds: list[tuple[str, str]] = []
    consts: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word in ("source", "target"):
            p = Path(rest)
            if base is not None and not p.is_absolute():
                p = base / p
            if word == "source":
                src = loader(p)
            else:
                tgt = loader(p)
        elif word in ("ground", "const"):
            lhs, arrow, rhs = rest.partition("=>")
            if not arrow:
                raise TheoryError(f"line {lineno}: expected '=>'")
            (grounds if word == "ground" else consts).append((lhs.strip(), rhs.strip()))
        else:
            raise TheoryError(f"line {lineno}: unknown directive {word!r}")
    if src is None or tgt is None:
        raise TheoryError("translation needs 'source' and 'target' lines")
    cn = frozenset(c for c, _ in tgt.constants)
    return Translation(
        src, tgt,
        tuple((g, parse_type(t)) for g, t in grounds),
        tuple((c, parse_term(t, cn)) for c, t in consts),
    )


def load_translation(path) -> Translation:
    path = Path(path)
    return parse_translation(path.read_text(encoding="utf-8"), base=path.parent)
