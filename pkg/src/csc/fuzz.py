"""Random well-typed terms and random derivable rewrites of them."""

from __future__ import annotations

import random

from .equiv import _bridge_moves, _bridges, _central, _typed_subterms, swap_adjacent
from .finite import SizeBlowup
from .syntax import (
    UNIT, App, Arrow, Const, Context, Do, Free, Iota, Lam, MonS, MonT, Pair, Proj, Prod,
    Ret, STAR, Term, Type, Unit, Var, mon, occurs, replace_at, shift,
)
from .theory import Theory, expose, type_equal


def base_types(th: Theory, model=None, max_size: int = 64) -> list[Type]:
    """Small types to build terms at; with a model, only types whose
    interpretation has at most ``max_size`` elements."""
    cands = [UNIT, MonT(UNIT), MonS(UNIT), Prod(UNIT, MonT(UNIT)), Arrow(UNIT, MonT(UNIT)),
             Arrow(MonS(UNIT), MonT(UNIT)), MonT(Prod(UNIT, UNIT)), MonS(MonS(UNIT))]
    for _, ty in th.constants:
        if ty not in cands:
            cands.append(ty)
    if model is None:
        return cands
    return [ty for ty in cands if _small(model, th, ty, max_size)]


def _as_t(ty: Type) -> Type:
    match ty:
        case MonS(a) | MonT(a):
            return MonT(_as_t(a))
        case Arrow(a, b):
            return Arrow(_as_t(a), _as_t(b))
        case Prod(a, b):
            return Prod(_as_t(a), _as_t(b))
    return ty


def _small(model, th: Theory, ty: Type, max_size: int) -> bool:
    """Whether ``ty`` has at most ``max_size`` elements in ``model``.

    Carriers of ``S`` can be costly to compute (a centre, say), so the type
    with every ``S`` read as ``T`` is sized first: ``S X`` is no larger than
    ``T X``.
    """
    from .semantics import UninterpretedGround, interpret_type

    try:
        if _as_t(ty) != ty and interpret_type(model, th, _as_t(ty)).size > max_size:
            return False
        return interpret_type(model, th, ty).size <= max_size
    except (SizeBlowup, UninterpretedGround):
        return False


class Uninhabited(ValueError):
    """No closed-enough term of the requested type could be built."""


class TermGenerator:
    def __init__(self, th: Theory, rng: random.Random, types: list[Type], max_depth: int = 4,
                 model=None, max_size: int = 64):
        self.th, self.rng, self.types = th, rng, types
        self.max_depth = max_depth
        self.model, self.max_size = model, max_size
        self._fits: dict = {}
        # argument types for eliminations and do heads: no arrows, to keep
        # interpretations small
        self.small = [t for t in types if not isinstance(t, Arrow)] or [UNIT]

    def fits(self, ty: Type) -> bool:
        """Whether intermediate terms of type ``ty`` stay cheap to interpret."""
        if ty not in self._fits:
            if self.model is None:
                self._fits[ty] = _depth(ty) <= 3
            else:
                self._fits[ty] = _small(self.model, self.th, ty, self.max_size)
        return self._fits[ty]

    def _atoms(self, ty: Type, ctx: Context, scope: tuple) -> list[Term]:
        out: list[Term] = []
        for k, t in enumerate(reversed(scope)):
            if type_equal(self.th, t, ty):
                out.append(Var(k))
        for name, t in ctx:
            if type_equal(self.th, t, ty):
                out.append(Free(name))
        for name, t in self.th.constants:
            if type_equal(self.th, t, ty):
                out.append(Const(name))
        return out

    def term(self, ty: Type, ctx: Context, scope: tuple = (), depth: int | None = None) -> Term:
        depth = self.max_depth if depth is None else depth
        rng = self.rng
        atoms = self._atoms(ty, ctx, scope)
        if atoms and (depth <= 0 or rng.random() < 0.3):
            return rng.choice(atoms)
        th = self.th
        options = []
        if expose(th, ty, Unit) is not None or isinstance(ty, Unit):
            options.append(lambda: STAR)
        prod = expose(th, ty, Prod)
        if prod is not None:
            options.append(lambda: Pair(self.term(prod.left, ctx, scope, depth - 1),
                                        self.term(prod.right, ctx, scope, depth - 1)))
        arrow = expose(th, ty, Arrow)
        if arrow is not None:
            options.append(lambda: Lam(arrow.dom, self.term(arrow.cod, ctx, scope + (arrow.dom,),
                                                            depth - 1), f"v{len(scope)}"))
        for kind, fl in ((MonT, "T"), (MonS, "S")):
            m = expose(th, ty, kind)
            if m is None:
                continue
            options.append(lambda fl=fl, m=m: Ret(fl, self.term(m.inner, ctx, scope, depth - 1)))
            if depth > 0:
                def do(fl=fl, m=m):
                    b = rng.choice(self.small)
                    if not self.fits(mon(fl, b)):
                        b = UNIT
                    head = self.term(mon(fl, b), ctx, scope, depth - 1)
                    return Do(fl, head, self.term(ty, ctx, scope + (b,), depth - 1),
                              f"v{len(scope)}")
                options += [do, do]
            if fl == "T" and depth > 0:
                options.append(lambda m=m: Iota(self.term(MonS(m.inner), ctx, scope, depth - 1)))
        if depth > 0:
            def app():
                b = rng.choice(self.small)
                if not self.fits(Arrow(b, ty)):
                    return self.term(ty, ctx, scope, depth - 1)
                return App(self.term(Arrow(b, ty), ctx, scope, depth - 1),
                           self.term(b, ctx, scope, depth - 1))

            def proj():
                b = rng.choice(self.small)
                if not self.fits(Prod(ty, b)):
                    return self.term(ty, ctx, scope, depth - 1)
                if rng.random() < 0.5:
                    return Proj(1, self.term(Prod(ty, b), ctx, scope, depth - 1))
                return Proj(2, self.term(Prod(b, ty), ctx, scope, depth - 1))
            options += [app, proj]
        rng.shuffle(options)
        for build in options:
            try:
                return build()
            except Uninhabited:
                continue
        if atoms:
            return rng.choice(atoms)
        raise Uninhabited(f"cannot build a term of type {ty}")


def _depth(ty: Type) -> int:
    kids = [getattr(ty, f) for f in ("dom", "cod", "left", "right", "inner") if hasattr(ty, f)]
    return 1 + max((_depth(k) for k in kids), default=0)


def random_context(gen: TermGenerator, max_vars: int = 2) -> Context:
    ctx = Context()
    for k in range(gen.rng.randint(0, max_vars)):
        ctx = ctx.extend(f"x{k}", gen.rng.choice(gen.small))
    return ctx


def perturbations(th: Theory, ctx: Context, t: Term, gen: TermGenerator) -> list:
    """Candidate derivable rewrites of ``t`` as ``(rule, path, replacement)``."""
    out = []
    for path, s, ty, scope in _typed_subterms(th, ctx, t):
        small = lambda tt: gen.term(tt, ctx, scope, 1)
        b = gen.rng.choice(gen.small)
        if gen.fits(Arrow(ty, ty)):
            out.append(("lambda.beta ^-1", path, App(Lam(ty, Var(0), "y"), s)))
        if gen.fits(Arrow(b, ty)):
            out.append(("lambda.beta ^-1", path, App(Lam(b, shift(s, 1), "_"), small(b))))
        if gen.fits(Prod(ty, b)):
            out.append(("pair.beta ^-1", path, Proj(1, Pair(s, small(b)))))
            out.append(("pair.beta ^-1", path, Proj(2, Pair(small(b), s))))
        if isinstance(ty, Unit) or expose(th, ty, Unit) is not None:
            out.append(("unit.eta ^-1", path, small(ty)))
        for kind, fl in ((MonT, "T"), (MonS, "S")):
            m = expose(th, ty, kind)
            if m is None:
                continue
            if not gen.fits(ty):
                continue
            out.append((f"{fl}.eta ^-1", path, Do(fl, s, Ret(fl, Var(0)), "y")))
            out.append((f"{fl}.beta ^-1", path, Do(fl, Ret(fl, small(b)), shift(s, 1), "_")))
        match s:
            case Ret("T", v):
                out.append(("iota.ret ^-1", path, Iota(Ret("S", v))))
            case Do("T", Iota(m), Iota(n), h):
                out.append(("iota.comp", path, Iota(Do("S", m, n, h))))
            case Iota(Do("S", m, n, h)):
                out.append(("iota.comp ^-1", path, Do("T", Iota(m), Iota(n), h)))
        if isinstance(s, Do) and isinstance(s.body, Do) and s.body.flavour == s.flavour:
            inner = s.body
            if not occurs(inner.body, 1):
                out.append((f"{s.flavour}.assoc ^-1", path,
                            Do(s.flavour, Do(s.flavour, s.head, inner.head, s.hint),
                               shift(inner.body, -1, 1), inner.hint)))
            if (_central(s.flavour, s.head) or _central(s.flavour, inner.head)) and not occurs(inner.head, 0):
                out.append(("S.central", path, swap_adjacent(s)))
    if th.term_axioms:
        out.extend(_bridge_moves(th, ctx, t, _bridges(th)))
    return out


def derivable_pair(th: Theory, rng: random.Random, model=None, steps: tuple = (1, 4),
                   max_depth: int = 3):
    """A random ``(ctx, term, rewritten term, type)`` where the two terms are
    provably equal."""
    gen = TermGenerator(th, rng, base_types(th, model), max_depth, model)
    ctx = random_context(gen)
    while True:
        ty = rng.choice(gen.types)
        try:
            t = gen.term(ty, ctx)
        except Uninhabited:
            continue
        u = t
        for _ in range(rng.randint(*steps)):
            cands = perturbations(th, ctx, u, gen)
            if not cands:
                break
            rule, path, new = rng.choice(cands)
            u = replace_at(u, path, new)
        if u != t:
            return ctx, t, u, ty
