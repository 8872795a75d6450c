"""Formation rules with type conversion against a theory."""

from __future__ import annotations

from .syntax import (
    UNIT, App, Arrow, Const, Context, Do, Free, Iota, Lam, MonS, MonT, Pair,
    Proj, Prod, Ret, Star, Term, Type, Var, mon, pretty_type,
)
from .theory import Theory, check_grounds, expose, type_equal


class TypeCheckError(Exception):
    pass


class UnboundVariable(TypeCheckError):
    pass


class NotAFunction(TypeCheckError):
    pass


class NotAProduct(TypeCheckError):
    pass


class NotMonadic(TypeCheckError):
    def __init__(self, flavour: str, ty: Type):
        self.flavour = flavour
        super().__init__(f"expected a type of the form {flavour} A, got {pretty_type(ty)}")


class IotaExpectsS(TypeCheckError):
    pass


class ConstantUnknown(TypeCheckError):
    pass


class FlavourMismatch(TypeCheckError):
    pass


class ArgumentMismatch(TypeCheckError):
    pass


def _monadic(th: Theory, ty: Type, flavour: str) -> Type | None:
    kind = MonT if flavour == "T" else MonS
    found = expose(th, ty, kind)
    return None if found is None else found.inner


def infer(th: Theory, ctx: Context, m: Term, locals_: tuple = (), visit=None,
          path: tuple = ()) -> Type:
    """Infer the type of ``m``.

    ``locals_`` holds the types of enclosing binders (last = index 0).  If
    ``visit`` is given it is called as ``visit(path, term, type, locals_)``
    for every subterm, bottom-up.
    """
    ty = _infer(th, ctx, m, locals_, visit, path)
    if visit is not None:
        visit(path, m, ty, locals_)
    return ty


def _infer(th, ctx, m, locals_, visit, path) -> Type:
    match m:
        case Var(i, hint):
            if i >= len(locals_):
                raise UnboundVariable(f"dangling index {i} ({hint})")
            return locals_[-1 - i]
        case Free(name):
            ty = ctx.lookup(name)
            if ty is not None:
                return ty
            ty = th.const_type(name)
            if ty is not None:
                return ty
            raise UnboundVariable(f"unbound variable {name!r}")
        case Const(name):
            ty = ctx.lookup(name)
            if ty is None:
                ty = th.const_type(name)
            if ty is None:
                raise ConstantUnknown(f"unknown constant {name!r}")
            return ty
        case Star():
            return UNIT
        case Lam(a, body):
            check_grounds(th, a)
            b = infer(th, ctx, body, locals_ + (a,), visit, path + (0,))
            return Arrow(a, b)
        case App(f, x):
            ft = infer(th, ctx, f, locals_, visit, path + (0,))
            xt = infer(th, ctx, x, locals_, visit, path + (1,))
            arrow = expose(th, ft, Arrow)
            if arrow is None:
                raise NotAFunction(f"applying a term of type {pretty_type(ft)}")
            if not type_equal(th, arrow.dom, xt):
                raise ArgumentMismatch(
                    f"argument has type {pretty_type(xt)}, expected {pretty_type(arrow.dom)}")
            return arrow.cod
        case Pair(a, b):
            return Prod(infer(th, ctx, a, locals_, visit, path + (0,)),
                        infer(th, ctx, b, locals_, visit, path + (1,)))
        case Proj(i, a):
            at = infer(th, ctx, a, locals_, visit, path + (0,))
            prod = expose(th, at, Prod)
            if prod is None:
                raise NotAProduct(f"projecting from a term of type {pretty_type(at)}")
            return prod.left if i == 1 else prod.right
        case Ret(fl, a):
            return mon(fl, infer(th, ctx, a, locals_, visit, path + (0,)))
        case Iota(a):
            at = infer(th, ctx, a, locals_, visit, path + (0,))
            inner = _monadic(th, at, "S")
            if inner is None:
                raise IotaExpectsS(f"iota expects S A, got {pretty_type(at)}")
            return MonT(inner)
        case Do(fl, head, body):
            ht = infer(th, ctx, head, locals_, visit, path + (0,))
            a = _monadic(th, ht, fl)
            if a is None:
                if _monadic(th, ht, "T" if fl == "S" else "S") is not None:
                    raise FlavourMismatch(f"do_{fl} over a head of type {pretty_type(ht)}")
                raise NotMonadic(fl, ht)
            bt = infer(th, ctx, body, locals_ + (a,), visit, path + (1,))
            b = _monadic(th, bt, fl)
            if b is None:
                if _monadic(th, bt, "T" if fl == "S" else "S") is not None:
                    raise FlavourMismatch(f"do_{fl} with a body of type {pretty_type(bt)}")
                raise NotMonadic(fl, bt)
            return mon(fl, b)
    raise TypeError(f"not a term: {m!r}")


def check(th: Theory, ctx: Context, m: Term, a: Type, locals_: tuple = ()) -> bool:
    return type_equal(th, infer(th, ctx, m, locals_), a)


def check_context(th: Theory, ctx: Context) -> None:
    for _, ty in ctx:
        check_grounds(th, ty)
