"""Interpretation of the calculus in finite-set models.

A :class:`Model` pairs a strong monad ``T`` with a submonad ``S`` given by an
inclusion ``iota``, and interprets ground types as finite sets and constants
as elements.  Terms are interpreted as :class:`~csc.finite.FinFunction` tables
from the environment set to the set of the term's type.  Environments are
left-nested products: the empty context is the one-element set and
``G, x:A`` is ``[[G]] x [[A]]``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from pathlib import Path

from .centre import (
    CentreSubmonad, ContinuationMonad, FiniteMonadSpec, IdentityMonad, SemiringMonad,
    WriterMonad, _with_base, is_central_morphism, kleisli_arrow, monoid_centre,
)
from .finite import (
    DEFAULT_SIZE_CAP, ONE, FinFunction, FinMonoid, FinSemiring, FinSet, SizeBlowup,
    check_cap, decode_table, encode_table, exponential, finset, identity, product, sized,
)
from .syntax import (
    App, Arrow, Const, Context, Do, Free, Iota, Lam, MonS, MonT, Pair, Proj, Prod, Ret,
    Star, Term, Type, Unit, Ground, Var, pretty, pretty_type,
)
from .theory import Axiom, Theory, expose
from .typecheck import infer


class UninterpretedGround(Exception):
    pass


class UninterpretedConstant(Exception):
    pass


class ModelError(Exception):
    pass


class ModelFormatError(ModelError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class Model:
    """A finite-set model.

    ``iota_at(X, z)`` maps ``z in S X`` to ``T X``.  Constants are elements of
    the interpretation of their type, i.e. functions out of the one-element
    set.
    """

    monad_t: FiniteMonadSpec
    monad_s: FiniteMonadSpec
    iota_at: object
    ground_interp: dict = field(default_factory=dict)
    const_interp: dict = field(default_factory=dict)
    size_cap: int = DEFAULT_SIZE_CAP
    name: str = "model"

    def monad(self, flavour: str) -> FiniteMonadSpec:
        return self.monad_t if flavour == "T" else self.monad_s

    def iota(self, x: FinSet) -> FinFunction:
        return FinFunction(self.monad_s.obj(x), self.monad_t.obj(x),
                           tuple(self.iota_at(x, z) for z in range(self.monad_s.obj(x).size)))

    def interpret_type(self, a: Type) -> FinSet:
        return interpret_type(self, None, a)


def interpret_type(model: Model, th: Theory | None, a: Type) -> FinSet:
    """The finite set interpreting ``a``; raises SizeBlowup past the model's cap."""
    match a:
        case Unit():
            out = ONE
        case Ground(name):
            try:
                out = model.ground_interp[name]
            except KeyError:
                raise UninterpretedGround(f"ground type {name!r} has no interpretation") from None
        case Prod(l, r):
            out = product(interpret_type(model, th, l), interpret_type(model, th, r))
        case Arrow(d, c):
            out = exponential(interpret_type(model, th, d), interpret_type(model, th, c))
        case MonT(inner):
            out = model.monad_t.obj(interpret_type(model, th, inner))
        case MonS(inner):
            out = model.monad_s.obj(interpret_type(model, th, inner))
        case _:
            raise TypeError(f"not a type: {a!r}")
    check_cap(out.size, model.size_cap, pretty_type(a))
    return out


def context_set(model: Model, th: Theory | None, ctx: Context) -> FinSet:
    env = ONE
    for _, ty in ctx:
        env = product(env, interpret_type(model, th, ty))
        check_cap(env.size, model.size_cap, "environment")
    return env


def environments(model: Model, th: Theory | None, ctx: Context):
    """Yield every environment of ``ctx`` as a tuple of element indices, in
    the index order of :func:`context_set`."""
    sets = [interpret_type(model, th, ty) for _, ty in ctx]
    return itertools.product(*(range(s.size) for s in sets))


class _Evaluator:
    def __init__(self, model: Model, th: Theory, ctx: Context, m: Term):
        self.model, self.th = model, th
        self.types: dict = {}
        self.type = infer(th, ctx, m, visit=lambda p, _t, ty, _l: self.types.__setitem__(p, ty))
        self.slots = {name: k for k, name in enumerate(ctx.names())}
        self.term = m
        self._sets: dict = {}

    def carrier(self, ty: Type) -> FinSet:
        try:
            return self._sets[ty]
        except KeyError:
            s = self._sets[ty] = interpret_type(self.model, self.th, ty)
            return s

    def inner(self, ty: Type, kind) -> Type:
        return expose(self.th, ty, kind).inner

    def run(self, env: tuple) -> int:
        return self.ev(self.term, (), env, ())

    def ev(self, t: Term, path: tuple, env: tuple, bound: tuple) -> int:
        match t:
            case Var(i):
                return bound[-1 - i]
            case Free(name):
                if name in self.slots:
                    return env[self.slots[name]]
                return self.const(name, path)
            case Const(name):
                if name in self.slots:
                    return env[self.slots[name]]
                return self.const(name, path)
            case Star():
                return 0
            case Lam(a, body):
                dom = self.carrier(a)
                cod = self.carrier(self.types[path + (0,)])
                return encode_table([self.ev(body, path + (0,), env, bound + (v,))
                                     for v in range(dom.size)], cod.size)
            case App(f, x):
                fv = self.ev(f, path + (0,), env, bound)
                xv = self.ev(x, path + (1,), env, bound)
                arrow = expose(self.th, self.types[path + (0,)], Arrow)
                dom, cod = self.carrier(arrow.dom), self.carrier(arrow.cod)
                return (fv // cod.size ** (dom.size - 1 - xv)) % cod.size
            case Pair(a, b):
                right = self.carrier(self.types[path + (1,)])
                return (self.ev(a, path + (0,), env, bound) * right.size
                        + self.ev(b, path + (1,), env, bound))
            case Proj(i, a):
                prod = expose(self.th, self.types[path + (0,)], Prod)
                right = self.carrier(prod.right)
                left, r = divmod(self.ev(a, path + (0,), env, bound), right.size)
                return left if i == 1 else r
            case Ret(fl, a):
                x = self.carrier(self.types[path + (0,)])
                return self.model.monad(fl).eta_at(x, self.ev(a, path + (0,), env, bound))
            case Iota(a):
                x = self.carrier(self.inner(self.types[path + (0,)], MonS))
                return self.model.iota_at(x, self.ev(a, path + (0,), env, bound))
            case Do(fl, head, body):
                kind = MonT if fl == "T" else MonS
                monad = self.model.monad(fl)
                a = self.carrier(self.inner(self.types[path + (0,)], kind))
                b = self.carrier(self.inner(self.types[path + (1,)], kind))
                mv = self.ev(head, path + (0,), env, bound)
                # mu . T[[N]] . tau . <id, [[M]]>, with the strength on sets
                # collapsed into the continuation g(a) = [[N]](env, a)
                g = kleisli_arrow([self.ev(body, path + (1,), env, bound + (v,))
                                   for v in range(a.size)], a, b, monad)
                return monad.bind_at(g, mv)
        raise TypeError(f"not a term: {t!r}")

    def const(self, name: str, path: tuple) -> int:
        try:
            return self.model.const_interp[name]
        except KeyError:
            raise UninterpretedConstant(f"constant {name!r} has no interpretation") from None


def interpret_term(model: Model, th: Theory, ctx: Context, m: Term) -> FinFunction:
    """The table of ``m`` over every environment of ``ctx``."""
    ev = _Evaluator(model, th, ctx, m)
    env_set = context_set(model, th, ctx)
    cod = ev.carrier(ev.type)
    return FinFunction(env_set, cod, tuple(ev.run(env) for env in environments(model, th, ctx)))


def evaluate(model: Model, th: Theory, ctx: Context, m: Term, env: dict | None = None) -> str:
    """Evaluate ``m`` in the environment given as labels per context name and
    return the label of the result."""
    env = env or {}
    ev = _Evaluator(model, th, ctx, m)
    values = []
    for name, ty in ctx:
        if name not in env:
            raise ModelError(f"no value given for {name}")
        values.append(interpret_type(model, th, ty).index(env[name]))
    return ev.carrier(ev.type).label(ev.run(tuple(values)))


def environment_labels(model: Model, th: Theory, ctx: Context, env: tuple) -> dict:
    return {name: interpret_type(model, th, ty).label(v) for (name, ty), v in zip(ctx, env)}


def compare_terms(model: Model, th: Theory, ctx: Context, lhs: Term, rhs: Term):
    """Return None if both terms denote the same function, else the labels of
    a distinguishing environment together with the two values."""
    left = _Evaluator(model, th, ctx, lhs)
    right = _Evaluator(model, th, ctx, rhs)
    out = left.carrier(left.type)
    for env in environments(model, th, ctx):
        a, b = left.run(env), right.run(env)
        if a != b:
            return {"env": environment_labels(model, th, ctx, env),
                    "lhs": out.label(a), "rhs": out.label(b)}
    return None


# ---------------------------------------------------------- validation


@dataclass
class Violation:
    check: str
    detail: str

    def __str__(self):
        return f"{self.check}: {self.detail}"


def validate_model(model: Model, th: Theory | None = None, sizes=(0, 1, 2, 3),
                   test_objects=None, centrality_sizes=None) -> list[Violation]:
    """Check that ``iota`` is a monomorphism of strong monads whose components
    are central, on sets of the given sizes and on every ground carrier that
    is no larger.  Constants and type equations of ``th`` are checked against
    the interpretation when a theory is given."""
    t, s = model.monad_t, model.monad_s
    out: list[Violation] = []
    objs = {sized(n).key: sized(n) for n in sizes}
    for g in model.ground_interp.values():
        if g.size <= max(sizes):
            objs.setdefault(g.key, g)
    objs = list(objs.values())

    def fail(check, detail):
        out.append(Violation(check, detail))

    try:
        for x in objs:
            sx, tx = s.obj(x), t.obj(x)
            inc = [model.iota_at(x, z) for z in range(sx.size)]
            if len(set(inc)) != len(inc):
                fail("iota.injective", f"at a {x.size}-element set")
            for a in range(x.size):
                if inc[s.eta_at(x, a)] != t.eta_at(x, a):
                    fail("iota.eta", f"at {x.label(a)}")
                    break
            ssx = s.obj(sx)
            iota_x = _with_base(FinFunction(sx, tx, tuple(inc)), x)
            for zz in range(min(ssx.size, 4096)):
                lhs = inc[s.mu_at(x, zz)]
                rhs = t.bind_at(iota_x, model.iota_at(sx, zz))
                if lhs != rhs:
                    fail("iota.mu", f"at a {x.size}-element set, element {ssx.label(zz)}")
                    break
        for x, y in itertools.product(objs, repeat=2):
            sy = s.obj(y)
            xy = product(x, y)
            bad = next(((a, z) for a in range(x.size) for z in range(sy.size)
                        if model.iota_at(xy, s.tau_at(x, y, a, z))
                        != t.tau_at(x, y, a, model.iota_at(y, z))), None)
            if bad:
                fail("iota.tau", f"at ({x.label(bad[0])}, {sy.label(bad[1])})")
            if x.size ** x.size * y.size ** x.size <= 4096:
                sx = s.obj(x)
                for table in itertools.product(range(y.size), repeat=x.size):
                    f = FinFunction(x, y, table)
                    if any(model.iota_at(y, s.fmap_at(f, z)) != t.fmap_at(f, model.iota_at(x, z))
                           for z in range(sx.size)):
                        fail("iota.natural", f"at {list(table)}")
                        break
        for n in (centrality_sizes if centrality_sizes is not None else sizes):
            x = sized(n)
            f = kleisli_arrow([model.iota_at(x, z) for z in range(s.obj(x).size)],
                              s.obj(x), x, t)
            if not is_central_morphism(t, f, test_objects):
                fail("iota.central", f"component at a {n}-element set is not central")
    except SizeBlowup as e:
        fail("size", str(e))
    if th is not None:
        out.extend(_check_signature(model, th))
    return out


def _check_signature(model: Model, th: Theory) -> list[Violation]:
    out = []
    for g in sorted(th.ground_types):
        if g not in model.ground_interp:
            out.append(Violation("ground", f"{g} has no interpretation"))
    if out:
        return out
    for a, b in th.type_axioms:
        try:
            if interpret_type(model, th, a) != interpret_type(model, th, b):
                out.append(Violation("type-eq", f"{pretty_type(a)} and {pretty_type(b)} "
                                                "are interpreted by different sets"))
        except SizeBlowup as e:
            out.append(Violation("size", str(e)))
    for name, ty in th.constants:
        if name not in model.const_interp:
            out.append(Violation("const", f"{name} has no interpretation"))
            continue
        try:
            if not 0 <= model.const_interp[name] < interpret_type(model, th, ty).size:
                out.append(Violation("const", f"{name} lies outside {pretty_type(ty)}"))
        except SizeBlowup as e:
            out.append(Violation("size", str(e)))
    return out


# --------------------------------------------------------- soundness


@dataclass
class SoundnessReport:
    axioms_checked: int = 0
    fuzz_checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "axioms_checked": self.axioms_checked,
                "fuzz_checked": self.fuzz_checked, "violations": self.violations}

    def __str__(self):
        head = (f"{'sound' if self.ok else 'UNSOUND'}: {self.axioms_checked} axioms, "
                f"{self.fuzz_checked} fuzzed pairs")
        return "\n".join([head] + [f"  {v['what']}: {v['lhs_term']} vs {v['rhs_term']} "
                                   f"at {v['env']} gives {v['lhs']} vs {v['rhs']}"
                                   for v in self.violations])


def check_model_soundness(model: Model, th: Theory, fuzz_count: int = 100,
                          seed: int = 0) -> SoundnessReport:
    """Check every axiom of ``th`` pointwise, then ``fuzz_count`` random terms
    against random derivable rewrites of themselves."""
    from .fuzz import derivable_pair

    report = SoundnessReport()
    for k, ax in enumerate(th.term_axioms):
        report.axioms_checked += 1
        diff = compare_terms(model, th, ax.ctx, ax.lhs, ax.rhs)
        if diff:
            report.violations.append(dict(diff, what=ax.name or f"axiom #{k}",
                                          lhs_term=pretty(ax.lhs), rhs_term=pretty(ax.rhs)))
    rng = random.Random(seed)
    for k in range(fuzz_count):
        ctx, lhs, rhs, _ty = derivable_pair(th, rng, model=model)
        report.fuzz_checked += 1
        diff = compare_terms(model, th, ctx, lhs, rhs)
        if diff:
            report.violations.append(dict(diff, what=f"fuzz #{k}",
                                          lhs_term=pretty(lhs), rhs_term=pretty(rhs)))
    return report


# ------------------------------------------------------ bundled models


def writer_model(monoid: FinMonoid, central=None, consts: dict | None = None,
                 grounds: dict | None = None, size_cap: int = DEFAULT_SIZE_CAP) -> Model:
    """``T = - x M`` with ``S = - x C`` for a submonoid ``C`` of the centre
    (the whole centre by default).

    Unless given, constants ``act_<c>`` and ``zact_<c>`` are interpreted as
    ``(*, c)`` in ``T 1`` and ``S 1``.
    """
    sub = monoid_centre(monoid) if central is None else monoid.submonoid(
        [monoid.element(c) if isinstance(c, str) else c for c in central], "C")
    t, s = WriterMonad(monoid, size_cap), WriterMonad(sub, size_cap)
    nm, ns = monoid.size, sub.size
    parent = sub.parent_index

    def iota_at(x, z):
        a, c = divmod(z, ns)
        return a * nm + parent[c]

    if consts is None:
        consts = {f"act_{monoid.carrier.label(c)}": c for c in range(nm)}
        consts.update({f"zact_{sub.carrier.label(c)}": c for c in range(ns)})
    return Model(t, s, iota_at, dict(grounds or {}), dict(consts), size_cap,
                 f"writer({monoid.name})")


def identity_submonad_model(t: FiniteMonadSpec, grounds: dict | None = None,
                            consts: dict | None = None,
                            size_cap: int = DEFAULT_SIZE_CAP) -> Model:
    """``S`` the identity monad, included into ``T`` by its unit."""
    return Model(t, IdentityMonad(size_cap), t.eta_at, dict(grounds or {}),
                 dict(consts or {}), size_cap, f"id<{t.name}")


def centre_model(t: FiniteMonadSpec, test_objects, grounds: dict | None = None,
                 consts: dict | None = None, size_cap: int = DEFAULT_SIZE_CAP) -> Model:
    """``S`` the centre of ``T`` computed against ``test_objects``."""
    z = CentreSubmonad(t, test_objects, size_cap)
    return Model(t, z, z.iota_at, dict(grounds or {}), dict(consts or {}), size_cap,
                 f"Z<{t.name}")


# -------------------------------------------------------- model files


def _rows(lines, k, n, what):
    rows = []
    for j in range(n):
        if k + j >= len(lines):
            raise ModelFormatError(f"{what} table needs {n} rows", lines[k - 1][0])
        rows.append(lines[k + j][1].split())
    return rows


def parse_model(text: str, th: Theory | None, name: str = "model",
                size_cap: int = DEFAULT_SIZE_CAP) -> Model:
    """Read the ``.cscm`` model format against the signature of ``th``.

    Directives, one per line (``#`` starts a comment)::

        monad writer | continuation <r> | semiring | identity
        submonad centre | identity          (non-writer monads; default identity)
        test-sizes 1 2                      (for submonad centre)
        elements e r r2 ...                 (monoid or semiring carrier)
        unit e
        mult                                (followed by one row per element)
        zero 0 / one 1 / add / mul          (semiring tables)
        central-submonoid e r2
        set Colours = red green blue
        ground G = Colours | one | <type>
        const c = <element label>

    In writer models a monoid element ``m`` given for a constant of type
    ``T 1`` or ``S 1`` stands for ``(*, m)``.  Without a theory only the
    algebra is read and ``const`` lines are skipped.
    """
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((no, line))
    kind, param = "writer", None
    submonad, tests = "identity", (1, 2)
    elements = unit = zero = one = None
    tables: dict = {}
    central = None
    sets: dict = {"one": ONE, "unit": ONE}
    ground_src: dict = {}
    const_src: dict = {}
    k = 0
    while k < len(lines):
        no, line = lines[k]
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        k += 1
        if word == "monad":
            parts = rest.split()
            if not parts or parts[0] not in ("writer", "continuation", "semiring", "identity"):
                raise ModelFormatError(f"unknown monad {rest!r}", no)
            kind = parts[0]
            param = int(parts[1]) if len(parts) > 1 else None
        elif word == "submonad":
            if rest not in ("centre", "center", "identity"):
                raise ModelFormatError(f"unknown submonad {rest!r}", no)
            submonad = "centre" if rest.startswith("cent") else rest
        elif word == "test-sizes":
            tests = tuple(int(v) for v in rest.split())
        elif word == "elements":
            elements = rest.split()
        elif word in ("unit", "zero", "one"):
            if word == "unit":
                unit = rest
            elif word == "zero":
                zero = rest
            else:
                one = rest
        elif word in ("mult", "add", "mul"):
            if elements is None:
                raise ModelFormatError(f"{word} before elements", no)
            tables[word] = _rows(lines, k, len(elements), word)
            k += len(elements)
        elif word == "central-submonoid":
            central = rest.split()
        elif word == "set":
            nm, _, labels = rest.partition("=")
            sets[nm.strip()] = finset(labels.split(), nm.strip())
        elif word == "ground":
            g, _, target = rest.partition("=")
            ground_src[g.strip()] = (target.strip(), no)
        elif word == "const":
            c, _, value = rest.partition("=")
            const_src[c.strip()] = (value.strip(), no)
        else:
            raise ModelFormatError(f"unknown directive {word!r}", no)

    try:
        if kind == "writer":
            if elements is None or unit is None or "mult" not in tables:
                raise ModelFormatError("a writer model needs elements, unit and mult")
            from .finite import monoid_from_table

            monoid = monoid_from_table(elements, unit, tables["mult"], name)
            model = writer_model(monoid, central, consts={}, size_cap=size_cap)
        else:
            if kind == "continuation":
                t = ContinuationMonad(param or 2, size_cap)
            elif kind == "identity":
                t = IdentityMonad(size_cap)
            else:
                if elements is None or zero is None or one is None or not {"add", "mul"} <= set(tables):
                    raise ModelFormatError("a semiring model needs elements, zero, one, add and mul")
                t = SemiringMonad(_semiring(elements, zero, one, tables, name), size_cap)
            model = (centre_model(t, [sized(n) for n in tests], size_cap=size_cap)
                     if submonad == "centre" else identity_submonad_model(t, size_cap=size_cap))
    except ModelFormatError:
        raise
    except (ValueError, KeyError) as e:
        raise ModelFormatError(f"bad algebra tables: {e}") from None
    model.name = name

    from .syntax import parse_type

    for g, (target, no) in ground_src.items():
        if target in sets:
            model.ground_interp[g] = sets[target]
            continue
        try:
            model.ground_interp[g] = interpret_type(model, th, parse_type(target))
        except Exception as e:
            raise ModelFormatError(f"cannot interpret ground {g} as {target!r}: {e}", no) from None
    for c, (value, no) in const_src.items():
        if th is None:
            break
        ty = th.const_type(c)
        if ty is None:
            raise ModelFormatError(f"constant {c} is not declared by the theory", no)
        carrier = interpret_type(model, th, ty)
        label = value
        if kind == "writer" and isinstance(ty, (MonT, MonS)) and isinstance(ty.inner, Unit):
            if not value.startswith("("):
                label = f"(*,{value})"
        try:
            model.const_interp[c] = carrier.index(label)
        except (KeyError, ValueError):
            raise ModelFormatError(f"{value!r} is not an element of {pretty_type(ty)}", no) from None
    return model


def _semiring(elements, zero, one, tables, name) -> FinSemiring:
    # keep the zero first, as the semiring monad requires
    order = [zero] + [e for e in elements if e != zero]
    pos = {e: k for k, e in enumerate(elements)}
    new = {e: k for k, e in enumerate(order)}

    def table(rows):
        return tuple(tuple(new[rows[pos[a]][pos[b]]] for b in order) for a in order)

    return FinSemiring(finset(order, name), 0, new[one], table(tables["add"]),
                       table(tables["mul"]), name)


def load_model(path, th: Theory | None, size_cap: int = DEFAULT_SIZE_CAP) -> Model:
    p = Path(path)
    return parse_model(p.read_text(), th, p.stem, size_cap)


def writer_theory(monoid: FinMonoid, central=None, name: str | None = None) -> Theory:
    """The theory of actions of ``monoid`` with a central submonoid.

    Constants ``act_c : T 1`` for every element and ``zact_s : S 1`` for
    every element of the central submonoid (the whole centre by default).
    Axioms: the actions compose by the multiplication, returning ``*`` is
    acting by the unit, and ``iota`` sends each central action to the
    corresponding action.  Composition is stated on closed actions; the
    instances with a continuation follow by associativity.
    """
    from .syntax import STAR, UNIT

    sub = monoid_centre(monoid) if central is None else monoid.submonoid(
        [monoid.element(c) if isinstance(c, str) else c for c in central])
    lab = monoid.carrier.label
    cen = [sub.parent_index[k] for k in range(sub.size)]
    t1, s1 = MonT(UNIT), MonS(UNIT)
    consts = [(f"act_{lab(c)}", t1) for c in range(monoid.size)]
    consts += [(f"zact_{lab(s)}", s1) for s in cen]
    act = {c: Const(f"act_{lab(c)}") for c in range(monoid.size)}
    zact = {s: Const(f"zact_{lab(s)}") for s in cen}
    axioms = []
    empty = Context()
    for fl, acts, ty in (("T", act, t1), ("S", zact, s1)):
        for c, d in itertools.product(acts, repeat=2):
            axioms.append(Axiom(empty, Do(fl, acts[c], acts[d], "_"),
                                acts[monoid.mult[c][d]], ty,
                                f"{fl}.compose {lab(c)} {lab(d)}"))
        axioms.append(Axiom(empty, Ret(fl, STAR), acts[monoid.unit], ty, f"{fl}.unit"))
    for s in cen:
        axioms.append(Axiom(empty, Iota(zact[s]), act[s], t1, f"iota {lab(s)}"))
    return Theory(frozenset(), tuple(consts), (), tuple(axioms),
                  name or f"Th_{monoid.name}")
