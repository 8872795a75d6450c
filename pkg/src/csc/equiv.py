"""Deciding equality of terms.

Normalisation runs in three phases, repeated until nothing changes:

1. the oriented rules (beta for functions, pairs and both monads, eta for
   unit and for both monads, reassociation of ``do`` chains, ``iota`` of a
   return, and splitting ``iota (do_S x <- M; N)`` into two ``iota``
   bindings) are applied to a fixed point;
2. every maximal run of ``do`` bindings is put in canonical order by
   adjacent swaps of independent bindings, one of which is central
   (an ``iota`` head in a ``do_T`` run; any binding in a ``do_S`` run);
3. trailing ``do_T x <- iota M; iota N`` are fused into ``iota (do_S ...)``,
   a final ``ret_T V`` after an ``iota`` binding counting as ``iota (ret_S V)``.

Eta for functions, pairs and unit is applied when comparing, driven by the
type.  Equality beyond normal forms is searched for breadth first in both
directions, using the theory's axioms as bridges.  A model passed as
``oracle`` can refute an equation by evaluating both sides.
"""

from __future__ import annotations

import functools
import json
import random
from collections import deque
from dataclasses import dataclass, field

from .syntax import (
    App, Arrow, Const, Context, Do, Free, Iota, Lam, MonS, MonT, Pair, Proj, Prod, Ret,
    STAR, Star, Term, Type, Var, children, close_over, get_at, loose_indices, occurs,
    pretty, pretty_type, rebuild, replace_at, shift, subst_free, substitute, subterms,
    term_size,
)
from .theory import Axiom, Theory, expose, is_unit, type_equal
from .typecheck import infer


class TypeMismatch(Exception):
    pass


class NormalizationLimit(Exception):
    pass


@dataclass(frozen=True)
class Step:
    rule: str
    path: tuple
    before: Term
    after: Term

    def to_json(self) -> dict:
        return {"rule": self.rule, "path": list(self.path),
                "before": pretty(self.before), "after": pretty(self.after)}


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)

    def add(self, rule: str, path: tuple, before: Term, after: Term):
        self.steps.append(Step(rule, path, before, after))

    def extend(self, other: "RewriteTrace"):
        self.steps.extend(other.steps)

    def reversed(self) -> "RewriteTrace":
        return RewriteTrace([Step(_reverse(s.rule), s.path, s.after, s.before)
                             for s in reversed(self.steps)])

    def replays(self, start: Term, end: Term) -> bool:
        """Each step starts where the previous one stopped, from ``start`` to ``end``."""
        cur = start
        for s in self.steps:
            if s.before != cur:
                return False
            cur = s.after
        return cur == end

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(s.to_json(), ensure_ascii=False) for s in self.steps)

    def __len__(self):
        return len(self.steps)


def _reverse(rule: str) -> str:
    return rule[:-4] if rule.endswith(" ^-1") else rule + " ^-1"


# --------------------------------------------------------- comparison


def _kind(fl: str):
    return MonT if fl == "T" else MonS


def _type_at(th: Theory, ctx: Context, t: Term, locals_: tuple) -> Type:
    return infer(th, ctx, t, locals_)


def eta_equal(th: Theory, ctx: Context, a: Term, b: Term, ty: Type, locals_: tuple = ()) -> bool:
    """Equality of normal forms up to eta for functions, pairs and unit."""
    return a == b or eta_long(th, ctx, a, ty, locals_) == eta_long(th, ctx, b, ty, locals_)


def eta_long(th: Theory, ctx: Context, t: Term, ty: Type, locals_: tuple = ()) -> Term:
    """The eta-long form of a normal term ``t : ty``: functions become
    lambdas, pairs become pair terms and unit values become ``*``."""
    if is_unit(th, ty):
        return STAR
    arrow = expose(th, ty, Arrow)
    if arrow is not None:
        body = t.body if isinstance(t, Lam) else App(shift(t, 1), Var(0))
        return Lam(arrow.dom, eta_long(th, ctx, body, arrow.cod, locals_ + (arrow.dom,)),
                   getattr(t, "hint", "x"))
    prod = expose(th, ty, Prod)
    if prod is not None:
        return Pair(eta_long(th, ctx, _proj(1, t), prod.left, locals_),
                    eta_long(th, ctx, _proj(2, t), prod.right, locals_))
    return _long_inside(th, ctx, t, locals_)


def _proj(i: int, t: Term) -> Term:
    if isinstance(t, Pair):
        return t.fst if i == 1 else t.snd
    return Proj(i, t)


def _long_inside(th, ctx, t, locals_) -> Term:
    # t is not of function, product or unit type: expand its arguments
    match t:
        case App(f, x):
            return App(_spine(th, ctx, f, locals_),
                       eta_long(th, ctx, x, infer(th, ctx, x, locals_), locals_))
        case Proj(i, x):
            return Proj(i, _spine(th, ctx, x, locals_))
        case Ret(fl, x):
            return Ret(fl, eta_long(th, ctx, x, infer(th, ctx, x, locals_), locals_))
        case Iota(x):
            return Iota(eta_long(th, ctx, x, infer(th, ctx, x, locals_), locals_))
        case Do(fl, h, body, hint):
            ht = infer(th, ctx, h, locals_)
            inner = expose(th, ht, _kind(fl)).inner
            lt = locals_ + (inner,)
            return Do(fl, eta_long(th, ctx, h, ht, locals_),
                      eta_long(th, ctx, body, infer(th, ctx, body, lt), lt), hint)
    return t


def _spine(th, ctx, t, locals_) -> Term:
    # the head position of an elimination keeps its shape
    match t:
        case App() | Proj():
            return _long_inside(th, ctx, t, locals_)
    return t


# ------------------------------------------------------ oriented rules


def _redex(th: Theory, ctx: Context, t: Term, ty: Type, locals_: tuple):
    """Return ``(rule, contractum)`` if ``t`` is a redex of an oriented rule."""
    if not isinstance(t, Star) and is_unit(th, ty):
        return "unit.eta", STAR
    match t:
        case App(Lam(_, body), arg):
            return "lambda.beta", substitute(body, arg)
        case Proj(i, Pair(a, b)):
            return "pair.beta", a if i == 1 else b
        case Do(fl, Ret(fl2, v), body) if fl == fl2:
            return f"{fl}.beta", substitute(body, v)
        case Do(fl, head, Ret(fl2, v)) if fl == fl2 and _returns_bound(th, ctx, fl, head, v,
                                                                          ty, locals_):
            return f"{fl}.eta", head
        case Do(fl, Do(fl2, m, n, h2), p, h1) if fl == fl2:
            return f"{fl}.assoc", Do(fl, m, Do(fl, n, shift(p, 1, 1), h1), h2)
        case Iota(Ret("S", v)):
            return "iota.ret", Ret("T", v)
        case Iota(Do("S", m, n, h)):
            return "iota.comp ^-1", Do("T", Iota(m), Iota(n), h)
    return None


def _returns_bound(th, ctx, fl, head, v, ty, locals_) -> bool:
    # v is eta-equal to the variable just bound, whose type is that of the result
    if any(i > 0 for i in loose_indices(v)):
        return False
    inner = expose(th, infer(th, ctx, head, locals_), _kind(fl)).inner
    if not type_equal(th, inner, expose(th, ty, _kind(fl)).inner):
        return False
    return eta_equal(th, ctx, v, Var(0), inner, locals_ + (inner,))


def _typed_subterms(th: Theory, ctx: Context, t: Term) -> list:
    out = []
    infer(th, ctx, t, visit=lambda p, s, ty, l: out.append((p, s, ty, l)))
    out.sort(key=lambda e: e[0])
    return out


def _oriented_step(th, ctx, t, rng):
    found = []
    for path, s, ty, locals_ in _typed_subterms(th, ctx, t):
        r = _redex(th, ctx, s, ty, locals_)
        if r is not None:
            if rng is None:
                return path, r
            found.append((path, r))
    if not found:
        return None
    return rng.choice(found)


# ------------------------------------------------------- chain sorting


def term_key(t: Term) -> str:
    """A structural key for ``t`` that ignores binder names."""
    match t:
        case Var(i):
            return f"#{i}"
        case Free(n):
            return f"${n}"
        case Const(n):
            return f"!{n}"
        case Star():
            return "*"
        case Lam(a, b):
            return f"(L {pretty_type(a)} {term_key(b)})"
        case Do(fl, h, b):
            return f"(D{fl} {term_key(h)} {term_key(b)})"
        case Ret(fl, a):
            return f"(R{fl} {term_key(a)})"
        case Proj(i, a):
            return f"(P{i} {term_key(a)})"
    name = type(t).__name__[0]
    return f"({name} " + " ".join(term_key(c) for c, _ in children(t)) + ")"


def chain(t: Do):
    """Split a ``do`` chain into its heads (each under the previous binders),
    binder names and tail."""
    fl = t.flavour
    heads, hints = [], []
    while isinstance(t, Do) and t.flavour == fl:
        heads.append(t.head)
        hints.append(t.hint)
        t = t.body
    return fl, heads, hints, t


def _placeholder(k: int) -> str:
    return f"\x00{k}"


def _open(t: Term, names: list[str]) -> Term:
    """Instantiate the innermost ``len(names)`` binders (outermost first)."""
    for name in reversed(names):
        t = substitute(t, Free(name))
    return t


def _close(t: Term, names: list[str]) -> Term:
    for name in names:
        t = close_over(t, name)
    return t


def _central(fl: str, head: Term) -> bool:
    return fl == "S" or isinstance(head, Iota)


def canonical_order(fl: str, heads: list[Term]) -> list[int]:
    """The canonical order of a run's bindings, as a list of original positions.

    Dependencies and the relative order of non-central bindings are kept; a
    central binding is placed as early as possible, ties broken by the key of
    its head with references to earlier bindings replaced by their new
    positions, then by original position.
    """
    n = len(heads)
    names = [_placeholder(k) for k in range(n)]
    opened = [_open(h, names[:k]) for k, h in enumerate(heads)]
    deps = [{k2 for k2 in range(k) if names[k2] in _free(opened[k])} for k in range(n)]
    central = [_central(fl, h) for h in heads]
    placed: list[int] = []
    new_pos: dict = {}
    remaining = list(range(n))
    while remaining:
        ready = []
        for k in remaining:
            if not deps[k] <= new_pos.keys():
                continue
            if not central[k] and any(not central[j] and j < k for j in remaining):
                continue
            ready.append(k)
        def key(k):
            h = opened[k]
            for j, p in new_pos.items():
                h = subst_free(h, names[j], Free(f"@{p}"))
            return (0 if central[k] else 1, term_key(h), k)
        best = min(ready, key=key)
        new_pos[best] = len(placed)
        placed.append(best)
        remaining.remove(best)
    return placed


def _free(t: Term) -> set:
    from .syntax import free_names

    return free_names(t)


def swap_adjacent(t: Do) -> Term:
    """``do x <- a; do y <- b; P`` to ``do y <- b; do x <- a; P`` (``b`` not using ``x``)."""
    a, inner = t.head, t.body
    b, p = inner.head, inner.body
    if occurs(b, 0):
        raise ValueError("the second binding depends on the first")
    na, nb = _placeholder(0), _placeholder(1)
    opened = _open(p, [na, nb])
    return Do(t.flavour, shift(b, -1), Do(t.flavour, shift(a, 1), _close(opened, [nb, na]),
                                          t.hint), inner.hint)


def _sort_step(t: Term):
    """Find the first run (pre-order) out of canonical order and return the
    path and result of one adjacent swap towards it."""
    for path, s, _ in subterms(t):
        if not isinstance(s, Do):
            continue
        if path and isinstance(get_at(t, path[:-1]), Do) and path[-1] == 1 \
                and get_at(t, path[:-1]).flavour == s.flavour:
            continue  # not the start of a run
        fl, heads, _, _ = chain(s)
        order = canonical_order(fl, heads)
        for pos in range(len(order) - 1):
            # the first adjacent pair that is inverted relative to the target
            rank = {k: r for r, k in enumerate(order)}
            if rank[pos] > rank[pos + 1]:
                at = path + (1,) * pos
                return at, swap_adjacent(get_at(t, at))
    return None


def _fuse_step(t: Term):
    for path, s, _ in subterms(t):
        if isinstance(s, Do) and s.flavour == "T" and isinstance(s.head, Iota):
            if isinstance(s.body, Iota):
                return "iota.comp", path, Iota(Do("S", s.head.arg, s.body.arg, s.hint))
            if isinstance(s.body, Ret) and s.body.flavour == "T":
                return "iota.ret ^-1", path + (1,), Iota(Ret("S", s.body.arg))
    return None


def normalize(th: Theory, ctx: Context, m: Term, rng: random.Random | None = None,
              max_steps: int | None = None) -> tuple[Term, RewriteTrace]:
    """Normal form of ``m`` and the steps leading to it.

    With ``rng`` the oriented redex to contract is chosen at random instead of
    leftmost-outermost.
    """
    infer(th, ctx, m)
    trace = RewriteTrace()
    limit = max_steps if max_steps is not None else 200 + 50 * term_size(m)
    t = m

    def record(rule, path, new):
        nonlocal t
        if len(trace) >= limit:
            raise NormalizationLimit(f"more than {limit} steps normalising {pretty(m)}")
        whole = replace_at(t, path, new)
        trace.add(rule, path, t, whole)
        t = whole

    while True:
        while (found := _oriented_step(th, ctx, t, rng)) is not None:
            path, (rule, new) = found
            record(rule, path, new)
        swapped = False
        while (found := _sort_step(t)) is not None:
            path, new = found
            record("S.central", path, new)
            swapped = True
        if not swapped or _oriented_step(th, ctx, t, None) is None:
            break
    while (found := _fuse_step(t)) is not None:
        record(*found)
    return t, trace


def normal_form(th: Theory, ctx: Context, m: Term) -> Term:
    return normalize(th, ctx, m)[0]


# ------------------------------------------------------------- verdicts


@dataclass
class Verdict:
    kind: str  # Equal | Distinct | Unknown
    trace: RewriteTrace | None = None
    witness: dict | None = None
    explored: int = 0
    reason: str = ""

    def __bool__(self):
        return self.kind == "Equal"

    def to_json(self) -> dict:
        out = {"verdict": self.kind, "explored": self.explored}
        if self.trace is not None:
            out["trace"] = [s.to_json() for s in self.trace.steps]
        if self.witness is not None:
            out["witness"] = self.witness
        if self.reason:
            out["reason"] = self.reason
        return out

    def __str__(self):
        if self.kind == "Equal":
            return f"Equal ({len(self.trace or ())} steps)"
        if self.kind == "Distinct":
            w = self.witness
            return f"Distinct: at {w['env']} the sides evaluate to {w['lhs']} and {w['rhs']}"
        return f"Unknown ({self.reason})"


# --------------------------------------------------------- axiom search


@dataclass(frozen=True)
class _Bridge:
    name: str
    ctx: Context
    lhs: Term
    rhs: Term


@functools.lru_cache(maxsize=32)
def _bridges(th: Theory) -> list[_Bridge]:
    out = []
    for k, ax in enumerate(th.term_axioms):
        name = ax.name or f"axiom#{k}"
        lhs = normal_form(th, ax.ctx, ax.lhs)
        rhs = normal_form(th, ax.ctx, ax.rhs)
        out.append(_Bridge(name, ax.ctx, lhs, rhs))
        out.append(_Bridge(name + " ^-1", ax.ctx, rhs, lhs))
    return out


def _match(pat: Term, t: Term, metas: dict, binding: dict, depth: int = 0) -> bool:
    """Match ``pat`` against ``t`` under ``depth`` pattern binders; metavariables
    are the free names in ``metas`` and must not capture pattern-bound
    variables."""
    if isinstance(pat, Free) and pat.name in metas:
        if any(i < depth for i in loose_indices(t)):
            return False
        val = shift(t, -depth) if depth else t
        if pat.name in binding:
            return binding[pat.name] == val
        binding[pat.name] = val
        return True
    if type(pat) is not type(t):
        return False
    match pat, t:
        case (Var(i), Var(j)):
            return i == j
        case (Free(x), Free(y)) | (Const(x), Const(y)):
            return x == y
        case (Star(), Star()):
            return True
        case (Lam(a, _), Lam(b, _)) if a != b:
            return False
        case (Ret(f, _), Ret(g, _)) | (Do(f, _, _), Do(g, _, _)) if f != g:
            return False
        case (Proj(i, _), Proj(j, _)) if i != j:
            return False
    return all(_match(p, c, metas, binding, depth + d)
               for (p, d), (c, _) in zip(children(pat), children(t)))


def _instantiate(rhs: Term, binding: dict, depth: int) -> Term:
    out = rhs
    for name, val in binding.items():
        out = subst_free(out, name, val)
    return shift(out, depth) if depth else out


def _meta_types_ok(th, ctx, bridge: _Bridge, binding: dict, locals_: tuple) -> bool:
    for name, ty in bridge.ctx:
        if name not in binding:
            return False
        try:
            if not type_equal(th, infer(th, ctx, binding[name], locals_), ty):
                return False
        except Exception:
            return False
    return True


def _bridge_moves(th: Theory, ctx: Context, t: Term, bridges: list[_Bridge]):
    """Yield ``(rule, path, result)`` for every application of a bridge."""
    typed = None
    for path, s, depth in subterms(t):
        for br in bridges:
            metas = {n for n in br.ctx.names()}
            binding: dict = {}
            if _match(br.lhs, s, metas, binding):
                if metas:
                    if typed is None:
                        typed = {p: l for p, _, _, l in _typed_subterms(th, ctx, t)}
                    if not _meta_types_ok(th, ctx, br, binding, typed[path]):
                        continue
                yield br.name, path, _instantiate(br.rhs, binding, 0)
            # a chain segment: the pattern's bindings followed by its tail as
            # the head of a further binding
            if isinstance(br.lhs, Do) and isinstance(s, Do) and br.lhs.flavour == s.flavour:
                fl, pheads, _, ptail = chain(br.lhs)
                k = len(pheads)
                _, sheads, shints, stail = chain(s)
                if len(sheads) < k + 1:
                    continue
                segment = _segment(fl, sheads[:k + 1], shints[:k + 1])
                binding = {}
                if not _match(br.lhs, segment, metas, binding):
                    continue
                rest = _rest(s, k + 1)
                # rest sits under k + 1 binders of which it may use only the last
                if any(1 <= i <= k for i in loose_indices(rest)):
                    continue
                rest = shift(rest, -k, 1)
                if metas:
                    if typed is None:
                        typed = {p: l for p, _, _, l in _typed_subterms(th, ctx, t)}
                    if not _meta_types_ok(th, ctx, br, binding, typed[path]):
                        continue
                yield br.name, path, Do(fl, _instantiate(br.rhs, binding, 0), rest, shints[k])


def _segment(fl, heads, hints) -> Term:
    """``do x1 <- h1; ...; h_{k+1}`` from the first ``k + 1`` heads of a chain."""
    out = heads[-1]
    for h, hint in zip(reversed(heads[:-1]), reversed(hints[:-1])):
        out = Do(fl, h, out, hint)
    return out


def _rest(t: Term, n: int) -> Term:
    for _ in range(n):
        t = t.body
    return t


def _swap_moves(t: Term):
    """Swaps of adjacent independent bindings with a central side."""
    for path, s, _ in subterms(t):
        if isinstance(s, Do) and isinstance(s.body, Do) and s.body.flavour == s.flavour \
                and not occurs(s.body.head, 0) \
                and (_central(s.flavour, s.head) or _central(s.flavour, s.body.head)):
            yield "S.central", path, swap_adjacent(s)


def _neighbours(th, ctx, t, bridges):
    for rule, path, new in _bridge_moves(th, ctx, t, bridges):
        yield rule, path, new
    for rule, path, new in _swap_moves(t):
        yield rule, path, new


def decide_equal(th: Theory, ctx: Context, a: Term, b: Term, budget: int = 2000,
                 oracle=None) -> Verdict:
    """Three-valued equality: ``Equal`` with a replayable trace from ``a`` to
    ``b``, ``Distinct`` with an environment on which ``oracle`` separates the
    sides, or ``Unknown`` once ``budget`` search nodes are spent."""
    ta, tb = infer(th, ctx, a), infer(th, ctx, b)
    if not type_equal(th, ta, tb):
        raise TypeMismatch(f"{pretty_type(ta)} and {pretty_type(tb)} differ")
    na, tra = normalize(th, ctx, a)
    nb, trb = normalize(th, ctx, b)
    ka, kb = eta_long(th, ctx, na, ta), eta_long(th, ctx, nb, ta)
    if ka == kb:
        return Verdict("Equal", _join(tra, trb, na, nb), explored=0)
    if oracle is not None:
        witness = _refute(oracle, th, ctx, a, b)
        if witness is not None:
            return Verdict("Distinct", witness=witness, explored=0)
    bridges = _bridges(th)
    # per side: eta-long key -> (normal form, parent key, steps from parent)
    seen = [{ka: (na, None, None)}, {kb: (nb, None, None)}]
    queues = [deque([ka]), deque([kb])]
    explored = 0
    while (queues[0] or queues[1]) and explored < budget:
        side = 0 if (queues[0] and (not queues[1] or len(queues[0]) <= len(queues[1]))) else 1
        key = queues[side].popleft()
        cur = seen[side][key][0]
        explored += 1
        for rule, path, new in _neighbours(th, ctx, cur, bridges):
            moved = replace_at(cur, path, new)
            try:
                nf, tr = normalize(th, ctx, moved)
            except NormalizationLimit:
                continue
            k = eta_long(th, ctx, nf, ta)
            if k in seen[side]:
                continue
            steps = RewriteTrace([Step(rule, path, cur, moved)] + tr.steps)
            seen[side][k] = (nf, key, steps)
            if k in seen[1 - side]:
                trace = _assemble(seen, side, k, tra, trb)
                return Verdict("Equal", trace, explored=explored)
            queues[side].append(k)
    reason = "budget exhausted" if explored >= budget else "search space exhausted"
    return Verdict("Unknown", explored=explored, reason=reason)


def _path_to(seen: dict, key) -> RewriteTrace:
    chunks = []
    while True:
        _, parent, steps = seen[key]
        if parent is None:
            break
        chunks.append(steps)
        key = parent
    out = RewriteTrace()
    for c in reversed(chunks):
        out.extend(c)
    return out


def _join(tra: RewriteTrace, trb: RewriteTrace, na: Term, nb: Term) -> RewriteTrace:
    out = RewriteTrace(list(tra.steps))
    if na != nb:
        out.add("eta", (), na, nb)
    out.extend(trb.reversed())
    return out


def _assemble(seen, side, key, tra, trb) -> RewriteTrace:
    here = _path_to(seen[side], key)
    there = _path_to(seen[1 - side], key)
    first, second = (tra, trb) if side == 0 else (trb, tra)
    fwd = RewriteTrace(list(first.steps))
    fwd.extend(here)
    mine, theirs = seen[side][key][0], seen[1 - side][key][0]
    if mine != theirs:
        fwd.add("eta", (), mine, theirs)
    fwd.extend(there.reversed())
    fwd.extend(second.reversed())
    return fwd if side == 0 else fwd.reversed()


def _refute(oracle, th, ctx, a, b):
    from .finite import SizeBlowup
    from .semantics import UninterpretedConstant, UninterpretedGround, compare_terms

    try:
        return compare_terms(oracle, th, ctx, a, b)
    except (SizeBlowup, UninterpretedConstant, UninterpretedGround):
        return None


def trace_to_jsonl(trace: RewriteTrace) -> str:
    return trace.to_jsonl()
