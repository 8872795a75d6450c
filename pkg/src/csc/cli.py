"""``csc`` command-line entry point.

Exit codes: 0 success / Verified / Equal, 1 Distinct / Failed, 2 Unknown,
3 usage or load errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import centre as cm
from .equiv import decide_equal, normalize
from .finite import DEFAULT_SIZE_CAP, SizeBlowup, sized
from .semantics import ModelError, interpret_term, load_model, check_model_soundness
from .syntax import Context, ParseError, parse_context, parse_term, pretty, pretty_type
from .theory import Theory, TheoryError, check_translation, load_theory, load_translation, validate_theory
from .typecheck import TypeCheckError, infer

OK, FAILED, UNKNOWN, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    theory_path: str | None = None
    model_path: str | None = None
    budget: int = 2000
    size_cap: int = DEFAULT_SIZE_CAP
    test_object_sizes: list = field(default_factory=lambda: [1, 2])
    seed: int = 0

    def __post_init__(self):
        if self.budget <= 0 or self.size_cap <= 0:
            raise UsageError("--budget and --size-cap must be positive")
        if not self.test_object_sizes or any(n < 0 for n in self.test_object_sizes):
            raise UsageError("--test-sizes needs non-negative sizes")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _sizes(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected sizes like 1,2 not {text!r}") from None


def _common(p: argparse.ArgumentParser):
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP)
    p.add_argument("--test-sizes", type=_sizes, default=[1, 2])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="csc", description="Central submonad calculus toolkit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        _common(s)
        return s

    s = cmd("check", "typecheck a term file and print its type")
    s.add_argument("theory")
    s.add_argument("term")

    s = cmd("normalize", "print the normal form of a term")
    s.add_argument("theory")
    s.add_argument("term")
    s.add_argument("--trace", action="store_true")

    s = cmd("eq", "decide equality of two terms")
    s.add_argument("theory")
    s.add_argument("lhs")
    s.add_argument("rhs")
    s.add_argument("--model", help="model used to refute")

    s = cmd("eval", "interpret a term in a finite model")
    s.add_argument("theory")
    s.add_argument("term")
    s.add_argument("--model", required=True)

    for name, help_ in (("centre", "compute the centre of a monad at a base object"),
                        ("verify-laws", "check monad and strength laws on small sets"),
                        ("verify-iso", "compare central Kleisli maps with maps through the centre")):
        s = cmd(name, help_)
        s.add_argument("--model", help="model file fixing the monad")
        s.add_argument("--monad", choices=["writer", "continuation", "semiring", "identity", "list"])
        s.add_argument("--r", type=int, default=2, help="answer-set size for the continuation monad")
        if name == "centre":
            s.add_argument("--base-size", type=int, default=1)
        elif name == "verify-laws":
            s.add_argument("--max-size", type=int, default=3)
        else:
            s.add_argument("--x", type=int, default=1)
            s.add_argument("--y", type=int, default=1)

    s = cmd("soundness", "check a model against a theory's axioms and fuzzed derivations")
    s.add_argument("theory")
    s.add_argument("--model", required=True)
    s.add_argument("--fuzz", type=int, default=100)

    s = cmd("translate-check", "check that a translation preserves every axiom")
    s.add_argument("translation")
    s.add_argument("--model", help="model of the target theory used to refute")

    cmd("d4-demo", "the dihedral-group counterexample")
    return p


# --------------------------------------------------------------- loading


def _theory(path) -> Theory:
    th = load_theory(path)
    diags = validate_theory(th)
    if diags:
        raise TheoryError("; ".join(map(str, diags)))
    return th


def read_judgement(path, th: Theory) -> tuple[Context, object]:
    """A term file holds a term, optionally preceded by ``[x:A, ...] |-``."""
    src = Path(path).read_text(encoding="utf-8")
    src = "\n".join(line.split("#", 1)[0] for line in src.splitlines()).strip()
    ctx = Context()
    if src.startswith("["):
        close = src.index("]")
        ctx = parse_context(src[:close + 1])
        src = src[close + 1:].strip()
    if src.startswith("|-"):
        src = src[2:]
    consts = frozenset(c for c, _ in th.constants) - set(ctx.names())
    return ctx, parse_term(src, consts)


def _monad(args, cfg: RunConfig):
    if args.model:
        model = load_model(args.model, None, cfg.size_cap)
        t = model.monad_t
        if args.monad and args.monad != _kind(t):
            raise UsageError(f"--monad {args.monad} does not match the model's {_kind(t)} monad")
        return t
    match args.monad:
        case "continuation":
            return cm.ContinuationMonad(args.r, cfg.size_cap)
        case "identity":
            return cm.IdentityMonad(cfg.size_cap)
        case "list":
            return cm.ListMonad()
        case None:
            raise UsageError("give --model or --monad")
    raise UsageError(f"the {args.monad} monad needs --model with its tables")


def _kind(t) -> str:
    return {cm.WriterMonad: "writer", cm.ContinuationMonad: "continuation",
            cm.SemiringMonad: "semiring", cm.IdentityMonad: "identity",
            cm.ListMonad: "list"}.get(type(t), type(t).__name__)


# -------------------------------------------------------------- commands


def _emit(args, data: dict, text: str):
    print(json.dumps(data, indent=2, default=str) if args.json else text)


def run_check(args, cfg):
    th = _theory(args.theory)
    ctx, m = read_judgement(args.term, th)
    try:
        ty = infer(th, ctx, m)
    except TypeCheckError as e:
        _emit(args, {"ok": False, "error": type(e).__name__, "message": str(e)},
              f"ill-typed: {type(e).__name__}: {e}")
        return FAILED
    _emit(args, {"ok": True, "type": pretty_type(ty)}, pretty_type(ty))
    return OK


def run_normalize(args, cfg):
    th = _theory(args.theory)
    ctx, m = read_judgement(args.term, th)
    nf, trace = normalize(th, ctx, m)
    data = {"normal_form": pretty(nf), "steps": len(trace.steps),
            "trace": [s.to_json() for s in trace.steps]}
    text = pretty(nf)
    if args.trace:
        text = trace.to_jsonl() + ("\n" if trace.steps else "") + text
    _emit(args, data, text)
    return OK


def run_eq(args, cfg):
    th = _theory(args.theory)
    ctx, a = read_judgement(args.lhs, th)
    ctx_b, b = read_judgement(args.rhs, th)
    if ctx_b.entries and ctx_b.entries != ctx.entries:
        raise UsageError("both term files must use the same context")
    oracle = load_model(args.model, th, cfg.size_cap) if args.model else None
    v = decide_equal(th, ctx, a, b, budget=cfg.budget, oracle=oracle)
    text = str(v)
    if v.trace is not None and v.kind == "Equal":
        text += "\n" + v.trace.to_jsonl()
    _emit(args, v.to_json(), text)
    return {"Equal": OK, "Distinct": FAILED}.get(v.kind, UNKNOWN)


def run_eval(args, cfg):
    th = _theory(args.theory)
    ctx, m = read_judgement(args.term, th)
    model = load_model(args.model, th, cfg.size_cap)
    f = interpret_term(model, th, ctx, m)
    rows = []
    for env in range(f.dom.size):
        rows.append({"env": f.dom.label(env), "value": f.cod.label(f.table[env])})
    text = "\n".join(r["value"] if not ctx.entries else f"{r['env']} -> {r['value']}" for r in rows)
    _emit(args, {"type": pretty_type(infer(th, ctx, m)), "values": rows}, text)
    return OK


def run_centre(args, cfg):
    t = _monad(args, cfg)
    res = cm.centre_at(t, sized(args.base_size), cm.test_objects(cfg.test_object_sizes))
    data = res.to_json()
    text = (f"centre at |X|={args.base_size}: {len(res.elements)} of {res.inclusion.cod.size} "
            f"elements{'' if res.stable else ' (unstable over test sizes)'}\n"
            + "\n".join(res.labels()))
    _emit(args, data, text)
    return OK


def run_verify_laws(args, cfg):
    t = _monad(args, cfg)
    report = cm.check_monad_laws(t, [sized(n) for n in range(args.max_size + 1)], seed=cfg.seed)
    _emit(args, report.to_json(), str(report))
    if report.failures:
        return FAILED
    return OK if report.exhaustive else UNKNOWN


def run_verify_iso(args, cfg):
    t = _monad(args, cfg)
    rep = cm.verify_centre_iso(t, sized(args.x), sized(args.y),
                               test_objects=cm.test_objects(cfg.test_object_sizes))
    _emit(args, rep.to_json(), str(rep))
    return OK if rep.ok else FAILED


def run_soundness(args, cfg):
    th = _theory(args.theory)
    model = load_model(args.model, th, cfg.size_cap)
    rep = check_model_soundness(model, th, args.fuzz, cfg.seed)
    _emit(args, rep.to_json(), str(rep))
    return OK if rep.ok else FAILED


def run_translate_check(args, cfg):
    v = load_translation(args.translation)
    oracle = load_model(args.model, v.target, cfg.size_cap) if args.model else None
    res = check_translation(v, budget=cfg.budget, oracle=oracle)
    at = str(res.at) if res.at is not None else None
    _emit(args, {"status": res.status, "at": at, "detail": res.detail}, str(res))
    return {"Verified": OK, "FailedAt": FAILED}.get(res.status, UNKNOWN)


def run_d4_demo(args, cfg):
    rep = cm.d4_noncentralisable_witness()
    _emit(args, rep.to_json(), str(rep))
    return OK if rep.obstruction else FAILED


COMMANDS = {
    "check": run_check, "normalize": run_normalize, "eq": run_eq, "eval": run_eval,
    "centre": run_centre, "verify-laws": run_verify_laws, "verify-iso": run_verify_iso,
    "soundness": run_soundness, "translate-check": run_translate_check, "d4-demo": run_d4_demo,
}


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig(getattr(args, "theory", None), getattr(args, "model", None),
                        args.budget, args.size_cap, args.test_sizes, args.seed)
        return COMMANDS[args.command](args, cfg)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except UsageError as e:
        print(f"csc: {e}", file=sys.stderr)
        return USAGE
    except (OSError, TheoryError, ParseError, ModelError, TypeCheckError, SizeBlowup, ValueError) as e:
        print(f"csc: {type(e).__name__}: {e}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
