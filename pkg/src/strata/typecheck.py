"""Derivation checking and synthesis for the two quantitative systems.

System V (call-by-value) rules, with + for environment/multiset sum:

  var  x:M |- x : M
  abs  (G_i ; x:M_i |- t : s_i) for i in I   =>  +G_i |- \\x.t : [M_i -> s_i]_I
  app  G |- t : [M -> s]    D |- u : M       =>  G + D |- t u : s
  es   G ; x:M |- t : s     D |- u : M       =>  G + D |- t[x\\u] : s

The abs family may be empty: every abstraction types with [].

System N (call-by-name) rules:

  var  x:[s] |- x : s
  abs  G ; x:M |- t : s                      =>  G |- \\x.t : M -> s
  app  G |- t : [s_i]_I -> s   (D_i |- u : s_i)_I  =>  G + D_i... |- t u : s
  es   G ; x:[s_i]_I |- t : s  (D_i |- u : s_i)_I  =>  ...       |- t[x\\u] : s

Arguments in N carry one premise per multiset element, possibly none.
"""

from __future__ import annotations

import itertools

from .terms import Abs, App, Es, Term, Var, show
from .nf import classify_nf, NOT_NF
from .terms import CBN, CBV
from .types_core import (
    EMPTY,
    Arrow,
    Derivation,
    Mult,
    SYS_N,
    SYS_V,
    Ty,
    TyVar,
    env_eq,
    env_minus,
    env_sum,
    mk,
    show_ty,
    valid_ty,
)

SYSTEM_OF = {CBV: SYS_V, CBN: SYS_N}


# ---------------------------------------------------------------------------
# Checking


def check_derivation(d: Derivation, system: str) -> list[str]:
    """All violations in the derivation tree; empty means valid."""
    errors: list[str] = []

    def fail(path: str, msg: str):
        errors.append(f"{path or 'root'}: {msg}")

    def multiset_matches(family: tuple[Derivation, ...], binder: str, want: Mult) -> bool:
        got = Mult(tuple(Arrow(p.env_dict.get(binder, EMPTY), p.ty) for p in family))
        return got == want

    def go(d: Derivation, path: str):
        env = d.env_dict
        if not valid_ty(d.ty, system):
            fail(path, f"type {show_ty(d.ty)} is not a {system} judgment type")
        match d.rule, d.term:
            case "var", Var(x):
                if d.premises:
                    fail(path, "var takes no premises")
                if system == SYS_V:
                    if not isinstance(d.ty, Mult):
                        fail(path, "a variable types with a multiset")
                    want = {x: d.ty} if isinstance(d.ty, Mult) else {}
                else:
                    want = {x: Mult((d.ty,))}
                if not env_eq(env, want):
                    fail(path, "var environment must carry exactly its own demand")
            case "abs", Abs(x, b):
                for i, p in enumerate(d.premises):
                    if p.term != b:
                        fail(path, f"premise {i} does not type the body")
                if system == SYS_V:
                    if not isinstance(d.ty, Mult) or not all(
                        isinstance(i, Arrow) for i in d.ty.items
                    ):
                        fail(path, "an abstraction types with a multiset of arrows")
                    elif not multiset_matches(d.premises, x, d.ty):
                        fail(path, "premise family does not realize the multiset")
                    if not env_eq(env, env_sum(*(env_minus(p.env_dict, x)[1] for p in d.premises))):
                        fail(path, "environment is not the sum of the premises")
                else:
                    if len(d.premises) != 1:
                        fail(path, "abs takes exactly one premise")
                    else:
                        p = d.premises[0]
                        m, rest = env_minus(p.env_dict, x)
                        if d.ty != Arrow(m, p.ty):
                            fail(path, "conclusion type must be M -> s from the premise")
                        if not env_eq(env, rest):
                            fail(path, "environment must be the premise's minus the binder")
            case "app", App(f, a):
                go_app_like(d, path, f, a, binder=None)
            case "es", Es(b, x, a):
                go_app_like(d, path, b, a, binder=x)
            case rule, _:
                fail(path, f"rule {rule} does not match the term shape")
            # fallthrough: premises recursed below
        for i, p in enumerate(d.premises):
            go(p, f"{path}.{i}" if path else str(i))

    def go_app_like(d: Derivation, path: str, left: Term, right: Term, binder: str | None):
        env = d.env_dict
        if not d.premises:
            fail(path, "missing premises")
            return
        head = d.premises[0]
        if head.term != left:
            fail(path, "first premise types the wrong term")
        if binder is not None and head.ty != d.ty:
            fail(path, "substitution preserves the type of its body")
        if system == SYS_V:
            if len(d.premises) != 2:
                fail(path, "takes exactly two premises")
                return
            arg = d.premises[1]
            if arg.term != right:
                fail(path, "second premise types the wrong term")
            if not isinstance(arg.ty, Mult):
                fail(path, "argument premise must type with a multiset")
                return
            if binder is None:
                if head.ty != Mult((Arrow(arg.ty, d.ty),)):
                    fail(path, "head must type with the singleton [M -> s]")
                if not env_eq(env, env_sum(head.env_dict, arg.env_dict)):
                    fail(path, "environment is not the sum of the premises")
            else:
                m, rest = env_minus(head.env_dict, binder)
                if arg.ty != m:
                    fail(path, "argument multiset must match the binder's demand")
                if not env_eq(env, env_sum(rest, arg.env_dict)):
                    fail(path, "environment is not the sum of the premises")
        else:
            args = d.premises[1:]
            for i, p in enumerate(args):
                if p.term != right:
                    fail(path, f"argument premise {i} types the wrong term")
            got = Mult(tuple(p.ty for p in args))
            if binder is None:
                if not isinstance(head.ty, Arrow):
                    fail(path, "head must type with an arrow")
                    return
                if head.ty.src != got or head.ty.tgt != d.ty:
                    fail(path, "argument family does not realize the arrow source")
                rest = head.env_dict
            else:
                m, rest = env_minus(head.env_dict, binder)
                if m != got:
                    fail(path, "argument family does not realize the binder's demand")
            if not env_eq(env, env_sum(rest, *(p.env_dict for p in args))):
                fail(path, "environment is not the sum of the premises")

    go(d, "")
    return errors


# ---------------------------------------------------------------------------
# Synthesis for level-0 normal forms


class NotTypable(ValueError):
    pass


_FRESH_TY = itertools.count()


def fresh_tyvar() -> TyVar:
    return TyVar(f"a{next(_FRESH_TY)}")


def _synth_v(t: Term, demand: Ty) -> Derivation:
    """System V: give t the demanded type, driving demands top down.

    Sound on level-0 call-by-value normal forms: neutral spines end in
    a variable (which absorbs any demand) and abstractions are only
    ever demanded the empty multiset, typing with an empty family.
    """
    match t:
        case Var(x):
            if not isinstance(demand, Mult):
                raise NotTypable("variables type with multisets")
            return mk("var", {x: demand}, t, demand)
        case Abs(_, _):
            if demand != EMPTY:
                raise NotTypable(f"cannot push demand {show_ty(demand)} into an abstraction")
            return mk("abs", {}, t, EMPTY)
        case App(f, a):
            df = _synth_v(f, Mult((Arrow(EMPTY, demand),)))
            da = _synth_v(a, EMPTY)
            return mk("app", env_sum(df.env_dict, da.env_dict), t, demand, (df, da))
        case Es(b, x, a):
            db = _synth_v(b, demand)
            m, rest = env_minus(db.env_dict, x)
            da = _synth_v(a, m)
            return mk("es", env_sum(rest, da.env_dict), t, demand, (db, da))
        case _:
            raise NotTypable(f"{show(t)} is not typable")


def _synth_n(t: Term) -> Derivation:
    """System N: type a level-0 call-by-name normal form.

    Abstractions are synthesized bottom up; a neutral spine is given an
    arrow chain of empty sources ending in a fresh type variable, so
    the arguments need no derivation at all.
    """

    def neutral(t: Term, demand: Ty) -> Derivation:
        match t:
            case Var(x):
                return mk("var", {x: Mult((demand,))}, t, demand)
            case App(f, a):
                df = neutral(f, Arrow(EMPTY, demand))
                return mk("app", df.env_dict, t, demand, (df,))
            case _:
                raise NotTypable(f"{show(t)} is not a neutral term")

    match t:
        case Abs(x, b):
            db = _synth_n(b)
            m, rest = env_minus(db.env_dict, x)
            return mk("abs", rest, t, Arrow(m, db.ty), (db,))
        case _:
            return neutral(t, fresh_tyvar())


def synth_nf_derivation(t: Term, calculus: str) -> Derivation:
    """A derivation for a level-0 normal form of the calculus."""
    if classify_nf(t, calculus, 0.0) == NOT_NF:
        raise NotTypable(f"{show(t)} is not a level-0 normal form")
    if calculus == CBV:
        return _synth_v(t, EMPTY)
    return _synth_n(t)
