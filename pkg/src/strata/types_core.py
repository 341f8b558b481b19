"""Quantitative (non-idempotent intersection) types and derivations.

Two systems share the syntax of types:

  system V (call-by-value):  sigma ::= alpha | M | M -> sigma
  system N (call-by-name):   sigma ::= alpha | M -> sigma

where M is a finite multiset of types.  Multisets are kept in a sorted
canonical form so that structural equality is multiset equality.

A derivation is a tree of judgments env |- term : type, one node per
rule instance.  Typing environments map variables to multisets; a
variable absent from the environment carries the empty multiset.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Union

from .terms import Term, parse, show

SYS_V = "V"
SYS_N = "N"


@dataclass(frozen=True)
class TyVar:
    name: str


@dataclass(frozen=True)
class Mult:
    items: tuple["Ty", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(sorted(self.items, key=ty_key)))

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class Arrow:
    src: Mult
    tgt: "Ty"


Ty = Union[TyVar, Mult, Arrow]

def ty_key(t: Ty) -> tuple:
    match t:
        case TyVar(n):
            return (0, n)
        case Mult(items):
            return (1, tuple(ty_key(i) for i in items))
        case Arrow(src, tgt):
            return (2, ty_key(src), ty_key(tgt))


EMPTY = Mult(())


def mult_sum(*ms: Mult) -> Mult:
    items: tuple[Ty, ...] = ()
    for m in ms:
        items += m.items
    return Mult(items)

def mult_minus(a: Mult, b: Mult) -> Mult:
    """Multiset difference; b must be included in a."""
    items = list(a.items)
    for x in b.items:
        items.remove(x)  # raises ValueError if not included
    return Mult(tuple(items))


def valid_ty(t: Ty, system: str) -> bool:
    """Shape check: system N forbids bare multisets as judgment types."""
    match t:
        case TyVar(_):
            return True
        case Mult(items):
            if system == SYS_N:
                return False
            return all(valid_ty(i, system) for i in items)
        case Arrow(src, tgt):
            return all(valid_ty(i, system) for i in src.items) and valid_ty(tgt, system)


# ---------------------------------------------------------------------------
# Environments: dict[str, Mult], empty entries dropped


Env = dict[str, Mult]


def env_norm(env: Env) -> Env:
    return {k: v for k, v in sorted(env.items()) if v.items}


def env_sum(*envs: Env) -> Env:
    out: dict[str, Mult] = {}
    for env in envs:
        for k, v in env.items():
            out[k] = mult_sum(out[k], v) if k in out else v
    return env_norm(out)


def env_eq(a: Env, b: Env) -> bool:
    return env_norm(a) == env_norm(b)


def env_minus(env: Env, x: str) -> tuple[Mult, Env]:
    """The multiset assigned to x, and the environment without x."""
    return env.get(x, EMPTY), {k: v for k, v in env.items() if k != x}


# ---------------------------------------------------------------------------
# Derivations


@dataclass(frozen=True)
class Derivation:
    rule: str  # var | abs | app | es
    env: tuple[tuple[str, Mult], ...]
    term: Term
    ty: Ty
    premises: tuple["Derivation", ...] = ()

    @property
    def env_dict(self) -> Env:
        return dict(self.env)


def mk(rule: str, env: Env, term: Term, ty: Ty,
       premises: tuple[Derivation, ...] = ()) -> Derivation:
    return Derivation(rule, tuple(sorted(env_norm(env).items())), term, ty, premises)


# ---------------------------------------------------------------------------
# Concrete syntax for types: alpha | [t1, t2, ...] | [..] -> t


class TyParseError(ValueError):
    pass


def parse_ty(text: str) -> Ty:
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def atom() -> Ty:
        nonlocal pos
        skip()
        if pos < len(text) and text[pos] == "[":
            pos += 1
            items = []
            skip()
            if pos < len(text) and text[pos] == "]":
                pos += 1
            else:
                while True:
                    items.append(ty())
                    skip()
                    if pos < len(text) and text[pos] == ",":
                        pos += 1
                        continue
                    if pos < len(text) and text[pos] == "]":
                        pos += 1
                        break
                    raise TyParseError(f"expected ',' or ']' at offset {pos}")
            return Mult(tuple(items))
        if pos < len(text) and text[pos] == "(":
            pos += 1
            t = ty()
            skip()
            if pos >= len(text) or text[pos] != ")":
                raise TyParseError(f"expected ')' at offset {pos}")
            pos += 1
            return t
        start = pos
        while pos < len(text) and (text[pos] in string.ascii_letters + string.digits + "_'"):
            pos += 1
        if pos == start:
            raise TyParseError(f"expected a type at offset {pos}")
        return TyVar(text[start:pos])

    def ty() -> Ty:
        nonlocal pos
        left = atom()
        skip()
        if text[pos : pos + 2] == "->":
            pos += 2
            if not isinstance(left, Mult):
                raise TyParseError("arrow source must be a multiset")
            return Arrow(left, ty())
        return left

    t = ty()
    skip()
    if pos != len(text):
        raise TyParseError(f"trailing input at offset {pos}")
    return t


def show_ty(t: Ty) -> str:
    match t:
        case TyVar(n):
            return n
        case Mult(items):
            return "[" + ", ".join(show_ty(i) for i in items) + "]"
        case Arrow(src, tgt):
            return f"{show_ty(src)} -> {show_ty(tgt)}"


def deriv_to_dict(d: Derivation) -> dict:
    return {
        "rule": d.rule,
        "env": {k: show_ty(v) for k, v in d.env},
        "term": show(d.term, rename=False),
        "type": show_ty(d.ty),
        "premises": [deriv_to_dict(p) for p in d.premises],
    }


def deriv_from_dict(obj: dict) -> Derivation:
    env = {}
    for k, v in obj.get("env", {}).items():
        m = parse_ty(v)
        if not isinstance(m, Mult):
            raise TyParseError(f"environment entry for {k} must be a multiset")
        env[k] = m
    return mk(
        obj["rule"],
        env,
        parse(obj["term"]),
        parse_ty(obj["type"]),
        tuple(deriv_from_dict(p) for p in obj.get("premises", [])),
    )
