"""Terms of the lambda-calculus with explicit substitutions.

The term grammar is

    t ::= x | \\x.t | t t | t[x\\u] | bot

where ``t[x\\u]`` is an explicit (delayed) substitution binding ``x`` in
``t``, and ``bot`` is the partial-term constant standing for an
unevaluated or discarded fragment.  Terms with no ``bot`` are called
total; terms with no explicit substitution are called pure.

Contexts are terms with exactly one occurrence of the hole ``@``.
Plugging a term into a context is literal replacement: the context may
capture free variables of the plugged term, which is deliberate.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterator, Union

# Levels: a natural number or omega.  float('inf') gives us the right
# ordering and the right arithmetic (omega - 1 == omega) for free.
Level = float
OMEGA: Level = float("inf")

CBV = "cbv"
CBN = "cbn"

# Position edges: b = under a binder, l/r = function/argument of an
# application, s/e = body/argument of an explicit substitution.
Position = tuple[str, ...]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Es:
    """Explicit substitution ``body[binder\\arg]``; binder scopes over body."""

    body: "Term"
    binder: str
    arg: "Term"


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Hole:
    pass


Term = Union[Var, Abs, App, Es, Bot, Hole]

BOT = Bot()
HOLE = Hole()


def is_value(t: Term) -> bool:
    """Values are variables and abstractions.  ``bot`` is not a value."""
    return isinstance(t, (Var, Abs))


def is_pure(t: Term) -> bool:
    """True when t contains no explicit substitution and no bot."""
    match t:
        case Var():
            return True
        case Abs(_, b):
            return is_pure(b)
        case App(f, a):
            return is_pure(f) and is_pure(a)
        case _:
            return False


def contains_bot(t: Term) -> bool:
    match t:
        case Bot():
            return True
        case Abs(_, b):
            return contains_bot(b)
        case App(f, a) | Es(f, _, a):
            return contains_bot(f) or contains_bot(a)
        case _:
            return False


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(x):
            return frozenset((x,))
        case Abs(x, b):
            return free_vars(b) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Es(b, x, a):
            return (free_vars(b) - {x}) | free_vars(a)
        case _:
            return frozenset()


def subterms(t: Term) -> Iterator[tuple[Position, Term]]:
    """All subterm occurrences, position-first (outer before inner,
    left before right)."""
    stack: list[tuple[Position, Term]] = [((), t)]
    while stack:
        pos, s = stack.pop()
        yield pos, s
        match s:
            case Abs(_, b):
                stack.append((pos + ("b",), b))
            case App(f, a):
                stack.append((pos + ("r",), a))
                stack.append((pos + ("l",), f))
            case Es(b, _, a):
                stack.append((pos + ("e",), a))
                stack.append((pos + ("s",), b))
            case _:
                pass


def subterm_at(t: Term, pos: Position) -> Term:
    for edge in pos:
        match t, edge:
            case Abs(_, b), "b":
                t = b
            case App(f, _), "l":
                t = f
            case App(_, a), "r":
                t = a
            case Es(b, _, _), "s":
                t = b
            case Es(_, _, a), "e":
                t = a
            case _:
                raise ValueError(f"position {''.join(pos)} not in term")
    return t


def replace_at(t: Term, pos: Position, new: Term) -> Term:
    if not pos:
        return new
    edge, rest = pos[0], pos[1:]
    match t, edge:
        case Abs(x, b), "b":
            return Abs(x, replace_at(b, rest, new))
        case App(f, a), "l":
            return App(replace_at(f, rest, new), a)
        case App(f, a), "r":
            return App(f, replace_at(a, rest, new))
        case Es(b, x, a), "s":
            return Es(replace_at(b, rest, new), x, a)
        case Es(b, x, a), "e":
            return Es(b, x, replace_at(a, rest, new))
        case _:
            raise ValueError(f"position {''.join(pos)} not in term")


def level_of(t: Term, pos: Position, calculus: str) -> Level:
    """Depth of a position in the stratification order of the calculus.

    Call-by-value counts binders crossed on the path; call-by-name
    counts argument edges (of applications and substitutions) crossed.
    """
    subterm_at(t, pos)  # validate
    if calculus == CBV:
        return float(sum(1 for e in pos if e == "b"))
    if calculus == CBN:
        return float(sum(1 for e in pos if e in ("r", "e")))
    raise ValueError(f"unknown calculus {calculus!r}")


def size(t: Term) -> int:
    match t:
        case Abs(_, b):
            return 1 + size(b)
        case App(f, a) | Es(f, _, a):
            return 1 + size(f) + size(a)
        case _:
            return 1


# ---------------------------------------------------------------------------
# Fresh names, substitution, alpha-equality


_FRESH_COUNTER = 0


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    """A name not in avoid, derived from base by appending a counter."""
    global _FRESH_COUNTER
    root = base.rstrip(string.digits) or "v"
    while True:
        _FRESH_COUNTER += 1
        cand = f"{root}{_FRESH_COUNTER}"
        if cand not in avoid:
            return cand


def rename_free(t: Term, old: str, new: str) -> Term:
    """Rename free occurrences of old to new.  new must not be captured."""
    match t:
        case Var(x):
            return Var(new) if x == old else t
        case Abs(x, b):
            return t if x == old else Abs(x, rename_free(b, old, new))
        case App(f, a):
            return App(rename_free(f, old, new), rename_free(a, old, new))
        case Es(b, x, a):
            nb = b if x == old else rename_free(b, old, new)
            return Es(nb, x, rename_free(a, old, new))
        case _:
            return t


def subst(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding meta-level substitution t{x := u}."""
    fv_u = free_vars(u)

    def go(t: Term, bound: frozenset[str]) -> Term:
        match t:
            case Var(y):
                return u if y == x else t
            case Abs(y, b):
                if y == x or x not in free_vars(t):
                    return t
                if y in fv_u:
                    y2 = fresh_name(y, fv_u | free_vars(b) | bound | {x})
                    b = rename_free(b, y, y2)
                    y = y2
                return Abs(y, go(b, bound | {y}))
            case App(f, a):
                return App(go(f, bound), go(a, bound))
            case Es(b, y, a):
                na = go(a, bound)
                if y == x or x not in (free_vars(b) - {y}):
                    return Es(b, y, na)
                if y in fv_u:
                    y2 = fresh_name(y, fv_u | free_vars(b) | bound | {x})
                    b = rename_free(b, y, y2)
                    y = y2
                return Es(go(b, bound | {y}), y, na)
            case _:
                return t

    return go(t, frozenset())


def canonical(t: Term) -> tuple:
    """Nameless canonical form: equal iff the terms are alpha-equal.

    Hashable, so it doubles as a key for cycle detection and memo
    tables.
    """

    def go(t: Term, env: tuple[str, ...]) -> tuple:
        match t:
            case Var(x):
                for i in range(len(env) - 1, -1, -1):
                    if env[i] == x:
                        return ("v", len(env) - 1 - i)
                return ("f", x)
            case Abs(x, b):
                return ("l", go(b, env + (x,)))
            case App(f, a):
                return ("a", go(f, env), go(a, env))
            case Es(b, x, a):
                return ("s", go(b, env + (x,)), go(a, env))
            case Bot():
                return ("bot",)
            case Hole():
                return ("hole",)

    return go(t, ())


def alpha_eq(t: Term, u: Term) -> bool:
    return canonical(t) == canonical(u)


def partial_leq(t: Term, u: Term) -> bool:
    """The approximation order: t is u with some subterms cut to bot.

    Compares up to alpha; bot is below everything, and the order is
    structural everywhere else.
    """

    def go(t: Term, u: Term, env: tuple[tuple[str, str], ...]) -> bool:
        if isinstance(t, Bot):
            return True
        match t, u:
            case Var(x), Var(y):
                for a, b in reversed(env):
                    if a == x or b == y:
                        return a == x and b == y
                return x == y
            case Abs(x, tb), Abs(y, ub):
                return go(tb, ub, env + ((x, y),))
            case App(tf, ta), App(uf, ua):
                return go(tf, uf, env) and go(ta, ua, env)
            case Es(tb, x, ta), Es(ub, y, ua):
                return go(tb, ub, env + ((x, y),)) and go(ta, ua, env)
            case _:
                return False

    return go(t, u, ())


def bot_positions(t: Term) -> list[Position]:
    return [pos for pos, s in subterms(t) if isinstance(s, Bot)]


# ---------------------------------------------------------------------------
# Contexts


def hole_positions(t: Term) -> list[Position]:
    return [pos for pos, s in subterms(t) if isinstance(s, Hole)]


def is_context(t: Term) -> bool:
    return len(hole_positions(t)) == 1


def plug(ctx: Term, t: Term) -> Term:
    """Replace the unique hole of ctx by t.  Capture is allowed: plugging
    is literal, not substitution."""
    holes = hole_positions(ctx)
    if len(holes) != 1:
        raise ValueError(f"context must have exactly one hole, found {len(holes)}")
    return replace_at(ctx, holes[0], t)


# ---------------------------------------------------------------------------
# Parsing

_IDENT_START = set(string.ascii_letters + "_")
_IDENT_CHARS = set(string.ascii_letters + string.digits + "_'")


class ParseError(ValueError):
    def __init__(self, msg: str, offset: int):
        super().__init__(f"{msg} (at offset {offset})")
        self.offset = offset


class _Parser:
    def __init__(self, text: str, allow_hole: bool):
        self.text = text
        self.pos = 0
        self.allow_hole = allow_hole

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def ident(self) -> str:
        self.skip_ws()
        if self.peek() not in _IDENT_START:
            raise self.error("expected identifier")
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in _IDENT_CHARS:
            self.pos += 1
        name = self.text[start : self.pos]
        if name == "bot":
            self.pos = start
            raise self.error("'bot' is a reserved word")
        return name

    def term(self) -> Term:
        self.skip_ws()
        if self.peek() == "\\":
            self.pos += 1
            x = self.ident()
            self.expect(".")
            return Abs(x, self.term())
        return self.app()

    def app(self) -> Term:
        t = self.postfix()
        while True:
            self.skip_ws()
            c = self.peek()
            if c == "\\":
                # an abstraction in argument position extends to the right
                t = App(t, self.term())
                return t
            if c in _IDENT_START or c == "(" or (c == "@" and self.allow_hole):
                t = App(t, self.postfix())
            else:
                return t

    def postfix(self) -> Term:
        t = self.atom()
        while True:
            self.skip_ws()
            if self.peek() == "[":
                self.pos += 1
                x = self.ident()
                self.expect("\\")
                body = self.term()
                self.expect("]")
                t = Es(t, x, body)
            else:
                return t

    def atom(self) -> Term:
        self.skip_ws()
        c = self.peek()
        if c == "(":
            self.pos += 1
            t = self.term()
            self.expect(")")
            return t
        if c == "@":
            if not self.allow_hole:
                raise self.error("hole not allowed here")
            self.pos += 1
            return HOLE
        if c in _IDENT_START:
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] in _IDENT_CHARS:
                self.pos += 1
            name = self.text[start : self.pos]
            return BOT if name == "bot" else Var(name)
        raise self.error("expected a term")


def parse(text: str, allow_hole: bool = False) -> Term:
    p = _Parser(text, allow_hole)
    t = p.term()
    p.skip_ws()
    if p.pos != len(text):
        raise p.error("trailing input")
    return t


def parse_context(text: str) -> Term:
    c = parse(text, allow_hole=True)
    if not is_context(c):
        raise ValueError("a context must contain exactly one hole '@'")
    return c


def parse_level(text: str) -> Level:
    if text == "omega":
        return OMEGA
    if text.isdigit():
        return float(int(text))
    raise ValueError(f"level must be a natural number or 'omega', got {text!r}")


def show_level(k: Level) -> str:
    return "omega" if k == OMEGA else str(int(k))


# ---------------------------------------------------------------------------
# Printing


def _rename_binders(t: Term) -> Term:
    """Rename binders to x0, x1, ... in traversal order, skipping any
    names already free in the term."""
    taken = set(free_vars(t))
    counter = 0

    def next_name() -> str:
        nonlocal counter
        while True:
            cand = f"x{counter}"
            counter += 1
            if cand not in taken:
                taken.add(cand)
                return cand

    def go(t: Term) -> Term:
        match t:
            case Abs(x, b):
                x2 = next_name()
                return Abs(x2, go(rename_free(b, x, x2)))
            case App(f, a):
                return App(go(f), go(a))
            case Es(b, x, a):
                x2 = next_name()
                return Es(go(rename_free(b, x, x2)), x2, go(a))
            case _:
                return t

    return go(t)


def _text(t: Term, prec: int) -> str:
    # prec 0: term, 1: application element (function side),
    # 2: atom (argument side or substitution target)
    match t:
        case Var(x):
            return x
        case Bot():
            return "bot"
        case Hole():
            return "@"
        case Abs(x, b):
            s = f"\\{x}.{_text(b, 0)}"
            return f"({s})" if prec > 0 else s
        case App(f, a):
            s = f"{_text(f, 1)} {_text(a, 2)}"
            return f"({s})" if prec > 1 else s
        case Es(b, x, a):
            return f"{_text(b, 2)}[{x}\\{_text(a, 0)}]"


def show(t: Term, rename: bool = True) -> str:
    """Render a term in the concrete syntax accepted by parse.

    With rename (the default) binders are canonically named x0, x1, ...
    so that alpha-equal terms print identically.
    """
    if rename:
        t = _rename_binders(t)
    return _text(t, 0)


# Common combinators, mostly for tests and the CLI docs.
def ID() -> Term:
    return Abs("z", Var("z"))


def DELTA() -> Term:
    return Abs("w", App(Var("w"), Var("w")))


def OMEGA_TERM() -> Term:
    return App(DELTA(), DELTA())
