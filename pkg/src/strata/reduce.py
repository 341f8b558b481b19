"""Stratified reduction for both calculi.

Two rewrite rules per calculus, both applied at a distance through a
list context L of explicit substitutions:

  shared   dB : L<\\x.s> t      -> L< s[x\\t] >
  cbv      sv : t[x\\L<v>]      -> L< t{x:=v} >   (v a value)
  cbn      sN : t[x\\u]         -> t{x:=u}

A redex occurrence is gated by its level: the depth of its position in
the stratification order of the calculus (binders crossed for
call-by-value, argument edges crossed for call-by-name).  Reduction at
level k contracts only redexes whose level is at most k; level omega
lifts the gate entirely.

The default strategy is leftmost-outermost: the redex whose position
comes first in the pre-order traversal.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .terms import (
    CBN,
    CBV,
    Abs,
    App,
    Es,
    Level,
    Position,
    Term,
    canonical,
    free_vars,
    fresh_name,
    is_value,
    level_of,
    parse,
    rename_free,
    replace_at,
    show,
    show_level,
    subst,
    subterm_at,
    subterms,
)

DB = "dB"
SV = "sv"
SN = "sN"
BETA_V = "betav"

DEFAULT_FUEL = 10_000


def default_fuel() -> int:
    env = os.environ.get("STRATA_FUEL")
    return int(env) if env else DEFAULT_FUEL


@dataclass(frozen=True)
class Redex:
    position: Position
    rule: str
    level: Level


@dataclass(frozen=True)
class Step:
    before: Term
    after: Term
    position: Position
    rule: str
    level: Level


def _peel_es_spine(t: Term) -> tuple[list[tuple[str, Term]], Term]:
    """Split t = L<core> along the explicit-substitution body spine into
    (binder, argument) pairs, outermost first, and the core."""
    spine: list[tuple[str, Term]] = []
    while isinstance(t, Es):
        spine.append((t.binder, t.arg))
        t = t.body
    return spine, t


def _rule_at(t: Term, calculus: str) -> str | None:
    """The rule (if any) whose left-hand side matches at the root of t."""
    match t:
        case App(f, _):
            _, core = _peel_es_spine(f)
            return DB if isinstance(core, Abs) else None
        case Es(_, _, a):
            if calculus == CBN:
                return SN
            _, core = _peel_es_spine(a)
            return SV if is_value(core) else None
        case _:
            return None


def find_redexes(t: Term, calculus: str, level: Level) -> list[Redex]:
    """All redexes gated at the given level, leftmost-outermost first."""
    out = []
    for pos, s in subterms(t):
        rule = _rule_at(s, calculus)
        if rule is not None:
            lvl = level_of(t, pos, calculus)
            if lvl <= level:
                out.append(Redex(pos, rule, lvl))
    return out


def min_redex_level(t: Term, calculus: str) -> Level | None:
    """The smallest level at which t has a redex, or None if t is normal
    even at level omega."""
    best: Level | None = None
    for pos, s in subterms(t):
        if _rule_at(s, calculus) is not None:
            lvl = level_of(t, pos, calculus)
            if best is None or lvl < best:
                best = lvl
    return best


def _rebuild_spine(spine: list[tuple[str, Term]], core: Term) -> Term:
    for binder, arg in reversed(spine):
        core = Es(core, binder, arg)
    return core


def _freshen_spine(
    spine: list[tuple[str, Term]], core: Term, incoming: frozenset[str]
) -> tuple[list[tuple[str, Term]], Term]:
    """Rename spine binders that clash with incoming free variables.

    spine[i]'s binder scopes over spine[j] for j > i (arguments
    included) and over the core, stopping at a shadowing binder."""
    spine = list(spine)
    avoid = set(incoming) | {x for x, _ in spine} | set(free_vars(core))
    for _, a in spine:
        avoid |= free_vars(a)
    for i, (x, a) in enumerate(spine):
        if x not in incoming:
            continue
        x2 = fresh_name(x, frozenset(avoid))
        avoid.add(x2)
        spine[i] = (x2, a)
        shadowed = False
        for j in range(i + 1, len(spine)):
            yj, aj = spine[j]
            spine[j] = (yj, rename_free(aj, x, x2))
            if yj == x:
                shadowed = True
                break
        if not shadowed:
            core = rename_free(core, x, x2)
    return spine, core


def _contract(t: Term, rule: str, calculus: str) -> Term:
    """Contract the root redex of t.  Raises if the rule does not match."""
    match rule, t:
        case "dB", App(f, a):
            spine, core = _peel_es_spine(f)
            if not isinstance(core, Abs):
                raise ValueError("dB redex expected")
            # a moves under the spine binders: rename clashes first
            spine, core = _freshen_spine(spine, core, free_vars(a))
            assert isinstance(core, Abs)
            return _rebuild_spine(spine, Es(core.body, core.binder, a))
        case "sv", Es(b, x, arg):
            spine, v = _peel_es_spine(arg)
            if not is_value(v):
                raise ValueError("sv redex expected")
            # b moves under the spine binders
            spine, v = _freshen_spine(spine, v, free_vars(b) - {x})
            return _rebuild_spine(spine, subst(b, x, v))
        case "sN", Es(b, x, arg):
            return subst(b, x, arg)
        case _:
            raise ValueError(f"rule {rule} does not match at the root")


def apply_step(t: Term, redex: Redex, calculus: str) -> Step:
    """Contract one redex occurrence; re-validates the match first."""
    sub = subterm_at(t, redex.position)
    rule = _rule_at(sub, calculus)
    if rule != redex.rule:
        raise ValueError(
            f"no {redex.rule} redex at position {''.join(redex.position) or 'root'}"
        )
    after = replace_at(t, redex.position, _contract(sub, rule, calculus))
    return Step(t, after, redex.position, rule, redex.level)


def reduce_once(t: Term, calculus: str, level: Level) -> Step | None:
    """One leftmost-outermost step at the given level, or None if normal."""
    redexes = find_redexes(t, calculus, level)
    if not redexes:
        return None
    return apply_step(t, redexes[0], calculus)


@dataclass(frozen=True)
class Trace:
    """Outcome of a bounded normalization run.

    outcome is one of "normal", "cycle", "fuel"; for a cycle,
    cycle_start is the index of the first occurrence of the repeated
    term in the sequence start, steps[0].after, steps[1].after, ...
    """

    start: Term
    calculus: str
    level: Level
    steps: tuple[Step, ...]
    outcome: str
    cycle_start: int | None = None

    @property
    def final(self) -> Term:
        return self.steps[-1].after if self.steps else self.start


def normalize(t: Term, calculus: str, level: Level, fuel: int | None = None) -> Trace:
    """Reduce with the leftmost-outermost strategy until a normal form,
    a repeated term (up to alpha), or fuel exhaustion."""
    if fuel is None:
        fuel = default_fuel()
    seen = {canonical(t): 0}
    steps: list[Step] = []
    cur = t
    for _ in range(fuel):
        step = reduce_once(cur, calculus, level)
        if step is None:
            return Trace(t, calculus, level, tuple(steps), "normal")
        steps.append(step)
        cur = step.after
        key = canonical(cur)
        if key in seen:
            return Trace(t, calculus, level, tuple(steps), "cycle", seen[key])
        seen[key] = len(steps)
    return Trace(t, calculus, level, tuple(steps), "fuel")


# ---------------------------------------------------------------------------
# The pure call-by-value fragment (no explicit substitutions): plain
# beta on value arguments, never under a binder.


def plotkin_redexes(t: Term) -> list[Redex]:
    out = []
    for pos, s in subterms(t):
        if "b" in pos:
            continue
        match s:
            case App(Abs(_, _), a) if is_value(a):
                out.append(Redex(pos, BETA_V, 0.0))
            case _:
                pass
    return out


def plotkin_normalize(t: Term, fuel: int | None = None) -> Trace:
    if fuel is None:
        fuel = default_fuel()
    seen = {canonical(t): 0}
    steps: list[Step] = []
    cur = t
    for _ in range(fuel):
        redexes = plotkin_redexes(cur)
        if not redexes:
            return Trace(t, CBV, 0.0, tuple(steps), "normal")
        pos = redexes[0].position
        sub = subterm_at(cur, pos)
        assert isinstance(sub, App) and isinstance(sub.fun, Abs)
        after = replace_at(cur, pos, subst(sub.fun.body, sub.fun.binder, sub.arg))
        steps.append(Step(cur, after, pos, BETA_V, 0.0))
        cur = after
        key = canonical(cur)
        if key in seen:
            return Trace(t, CBV, 0.0, tuple(steps), "cycle", seen[key])
        seen[key] = len(steps)
    return Trace(t, CBV, 0.0, tuple(steps), "fuel")


# ---------------------------------------------------------------------------
# Serialization


def step_to_dict(s: Step) -> dict:
    return {
        "before": show(s.before),
        "after": show(s.after),
        "position": "".join(s.position),
        "rule": s.rule,
        "level": show_level(s.level),
    }


def trace_to_dict(tr: Trace) -> dict:
    d = {
        "start": show(tr.start),
        "calculus": tr.calculus,
        "level": show_level(tr.level),
        "outcome": tr.outcome,
        "final": show(tr.final),
        "steps": [step_to_dict(s) for s in tr.steps],
    }
    if tr.cycle_start is not None:
        d["cycle_start"] = tr.cycle_start
    return d


def step_from_dict(d: dict, calculus: str) -> Step:
    before = parse(d["before"])
    pos = tuple(d["position"])
    redexes = {r.position: r for r in find_redexes(before, calculus, float("inf"))}
    if pos not in redexes or redexes[pos].rule != d["rule"]:
        raise ValueError("recorded step does not match a redex of its term")
    step = apply_step(before, redexes[pos], calculus)
    return step
