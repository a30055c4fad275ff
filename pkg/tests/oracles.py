"""Independent reference implementations used as test oracles.

Only the syntax-tree classes are shared with the package; evaluation,
legality, game solving and function evaluation are written again here,
as directly as possible, so that agreement means something.
"""

from __future__ import annotations

import math
from functools import lru_cache

from clarith.syntax import (
    And,
    App,
    AppendBit,
    ChAll,
    ChAnd,
    ChEx,
    ChOr,
    Eq,
    Exists,
    ForAll,
    Imp,
    Len,
    Leq,
    Not,
    Num,
    Or,
    Plus,
    Succ,
    Times,
    Var,
    Zero,
)

# ------------------------------------------------------------------ numbers


def bit_size(n: int) -> int:
    """|n| = ceil(log2(n + 1)), computed with floating point for small n."""
    return math.ceil(math.log2(n + 1)) if n < 2**40 else n.bit_length()


def term_value(t, env: dict) -> int:
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Succ):
        return term_value(t.t, env) + 1
    if isinstance(t, Plus):
        return term_value(t.l, env) + term_value(t.r, env)
    if isinstance(t, Times):
        return term_value(t.l, env) * term_value(t.r, env)
    if isinstance(t, AppendBit):
        return 2 * term_value(t.t, env) + t.bit
    if isinstance(t, Len):
        return bit_size(term_value(t.t, env))
    if isinstance(t, App) and t.fn == "exp":
        return 2 ** term_value(t.args[0], env)
    raise TypeError(t)


def holds(f, env: dict, cap: int = 16) -> bool:
    """Truth of an elementary formula; classical quantifiers range over 0..cap."""
    if isinstance(f, Eq):
        return term_value(f.l, env) == term_value(f.r, env)
    if isinstance(f, Leq):
        return term_value(f.l, env) <= term_value(f.r, env)
    if isinstance(f, Not):
        return not holds(f.f, env, cap)
    if isinstance(f, And):
        return holds(f.l, env, cap) and holds(f.r, env, cap)
    if isinstance(f, Or):
        return holds(f.l, env, cap) or holds(f.r, env, cap)
    if isinstance(f, Imp):
        return (not holds(f.l, env, cap)) or holds(f.r, env, cap)
    if isinstance(f, ForAll):
        return all(holds(f.body, {**env, f.var: v}, cap) for v in range(cap + 1))
    if isinstance(f, Exists):
        return any(holds(f.body, {**env, f.var: v}, cap) for v in range(cap + 1))
    raise TypeError(f"not elementary: {f}")


# ------------------------------------------------------------------ games
#
# A position is a formula plus an environment of bound values.  Instead of
# substituting numerals, chosen values live in the environment, which is
# an independent route to the same semantics.


def _flatten(f, env):
    """Freeze a (formula, env) pair into a hashable key."""
    return (f, tuple(sorted(env.items())))


def _successors(f, env, player, cap, positive=True):
    """All (formula, env) results of one move by ``player`` ('T' or 'B')."""
    if isinstance(f, (ChAnd, ChOr, ChAll, ChEx)):
        env_owned = isinstance(f, (ChAnd, ChAll))
        mover = "B" if env_owned == positive else "T"
        if mover != player:
            return []
        if isinstance(f, (ChAnd, ChOr)):
            return [(f.l, env), (f.r, env)]
        return [(f.body, {**env, f.var: v}) for v in range(cap + 1)]
    if isinstance(f, Not):
        return [(Not(g), e) for g, e in _successors(f.f, env, player, cap, not positive)]
    if isinstance(f, (And, Or, Imp)):
        lpos = (not positive) if isinstance(f, Imp) else positive
        out = [(type(f)(g, f.r), e) for g, e in _successors(f.l, env, player, cap, lpos)]
        out += [(type(f)(f.l, g), e) for g, e in _successors(f.r, env, player, cap, positive)]
        return out
    return []


def _unresolved_value(f, env, cap):
    """Truth when nobody moves again: choice occurrences go to their non-owner."""
    if isinstance(f, (ChAnd, ChAll)):
        return True
    if isinstance(f, (ChOr, ChEx)):
        return False
    if isinstance(f, Not):
        return not _unresolved_value(f.f, env, cap)
    if isinstance(f, And):
        return _unresolved_value(f.l, env, cap) and _unresolved_value(f.r, env, cap)
    if isinstance(f, Or):
        return _unresolved_value(f.l, env, cap) or _unresolved_value(f.r, env, cap)
    if isinstance(f, Imp):
        return (not _unresolved_value(f.l, env, cap)) or _unresolved_value(f.r, env, cap)
    return holds(f, env, cap)


def solve(f, cap: int = 4) -> str:
    """'T' or 'B': who can force a win when constants range over 0..cap.

    A player wins a position if some move of theirs leads to a win, or if
    the position as it stands is good for them and every reply of the
    opponent leaves them winning.
    """
    other = {"T": "B", "B": "T"}

    @lru_cache(maxsize=None)
    def wins(key, player):
        f, items = key
        env = dict(items)
        for g, e in _successors(f, env, player, cap):
            if wins(_flatten(g, e), player):
                return True
        content = _unresolved_value(f, env, cap) == (player == "T")
        if not content:
            return False
        return all(wins(_flatten(g, e), player) for g, e in _successors(f, env, other[player], cap))

    key = _flatten(f, {})
    t, b = wins(key, "T"), wins(key, "B")
    assert t != b, "a finite static game has exactly one winner"
    return "T" if t else "B"


def longest_run(f, cap: int = 1) -> int:
    """Length of the longest legal run, by exhaustive play."""

    def go(f, env):
        best = 0
        for p in ("T", "B"):
            for g, e in _successors(f, env, p, cap):
                best = max(best, 1 + go(g, e))
        return best

    return go(f, {})


# --------------------------------------------------------- explicit functions


def pr_eval(defs: dict, name: str, args):
    """Direct recursion over definitions ``name -> (arity, form, refs, index)``."""
    arity, form, refs, index = defs[name]
    args = list(args)
    if form == "succ":
        return args[0] + 1
    if form == "zero":
        return 0
    if form == "proj":
        return args[index - 1]
    if form == "comp":
        g, *hs = refs
        return pr_eval(defs, g, [pr_eval(defs, h, args) for h in hs])
    if form == "rec":
        g, h = refs
        if args[0] == 0:
            return pr_eval(defs, g, args[1:])
        prev = pr_eval(defs, name, [args[0] - 1] + args[1:])
        return pr_eval(defs, h, [args[0] - 1, prev] + args[1:])
    raise ValueError(form)


def construction_table(c) -> dict:
    return {d.name: (d.arity, d.form, tuple(d.refs), d.index) for d in c.defs}


def closed_form_eta_poly(ell: int) -> int:
    """The size ceiling w*w + w + 4 at w = ell, written out by hand."""
    return ell * ell + ell + 4


def closed_form_eta_exp(ell: int) -> int:
    """Its exponential analogue EXP(l)*EXP(l) + EXP(l) + 4."""
    e = 2**ell
    return e * e + e + 4


def configuration_product(states, symbols, depth, eta, phi_at_eta) -> int:
    """The quiescence product written out factor by factor."""
    r = 2 * depth * eta + 2 * depth + 1
    return states * phi_at_eta * r * symbols**phi_at_eta * symbols**r


def cla6_value(d, ell, phi, eta) -> int:
    return d * (2**ell + 1) * phi(eta(ell))


def cla7_value(d, ell, phi) -> int:
    m = 2**ell * d
    v = ell
    for _ in range(m):
        v = phi(v)
    return 2**ell * d * v
