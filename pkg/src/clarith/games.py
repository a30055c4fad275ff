"""Constant-game semantics: moves and runs, with the legality and winner judgements.

A position is a closed formula.  A choice occurrence is *active* when no
other choice operator encloses it; the active occurrences are exactly
the ones a player may resolve.  Ownership follows polarity:
``chand``/``chall`` belong to the environment (``B``) in positive
position and ``chor``/``chex`` to the machine (``T``); both flip under
negation and in the antecedent of an implication.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from .syntax import (
    is_elementary,
    ATOMS,
    CHOICE,
    CHOICE_BINARY,
    CHOICE_QUANTIFIERS,
    And,
    ChAll,
    ChAnd,
    Eq,
    Exists,
    ForAll,
    Formula,
    Imp,
    Leq,
    Len,
    Not,
    Or,
    Var,
    children,
    elementarize,
    eval_term,
    free_vars,
    guard_of,
    num,
    pretty,
    replace_child,
    size,
    substitute,
    term_vars,
)


class Player(enum.Enum):
    TOP = "T"
    BOT = "B"

    @property
    def other(self) -> "Player":
        return Player.BOT if self is Player.TOP else Player.TOP

    def __str__(self):
        return self.value


TOP, BOT = Player.TOP, Player.BOT

LEFT, RIGHT = "L", "R"


class _AnyConstant:
    """Schematic payload in :func:`legal_moves`: any natural number."""

    def __repr__(self):
        return "n"


ANY_CONSTANT = _AnyConstant()

Payload = Union[int, str]


@dataclass(frozen=True)
class Move:
    address: tuple
    payload: Payload

    def __str__(self):
        return f"{format_address(self.address)} {format_payload(self.payload)}"


@dataclass(frozen=True)
class LabMove:
    player: Player
    move: Move

    def __str__(self):
        return f"{self.player} {self.move}"


@dataclass(frozen=True)
class GameState:
    current: Formula
    history: tuple = ()

    @staticmethod
    def start(f: Formula) -> "GameState":
        return GameState(f, ())


@dataclass(frozen=True)
class RunVerdict:
    legal: bool
    offender: Optional[Player] = None
    winner: Optional[Player] = None
    undetermined: bool = False

    def __str__(self):
        w = self.winner.value if self.winner else "none"
        return (
            f"verdict legal={str(self.legal).lower()} winner={w} "
            f"undetermined={str(self.undetermined).lower()}"
        )


class IllegalMove(ValueError):
    def __init__(self, offender: Player, reason: str):
        self.offender = offender
        super().__init__(f"illegal move by {offender}: {reason}")


class Undetermined(RuntimeError):
    """The bounded truth evaluator could not settle a sentence."""


# ------------------------------------------------------------ addressing


def format_address(address) -> str:
    return "." if not address else ".".join(str(i) for i in address)


def parse_address(text: str) -> tuple:
    if text == ".":
        return ()
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise ValueError(f"bad address {text!r}") from None
    if any(p < 0 for p in parts):
        raise ValueError(f"bad address {text!r}")
    return parts


def format_payload(p) -> str:
    if p is ANY_CONSTANT:
        return "n"
    return str(p)


def parse_payload(text: str) -> Payload:
    low = text.lower()
    if low in ("l", "left"):
        return LEFT
    if low in ("r", "right"):
        return RIGHT
    if text.isdigit():
        return int(text)
    raise ValueError(f"bad payload {text!r}")


def subformula_at(f: Formula, address) -> Formula:
    for i in address:
        kids = children(f)
        if i >= len(kids):
            raise KeyError(address)
        f = kids[i]
    return f


def active_occurrences(f: Formula, address=(), positive=True):
    """Yield ``(address, occurrence, positive)`` for every active choice occurrence."""
    if isinstance(f, CHOICE):
        yield address, f, positive
    elif isinstance(f, Not):
        yield from active_occurrences(f.f, address + (0,), not positive)
    elif isinstance(f, Imp):
        yield from active_occurrences(f.l, address + (0,), not positive)
        yield from active_occurrences(f.r, address + (1,), positive)
    elif isinstance(f, (And, Or)):
        yield from active_occurrences(f.l, address + (0,), positive)
        yield from active_occurrences(f.r, address + (1,), positive)


def owner(occurrence: Formula, positive: bool) -> Player:
    env_owned = isinstance(occurrence, (ChAnd, ChAll))
    if not positive:
        env_owned = not env_owned
    return BOT if env_owned else TOP


def legal_moves(state: GameState | Formula, player: Player) -> list[Move]:
    f = state.current if isinstance(state, GameState) else state
    out = []
    for addr, occ, pos in active_occurrences(f):
        if owner(occ, pos) is not player:
            continue
        if isinstance(occ, CHOICE_BINARY):
            out.append(Move(addr, LEFT))
            out.append(Move(addr, RIGHT))
        else:
            out.append(Move(addr, ANY_CONSTANT))
    return out


def _locate(f: Formula, address):
    for addr, occ, pos in active_occurrences(f):
        if addr == tuple(address):
            return occ, pos
    return None


def check_move(f: Formula, lm: LabMove) -> Formula:
    """Return the position after ``lm``; raise :class:`IllegalMove` if it is not legal."""
    found = _locate(f, lm.move.address)
    if found is None:
        raise IllegalMove(lm.player, f"no active choice occurrence at {format_address(lm.move.address)}")
    occ, pos = found
    if owner(occ, pos) is not lm.player:
        raise IllegalMove(lm.player, f"occurrence at {format_address(lm.move.address)} belongs to {lm.player.other}")
    p = lm.move.payload
    if isinstance(occ, CHOICE_BINARY):
        if p not in (LEFT, RIGHT):
            raise IllegalMove(lm.player, "a choice connective needs left or right")
        chosen = occ.l if p == LEFT else occ.r
    else:
        if isinstance(p, bool) or not isinstance(p, int) or p < 0:
            raise IllegalMove(lm.player, "a choice quantifier needs a natural constant")
        chosen = substitute(occ.body, occ.var, num(p))
    return _replace_at(f, lm.move.address, chosen)


def _replace_at(f, address, new):
    if not address:
        return new
    i = address[0]
    return replace_child(f, i, _replace_at(children(f)[i], address[1:], new))


def apply_move(state: GameState, lm: LabMove) -> GameState:
    return GameState(check_move(state.current, lm), state.history + (lm,))


def guard_holds(f: Formula, move: Move, funcs=None, cap=64) -> bool:
    """Is the constant in ``move`` within the sizebound guarding its quantifier?

    Moves that are not constants, and quantifiers without a guard, are
    always reasonable.  A guard that cannot be evaluated counts as held.
    """
    if not isinstance(move.payload, int):
        return True
    found = _locate(f, move.address)
    if found is None or not isinstance(found[0], CHOICE_QUANTIFIERS):
        return True
    occ = found[0]
    guard = guard_of(occ)
    if guard is None or not is_elementary(guard):
        return True
    if free_vars(guard) - {occ.var}:
        return True
    verdict = eval_elementary(substitute(guard, occ.var, num(move.payload)), cap, funcs)
    return verdict is not False


# ------------------------------------------------------------------ truth


def eval_elementary(f: Formula, cap: int = 64, funcs=None):
    """Three-valued truth of a closed elementary sentence: True, False or None.

    Atoms are decided exactly.  A classical quantifier whose body starts
    with a recognisable bound (``x <= t ->`` / ``|x| <= t ->`` and the
    conjunctive forms for ``ex``) is searched over its full range when that
    range fits under ``cap``; any other quantifier is searched over
    ``0..cap`` and left undecided unless a witness settles it.
    """
    return _eval(f, {}, cap, funcs)


def _and3(a, b):
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def _or3(a, b):
    if a is True or b is True:
        return True
    if a is None or b is None:
        return None
    return False


def _not3(a):
    return None if a is None else not a


def _range_of(var, f, env, funcs, shape):
    # a bounding guard that is the left side of -> (for all) or /\ (for ex)
    if not isinstance(f, shape) or not isinstance(f.l, Leq):
        return None
    g = f.l
    try:
        if g.l == Var(var) and var not in term_vars(g.r):
            return eval_term(g.r, env, funcs) + 1
        if g.l == Len(Var(var)) and var not in term_vars(g.r):
            return 2 ** eval_term(g.r, env, funcs)
    except (ValueError, OverflowError):
        return None
    return None


def _eval(f, env, cap, funcs):
    if isinstance(f, ATOMS):
        l = eval_term(f.l, env, funcs)
        r = eval_term(f.r, env, funcs)
        return l == r if isinstance(f, Eq) else l <= r
    if isinstance(f, Not):
        return _not3(_eval(f.f, env, cap, funcs))
    if isinstance(f, And):
        a = _eval(f.l, env, cap, funcs)
        if a is False:
            return False
        return _and3(a, _eval(f.r, env, cap, funcs))
    if isinstance(f, Or):
        a = _eval(f.l, env, cap, funcs)
        if a is True:
            return True
        return _or3(a, _eval(f.r, env, cap, funcs))
    if isinstance(f, Imp):
        a = _eval(f.l, env, cap, funcs)
        if a is False:
            return True
        return _or3(_not3(a), _eval(f.r, env, cap, funcs))
    if isinstance(f, (ForAll, Exists)):
        universal = isinstance(f, ForAll)
        span = _range_of(f.var, f.body, env, funcs, Imp if universal else And)
        exact = span is not None and span <= cap + 1
        limit = span if exact else cap + 1
        unknown = False
        for v in range(limit):
            r = _eval(f.body, {**env, f.var: v}, cap, funcs)
            if universal and r is False:
                return False
            if not universal and r is True:
                return True
            if r is None:
                unknown = True
        if exact and not unknown:
            return universal
        return None
    raise TypeError(f"not an elementary formula: {pretty(f)}")


def truth(f: Formula, cap: int = 64, funcs=None):
    """Truth of the elementarization of a closed position."""
    return eval_elementary(elementarize(f), cap, funcs)


# ---------------------------------------------------------------- winners


def winner(initial: Formula, run, oracle_cap: int = 64, funcs=None) -> RunVerdict:
    f = initial
    for lm in run:
        try:
            f = check_move(f, lm)
        except IllegalMove as e:
            return RunVerdict(False, e.offender, e.offender.other, False)
    t = truth(f, oracle_cap, funcs)
    if t is None:
        return RunVerdict(True, None, None, True)
    return RunVerdict(True, None, TOP if t else BOT, False)


def developments(state: GameState | Formula, player: Player, const_cap: int) -> list:
    """Every one-move successor by ``player`` with constants in ``0..const_cap``."""
    wrap = isinstance(state, GameState)
    f = state.current if wrap else state
    out = []
    for m in concrete_moves(f, player, const_cap):
        lm = LabMove(player, m)
        out.append(apply_move(state, lm) if wrap else check_move(f, lm))
    return out


def concrete_moves(f: Formula, player: Player, const_cap: int) -> list[Move]:
    out = []
    for m in legal_moves(f, player):
        if m.payload is ANY_CONSTANT:
            out.extend(Move(m.address, c) for c in range(const_cap + 1))
        else:
            out.append(m)
    return out


# ------------------------------------------------------- brute-force oracle


class GameOracle:
    """Minimax over the game tree truncated to constants ``0..const_cap``.

    ``wins(f, p)``: player ``p`` can force a win from position ``f``.
    ``p`` wins iff some move of ``p`` leads to a position ``p`` wins, or
    ``p`` is content with the current elementarization and every reply
    of the opponent still leaves ``p`` winning.
    """

    def __init__(self, const_cap: int = 4, truth_cap: int = 64, funcs=None, reasonable_only=False):
        self.const_cap = const_cap
        self.truth_cap = truth_cap
        self.funcs = funcs
        self.reasonable_only = reasonable_only
        self._memo: dict = {}

    def moves(self, f, player):
        ms = concrete_moves(f, player, self.const_cap)
        if self.reasonable_only:
            ms = [m for m in ms if guard_holds(f, m, self.funcs, self.truth_cap)]
        return ms

    def content(self, f, player) -> bool:
        t = truth(f, self.truth_cap, self.funcs)
        if t is None:
            raise Undetermined(pretty(elementarize(f)))
        return t if player is TOP else not t

    def wins(self, f: Formula, player: Player) -> bool:
        key = (f, player)
        if key in self._memo:
            return self._memo[key]
        result = any(self.wins(check_move(f, LabMove(player, m)), player) for m in self.moves(f, player))
        if not result and self.content(f, player):
            result = all(
                self.wins(check_move(f, LabMove(player.other, m)), player)
                for m in self.moves(f, player.other)
            )
        self._memo[key] = result
        return result

    def winning_player(self, f: Formula) -> Optional[Player]:
        top, bot = self.wins(f, TOP), self.wins(f, BOT)
        if top and not bot:
            return TOP
        if bot and not top:
            return BOT
        return None

    def best_move(self, f: Formula, player: Player) -> Optional[Move]:
        """A move keeping ``player`` winning, or None when staying put is right."""
        for m in self.moves(f, player):
            if self.wins(check_move(f, LabMove(player, m)), player):
                return m
        return None

    def longest_run(self, f: Formula) -> int:
        best = 0
        for p in (TOP, BOT):
            for m in concrete_moves(f, p, self.const_cap):
                best = max(best, 1 + self.longest_run(check_move(f, LabMove(p, m))))
        return best


# -------------------------------------------------------------- transcripts


def format_transcript(records, verdict: RunVerdict | None = None) -> str:
    """Records are ``(cycle, LabMove)`` pairs."""
    lines = [f"cycle {c} {lm.player} {lm.move}" for c, lm in records]
    if verdict is not None:
        lines.append(str(verdict))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_transcript(text: str):
    records, verdict = [], None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        parts = line.split()
        if parts[0] == "cycle" and len(parts) == 5:
            lm = LabMove(Player(parts[2]), Move(parse_address(parts[3]), parse_payload(parts[4])))
            records.append((int(parts[1]), lm))
        elif parts[0] == "verdict":
            kv = dict(p.split("=", 1) for p in parts[1:])
            w = kv.get("winner", "none")
            verdict = RunVerdict(
                kv.get("legal") == "true",
                None,
                None if w == "none" else Player(w),
                kv.get("undetermined") == "true",
            )
        else:
            raise ValueError(f"bad transcript line: {raw!r}")
    return records, verdict


def move_size(m: Move) -> int:
    return size(m.payload) if isinstance(m.payload, int) else 1
