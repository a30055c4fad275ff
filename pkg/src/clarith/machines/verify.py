"""Exhaustive play of a strategy against every adversary line at desk scale."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..bounds import ResourceCap
from ..games import (
    GameOracle,
    IllegalMove,
    LabMove,
    TOP,
    RunVerdict,
    check_move,
    concrete_moves,
    guard_holds,
    move_size,
    truth,
)
from ..syntax import Formula, size
from .strategy import Session, Strategy

QUIET = "q"  # the adversary waits until the machine has settled
EAGER = "e"  # the adversary moves on the very next cycle


@dataclass
class LineResult:
    events: tuple
    records: list
    position: Formula
    verdict: RunVerdict
    background: int
    max_machine_move: int
    max_timecost: int
    peak_space: int
    stats: dict = field(default_factory=dict)


@dataclass
class VerifyReport:
    ok: bool
    lines: int
    losing: Optional[LineResult] = None
    results: list = field(default_factory=list)

    def summary(self) -> str:
        if self.ok:
            return f"won all {self.lines} adversary lines"
        return f"lost a line after checking {self.lines} lines"


class RejectedMove(ValueError):
    """An adversary move in a replayed line that the game does not allow."""

    def __init__(self, index, reason):
        self.index = index
        super().__init__(f"move {index + 1}: {reason}")


def play_line(strategy: Strategy, events, truth_cap=64, max_cycles=200_000, reasonable=True,
              strict=False) -> LineResult:
    """Replay one adversary line from scratch; ``events`` is a sequence of (timing, Move).

    An illegal adversary move, or with ``reasonable`` one that breaks its
    sizebound, ends the replay with ``None``; with ``strict`` it raises
    :class:`RejectedMove` instead.  With ``reasonable=False`` moves that
    break a sizebound are played and simply forfeit their subgame.
    """
    me = strategy.player
    session: Session = strategy.spawn()
    position = strategy.target
    records, cycle, bg = [], 0, 0
    last_adv, max_time, max_move, peak = 0, 0, 0, 0
    stats: dict = {}

    def finish(verdict):
        return LineResult(tuple(events), records, position, verdict, bg, max_move, max_time, peak, stats)

    def advance(incoming):
        nonlocal cycle, position, last_adv, max_time, max_move, peak
        for m in incoming:
            position = check_move(position, LabMove(me.other, m))
            records.append((cycle, LabMove(me.other, m)))
            last_adv = cycle
        out = session.step(list(incoming))
        for m in out:
            lm = LabMove(me, m)
            records.append((cycle, lm))
            position = check_move(position, lm)
            max_time = max(max_time, cycle - last_adv)
            max_move = max(max_move, move_size(m))
        peak = max(peak, session.space())
        for k, v in session.stats().items():
            stats[k] = max(stats.get(k, 0), v)
        cycle += 1
        if cycle > max_cycles:
            raise ResourceCap(f"line exceeded {max_cycles} cycles")
        return out

    def settle():
        silent = 0
        while not session.settled():
            if advance([]):
                silent = 0
            else:
                silent += 1
                if silent >= strategy.quiescence(bg):
                    break

    try:
        settle()
        for index, (timing, m) in enumerate(events):
            if timing == QUIET:
                settle()
            # an adversary move must be legal and within its sizebound when it is made
            try:
                check_move(position, LabMove(me.other, m))
            except IllegalMove as e:
                if strict:
                    raise RejectedMove(index, str(e)) from None
                return None
            if reasonable and not guard_holds(position, m, strategy.funcs, truth_cap):
                if strict:
                    raise RejectedMove(index, "the constant breaks its sizebound")
                return None
            if isinstance(m.payload, int):
                bg = max(bg, size(m.payload))
            advance([m])
        settle()
    except IllegalMove as e:
        return finish(RunVerdict(False, e.offender, e.offender.other, False))
    t = truth(position, truth_cap, strategy.funcs)
    if t is None:
        return finish(RunVerdict(True, None, None, True))
    won = t if me is TOP else not t
    return finish(RunVerdict(True, None, me if won else me.other, False))


def verify_win(
    strategy: Strategy,
    max_const: int = 8,
    cap: int = 100_000,
    truth_cap: int = 64,
    timings=(QUIET, EAGER),
    keep_results=False,
) -> VerifyReport:
    """Play every legal, reasonable adversary line with constants up to ``max_const``.

    The adversary may stop at any point; each further move is made either
    after the machine settles or on the very next cycle.  Raises
    :class:`ResourceCap` once more than ``cap`` lines are visited.
    """
    me = strategy.player
    report = VerifyReport(True, 0)
    stack = [()]
    while stack:
        events = stack.pop()
        result = play_line(strategy, events, truth_cap)
        if result is None:
            continue
        report.lines += 1
        if report.lines > cap:
            raise ResourceCap(f"more than {cap} adversary lines")
        if keep_results:
            report.results.append(result)
        if result.verdict.winner is not me:
            report.ok = False
            report.losing = result
            return report
        moves = [
            m
            for m in concrete_moves(result.position, me.other, max_const)
            if guard_holds(result.position, m, strategy.funcs, truth_cap)
        ]
        for m in reversed(moves):
            for timing in timings if events else (QUIET,):
                stack.append(events + ((timing, m),))
    return report


# ------------------------------------------------------------ oracle player


class _OracleSession(Session):
    def __init__(self, oracle: GameOracle, position, player):
        self.oracle = oracle
        self.position = position
        self.player = player

    def step(self, observed):
        for m in observed:
            self.position = check_move(self.position, LabMove(self.player.other, m))
        m = self.oracle.best_move(self.position, self.player)
        if m is None:
            return []
        self.position = check_move(self.position, LabMove(self.player, m))
        return [m]

    def settled(self):
        return self.oracle.best_move(self.position, self.player) is None


@dataclass
class OracleStrategy(Strategy):
    """Plays the moves the brute-force game-tree oracle recommends."""

    target: Formula
    player: object
    const_cap: int = 4
    truth_cap: int = 64
    funcs: Optional[dict] = None
    name: str = "oracle"
    bound: object = None

    def __post_init__(self):
        self.oracle = GameOracle(self.const_cap, self.truth_cap, self.funcs)

    def spawn(self):
        return _OracleSession(self.oracle, self.target, self.player)

    def quiescence(self, ell):
        return 1
