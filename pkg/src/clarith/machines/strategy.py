"""Step-indexed interactive strategies and the scheduled-run harness.

A :class:`Strategy` is a recipe; :meth:`Strategy.spawn` produces a fresh
:class:`Session`, a deterministic machine stepped one cycle at a time.
On each cycle the session sees the adversary moves made on that cycle and
answers with the moves it makes itself.  Resource use is reported in
bits of retained state (space) and in cycles (time).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..bounds import Bound
from ..games import TOP, LabMove, Player, move_size
from ..syntax import Formula, size


class Session:
    """One running copy of a strategy."""

    def step(self, observed: list) -> list:
        raise NotImplementedError

    def space(self) -> int:
        """Bits of state currently retained."""
        return 0

    def settled(self) -> bool:
        """True when no move will be made before the adversary moves again."""
        return False

    def stats(self) -> dict:
        return {}


class Strategy:
    """A deterministic machine playing ``player`` in ``target``."""

    player = TOP

    # defaults for optional descriptive attributes, looked up lazily
    # so that dataclass subclasses can declare them as required fields
    _DEFAULTS = {"target": None, "bound": None, "funcs": None, "name": "strategy",
                 "space_bound": None, "time_bound": None}

    def __getattr__(self, name):
        if name in Strategy._DEFAULTS:
            return Strategy._DEFAULTS[name]
        raise AttributeError(name)

    def spawn(self) -> Session:
        raise NotImplementedError

    def quiescence(self, ell: int) -> int:
        """Silent cycles after which a session with background ``ell`` stays silent."""
        return 1


class FunctionSession(Session):
    def __init__(self, fn, state):
        self.fn = fn
        self.state = state

    def step(self, observed):
        self.state, out = self.fn(self.state, list(observed))
        return list(out)

    def space(self):
        return _bits_of(self.state)


def _bits_of(x) -> int:
    if isinstance(x, bool) or x is None:
        return 1
    if isinstance(x, int):
        return max(1, size(x))
    if isinstance(x, (tuple, list)):
        return sum(_bits_of(v) for v in x)
    if isinstance(x, dict):
        return sum(_bits_of(v) for v in x.values())
    return 1


@dataclass
class FunctionStrategy(Strategy):
    """A strategy given as ``step(state, observed) -> (state, moves)``."""

    fn: Callable
    initial: object = None
    target: Optional[Formula] = None
    bound: Optional[Bound] = None
    name: str = "function"
    quiet: int = 1
    player: Player = TOP
    funcs: Optional[dict] = None

    def spawn(self):
        return FunctionSession(self.fn, self.initial)

    def quiescence(self, ell):
        return self.quiet


class SilentSession(Session):
    def step(self, observed):
        return []

    def settled(self):
        return True


@dataclass
class SilentStrategy(Strategy):
    target: Optional[Formula] = None
    bound: Optional[Bound] = None
    name: str = "silent"
    player: Player = TOP
    funcs: Optional[dict] = None

    def spawn(self):
        return SilentSession()


# ------------------------------------------------------------------ harness


class ScheduleOverrun(ValueError):
    pass


@dataclass
class Transcript:
    """Everything observable about one scheduled run."""

    records: list = field(default_factory=list)  # (cycle, LabMove)
    spacecost: list = field(default_factory=list)  # running max per cycle
    background: list = field(default_factory=list)  # per cycle
    session: Optional[Session] = None
    machine: Player = TOP

    def machine_moves(self):
        return [(c, lm.move) for c, lm in self.records if lm.player is self.machine]

    def adversary_moves(self):
        return [(c, lm.move) for c, lm in self.records if lm.player is not self.machine]

    def run(self):
        return [lm for _, lm in self.records]


def run_scheduled(strategy: Strategy, schedule: dict, steps: int, initial_background: int = 0) -> Transcript:
    """Run ``steps`` cycles; adversary moves scheduled for a cycle arrive before the machine steps."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if schedule and max(schedule) >= steps:
        raise ScheduleOverrun(f"schedule has moves at cycle {max(schedule)} but only {steps} steps run")
    me = strategy.player
    session = strategy.spawn()
    t = Transcript(session=session, machine=me)
    bg, peak = initial_background, 0
    for c in range(steps):
        incoming = list(schedule.get(c, []))
        for m in incoming:
            t.records.append((c, LabMove(me.other, m)))
            if isinstance(m.payload, int):
                bg = max(bg, size(m.payload))
        for m in session.step(incoming):
            t.records.append((c, LabMove(me, m)))
        peak = max(peak, session.space())
        t.spacecost.append(peak)
        t.background.append(bg)
    return t


@dataclass
class Meters:
    background: list
    timecost: list  # (cycle, timecost) for every machine move
    spacecost: list


def meters(t: Transcript, initial_background: int = 0) -> Meters:
    cycles = len(t.spacecost)
    bg_series, bg = [], initial_background
    adv = sorted(c for c, _ in t.adversary_moves())
    by_cycle: dict = {}
    for c, m in t.adversary_moves():
        by_cycle.setdefault(c, []).append(m)
    for c in range(cycles):
        for m in by_cycle.get(c, []):
            if isinstance(m.payload, int):
                bg = max(bg, size(m.payload))
        bg_series.append(bg)
    times = []
    for c, _ in t.machine_moves():
        before = [d for d in adv if d <= c]
        times.append((c, c - (before[-1] if before else 0)))
    return Meters(bg_series, times, list(t.spacecost))


def max_move_size(t: Transcript) -> int:
    return max((move_size(lm.move) for _, lm in t.records), default=0)
