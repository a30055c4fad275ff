"""The space-frugal induction machinery: guarded rows and the UP/DOWN recursion.

An induction on ``F(x)`` with premise strategies ``N`` (for ``F(0)``) and
``K`` (for ``F(x) -> F(x')``) is pictured as rows ``0..k``.  Row 0 is ``N``
playing ``F(0)``; row ``v`` is ``K`` playing ``F(v-1) -> F(v)``.  Moves that a
row makes in its consequent are the opponent's moves in the antecedent of
the row above, and vice versa.  Instead of running all rows side by side,
:func:`proc_up` and :func:`proc_down` recompute each row's behaviour from
scratch whenever it is needed, one simulation at a time.

Batches are lists of :class:`~clarith.games.Move` whose addresses are
relative to ``F``.  ``L`` is the number of cycles after which a silent row
is known to stay silent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..games import BOT, TOP, IllegalMove, LabMove, Move, check_move, guard_holds, move_size
from ..machines.strategy import Strategy
from ..syntax import Formula, Imp, Succ, Var, Zero, choice_closure, closure_vars, substitute
from .scripts import IllegalPremiseBehavior

ANTECEDENT = (0,)
CONSEQUENT = (1,)


def basis_formula(f: Formula, var: str) -> Formula:
    return substitute(f, var, Zero())


def step_formula(f: Formula, var: str) -> Formula:
    return Imp(f, substitute(f, var, Succ(Var(var))))


@dataclass
class Meter:
    """Counts live inner simulations, held batch bits and logical simulation steps."""

    live: int = 0
    peak_live: int = 0
    held: int = 0
    peak_held: int = 0
    steps: int = 0
    simulations: int = 0
    inner_space: int = 0

    def hold(self, batches) -> int:
        bits = sum(move_size(m) + len(m.address) + 1 for b in batches for m in b)
        self.held += bits
        self.peak_held = max(self.peak_held, self.held)
        return bits

    def release(self, bits: int) -> None:
        self.held -= bits


@dataclass
class Row:
    """One premise session to be simulated: which strategy, its game and its closure constants."""

    strategy: Strategy
    formula: Formula  # the premise's closed game
    feed: tuple
    prefix_in: Optional[tuple]  # where the row meets the row below (None for row 0)
    prefix_out: tuple  # where the row meets the row above


@dataclass
class Rows:
    """The rows of one induction instance ``F(k)`` with side constants ``env``."""

    base: Strategy
    step: Strategy
    f: Formula
    var: str
    k: int
    env: dict = field(default_factory=dict)
    funcs: Optional[dict] = None
    truth_cap: int = 64

    def __post_init__(self):
        self._basis = choice_closure(basis_formula(self.f, self.var))
        self._step = choice_closure(step_formula(self.f, self.var))

    def row(self, v: int) -> Row:
        if v == 0:
            feed = tuple(self.env[n] for n in closure_vars(basis_formula(self.f, self.var)))
            return Row(self.base, self._basis, feed, None, ())
        values = dict(self.env)
        values[self.var] = v - 1
        feed = tuple(values[n] for n in closure_vars(step_formula(self.f, self.var)))
        return Row(self.step, self._step, feed, ANTECEDENT, CONSEQUENT)


@dataclass
class Simulation:
    inner: list = field(default_factory=list)  # (cycle, move relative to F) made toward the row below
    outer: list = field(default_factory=list)  # (cycle, move relative to F) made toward the row above
    suppressed: int = 0


class GuardedSession:
    """A premise session that tracks its position, drops unreasonable moves and rejects illegal ones."""

    def __init__(self, row: Row, funcs=None, truth_cap=64):
        self.row = row
        self.session = row.strategy.spawn()
        self.position = row.formula
        self.funcs = funcs
        self.truth_cap = truth_cap
        self.pending = [Move((), c) for c in row.feed]
        self.suppressed = 0

    def inject(self, prefix, batch):
        for m in batch:
            self.pending.append(Move(tuple(prefix) + tuple(m.address), m.payload))

    def step(self):
        incoming, self.pending = self.pending, []
        for m in incoming:
            try:
                self.position = check_move(self.position, LabMove(BOT, m))
            except IllegalMove as e:
                raise IllegalPremiseBehavior(f"a row received an illegal move: {e}") from None
        out = []
        for m in self.session.step(incoming):
            if not guard_holds(self.position, m, self.funcs, self.truth_cap):
                self.suppressed += 1
                continue
            try:
                self.position = check_move(self.position, LabMove(TOP, m))
            except IllegalMove as e:
                raise IllegalPremiseBehavior(str(e)) from None
            out.append(m)
        return out

    def quiet(self):
        return not self.pending and self.session.settled()


def _strip(prefix, m: Move):
    if prefix is not None and tuple(m.address[: len(prefix)]) == tuple(prefix):
        return Move(m.address[len(prefix):], m.payload)
    return None


def simulate(row: Row, inner_sched: dict, outer_sched: dict, steps: int, meter: Optional[Meter] = None,
             funcs=None, truth_cap=64) -> Simulation:
    """Run one row for ``steps`` cycles with batches injected at the given cycles.

    ``inner_sched`` feeds the side facing the row below (the antecedent),
    ``outer_sched`` the side facing the row above.  A row that has settled
    with nothing left to inject stays silent, so the remaining cycles are
    counted without being executed.
    """
    meter = meter if meter is not None else Meter()
    meter.live += 1
    meter.simulations += 1
    meter.peak_live = max(meter.peak_live, meter.live)
    g = GuardedSession(row, funcs, truth_cap)
    sim = Simulation()
    last_injection = max(list(inner_sched) + list(outer_sched), default=-1)
    try:
        for c in range(steps):
            if c in inner_sched:
                g.inject(row.prefix_in, inner_sched[c])
            if c in outer_sched:
                g.inject(row.prefix_out, outer_sched[c])
            for m in g.step():
                inner = _strip(row.prefix_in, m)
                if inner is not None:
                    sim.inner.append((c, inner))
                else:
                    sim.outer.append((c, _strip(row.prefix_out, m)))
            meter.inner_space = max(meter.inner_space, g.session.space())
            if c >= last_injection and g.quiet():
                break
    finally:
        meter.live -= 1
    meter.steps += steps
    sim.suppressed = g.suppressed
    return sim


def window(moves, lo, hi) -> list:
    """Moves made during cycles ``lo`` through ``hi - 1``."""
    return [m for c, m in moves if lo <= c < hi]


def proc_up(j: int, i: int, alphas, rows: Rows, L: int, meter: Optional[Meter] = None) -> list:
    """The ``j+1`` batches of moves row ``i`` makes toward the row above.

    ``alphas`` are the environment's batches in the real play of ``F(k)``;
    only the first ``j`` are used.
    """
    meter = meter if meter is not None else Meter()
    alphas = [list(a) for a in alphas[:j]]
    if len(alphas) < j:
        raise ValueError("proc_up needs j environment batches")
    gammas = proc_down(j, 1, alphas, rows, L, meter) if j else []
    held = meter.hold(gammas)
    sim = simulate(rows.row(0), {}, {e * L: gammas[e - 1] for e in range(1, j + 1)}, (j + 1) * L,
                   meter, rows.funcs, rows.truth_cap)
    meter.release(held)
    betas = [window(sim.outer, (e - 1) * L, e * L) for e in range(1, j + 2)]
    for v in range(1, i + 1):
        held = meter.hold(betas)
        gammas = proc_down(j, v + 1, alphas, rows, L, meter) if j else []
        held += meter.hold(gammas)
        sim = simulate(
            rows.row(v),
            {(2 * e - 2) * L: betas[e - 1] for e in range(1, j + 2)},
            {(2 * e - 1) * L: gammas[e - 1] for e in range(1, j + 1)},
            (2 * j + 1) * L,
            meter, rows.funcs, rows.truth_cap,
        )
        meter.release(held)
        betas = [window(sim.outer, 0, L)] + [
            window(sim.outer, (2 * e - 3) * L, (2 * e - 1) * L) for e in range(2, j + 2)
        ]
    return betas


def proc_down(j: int, i: int, alphas, rows: Rows, L: int, meter: Optional[Meter] = None) -> list:
    """The ``j`` batches of moves row ``i`` makes toward the row below (``alphas`` for ``i = k+1``)."""
    meter = meter if meter is not None else Meter()
    if j < 1:
        raise ValueError("proc_down needs j >= 1")
    if not 1 <= i <= rows.k + 1:
        raise ValueError(f"proc_down row {i} outside 1..{rows.k + 1}")
    alphas = [list(a) for a in alphas[:j]]
    v, gammas = rows.k + 1, alphas
    while v != i:
        v -= 1
        held = meter.hold(gammas)
        betas = proc_up(j - 1, v - 1, alphas[: j - 1], rows, L, meter)
        held += meter.hold(betas)
        sim = simulate(
            rows.row(v),
            {(2 * e - 2) * L: betas[e - 1] for e in range(1, j + 1)},
            {(2 * e - 1) * L: gammas[e - 1] for e in range(1, j + 1)},
            2 * j * L,
            meter, rows.funcs, rows.truth_cap,
        )
        meter.release(held)
        gammas = [window(sim.inner, (2 * e - 2) * L, 2 * e * L) for e in range(1, j + 1)]
    return gammas
