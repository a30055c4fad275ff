"""Induction composers: the space-frugal UP/DOWN machine and the parallel synchroniser.

Both take a strategy ``N`` for the closure of ``F(0)`` and a strategy ``K``
for the closure of ``F(x) -> F(x')`` and produce a strategy for the closure
of ``F(x)``.  After the environment has supplied every closure constant,
``k`` is the value it chose for ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..bounds import (
    SLACK,
    Bound,
    Elem,
    NotBounded,
    Poly,
    cla5_space_object,
    cla6_time_object,
    cla7_time_object,
    compose as fn_compose,
    eta_bound,
    eta_term,
    fn_sum,
    identity,
    MU_OFFSET,
    MU_SLOPE,
)
from ..games import BOT, TOP, IllegalMove, LabMove, Move, check_move
from ..machines.strategy import Session, Strategy
from ..syntax import (
    EXPONENTIAL,
    POLYNOMIAL,
    Formula,
    Plus,
    Times,
    choice_closure,
    classify,
    closure_vars,
    depth,
    num,
    pretty,
    size,
)
from .scripts import IllegalPremiseBehavior
from .updown import ANTECEDENT, GuardedSession, Meter, Rows, proc_up

SPACE = "induction-space"
PARALLEL = "induction-parallel"


class SideConditionError(ValueError):
    pass


def _eta(f: Formula, ell: int, mode) -> int:
    try:
        return eta_bound(f, ell, mode)
    except NotBounded:
        return ell + SLACK


def _phi(strategies, attr):
    parts = [getattr(s, attr, None) for s in strategies]
    if any(p is None for p in parts):
        return None
    return fn_sum(parts)


# ------------------------------------------------------------- space composer


class _ClosureIntake:
    """Collects the environment's closure constants, outermost quantifier first."""

    def __init__(self, target: Formula, names):
        self.position = target
        self.names = list(names)
        self.values: dict = {}

    def done(self):
        return len(self.values) == len(self.names)

    def take(self, m: Move):
        self.position = check_move(self.position, LabMove(BOT, m))
        self.values[self.names[len(self.values)]] = m.payload


class SpaceSession(Session):
    """Answers each environment batch by recomputing the rows with UP/DOWN inside one cycle."""

    def __init__(self, strat: "ComposedStrategy"):
        self.strat = strat
        self.intake = _ClosureIntake(strat.target, closure_vars(strat.f))
        self.alphas: list = []
        self.meter = Meter()
        self.retired = False
        self.ell = 0
        self.stage_space = 0
        self.errors: list = []

    @property
    def position(self):
        return self.intake.position

    def step(self, observed):
        if self.retired:
            return []
        fresh = []
        for m in observed:
            if isinstance(m.payload, int):
                self.ell = max(self.ell, size(m.payload))
            if not self.intake.done():
                try:
                    self.intake.take(m)
                except IllegalMove:
                    self.retired = True
                    return []
                if self.intake.done():
                    fresh.append(None)  # stage 1 starts once the closure is complete
                continue
            try:
                self.intake.position = check_move(self.intake.position, LabMove(BOT, m))
            except IllegalMove:
                self.retired = True  # the environment forfeited; stay silent
                return []
            fresh.append(m)
        if not fresh:
            return []
        batch = [m for m in fresh if m is not None]
        if batch:
            self.alphas.append(batch)
        return self._stage()

    def _stage(self):
        s = self.strat
        values = self.intake.values
        rows = Rows(s.base, s.step_strategy, s.f, s.var, values[s.var],
                    {n: v for n, v in values.items() if n != s.var}, s.funcs, s.truth_cap)
        L = s.window(self.ell)
        self.meter.peak_held = 0
        self.meter.inner_space = 0
        try:
            betas = proc_up(len(self.alphas), rows.k, self.alphas, rows, L, self.meter)
        except IllegalPremiseBehavior as e:
            self.errors.append(str(e))
            self.retired = True
            return []
        out = []
        for m in betas[-1]:
            try:
                self.intake.position = check_move(self.intake.position, LabMove(TOP, m))
            except IllegalMove as e:
                self.errors.append(str(e))
                continue
            out.append(m)
        self.stage_space = self.meter.peak_held + self.meter.inner_space
        return out

    def space(self):
        base = sum(size(v) for v in self.intake.values.values() if isinstance(v, int))
        base += size(len(self.alphas))
        base += sum(size(m.payload) if isinstance(m.payload, int) else 1 for a in self.alphas for m in a)
        return base + self.stage_space

    def settled(self):
        return True

    def stats(self):
        return {"live": self.meter.peak_live, "steps": self.meter.steps, "simulations": self.meter.simulations}


# ---------------------------------------------------------- parallel composer


class ParallelSession(Session):
    """Steps all ``k+1`` rows each cycle and passes moves between neighbouring rows."""

    def __init__(self, strat: "ComposedStrategy"):
        self.strat = strat
        self.intake = _ClosureIntake(strat.target, closure_vars(strat.f))
        self.rows: list = []
        self.down_mail: list = []  # (row index, Move relative to F) for the next cycle
        self.retired = False
        self.errors: list = []
        self.peak_space = 0
        self.row_steps = 0

    def _start(self):
        s = self.strat
        values = self.intake.values
        rows = Rows(s.base, s.step_strategy, s.f, s.var, values[s.var],
                    {n: v for n, v in values.items() if n != s.var}, s.funcs, s.truth_cap)
        self.rows = [GuardedSession(rows.row(v), s.funcs, s.truth_cap) for v in range(rows.k + 1)]

    def step(self, observed):
        if self.retired:
            return []
        env = []
        for m in observed:
            if not self.intake.done():
                try:
                    self.intake.take(m)
                except IllegalMove:
                    self.retired = True
                    return []
                if self.intake.done():
                    self._start()
                continue
            try:
                self.intake.position = check_move(self.intake.position, LabMove(BOT, m))
            except IllegalMove:
                self.retired = True
                return []
            env.append(m)
        if not self.rows:
            return []
        top = len(self.rows) - 1
        self.rows[top].inject(self.rows[top].row.prefix_out, env)
        for v, m in self.down_mail:
            self.rows[v].inject(self.rows[v].row.prefix_out, [m])
        self.down_mail = []
        out = []
        self.row_steps += len(self.rows)
        try:
            for v, g in enumerate(self.rows):
                for m in g.step():
                    pin, pout = g.row.prefix_in, g.row.prefix_out
                    if pin is not None and m.address[: len(pin)] == pin:
                        self.down_mail.append((v - 1, Move(m.address[len(pin):], m.payload)))
                        continue
                    rel = Move(m.address[len(pout):], m.payload)
                    if v == top:
                        out.append(rel)
                    else:
                        self.rows[v + 1].inject(ANTECEDENT, [rel])
        except IllegalPremiseBehavior as e:
            self.errors.append(str(e))
            self.retired = True
            return []
        kept = []
        for m in out:
            try:
                self.intake.position = check_move(self.intake.position, LabMove(TOP, m))
            except IllegalMove as e:
                self.errors.append(str(e))
                continue
            kept.append(m)
        self.peak_space = max(self.peak_space, self.space())
        return kept

    def space(self):
        base = sum(size(v) for v in self.intake.values.values() if isinstance(v, int))
        return base + sum(g.session.space() for g in self.rows)

    def settled(self):
        if self.retired or not self.rows:
            return True
        return not self.down_mail and all(g.quiet() for g in self.rows)

    def stats(self):
        return {"live": len(self.rows), "steps": self.row_steps}


# ---------------------------------------------------------- composed strategy


@dataclass
class ComposedStrategy(Strategy):
    """A strategy for the closure of ``F`` built from an induction's premise strategies."""

    composer: str
    base: Strategy
    step_strategy: Strategy
    f: Formula
    var: str
    mode: str = "cla5"
    funcs: Optional[dict] = None
    truth_cap: int = 64
    bound: Optional[Bound] = None
    space_bound: object = None
    time_bound: object = None
    name: str = "induction"

    def __post_init__(self):
        self.target = choice_closure(self.f)
        self.player = TOP
        self.depth = max(depth(self.f), 1)
        self.size_mode = POLYNOMIAL if self.mode == "cla5" else EXPONENTIAL

    def eta(self, ell: int) -> int:
        return _eta(self.f, ell, self.size_mode)

    def window(self, ell: int) -> int:
        """Cycles after which a silent row stays silent, for background ``ell``."""
        e = self.eta(ell)
        return max(self.base.quiescence(e), self.step_strategy.quiescence(e)) + 1

    def spawn(self):
        return SpaceSession(self) if self.composer == SPACE else ParallelSession(self)

    def quiescence(self, ell):
        if self.composer == SPACE:
            return 1
        return (self.depth + 1) * (2 * (1 << min(ell, 24)) + 2) * self.window(ell)

    @property
    def premises(self):
        return [self.base, self.step_strategy]

    def serialize(self) -> dict:
        return {
            "composer": self.composer,
            "premises": [getattr(self.base, "name", "N"), getattr(self.step_strategy, "name", "K")],
            "formula": pretty(self.target),
            "variable": self.var,
            "mode": self.mode,
            "bound": self.bound.describe() if self.bound else None,
        }


def _space_object(phi, eta):
    """``mu_slope * (phi(eta(w)) + eta(w) + w) + mu_offset``."""
    inner = fn_sum([fn_compose(phi, eta), eta, identity()])
    if isinstance(inner, Poly):
        return cla5_space_object(inner)
    return Elem(Plus(Times(num(MU_SLOPE), inner.term), num(MU_OFFSET)))


def induction_space(N: Strategy, K: Strategy, F: Formula, var: str, funcs=None, enforce=True,
                    truth_cap=64) -> ComposedStrategy:
    """Compose with the UP/DOWN machine; its bound is a space bound."""
    cls = classify(F)
    if enforce and not cls.polynomially_bounded:
        raise SideConditionError(f"the space composer needs a polynomially bounded formula: {pretty(F)}")
    s = ComposedStrategy(SPACE, N, K, F, var, "cla5", funcs, truth_cap, name=f"space({N.name},{K.name})")
    phi = _phi([N, K], "space_bound")
    if phi is None:
        if enforce:
            raise NotBounded("both premises need declared space bounds")
        phi = identity()
    eta = eta_term(F, POLYNOMIAL if cls.polynomially_bounded else EXPONENTIAL)
    s.space_bound = _space_object(phi, eta)
    s.bound = Bound(s.space_bound, "space")
    return s


def induction_parallel(N: Strategy, K: Strategy, F: Formula, var: str, mode="cla6", funcs=None,
                       enforce=True, truth_cap=64) -> ComposedStrategy:
    """Compose by running every row side by side; its bound is a time bound."""
    mode = str(mode).lower()
    if mode not in ("cla6", "cla7"):
        raise ValueError(f"unknown mode {mode}")
    cls = classify(F)
    if enforce and mode == "cla6" and not cls.exponentially_bounded:
        raise SideConditionError(f"the elementary composer needs an exponentially bounded formula: {pretty(F)}")
    s = ComposedStrategy(PARALLEL, N, K, F, var, mode, funcs, truth_cap, name=f"parallel({N.name},{K.name})")
    phi = _phi([N, K], "time_bound")
    if phi is None:
        if enforce:
            raise NotBounded("both premises need declared time bounds")
        phi = identity()
    if mode == "cla6" and cls.exponentially_bounded and not _is_pr(phi):
        s.time_bound = cla6_time_object(s.depth, phi, eta_term(F, EXPONENTIAL))
    else:
        s.time_bound = cla7_time_object(s.depth, phi)
    s.bound = Bound(s.time_bound, "time")
    return s


def _is_pr(f) -> bool:
    return not isinstance(f, (Poly, Elem))


# ------------------------------------------------------------------ benchmark


@dataclass
class BenchRow:
    """Measurements of one silent-environment run of a composed strategy."""

    k: int
    live: int  # peak number of row simulations held at once
    steps: int  # logical row steps
    space: int  # peak bits of retained state
    timecost: int
    background: int
    declared: Optional[int]  # the declared bound at this background, None past the cap
    won: bool


def bench(strategy: ComposedStrategy, ks, fill: int = 0, truth_cap: int = 64) -> list:
    """Run ``strategy`` with its induction variable set to each ``k`` and every
    other closure constant set to ``fill``; the environment then stays silent."""
    from ..bounds import ResourceCap
    from ..machines.verify import QUIET, play_line

    names = closure_vars(strategy.f)
    rows = []
    for k in ks:
        events = [(QUIET, Move((), k if n == strategy.var else fill)) for n in names]
        r = play_line(strategy, events, truth_cap)
        if r is None:
            raise ValueError(f"the closure constants for k={k} break a sizebound")
        try:
            declared = strategy.bound(r.background) if strategy.bound is not None else None
        except (ResourceCap, OverflowError, RecursionError):
            declared = None
        rows.append(BenchRow(k, r.stats.get("live", 0), r.stats.get("steps", 0), r.peak_space,
                             r.max_timecost, r.background, declared, r.verdict.winner is TOP))
    return rows
