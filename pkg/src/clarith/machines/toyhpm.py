"""A literal toy interactive machine, small enough to enumerate.

The machine has ``states`` control states (state 0 starts), a work tape
of ``work`` cells over ``symbols`` symbols (initially all 0) and a
read-only run tape of fixed content.  A transition is keyed by
``(state, work symbol, run symbol)`` and yields
``(new state, symbol to write, work move, run move, emit)``, where moves
are -1, 0 or +1.  A configuration without a transition is halted and
stays put.  Moving the work head past the last cell is a space
violation and sends the machine to a halted sink.  The run head stays
within the written part of the run tape.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..bounds import call

SINK = -1  # state of the space-violation sink


class IllFormedConfig(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    state: int
    work_head: int
    run_head: int
    work: tuple


@dataclass
class ToyHPM:
    states: int
    symbols: int
    work: int
    transitions: dict = field(default_factory=dict)

    def initial(self) -> Config:
        return Config(0, 0, 0, (0,) * self.work)

    # configurations <-> integers (mixed radix); the sink is the last code
    def config_count(self, run_len: int) -> int:
        return self.states * self.work * run_len * self.symbols**self.work + 1

    def encode(self, c: Config, run_len: int) -> int:
        if c.state == SINK:
            return self.config_count(run_len) - 1
        code = c.state
        code = code * self.work + c.work_head
        code = code * run_len + c.run_head
        for s in c.work:
            code = code * self.symbols + s
        return code

    def decode(self, code: int, run_len: int) -> Config:
        if code == self.config_count(run_len) - 1:
            return Config(SINK, 0, 0, (0,) * self.work)
        cells = []
        for _ in range(self.work):
            code, s = divmod(code, self.symbols)
            cells.append(s)
        code, rh = divmod(code, run_len)
        state, wh = divmod(code, self.work)
        return Config(state, wh, rh, tuple(reversed(cells)))

    def validate(self, c: Config, run_tape) -> None:
        if c.state == SINK:
            return
        ok = (
            0 <= c.state < self.states
            and 0 <= c.work_head < self.work
            and 0 <= c.run_head < len(run_tape)
            and len(c.work) == self.work
            and all(0 <= s < self.symbols for s in c.work)
        )
        if not ok:
            raise IllFormedConfig(repr(c))

    def emits(self, c: Config, run_tape) -> bool:
        if c.state == SINK:
            return False
        t = self.transitions.get((c.state, c.work[c.work_head], run_tape[c.run_head]))
        return bool(t and t[4])


def step_configuration(m: ToyHPM, c: Config, run_tape) -> Config:
    """The deterministic successor of ``c``; halted configurations are fixed points."""
    m.validate(c, run_tape)
    if c.state == SINK:
        return c
    t = m.transitions.get((c.state, c.work[c.work_head], run_tape[c.run_head]))
    if t is None:
        return c
    nstate, write, dw, dr, _ = t
    work = list(c.work)
    work[c.work_head] = write
    wh = c.work_head + dw
    if wh >= m.work:
        return Config(SINK, 0, 0, (0,) * m.work)
    wh = max(wh, 0)
    rh = min(max(c.run_head + dr, 0), len(run_tape) - 1)
    return Config(nstate, wh, rh, tuple(work))


def emission_times(m: ToyHPM, run_tape, horizon: int, start: Optional[Config] = None) -> list:
    c = start or m.initial()
    out = []
    for t in range(horizon):
        if m.emits(c, run_tape):
            out.append(t)
        c = step_configuration(m, c, run_tape)
    return out


@dataclass
class QuiescenceReport:
    passed: bool
    counterexample: Optional[tuple] = None  # (silence start c, emission time)
    emissions: list = field(default_factory=list)


def check_quiescence(m: ToyHPM, bound: int, horizon: int, run_tape=(0,), start=None) -> QuiescenceReport:
    """Literal simulation: after ``bound`` silent cycles, no move may follow before ``horizon``."""
    if horizon < 2 * bound:
        raise ValueError("horizon must be at least twice the bound")
    times = emission_times(m, run_tape, horizon, start)
    prev = -1
    for t in times:
        gap_start = prev + 1
        if t - gap_start >= bound:
            return QuiescenceReport(False, (gap_start, t), times)
        prev = t
    return QuiescenceReport(True, None, times)


@dataclass
class ConfigBoundReport:
    passed: bool
    late_move: Optional[int] = None
    limit: int = 0


def config_bound_check(m: ToyHPM, z: Config, chi_prime, run_tape=(0,)) -> ConfigBoundReport:
    """Every move in the successors of ``z`` must come before index ``chi_prime(code of z)``.

    The orbit of ``z`` is followed until a configuration repeats, which
    covers the entire future of the machine.
    """
    m.validate(z, run_tape)
    limit = call(chi_prime, m.encode(z, len(run_tape)))
    seen, c, i = {}, z, 0
    while c not in seen:
        seen[c] = i
        if m.emits(c, run_tape) and i >= limit:
            return ConfigBoundReport(False, i, limit)
        c = step_configuration(m, c, run_tape)
        i += 1
    return ConfigBoundReport(True, None, limit)


def count_reachable(m: ToyHPM, run_tape, start=None) -> int:
    c, seen = start or m.initial(), set()
    while c not in seen:
        seen.add(c)
        c = step_configuration(m, c, run_tape)
    return len(seen)


# ------------------------------------------------------- description files


_TRANS_RE = re.compile(
    r"\(?\s*(\d+)\s*,?\s*(\d+)\s*,?\s*(\d+)\s*\)?\s*->\s*\(?\s*(\d+)\s*,?\s*(\d+)\s*,?\s*([LSR])\s*,?\s*([LSR])\s*,?\s*(emit)?\s*\)?"
)
_DIR = {"L": -1, "S": 0, "R": 1}
_DIR_NAME = {v: k for k, v in _DIR.items()}


def parse_toyhpm(text: str) -> ToyHPM:
    """Read ``states``/``symbols``/``work`` headers and ``(s, w, r) -> (s', write, dW, dR, emit)`` lines."""
    header, trans = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] in ("states", "symbols", "work") and len(parts) == 2:
            header[parts[0]] = int(parts[1])
            continue
        m = _TRANS_RE.fullmatch(line)
        if not m:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        s, w, r, ns, wr = (int(m.group(i)) for i in range(1, 6))
        trans[(s, w, r)] = (ns, wr, _DIR[m.group(6)], _DIR[m.group(7)], m.group(8) is not None)
    missing = {"states", "symbols", "work"} - set(header)
    if missing:
        raise ValueError(f"missing header lines: {', '.join(sorted(missing))}")
    return ToyHPM(header["states"], header["symbols"], header["work"], trans)


def format_toyhpm(m: ToyHPM) -> str:
    lines = [f"states {m.states}", f"symbols {m.symbols}", f"work {m.work}"]
    for (s, w, r), (ns, wr, dw, dr, e) in sorted(m.transitions.items()):
        emit = ", emit" if e else ""
        lines.append(f"({s}, {w}, {r}) -> ({ns}, {wr}, {_DIR_NAME[dw]}, {_DIR_NAME[dr]}{emit})")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------- vectorised family check


def transition_options(states: int, symbols: int):
    """Every possible right-hand side of a transition, plus ``None`` for halting."""
    opts = [None]
    for ns, wr, dw, dr, e in itertools.product(range(states), range(symbols), (-1, 0, 1), (-1, 0, 1), (False, True)):
        opts.append((ns, wr, dw, dr, e))
    return opts


def family(states: int, symbols: int, limit: int, rng: np.random.Generator):
    """Transition choices for every machine of this shape, or a seeded sample of ``limit``.

    Returns ``(picks, exhaustive, total)``: ``picks[m, key]`` indexes
    :func:`transition_options` for key ``(state * symbols + w) * symbols + r``.
    """
    keys = states * symbols * symbols
    n_opts = len(transition_options(states, symbols))
    total = n_opts**keys
    if total <= limit:
        picks = np.array(list(itertools.product(range(n_opts), repeat=keys)), dtype=np.int64)
        return picks.reshape(-1, keys), True, total
    return rng.integers(0, n_opts, size=(limit, keys)), False, total


def machine_from_pick(states: int, symbols: int, work: int, pick) -> ToyHPM:
    opts = transition_options(states, symbols)
    keys = itertools.product(range(states), range(symbols), range(symbols))
    trans = {k: opts[int(i)] for k, i in zip(keys, pick) if opts[int(i)] is not None}
    return ToyHPM(states, symbols, work, trans)


def family_tables(states: int, symbols: int, work: int, picks: np.ndarray, run_tape):
    """``succ[m, code]`` and ``emit[m, code]`` for a batch of machines on one run tape."""
    q, R = symbols, len(run_tape)
    proto = ToyHPM(states, symbols, work)
    n = proto.config_count(R)
    opts = transition_options(states, symbols)
    halt = np.array([o is None for o in opts])
    o_ns = np.array([0 if o is None else o[0] for o in opts])
    o_wr = np.array([0 if o is None else o[1] for o in opts])
    o_dw = np.array([0 if o is None else o[2] for o in opts])
    o_dr = np.array([0 if o is None else o[3] for o in opts])
    o_em = np.array([False if o is None else o[4] for o in opts])

    codes = np.arange(n - 1)
    cells = np.empty((n - 1, work), dtype=np.int64)
    rest = codes.copy()
    for i in range(work - 1, -1, -1):
        rest, cells[:, i] = np.divmod(rest, q)
    rest, rh = np.divmod(rest, R)
    state, wh = np.divmod(rest, work)
    cur = cells[np.arange(n - 1), wh]
    tape = np.asarray(run_tape, dtype=np.int64)
    key = (state * q + cur) * q + tape[rh]

    opt = picks[:, key]  # (M, n-1)
    new_state = o_ns[opt]
    new_wh = wh[None, :] + o_dw[opt]
    new_rh = np.clip(rh[None, :] + o_dr[opt], 0, R - 1)
    weight = q ** (work - 1 - wh)
    cell_code = (codes % (q**work))[None, :] + (o_wr[opt] - cur[None, :]) * weight[None, :]
    moved = ((new_state * work + np.clip(new_wh, 0, work - 1)) * R + new_rh) * q**work + cell_code
    moved = np.where(new_wh >= work, n - 1, moved)
    stay = np.broadcast_to(codes, opt.shape)
    succ = np.where(halt[opt], stay, moved)
    emit = o_em[opt] & ~halt[opt]

    sink = np.full((picks.shape[0], 1), n - 1)
    succ = np.concatenate([succ, sink], axis=1)
    emit = np.concatenate([emit, np.zeros((picks.shape[0], 1), dtype=bool)], axis=1)
    return succ, emit


def first_emission(succ: np.ndarray, emit: np.ndarray, horizon: int) -> np.ndarray:
    """Cycles until the first move from every configuration, or ``horizon`` if none before it.

    Works on stacked tables (shape ``(batch, n)``) by pointer doubling.
    """
    batch_idx = np.arange(succ.shape[0])[:, None]
    first = np.where(emit, 0, horizon).astype(np.int64)
    jump = succ.copy()
    span = 1
    while span < horizon:
        later = first[batch_idx, jump] + span
        first = np.where(first < span, first, np.minimum(later, horizon))
        jump = jump[batch_idx, jump]
        span *= 2
    return first


def family_counterexamples(states: int, symbols: int, work: int, picks, run_len: int, bound: int):
    """Configurations silent for ``bound`` cycles that still move before ``2 * bound``.

    Every machine is checked on every run-tape content of length
    ``run_len`` and from every configuration.  Returns the offenders (at
    most a few per tape) and the number of (machine, tape, configuration)
    triples examined.
    """
    found, checked = [], 0
    for tape in itertools.product(range(symbols), repeat=run_len):
        succ, emit = family_tables(states, symbols, work, picks, tape)
        first = first_emission(succ, emit, 2 * bound)
        bad = np.argwhere((first >= bound) & (first < 2 * bound))
        checked += succ.size
        for mi, code in bad[:5]:
            found.append((machine_from_pick(states, symbols, work, picks[mi]), tape, int(code), int(first[mi, code])))
    return found, checked
