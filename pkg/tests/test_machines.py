import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from clarith.bounds import const, identity, quiescence_bound
from clarith.compose import axiom_strategy
from clarith.games import TOP, Move
from clarith.machines import (
    OracleStrategy,
    ScheduleOverrun,
    run_scheduled,
    meters,
    verify_win,
)
from clarith.machines.strategy import FunctionStrategy
from clarith.machines.toyhpm import (
    SINK,
    Config,
    IllFormedConfig,
    ToyHPM,
    check_quiescence,
    config_bound_check,
    count_reachable,
    emission_times,
    family,
    family_tables,
    first_emission,
    family_counterexamples,
    format_toyhpm,
    machine_from_pick,
    parse_toyhpm,
    step_configuration,
)
from clarith.syntax import parse_formula


# ------------------------------------------------------------ scheduled runs


def test_axiom_eight_waits():
    t = run_scheduled(axiom_strategy(8), {}, 10)
    assert t.machine_moves() == []


def test_axiom_eight_answers():
    t = run_scheduled(axiom_strategy(8), {0: [Move((), 3)]}, 10)
    moves = t.machine_moves()
    assert [m for _, m in moves] == [Move((), 4)]
    assert moves[0][0] <= 10


def test_deterministic():
    s = axiom_strategy(9)
    a = run_scheduled(s, {0: [Move((), 7)]}, 12)
    b = run_scheduled(s, {0: [Move((), 7)]}, 12)
    assert a.records == b.records and a.spacecost == b.spacecost


def test_schedule_overrun():
    with pytest.raises(ScheduleOverrun):
        run_scheduled(axiom_strategy(8), {10: [Move((), 1)]}, 10)


def _delayed_answer(delay):
    """Answers the first constant plus one, ``delay`` cycles after it arrives."""

    def step(state, observed):
        seen, clock = state
        if observed and seen is None:
            return (observed[0].payload, 0), []
        if seen is None:
            return state, []
        clock += 1
        if clock == delay:
            return (seen, clock), [Move((), seen + 1)]
        return (seen, clock), []

    return FunctionStrategy(step, (None, 0), target=parse_formula("chall x. chex y. y = x'"), quiet=delay + 1)


class TestMeters:
    def test_timecost_and_background(self):
        t = run_scheduled(_delayed_answer(5), {0: [Move((), 3)]}, 8)
        m = meters(t)
        assert m.timecost == [(5, 5)]
        assert m.background[0] == 2

    def test_silent_adversary(self):
        m = meters(run_scheduled(axiom_strategy(8), {}, 6))
        assert m.background == [0] * 6

    def test_background_steps(self):
        f = parse_formula("chall x. chall z. chex y. y = x'")
        s = FunctionStrategy(lambda st, obs: (st, []), None, target=f)
        m = meters(run_scheduled(s, {1: [Move((), 3)], 4: [Move((), 255)]}, 7))
        assert m.background == [0, 2, 2, 2, 8, 8, 8]

    def test_spacecost_monotone(self):
        t = run_scheduled(axiom_strategy(8), {2: [Move((), 1000)]}, 9)
        assert all(a <= b for a, b in zip(t.spacecost, t.spacecost[1:]))


# --------------------------------------------------------- quiescence bound


class TestQuiescenceBound:
    def test_worked_example(self):
        assert quiescence_bound(2, 2, 1, 2, identity()) == 14336
        assert oracles.configuration_product(2, 2, 1, 2, 2) == 14336

    def test_single_symbol(self):
        assert quiescence_bound(3, 1, 2, 5, identity()) == 3 * 5 * (2 * 2 * 5 + 2 * 2 + 1)

    def test_zero_depth(self):
        s, q, eta = 2, 3, 4
        assert quiescence_bound(s, q, 0, eta, identity()) == s * eta * 1 * q**eta * q


# -------------------------------------------------------------- toy machines


def _chain(length, emit_from, work=1):
    """States 0..length walking right to left through a silent chain, then emitting forever."""
    trans = {}
    for s in range(length):
        trans[(s, 0, 0)] = (s + 1, 0, 0, 0, s + 1 > emit_from)
    trans[(length, 0, 0)] = (length, 0, 0, 0, True)
    return ToyHPM(length + 1, 1, work, trans)


class TestToyHPM:
    def test_halted_is_fixed_point(self):
        m = ToyHPM(2, 2, 2, {})
        c = m.initial()
        assert step_configuration(m, c, (0,)) == c

    def test_space_violation_sinks(self):
        m = ToyHPM(1, 1, 1, {(0, 0, 0): (0, 0, 1, 0, False)})
        assert step_configuration(m, m.initial(), (0,)).state == SINK

    def test_ill_formed(self):
        m = ToyHPM(1, 2, 2, {})
        with pytest.raises(IllFormedConfig):
            step_configuration(m, Config(0, 5, 0, (0, 0)), (0,))

    def test_silent_loop_passes(self):
        m = ToyHPM(2, 1, 1, {(0, 0, 0): (1, 0, 0, 0, False), (1, 0, 0): (0, 0, 0, 0, False)})
        assert check_quiescence(m, 4, 8).passed

    def test_early_moves_pass(self):
        m = ToyHPM(2, 1, 1, {(0, 0, 0): (1, 0, 0, 0, True)})
        r = check_quiescence(m, 3, 6)
        assert r.passed and r.emissions == [0]

    def test_late_mover_reported(self):
        m = _chain(5, emit_from=5)
        r = check_quiescence(m, 3, 12)
        assert not r.passed and r.counterexample == (0, 5)
        # it really has more configurations than the budget it was held to
        assert count_reachable(m, (0,)) > 3

    def test_bound_check_pass(self):
        m = _chain(3, emit_from=3)
        assert config_bound_check(m, m.initial(), const(10)).passed

    def test_bound_check_fail(self):
        m = _chain(3, emit_from=3)
        r = config_bound_check(m, m.initial(), const(2))
        assert not r.passed and r.late_move == 3

    def test_description_round_trip(self):
        m = machine_from_pick(2, 2, 2, [3, 0, 17, 5, 40, 1, 0, 9])
        assert parse_toyhpm(format_toyhpm(m)) == m


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 3),
    st.integers(1, 2),
    st.integers(1, 3),
    st.integers(1, 4),
    st.integers(0, 2**32 - 1),
)
def test_configuration_counting(states, symbols, work, run_len, seed):
    """Distinct in-space configurations on one run stay within the counting product."""
    rng = np.random.default_rng(seed)
    picks, _, _ = family(states, symbols, 1, rng)
    m = machine_from_pick(states, symbols, work, picks[0])
    budget = states * work * run_len * symbols**work * symbols**run_len
    for tape in itertools.product(range(symbols), repeat=run_len):
        c, seen = m.initial(), set()
        while c not in seen and c.state != SINK:
            seen.add(c)
            c = step_configuration(m, c, tape)
        assert len(seen) <= budget


def test_family_enumeration_is_exhaustive_when_small():
    picks, exhaustive, total = family(1, 1, 10_000, np.random.default_rng(0))
    assert exhaustive and len(picks) == total == 19


def test_vectorised_tables_agree_with_literal_simulation():
    rng = np.random.default_rng(4)
    states, symbols, work, horizon = 2, 2, 2, 12
    picks, _, _ = family(states, symbols, 30, rng)
    for tape in itertools.product(range(symbols), repeat=2):
        succ, emit = family_tables(states, symbols, work, picks, tape)
        first = first_emission(succ, emit, horizon)
        for mi, pick in enumerate(picks):
            m = machine_from_pick(states, symbols, work, pick)
            for code in range(m.config_count(len(tape))):
                c = m.decode(code, len(tape))
                assert m.encode(step_configuration(m, c, tape), len(tape)) == succ[mi, code]
                times = emission_times(m, tape, horizon, c)
                assert first[mi, code] == (times[0] if times else horizon)


def test_family_counterexamples_are_real():
    # a deliberately tiny bound makes offenders common
    rng = np.random.default_rng(8)
    picks, _, _ = family(3, 2, 50, rng)
    found, checked = family_counterexamples(3, 2, 1, picks, 2, 2)
    assert found and checked == 50 * 4 * (3 * 1 * 2 * 2 + 1)
    for m, tape, code, first in found:
        r = check_quiescence(m, 2, 4, tape, m.decode(code, len(tape)))
        assert not r.passed and first in r.emissions


# -------------------------------------------------------------- verification


def test_verify_win_axiom():
    assert verify_win(axiom_strategy(8), max_const=8).ok


def test_verify_win_catches_broken_strategy():
    def wrong(state, observed):
        return state, [Move((), m.payload) for m in observed]

    s = FunctionStrategy(wrong, None, target=parse_formula("chall x. chex y. y = x'"))
    r = verify_win(s, max_const=3)
    assert not r.ok and r.losing is not None


def test_oracle_strategy_wins_where_oracle_says():
    f = parse_formula("chall x. (x = 0 chor ~x = 0)")
    assert verify_win(OracleStrategy(f, TOP), max_const=4).ok
