import pytest

from clarith.bounds import kind_name
from clarith.compose import (
    ScriptTypeError,
    axiom_strategy,
    copycat,
    induction_parallel,
    induction_space,
    parse_script,
    proc_down,
    proc_up,
    run_script,
    silent_strategy,
)
from clarith.compose.basic import UnknownAxiom
from clarith.compose.induction import SideConditionError
from clarith.compose.relay import PairingMismatch
from clarith.compose.updown import Meter, Rows
from clarith.corpus import AFFINE, DOUBLING, EXPONENTIAL
from clarith.games import LEFT, RIGHT, TOP, Move, winner
from clarith.machines import EAGER, QUIET, play_line, run_scheduled, verify_win
from clarith.syntax import parse_formula, size

P = parse_formula


def machine_moves(strategy, events):
    r = play_line(strategy, events)
    return [lm.move for _, lm in r.records if lm.player is strategy.player], r.verdict


class TestAxioms:
    def test_successor(self):
        moves, verdict = machine_moves(axiom_strategy(8), [(QUIET, Move((), 3))])
        assert moves == [Move((), 4)] and verdict.winner is TOP

    def test_peano_silent(self):
        for k in range(1, 8):
            s = axiom_strategy(k)
            assert run_scheduled(s, {}, 5).machine_moves() == []
        assert winner(P("0 + 0 = 0"), []).winner is TOP

    def test_doubling(self):
        moves, _ = machine_moves(axiom_strategy(9), [(QUIET, Move((), 5))])
        assert moves == [Move((), 10)]

    def test_unknown(self):
        with pytest.raises(UnknownAxiom):
            axiom_strategy("axiom12")


class TestScripts:
    def test_parity_basis(self):
        target = P("chex y. (|y| <= |0| /\\ (0 = y#0 chor 0 = y#1))")
        s = run_script(parse_script("(move . 0)\n(choose 1 left)"), target, [])
        moves, verdict = machine_moves(s, [])
        assert moves == [Move((), 0), Move((1,), LEFT)]
        assert verdict.winner is TOP

    def test_addition_step(self):
        target = P(
            "chall x. chall y. (chex z. (|z| <= |x| + |y| /\\ z = x + y)) "
            "-> (chex z. (|z| <= |x'| + |y| /\\ z = x' + y))"
        )
        script = parse_script("(wait . $x)\n(wait . $y)\n(wait 0 $a)\n(query ($b) 0 $a)\n(move 1 $b)")
        s = run_script(script, target, [axiom_strategy(8)])
        events = [(QUIET, Move((), 1)), (QUIET, Move((), 1)), (QUIET, Move((0,), 2))]
        moves, verdict = machine_moves(s, events)
        assert moves == [Move((1,), 3)] and verdict.winner is TOP

    def test_empty_script(self):
        s = run_script(parse_script(""), P("0 = 0"), [])
        moves, verdict = machine_moves(s, [])
        assert moves == [] and verdict.winner is TOP

    def test_type_errors(self):
        target = P("chall x. chex y. y = x'")
        with pytest.raises(ScriptTypeError):
            run_script(parse_script("(move . $nothing)"), target, [])
        with pytest.raises(ScriptTypeError):
            run_script(parse_script("(wait . $x)\n(choose . left)"), target, [])
        with pytest.raises(ScriptTypeError):
            parse_script("(jump . 3)")


class TestCopycat:
    def test_identity_implication(self):
        text = "chall x. (x = 0 chor chex y. y = x)"
        f = P(text)
        s = copycat(P(f"({text}) -> ({text})"), [((0,), (1,))])
        report = verify_win(s, max_const=4, keep_results=True)
        assert report.ok
        for r in report.results:
            assert r.position.l == r.position.r
        assert f == s.target.l

    def test_empty_pairing(self):
        s = copycat(P("0 = 0"), [])
        assert run_scheduled(s, {}, 4).machine_moves() == []

    def test_polarity(self):
        s = copycat(P("(0 = 0 chand 0 = 1) -> (0 = 0 chand 0 = 1)"), [((0,), (1,))])
        moves, verdict = machine_moves(s, [(QUIET, Move((1,), RIGHT))])
        assert moves == [Move((0,), RIGHT)] and verdict.winner is TOP

    def test_mismatch(self):
        with pytest.raises(PairingMismatch):
            copycat(P("(a = 0 chand b = 0) -> (a = 0 chor b = 0)"), [((0,), (1,))])


class TestUpDown:
    def rows(self, inst, k):
        n, s = inst.strategies()
        return Rows(n, s, inst.f, inst.var, k)

    def test_up_base(self):
        assert proc_up(0, 0, [], self.rows(DOUBLING, 0), 10) == [[Move((), 0)]]

    def test_up_doubling(self):
        for k in range(5):
            assert proc_up(0, k, [], self.rows(DOUBLING, k), 10) == [[Move((), 2 * k)]]

    def test_up_silent(self):
        f = DOUBLING.f
        rows = Rows(silent_strategy(P("0 = 0")), silent_strategy(P("0 = 0")), f, "x", 3)
        assert proc_up(0, 3, [], rows, 5) == [[]]

    def test_down_silent_rows(self):
        f = AFFINE.f
        rows = Rows(silent_strategy(P("0 = 0")), silent_strategy(P("0 = 0")), f, "x", 3)
        assert proc_down(1, 3, [[Move((), 1)]], rows, 5) == [[]]

    def test_down_hand_trace(self):
        # row v (handling x = v-1) passes u down iff |u| <= |v-1|
        for k in range(1, 4):
            for u in range(k + 1):
                if size(u) > size(k):
                    continue
                for i in range(1, k + 1):
                    passes = all(size(u) <= size(v - 1) for v in range(i, k + 1))
                    expected = [[Move((), u)]] if passes else [[]]
                    assert proc_down(1, i, [[Move((), u)]], self.rows(AFFINE, k), 20) == expected

    def test_recomputation(self):
        rows = self.rows(AFFINE, 3)
        a = proc_down(1, 2, [[Move((), 1)]], rows, 20)
        b = proc_down(1, 2, [[Move((), 1)]], rows, 20)
        assert a == b
        assert proc_up(1, 3, [[Move((), 1)]], rows, 20) == proc_up(1, 3, [[Move((), 1)]], rows, 20)

    def test_meter_counts_live_rows(self):
        m = Meter()
        proc_up(1, 3, [[Move((), 1)]], self.rows(AFFINE, 3), 20, m)
        assert m.simulations > 0 and m.peak_live >= 1


def composers(inst, mode="cla6"):
    n, s = inst.strategies()
    return (
        induction_space(n, s, inst.f, inst.var, enforce=False),
        induction_parallel(n, s, inst.f, inst.var, mode=mode, enforce=False),
    )


class TestInduction:
    def test_doubling_k3(self):
        for c in composers(DOUBLING, "cla7"):
            moves, verdict = machine_moves(c, [(QUIET, Move((), 3))])
            assert moves == [Move((), 6)] and verdict.winner is TOP

    def test_exponential_k3(self):
        n, s = EXPONENTIAL.strategies()
        c = induction_parallel(n, s, EXPONENTIAL.f, "x", mode="cla6")
        moves, verdict = machine_moves(c, [(QUIET, Move((), 3))])
        assert moves == [Move((), 8)] and verdict.winner is TOP

    def test_zero_plays_basis(self):
        n, s = DOUBLING.strategies()
        for c in composers(DOUBLING, "cla7"):
            moves, _ = machine_moves(c, [(QUIET, Move((), 0))])
            assert moves == machine_moves(n, [])[0]

    def test_agreement(self):
        space, parallel = composers(AFFINE, "cla7")
        for k in range(6):
            for u in range(8):
                if size(u) > size(k):
                    continue
                for timing in (QUIET, EAGER):
                    events = [(QUIET, Move((), k)), (timing, Move((), u))]
                    assert machine_moves(space, events) == machine_moves(parallel, events)

    def test_side_conditions(self):
        n, s = EXPONENTIAL.strategies()
        with pytest.raises(SideConditionError):
            induction_space(n, s, EXPONENTIAL.f, "x")
        n, s = DOUBLING.strategies()
        induction_parallel(n, s, DOUBLING.f, "x", mode="cla7")

    def test_bound_objects(self):
        space, parallel = composers(DOUBLING, "cla7")
        assert space.bound.kind == "space" and kind_name(space.bound.function) == "polynomial"
        assert parallel.bound.kind == "time" and kind_name(parallel.bound.function) == "primitive-recursive"
        _, exp6 = composers(EXPONENTIAL, "cla6")
        assert kind_name(exp6.bound.function) == "elementary"

    @pytest.mark.parametrize("k", [0, 1, 5, 17, 64])
    def test_space_frugality(self, k):
        space, parallel = composers(DOUBLING, "cla7")
        ts = run_scheduled(space, {0: [Move((), k)]}, 3)
        assert ts.session.stats()["live"] <= 2
        tp = run_scheduled(parallel, {0: [Move((), k)]}, 3)
        assert tp.session.stats()["live"] == k + 1

    def test_winner_transport_small(self):
        for inst in (DOUBLING, AFFINE):
            for c in composers(inst, "cla7"):
                assert verify_win(c, max_const=4).ok
