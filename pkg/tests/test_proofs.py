import pytest

from clarith.bounds import PR, Elem, Poly, kind_name
from clarith.games import Move, TOP
from clarith.library import library_sources, shipped_dir
from clarith.machines import QUIET, play_line, verify_win
from clarith.proofs import (
    CheckFailed,
    ProofParseError,
    StrategyFileError,
    check_proof,
    errors,
    extract,
    library,
    load_strategy,
    parse_proof,
    parse_strategy_file,
    relax_proof,
    write_proof,
    write_strategy,
)
from clarith.syntax import pretty

LIB = dict(library())
EXPECTED = {
    "doubling", "halving", "binary-induction", "doubling-relaxed", "exponential", "exponential-cla7",
    "pr-successor", "pr-zero", "pr-projection", "pr-composition", "pr-recursion",
}

AXIOM8_ONLY = '(proof (system CLA5) (node a (axiom 8)) (root a))'


def codes(p, system=None):
    return sorted({d.code for d in errors(check_proof(p, system))})


def answers(strategy, constants):
    events = [(QUIET, Move((), c)) for c in constants]
    r = play_line(strategy, events)
    return [lm.move.payload for _, lm in r.records if lm.player is TOP], r.verdict


class TestLibrary:
    def test_contents(self):
        assert set(LIB) == EXPECTED

    def test_sources_match_shipped_files(self):
        for name, text in library_sources().items():
            assert (shipped_dir() / f"{name}.clp").read_text() == text

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_home_system(self, name):
        assert codes(LIB[name]) == []


class TestCheck:
    def test_doubling_under_cla5(self):
        assert LIB["doubling"].system == "CLA5" and codes(LIB["doubling"], "CLA5") == []

    def test_exponential_needs_cla6(self):
        p = LIB["exponential"]
        assert codes(p, "CLA5") == ["SideConditionViolation"]
        assert codes(p, "CLA6") == []

    def test_unbounded_only_under_cla7(self):
        p = LIB["pr-recursion"]
        assert codes(p, "CLA5") == codes(p, "CLA6") == ["SideConditionViolation"]
        assert codes(p, "CLA7") == []

    def test_dangling(self):
        p = parse_proof('(proof (system CLA5) (node a (lc (concl "0 = 0") (prem b) (script))) (root a))')
        assert codes(p) == ["DanglingRef"]

    def test_unknown_axiom(self):
        p = parse_proof('(proof (system CLA5) (node a (axiom 12)) (root a))')
        assert codes(p) == ["UnknownAxiom"]

    def test_axiom_nine_deprecated(self):
        p = parse_proof('(proof (system CLA5) (node a (axiom 9)) (root a))')
        diags = check_proof(p)
        assert not errors(diags) and [d.code for d in diags] == ["Deprecated"]

    def test_malformed_induction(self):
        text = LIB["exponential"].text().replace("(basis exp-basis)", "(basis exp-step)")
        assert "MalformedInduction" in codes(parse_proof(text))

    def test_script_type_error(self):
        text = AXIOM8_ONLY.replace(
            "(root a)",
            '(node b (lc (concl "chall x. chex y. y = x\'") (prem a) (script (move . $q)))) (root b)',
        )
        assert codes(parse_proof(text)) == ["ScriptTypeError"]

    def test_cycle(self):
        text = (
            '(proof (system CLA5) '
            '(node a (lc (concl "0 = 0") (prem b) (script))) '
            '(node b (lc (concl "0 = 0") (prem a) (script))) (root a))'
        )
        assert codes(parse_proof(text)) == ["CyclicProof"]

    def test_parse_error(self):
        with pytest.raises(ProofParseError):
            parse_proof("(proof (system CLA5) (node a (axiom 8))")

    def test_diagnostics_sorted_by_node(self):
        text = (
            '(proof (system CLA5) (node b (lc (concl "0 = 0") (prem zz) (script))) '
            '(node a (lc (concl "0 = 0") (prem yy) (script))) (node c (lc (concl "0 = 0") (prem a b) (script))) (root c))'
        )
        assert [d.node for d in check_proof(parse_proof(text))] == ["a", "b"]


class TestExtract:
    def test_doubling_answers(self):
        sol = extract(LIB["doubling"])
        assert sol.bound_kind == "space" and isinstance(sol.bound, Poly)
        for n in range(9):
            moves, verdict = answers(sol.strategy, [n])
            assert moves == [2 * n] and verdict.winner is TOP

    def test_exponential_answers(self):
        sol = extract(LIB["exponential"])
        assert sol.bound_kind == "time" and isinstance(sol.bound, Elem)
        for n in range(5):
            assert answers(sol.strategy, [n])[0] == [2**n]

    def test_single_axiom(self):
        sol = extract(parse_proof(AXIOM8_ONLY))
        assert sol.bound_kind == "space" and kind_name(sol.bound) == "polynomial"
        assert answers(sol.strategy, [5])[0] == [6]

    def test_pr_addition(self):
        sol = extract(LIB["pr-recursion"])
        assert isinstance(sol.bound, PR)
        assert answers(sol.strategy, [2, 3])[0] == [5]

    def test_refuses_unchecked(self):
        with pytest.raises(CheckFailed) as e:
            extract(LIB["exponential"], "CLA5")
        assert any(d.code == "SideConditionViolation" for d in e.value.diagnostics)

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_bound_kind_matches_system(self, name):
        sol = extract(LIB[name])
        expected = {"CLA5": (Poly, "space"), "CLA6": (Elem, "time"), "CLA7": (PR, "time")}[sol.system]
        assert (type(sol.bound), sol.bound_kind) == expected


class TestSystemMonotonicity:
    @pytest.mark.parametrize("name", sorted(n for n, p in LIB.items() if p.system == "CLA5"))
    def test_relaxed_checks_under_cla6(self, name):
        q = relax_proof(LIB[name])
        assert q.system == "CLA6" and codes(q) == []
        assert verify_win(extract(q).strategy, max_const=4).ok

    @pytest.mark.parametrize("name", sorted(n for n, p in LIB.items() if p.system == "CLA6"))
    def test_cla6_verbatim_under_cla7(self, name):
        p = LIB[name]
        assert codes(p.with_system("CLA7")) == []


class TestFiles:
    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_proof_round_trip(self, name):
        text = write_proof(LIB[name])
        assert write_proof(parse_proof(text)) == text

    def test_strategy_file_round_trip(self):
        p = LIB["doubling"]
        sol = extract(p)
        text = write_strategy(sol, "doubling.clp")
        sf = parse_strategy_file(text)
        assert sf.proof_ref == "doubling.clp" and sf.system == "CLA5"
        assert sf.formula == pretty(sol.strategy.target)
        assert sf.bound.startswith("space")
        s = load_strategy(sf, p)
        assert answers(s, [4])[0] == [8]

    def test_strategy_file_for_inner_node(self):
        p = LIB["exponential"]
        sf = parse_strategy_file(write_strategy(extract(p), "x.clp", node="exp-bounded"))
        assert sf.composer == "induction-parallel" and sf.premises == ("exp-basis", "exp-step")

    def test_stale_strategy_file(self):
        p = LIB["doubling"]
        sf = parse_strategy_file(write_strategy(extract(p), "doubling.clp"))
        sf.formula = "chall x. chex y. y = x"
        with pytest.raises(StrategyFileError):
            load_strategy(sf, p)

    def test_bad_strategy_file(self):
        with pytest.raises(StrategyFileError):
            parse_strategy_file("(strategy (system CLA5))")
