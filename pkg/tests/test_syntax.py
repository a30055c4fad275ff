import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from generators import formulas, game_corpus
from clarith.syntax import (
    FALSE,
    POLYNOMIAL,
    TRUE,
    And,
    ChAll,
    ChEx,
    Eq,
    Len,
    Leq,
    NotClosed,
    NotPolyBounded,
    Or,
    ParseError,
    Plus,
    Sizebound,
    Succ,
    Var,
    WrongKind,
    Zero,
    choice_closure,
    classify,
    depth,
    elementarize,
    exp_relax_formula,
    free_vars,
    is_elementary,
    overline,
    parse_formula,
    parse_term,
    politeral_count,
    pretty,
    relax_sizebound,
    subformulas,
    substitute,
)
from clarith.games import eval_elementary

P = parse_formula


class TestParse:
    def test_axiom_eight(self):
        assert P("chall x. chex y. y = x'") == ChAll("x", ChEx("y", Eq(Var("y"), Succ(Var("x")))))

    def test_trivial_atom(self):
        assert P("0 = 0") == Eq(Zero(), Zero())

    def test_bounded_sum(self):
        x, y, z = Var("x"), Var("y"), Var("z")
        expected = ChEx("z", And(Leq(Len(z), Plus(Len(x), Len(y))), Eq(z, Plus(x, y))))
        assert P("chex z. (|z| <= |x| + |y| /\\ z = x + y)") == expected

    def test_error_position(self):
        with pytest.raises(ParseError) as e:
            P("0 = ")
        assert e.value.line == 1 and e.value.column == 5
        assert e.value.expected

    def test_nested_length_rejected(self):
        with pytest.raises(ParseError):
            P("||x|| = 0")

    def test_choice_inside_classical_quantifier_rejected(self):
        with pytest.raises(ParseError):
            P("all x. chex y. y = x")

    def test_precedence(self):
        f = P("a = 0 /\\ b = 0 \\/ c = 0 -> d = 0 -> e = 0")
        assert pretty(P(pretty(f))) == pretty(f)
        assert type(f).__name__ == "Imp" and type(f.r).__name__ == "Imp"
        assert isinstance(f.l, Or) and isinstance(f.l.l, And)

    def test_term_precedence(self):
        assert parse_term("x + y * z'") == Plus(Var("x"), parse_term("y * (z')"))


class TestDepth:
    def test_elementary(self):
        assert depth(P("0 = 0")) == 0

    def test_nested_quantifiers(self):
        assert depth(P("chall x. chex y. y = x'")) == 2

    def test_conjunction_adds(self):
        assert depth(P("(chex y. y = 0) /\\ chall x. (x = 0 chor ~x = 0)")) == 3

    def test_against_brute_force(self):
        for f in game_corpus(60, seed=7, choice_budget=4, max_const=4):
            assert depth(f) == oracles.longest_run(f, cap=1), pretty(f)


class TestElementarize:
    def test_existential_is_false(self):
        assert elementarize(P("chex y. y = x'")) == FALSE

    def test_universal_is_true(self):
        assert elementarize(P("chall x. x = x")) == TRUE

    def test_antecedent(self):
        e = elementarize(P("(chex y. y = 0) -> 0 = 0"))
        assert is_elementary(e)
        assert eval_elementary(e) is True


class TestClassify:
    def test_exponential_only(self):
        c = classify(P("chex z. (|z| <= x' /\\ z = exp(x))"))
        assert c.exponentially_bounded and not c.polynomially_bounded

    def test_polynomial(self):
        assert classify(P("chex z. (|z| <= |x| + |y| /\\ z = x + y)")).polynomially_bounded

    def test_unguarded(self):
        c = classify(P("chex y. y = x'"))
        assert not c.polynomially_bounded and not c.exponentially_bounded

    def test_elementary_has_depth_zero(self):
        c = classify(P("all x. x = x"))
        assert c.elementary and c.depth == 0


class TestRelax:
    def test_sum_of_sizes(self):
        s = Sizebound("z", parse_term("|y1| + |y2|"), POLYNOMIAL)
        assert relax_sizebound(s).bound_term == parse_term("y1 + y2")

    def test_product_of_sizes(self):
        s = Sizebound("z", parse_term("|y| * |y|"), POLYNOMIAL)
        assert relax_sizebound(s).bound_term == parse_term("y * y")

    def test_constant_unchanged(self):
        s = Sizebound("z", parse_term("0'"), POLYNOMIAL)
        assert relax_sizebound(s).bound_term == parse_term("0'")

    def test_wrong_kind(self):
        with pytest.raises(WrongKind):
            relax_sizebound(relax_sizebound(Sizebound("z", parse_term("|y|"), POLYNOMIAL)))

    def test_formula_universal(self):
        out = exp_relax_formula(P("chall z. (|z| <= |x| -> z = z)"))
        assert out == P("chall z. (|z| <= x -> (|z| <= |x| -> z = z))")

    def test_formula_existential(self):
        out = exp_relax_formula(P("chex z. (|z| <= |x| /\\ z = x)"))
        assert out == P("chex z. (|z| <= x /\\ (|z| <= |x| /\\ z = x))")
        assert classify(out).exponentially_bounded

    def test_elementary_unchanged(self):
        f = P("x = x + 0")
        assert exp_relax_formula(f) == f

    def test_not_bounded(self):
        with pytest.raises(NotPolyBounded):
            exp_relax_formula(P("chex y. y = x'"))


class TestOverline:
    def test_single_literal(self):
        assert overline(P("x = 0"), P("0 = 0'")) == Or(P("x = 0"), P("0 = 0'"))

    def test_choice_body(self):
        sentence = P("0 = 0'")
        f = P("chex y. y = x'")
        assert overline(f, sentence) == ChEx("y", Or(P("y = x'"), sentence))
        assert elementarize(overline(f, sentence)) == elementarize(f)

    def test_or_count(self):
        f = P("x = 0 /\\ ~y = 0")
        before = sum(isinstance(g, Or) for g in subformulas(f))
        after = sum(isinstance(g, Or) for g in subformulas(overline(f, TRUE)))
        assert after - before == politeral_count(f) == 2

    def test_not_closed(self):
        with pytest.raises(NotClosed):
            overline(P("x = 0"), P("y = 0"))


class TestSubstitution:
    def test_plain(self):
        assert substitute(P("chex y. y = x'"), "x", Zero()) == P("chex y. y = 0'")

    def test_closure_order(self):
        assert choice_closure(P("y = x'")) == P("chall x. chall y. y = x'")

    def test_capture_avoided(self):
        out = substitute(P("chex y. y = x'"), "x", Var("y"))
        assert out == P("chex y1. y1 = y'")
        assert free_vars(out) == {"y"}


# ----------------------------------------------------------------- properties


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_round_trip(f):
    assert P(pretty(f)) == f


@settings(max_examples=150, deadline=None)
@given(formulas())
def test_elementarize_elementary_and_idempotent(f):
    e = elementarize(f)
    assert is_elementary(e)
    assert elementarize(e) == e


@settings(max_examples=100, deadline=None)
@given(formulas())
def test_overline_preserves_depth(f):
    assert depth(overline(f, P("0 = 0'"))) == depth(f)


def _poly_guarded():
    atoms = st.sampled_from(["z = x", "z <= y + x", "x = y"])
    bounds = st.sampled_from(["|x|", "|x| + |y|", "|y| * |x|", "0''", "|x| + 2"])

    def extend(inner):
        return st.one_of(
            st.tuples(bounds, inner).map(lambda p: f"chex z. (|z| <= {p[0]} /\\ ({p[1]}))"),
            st.tuples(bounds, inner).map(lambda p: f"chall z. (|z| <= {p[0]} -> ({p[1]}))"),
            st.tuples(inner, inner).map(lambda p: f"({p[0]}) chand ({p[1]})"),
            st.tuples(inner, inner).map(lambda p: f"({p[0]}) /\\ ({p[1]})"),
        )

    return st.recursive(atoms, extend, max_leaves=5).map(P)


@settings(max_examples=100, deadline=None)
@given(_poly_guarded())
def test_exp_relax_passes_classifier(f):
    assert classify(f).polynomially_bounded
    assert classify(exp_relax_formula(f)).exponentially_bounded
