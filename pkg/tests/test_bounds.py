import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from generators import random_construction, random_elem_term
from clarith.bounds import (
    PR,
    SLACK,
    ArityMismatch,
    Elem,
    ForwardReference,
    DuplicateSymbol,
    IllFormedGraph,
    NotBounded,
    Poly,
    ResourceCap,
    bound_cla5_space,
    bound_cla6,
    bound_cla7,
    compose,
    eta_bound,
    eta_term,
    eval_fn,
    eval_graph,
    identity,
    iterate,
    iterate_eval,
    parse_graph,
    parse_pr,
    quiescence_bound,
    to_tree_term,
    validate_pr,
)
from clarith.syntax import App, Plus, Var, parse_formula, parse_term

ADDITION = """
def z/1 = proj/1/1
def s/1 = succ
def p/3 = proj/3/2
def h/3 = comp s p
def add/2 = rec z h
main add
"""

SECTION_GRAPH = "f1 = exp(x + x); f2 = f1(f1(x))"

# the sizebound example with a choice quantifier nested under another
POLY_EXAMPLE = "chex u. (|u| <= |x| * |z| /\\ chall v. (|v| <= |u| + |x| -> v = u))"
EXP_EXAMPLE = "chex u. (|u| <= x * z /\\ chall v. (|v| <= u + x -> v = u))"


def poly(text):
    return Poly(parse_term(text))


class TestEval:
    def test_tree_term_at_zero(self):
        assert eval_fn(Elem(to_tree_term(parse_graph(SECTION_GRAPH)), ("x",)), [0]) == 4

    def test_addition(self):
        assert eval_fn(PR(parse_pr(ADDITION)), [2, 3]) == 5

    def test_size_ceiling(self):
        assert eval_fn(poly("w * w + w + 4"), [3]) == 16

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatch):
            eval_fn(PR(parse_pr(ADDITION)), [1])


class TestValidate:
    def test_ok(self):
        assert validate_pr(parse_pr(ADDITION)) == []

    def test_forward_reference(self):
        text = "def a/1 = succ\ndef b/1 = comp a c\ndef c/1 = succ\nmain c\n"
        errs = validate_pr(parse_pr(text))
        assert any(isinstance(e, ForwardReference) for e in errs)

    def test_recursion_arity(self):
        text = "def g/2 = proj/2/1\ndef h/3 = proj/3/2\ndef f/2 = rec g h\nmain f\n"
        errs = validate_pr(parse_pr(text))
        assert [type(e) for e in errs] == [ArityMismatch]

    def test_duplicate(self):
        text = "def a/1 = succ\ndef a/1 = succ\nmain a\n"
        assert any(isinstance(e, DuplicateSymbol) for e in validate_pr(parse_pr(text)))

    def test_main_must_be_last(self):
        text = "def a/1 = succ\ndef b/1 = succ\nmain a\n"
        assert validate_pr(parse_pr(text))

    def test_text_round_trip(self):
        c = parse_pr(ADDITION)
        assert parse_pr(c.text()) == c


class TestTreeTerms:
    def test_inlining_shape(self):
        x = Var("x")
        inner = App("exp", (Plus(x, x),))
        assert to_tree_term(parse_graph(SECTION_GRAPH)) == App("exp", (Plus(inner, inner),))

    def test_single_entry(self):
        assert to_tree_term(parse_graph("f1 = x'")) == parse_term("x'")

    def test_at_one(self):
        assert eval_fn(Elem(to_tree_term(parse_graph(SECTION_GRAPH)), ("x",)), [1]) == 256

    def test_ill_formed(self):
        with pytest.raises(IllFormedGraph):
            to_tree_term(parse_graph("f1 = f2(x); f2 = x"))
        with pytest.raises(IllFormedGraph):
            to_tree_term([])

    def test_matches_graph_evaluation(self):
        graphs = [SECTION_GRAPH, "f1 = x * x + x'", "f1 = x + x; f2 = f1(x) * f1(x'); f3 = exp(f2(x))'"]
        for g in graphs:
            parsed = parse_graph(g)
            t = Elem(to_tree_term(parsed), ("x",))
            for n in range(0, 4 if "exp" in g else 9):
                assert eval_fn(t, [n]) == eval_graph(parsed, n)


class TestIterationAndBounds:
    def test_iterate_successor(self):
        assert eval_fn(iterate(poly("w'"), 3), [0]) == 3

    def test_iterate_zero_is_identity(self):
        for f in (poly("w * w"), PR(parse_pr("def s/1 = succ\nmain s\n"))):
            assert all(eval_fn(iterate(f, 0), [n]) == n for n in range(6))

    def test_cla6(self):
        assert bound_cla6(1, 1, identity(), identity()) == 3

    def test_cla7(self):
        assert bound_cla7(1, 1, poly("w'")) == 6

    def test_cla5_space(self):
        assert bound_cla5_space(identity(), 5, 4, 64) == 4 * 5 + 64

    def test_against_oracles(self):
        phis = [identity(), poly("w'"), poly("w + w"), poly("w * w + 1")]
        for d, ell, phi in itertools.product((1, 2), range(4), phis):
            eta = poly("w * w + w + 4")
            f = lambda v, phi=phi: eval_fn(phi, [v])
            assert bound_cla6(d, ell, phi, eta) == oracles.cla6_value(d, ell, f, lambda v: v * v + v + 4)
            if ell <= 2:
                assert bound_cla7(d, ell, phi) == oracles.cla7_value(d, ell, f)

    def test_cla7_blow_up_is_capped(self, monkeypatch):
        monkeypatch.setenv("CLARITH_CAP", "1000")
        with pytest.raises(ResourceCap):
            eval_fn(iterate(PR(parse_pr(ADDITION.replace("main add", "def d/1 = comp add z z\nmain d"))), 40), [3])

    def test_compose(self):
        f = compose(poly("w * w"), poly("w'"))
        assert [eval_fn(f, [n]) for n in range(4)] == [1, 4, 9, 16]


class TestEta:
    def test_polynomial_example(self):
        assert eta_bound(parse_formula(POLY_EXAMPLE), 3) == 16 == oracles.closed_form_eta_poly(3)

    def test_exponential_example(self):
        for ell in range(6):
            assert eta_bound(parse_formula(EXP_EXAMPLE), ell, "exponential") == oracles.closed_form_eta_exp(ell)

    def test_elementary(self):
        assert eta_bound(parse_formula("x = 0"), 7) == SLACK == 4

    def test_not_bounded(self):
        with pytest.raises(NotBounded):
            eta_bound(parse_formula("chex y. y = x'"), 3)

    def test_symbolic_dominates(self):
        f = parse_formula(POLY_EXAMPLE)
        for ell in range(8):
            assert eval_fn(eta_term(f), [ell]) >= eta_bound(f, ell)


class TestQuiescence:
    def test_random_tuples(self):
        rng = random.Random(2024)
        for _ in range(10):
            s, q, d, eta = rng.randint(1, 4), rng.randint(1, 3), rng.randint(0, 3), rng.randint(1, 6)
            phi = poly("w + w + 1")
            p = 2 * eta + 1
            assert quiescence_bound(s, q, d, eta, phi) == oracles.configuration_product(s, q, d, eta, p)


# ----------------------------------------------------------------- properties


def test_pr_matches_direct_recursion():
    rng = random.Random(99)
    seen_rec = 0
    for _ in range(1000):
        text, arity = random_construction(rng)
        c = parse_pr(text)
        table = oracles.construction_table(c)
        seen_rec += "rec" in text
        for args in itertools.product(range(6), repeat=arity):
            assert eval_fn(PR(c), list(args)) == oracles.pr_eval(table, c.main, args), text
    assert seen_rec > 40


def test_elem_matches_direct_evaluation():
    rng = random.Random(5)
    for _ in range(300):
        t = random_elem_term(rng)
        for x in range(6):
            try:
                expected = oracles.term_value(t, {"x": x})
            except OverflowError:
                continue
            if expected.bit_length() > 4096:
                continue
            assert eval_fn(Elem(t, ("x",)), [x]) == expected


def test_validate_rejects_reordered_constructions():
    """Moving a referenced definition after its user is always caught."""
    rng = random.Random(17)
    checked = 0
    for _ in range(300):
        text, _ = random_construction(rng)
        c = parse_pr(text)
        for i, d in enumerate(c.defs):
            for ref in d.refs:
                j = next(k for k, e in enumerate(c.defs) if e.name == ref)
                defs = list(c.defs)
                moved = defs.pop(j)
                defs.append(moved)
                bad = type(c)(tuple(defs), c.main)
                assert validate_pr(bad)
                checked += 1
    assert checked > 50


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["w'", "w + w", "w * w", "w + 3"]), st.integers(0, 3), st.integers(0, 3))
def test_iterate_composition(text, a, b):
    f = poly(text)
    both = iterate(f, a + b)
    for n in range(9):
        assert eval_fn(both, [n]) == eval_fn(iterate(f, a), [eval_fn(iterate(f, b), [n])])
        assert eval_fn(both, [n]) == iterate_eval(f, a + b, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 4))
def test_bounds_monotone(d, ell, extra):
    phi, eta = poly("w + w + 1"), poly("w * w + w + 4")
    assert bound_cla6(d, ell, phi, eta) <= bound_cla6(d + 1, ell + extra, phi, eta)
    if ell + extra <= 3:
        assert bound_cla7(d, ell, phi) <= bound_cla7(d, ell + extra, phi)
    assert bound_cla5_space(phi, ell) <= bound_cla5_space(phi, ell + extra)
    f = parse_formula(POLY_EXAMPLE)
    assert eta_bound(f, ell) <= eta_bound(f, ell + extra)
