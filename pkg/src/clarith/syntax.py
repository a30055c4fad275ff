"""Terms and formulas of the clarithmetic language.

Everything here is a pure function over immutable trees.  The concrete
syntax is ASCII::

    term := "0" | numeral | ident | ident "(" term, ... ")" | term "'"
          | term "+" term | term "*" term | term "#0" | term "#1" | "|" term "|"
    atom := term "=" term | term "<=" term
    fmla := atom | "~" fmla | fmla "/\\" fmla | fmla "\\/" fmla | fmla "->" fmla
          | "all" ident "." fmla | "ex" ident "." fmla
          | fmla "chand" fmla | fmla "chor" fmla
          | "chall" ident "." fmla | "chex" ident "." fmla

Binary formula connectives bind, tightest first: ``/\\``, ``\\/``,
``chand``, ``chor``, ``->`` (the last one right-associative).  Quantifier
bodies extend as far right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Zero:
    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Num:
    """A positive numeral.  Build through :func:`num` so that 0 stays ``Zero``."""

    value: int

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Succ:
    t: "Term"

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Plus:
    l: "Term"
    r: "Term"

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Times:
    l: "Term"
    r: "Term"

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class AppendBit:
    """``t#0`` is 2t, ``t#1`` is 2t+1."""

    t: "Term"
    bit: int

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class Len:
    """``|t|``, the binary length of t; ``|0| = 0``."""

    t: "Term"

    def __str__(self):
        return term_str(self)


@dataclass(frozen=True)
class App:
    """Application of a named function (``exp`` or a caller-supplied one)."""

    fn: str
    args: tuple

    def __str__(self):
        return term_str(self)


Term = Union[Zero, Num, Var, Succ, Plus, Times, AppendBit, Len, App]


def num(n: int) -> Term:
    if n < 0:
        raise ValueError(f"negative constant {n}")
    return Zero() if n == 0 else Num(n)


def size(n: int) -> int:
    """Binary length ``|n|``; ``size(0) == 0``."""
    return n.bit_length()


# ------------------------------------------------------------- formulas


@dataclass(frozen=True)
class Eq:
    l: Term
    r: Term

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Leq:
    l: Term
    r: Term

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Not:
    f: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class And:
    l: "Formula"
    r: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Or:
    l: "Formula"
    r: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Imp:
    l: "Formula"
    r: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class ChAnd:
    l: "Formula"
    r: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class ChOr:
    l: "Formula"
    r: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class ChAll:
    var: str
    body: "Formula"

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class ChEx:
    var: str
    body: "Formula"

    def __str__(self):
        return pretty(self)


Formula = Union[Eq, Leq, Not, And, Or, Imp, ChAnd, ChOr, ForAll, Exists, ChAll, ChEx]

ATOMS = (Eq, Leq)
CLASSICAL_BINARY = (And, Or, Imp)
CHOICE_BINARY = (ChAnd, ChOr)
BINARY = CLASSICAL_BINARY + CHOICE_BINARY
CLASSICAL_QUANTIFIERS = (ForAll, Exists)
CHOICE_QUANTIFIERS = (ChAll, ChEx)
QUANTIFIERS = CLASSICAL_QUANTIFIERS + CHOICE_QUANTIFIERS
CHOICE = CHOICE_BINARY + CHOICE_QUANTIFIERS

# logical constants, written as plain atoms so the grammar needs no extra keywords
TRUE = Eq(Zero(), Zero())
FALSE = Eq(Zero(), Succ(Zero()))


# ---------------------------------------------------------------- lexer


class ParseError(ValueError):
    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        exp = f"; expected one of: {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{exp}")


KEYWORDS = {"all", "ex", "chall", "chex", "chand", "chor"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<=|/\\|\\/|\#0|\#1|[~'+*|=().,])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num' | 'ident' | 'kw' | 'op' | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "ident" and chunk in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        for i, ch in enumerate(chunk):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# --------------------------------------------------------------- parser

# binary formula connectives by precedence level (loosest first)
_FORMULA_LEVELS = [("->", Imp), ("chor", ChOr), ("chand", ChAnd), ("\\/", Or), ("/\\", And)]
_QUANT_KW = {"all": ForAll, "ex": Exists, "chall": ChAll, "chex": ChEx}


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0
        # furthest failure, for error reporting after backtracking
        self.fail_at = -1
        self.fail_expected: set = set()
        self.in_len = False

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _expect_fail(self, *expected):
        # alternatives that failed at this same token (before backtracking) are merged
        if self.i != self.fail_at:
            self.fail_at, self.fail_expected = self.i, set()
        self.fail_expected |= set(expected)
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"unexpected {got}", t.line, t.col, self.fail_expected)

    def accept(self, text):
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self._expect_fail(repr(text))

    def ident(self) -> str:
        if self.tok.kind != "ident":
            self._expect_fail("identifier")
        name = self.tok.text
        self.i += 1
        return name

    # formulas
    def formula(self, level=0):
        if level == len(_FORMULA_LEVELS):
            return self.unary()
        op, cls = _FORMULA_LEVELS[level]
        left = self.formula(level + 1)
        if cls is Imp:
            if self.accept(op):
                return Imp(left, self.formula(level))
            return left
        while self.accept(op):
            left = cls(left, self.formula(level + 1))
        return left

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.text == "~":
            self.i += 1
            return Not(self.unary())
        if t.kind == "kw" and t.text in _QUANT_KW:
            self.i += 1
            var = self.ident()
            self.expect(".")
            return _QUANT_KW[t.text](var, self.formula())
        if t.kind == "op" and t.text == "(":
            # either a parenthesised formula or an atom whose left term starts with "("
            save = self.i
            try:
                return self.atom()
            except ParseError:
                self.i = save
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def atom(self):
        left = self.term()
        if self.accept("="):
            return Eq(left, self.term())
        if self.accept("<="):
            return Leq(left, self.term())
        self._expect_fail("'='", "'<='", "'+'", "'*'", "\"'\"", "'#0'", "'#1'")

    # terms
    def term(self):
        left = self.product()
        while self.accept("+"):
            left = Plus(left, self.product())
        return left

    def product(self):
        left = self.postfix()
        while self.accept("*"):
            left = Times(left, self.postfix())
        return left

    def postfix(self):
        t = self.primary()
        while True:
            if self.accept("'"):
                t = Succ(t)
            elif self.accept("#0"):
                t = AppendBit(t, 0)
            elif self.accept("#1"):
                t = AppendBit(t, 1)
            else:
                return t

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return num(int(t.text))
        if t.kind == "ident":
            self.i += 1
            if self.accept("("):
                args = [self.term()]
                while self.accept(","):
                    args.append(self.term())
                self.expect(")")
                return App(t.text, tuple(args))
            return Var(t.text)
        if t.kind == "op" and t.text == "(":
            self.i += 1
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind == "op" and t.text == "|" and not self.in_len:
            self.i += 1
            self.in_len = True
            try:
                inner = self.term()
            finally:
                self.in_len = False
            self.expect("|")
            return Len(inner)
        self._expect_fail("'0'", "numeral", "identifier", "'('", "'|'")


def parse_formula(text: str) -> Formula:
    """Parse ASCII concrete syntax into a formula tree; raises :class:`ParseError`."""
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p._expect_fail("end of input", "'->'", "'/\\'", "'\\/'", "'chand'", "'chor'")
    if choice_under_classical(f):
        raise ParseError("choice operator inside a classical quantifier", 1, 1)
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.tok.kind != "eof":
        p._expect_fail("end of input", "'+'", "'*'")
    return t


# --------------------------------------------------------------- printer


def term_str(t: Term) -> str:
    return _term(t, 0)


def _term(t, prec):
    # prec: 0 sum position, 1 product position, 2 postfix operand
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Len):
        return f"|{_term(t.t, 0)}|"
    if isinstance(t, App):
        return f"{t.fn}({', '.join(_term(a, 0) for a in t.args)})"
    if isinstance(t, Succ):
        return _term(t.t, 2) + "'"
    if isinstance(t, AppendBit):
        return _term(t.t, 2) + f"#{t.bit}"
    if isinstance(t, Plus):
        s = f"{_term(t.l, 0)} + {_term(t.r, 1)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, Times):
        s = f"{_term(t.l, 1)} * {_term(t.r, 2)}"
        return f"({s})" if prec > 1 else s
    raise TypeError(f"not a term: {t!r}")


_BIN_SYMBOL = {And: "/\\", Or: "\\/", Imp: "->", ChAnd: "chand", ChOr: "chor"}
_BIN_LEVEL = {Imp: 0, ChOr: 1, ChAnd: 2, Or: 3, And: 4}
_QUANT_SYMBOL = {ForAll: "all", Exists: "ex", ChAll: "chall", ChEx: "chex"}


def pretty(f: Formula) -> str:
    """Concrete syntax that :func:`parse_formula` maps back to ``f``."""
    return _fmla(f)


def _fmla(f):
    if isinstance(f, Eq):
        return f"{term_str(f.l)} = {term_str(f.r)}"
    if isinstance(f, Leq):
        return f"{term_str(f.l)} <= {term_str(f.r)}"
    if isinstance(f, Not):
        return "~" + _operand(f.f, unary=True)
    if isinstance(f, QUANTIFIERS):
        return f"{_QUANT_SYMBOL[type(f)]} {f.var}. {_fmla(f.body)}"
    if isinstance(f, BINARY):
        lvl = _BIN_LEVEL[type(f)]
        if isinstance(f, Imp):
            left = _operand(f.l, min_level=lvl + 1)
            right = _operand(f.r, min_level=lvl)
        else:
            left = _operand(f.l, min_level=lvl)
            right = _operand(f.r, min_level=lvl + 1)
        return f"{left} {_BIN_SYMBOL[type(f)]} {right}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f, min_level=0, unary=False):
    s = _fmla(f)
    if isinstance(f, QUANTIFIERS):
        return f"({s})"
    if isinstance(f, BINARY) and (unary or _BIN_LEVEL[type(f)] < min_level):
        return f"({s})"
    return s


# ------------------------------------------------------------- traversal


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, (Succ, Len)):
        yield from subterms(t.t)
    elif isinstance(t, AppendBit):
        yield from subterms(t.t)
    elif isinstance(t, (Plus, Times)):
        yield from subterms(t.l)
        yield from subterms(t.r)
    elif isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def term_vars(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Var)}


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.f)
    elif isinstance(f, BINARY):
        yield from subformulas(f.l)
        yield from subformulas(f.r)
    elif isinstance(f, QUANTIFIERS):
        yield from subformulas(f.body)


def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.f,)
    if isinstance(f, BINARY):
        return (f.l, f.r)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def replace_child(f: Formula, index: int, new: Formula) -> Formula:
    if isinstance(f, Not):
        return Not(new)
    if isinstance(f, BINARY):
        return type(f)(new, f.r) if index == 0 else type(f)(f.l, new)
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, new)
    raise ValueError(f"atom has no children: {f}")


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, ATOMS):
        return term_vars(f.l) | term_vars(f.r)
    if isinstance(f, Not):
        return free_vars(f.f)
    if isinstance(f, BINARY):
        return free_vars(f.l) | free_vars(f.r)
    return free_vars(f.body) - {f.var}


def bound_vars(f: Formula) -> set[str]:
    return {g.var for g in subformulas(f) if isinstance(g, QUANTIFIERS)}


def is_closed(f: Formula) -> bool:
    return not free_vars(f)


def is_elementary(f: Formula) -> bool:
    return not any(isinstance(g, CHOICE) for g in subformulas(f))


def choice_under_classical(f: Formula) -> bool:
    """Does a choice operator occur inside the body of ``all``/``ex``?

    Such occurrences could never be resolved, so formulas containing them
    are rejected by the parser.
    """
    return any(isinstance(g, CLASSICAL_QUANTIFIERS) and not is_elementary(g.body) for g in subformulas(f))


def well_formed(f: Formula, _bound=frozenset()) -> bool:
    """No variable is bound twice along one branch."""
    if isinstance(f, QUANTIFIERS):
        if f.var in _bound:
            return False
        return well_formed(f.body, _bound | {f.var})
    return all(well_formed(c, _bound) for c in children(f))


# ----------------------------------------------------------- substitution


def subst_term(t: Term, x: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == x else t
    if isinstance(t, (Zero, Num)):
        return t
    if isinstance(t, Succ):
        return Succ(subst_term(t.t, x, s))
    if isinstance(t, Len):
        return Len(subst_term(t.t, x, s))
    if isinstance(t, AppendBit):
        return AppendBit(subst_term(t.t, x, s), t.bit)
    if isinstance(t, (Plus, Times)):
        return type(t)(subst_term(t.l, x, s), subst_term(t.r, x, s))
    if isinstance(t, App):
        return App(t.fn, tuple(subst_term(a, x, s) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def fresh_name(base: str, avoid: set[str]) -> str:
    stem = base.rstrip("0123456789") or base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def substitute(f: Formula, x: str, t: Term) -> Formula:
    """Capture-avoiding ``f[x := t]``; bound variables are renamed as needed."""
    if isinstance(f, ATOMS):
        return type(f)(subst_term(f.l, x, t), subst_term(f.r, x, t))
    if isinstance(f, Not):
        return Not(substitute(f.f, x, t))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.l, x, t), substitute(f.r, x, t))
    if f.var == x:
        return f
    body = f.body
    if x not in free_vars(body):
        return f
    var = f.var
    tv = term_vars(t)
    if var in tv:
        new = fresh_name(var, tv | free_vars(body) | bound_vars(body) | {x})
        body = substitute(body, var, Var(new))
        var = new
    return type(f)(var, substitute(body, x, t))


def choice_closure(f: Formula) -> Formula:
    """Prefix a choice-universal quantifier for every free variable, lexicographic order."""
    for v in sorted(free_vars(f), reverse=True):
        f = ChAll(v, f)
    return f


def closure_vars(f: Formula) -> list[str]:
    return sorted(free_vars(f))


# ------------------------------------------------------- classifications


def depth(f: Formula) -> int:
    """Number of labmoves in the longest legal run of the game ``f``."""
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return depth(f.f)
    if isinstance(f, CHOICE_BINARY):
        return 1 + max(depth(f.l), depth(f.r))
    if isinstance(f, CHOICE_QUANTIFIERS):
        return 1 + depth(f.body)
    if isinstance(f, CLASSICAL_BINARY):
        return depth(f.l) + depth(f.r)
    return depth(f.body)


def elementarize(f: Formula) -> Formula:
    """Resolve every surface choice occurrence in favour of its non-owner.

    ``chand``/``chall`` become the true constant and ``chor``/``chex`` the
    false one; the enclosing negations and antecedents then give each
    constant the right polarity.
    """
    if isinstance(f, (ChAnd, ChAll)):
        return TRUE
    if isinstance(f, (ChOr, ChEx)):
        return FALSE
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Not):
        return Not(elementarize(f.f))
    if isinstance(f, CLASSICAL_BINARY):
        return type(f)(elementarize(f.l), elementarize(f.r))
    return type(f)(f.var, elementarize(f.body))


POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class Sizebound:
    """``|bounded_var| <= bound_term``."""

    bounded_var: str
    bound_term: Term
    kind: str

    def formula(self) -> Formula:
        return Leq(Len(Var(self.bounded_var)), self.bound_term)

    def __str__(self):
        return pretty(self.formula())


class WrongKind(ValueError):
    pass


class NotPolyBounded(ValueError):
    pass


class NotClosed(ValueError):
    pass


def _is_combination(t: Term, x: str, leaf) -> bool:
    if isinstance(t, (Zero, Num)):
        return True
    if isinstance(t, Succ):
        return _is_combination(t.t, x, leaf)
    if isinstance(t, (Plus, Times)):
        return _is_combination(t.l, x, leaf) and _is_combination(t.r, x, leaf)
    return leaf(t)


def _poly_leaf(x):
    def leaf(t):
        if not isinstance(t, Len):
            return False
        inner = t.t
        if isinstance(inner, Var):
            return inner.name != x
        return not term_vars(inner) and _is_combination(inner, x, lambda _: False)

    return leaf


def _exp_leaf(x):
    return lambda t: isinstance(t, Var) and t.name != x


def sizebound_kinds(f: Formula, x: str) -> set[str]:
    """Which kinds of sizebound for ``x`` the formula ``f`` is (possibly both)."""
    if not (isinstance(f, Leq) and f.l == Len(Var(x))):
        return set()
    kinds = set()
    if _is_combination(f.r, x, _poly_leaf(x)):
        kinds.add(POLYNOMIAL)
    if _is_combination(f.r, x, _exp_leaf(x)):
        kinds.add(EXPONENTIAL)
    return kinds


def as_sizebound(f: Formula, x: str) -> Sizebound | None:
    kinds = sizebound_kinds(f, x)
    if not kinds:
        return None
    kind = POLYNOMIAL if POLYNOMIAL in kinds else EXPONENTIAL
    return Sizebound(x, f.r, kind)


def guard_of(f: Formula) -> Formula | None:
    """The sizebound guarding a choice quantifier, if it has the required shape."""
    if isinstance(f, ChAll) and isinstance(f.body, Imp):
        return f.body.l
    if isinstance(f, ChEx) and isinstance(f.body, And):
        return f.body.l
    return None


@dataclass(frozen=True)
class FormulaClass:
    elementary: bool
    polynomially_bounded: bool
    exponentially_bounded: bool
    depth: int


def _bounded(f: Formula, kind: str) -> bool:
    for g in subformulas(f):
        if isinstance(g, CHOICE_QUANTIFIERS):
            guard = guard_of(g)
            if guard is None or kind not in sizebound_kinds(guard, g.var):
                return False
    return True


def classify(f: Formula) -> FormulaClass:
    return FormulaClass(
        elementary=is_elementary(f),
        polynomially_bounded=_bounded(f, POLYNOMIAL),
        exponentially_bounded=_bounded(f, EXPONENTIAL),
        depth=depth(f),
    )


def _unlen(t: Term) -> Term:
    if isinstance(t, Len):
        return t.t
    if isinstance(t, Succ):
        return Succ(_unlen(t.t))
    if isinstance(t, (Plus, Times)):
        return type(t)(_unlen(t.l), _unlen(t.r))
    return t


def relax_sizebound(s: Sizebound) -> Sizebound:
    """``|z| <= tau(|y1|..|yn|)`` becomes ``|z| <= tau(y1..yn)``."""
    if s.kind != POLYNOMIAL:
        raise WrongKind(f"{s} is already exponential")
    return Sizebound(s.bounded_var, _unlen(s.bound_term), EXPONENTIAL)


def exp_relax_formula(f: Formula) -> Formula:
    """Guard every polynomially bounded choice quantifier with its relaxed sizebound."""
    if not classify(f).polynomially_bounded:
        raise NotPolyBounded(f"not polynomially bounded: {pretty(f)}")
    return _relax(f)


def _relax(f):
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Not):
        return Not(_relax(f.f))
    if isinstance(f, BINARY):
        return type(f)(_relax(f.l), _relax(f.r))
    if isinstance(f, CHOICE_QUANTIFIERS):
        guard = guard_of(f)
        s = as_sizebound(guard, f.var)
        relaxed = relax_sizebound(Sizebound(s.bounded_var, s.bound_term, POLYNOMIAL)).formula()
        wrap = Imp if isinstance(f, ChAll) else And
        return type(f)(f.var, wrap(relaxed, wrap(guard, _relax(f.body.r))))
    return type(f)(f.var, _relax(f.body))


def politeral_count(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 1
    if isinstance(f, Not) and isinstance(f.f, ATOMS):
        return 1
    return sum(politeral_count(c) for c in children(f))


def overline(f: Formula, sentence: Formula) -> Formula:
    """Replace every politeral ``L`` (atom or negated atom) by ``L \\/ sentence``."""
    if free_vars(sentence):
        raise NotClosed(f"not a sentence: {pretty(sentence)}")
    return _over(f, sentence)


def _over(f, s):
    if isinstance(f, ATOMS) or (isinstance(f, Not) and isinstance(f.f, ATOMS)):
        return Or(f, s)
    if isinstance(f, Not):
        return Not(_over(f.f, s))
    if isinstance(f, BINARY):
        return type(f)(_over(f.l, s), _over(f.r, s))
    return type(f)(f.var, _over(f.body, s))


# -------------------------------------------------------------- semantics


def eval_term(t: Term, env: dict | None = None, funcs: dict | None = None) -> int:
    """Value of a term over the naturals.

    ``env`` maps free variables to values; ``funcs`` maps function names
    to Python callables (``exp`` is built in).
    """
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        if env is None or t.name not in env:
            raise ValueError(f"unbound variable {t.name}")
        return env[t.name]
    if isinstance(t, Succ):
        return eval_term(t.t, env, funcs) + 1
    if isinstance(t, Plus):
        return eval_term(t.l, env, funcs) + eval_term(t.r, env, funcs)
    if isinstance(t, Times):
        return eval_term(t.l, env, funcs) * eval_term(t.r, env, funcs)
    if isinstance(t, AppendBit):
        return 2 * eval_term(t.t, env, funcs) + t.bit
    if isinstance(t, Len):
        return size(eval_term(t.t, env, funcs))
    if isinstance(t, App):
        args = [eval_term(a, env, funcs) for a in t.args]
        if funcs and t.fn in funcs:
            return funcs[t.fn](*args)
        if t.fn == "exp" and len(args) == 1:
            return 2 ** args[0]
        raise ValueError(f"unknown function {t.fn}/{len(args)}")
    raise TypeError(f"not a term: {t!r}")
