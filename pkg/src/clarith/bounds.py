"""Explicit functions used as resource bounds.

Three presentations, each strictly more expressive than the last:

* ``Poly``: a term over 0, successor, + and * (plus numerals);
* ``Elem``: the same with ``exp(t) = 2**t`` allowed (a tree-term);
* ``PR``: a primitive recursive construction, a list of definitions.

Terms reuse the formula-language term classes, with ``App('exp', ...)``
for the exponential.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Callable, Union

from .syntax import (
    CHOICE_QUANTIFIERS,
    EXPONENTIAL,
    POLYNOMIAL,
    App,
    Formula,
    Len,
    Num,
    Plus,
    Succ,
    Term,
    Times,
    Var,
    Zero,
    as_sizebound,
    classify,
    guard_of,
    num,
    parse_term,
    size,
    subformulas,
    subst_term,
    subterms,
    term_str,
    term_vars,
)

DEFAULT_STEP_CAP = 5_000_000
DEFAULT_BIT_CAP = 1 << 20


class ResourceCap(RuntimeError):
    pass


class ArityMismatch(ValueError):
    def __init__(self, message, definition=None):
        self.definition = definition
        super().__init__(message)


class DuplicateSymbol(ValueError):
    def __init__(self, message, definition=None):
        self.definition = definition
        super().__init__(message)


class ForwardReference(ValueError):
    def __init__(self, message, definition=None):
        self.definition = definition
        super().__init__(message)


class IllFormedGraph(ValueError):
    pass


class NotBounded(ValueError):
    pass


def step_cap() -> int:
    return int(os.environ.get("CLARITH_CAP", DEFAULT_STEP_CAP))


def bit_cap() -> int:
    return int(os.environ.get("CLARITH_BIT_CAP", DEFAULT_BIT_CAP))


def _guard_bits(value: int) -> int:
    if value.bit_length() > bit_cap():
        raise ResourceCap(f"intermediate value exceeds {bit_cap()} bits")
    return value


# --------------------------------------------------------------- tree terms


def W(name="w") -> Var:
    return Var(name)


def EXP(t: Term) -> Term:
    return App("exp", (t,))


def is_poly_term(t: Term) -> bool:
    return all(isinstance(s, (Zero, Num, Var, Succ, Plus, Times)) for s in subterms(t))


def is_elem_term(t: Term) -> bool:
    return all(
        isinstance(s, (Zero, Num, Var, Succ, Plus, Times)) or (isinstance(s, App) and s.fn == "exp" and len(s.args) == 1)
        for s in subterms(t)
    )


def eval_tree(t: Term, env: dict) -> int:
    """Value of a Poly/Elem tree term; exponentials are guarded by the bit ceiling."""
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Succ):
        return eval_tree(t.t, env) + 1
    if isinstance(t, Plus):
        return eval_tree(t.l, env) + eval_tree(t.r, env)
    if isinstance(t, Times):
        return _guard_bits(eval_tree(t.l, env) * eval_tree(t.r, env))
    if isinstance(t, App) and t.fn == "exp":
        e = eval_tree(t.args[0], env)
        if e > bit_cap():
            raise ResourceCap(f"2**{e} exceeds {bit_cap()} bits")
        return 1 << e
    raise TypeError(f"not a tree term: {term_str(t)}")


# ----------------------------------------------------------- PR constructions


@dataclass(frozen=True)
class Def:
    """One definition of a primitive recursive construction.

    ``form`` is ``succ``, ``zero``, ``proj``, ``comp`` or ``rec``;
    ``refs`` names the functions it is built from (``comp``: g then the
    h's; ``rec``: g then h); ``index`` is the projected position (1-based).
    """

    name: str
    arity: int
    form: str
    refs: tuple = ()
    index: int = 0
    declared: int | None = None  # the n written in zero/<n> and proj/<n>/<i>

    @property
    def width(self) -> int:
        return self.arity if self.declared is None else self.declared

    def text(self) -> str:
        head = f"def {self.name}/{self.arity} = "
        if self.form == "succ":
            return head + "succ"
        if self.form == "zero":
            return head + f"zero/{self.width}"
        if self.form == "proj":
            return head + f"proj/{self.width}/{self.index}"
        return head + " ".join((self.form,) + tuple(self.refs))


@dataclass(frozen=True)
class PRConstruction:
    defs: tuple
    main: str

    def text(self) -> str:
        return "\n".join([d.text() for d in self.defs] + [f"main {self.main}"]) + "\n"

    def arity(self) -> int:
        for d in self.defs:
            if d.name == self.main:
                return d.arity
        raise KeyError(self.main)


_DEF_RE = re.compile(r"def\s+([A-Za-z_][\w.]*)\s*/\s*(\d+)\s*=\s*(.+)")


def parse_pr(text: str) -> PRConstruction:
    defs, main = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("main"):
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'main <name>'")
            main = parts[1]
            continue
        m = _DEF_RE.fullmatch(line)
        if not m:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
        name, arity, body = m.group(1), int(m.group(2)), m.group(3).split()
        kind = body[0]
        if kind == "succ" and len(body) == 1:
            defs.append(Def(name, arity, "succ"))
        elif re.fullmatch(r"zero/\d+", kind) and len(body) == 1:
            defs.append(Def(name, arity, "zero", declared=int(kind.split("/")[1])))
        elif re.fullmatch(r"proj/\d+/\d+", kind) and len(body) == 1:
            _, n, i = kind.split("/")
            defs.append(Def(name, arity, "proj", index=int(i), declared=int(n)))
        elif kind in ("comp", "rec") and len(body) >= 2:
            defs.append(Def(name, arity, kind, tuple(body[1:])))
        else:
            raise ValueError(f"line {lineno}: unknown definition form {kind!r}")
    if main is None:
        raise ValueError("missing 'main <name>' line")
    return PRConstruction(tuple(defs), main)


def validate_pr(c: PRConstruction) -> list:
    """All problems with a construction; an empty list means it is well formed."""
    errors = []
    seen: dict = {}
    for d in c.defs:
        if d.name in seen:
            errors.append(DuplicateSymbol(f"{d.name} is defined twice", d.name))
            continue
        if d.form == "succ" and d.arity != 1:
            errors.append(ArityMismatch(f"{d.name}: successor is unary", d.name))
        elif d.form == "zero" and d.width != d.arity:
            errors.append(ArityMismatch(f"{d.name}: zero/{d.width} declared with arity {d.arity}", d.name))
        elif d.form == "proj" and (d.width != d.arity or not 1 <= d.index <= d.arity):
            errors.append(ArityMismatch(f"{d.name}: bad projection", d.name))
        elif d.form in ("comp", "rec"):
            missing = [r for r in d.refs if r not in seen]
            if missing:
                errors.append(ForwardReference(f"{d.name} refers to {', '.join(missing)} before its definition", d.name))
            else:
                ar = [seen[r] for r in d.refs]
                if d.form == "comp":
                    if ar[0] != len(d.refs) - 1 or any(a != d.arity for a in ar[1:]) or len(d.refs) < 2:
                        errors.append(ArityMismatch(f"{d.name}: composition arities do not fit", d.name))
                else:
                    if len(d.refs) != 2 or d.arity < 1 or ar[0] != d.arity - 1 or ar[1] != d.arity + 1:
                        errors.append(ArityMismatch(f"{d.name}: recursion needs g of arity n-1 and h of arity n+1", d.name))
        elif d.form not in ("succ", "zero", "proj"):
            errors.append(ValueError(f"{d.name}: unknown form {d.form}"))
        seen[d.name] = d.arity
    if not c.defs or c.defs[-1].name != c.main:
        errors.append(ForwardReference(f"the last definition must be {c.main}", c.main))
    return errors


def check_pr(c: PRConstruction) -> PRConstruction:
    errs = validate_pr(c)
    if errs:
        raise errs[0]
    return c


class _Budget:
    def __init__(self, cap):
        self.left = cap

    def spend(self, n=1):
        self.left -= n
        if self.left < 0:
            raise ResourceCap("primitive recursive evaluation exceeded its step budget")


def compile_pr(c: PRConstruction, budget_cap: int | None = None) -> dict:
    """Python callables for every symbol of a validated construction.

    Each call gets a fresh step budget; form V is evaluated by iteration on
    the first argument.
    """
    check_pr(c)
    holder = {"budget": None}
    table: dict[str, Callable] = {}

    def wrap_top(fn):
        def top(*args):
            outer = holder["budget"] is None
            if outer:
                holder["budget"] = _Budget(budget_cap or step_cap())
            try:
                return fn(*args)
            finally:
                if outer:
                    holder["budget"] = None

        return top

    for d in c.defs:
        table[d.name] = _compile_def(d, table, holder)
    return {k: wrap_top(v) for k, v in table.items()}


def _compile_def(d: Def, table, holder):
    n = d.arity

    def check(args):
        if len(args) != n:
            raise ArityMismatch(f"{d.name} expects {n} arguments, got {len(args)}", d.name)
        holder["budget"].spend()

    if d.form == "succ":
        def f(*a):
            check(a)
            return a[0] + 1
    elif d.form == "zero":
        def f(*a):
            check(a)
            return 0
    elif d.form == "proj":
        i = d.index - 1

        def f(*a):
            check(a)
            return a[i]
    elif d.form == "comp":
        g = table[d.refs[0]]
        hs = [table[r] for r in d.refs[1:]]

        def f(*a):
            check(a)
            return g(*[h(*a) for h in hs])
    else:
        g, h = table[d.refs[0]], table[d.refs[1]]

        def f(*a):
            check(a)
            x, rest = a[0], a[1:]
            acc = g(*rest)
            for i in range(x):
                acc = _guard_bits(h(i, acc, *rest))
            return acc
    return f


# ------------------------------------------------------- explicit functions


@dataclass(frozen=True)
class Poly:
    term: Term
    vars: tuple = ("w",)

    def __str__(self):
        return term_str(self.term)


@dataclass(frozen=True)
class Elem:
    term: Term
    vars: tuple = ("w",)

    def __str__(self):
        return term_str(self.term)


@dataclass(frozen=True)
class PR:
    construction: PRConstruction

    @property
    def vars(self):
        return tuple(f"x{i}" for i in range(1, self.construction.arity() + 1))

    def __str__(self):
        return f"PR[{self.construction.main}/{self.construction.arity()}, {len(self.construction.defs)} definitions]"


ExplicitFunction = Union[Poly, Elem, PR]

KIND_RANK = {Poly: 0, Elem: 1, PR: 2}


def kind_name(f: ExplicitFunction) -> str:
    return {Poly: "polynomial", Elem: "elementary", PR: "primitive-recursive"}[type(f)]


def arity(f: ExplicitFunction) -> int:
    return len(f.vars)


def eval_fn(f: ExplicitFunction, args) -> int:
    args = list(args)
    if len(args) != arity(f):
        raise ArityMismatch(f"expected {arity(f)} arguments, got {len(args)}")
    if isinstance(f, (Poly, Elem)):
        return eval_tree(f.term, dict(zip(f.vars, args)))
    fn = compile_pr(f.construction)[f.construction.main]
    return fn(*args)


# ``eval`` is the public name used throughout the documentation
eval = eval_fn  # noqa: A001


def call(f, x: int) -> int:
    """Apply a unary explicit function or plain Python callable."""
    if isinstance(f, (Poly, Elem, PR)):
        return eval_fn(f, [x])
    return f(x)


def identity() -> Poly:
    return Poly(W())


def const(n: int) -> Poly:
    return Poly(num(n))


# ----------------------------------------------------------- graph sequences


def parse_graph(text: str) -> list:
    """``f1 = exp(x + x); f2 = f1(f1(x))`` -> ``[('f1', term), ('f2', term)]``."""
    out = []
    for part in re.split(r"[;\n]", text):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise IllFormedGraph(f"expected '<name> = <term>' in {part!r}")
        name, body = (s.strip() for s in part.split("=", 1))
        out.append((name, parse_term(body)))
    return out


def to_tree_term(graph, var: str = "x") -> Term:
    """Inline a graph sequence into one unary tree term for its last function."""
    if not graph:
        raise IllFormedGraph("empty graph sequence")
    inlined: dict[str, Term] = {}
    for name, t in graph:
        if name in inlined or name == "exp":
            raise IllFormedGraph(f"{name} defined twice")
        if term_vars(t) - {var}:
            raise IllFormedGraph(f"{name} uses variables other than {var}")
        inlined[name] = _inline(t, inlined, var, name)
    return inlined[graph[-1][0]]


def _inline(t, table, var, owner):
    if isinstance(t, (Zero, Num, Var)):
        return t
    if isinstance(t, Succ):
        return Succ(_inline(t.t, table, var, owner))
    if isinstance(t, (Plus, Times)):
        return type(t)(_inline(t.l, table, var, owner), _inline(t.r, table, var, owner))
    if isinstance(t, App):
        args = tuple(_inline(a, table, var, owner) for a in t.args)
        if len(args) != 1:
            raise IllFormedGraph(f"{owner}: {t.fn} must be unary")
        if t.fn == "exp":
            return App("exp", args)
        if t.fn not in table:
            raise IllFormedGraph(f"{owner} refers to {t.fn}, which is not defined earlier")
        return subst_term(table[t.fn], var, args[0])
    raise IllFormedGraph(f"{owner}: {term_str(t)} is not allowed in a tree term")


def eval_graph(graph, x: int, var: str = "x") -> int:
    """Evaluate a graph sequence by calling earlier functions, without inlining."""
    table: dict[str, Callable] = {}

    def ev(t, env):
        if isinstance(t, App) and t.fn != "exp":
            return table[t.fn](ev(t.args[0], env))
        if isinstance(t, App):
            return 1 << ev(t.args[0], env)
        if isinstance(t, Succ):
            return ev(t.t, env) + 1
        if isinstance(t, Plus):
            return ev(t.l, env) + ev(t.r, env)
        if isinstance(t, Times):
            return ev(t.l, env) * ev(t.r, env)
        return eval_tree(t, env)

    for name, t in graph:
        table[name] = (lambda body: (lambda v: ev(body, {var: v})))(t)
    return table[graph[-1][0]](x)


# --------------------------------------------------------- PR from tree terms


class _Builder:
    """Accumulates definitions with fresh names."""

    def __init__(self, prefix="b"):
        self.prefix = prefix
        self.defs: list[Def] = []
        self.names: set = set()
        self.cache: dict = {}

    def fresh(self, hint):
        i = len(self.defs)
        name = f"{self.prefix}{hint}{i}"
        while name in self.names:
            i += 1
            name = f"{self.prefix}{hint}{i}"
        return name

    def add(self, d: Def) -> str:
        key = (d.arity, d.form, d.refs, d.index)
        if key in self.cache:
            return self.cache[key]
        self.defs.append(d)
        self.names.add(d.name)
        self.cache[key] = d.name
        return d.name

    def succ(self):
        return self.add(Def(self.fresh("s"), 1, "succ"))

    def zero(self, n):
        return self.add(Def(self.fresh("z"), n, "zero"))

    def proj(self, n, i):
        return self.add(Def(self.fresh("p"), n, "proj", index=i))

    def comp(self, n, g, *hs):
        return self.add(Def(self.fresh("c"), n, "comp", (g,) + tuple(hs)))

    def rec(self, n, g, h):
        return self.add(Def(self.fresh("r"), n, "rec", (g, h)))

    def add_fn(self):
        # add(0, y) = y ; add(x+1, y) = succ(add(x, y))
        h = self.comp(3, self.succ(), self.proj(3, 2))
        return self.rec(2, self.proj(1, 1), h)

    def mul_fn(self):
        # mul(0, y) = 0 ; mul(x+1, y) = add(mul(x, y), y)
        h = self.comp(3, self.add_fn(), self.proj(3, 2), self.proj(3, 3))
        return self.rec(2, self.zero(1), h)

    def exp_fn(self):
        # e(0) = 1 ; e(x+1) = add(e(x), e(x))   (unary, via an argument-free g)
        one = self.comp(0, self.succ(), self.zero(0))
        h = self.comp(2, self.add_fn(), self.proj(2, 2), self.proj(2, 2))
        return self.rec(1, one, h)

    def construction(self, main) -> PRConstruction:
        if self.defs[-1].name != main:
            # the designated function has to come last: wrap it in a fresh composition
            n = next(d.arity for d in self.defs if d.name == main)
            hs = tuple(self.proj(n, i) for i in range(1, n + 1))
            wrapper = Def(self.fresh("m"), n, "comp", (main,) + hs)
            self.defs.append(wrapper)
            main = wrapper.name
        return PRConstruction(tuple(self.defs), main)

    def absorb(self, c: PRConstruction) -> str:
        self.defs.extend(c.defs)
        self.names.update(d.name for d in c.defs)
        return c.main


def tree_to_pr(t: Term, vars=("w",), prefix="t") -> PRConstruction:
    """Compile a Poly/Elem term (variables ``vars``) into an equivalent construction."""
    b = _Builder(prefix)
    n = len(vars)

    def go(s):
        if isinstance(s, Zero):
            return b.zero(n)
        if isinstance(s, Num):
            acc = b.zero(n)
            for _ in range(s.value):
                acc = b.comp(n, b.succ(), acc)
            return acc
        if isinstance(s, Var):
            return b.proj(n, vars.index(s.name) + 1)
        if isinstance(s, Succ):
            return b.comp(n, b.succ(), go(s.t))
        if isinstance(s, Plus):
            return b.comp(n, b.add_fn(), go(s.l), go(s.r))
        if isinstance(s, Times):
            return b.comp(n, b.mul_fn(), go(s.l), go(s.r))
        if isinstance(s, App) and s.fn == "exp":
            return b.comp(n, b.exp_fn(), go(s.args[0]))
        raise TypeError(f"cannot compile {term_str(s)}")

    return b.construction(go(t))


def rename_pr(c: PRConstruction, prefix: str) -> PRConstruction:
    ren = {d.name: prefix + d.name for d in c.defs}
    defs = tuple(
        Def(ren[d.name], d.arity, d.form, tuple(ren.get(r, r) for r in d.refs), d.index, d.declared) for d in c.defs
    )
    return PRConstruction(defs, ren[c.main])


def as_pr(f: ExplicitFunction, prefix="a") -> PRConstruction:
    if isinstance(f, PR):
        return rename_pr(f.construction, prefix)
    return tree_to_pr(f.term, f.vars, prefix)


# ------------------------------------------------------------ combinators


def promote(*fs):
    return max((type(f) for f in fs), key=lambda c: KIND_RANK[c])


def _unary(f) -> Term:
    return f.term if f.vars[0] == "w" else subst_term(f.term, f.vars[0], W())


def fn_sum(fs, prefix="u") -> ExplicitFunction:
    """Pointwise sum of unary explicit functions, in the least expressive common kind."""
    fs = list(fs)
    if not fs:
        return const(0)
    kind = promote(*fs)
    if kind is not PR:
        t = _unary(fs[0])
        for f in fs[1:]:
            t = Plus(t, _unary(f))
        return kind(t)
    b = _Builder(prefix)
    parts = [b.absorb(as_pr(f, f"{prefix}{i}_")) for i, f in enumerate(fs)]
    acc = parts[0]
    for p in parts[1:]:
        acc = b.comp(1, b.add_fn(), acc, p)
    return PR(b.construction(acc))


def compose(f: ExplicitFunction, g: ExplicitFunction) -> ExplicitFunction:
    """``w -> f(g(w))`` for unary functions."""
    kind = promote(f, g)
    if kind is not PR:
        return kind(subst_term(_unary(f), "w", _unary(g)))
    b = _Builder("k")
    outer = b.absorb(as_pr(f, "kf_"))
    inner = b.absorb(as_pr(g, "kg_"))
    return PR(b.construction(b.comp(1, outer, inner)))


def iterate(f: ExplicitFunction, m: int) -> ExplicitFunction:
    """The m-fold composition of a unary function with itself."""
    if m < 0:
        raise ValueError("negative iteration count")
    if isinstance(f, (Poly, Elem)):
        t: Term = W()
        body = _unary(f)
        for _ in range(m):
            t = subst_term(body, "w", t)
        return type(f)(t)
    b = _Builder("i")
    step = b.absorb(as_pr(f, "if_"))
    acc = b.proj(1, 1)
    for _ in range(m):
        acc = b.comp(1, step, acc)
    return PR(b.construction(acc))


def iterate_eval(f, m: int, x: int) -> int:
    for _ in range(m):
        x = _guard_bits(call(f, x))
    return x


def iteration_construction(f: ExplicitFunction, prefix="it") -> tuple:
    """A construction with ``it(n, x) = f^n(x)``; returns (builder, name)."""
    b = _Builder(prefix)
    step = b.absorb(as_pr(f, f"{prefix}f_"))
    h = b.comp(3, step, b.proj(3, 2))
    return b, b.rec(2, b.proj(1, 1), h)


# ---------------------------------------------------------- bound formulas


def bound_cla6(d: int, ell: int, phi, eta) -> int:
    return d * ((1 << ell) + 1) * call(phi, call(eta, ell))


def bound_cla7(d: int, ell: int, phi) -> int:
    m = (1 << ell) * d
    return m * iterate_eval(phi, m, ell)


# calibrated by notebooks/calibrate_mu.py against the instrumented space composer
MU_SLOPE = 4
MU_OFFSET = 64


def bound_cla5_space(phi, ell: int, mu_slope: int = MU_SLOPE, mu_offset: int = MU_OFFSET) -> int:
    return mu_slope * call(phi, ell) + mu_offset


def cla5_space_object(phi: ExplicitFunction, mu_slope=MU_SLOPE, mu_offset=MU_OFFSET) -> Poly:
    if not isinstance(phi, Poly):
        raise TypeError("a polynomial space bound needs a polynomial argument")
    return Poly(Plus(Times(num(mu_slope), phi.term), num(mu_offset)))


def cla6_time_object(d: int, phi: ExplicitFunction, eta: ExplicitFunction) -> Elem:
    inner = compose(phi, eta)
    if isinstance(inner, PR):
        raise TypeError("an elementary bound needs elementary arguments")
    return Elem(Times(Times(num(d), Succ(EXP(W()))), inner.term))


def cla7_time_object(d: int, phi: ExplicitFunction) -> PR:
    """``w -> 2^w * d * phi^(2^w * d)(w)`` as a construction."""
    b, it = iteration_construction(phi)
    e = b.exp_fn()
    m = b.comp(1, b.mul_fn(), e, tree_leaf_const(b, d))
    itm = b.comp(1, it, m, b.proj(1, 1))
    main = b.comp(1, b.mul_fn(), m, itm)
    return PR(b.construction(main))


def tree_leaf_const(b: _Builder, d: int) -> str:
    acc = b.zero(1)
    for _ in range(d):
        acc = b.comp(1, b.succ(), acc)
    return acc


# ------------------------------------------------------------------- eta


SLACK = 4


def _size_env_value(t: Term, mode: str, ell: int, known: dict) -> int:
    """Evaluate a sizebound's bound term, replacing variables by their ceilings."""
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Succ):
        return _size_env_value(t.t, mode, ell, known) + 1
    if isinstance(t, Plus):
        return _size_env_value(t.l, mode, ell, known) + _size_env_value(t.r, mode, ell, known)
    if isinstance(t, Times):
        return _size_env_value(t.l, mode, ell, known) * _size_env_value(t.r, mode, ell, known)
    if isinstance(t, Len):
        if isinstance(t.t, Var):
            return known.get(t.t.name, ell)
        return size(eval_tree(t.t, {}))
    if isinstance(t, Var):
        return known.get(t.name, 1 << ell)
    raise NotBounded(f"unexpected term {term_str(t)} in a sizebound")


def _guarded_quantifiers(f: Formula, mode: str):
    for g in subformulas(f):
        if isinstance(g, CHOICE_QUANTIFIERS):
            s = as_sizebound(guard_of(g), g.var) if guard_of(g) is not None else None
            if s is None:
                raise NotBounded(f"choice quantifier on {g.var} lacks a sizebound")
            yield g.var, s


def _mode(mode):
    m = str(mode).lower()
    if m.startswith("poly"):
        return POLYNOMIAL
    if m.startswith("exp"):
        return EXPONENTIAL
    raise ValueError(f"unknown mode {mode}")


def eta_bound(f: Formula, ell: int, mode=POLYNOMIAL) -> int:
    """A ceiling on the size of every move in a play of ``f`` with background ``ell``.

    Sizebounds are processed outermost first.  Free variables stand for
    constants of size ``ell`` (polynomial mode reads ``|y|`` as ``ell``,
    exponential mode reads ``y`` as ``2**ell``); a choice-bound variable
    stands for the ceiling already computed for it.  The result is the
    largest ceiling plus a fixed slack of 4 for side choices.
    """
    mode = _mode(mode)
    cls = classify(f)
    if not (cls.polynomially_bounded if mode == POLYNOMIAL else cls.exponentially_bounded):
        raise NotBounded(f"formula is not {mode}ly bounded")
    known: dict = {}
    for var, s in _guarded_quantifiers(f, mode):
        known[var] = _size_env_value(s.bound_term, mode, ell, known)
    return max(known.values(), default=0) + SLACK


def eta_term(f: Formula, mode=POLYNOMIAL) -> ExplicitFunction:
    """A symbolic version of :func:`eta_bound` (sum of ceilings instead of max)."""
    mode = _mode(mode)
    cls = classify(f)
    if not (cls.polynomially_bounded if mode == POLYNOMIAL else cls.exponentially_bounded):
        raise NotBounded(f"formula is not {mode}ly bounded")
    known: dict = {}
    free_size = W()
    free_value = EXP(W())

    def sym(t):
        if isinstance(t, (Zero, Num)):
            return t
        if isinstance(t, Succ):
            return Succ(sym(t.t))
        if isinstance(t, (Plus, Times)):
            return type(t)(sym(t.l), sym(t.r))
        if isinstance(t, Len):
            if isinstance(t.t, Var):
                return known.get(t.t.name, free_size)
            return num(size(eval_tree(t.t, {})))
        if isinstance(t, Var):
            return known.get(t.name, free_value)
        raise NotBounded(term_str(t))

    total: Term = num(SLACK)
    for var, s in _guarded_quantifiers(f, mode):
        known[var] = sym(s.bound_term)
        total = Plus(total, known[var])
    return Poly(total) if is_poly_term(total) else Elem(total)


def quiescence_bound(states: int, symbols: int, depth_: int, eta_value: int, phi) -> int:
    """The configuration-count product for a machine of the given shape."""
    p = call(phi, eta_value)
    r = 2 * depth_ * eta_value + 2 * depth_ + 1
    return states * p * r * symbols**p * symbols**r


@dataclass
class Bound:
    """A bound object: an explicit function and what it measures."""

    function: ExplicitFunction
    kind: str  # "space" or "time"

    def __call__(self, ell: int) -> int:
        return eval_fn(self.function, [ell])

    def describe(self) -> str:
        return f"{self.kind} {kind_name(self.function)}: {self.function}"
