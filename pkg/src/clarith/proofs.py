"""Proof objects for each system: the file format plus checking and extraction.

A proof is a DAG of nodes.  An axiom node names an axiom; a logical
consequence (LC) node carries a strategy script that wins its conclusion
given strategies for its premises; an induction node names its variable
together with its basis and step premises.  The systems differ only in which formulas
induction may be applied to.

File format::

    (proof (system CLA5)
      (fun "def s/1 = succ")
      (node a (axiom 8))
      (node b (lc (concl "<formula>") (prem a) (script (wait . $x) ...)))
      (node c (ind (system-var x) (basis b) (step d) (concl "<formula>")))
      (root c))

``fun`` lines define primitive recursive function symbols usable in
formulas and in ``compute`` instructions.  Axiom nodes may carry their
sentence: ``(axiom 7 "<sentence>")`` for an elementary induction instance,
``(axiom pa "<sentence>")`` for any true elementary sentence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional

from .bounds import PR, Bound, Elem, NotBounded, Poly, PRConstruction, as_pr, compile_pr, validate_pr
from .compose.basic import UnknownAxiom, axiom_formula, axiom_strategy, silent_strategy
from .compose.induction import induction_parallel, induction_space
from .compose.scripts import (
    Script,
    ScriptStrategy,
    ScriptTypeError,
    script_from_sexprs,
    typecheck,
    unparse,
)
from .compose.updown import basis_formula, step_formula
from .games import eval_elementary
from .sexpr import SexprError, Str, Sym, head, read_all, write
from .syntax import (
    App,
    ChAll,
    ForAll,
    Formula,
    Imp,
    And,
    ParseError,
    choice_closure,
    classify,
    exp_relax_formula,
    free_vars,
    is_closed,
    is_elementary,
    parse_formula,
    pretty,
    subformulas,
    subterms,
    substitute,
    Succ,
    Var,
    Zero,
)

SYSTEMS = ("CLA5", "CLA6", "CLA7")
REQUIRED_CLASS = {"CLA5": "polynomially bounded", "CLA6": "exponentially bounded", "CLA7": None}


class ProofParseError(ValueError):
    def __init__(self, message, line=0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class CheckFailed(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics if d.severity == "error"))


# ------------------------------------------------------------------- objects


@dataclass(frozen=True)
class AxiomRule:
    axiom: str  # "1".."9" or "pa"
    sentence: Optional[Formula] = None


@dataclass(frozen=True)
class LCRule:
    premises: tuple
    script: Script


@dataclass(frozen=True)
class InductionRule:
    var: str
    basis: str
    step: str


@dataclass(frozen=True)
class ProofNode:
    id: str
    rule: object
    conclusion: Optional[Formula] = None  # None for axioms with a fixed sentence
    line: int = 0

    def refs(self) -> tuple:
        if isinstance(self.rule, LCRule):
            return self.rule.premises
        if isinstance(self.rule, InductionRule):
            return (self.rule.basis, self.rule.step)
        return ()


@dataclass
class Proof:
    system: str
    nodes: dict  # id -> ProofNode, in file order
    root: str
    functions: tuple = ()  # Def objects

    @property
    def construction(self) -> Optional[PRConstruction]:
        if not self.functions:
            return None
        return PRConstruction(tuple(self.functions), self.functions[-1].name)

    @property
    def funcs(self) -> dict:
        c = self.construction
        if c is None or validate_pr(c):
            return {}
        table = compile_pr(c)
        for d in c.defs:
            table[d.name].arity = d.arity
        return table

    def text(self) -> str:
        return write_proof(self)

    def with_system(self, system: str) -> "Proof":
        return replace(self, system=system.upper())


@dataclass(frozen=True)
class Diagnostic:
    node: str
    code: str
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.node}: {self.code}: {self.message}"


# ------------------------------------------------------------------- parsing


def _line(x) -> int:
    if isinstance(x, (Sym, Str)):
        return x.line
    if isinstance(x, list):
        for y in x:
            n = _line(y)
            if n:
                return n
    return 0


def _formula(x, what, line) -> Formula:
    if not isinstance(x, Str):
        raise ProofParseError(f"{what} must be a quoted formula", line)
    try:
        return parse_formula(x.text)
    except ParseError as e:
        raise ProofParseError(f"{what}: {e}", line) from None


def _clause(items, name):
    for it in items:
        if head(it) == name:
            return it
    return None


def _ident(x, what, line) -> str:
    if not isinstance(x, Sym):
        raise ProofParseError(f"expected {what}", line)
    return x.text


def parse_proof(text: str) -> Proof:
    try:
        items = read_all(text)
    except SexprError as e:
        raise ProofParseError(str(e), e.line) from None
    if len(items) != 1 or head(items[0]) != "proof":
        raise ProofParseError("a proof file holds exactly one (proof ...) form", 1)
    system, root, nodes, defs = None, None, {}, []
    for clause in items[0][1:]:
        line = _line(clause)
        h = head(clause)
        if h == "system" and len(clause) == 2:
            system = _ident(clause[1], "a system name", line).upper()
            if system not in SYSTEMS:
                raise ProofParseError(f"unknown system {system}", line)
        elif h == "root" and len(clause) == 2:
            root = _ident(clause[1], "a node id", line)
        elif h == "fun" and len(clause) == 2 and isinstance(clause[1], Str):
            from .bounds import parse_pr

            try:
                c = parse_pr(clause[1].text + "\nmain _")
            except ValueError as e:
                raise ProofParseError(str(e), line) from None
            defs.extend(c.defs)
        elif h == "node" and len(clause) == 3:
            nid = _ident(clause[1], "a node id", line)
            if nid in nodes:
                raise ProofParseError(f"node {nid} is defined twice", line)
            nodes[nid] = _parse_node(nid, clause[2], line)
        else:
            raise ProofParseError(f"unexpected clause {write(clause)[:40]}", line)
    if system is None:
        raise ProofParseError("missing (system ...)")
    if root is None:
        raise ProofParseError("missing (root ...)")
    return Proof(system, nodes, root, tuple(defs))


def _parse_node(nid, rule, line) -> ProofNode:
    h = head(rule)
    if h == "axiom" and len(rule) in (2, 3):
        key = _ident(rule[1], "an axiom number", line).lower()
        sentence = _formula(rule[2], "axiom sentence", line) if len(rule) == 3 else None
        return ProofNode(nid, AxiomRule(key, sentence), sentence, line)
    if h == "lc":
        concl = _clause(rule[1:], "concl")
        if concl is None or len(concl) != 2:
            raise ProofParseError(f"node {nid}: lc needs (concl \"...\")", line)
        prem = _clause(rule[1:], "prem") or [None]
        script = _clause(rule[1:], "script") or [None]
        try:
            s = script_from_sexprs(script[1:])
        except ScriptTypeError as e:
            raise ProofParseError(f"node {nid}: {e}", _line(script) or line) from None
        prems = tuple(_ident(p, "a premise id", line) for p in prem[1:])
        return ProofNode(nid, LCRule(prems, s), _formula(concl[1], "conclusion", line), line)
    if h == "ind":
        parts = {}
        for key in ("system-var", "basis", "step", "concl"):
            c = _clause(rule[1:], key)
            if c is None or len(c) != 2:
                raise ProofParseError(f"node {nid}: ind needs ({key} ...)", line)
            parts[key] = c[1]
        r = InductionRule(
            _ident(parts["system-var"], "a variable", line),
            _ident(parts["basis"], "a node id", line),
            _ident(parts["step"], "a node id", line),
        )
        return ProofNode(nid, r, _formula(parts["concl"], "conclusion", line), line)
    raise ProofParseError(f"node {nid}: unknown rule {write(rule)[:30]}", line)


def write_proof(p: Proof) -> str:
    out = [f"(proof (system {p.system})"]
    for d in p.functions:
        out.append(f'  (fun "{d.text()}")')
    for n in p.nodes.values():
        r = n.rule
        if isinstance(r, AxiomRule):
            tail = f' "{pretty(r.sentence)}"' if r.sentence is not None else ""
            out.append(f"  (node {n.id} (axiom {r.axiom}{tail}))")
        elif isinstance(r, InductionRule):
            out.append(
                f"  (node {n.id} (ind (system-var {r.var}) (basis {r.basis}) (step {r.step})"
                f' (concl "{pretty(n.conclusion)}")))'
            )
        else:
            out.append(f"  (node {n.id} (lc (concl \"{pretty(n.conclusion)}\")")
            out.append("    (prem" + "".join(" " + q for q in r.premises) + ")")
            lines = [write(unparse(i)) for i in r.script.instructions]
            if lines:
                out.append("    (script")
                out.extend("      " + s for s in lines[:-1])
                out.append("      " + lines[-1] + ")))")
            else:
                out.append("    (script)))")
    out.append(f"  (root {p.root}))")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------- checking


def split_induction(conclusion: Formula, var: str, basis: Optional[Formula] = None,
                    step: Optional[Formula] = None) -> Optional[Formula]:
    """The ``F`` with ``conclusion == choice_closure(F)`` and ``var`` free in ``F``.

    Several ``F`` can fit when ``F`` itself starts with choice universals;
    the premises' conclusions, when given, pick the intended one, and
    otherwise the deepest split wins.
    """
    f, found = conclusion, []
    while isinstance(f, ChAll):
        f = f.body
        if var in free_vars(f) and choice_closure(f) == conclusion:
            found.append(f)
    for F in reversed(found):
        if (basis is None or basis == choice_closure(basis_formula(F, var))) and (
            step is None or step == choice_closure(step_formula(F, var))
        ):
            return F
    return found[-1] if found else None


def is_induction_instance(s: Formula) -> bool:
    """``E(0) /\\ all x (E(x) -> E(x')) -> all x E(x)``, possibly under universal quantifiers."""
    while isinstance(s, ForAll) and not (isinstance(s.body, Imp)):
        s = s.body
    if not isinstance(s, Imp) or not isinstance(s.r, ForAll):
        return False
    x, body = s.r.var, s.r.body
    if not isinstance(s.l, And):
        return False
    expected_base = substitute(body, x, Zero())
    step = s.l.r
    return (
        s.l.l == expected_base
        and isinstance(step, ForAll)
        and step.body == Imp(substitute(body, x, Var(step.var)), substitute(body, x, Succ(Var(step.var))))
    )


def node_conclusion(n: ProofNode) -> Optional[Formula]:
    if n.conclusion is not None:
        return n.conclusion
    if isinstance(n.rule, AxiomRule) and n.rule.axiom.isdigit():
        try:
            return axiom_formula(int(n.rule.axiom))
        except UnknownAxiom:
            return None
    return None


def _natural_key(s: str):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


def check_proof(p: Proof, system: Optional[str] = None, truth_cap: int = 64) -> list:
    """Every problem found, errors and warnings alike, ordered by node id."""
    system = (system or p.system).upper()
    diags: list = []
    err = lambda node, code, msg: diags.append(Diagnostic(node, code, msg))  # noqa: E731
    warn = lambda node, code, msg: diags.append(Diagnostic(node, code, msg, "warning"))  # noqa: E731

    if system not in SYSTEMS:
        err("proof", "UnknownSystem", f"no system {system}")
        return diags
    c = p.construction
    if c is not None:
        for e in validate_pr(c):
            err(getattr(e, "definition", None) or "proof", type(e).__name__, str(e))
    arities = {d.name: d.arity for d in p.functions}
    funcs = p.funcs

    if p.root not in p.nodes:
        err("proof", "DanglingRef", f"root {p.root} is not defined")
    for n in p.nodes.values():
        for r in n.refs():
            if r not in p.nodes:
                err(n.id, "DanglingRef", f"refers to undefined node {r}")
    cyclic = _cycle(p)
    if cyclic:
        err(cyclic, "CyclicProof", "the proof graph has a cycle through this node")
        return _ordered(diags)

    concl = {nid: node_conclusion(n) for nid, n in p.nodes.items()}
    for n in p.nodes.values():
        f = concl[n.id]
        if f is not None:
            if not is_closed(f):
                err(n.id, "NotClosed", f"conclusion has free variables {sorted(free_vars(f))}")
            for name, ar in sorted(_apps(f)):
                if name == "exp" and ar == 1:
                    continue
                if arities.get(name) != ar:
                    err(n.id, "UnknownFunction", f"{name}/{ar} is not defined")
        r = n.rule
        if isinstance(r, AxiomRule):
            _check_axiom(n, r, err, warn, funcs, truth_cap)
        elif isinstance(r, LCRule):
            prem = [concl.get(q) for q in r.premises]
            if any(q is None for q in prem):
                continue
            try:
                typecheck(r.script, f, prem, funcs)
            except ScriptTypeError as e:
                err(n.id, "ScriptTypeError", str(e))
        elif isinstance(r, InductionRule):
            b, s = concl.get(r.basis), concl.get(r.step)
            F = split_induction(f, r.var, b, s)
            if F is None:
                err(n.id, "MalformedInduction", f"conclusion is not the closure of a formula with {r.var} free")
                continue
            if b is not None and b != choice_closure(basis_formula(F, r.var)):
                err(n.id, "MalformedInduction", f"basis {r.basis} does not conclude {pretty(choice_closure(basis_formula(F, r.var)))}")
            if s is not None and s != choice_closure(step_formula(F, r.var)):
                err(n.id, "MalformedInduction", f"step {r.step} does not conclude {pretty(choice_closure(step_formula(F, r.var)))}")
            need = REQUIRED_CLASS[system]
            cls = classify(F)
            if need == "polynomially bounded" and not cls.polynomially_bounded:
                err(n.id, "SideConditionViolation", f"{system} induction needs a polynomially bounded formula")
            if need == "exponentially bounded" and not cls.exponentially_bounded:
                err(n.id, "SideConditionViolation", f"{system} induction needs an exponentially bounded formula")
    return _ordered(diags)


def _apps(f: Formula) -> set:
    from .syntax import ATOMS

    out = set()
    for g in subformulas(f):
        if isinstance(g, ATOMS):
            for t in (g.l, g.r):
                for u in subterms(t):
                    if isinstance(u, App):
                        out.add((u.fn, len(u.args)))
    return out


def _check_axiom(n, r: AxiomRule, err, warn, funcs, truth_cap):
    key = r.axiom
    if key == "pa":
        s = r.sentence
        if s is None:
            err(n.id, "MalformedAxiom", "a pa axiom needs its sentence")
            return
        if not is_elementary(s):
            err(n.id, "MalformedAxiom", "a pa axiom must be elementary")
            return
        verdict = eval_elementary(s, truth_cap, funcs) if is_closed(s) else None
        if verdict is False:
            err(n.id, "FalseAxiom", f"{pretty(s)} is false")
        elif verdict is None:
            warn(n.id, "Unverified", f"truth of {pretty(s)} is not decided at cap {truth_cap}")
        return
    if not key.isdigit() or not 1 <= int(key) <= 9:
        err(n.id, "UnknownAxiom", f"no axiom {key}")
        return
    k = int(key)
    if k == 7:
        if r.sentence is None or not is_elementary(r.sentence) or not is_induction_instance(r.sentence):
            err(n.id, "MalformedAxiom", "axiom 7 needs an elementary induction instance")
        return
    if r.sentence is not None and r.sentence != axiom_formula(k):
        err(n.id, "MalformedAxiom", f"axiom {k} is {pretty(axiom_formula(k))}")
    if k == 9:
        warn(n.id, "Deprecated", "axiom 9 is derivable (see the doubling proof) and kept for compatibility")


def _cycle(p: Proof) -> Optional[str]:
    state: dict = {}
    for start in p.nodes:
        if state.get(start):
            continue
        stack = [(start, iter(p.nodes[start].refs()))]
        state[start] = 1
        while stack:
            nid, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[nid] = 2
                stack.pop()
            elif nxt in p.nodes:
                if state.get(nxt) == 1:
                    return nxt
                if not state.get(nxt):
                    state[nxt] = 1
                    stack.append((nxt, iter(p.nodes[nxt].refs())))
    return None


def _ordered(diags):
    return sorted(diags, key=lambda d: (_natural_key(d.node), d.severity != "error"))


def errors(diags) -> list:
    return [d for d in diags if d.severity == "error"]


# ------------------------------------------------------------------ extraction


@dataclass
class ExtractedSolution:
    strategy: object
    bound: object  # ExplicitFunction
    bound_kind: str  # "space" or "time"
    system: str
    strategies: dict = field(default_factory=dict)  # node id -> strategy

    def describe(self) -> str:
        return Bound(self.bound, self.bound_kind).describe()


def _promote(f, system):
    if system == "CLA6" and isinstance(f, Poly):
        return Elem(f.term)
    if system == "CLA7" and not isinstance(f, PR):
        return PR(as_pr(f, "b_"))
    return f


def extract(p: Proof, system: Optional[str] = None, truth_cap: int = 64) -> ExtractedSolution:
    """Compile a checked proof into a strategy for its root, with its bound."""
    system = (system or p.system).upper()
    diags = check_proof(p, system, truth_cap)
    if errors(diags):
        raise CheckFailed(diags)
    funcs = p.funcs or None
    memo: dict = {}

    def build(nid):
        if nid in memo:
            return memo[nid]
        n = p.nodes[nid]
        r = n.rule
        if isinstance(r, AxiomRule):
            if r.axiom == "pa" or r.axiom == "7" or (r.axiom.isdigit() and int(r.axiom) <= 6):
                s = silent_strategy(node_conclusion(n) or r.sentence, nid)
            else:
                s = axiom_strategy(int(r.axiom))
            s.name = nid
        elif isinstance(r, LCRule):
            prem = [build(q) for q in r.premises]
            s = ScriptStrategy(n.conclusion, r.script, prem, funcs, nid)
        else:
            N, K = build(r.basis), build(r.step)
            F = split_induction(n.conclusion, r.var, N.target, K.target)
            if system == "CLA5":
                s = induction_space(N, K, F, r.var, funcs, truth_cap=truth_cap)
            else:
                s = induction_parallel(N, K, F, r.var, system.lower(), funcs, truth_cap=truth_cap)
            s.name = nid
        memo[nid] = s
        return s

    # bottom-up in dependency order keeps the recursion shallow
    for nid in _topological(p):
        build(nid)
    root = memo[p.root]
    if system == "CLA5":
        bound, kind = root.space_bound, "space"
    else:
        bound, kind = root.time_bound, "time"
    if bound is None:
        raise NotBounded(f"the {kind} bound of {p.root} is not determined")
    return ExtractedSolution(root, _promote(bound, system), kind, system, memo)


def _topological(p: Proof) -> list:
    order, seen = [], set()

    def visit(nid):
        stack = [(nid, False)]
        while stack:
            x, done = stack.pop()
            if done:
                order.append(x)
                continue
            if x in seen:
                continue
            seen.add(x)
            stack.append((x, True))
            for r in reversed(p.nodes[x].refs()):
                if r not in seen:
                    stack.append((r, False))

    for nid in p.nodes:
        visit(nid)
    return order


# ---------------------------------------------------------- relaxation to CLA6


def _relay_script(formula: Formula) -> Script:
    """Read the closure constants, then play the single premise on the whole game."""
    names = []
    while isinstance(formula, ChAll):
        names.append(f"c{len(names)}")
        formula = formula.body
    lines = [f"(wait . ${v})" for v in names]
    feed = " ".join(f"${v}" for v in names)
    lines.append(f"(use 0 ({feed}) (. .))")
    return script_from_sexprs(read_all("\n".join(lines)))


def relax_proof(p: Proof) -> Proof:
    """Turn a CLA5 proof into a CLA6 proof of the same sentence.

    Each induction on ``F`` becomes an induction on the relaxed ``F'``; new
    LC nodes carry the basis and step over to ``F'`` and carry the
    conclusion back to ``F``, each by relaying a single premise.
    """
    if p.system != "CLA5":
        raise ValueError("relax_proof expects a CLA5 proof")
    nodes: dict = {}
    for n in p.nodes.values():
        r = n.rule
        if not isinstance(r, InductionRule):
            nodes[n.id] = n
            continue
        F = split_induction(n.conclusion, r.var, node_conclusion(p.nodes[r.basis]), node_conclusion(p.nodes[r.step]))
        G = exp_relax_formula(F)
        basis_c = choice_closure(basis_formula(G, r.var))
        step_c = choice_closure(step_formula(G, r.var))
        ind_c = choice_closure(G)
        b, s, i = f"{n.id}-relaxed-basis", f"{n.id}-relaxed-step", f"{n.id}-relaxed"
        nodes[b] = ProofNode(b, LCRule((r.basis,), _relay_script(basis_c)), basis_c)
        nodes[s] = ProofNode(s, LCRule((r.step,), _relay_script(step_c)), step_c)
        nodes[i] = ProofNode(i, InductionRule(r.var, b, s), ind_c)
        nodes[n.id] = ProofNode(n.id, LCRule((i,), _relay_script(n.conclusion)), n.conclusion)
    return Proof("CLA6", nodes, p.root, p.functions)


# ------------------------------------------------------------------- library


def library() -> list:
    """The shipped proofs, as (name, Proof) pairs."""
    from .library import load_library

    return load_library()


# ------------------------------------------------------------ strategy files


class StrategyFileError(ValueError):
    pass


def _composer_id(s) -> str:
    if isinstance(s, ScriptStrategy):
        return "lc"
    composer = getattr(s, "composer", None)
    return composer if composer else "axiom"


def write_strategy(sol: ExtractedSolution, proof_ref: str, node: Optional[str] = None) -> str:
    """Serialize one extracted strategy as a reference into its proof file.

    Strategies are not stored as machine code: the file names the proof,
    the system and the node, and records the composer, the premise nodes,
    the formula and the bound so that a reload can be cross-checked.
    """
    s = sol.strategy if node is None else sol.strategies[node]
    nid = node or s.name
    prem = [getattr(q, "name", "?") for q in getattr(s, "premises", [])]
    bound = s.space_bound if sol.system == "CLA5" else s.time_bound
    if nid == sol.strategy.name:
        bound = sol.bound
    out = [
        [Sym("proof"), Str(proof_ref)],
        [Sym("system"), Sym(sol.system)],
        [Sym("node"), Sym(nid)],
        [Sym("composer"), Sym(_composer_id(s))],
        [Sym("premises")] + [Sym(q) for q in prem],
        [Sym("formula"), Str(pretty(s.target))],
    ]
    if bound is not None:
        out.append([Sym("bound"), Sym(sol.bound_kind), Str(str(bound))])
    return "(strategy\n" + "\n".join(f"  {write(x)}" for x in out) + ")\n"


@dataclass
class StrategyFile:
    proof_ref: str
    system: str
    node: str
    composer: str = ""
    premises: tuple = ()
    formula: str = ""
    bound: str = ""


def parse_strategy_file(text: str) -> StrategyFile:
    try:
        items = read_all(text)
    except SexprError as e:
        raise StrategyFileError(str(e)) from None
    if len(items) != 1 or head(items[0]) != "strategy":
        raise StrategyFileError("a strategy file holds exactly one (strategy ...) form")
    fields: dict = {}
    for item in items[0][1:]:
        key = head(item)
        if key is None:
            raise StrategyFileError(f"unexpected {write(item)}")
        fields[key] = item[1:]
    for key in ("proof", "system", "node"):
        if key not in fields or not fields[key]:
            raise StrategyFileError(f"missing ({key} ...)")

    def text_of(x):
        return x.text

    return StrategyFile(
        text_of(fields["proof"][0]),
        text_of(fields["system"][0]).upper(),
        text_of(fields["node"][0]),
        text_of(fields["composer"][0]) if fields.get("composer") else "",
        tuple(text_of(x) for x in fields.get("premises", [])),
        text_of(fields["formula"][0]) if fields.get("formula") else "",
        " ".join(text_of(x) for x in fields.get("bound", [])),
    )


def load_strategy(sf: StrategyFile, proof: Proof, truth_cap: int = 64):
    """Re-extract the referenced node and check it still plays the recorded formula."""
    sol = extract(proof, sf.system, truth_cap)
    if sf.node not in sol.strategies:
        raise StrategyFileError(f"the proof has no node {sf.node}")
    s = sol.strategies[sf.node]
    if sf.formula and sf.formula != pretty(s.target):
        raise StrategyFileError(f"node {sf.node} no longer proves the recorded formula")
    return s
