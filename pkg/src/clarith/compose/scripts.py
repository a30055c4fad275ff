"""Strategy scripts: small programs that certify logical-consequence steps.

A script is a list of instructions, one per line, in s-expression form::

    (wait <addr> $b)                 bind the adversary's move at <addr>
    (compute $b <fn> <arg> ...)      builtin or named function of binders
    (move <addr> <expr>)             choose a constant for a choice quantifier
    (choose <addr> left|right)       choose a side of a choice connective
    (copycat <addr> <addr>)          mirror two subgames from now on
    (use <k> (<feed> ...) (<premise-addr> <addr>) ...)
                                     play premise k inside the given subgames
    (query ($b ...) <k> <feed> ...)  run premise k to quiescence, bind its moves
    (if (<op> <expr> <expr>) (<instr> ...) (<instr> ...))

Addresses are ``.`` for the root or dotted child indices such as ``0.1``.
An expression is a binder ``$b``, a numeral, ``left``/``right`` or
``(size <expr>)``.  Each executed instruction takes one cycle; a ``wait``
takes no cycles until its move arrives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..bounds import EXP, Bound, Poly, W, const, fn_sum
from ..games import (
    BOT,
    LEFT,
    RIGHT,
    TOP,
    IllegalMove,
    LabMove,
    Move,
    active_occurrences,
    check_move,
    owner,
    parse_address,
    subformula_at,
)
from ..machines.strategy import Session, Strategy
from ..sexpr import Sym, read_all, write
from ..syntax import (
    CHOICE_BINARY,
    CHOICE_QUANTIFIERS,
    Formula,
    Plus,
    Succ,
    Term,
    Var,
    depth,
    num,
    size,
    substitute,
)
from .relay import Link, PairingMismatch, check_pairing, has_prefix, polarity_at, skeleton


class ScriptTypeError(ValueError):
    def __init__(self, message, index=None):
        self.index = index
        where = f"instruction {index}: " if index is not None else ""
        super().__init__(where + message)


class IllegalPremiseBehavior(RuntimeError):
    pass


# ------------------------------------------------------------ instructions


@dataclass(frozen=True)
class Wait:
    address: tuple
    binder: str


@dataclass(frozen=True)
class Compute:
    binder: str
    fn: str
    args: tuple


@dataclass(frozen=True)
class MakeMove:
    address: tuple
    expr: object


@dataclass(frozen=True)
class ChooseSide:
    address: tuple
    side: str


@dataclass(frozen=True)
class Copycat:
    a: tuple
    b: tuple


@dataclass(frozen=True)
class UsePremise:
    premise: int
    feed: tuple
    mapping: tuple  # ((premise_prefix, target_prefix), ...)


@dataclass(frozen=True)
class Query:
    binders: tuple
    premise: int
    feed: tuple


@dataclass(frozen=True)
class Branch:
    op: str
    lhs: object
    rhs: object
    then: tuple
    orelse: tuple


# expressions: ('bind', name) | ('const', n) | ('side', 'L'|'R') | ('size', expr)


BUILTINS = {
    "succ": (1, lambda a: a + 1),
    "pred": (1, lambda a: max(a - 1, 0)),
    "double": (1, lambda a: 2 * a),
    "double1": (1, lambda a: 2 * a + 1),
    "half": (1, lambda a: a // 2),
    "parity": (1, lambda a: a % 2),
    "add": (2, lambda a, b: a + b),
    "sub": (2, lambda a, b: max(a - b, 0)),
    "mul": (2, lambda a, b: a * b),
    "exp": (1, lambda a: 2**a),
}

CONDITIONS = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
}


@dataclass
class Script:
    instructions: tuple
    source: str = ""

    def __len__(self):
        return _count(self.instructions)

    def text(self) -> str:
        return self.source or "\n".join(write(unparse(i)) for i in self.instructions)


def _count(instrs) -> int:
    n = 0
    for i in instrs:
        n += 1
        if isinstance(i, Branch):
            n += _count(i.then) + _count(i.orelse)
    return n


# ------------------------------------------------------------------ parsing


def _sym(x, what, idx):
    if not isinstance(x, Sym):
        raise ScriptTypeError(f"expected {what}", idx)
    return x.text


def _addr(x, idx):
    try:
        return parse_address(_sym(x, "an address", idx))
    except ValueError as e:
        raise ScriptTypeError(str(e), idx) from None


def _binder(x, idx):
    t = _sym(x, "a binder", idx)
    if not t.startswith("$") or len(t) < 2:
        raise ScriptTypeError(f"binders start with '$': {t}", idx)
    return t[1:]


def _expr(x, idx):
    if isinstance(x, list):
        if len(x) == 2 and isinstance(x[0], Sym) and x[0].text == "size":
            return ("size", _expr(x[1], idx))
        raise ScriptTypeError("only (size <expr>) is a compound expression", idx)
    t = _sym(x, "an expression", idx)
    if t.startswith("$"):
        return ("bind", t[1:])
    if t.isdigit():
        return ("const", int(t))
    if t in ("left", "right", "L", "R"):
        return ("side", LEFT if t in ("left", "L") else RIGHT)
    raise ScriptTypeError(f"bad expression {t}", idx)


def _index(x, idx):
    t = _sym(x, "a premise index", idx)
    if not t.isdigit():
        raise ScriptTypeError(f"bad premise index {t}", idx)
    return int(t)


def parse_instruction(e, idx=None):
    if not isinstance(e, list) or not e or not isinstance(e[0], Sym):
        raise ScriptTypeError("an instruction is a parenthesised list", idx)
    op, args = e[0].text, e[1:]
    if op == "wait" and len(args) == 2:
        return Wait(_addr(args[0], idx), _binder(args[1], idx))
    if op == "compute" and len(args) >= 2:
        return Compute(_binder(args[0], idx), _sym(args[1], "a function name", idx), tuple(_expr(a, idx) for a in args[2:]))
    if op == "move" and len(args) == 2:
        return MakeMove(_addr(args[0], idx), _expr(args[1], idx))
    if op == "choose" and len(args) == 2:
        side = _expr(args[1], idx)
        if side[0] not in ("side", "bind"):
            raise ScriptTypeError("choose needs left, right or a binder holding a side", idx)
        return ChooseSide(_addr(args[0], idx), side[1] if side[0] == "side" else side)
    if op == "copycat" and len(args) == 2:
        return Copycat(_addr(args[0], idx), _addr(args[1], idx))
    if op == "use" and len(args) >= 2 and isinstance(args[1], list):
        mapping = []
        for pair in args[2:]:
            if not isinstance(pair, list) or len(pair) != 2:
                raise ScriptTypeError("use mappings are (<premise-addr> <addr>) pairs", idx)
            mapping.append((_addr(pair[0], idx), _addr(pair[1], idx)))
        return UsePremise(_index(args[0], idx), tuple(_expr(a, idx) for a in args[1]), tuple(mapping))
    if op == "query" and len(args) >= 2 and isinstance(args[0], list):
        return Query(tuple(_binder(b, idx) for b in args[0]), _index(args[1], idx), tuple(_expr(a, idx) for a in args[2:]))
    if op == "if" and len(args) == 3 and isinstance(args[0], list) and len(args[0]) == 3:
        cop = _sym(args[0][0], "a comparison", idx)
        if cop not in CONDITIONS:
            raise ScriptTypeError(f"unknown comparison {cop}", idx)
        then = tuple(parse_instruction(i, idx) for i in _block(args[1], idx))
        orelse = tuple(parse_instruction(i, idx) for i in _block(args[2], idx))
        return Branch(cop, _expr(args[0][1], idx), _expr(args[0][2], idx), then, orelse)
    raise ScriptTypeError(f"malformed instruction ({op} ...)", idx)


def _block(x, idx):
    if not isinstance(x, list):
        raise ScriptTypeError("a branch is a parenthesised list of instructions", idx)
    if x and isinstance(x[0], Sym) and x[0].text in ("then", "else", "do"):
        x = x[1:]
    return x


def script_from_sexprs(items, source="") -> Script:
    return Script(tuple(parse_instruction(e, i) for i, e in enumerate(items)), source)


def parse_script(text: str) -> Script:
    items = read_all(text)
    if len(items) == 1 and isinstance(items[0], list) and items[0] and isinstance(items[0][0], Sym) and items[0][0].text == "script":
        items = items[0][1:]
    return script_from_sexprs(items, text.strip())


def _uaddr(a):
    return Sym("." if not a else ".".join(map(str, a)))


def _uexpr(e):
    kind = e[0]
    if kind == "bind":
        return Sym("$" + e[1])
    if kind == "const":
        return Sym(str(e[1]))
    if kind == "side":
        return Sym("left" if e[1] == LEFT else "right")
    return [Sym("size"), _uexpr(e[1])]


def unparse(i):
    if isinstance(i, Wait):
        return [Sym("wait"), _uaddr(i.address), Sym("$" + i.binder)]
    if isinstance(i, Compute):
        return [Sym("compute"), Sym("$" + i.binder), Sym(i.fn)] + [_uexpr(a) for a in i.args]
    if isinstance(i, MakeMove):
        return [Sym("move"), _uaddr(i.address), _uexpr(i.expr)]
    if isinstance(i, ChooseSide):
        if isinstance(i.side, tuple):
            return [Sym("choose"), _uaddr(i.address), _uexpr(i.side)]
        return [Sym("choose"), _uaddr(i.address), Sym("left" if i.side == LEFT else "right")]
    if isinstance(i, Copycat):
        return [Sym("copycat"), _uaddr(i.a), _uaddr(i.b)]
    if isinstance(i, UsePremise):
        return [Sym("use"), Sym(str(i.premise)), [_uexpr(a) for a in i.feed]] + [
            [_uaddr(p), _uaddr(t)] for p, t in i.mapping
        ]
    if isinstance(i, Query):
        return [Sym("query"), [Sym("$" + b) for b in i.binders], Sym(str(i.premise))] + [_uexpr(a) for a in i.feed]
    if isinstance(i, Branch):
        return [
            Sym("if"),
            [Sym(i.op), _uexpr(i.lhs), _uexpr(i.rhs)],
            [unparse(x) for x in i.then],
            [unparse(x) for x in i.orelse],
        ]
    raise TypeError(i)


# ------------------------------------------------------------ type checking


@dataclass
class _SymState:
    position: Formula
    kinds: dict = field(default_factory=dict)  # binder -> 'num' | 'side' | 'any'
    delegated: tuple = ()


def _term_of(expr) -> Term:
    if expr[0] == "bind":
        return Var("$" + expr[1])
    if expr[0] == "const":
        return num(expr[1])
    raise ScriptTypeError("a constant move needs a numeric expression")


def _occurrence(state: _SymState, addr, player, idx, want):
    for a, occ, pos in active_occurrences(state.position):
        if a == addr:
            if owner(occ, pos) is not player:
                raise ScriptTypeError(f"the occurrence at {_fmt(addr)} belongs to the other player", idx)
            if not isinstance(occ, want):
                raise ScriptTypeError(f"the occurrence at {_fmt(addr)} has the wrong kind", idx)
            if any(has_prefix(addr, d) for d in state.delegated):
                raise ScriptTypeError(f"{_fmt(addr)} is already handed to a relay", idx)
            return occ
    raise ScriptTypeError(f"no active choice occurrence at {_fmt(addr)}", idx)


def _fmt(a):
    return "." if not a else ".".join(map(str, a))


def _check_expr(state, e, idx, want=("num",)):
    if e[0] == "bind":
        if e[1] not in state.kinds:
            raise ScriptTypeError(f"${e[1]} is used before it is bound", idx)
        k = state.kinds[e[1]]
        if k != "any" and k not in want:
            raise ScriptTypeError(f"${e[1]} is not a {'/'.join(want)}", idx)
    elif e[0] == "size":
        _check_expr(state, e[1], idx)
        if "num" not in want:
            raise ScriptTypeError("size is numeric", idx)
    elif e[0] == "side" and "side" not in want:
        raise ScriptTypeError("left/right used as a number", idx)
    elif e[0] == "const" and "num" not in want:
        raise ScriptTypeError("a number used as a side", idx)


def _resolve(f, addr, chosen):
    from ..games import _replace_at

    return _replace_at(f, addr, chosen)


def premise_instance(premise_concl: Formula, feed_terms) -> Formula:
    """Strip the choice-closure prefix of a premise, substituting the feed."""
    f = premise_concl
    for t in feed_terms:
        if not isinstance(f, CHOICE_QUANTIFIERS):
            raise ScriptTypeError("more feed values than closure quantifiers")
        f = substitute(f.body, f.var, t)
    return f


def closure_depth(f: Formula) -> int:
    n = 0
    while isinstance(f, CHOICE_QUANTIFIERS) and f.__class__.__name__ == "ChAll":
        n += 1
        f = f.body
    return n


def typecheck(script: Script, target: Formula, premises: list, funcs: Optional[dict] = None) -> None:
    """Raise :class:`ScriptTypeError` unless every path through the script fits the target.

    ``premises`` are the premise conclusions (formulas).
    """
    funcs = funcs or {}
    _check_block(list(script.instructions), _SymState(target), premises, funcs, [0])


def _check_block(instrs, state: _SymState, premises, funcs, counter):
    for pos, ins in enumerate(instrs):
        idx = counter[0]
        counter[0] += 1
        if isinstance(ins, Wait):
            if ins.binder in state.kinds:
                raise ScriptTypeError(f"${ins.binder} is bound twice", idx)
            occ = _occurrence(state, ins.address, BOT, idx, CHOICE_QUANTIFIERS + CHOICE_BINARY)
            if isinstance(occ, CHOICE_BINARY):
                for side in (occ.l, occ.r):
                    st = _SymState(_resolve(state.position, ins.address, side), {**state.kinds, ins.binder: "side"}, state.delegated)
                    _check_block(instrs[pos + 1:], st, premises, funcs, [counter[0]])
                return
            state.position = _resolve(state.position, ins.address, substitute(occ.body, occ.var, Var("$" + ins.binder)))
            state.kinds[ins.binder] = "num"
        elif isinstance(ins, Compute):
            if ins.fn in BUILTINS:
                ar = BUILTINS[ins.fn][0]
            elif ins.fn in funcs:
                ar = getattr(funcs[ins.fn], "arity", len(ins.args))
            else:
                raise ScriptTypeError(f"unknown function {ins.fn}", idx)
            if ar != len(ins.args):
                raise ScriptTypeError(f"{ins.fn} takes {ar} arguments", idx)
            for a in ins.args:
                _check_expr(state, a, idx)
            state.kinds[ins.binder] = "num"
        elif isinstance(ins, MakeMove):
            _check_expr(state, ins.expr, idx)
            occ = _occurrence(state, ins.address, TOP, idx, CHOICE_QUANTIFIERS)
            term = _term_of(ins.expr) if ins.expr[0] != "size" else Var("$size")
            state.position = _resolve(state.position, ins.address, substitute(occ.body, occ.var, term))
        elif isinstance(ins, ChooseSide):
            occ = _occurrence(state, ins.address, TOP, idx, CHOICE_BINARY)
            if isinstance(ins.side, tuple):
                _check_expr(state, ins.side, idx, ("side",))
                for side in (occ.l, occ.r):
                    st = _SymState(_resolve(state.position, ins.address, side), dict(state.kinds), state.delegated)
                    _check_block(instrs[pos + 1:], st, premises, funcs, [counter[0]])
                return
            state.position = _resolve(state.position, ins.address, occ.l if ins.side == LEFT else occ.r)
        elif isinstance(ins, Copycat):
            try:
                check_pairing(state.position, ins.a, ins.b)
            except PairingMismatch as e:
                raise ScriptTypeError(str(e), idx) from None
            state.delegated += (ins.a, ins.b)
        elif isinstance(ins, (UsePremise, Query)):
            if not 0 <= ins.premise < len(premises):
                raise ScriptTypeError(f"there is no premise {ins.premise}", idx)
            concl = premises[ins.premise]
            if len(ins.feed) != closure_depth(concl):
                raise ScriptTypeError(
                    f"premise {ins.premise} needs {closure_depth(concl)} closure constants, got {len(ins.feed)}", idx
                )
            for a in ins.feed:
                _check_expr(state, a, idx)
            inst = premise_instance(concl, [Var("$feed") for _ in ins.feed])
            if isinstance(ins, Query):
                if len(ins.binders) > max(depth(inst), 0):
                    raise ScriptTypeError(f"premise {ins.premise} makes at most {depth(inst)} moves", idx)
                for b in ins.binders:
                    state.kinds[b] = "any"
            else:
                for pp, tp in ins.mapping:
                    try:
                        psub, tsub = subformula_at(inst, pp), subformula_at(state.position, tp)
                    except (KeyError, IndexError):
                        raise ScriptTypeError("use mapping address outside its formula", idx) from None
                    if skeleton(psub, polarity_at(inst, pp)) != skeleton(tsub, polarity_at(state.position, tp)):
                        raise ScriptTypeError(
                            f"premise subgame at {_fmt(pp)} does not match the target at {_fmt(tp)}", idx
                        )
                    state.delegated += (tp,)
        elif isinstance(ins, Branch):
            _check_expr(state, ins.lhs, idx, ("num", "side"))
            _check_expr(state, ins.rhs, idx, ("num", "side"))
            rest = list(instrs[pos + 1:])
            for block in (ins.then, ins.orelse):
                st = _SymState(state.position, dict(state.kinds), state.delegated)
                _check_block(list(block) + rest, st, premises, funcs, [counter[0]])
            return
        else:
            raise ScriptTypeError(f"unknown instruction {ins}", idx)


# ------------------------------------------------------------------ bounds


def _size_term(fn, args):
    if fn in ("succ", "double", "double1"):
        return Succ(args[0])
    if fn in ("pred", "half", "parity", "sub"):
        return args[0]
    if fn == "add":
        return Succ(Plus(args[0], args[1]))
    if fn == "mul":
        return Plus(args[0], args[1])
    if fn == "exp":
        return Succ(EXP(args[0]))
    return None


def script_bounds(script: Script, premises: list) -> tuple:
    """(space bound, time bound) as explicit functions of the background; None if unknown."""
    sizes: dict = {}
    prem_space, prem_time = [], []
    unknown_space = False

    def expr_size(e):
        if e[0] == "bind":
            return sizes.get(e[1], W())
        if e[0] == "const":
            return num(size(e[1]))
        if e[0] == "size":
            return expr_size(e[1])
        return num(1)

    def walk(instrs):
        nonlocal unknown_space
        for ins in instrs:
            if isinstance(ins, Wait):
                sizes[ins.binder] = W()
            elif isinstance(ins, Compute):
                t = _size_term(ins.fn, [expr_size(a) for a in ins.args])
                if t is None:
                    unknown_space = True
                    t = W()
                sizes[ins.binder] = t
            elif isinstance(ins, (UsePremise, Query)):
                p = premises[ins.premise]
                sb = getattr(p, "space_bound", None)
                tb = getattr(p, "time_bound", None)
                if sb is None:
                    unknown_space = True
                else:
                    prem_space.append(sb)
                prem_time.append(tb)
                if isinstance(ins, Query):
                    for b in ins.binders:
                        sizes[b] = sb.term if isinstance(sb, Poly) else W()
            elif isinstance(ins, Branch):
                walk(ins.then)
                walk(ins.orelse)

    walk(script.instructions)
    n = len(script) + 1
    time = None if any(t is None for t in prem_time) else fn_sum([const(n)] + prem_time)
    if unknown_space:
        return None, time
    total: Term = num(n)
    for t in sizes.values():
        total = Plus(total, t)
    from ..bounds import Elem, is_poly_term

    own = Poly(total) if is_poly_term(total) else Elem(total)
    return fn_sum([own] + prem_space), time


# ------------------------------------------------------------------ runtime


class ScriptRuntimeError(RuntimeError):
    pass


def _value(env, e):
    kind = e[0]
    if kind == "bind":
        if e[1] not in env or env[e[1]] is None:
            raise ScriptRuntimeError(f"${e[1]} has no value")
        return env[e[1]]
    if kind == "const":
        return e[1]
    if kind == "side":
        return e[1]
    v = _value(env, e[1])
    if not isinstance(v, int):
        raise ScriptRuntimeError("size of a side")
    return size(v)


def _bits(v) -> int:
    return size(v) if isinstance(v, int) else 1


class _Relay:
    """A premise session playing inside corresponding subgames of the target."""

    def __init__(self, strategy: Strategy, feed, mapping):
        self.strategy = strategy
        self.session = strategy.spawn()
        self.position = strategy.target
        self.links = [Link(tp, pp) for pp, tp in mapping]
        # moves are applied to the premise position as soon as they are
        # known, so that later forwarded moves translate against it
        self.feed = [Move((), v) for v in feed]
        for m in self.feed:
            self.position = check_move(self.position, LabMove(BOT, m))
        self.inbox = []

    def forward(self, move, target_before):
        for link in self.links:
            m = link.to_far(move, target_before, self.position)
            if m is not None:
                self.position = check_move(self.position, LabMove(BOT, m))
                self.inbox.append(m)
                return True
        return False

    def covers(self, address) -> bool:
        return any(has_prefix(address, l.near_prefix) for l in self.links)

    def step(self, target_pos, funcs):
        incoming, self.inbox, self.feed = self.feed + self.inbox, [], []
        out = []
        for m in self.session.step(incoming):
            try:
                self.position_before = self.position
                self.position = check_move(self.position, LabMove(TOP, m))
            except IllegalMove as e:
                raise IllegalPremiseBehavior(str(e)) from None
            for link in self.links:
                t = link.to_near(m, self.position_before, target_pos)
                if t is not None:
                    out.append(t)
                    break
        return out

    def settled(self):
        return not self.inbox and not self.feed and self.session.settled()


def run_query(strategy: Strategy, feed, max_cycles=100_000):
    """Feed the closure constants, run to quiescence, return the emitted payloads and peak space."""
    session = strategy.spawn()
    position = strategy.target
    incoming = [Move((), v) for v in feed]
    for m in incoming:
        position = check_move(position, LabMove(BOT, m))
    ell = max((size(v) for v in feed if isinstance(v, int)), default=0)
    quiet, silent, payloads, peak = strategy.quiescence(ell), 0, [], 0
    for _ in range(max_cycles):
        out = session.step(incoming)
        incoming = []
        peak = max(peak, session.space())
        for m in out:
            try:
                position = check_move(position, LabMove(TOP, m))
            except IllegalMove as e:
                raise IllegalPremiseBehavior(str(e)) from None
            payloads.append(m.payload)
        silent = 0 if out else silent + 1
        if session.settled() or silent >= quiet:
            return payloads, peak
    raise ScriptRuntimeError("query did not settle")


class ScriptSession(Session):
    def __init__(self, strat: "ScriptStrategy"):
        self.strat = strat
        self.position = strat.target
        self.frames = [[list(strat.script.instructions), 0]]
        self.env: dict = {}
        self.buffer: list = []
        self.relays: list = []
        self.mirrors: list = []
        self.retired = False
        self.error: Optional[str] = None
        self.transient = 0

    # --- helpers
    def _current(self):
        while self.frames:
            block, i = self.frames[-1]
            if i < len(block):
                return block[i]
            self.frames.pop()
        return None

    def _advance(self):
        self.frames[-1][1] += 1

    def _emit(self, out, m):
        self.position = check_move(self.position, LabMove(TOP, m))
        out.append(m)

    def _retire(self, why):
        self.retired = True
        self.error = why

    # --- protocol
    def step(self, observed):
        if self.retired:
            return []
        self.transient = 0
        out: list = []
        try:
            for m in observed:
                before = self.position
                try:
                    self.position = check_move(self.position, LabMove(BOT, m))
                except IllegalMove:
                    self._retire("the adversary moved illegally")
                    return []
                if self._mirror(m, before, out):
                    continue
                if any(r.forward(m, before) for r in self.relays):
                    continue
                self.buffer.append((m, before))
            for r in self.relays:
                for m in r.step(self.position, self.strat.funcs):
                    self._emit(out, m)
            self._execute(out)
        except (ScriptRuntimeError, IllegalPremiseBehavior, IllegalMove) as e:
            self._retire(str(e))
        return out

    def _mirror(self, m, before, out, now=None):
        for a, b in self.mirrors:
            for near, far in ((a, b), (b, a)):
                t = Link(near, far).to_far(m, before, before if now is None else now)
                if t is not None:
                    self._emit(out, t)
                    return True
        return False

    def _execute(self, out):
        ins = self._current()
        while isinstance(ins, Branch):
            a, b = _value(self.env, ins.lhs), _value(self.env, ins.rhs)
            self._advance()
            self.frames.append([list(ins.then if CONDITIONS[ins.op](a, b) else ins.orelse), 0])
            ins = self._current()
        if ins is None:
            return
        env = self.env
        if isinstance(ins, Wait):
            for j, (m, _) in enumerate(self.buffer):
                if m.address == ins.address:
                    env[ins.binder] = m.payload
                    del self.buffer[j]
                    self._advance()
                    return
            return
        self._advance()
        if isinstance(ins, Compute):
            args = [_value(env, a) for a in ins.args]
            if ins.fn in BUILTINS:
                env[ins.binder] = BUILTINS[ins.fn][1](*args)
            else:
                env[ins.binder] = self.strat.funcs[ins.fn](*args)
        elif isinstance(ins, MakeMove):
            self._emit(out, Move(ins.address, _value(env, ins.expr)))
        elif isinstance(ins, ChooseSide):
            side = _value(env, ins.side) if isinstance(ins.side, tuple) else ins.side
            self._emit(out, Move(ins.address, side))
        elif isinstance(ins, Copycat):
            self.mirrors.append((ins.a, ins.b))
            # moves already waiting in the buffer are mirrored now
            keep = []
            for m, before in self.buffer:
                if not self._mirror(m, before, out, self.position):
                    keep.append((m, before))
            self.buffer = keep
        elif isinstance(ins, UsePremise):
            relay = _Relay(self.strat.premises[ins.premise], [_value(env, a) for a in ins.feed], ins.mapping)
            keep = []
            for m, before in self.buffer:
                if not relay.forward(m, before):
                    keep.append((m, before))
            self.buffer = keep
            self.relays.append(relay)
            for m in relay.step(self.position, self.strat.funcs):
                self._emit(out, m)
        elif isinstance(ins, Query):
            payloads, peak = run_query(self.strat.premises[ins.premise], [_value(env, a) for a in ins.feed])
            self.transient = peak
            for k, b in enumerate(ins.binders):
                env[b] = payloads[k] if k < len(payloads) else None

    def space(self):
        return (
            sum(_bits(v) for v in self.env.values() if v is not None)
            + sum(r.session.space() for r in self.relays)
            + self.transient
        )

    def settled(self):
        if self.retired:
            return True
        if any(not r.settled() for r in self.relays):
            return False
        ins = self._current()
        if ins is None:
            return True
        if isinstance(ins, Wait):
            return not any(m.address == ins.address for m, _ in self.buffer)
        return False

    def stats(self):
        return {"relays": len(self.relays)}


@dataclass
class ScriptStrategy(Strategy):
    target: Formula
    script: Script
    premises: list = field(default_factory=list)
    funcs: Optional[dict] = None
    name: str = "script"
    bound: Optional[Bound] = None

    def __post_init__(self):
        self.space_bound, self.time_bound = script_bounds(self.script, self.premises)

    def spawn(self):
        return ScriptSession(self)

    def quiescence(self, ell):
        inner = [p.quiescence(ell + 2 * len(self.script) + 2) for p in self.premises]
        return len(self.script) + 2 + max(inner, default=0)


def run_script(script: Script, target: Formula, premises: list, funcs: Optional[dict] = None) -> ScriptStrategy:
    typecheck(script, target, [p.target for p in premises], funcs)
    return ScriptStrategy(target, script, list(premises), funcs)
