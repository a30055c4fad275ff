"""The ``clarith`` command line.

Every subcommand is a thin wrapper over a library call; the exit code
reports the outcome: 0 success, 1 check or verification failure, 2 parse
error, 3 resource cap.  ``CLARITH_CAP`` replaces the built-in ceilings
when a flag does not set one explicitly.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .bounds import (
    ArityMismatch,
    NotBounded,
    ResourceCap,
    compile_pr,
    eta_bound,
    eval_graph,
    eval_tree,
    parse_graph,
    parse_pr,
    validate_pr,
)
from .compose.induction import ComposedStrategy, SideConditionError, bench, induction_parallel, induction_space
from .compose.scripts import parse_script, unparse
from .corpus import CORPUS
from .games import (
    TOP,
    IllegalMove,
    LabMove,
    Move,
    check_move,
    concrete_moves,
    format_address,
    format_payload,
    format_transcript,
    guard_holds,
    parse_address,
    parse_payload,
    parse_transcript,
)
from .library import shipped_dir
from .machines.toyhpm import format_toyhpm, parse_toyhpm
from .machines.verify import EAGER, QUIET, RejectedMove, play_line, verify_win
from .proofs import (
    CheckFailed,
    ProofParseError,
    StrategyFileError,
    check_proof,
    errors,
    extract,
    load_strategy,
    parse_proof,
    parse_strategy_file,
    write_proof,
    write_strategy,
)
from .sexpr import SexprError, write
from .syntax import EXPONENTIAL, POLYNOMIAL, ParseError, classify, parse_formula, parse_term, pretty, term_str, term_vars

OK, FAILED, PARSE_ERROR, CAPPED = 0, 1, 2, 3


class UsageError(Exception):
    """Bad input files or arguments; reported with exit code 2."""


def _cap(flag: Optional[int], default: int) -> int:
    if flag is not None:
        return flag
    env = os.environ.get("CLARITH_CAP")
    return int(env) if env else default


def _out(text=""):
    print(text, flush=True)


# ------------------------------------------------------------ input helpers


def resolve_path(name: str) -> Path:
    """A path as given, or failing that a file of the shipped proof library."""
    p = Path(name)
    if p.exists():
        return p
    for candidate in (shipped_dir() / p.name, shipped_dir() / f"{p.name}.clp"):
        if candidate.exists():
            return candidate
    raise UsageError(f"no such file: {name}")


def read_proof(name: str):
    path = resolve_path(name)
    try:
        return parse_proof(path.read_text()), path
    except ProofParseError as e:
        raise UsageError(f"{path}: {e}") from None


def load_any_strategy(name: str, system: Optional[str] = None, node: Optional[str] = None):
    """A strategy from a strategy file, a proof file (its root) or ``corpus:<name>``."""
    if name.startswith("corpus:"):
        return corpus_strategy(name.split(":", 1)[1], system or "space")
    path = resolve_path(name)
    text = path.read_text()
    if text.lstrip().startswith("(strategy"):
        try:
            sf = parse_strategy_file(text)
        except StrategyFileError as e:
            raise UsageError(f"{path}: {e}") from None
        ref = Path(sf.proof_ref)
        if not ref.is_absolute():
            ref = path.parent / ref
        proof, _ = read_proof(str(ref))
        try:
            return load_strategy(sf, proof)
        except StrategyFileError as e:
            raise UsageError(f"{path}: {e}") from None
    proof, _ = read_proof(str(path))
    sol = extract(proof, system)
    if node is None:
        return sol.strategy
    if node not in sol.strategies:
        raise UsageError(f"the proof has no node {node}")
    return sol.strategies[node]


def corpus_strategy(name: str, composer: str) -> ComposedStrategy:
    if name not in CORPUS:
        raise UsageError(f"unknown corpus entry {name}; known: {', '.join(CORPUS)}")
    inst = CORPUS[name]
    n, k = inst.strategies()
    composer = composer.lower()
    if composer in ("space", "cla5"):
        return induction_space(n, k, inst.f, inst.var)
    if composer in ("parallel", "cla6", "cla7"):
        # a formula with only polynomial sizebounds is composed in the
        # primitive recursive mode, whose side condition it always meets
        mode = "cla6" if composer != "cla7" and classify(inst.f).exponentially_bounded else "cla7"
        return induction_parallel(n, k, inst.f, inst.var, mode)
    raise UsageError(f"unknown composer {composer}")


# ------------------------------------------------------------ env scripts


def parse_env_script(text: str) -> list:
    """Environment moves, one per line: ``[eager] <address> <payload>``.

    A plain line is played once the machine has settled; ``eager`` plays it
    on the very next cycle.  Lines starting with ``;`` are comments.
    """
    events = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        timing = QUIET
        if parts[0] == "eager":
            timing, parts = EAGER, parts[1:]
        if len(parts) != 2:
            raise UsageError(f"line {lineno}: expected '[eager] <address> <payload>'")
        try:
            events.append((timing, Move(parse_address(parts[0]), parse_payload(parts[1]))))
        except ValueError as e:
            raise UsageError(f"line {lineno}: {e}") from None
    return events


def format_env_script(events) -> str:
    lines = []
    for timing, m in events:
        prefix = "eager " if timing == EAGER else ""
        lines.append(f"{prefix}{format_address(m.address)} {format_payload(m.payload)}")
    return "\n".join(lines) + ("\n" if lines else "")


# ------------------------------------------------------------ subcommands


def cmd_check(args) -> int:
    proof, _ = read_proof(args.proof)
    diags = check_proof(proof, args.system.upper() if args.system else None)
    for d in diags:
        _out(str(d))
    return FAILED if errors(diags) else OK


def cmd_extract(args) -> int:
    proof, path = read_proof(args.proof)
    try:
        sol = extract(proof, args.system.upper() if args.system else None)
    except CheckFailed as e:
        for d in e.diagnostics:
            _out(str(d))
        return FAILED
    _out(f"node {args.node or proof.root}")
    _out(f"bound kind {sol.bound_kind}")
    _out(f"bound {sol.describe()}")
    if args.node and args.node not in sol.strategies:
        raise UsageError(f"the proof has no node {args.node}")
    if args.output:
        out = Path(args.output)
        ref = os.path.relpath(path.resolve(), out.resolve().parent)
        out.write_text(write_strategy(sol, ref, args.node))
        _out(f"wrote {out}")
    else:
        sys.stdout.write(write_strategy(sol, str(path), args.node))
    return OK


def cmd_verify_win(args) -> int:
    s = load_any_strategy(args.strategy, args.system, args.node)
    report = verify_win(s, max_const=args.max_const, cap=_cap(args.cap, 100_000))
    _out(report.summary())
    if not report.ok:
        line = report.losing
        _out(f"losing line against {s.name}:")
        sys.stdout.write(format_transcript(line.records, line.verdict))
        _out(f"final position: {pretty(line.position)}")
        return FAILED
    return OK


def cmd_duel(args) -> int:
    s = load_any_strategy(args.strategy, args.system, args.node)
    events = parse_env_script(resolve_path(args.env).read_text())
    try:
        line = play_line(s, events, max_cycles=_cap(args.cap, 200_000), reasonable=False, strict=True)
    except RejectedMove as e:
        raise UsageError(f"{args.env}: {e}") from None
    sys.stdout.write(format_transcript(line.records, line.verdict))
    if args.transcript:
        Path(args.transcript).write_text(format_transcript(line.records, line.verdict))
    return OK if line.verdict.winner is s.player else FAILED


def cmd_bench(args) -> int:
    s = load_any_strategy(args.strategy, args.composer, args.node)
    if not isinstance(s, ComposedStrategy):
        raise UsageError("bench needs a strategy produced by an induction composer (use --node)")
    rows = bench(s, range(args.k + 1), fill=args.fill)
    _out(f"# {s.name}: composer {s.composer}, meter {args.meter}, depth {s.depth}")
    ok = True
    # the declared curve is only compared when it measures what the meter measures
    matched = s.bound is not None and s.bound.kind == args.meter
    for r in rows:
        declared = "-" if not matched else "over-cap" if r.declared is None else str(r.declared)
        if args.meter == "space":
            _out(f"k={r.k} live={r.live} space={r.space} bound={declared} won={str(r.won).lower()}")
            within = not matched or r.declared is None or r.space <= r.declared
        else:
            _out(f"k={r.k} steps={r.steps} timecost={r.timecost} bound={declared} won={str(r.won).lower()}")
            within = not matched or r.declared is None or r.timecost <= r.declared
        ok = ok and r.won and within
    _out(f"peak live rows {max(r.live for r in rows)}")
    return OK if ok else FAILED


def cmd_eval(args) -> int:
    env = {}
    for item in args.set or []:
        name, _, value = item.partition("=")
        if not value.isdigit():
            raise UsageError(f"bad assignment {item!r}; expected name=number")
        env[name] = int(value)
    if args.pr:
        c = parse_pr(resolve_path(args.pr).read_text())
        problems = validate_pr(c)
        if problems:
            for p in problems:
                _out(str(p))
            return FAILED
        fn = compile_pr(c, args.cap)[c.main]
        # with --pr there is no expression, so the first number lands in EXPR
        values = ([args.expr] if args.expr else []) + list(args.args)
        if not all(v.isdigit() for v in values):
            raise UsageError("PR arguments must be numbers")
        try:
            _out(str(fn(*[int(a) for a in values])))
        except ArityMismatch as e:
            raise UsageError(str(e)) from None
        return OK
    if args.graph:
        graph = parse_graph(args.expr)
        _out(str(eval_graph(graph, args.at if args.at is not None else env.get("x", 0))))
        return OK
    if args.eta:
        f = parse_formula(args.expr)
        _out(str(eta_bound(f, args.ell, EXPONENTIAL if args.exponential else POLYNOMIAL)))
        return OK
    t = parse_term(args.expr)
    names = sorted(term_vars(t))
    if args.args:
        if len(args.args) != len(names):
            raise UsageError(f"the term has variables {', '.join(names) or 'none'}")
        env.update(zip(names, (int(a) for a in args.args)))
    missing = [n for n in names if n not in env]
    if missing:
        raise UsageError(f"no value for {', '.join(missing)}")
    _out(str(eval_tree(t, env)))
    return OK


_PARSE_KINDS = {".clp": "proof", ".pr": "pr", ".hpm": "toyhpm", ".script": "script", ".run": "transcript",
                ".strategy": "strategy"}


def cmd_parse(args) -> int:
    kind, text = args.kind, args.input
    path = Path(args.input)
    if kind in (None, "proof", "pr", "toyhpm", "script", "transcript", "strategy") and path.exists():
        text = path.read_text()
        kind = kind or _PARSE_KINDS.get(path.suffix, "formula")
    kind = kind or "formula"
    try:
        if kind == "formula":
            _out(pretty(parse_formula(text)))
        elif kind == "term":
            _out(term_str(parse_term(text)))
        elif kind == "proof":
            sys.stdout.write(write_proof(parse_proof(text)))
        elif kind == "script":
            for ins in parse_script(text).instructions:
                _out(write(unparse(ins)))
        elif kind == "pr":
            c = parse_pr(text)
            sys.stdout.write(c.text())
        elif kind == "toyhpm":
            sys.stdout.write(format_toyhpm(parse_toyhpm(text)))
        elif kind == "transcript":
            records, verdict = parse_transcript(text)
            sys.stdout.write(format_transcript(records, verdict))
        elif kind == "strategy":
            sf = parse_strategy_file(text)
            _out(f"proof {sf.proof_ref} system {sf.system} node {sf.node} composer {sf.composer}")
    except (ParseError, ProofParseError, SexprError, StrategyFileError, ValueError) as e:
        _out(f"parse error: {e}")
        return PARSE_ERROR
    return OK


# ------------------------------------------------------------ interactive play


@dataclass
class PlaySession:
    """The state behind the ``play`` REPL: the human's moves so far.

    Every change replays the whole line from scratch, which keeps undo
    trivial and makes the REPL agree with ``duel`` move for move.
    """

    strategy: object
    events: list = field(default_factory=list)
    max_cycles: int = 200_000

    def __post_init__(self):
        self.line = self._replay(self.events)

    def _replay(self, events):
        return play_line(self.strategy, events, max_cycles=self.max_cycles, reasonable=False, strict=True)

    @property
    def position(self):
        return self.line.position

    def legal_moves(self, const_cap=3):
        return concrete_moves(self.position, self.strategy.player.other, const_cap)

    def finished(self) -> bool:
        return not self.legal_moves(0)

    def move(self, m: Move, timing=QUIET) -> Optional[str]:
        """Play ``m``; returns a note when the move forfeits its subgame."""
        line = self._replay(self.events + [(timing, m)])
        note = None
        if not guard_holds(self.position, m, self.strategy.funcs):
            note = "the constant breaks its sizebound; the environment forfeits this subgame"
        self.events.append((timing, m))
        self.line = line
        return note

    def undo(self) -> bool:
        if not self.events:
            return False
        self.events.pop()
        self.line = self._replay(self.events)
        return True

    def verdict(self):
        return self.line.verdict


def _machine_moves_since(before, after):
    return [(c, lm) for c, lm in after[len(before):] if lm.player is TOP]


def run_repl(session: PlaySession, stdin, stdout) -> int:
    def say(text=""):
        stdout.write(text + "\n")
        stdout.flush()

    me = session.strategy.player
    say(f"playing {session.strategy.name} as {me}; you are {me.other}")
    say("enter '<address> <payload>'; meta-commands :moves :history :undo :end :quit")
    for c, lm in session.line.records:
        say(f"  machine: {format_address(lm.move.address)} {format_payload(lm.move.payload)}")
    say(f"position: {pretty(session.position)}")
    while True:
        if session.finished():
            v = session.verdict()
            say(f"no moves are left for you; {v}")
            say(f"winner: {v.winner or 'none'}")
            return OK if v.winner is me else FAILED
        stdout.write("> ")
        stdout.flush()
        raw = stdin.readline()
        if not raw:
            say()
            return OK
        line = raw.strip()
        if not line:
            continue
        if line == ":quit":
            return OK
        if line == ":moves":
            moves = session.legal_moves()
            shown = ", ".join(f"{format_address(m.address)} {format_payload(m.payload)}" for m in moves)
            say(f"your legal moves (constants up to 3 shown): {shown}")
            continue
        if line == ":history":
            stdout.write(format_env_script(session.events))
            stdout.write(format_transcript(session.line.records))
            continue
        if line == ":undo":
            say("undone" if session.undo() else "nothing to undo")
            say(f"position: {pretty(session.position)}")
            continue
        if line == ":end":
            v = session.verdict()
            say(str(v))
            say(f"winner: {v.winner or 'none'}")
            return OK if v.winner is me else FAILED
        if line.startswith(":"):
            say(f"unknown command {line}")
            continue
        parts = line.split()
        timing = QUIET
        if parts and parts[0] == "eager":
            timing, parts = EAGER, parts[1:]
        if len(parts) != 2:
            say("expected '<address> <payload>', e.g. '. 3' or '1 left'")
            continue
        try:
            m = Move(parse_address(parts[0]), parse_payload(parts[1]))
            check_move(session.position, LabMove(me.other, m))
        except (ValueError, IllegalMove) as e:
            say(f"rejected: {e}")
            continue
        before = list(session.line.records)
        try:
            note = session.move(m, timing)
        except RejectedMove as e:
            say(f"rejected: {e}")
            continue
        if note:
            say(note + " (:undo takes it back)")
        for c, lm in _machine_moves_since(before, session.line.records):
            say(f"  machine: {format_address(lm.move.address)} {format_payload(lm.move.payload)}")
        say(f"position: {pretty(session.position)}")


def cmd_play(args) -> int:
    s = load_any_strategy(args.strategy, args.system, args.node)
    session = PlaySession(s, max_cycles=_cap(args.cap, 200_000))
    return run_repl(session, sys.stdin, sys.stdout)


# ------------------------------------------------------------ entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clarith", description="Check clarithmetic proofs and play the strategies extracted from them.")
    ap.add_argument("--version", action="version", version=f"clarith {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def strategy_args(p, system_help="system to extract under (defaults to the proof's own)"):
        p.add_argument("strategy", help="strategy file, proof file, or corpus:<name>")
        p.add_argument("--system", help=system_help)
        p.add_argument("--node", help="play the strategy of this proof node instead of the root")
        p.add_argument("--cap", type=int, help="resource ceiling")

    p = sub.add_parser("check", help="check a proof file")
    p.add_argument("proof")
    p.add_argument("--system", help="check under CLA5, CLA6 or CLA7 instead of the declared system")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("extract", help="extract a strategy and its bound")
    p.add_argument("proof")
    p.add_argument("--system")
    p.add_argument("--node")
    p.add_argument("-o", "--output", help="write the strategy file here")
    p.set_defaults(run=cmd_extract)

    p = sub.add_parser("verify-win", help="play a strategy against every adversary line")
    strategy_args(p)
    p.add_argument("--max-const", type=int, default=8)
    p.set_defaults(run=cmd_verify_win)

    p = sub.add_parser("play", help="play against a strategy interactively")
    strategy_args(p)
    p.set_defaults(run=cmd_play)

    p = sub.add_parser("duel", help="play a strategy against a scripted environment")
    strategy_args(p)
    p.add_argument("--env", required=True, help="environment script: one '[eager] <address> <payload>' per line")
    p.add_argument("--transcript", help="also write the run transcript here")
    p.set_defaults(run=cmd_duel)

    p = sub.add_parser("bench", help="measure a composed strategy for k = 0..K")
    p.add_argument("strategy", help="strategy file, proof file, or corpus:<name>")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--meter", choices=("space", "time"), default="space")
    p.add_argument("--composer", help="for corpus entries: space or parallel; for proofs: the system")
    p.add_argument("--node")
    p.add_argument("--fill", type=int, default=0, help="value of the other closure constants")
    p.set_defaults(run=cmd_bench)

    p = sub.add_parser("eval", help="evaluate a bound term, graph sequence, PR construction or size ceiling")
    p.add_argument("expr", nargs="?", default="", help="term, graph sequence or formula")
    p.add_argument("args", nargs="*", help="argument values")
    p.add_argument("--set", action="append", metavar="NAME=N")
    p.add_argument("--pr", metavar="FILE", help="evaluate the main function of a PR construction file")
    p.add_argument("--graph", action="store_true", help="EXPR is a graph sequence 'f1 = ...; f2 = ...'")
    p.add_argument("--at", type=int, help="argument of the graph sequence")
    p.add_argument("--eta", action="store_true", help="EXPR is a formula; print its move-size ceiling")
    p.add_argument("--ell", type=int, default=0, help="background for --eta")
    p.add_argument("--exponential", action="store_true", help="read sizebounds exponentially for --eta")
    p.add_argument("--cap", type=int, help="evaluation step ceiling for --pr")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("parse", help="parse and print back a formula or term, or a file of a supported kind")
    p.add_argument("input", help="text or a file path")
    p.add_argument("--kind", choices=("formula", "term", "proof", "script", "pr", "toyhpm", "transcript", "strategy"))
    p.set_defaults(run=cmd_parse)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ResourceCap as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return CAPPED
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return PARSE_ERROR
    except (ParseError, ProofParseError, SexprError, StrategyFileError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return PARSE_ERROR
    except CheckFailed as e:
        for d in e.diagnostics:
            print(str(d))
        return FAILED
    except (SideConditionError, NotBounded) as e:
        print(f"error: {e}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
