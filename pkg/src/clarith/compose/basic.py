"""Axiom strategies and copycat."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..bounds import Bound, Poly, W, const
from ..games import TOP, LabMove, Move, check_move
from ..machines.strategy import Session, SilentStrategy, Strategy
from ..syntax import Formula, Plus, Succ, parse_formula, size
from .relay import Link, check_pairing


class UnknownAxiom(ValueError):
    pass


PEANO = {
    1: "all x. ~(0 = x')",
    2: "all x. all y. (x' = y' -> x = y)",
    3: "all x. x + 0 = x",
    4: "all x. all y. x + y' = (x + y)'",
    5: "all x. x * 0 = 0",
    6: "all x. all y. x * y' = x * y + x",
}
AXIOM_8 = "chall x. chex y. y = x'"
AXIOM_9 = "chall x. chex y. y = x#0"


def axiom_formula(k: int) -> Formula:
    if k in PEANO:
        return parse_formula(PEANO[k])
    if k == 8:
        return parse_formula(AXIOM_8)
    if k == 9:
        return parse_formula(AXIOM_9)
    raise UnknownAxiom(f"axiom {k} has no fixed formula")


class _AnswerSession(Session):
    """Waits for the root constant, then answers ``fn(n)`` at the root one cycle later."""

    def __init__(self, fn):
        self.fn = fn
        self.n = None
        self.done = False

    def step(self, observed):
        if self.n is not None and not self.done:
            self.done = True
            return [Move((), self.fn(self.n))]
        for m in observed:
            if m.address == () and isinstance(m.payload, int) and self.n is None:
                self.n = m.payload
        return []

    def space(self):
        return size(self.n or 0) + 1

    def settled(self):
        return self.done or self.n is None


@dataclass
class AnswerStrategy(Strategy):
    target: Formula
    fn: object
    name: str = "answer"
    bound: Optional[Bound] = None
    space_bound: object = None
    time_bound: object = None
    funcs: Optional[dict] = None

    def spawn(self):
        return _AnswerSession(self.fn)

    def quiescence(self, ell):
        return 2


def axiom_strategy(axiom_id) -> Strategy:
    """Peano axioms are won by silence; axiom 8 answers n+1, axiom 9 answers 2n."""
    key = str(axiom_id).lower().replace("peano", "").replace("axiom", "").strip()
    if not key.isdigit():
        raise UnknownAxiom(f"unknown axiom {axiom_id}")
    k = int(key)
    if 1 <= k <= 7:
        f = axiom_formula(k) if k in PEANO else None
        s = SilentStrategy(target=f, name=f"peano{k}")
        s.space_bound, s.time_bound = const(0), const(0)
        return s
    if k == 8:
        return AnswerStrategy(
            axiom_formula(8), lambda n: n + 1, "axiom8",
            space_bound=Poly(Plus(Succ(W()), W())), time_bound=const(2),
        )
    if k == 9:
        return AnswerStrategy(
            axiom_formula(9), lambda n: 2 * n, "axiom9",
            space_bound=Poly(Plus(Succ(W()), W())), time_bound=const(2),
        )
    raise UnknownAxiom(f"unknown axiom {axiom_id}")


def silent_strategy(f: Formula, name="silent") -> Strategy:
    s = SilentStrategy(target=f, name=name)
    s.space_bound, s.time_bound = const(0), const(0)
    return s


# ----------------------------------------------------------------- copycat


class _CopycatSession(Session):
    def __init__(self, position, links):
        self.position = position
        self.links = links

    def step(self, observed):
        out = []
        for m in observed:
            before = self.position
            self.position = check_move(self.position, LabMove(TOP.other, m))
            for a, b in self.links:
                for near, far in ((a, b), (b, a)):
                    link = Link(near, far)
                    mirrored = link.to_far(m, before, before)
                    if mirrored is not None:
                        out.append(mirrored)
                        break
        for m in out:
            self.position = check_move(self.position, LabMove(TOP, m))
        return out

    def settled(self):
        return True

    def space(self):
        return 1


@dataclass
class CopycatStrategy(Strategy):
    target: Formula
    pairing: list = field(default_factory=list)
    name: str = "copycat"
    bound: Optional[Bound] = None
    funcs: Optional[dict] = None

    def __post_init__(self):
        for a, b in self.pairing:
            check_pairing(self.target, tuple(a), tuple(b))
        self.space_bound, self.time_bound = const(1), const(1)

    def spawn(self):
        return _CopycatSession(self.target, [(tuple(a), tuple(b)) for a, b in self.pairing])


def copycat(target: Formula, pairing) -> Strategy:
    return CopycatStrategy(target, list(pairing))
