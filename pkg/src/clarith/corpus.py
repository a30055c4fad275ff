"""Small induction instances used by the benchmarks and the acceptance suite.

Each entry pairs a formula ``F(x)`` with scripts for the basis ``F(0)`` and
the step ``F(x) -> F(x')``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .compose.scripts import ScriptStrategy, parse_script, run_script
from .compose.updown import basis_formula, step_formula
from .syntax import Formula, choice_closure, parse_formula


@dataclass(frozen=True)
class InductionInstance:
    name: str
    formula: str
    var: str
    basis_script: str
    step_script: str
    answer: object  # k -> the value the composed strategy should choose, silent environment

    @property
    def f(self) -> Formula:
        return parse_formula(self.formula)

    def basis_target(self) -> Formula:
        return choice_closure(basis_formula(self.f, self.var))

    def step_target(self) -> Formula:
        return choice_closure(step_formula(self.f, self.var))

    def strategies(self, funcs=None) -> tuple[ScriptStrategy, ScriptStrategy]:
        n = run_script(parse_script(self.basis_script), self.basis_target(), [], funcs)
        k = run_script(parse_script(self.step_script), self.step_target(), [], funcs)
        n.name, k.name = f"{self.name}-basis", f"{self.name}-step"
        return n, k


DOUBLING = InductionInstance(
    "doubling",
    "chex y. (|y| <= |x| + 2 /\\ y = x + x)",
    "x",
    "(move . 0)",
    """
    (wait . $x)
    (wait 0 $a)
    (compute $b succ $a)
    (compute $c succ $b)
    (move 1 $c)
    """,
    lambda k: 2 * k,
)

EXPONENTIAL = InductionInstance(
    "exponential",
    "chex z. (|z| <= x' /\\ z = exp(x))",
    "x",
    "(move . 1)",
    """
    (wait . $x)
    (wait 0 $a)
    (compute $b double $a)
    (move 1 $b)
    """,
    lambda k: 2**k,
)

# two environment moves deep: the environment picks u, the machine answers 2x+u
AFFINE = InductionInstance(
    "affine",
    "chall u. (|u| <= |x| -> chex y. (|y| <= |x| + 2 /\\ y = x + x + u))",
    "x",
    """
    (wait . $u)
    (move 1 $u)
    """,
    """
    (wait . $x)
    (wait 1 $b)
    (if (<= (size $b) (size $x))
        ((move 0 $b)
         (wait 0.1 $a)
         (compute $c succ $a)
         (compute $d succ $c)
         (move 1.1 $d))
        ((compute $c succ $x)
         (compute $d double $c)
         (compute $e add $d $b)
         (move 1.1 $e)))
    """,
    None,
)

CORPUS = {c.name: c for c in (DOUBLING, EXPONENTIAL, AFFINE)}
