"""Strategy composition, from axiom strategies and copycat up to the induction composers."""

from .basic import axiom_strategy, copycat, silent_strategy
from .induction import BenchRow, ComposedStrategy, bench, induction_parallel, induction_space
from .scripts import ScriptStrategy, ScriptTypeError, parse_script, run_script, typecheck
from .updown import proc_down, proc_up
