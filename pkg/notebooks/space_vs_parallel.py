"""
Space against time in the two induction composers
=================================================

Both composers turn a basis strategy and a step strategy into a strategy
for the induction conclusion.  The parallel one keeps a live simulation
for every row 0..k.  The space composer recomputes rows on demand and keeps
only one alive.  Whether recomputation costs more steps depends on the
game: on doubling it does not, on the affine family it grows quickly.

Run with ``python notebooks/space_vs_parallel.py``.
"""

import numpy as np

from clarith.compose import induction_parallel, induction_space
from clarith.corpus import AFFINE, DOUBLING
from clarith.games import Move
from clarith.machines import QUIET, play_line

for inst in (DOUBLING, AFFINE):
    basis, step = inst.strategies()
    space = induction_space(basis, step, inst.f, inst.var)
    parallel = induction_parallel(basis, step, inst.f, inst.var, mode="cla7", enforce=False)
    print(f"\n{inst.name}")
    print("   k  live(space)  steps(space)  live(par)  steps(par)")
    ks = np.array([1, 2, 4, 8, 16, 32])
    steps = []
    for k in ks:
        events = [(QUIET, Move((), int(k)))]
        if inst is AFFINE:
            events.append((QUIET, Move((), int(k))))
        a = play_line(space, events).stats
        b = play_line(parallel, events).stats
        steps.append(a["steps"])
        print(f"{k:4d}  {a['live']:11d}  {a['steps']:12d}  {b['live']:9d}  {b['steps']:10d}")

    # slope of log(steps) against log(k): the price of recomputation
    slope = np.polyfit(np.log(ks), np.log(steps), 1)[0]
    print(f"space composer steps grow like k^{slope:.1f}")
