"""
Calibrating the space-bound constants
=====================================

The space composer declares a bound of the form

    slope * (phi(eta(l)) + eta(l) + l) + offset

where l is the background (the size of the largest constant the
environment has played).  The shape is fixed by the construction; the two
constants are not, so we measure them here and ship the result as
``MU_SLOPE`` and ``MU_OFFSET`` in ``clarith.bounds``.

Run with ``python notebooks/calibrate_mu.py``.
"""

from clarith.bounds import MU_OFFSET, MU_SLOPE
from clarith.compose import induction_space
from clarith.compose.induction import bench
from clarith.corpus import AFFINE, DOUBLING
from clarith.proofs import extract, library

# Every space-composed strategy we can build from the corpus and the library.
composed = []
for inst in (DOUBLING, AFFINE):
    basis, step = inst.strategies()
    composed.append(induction_space(basis, step, inst.f, inst.var))
for name, proof in library():
    if proof.system == "CLA5":
        for s in extract(proof).strategies.values():
            if getattr(s, "composer", None) == "induction-space":
                composed.append(s)
print(f"{len(composed)} space-composed strategies")

# Measure peak work space against the shape term, recovered from the shipped
# declared bound by undoing the shipped constants.
samples = []
for s in composed:
    for row in bench(s, range(0, 41)):
        shape = (s.bound(row.background) - MU_OFFSET) // MU_SLOPE
        samples.append((shape, row.space))
print(f"{len(samples)} measurements, largest space {max(sp for _, sp in samples)} cells")

# For each candidate slope, the smallest offset that covers every measurement.
print("slope  offset needed")
for slope in range(1, 9):
    need = max(0, max(sp - slope * shape for shape, sp in samples))
    print(f"{slope:5d}  {need:5d}")

# How much space the measurements use relative to the shape term.
ratio = max(sp / max(shape, 1) for shape, sp in samples)
print(f"largest space/shape ratio {ratio:.2f}")

# The shipped pair must cover everything measured, with room to spare.  The
# slope is the smallest power of two at least four times the worst measured
# space/shape ratio; the offset absorbs fixed bookkeeping of premises that
# are not in this corpus (scripts holding several constants at once).
worst = max(sp - (MU_SLOPE * shape + MU_OFFSET) for shape, sp in samples)
print(f"shipped slope {MU_SLOPE}, offset {MU_OFFSET}: tightest margin {-worst} cells")
assert worst <= 0 and MU_SLOPE >= 4 * ratio
