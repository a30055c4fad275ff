"""
A short tour of clarith
=======================

Parse a formula, look at it as a game, check a proof, extract the strategy
the proof describes, and watch it play.

Run with ``python notebooks/tour.py``.
"""

from clarith.bounds import eval_fn
from clarith.games import BOT, GameState, Move, format_transcript, legal_moves
from clarith.machines import QUIET, play_line, verify_win
from clarith.proofs import check_proof, errors, extract, library
from clarith.syntax import classify, depth, parse_formula, pretty

# A formula is a game.  The environment picks x, then the machine must name
# a y no longer than x by more than two bits that doubles it.
f = parse_formula("chall x. chex y. (|y| <= |x| + 2 /\\ y = x + x)")
body = parse_formula("chex y. (|y| <= |x| + 2 /\\ y = x + x)")
print(pretty(f))
print("depth", depth(f))
# the open body is polynomially bounded; the closing chall x carries no sizebound
print(classify(body))
print("environment may open with", legal_moves(GameState.start(f), BOT))

# The shipped library carries proofs in three systems.
proofs = dict(library())
for name, p in proofs.items():
    print(f"{name:22s} {p.system}  errors={len(errors(check_proof(p)))}")

# Checking under a weaker system shows why the exponential proof needs CLA6.
for d in check_proof(proofs["exponential"], "CLA5"):
    print(d)

# Extraction turns a checked proof into a strategy plus a resource bound.
sol = extract(proofs["doubling"])
print("bound kind:", sol.bound_kind, "| values at background 0..4:", [eval_fn(sol.bound, [l]) for l in range(5)])

# One play: the environment chooses 5 and the strategy answers.
line = play_line(sol.strategy, [(QUIET, Move((), 5))])
print(format_transcript(line.records, line.verdict))

# Every adversary line with constants up to 6.
print(verify_win(sol.strategy, max_const=6).summary())
