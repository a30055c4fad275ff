"""Corresponding subgames and address translation between them.

Two games correspond when they have the same choice skeleton once
moveless padding is ignored: an elementary sibling of a binary
connective, and classical quantifiers, carry no moves and are skipped.
This lets a strategy for ``F`` drive a copy of ``F`` in which every
sizebound guard was wrapped in an extra guard.
"""

from __future__ import annotations

from ..games import Move, subformula_at
from ..syntax import (
    BINARY,
    CHOICE,
    CHOICE_BINARY,
    CLASSICAL_QUANTIFIERS,
    Formula,
    Imp,
    Not,
    children,
    is_elementary,
)


class PairingMismatch(ValueError):
    pass


def skeleton(f: Formula, positive=True):
    """A hashable picture of the moves ``f`` allows, with polarities."""
    if is_elementary(f):
        return "*"
    if isinstance(f, CHOICE):
        body = (f.l, f.r) if isinstance(f, CHOICE_BINARY) else (f.body,)
        return (type(f).__name__, positive) + tuple(skeleton(b, positive) for b in body)
    if isinstance(f, CLASSICAL_QUANTIFIERS):
        return skeleton(f.body, positive)
    if isinstance(f, Not):
        return skeleton(f.f, not positive)
    if isinstance(f, BINARY):
        lp = (not positive) if isinstance(f, Imp) else positive
        if is_elementary(f.l):
            return skeleton(f.r, positive)
        if is_elementary(f.r):
            return skeleton(f.l, lp)
        return (type(f).__name__, skeleton(f.l, lp), skeleton(f.r, positive))
    raise TypeError(f)


def collapse_path(f: Formula, path) -> tuple:
    """The path with moveless steps removed."""
    out = []
    for i in path:
        if isinstance(f, CHOICE):
            # moves never address the inside of an unresolved choice occurrence
            raise PairingMismatch("address passes through a choice occurrence")
        if isinstance(f, BINARY) and (is_elementary(f.l) or is_elementary(f.r)):
            pass
        elif isinstance(f, CLASSICAL_QUANTIFIERS):
            pass
        else:
            out.append(i)
        f = children(f)[i]
    return tuple(out)


def expand_path(f: Formula, collapsed) -> tuple:
    """Inverse of :func:`collapse_path` on a (possibly differently padded) formula."""
    out, it = [], list(collapsed)
    while not isinstance(f, CHOICE):
        if isinstance(f, CLASSICAL_QUANTIFIERS):
            out.append(0)
            f = f.body
        elif isinstance(f, BINARY) and is_elementary(f.l) and not is_elementary(f.r):
            out.append(1)
            f = f.r
        elif isinstance(f, BINARY) and is_elementary(f.r) and not is_elementary(f.l):
            out.append(0)
            f = f.l
        elif isinstance(f, (Not,) + BINARY):
            if not it:
                raise PairingMismatch("path ends above a choice occurrence")
            i = it.pop(0)
            out.append(i)
            f = children(f)[i]
        else:
            raise PairingMismatch("no matching choice occurrence")
    if it:
        raise PairingMismatch("path continues below a choice occurrence")
    return tuple(out)


def translate(path, src: Formula, dst: Formula) -> tuple:
    return expand_path(dst, collapse_path(src, path))


def has_prefix(address, prefix) -> bool:
    return tuple(address[: len(prefix)]) == tuple(prefix)


class Link:
    """Keeps two corresponding subgames in step.

    ``near`` is the machine's own game, observed at ``near_prefix``; ``far``
    is the other game (a premise, or another part of the same game) at
    ``far_prefix``.  ``to_far`` and ``to_near`` translate move addresses.
    """

    def __init__(self, near_prefix, far_prefix):
        self.near_prefix = tuple(near_prefix)
        self.far_prefix = tuple(far_prefix)

    def to_far(self, move: Move, near_pos: Formula, far_pos: Formula):
        if not has_prefix(move.address, self.near_prefix):
            return None
        sub = move.address[len(self.near_prefix):]
        p = translate(sub, subformula_at(near_pos, self.near_prefix), subformula_at(far_pos, self.far_prefix))
        return Move(self.far_prefix + p, move.payload)

    def to_near(self, move: Move, far_pos: Formula, near_pos: Formula):
        if not has_prefix(move.address, self.far_prefix):
            return None
        sub = move.address[len(self.far_prefix):]
        p = translate(sub, subformula_at(far_pos, self.far_prefix), subformula_at(near_pos, self.near_prefix))
        return Move(self.near_prefix + p, move.payload)


def polarity_at(f: Formula, address) -> bool:
    positive = True
    for i in address:
        if isinstance(f, Not) or (isinstance(f, Imp) and i == 0):
            positive = not positive
        f = children(f)[i]
    return positive


def check_pairing(f: Formula, a, b) -> None:
    """Paired occurrences must be the same game with opposite polarities."""
    try:
        fa, fb = subformula_at(f, a), subformula_at(f, b)
    except (KeyError, IndexError):
        raise PairingMismatch("address outside the formula") from None
    if polarity_at(f, a) == polarity_at(f, b):
        raise PairingMismatch("paired occurrences must have opposite polarities")
    if skeleton(fa, True) != skeleton(fb, True):
        raise PairingMismatch("paired occurrences are different games")
