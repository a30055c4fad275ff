"""Builders for the shipped proofs and the loader for ``clarith/lib/*.clp``.

The ``.clp`` files are generated by the functions here (``python -m
clarith.library --write``) and a test keeps the two in agreement.
"""

from __future__ import annotations

import argparse
from importlib import resources
from pathlib import Path

from .bounds import PRConstruction, parse_pr
from .proofs import parse_proof, relax_proof, write_proof
from .syntax import choice_closure, parse_formula, pretty, substitute, Succ, Var, Zero, Imp


class ProofBuilder:
    """Accumulates nodes and renders them in the proof file format."""

    def __init__(self, system: str):
        self.system = system
        self.lines: list = []
        self.funs: list = []

    def fun(self, text: str):
        self.funs.append(f'  (fun "{text}")')

    def axiom(self, nid, k, sentence=None):
        tail = f' "{sentence}"' if sentence else ""
        self.lines.append(f"  (node {nid} (axiom {k}{tail}))")
        return nid

    def lc(self, nid, concl, prems, script):
        body = [s.strip() for s in script.strip().splitlines() if s.strip()]
        out = [f'  (node {nid} (lc (concl "{_norm(concl)}")', "    (prem" + "".join(" " + p for p in prems) + ")"]
        if body:
            out.append("    (script")
            out.extend("      " + s for s in body[:-1])
            out.append("      " + body[-1] + ")))")
        else:
            out.append("    (script)))")
        self.lines.extend(out)
        return nid

    def ind(self, nid, var, basis, step, concl):
        self.lines.append(
            f'  (node {nid} (ind (system-var {var}) (basis {basis}) (step {step}) (concl "{_norm(concl)}")))'
        )
        return nid

    def text(self, root) -> str:
        return "\n".join([f"(proof (system {self.system})"] + self.funs + self.lines + [f"  (root {root}))"]) + "\n"


def _norm(f) -> str:
    return pretty(parse_formula(f) if isinstance(f, str) else f)


def _closures(F: str, var: str):
    f = parse_formula(F)
    basis = choice_closure(substitute(f, var, Zero()))
    step = choice_closure(Imp(f, substitute(f, var, Succ(Var(var)))))
    return pretty(basis), pretty(step), pretty(choice_closure(f))


# ------------------------------------------------------------ the proofs


def doubling_proof() -> str:
    """Addition by induction, then doubling as a consequence."""
    b = ProofBuilder("CLA5")
    F = "chex z. (|z| <= |x| + |y| /\\ z = x + y)"
    basis, step, concl = _closures(F, "x")
    b.axiom("succ", 8)
    b.lc("add-basis", basis, [], """
        (wait . $y)
        (move . $y)""")
    b.lc("add-step", step, ["succ"], """
        (wait . $x)
        (wait . $y)
        (wait 0 $a)
        (query ($b) 0 $a)
        (move 1 $b)""")
    b.ind("add-bounded", "x", "add-basis", "add-step", concl)
    b.lc("add", "chall x. chall y. chex z. z = x + y", ["add-bounded"], """
        (wait . $x)
        (wait . $y)
        (query ($z) 0 $x $y)
        (move . $z)""")
    b.lc("twice", "chall x. chex z. z = x + x", ["add"], """
        (wait . $x)
        (query ($z) 0 $x $x)
        (move . $z)""")
    b.lc("double", "chall x. chex y. y = x#0", ["twice"], """
        (wait . $x)
        (query ($z) 0 $x)
        (move . $z)""")
    return b.text("double")


def halving_proof() -> str:
    """Binary predecessor and parity by induction."""
    b = ProofBuilder("CLA5")
    F = "chex y. (|y| <= |x| /\\ (x = y#0 chor x = y#1))"
    basis, step, concl = _closures(F, "x")
    b.axiom("succ", 8)
    b.lc("half-basis", basis, [], """
        (move . 0)
        (choose 1 left)""")
    b.lc("half-step", step, ["succ"], """
        (wait . $x)
        (wait 0 $a)
        (wait 0.1 $s)
        (if (= $s left) ((move 1 $a) (choose 1.1 right)) ((query ($b) 0 $a) (move 1 $b) (choose 1.1 left)))""")
    b.ind("half-bounded", "x", "half-basis", "half-step", concl)
    b.lc("half", "chall x. chex y. (x = y#0 chor x = y#1)", ["half-bounded"], """
        (wait . $x)
        (query ($y $s) 0 $x)
        (move . $y)
        (choose . $s)""")
    return b.text("half")


def binary_induction_proof() -> str:
    """Induction along binary successors, recast as ordinary induction on length."""
    b = ProofBuilder("CLA5")
    F = "chex z. (|z| <= |x| /\\ z = x)"
    G = "chall y. (|y| <= |x| -> chex z. (|z| <= |y| /\\ z = y))"
    f = parse_formula(F)
    zero = pretty(choice_closure(substitute(f, "x", Zero())))
    from .syntax import AppendBit

    even = pretty(choice_closure(Imp(f, substitute(f, "x", AppendBit(Var("x"), 0)))))
    odd = pretty(choice_closure(Imp(f, substitute(f, "x", AppendBit(Var("x"), 1)))))
    basis, step, concl = _closures(G, "x")
    # the three premises of binary induction
    b.lc("bin-zero", zero, [], "(move . 0)")
    b.lc("bin-even", even, [], """
        (wait . $x)
        (wait 0 $a)
        (compute $b double $a)
        (move 1 $b)""")
    b.lc("bin-odd", odd, [], """
        (wait . $x)
        (wait 0 $a)
        (compute $b double1 $a)
        (move 1 $b)""")
    # binary predecessor, as in the halving proof
    hF = "chex y. (|y| <= |x| /\\ (x = y#0 chor x = y#1))"
    hbasis, hstep, hconcl = _closures(hF, "x")
    b.axiom("succ", 8)
    b.lc("half-basis", hbasis, [], """
        (move . 0)
        (choose 1 left)""")
    b.lc("half-step", hstep, ["succ"], """
        (wait . $x)
        (wait 0 $a)
        (wait 0.1 $s)
        (if (= $s left) ((move 1 $a) (choose 1.1 right)) ((query ($b) 0 $a) (move 1 $b) (choose 1.1 left)))""")
    b.ind("half-bounded", "x", "half-basis", "half-step", hconcl)
    b.lc("half", "chall x. chex y. (x = y#0 chor x = y#1)", ["half-bounded"], """
        (wait . $x)
        (query ($y $s) 0 $x)
        (move . $y)
        (choose . $s)""")
    # ordinary induction on the length bound
    b.lc("len-basis", basis, ["bin-zero"], """
        (wait . $y)
        (use 0 () (. 1))""")
    b.lc("len-step", step, ["half", "bin-even", "bin-odd"], """
        (wait . $x)
        (wait 1 $a)
        (query ($b $s) 0 $a)
        (move 0 $b)
        (if (= $s left) ((use 1 ($b) (0 0.1) (1 1.1))) ((use 2 ($b) (0 0.1) (1 1.1))))""")
    b.ind("len", "x", "len-basis", "len-step", concl)
    b.lc("binary", pretty(choice_closure(f)), ["len"], """
        (wait . $x)
        (use 0 ($x $x) (1 .))""")
    return b.text("binary")


def exponential_proof(system="CLA6") -> str:
    """Powers of two by induction with an exponential sizebound."""
    b = ProofBuilder(system)
    F = "chex z. (|z| <= x' /\\ z = exp(x))"
    basis, step, concl = _closures(F, "x")
    b.lc("exp-basis", basis, [], "(move . 1)")
    b.lc("exp-step", step, [], """
        (wait . $x)
        (wait 0 $a)
        (compute $b double $a)
        (move 1 $b)""")
    b.ind("exp-bounded", "x", "exp-basis", "exp-step", concl)
    b.lc("exp", "chall x. chex z. z = exp(x)", ["exp-bounded"], """
        (wait . $x)
        (query ($z) 0 $x)
        (move . $z)""")
    return b.text("exp")


# ------------------------------------------------- primitive recursive symbols


def _xs(n):
    return [f"x{i}" for i in range(1, n + 1)]


def _graph(name, n) -> str:
    """``chall x1 ... chex y. y = name(x1, ...)``."""
    args = ", ".join(_xs(n))
    body = f"chex y. y = {name}({args})" if n else f"chex y. y = {name}()"
    for v in reversed(_xs(n)):
        body = f"chall {v}. {body}"
    return body


def pr_proof(c: PRConstruction) -> str:
    """A CLA7 proof that every symbol of ``c`` has a computable graph."""
    b = ProofBuilder("CLA7")
    for d in c.defs:
        b.fun(d.text())
    arity = {}
    for d in c.defs:
        n = d.arity
        arity[d.name] = n
        waits = "\n".join(f"(wait . ${v})" for v in _xs(n))
        graph = _graph(d.name, n)
        if d.form == "succ":
            ax = b.axiom(f"{d.name}-axiom", 8)
            b.lc(d.name, graph, [ax], waits + "\n(query ($y) 0 $x1)\n(move . $y)")
        elif d.form == "zero":
            b.lc(d.name, graph, [], waits + "\n(move . 0)")
        elif d.form == "proj":
            b.lc(d.name, graph, [], waits + f"\n(move . $x{d.index})")
        elif d.form == "comp":
            g, hs = d.refs[0], d.refs[1:]
            feed = " ".join(f"$x{i}" for i in range(1, n + 1))
            lines = [waits]
            for j, h in enumerate(hs, 1):
                lines.append(f"(query ($h{j}) {j} {feed})")
            lines.append(f"(query ($y) 0 {' '.join(f'$h{j}' for j in range(1, len(hs) + 1))})")
            lines.append("(move . $y)")
            b.lc(d.name, graph, [g] + list(hs), "\n".join(lines))
        else:  # rec
            g, h = d.refs
            rest = _xs(n)[1:]
            F = f"chex y. y = {d.name}({', '.join(_xs(n))})"
            basis, step, concl = _closures(F, "x1")
            rest_waits = "\n".join(f"(wait . ${v})" for v in rest)
            rest_feed = " ".join(f"${v}" for v in rest)
            b.lc(f"{d.name}-basis", basis, [g], "\n".join(
                x for x in (rest_waits, f"(query ($y) 0 {rest_feed})".replace(" )", ")"), "(move . $y)") if x))
            b.lc(f"{d.name}-step", step, [h], "\n".join(
                x for x in (waits, "(wait 0 $a)", f"(query ($b) 0 $x1 $a {rest_feed})".replace(" )", ")"),
                            "(move 1 $b)") if x))
            b.ind(d.name, "x1", f"{d.name}-basis", f"{d.name}-step", concl)
    return b.text(c.main)


PR_CASES = {
    "successor": "def s/1 = succ\nmain s",
    "zero": "def z/2 = zero/2\nmain z",
    "projection": "def p/3 = proj/3/2\nmain p",
    "composition": "def s/1 = succ\ndef p/2 = proj/2/1\ndef f/2 = comp s p\nmain f",
    "recursion": "def s/1 = succ\ndef p/1 = proj/1/1\ndef q/3 = proj/3/2\ndef h/3 = comp s q\ndef plus/2 = rec p h\nmain plus",
}


def library_sources() -> dict:
    """name -> proof text, in a fixed order."""
    out = {
        "doubling": doubling_proof(),
        "halving": halving_proof(),
        "binary-induction": binary_induction_proof(),
        "doubling-relaxed": write_proof(relax_proof(parse_proof(doubling_proof()))),
        "exponential": exponential_proof("CLA6"),
        "exponential-cla7": exponential_proof("CLA7"),
    }
    for case, text in PR_CASES.items():
        out[f"pr-{case}"] = pr_proof(parse_pr(text))
    return out


def shipped_dir() -> Path:
    return Path(str(resources.files("clarith") / "lib"))


def load_library() -> list:
    out = []
    for name in library_sources():
        path = shipped_dir() / f"{name}.clp"
        out.append((name, parse_proof(path.read_text())))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description="regenerate the shipped proof files")
    ap.add_argument("--write", action="store_true")
    args = ap.parse_args(argv)
    target = shipped_dir()
    for name, text in library_sources().items():
        path = target / f"{name}.clp"
        if args.write:
            path.write_text(text)
        print(path)


if __name__ == "__main__":
    main()
