import io

import pytest

from clarith.cli import PlaySession, format_env_script, load_any_strategy, main, parse_env_script, run_repl
from clarith.games import Move, format_transcript
from clarith.machines import EAGER, QUIET, play_line, verify_win
from clarith.proofs import check_proof, extract, library

LIB = dict(library())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCheck:
    def test_ok(self, capsys):
        assert run(capsys, "check", "exponential")[0] == 0

    def test_violation(self, capsys):
        code, out, _ = run(capsys, "check", "exponential", "--system", "CLA5")
        assert code == 1 and "SideConditionViolation" in out

    def test_output_matches_library(self, capsys):
        _, out, _ = run(capsys, "check", "pr-recursion", "--system", "cla6")
        expected = "".join(f"{d}\n" for d in check_proof(LIB["pr-recursion"], "CLA6"))
        assert out == expected

    def test_parse_error(self, capsys, tmp_path):
        bad = tmp_path / "bad.clp"
        bad.write_text("(proof (system CLA5)")
        assert run(capsys, "check", str(bad))[0] == 2

    def test_missing_file(self, capsys):
        assert run(capsys, "check", "no-such-proof.clp")[0] == 2


class TestVerifyWin:
    def test_wins(self, capsys):
        code, out, _ = run(capsys, "verify-win", "doubling", "--max-const", "4")
        assert code == 0
        assert out.strip() == verify_win(extract(LIB["doubling"]).strategy, max_const=4).summary()

    def test_resource_cap_flag(self, capsys):
        assert run(capsys, "verify-win", "exponential", "--cap", "5")[0] == 3

    def test_resource_cap_env(self, capsys, monkeypatch):
        monkeypatch.setenv("CLARITH_CAP", "5")
        assert run(capsys, "verify-win", "exponential")[0] == 3

    def test_corpus(self, capsys):
        assert run(capsys, "verify-win", "corpus:doubling", "--max-const", "3")[0] == 0


class TestExtract:
    def test_strategy_file_feeds_verify(self, capsys, tmp_path):
        out_file = tmp_path / "double.strategy"
        code, out, _ = run(capsys, "extract", str(_copy_proof(tmp_path, "doubling")), "-o", str(out_file))
        assert code == 0 and "bound kind space" in out
        assert run(capsys, "verify-win", str(out_file), "--max-const", "3")[0] == 0

    def test_check_failure(self, capsys):
        assert run(capsys, "extract", "exponential", "--system", "CLA5")[0] == 1


def _copy_proof(tmp_path, name):
    from clarith.library import shipped_dir

    p = tmp_path / f"{name}.clp"
    p.write_text((shipped_dir() / f"{name}.clp").read_text())
    return p


class TestEval:
    def test_size_ceiling(self, capsys):
        assert run(capsys, "eval", "w * w + w + 4", "3")[1].strip() == "16"

    def test_graph(self, capsys):
        code, out, _ = run(capsys, "eval", "--graph", "f1 = exp(x + x); f2 = f1(f1(x))", "--at", "1")
        assert (code, out.strip()) == (0, "256")

    def test_pr_file(self, capsys, tmp_path):
        f = tmp_path / "add.pr"
        f.write_text("def z/1 = proj/1/1\ndef s/1 = succ\ndef p/3 = proj/3/2\ndef h/3 = comp s p\ndef add/2 = rec z h\nmain add\n")
        assert run(capsys, "eval", "--pr", str(f), "2", "3")[1].strip() == "5"
        assert run(capsys, "eval", "--pr", str(f), "2")[0] == 2

    def test_eta(self, capsys):
        f = "chex u. (|u| <= |x| * |z| /\\ chall v. (|v| <= |u| + |x| -> v = u))"
        assert run(capsys, "eval", "--eta", f, "--ell", "3")[1].strip() == "16"

    def test_unbound_variable(self, capsys):
        assert run(capsys, "eval", "x + y", "1")[0] == 2


class TestParse:
    def test_round_trip(self, capsys):
        code, out, _ = run(capsys, "parse", "chall x.chex y.y=x'")
        assert code == 0
        assert run(capsys, "parse", out.strip())[1] == out

    def test_error(self, capsys):
        code, out, _ = run(capsys, "parse", "chall x. (x = ")
        assert code == 2 and out.startswith("parse error")


class TestBench:
    def test_space_composer_keeps_one_row(self, capsys):
        code, out, _ = run(capsys, "bench", "corpus:doubling", "--k", "6", "--composer", "space")
        assert code == 0 and out.splitlines()[-1] == "peak live rows 1"

    def test_parallel_composer_keeps_every_row(self, capsys):
        code, out, _ = run(capsys, "bench", "corpus:doubling", "--k", "6", "--composer", "parallel")
        assert code == 0 and out.splitlines()[-1] == "peak live rows 7"

    def test_needs_composed_strategy(self, capsys):
        assert run(capsys, "bench", "halving", "--k", "1")[0] == 2
        code, out, _ = run(capsys, "bench", "halving", "--k", "2", "--node", "half-bounded")
        assert code == 0 and out.splitlines()[-1] == "peak live rows 1"


class TestInteractive:
    def repl(self, strategy, lines):
        stdout = io.StringIO()
        session = PlaySession(strategy)
        code = run_repl(session, io.StringIO("".join(f"{l}\n" for l in lines)), stdout)
        return code, session, stdout.getvalue()

    def test_doubling_session(self):
        s = load_any_strategy("doubling")
        code, session, out = self.repl(s, [". 3"])
        assert code == 0 and "machine: . 6" in out
        assert session.verdict().winner is s.player

    def test_rejects_illegal_and_undoes(self):
        s = load_any_strategy("doubling")
        code, session, out = self.repl(s, ["1 left", ":undo", ":moves", ". 1"])
        assert "rejected" in out and "nothing to undo" in out
        assert session.events == [(QUIET, Move((), 1))]
        assert session.undo() and session.events == [] and session.position == s.target

    def test_duel_replays_history(self, capsys, tmp_path):
        s = load_any_strategy("pr-recursion")
        lines = [". 2", "eager . 3"]
        _, session, _ = self.repl(s, lines + [":quit"])
        env = tmp_path / "env.txt"
        env.write_text(format_env_script(session.events))
        assert len(session.events) == 2
        code, out, _ = run(capsys, "duel", "pr-recursion", "--env", str(env))
        assert code == 0 and out == format_transcript(session.line.records, session.line.verdict)
        assert code == (0 if session.verdict().winner is s.player else 1)


def test_env_script_round_trip():
    events = [(QUIET, Move((), 3)), (EAGER, Move((1, 0), "L"))]
    assert parse_env_script(format_env_script(events)) == events


def test_duel_matches_library_call(capsys, tmp_path):
    env = tmp_path / "env.txt"
    env.write_text("; answer the successor\n. 5\n")
    _, out, _ = run(capsys, "duel", "doubling", "--env", str(env))
    line = play_line(extract(LIB["doubling"]).strategy, [(QUIET, Move((), 5))], reasonable=False, strict=True)
    assert out == format_transcript(line.records, line.verdict)


@pytest.mark.parametrize("argv", [["--version"], ["check", "--help"]])
def test_argparse_exits_cleanly(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 0
