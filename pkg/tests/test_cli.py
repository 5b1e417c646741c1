import json
from pathlib import Path

import pytest

from termalg.cli import ExitStatus, run
from termalg.config import algebras_dir, proofs_dir
from termalg.events import read_events
from termalg.probes import NONE_FOUND

GOLDEN = Path(__file__).resolve().parent / "golden"
NESTED = "f(f(x1,f(f(f(x1,x2),x2),x3)),x4)"
ESS = "f(f(x1,x2),f(f(x1,x2),x3))"
UNBALANCED = "f(f(x1,x2),f(x1,x3)) = f(x1,f(f(x1,x2),x3))"
SG_GOAL = "f(f(x1,x1),x2) = f(x1,x1)"


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize(
    "argv, golden",
    [
        (["sigma-compose", "--theory", "rb.eq", NESTED, "f(x1,x2)", "f(x4,x1)"], "sigma_compose_rb.json"),
        (["balanced", "--theory", "rb.eq", UNBALANCED], "balanced_rb.json"),
        (["ess-pos", "--theory", "rb", ESS], "ess_pos_rb.json"),
        (["pos-sets", "--theory", "rb", NESTED, "f(x1,x2)"], "pos_sets_rb.json"),
    ],
)
def test_json_reports_match_golden_files(capsys, argv, golden):
    code, out, _ = _run(capsys, *argv, "--format", "json")
    expected = json.loads((GOLDEN / golden).read_text(encoding="utf-8"))
    assert json.loads(out) == expected
    assert code == expected["exit_code"]


def test_term_commands(capsys):
    assert _run(capsys, "positions", "f(x1,x2)") == (0, "e 1 2\n", "")
    assert _run(capsys, "subterm", NESTED, "121")[1] == "f(f(x1,x2),x2)\n"
    assert _run(capsys, "depth", NESTED)[1] == "5\n"
    assert _run(capsys, "compose-pos", NESTED, "121", "f(x4,x1)")[1] == "f(f(x1,f(f(x4,x1),x3)),x4)\n"
    assert _run(capsys, "compose-ind", ESS, "f(x1,x2)", "x1")[1] == "f(x1,f(x1,x3))\n"


def test_theory_reports_in_text(capsys):
    code, out, _ = _run(capsys, "sigma-compose", "--theory", "rb.eq", NESTED, "f(x1,x2)", "f(x4,x1)")
    assert (code, out) == (0, "f(f(x1,f(f(x4,x1),x3)),x4)\n")
    code, out, _ = _run(capsys, "ess-vars", "--theory", "rb", ESS)
    assert (code, out) == (0, "essential: x1, x3\nfictive: x2\n")
    out = _run(capsys, "pos-sets", "--theory", "rb", NESTED, "f(x1,x2)")[1]
    assert "P: 121\n" in out
    assert "EP: -\n" in out
    code, out, _ = _run(capsys, "balanced", "--theory", "rb.eq", UNBALANCED)
    assert (code, out) == (1, "unbalanced at q=f(x1,x2) (|EP_lhs|=1, |EP_rhs|=0)\n")
    assert _run(capsys, "equal", "--theory", "sg", SG_GOAL)[0] == ExitStatus.NEGATIVE


def test_prove_in_both_systems(capsys, tmp_path):
    code, out, _ = _run(capsys, "prove", "--theory", "sg.eq", "--system", "d", SG_GOAL)
    assert code == 1
    assert out.startswith("refuted\n")
    assert "witness: z2_add (carrier 2)" in out
    assert "assignment: x1=0, x2=1" in out

    events = tmp_path / "events.jsonl"
    code, out, _ = _run(capsys, "prove", "--theory", "sg", "--system", "sigma-r", SG_GOAL, "--events", str(events))
    assert code == 0
    assert out.startswith("proved\n")
    assert "SigmaR1" in out
    stages = [event["stage"] for event in read_events(events)]
    assert stages[0] == "DERIVE_STARTED"
    assert stages[-1] == "DERIVE_PROVED"


def test_check_proof(capsys):
    script = str(proofs_dir() / "sg_sigma_r.proof")
    assert _run(capsys, "check-proof", "--theory", "sg", "--system", "sigma-r", script)[:2] == (0, "valid (7 steps)\n")
    code, out, _ = _run(capsys, "check-proof", "--theory", "sg", "--system", "d", script)
    assert (code, out) == (1, "invalid at step 7: SigmaR1 is not a rule of system d\n")


def test_closure_sample_lists_oriented_pairs(capsys):
    code, out, _ = _run(capsys, "closure-sample", "--theory", "lz", "--budget", "term_size=3")
    lines = out.splitlines()
    assert code == 0
    assert "x1 = f(x1,x2)" in lines
    assert all(left != right for left, right in (line.split(" = ") for line in lines))
    everything = _run(capsys, "closure-sample", "--theory", "lz", "--budget", "term_size=3", "--all")[1].splitlines()
    assert "x1 = x1" in everything
    assert len(everything) > len(lines)


def test_models(capsys):
    code, out, _ = _run(capsys, "models", "--theory", "lz", "--size", "2")
    assert code == 0
    assert out.splitlines()[0] == "2 model(s) up to size 2"
    code, _, err = _run(capsys, "models", "--theory", "rb", "--size", "4")
    assert code == ExitStatus.USAGE
    assert "--force" in err


def test_eval(capsys):
    z2 = str(algebras_dir() / "z2_add.json")
    assert _run(capsys, "eval", "--algebra", z2, SG_GOAL)[:2] == (1, "fails at x1=0, x2=1\n")
    assert _run(capsys, "eval", "--algebra", z2, "f(x1,f(x2,x3)) = f(f(x1,x2),x3)")[:2] == (0, "satisfied\n")
    assert _run(capsys, "eval", "--algebra", z2, "f(x1,x2)", "--assign", "x1=1,x2=1")[:2] == (0, "0\n")
    assert _run(capsys, "eval", SG_GOAL)[0] == ExitStatus.USAGE
    assert _run(capsys, "eval", "--algebra", z2, "f(x1,x2)", "--assign", "y=1")[0] == ExitStatus.DATA


def test_hyper(capsys):
    assert _run(capsys, "hyper", "f(f(x1,x2),x1)")[1] == "f(x1,f(x2,x1))\n"
    assert _run(capsys, "hyper", "f(f(x1,x2),x1)", "--map", "f -> f(x1,x1)")[1] == "f(f(x1,x1),f(x1,x1))\n"


def test_probes(capsys):
    code, out, _ = _run(capsys, "solid-probe", "--theory", "la", "--map", "f -> f(x2,x1)")
    assert code == 1
    assert out.splitlines()[0] == "counterexample found (1 checks)"
    assert "image: f(x1,f(x2,x1)) = f(x1,x1)" in out

    code, _, err = _run(capsys, "stable-probe", "--theory", "rb", "--format", "json")
    assert code == ExitStatus.USAGE
    assert "--seed" in err
    code, out, _ = _run(capsys, "stable-probe", "--theory", "rb", "--seed", "1", "--samples", "50", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["result"]["result"] == NONE_FOUND
    assert report["result"]["checks"] <= 50


def test_usage_and_data_errors(capsys):
    assert _run(capsys, "no-such-command")[0] == ExitStatus.USAGE
    assert _run(capsys, "sigma-compose", NESTED, "x1", "x2")[0] == ExitStatus.USAGE
    assert _run(capsys, "ess-vars", "--theory", "rb", "--strict", "--permissive", "x1")[0] == ExitStatus.USAGE
    assert _run(capsys, "prove", "--theory", "rb", "--system", "chi", "x1 = x1")[0] == ExitStatus.USAGE
    code, _, err = _run(capsys, "positions", "f(x1,")
    assert code == ExitStatus.DATA
    assert err.startswith("error:")
    assert _run(capsys, "ess-vars", "--theory", "no_such_theory", "x1")[0] == ExitStatus.DATA
    assert _run(capsys, "check-proof", "--theory", "sg", "missing.proof")[0] == ExitStatus.DATA
    assert _run(capsys, "subterm", "f(x1,x2)", "21")[0] == ExitStatus.DATA


def test_undecided_side_conditions_follow_the_mode(capsys, tmp_path):
    theory = tmp_path / "idem.eq"
    theory.write_text(
        "signature: f/2\noracle: generic\naxiom: f(x1,x1) = x1\nbudget: term_size=3 steps=1 model_size=1\n",
        encoding="utf-8",
    )
    code, _, err = _run(capsys, "sigma-compose", "--theory", str(theory), "f(x1,x2)", "x1", "x3")
    assert code == ExitStatus.UNKNOWN
    assert err.startswith("unknown:")
    code, out, _ = _run(capsys, "sigma-compose", "--theory", str(theory), "--permissive", "f(x1,x2)", "x1", "x3")
    assert (code, out) == (0, "f(x3,x2)\n")
