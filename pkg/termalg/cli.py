"""Command-line surface: one subcommand per library operation."""

from __future__ import annotations

import argparse
import logging
import sys
from enum import IntEnum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from termalg.algebra import (
    enumerate_models,
    evaluate,
    find_counterexample,
    is_desk_scale,
    load_algebra,
)
from termalg.balanced import BalanceStatus, is_sigma_balanced
from termalg.config import load_settings
from termalg.errors import (
    AlgebraError,
    CompositionError,
    InvalidPositionError,
    ProofScriptError,
    SignatureError,
    TermSyntaxError,
    TheoryValidationError,
    UnknownVerdictError,
    VariableFreeTermError,
)
from termalg.essentiality import (
    EssReport,
    Strictness,
    position_sets,
    sigma_essential_positions,
    sigma_essential_vars,
)
from termalg.events import EventFn, jsonl_event_writer
from termalg.hyper import apply_hyper, parse_hyper_map, swap
from termalg.probes import solidity_probe, stability_probe
from termalg.reports import json_report, render, witness_context
from termalg.sigma import sigma_compose
from termalg.terms import (
    Signature,
    Term,
    depth,
    infer_signature,
    inductive_compose,
    parse_identity,
    parse_position,
    parse_term,
    position_renderer,
    positional_compose,
    positions,
    render_identity,
    render_term,
    subterm_at,
    term_key,
)
from termalg.theory.loader import load_theory, resolve_theory_path
from termalg.theory.oracle import sigma_equal
from termalg.theory.types import Budget, Theory

from termalg.deduction.checker import check_proof
from termalg.deduction.closure import closure_sample
from termalg.deduction.script import load_proof, render_proof
from termalg.deduction.search import derive
from termalg.deduction.types import DeriveStatus, System


logger = logging.getLogger(__name__)


class ExitStatus(IntEnum):
    OK = 0
    NEGATIVE = 1
    UNKNOWN = 2
    USAGE = 64
    DATA = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


_DATA_ERRORS = (
    AlgebraError,
    CompositionError,
    InvalidPositionError,
    ProofScriptError,
    SignatureError,
    TermSyntaxError,
    TheoryValidationError,
    VariableFreeTermError,
)

Outcome = Tuple[ExitStatus, Dict[str, Any], str]


# ---------------------------------------------------------------------------
# shared plumbing


class Context:
    def __init__(self, args: argparse.Namespace, event_cb: EventFn) -> None:
        self.args = args
        self.event_cb = event_cb
        self._theory: Optional[Theory] = None

    @property
    def strictness(self) -> Strictness:
        return Strictness.PERMISSIVE if self.args.permissive else Strictness.STRICT

    def theory(self) -> Theory:
        if self._theory is None:
            if not self.args.theory:
                raise UsageError("this command needs --theory")
            theory = load_theory(resolve_theory_path(self.args.theory))
            if self.args.budget:
                theory = theory.with_budget(Budget.parse(self.args.budget, base=theory.budget))
            self._theory = theory
        return self._theory

    def signature(self, *texts: str) -> Signature:
        if self.args.theory:
            return self.theory().sig
        if self.args.sig:
            return Signature.parse(self.args.sig)
        return infer_signature(*texts)

    def term(self, text: str, *others: str) -> Term:
        return parse_term(text, self.signature(text, *others))

    def budget(self) -> Budget:
        base = self.theory().budget if self.args.theory else load_settings().default_budget
        return Budget.parse(self.args.budget, base=base) if self.args.budget else base


def _ess_outcome(ctx: Context, report: EssReport, render_item, key) -> Outcome:
    payload = report.to_dict(render_item, key)
    status = ExitStatus.UNKNOWN if report.unknown and ctx.strictness is Strictness.STRICT else ExitStatus.OK
    return status, payload, render("ess_report.j2", **payload)


def _verdict_outcome(verdict) -> Outcome:
    status = {"equal": ExitStatus.OK, "distinct": ExitStatus.NEGATIVE}.get(verdict.status.value, ExitStatus.UNKNOWN)
    text = render(
        "verdict.j2",
        status=verdict.status.value,
        witness=witness_context(verdict.witness),
        reason=verdict.reason,
    )
    return status, verdict.to_dict(), text


# ---------------------------------------------------------------------------
# term commands


def cmd_positions(ctx: Context) -> Outcome:
    t = ctx.term(ctx.args.term)
    rendered = [position_renderer(ctx.signature(ctx.args.term))(p) for p in positions(t)]
    return ExitStatus.OK, {"positions": rendered}, " ".join(rendered) + "\n"


def cmd_subterm(ctx: Context) -> Outcome:
    t = ctx.term(ctx.args.term)
    sub = subterm_at(t, parse_position(ctx.args.position, ctx.signature(ctx.args.term)))
    return ExitStatus.OK, {"subterm": render_term(sub)}, render_term(sub) + "\n"


def cmd_depth(ctx: Context) -> Outcome:
    value = depth(ctx.term(ctx.args.term))
    return ExitStatus.OK, {"depth": value}, f"{value}\n"


def cmd_compose_pos(ctx: Context) -> Outcome:
    args = ctx.args
    sig = ctx.signature(args.term, args.replacement)
    result = positional_compose(parse_term(args.term, sig), parse_position(args.position, sig), parse_term(args.replacement, sig))
    return ExitStatus.OK, {"result": render_term(result)}, render_term(result) + "\n"


def cmd_compose_ind(ctx: Context) -> Outcome:
    args = ctx.args
    sig = ctx.signature(args.term, args.pattern, args.replacement)
    result = inductive_compose(parse_term(args.term, sig), parse_term(args.pattern, sig), parse_term(args.replacement, sig))
    return ExitStatus.OK, {"result": render_term(result)}, render_term(result) + "\n"


# ---------------------------------------------------------------------------
# theory commands


def cmd_sigma_compose(ctx: Context) -> Outcome:
    theory, args = ctx.theory(), ctx.args
    t, r, s = (parse_term(text, theory.sig) for text in (args.term, args.pattern, args.replacement))
    result = sigma_compose(theory, t, r, s, ctx.strictness)
    return ExitStatus.OK, {"result": render_term(result)}, render_term(result) + "\n"


def cmd_ess_vars(ctx: Context) -> Outcome:
    theory = ctx.theory()
    report = sigma_essential_vars(theory, parse_term(ctx.args.term, theory.sig))
    return _ess_outcome(ctx, report, lambda index: f"x{index}", None)


def cmd_ess_pos(ctx: Context) -> Outcome:
    theory = ctx.theory()
    report = sigma_essential_positions(theory, parse_term(ctx.args.term, theory.sig))
    return _ess_outcome(ctx, report, position_renderer(theory.sig), None)


def cmd_pos_sets(ctx: Context) -> Outcome:
    theory = ctx.theory()
    t, r = parse_term(ctx.args.term, theory.sig), parse_term(ctx.args.pattern, theory.sig)
    payload = position_sets(theory, t, r, ctx.strictness).to_dict(position_renderer(theory.sig))
    return ExitStatus.OK, payload, render("position_sets.j2", **payload)


def cmd_balanced(ctx: Context) -> Outcome:
    theory = ctx.theory()
    report = is_sigma_balanced(theory, parse_identity(ctx.args.identity, theory.sig), ctx.strictness)
    status = {
        BalanceStatus.BALANCED: ExitStatus.OK,
        BalanceStatus.UNBALANCED: ExitStatus.NEGATIVE,
        BalanceStatus.UNKNOWN: ExitStatus.UNKNOWN,
    }[report.status]
    return status, report.to_dict(), report.verdict() + "\n"


def cmd_equal(ctx: Context) -> Outcome:
    theory = ctx.theory()
    goal = parse_identity(ctx.args.identity, theory.sig)
    return _verdict_outcome(sigma_equal(theory, goal.lhs, goal.rhs, ctx.event_cb))


def cmd_prove(ctx: Context) -> Outcome:
    theory = ctx.theory()
    goal = parse_identity(ctx.args.identity, theory.sig)
    system = System(ctx.args.system)
    if system not in (System.D, System.SIGMA_R):
        raise UsageError("prove supports --system d and --system sigma-r")
    result = derive(theory, goal, system, ctx.budget(), ctx.event_cb)
    proof_text = render_proof(result.proof, theory.sig) if result.proof is not None else ""
    status = {
        DeriveStatus.PROVED: ExitStatus.OK,
        DeriveStatus.REFUTED: ExitStatus.NEGATIVE,
        DeriveStatus.NOT_FOUND: ExitStatus.UNKNOWN,
    }[result.status]
    text = render(
        "derive.j2",
        status=result.status.value,
        budget=ctx.budget().render(),
        witness=witness_context(result.witness),
        proof=proof_text,
    )
    return status, result.to_dict(lambda proof: render_proof(proof, theory.sig).splitlines()), text


def cmd_check_proof(ctx: Context) -> Outcome:
    theory = ctx.theory()
    proof = load_proof(Path(ctx.args.proof), theory.sig, theory.describe())
    system = System(ctx.args.system) if ctx.args.system else None
    result = check_proof(theory, proof, system)
    text = render("check.j2", valid=result.valid, steps=len(proof), failed_step=result.failed_step, reason=result.reason)
    return (ExitStatus.OK if result.valid else ExitStatus.NEGATIVE), result.to_dict(), text


def cmd_closure_sample(ctx: Context) -> Outcome:
    theory = ctx.theory()
    system = System(ctx.args.system)
    sample = closure_sample(theory, system, ctx.budget(), ctx.args.variables, event_cb=ctx.event_cb)
    if not ctx.args.all:
        sample = [e for e in sample if e.lhs != e.rhs and term_key(e.lhs) < term_key(e.rhs)]
    lines = [render_identity(e) for e in sample]
    return ExitStatus.OK, {"system": system.value, "identities": lines}, "".join(line + "\n" for line in lines)


def cmd_models(ctx: Context) -> Outcome:
    theory = ctx.theory()
    max_size = ctx.args.size or theory.budget.max_model_size
    if not is_desk_scale(theory.sig, max_size) and not ctx.args.force:
        raise UsageError(f"model size {max_size} is out of desk reach for this signature; pass --force to run anyway")
    n_jobs = load_settings().n_jobs
    models = [algebra.to_dict() for algebra in enumerate_models(theory.sig, theory.axioms, max_size, n_jobs)]
    context = {
        "max_size": max_size,
        "models": [{"carrier": m["carrier"], "ops": list(m["ops"].items())} for m in models],
    }
    return ExitStatus.OK, {"max_size": max_size, "models": models}, render("models.j2", **context)


def _assignment(text: str) -> Dict[int, int]:
    env: Dict[int, int] = {}
    for chunk in filter(None, (c.strip() for c in text.split(","))):
        name, sep, value = chunk.partition("=")
        if not sep or not name.strip().startswith("x") or not name.strip()[1:].isdigit() or not value.strip().isdigit():
            raise TermSyntaxError(f"expected xN=value, got {chunk!r}", 0)
        env[int(name.strip()[1:])] = int(value)
    return env


def cmd_eval(ctx: Context) -> Outcome:
    args = ctx.args
    if not args.algebra:
        raise UsageError("eval needs --algebra")
    sig = ctx.signature(args.expression) if (args.theory or args.sig) else None
    algebra = load_algebra(Path(args.algebra), sig)
    if "=" in args.expression:
        e = parse_identity(args.expression, algebra.signature)
        env = find_counterexample(algebra, e)
        if env is None:
            return ExitStatus.OK, {"satisfied": True}, "satisfied\n"
        rendered = ", ".join(f"x{index}={value}" for index, value in sorted(env.items()))
        return ExitStatus.NEGATIVE, {"satisfied": False, "assignment": {f"x{k}": v for k, v in env.items()}}, f"fails at {rendered}\n"
    t = parse_term(args.expression, algebra.signature)
    value = evaluate(algebra, t, _assignment(args.assign or ""))
    return ExitStatus.OK, {"value": value}, f"{value}\n"


def cmd_hyper(ctx: Context) -> Outcome:
    sig = ctx.signature(ctx.args.term, *[m.partition("->")[2] for m in ctx.args.map])
    h = parse_hyper_map(ctx.args.map, sig) if ctx.args.map else swap(sig, sig.names[0])
    result = apply_hyper(h, parse_term(ctx.args.term, sig))
    return ExitStatus.OK, {"hyper": h.to_dict(), "result": render_term(result)}, render_term(result) + "\n"


def _probe_outcome(result) -> Outcome:
    details: List[Tuple[str, str]] = []
    witness = None
    if result.counterexample is not None:
        payload = result.counterexample.to_dict()
        details = [(key, str(value)) for key, value in payload.items() if key != "witness"]
        witness = witness_context(result.counterexample.witness)
    text = render(
        "probe.j2",
        summary=result.summary(),
        checks=result.checks,
        undecided=result.undecided,
        details=details,
        witness=witness,
    )
    return (ExitStatus.NEGATIVE if result.found else ExitStatus.OK), result.to_dict(), text


def cmd_solid_probe(ctx: Context) -> Outcome:
    theory = ctx.theory()
    ids = [parse_identity(text, theory.sig) for text in ctx.args.identities] or list(theory.axioms)
    hyps = [parse_hyper_map(ctx.args.map, theory.sig)] if ctx.args.map else None
    return _probe_outcome(solidity_probe(theory, ids, hyps, ctx.budget(), ctx.event_cb))


def cmd_stable_probe(ctx: Context) -> Outcome:
    theory = ctx.theory()
    result = stability_probe(theory, ctx.budget(), seed=ctx.args.seed or 0, samples=ctx.args.samples, event_cb=ctx.event_cb)
    return _probe_outcome(result)


# ---------------------------------------------------------------------------
# parser


_RANDOMIZED = {"stable-probe"}


def _common() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--theory", help="theory file or the name of a shipped theory")
    common.add_argument("--algebra", help="algebra JSON file")
    common.add_argument("--sig", help="signature such as 'f/2 g/1' when no theory is given")
    common.add_argument("--budget", help="overrides such as 'term_size=9 steps=200'")
    common.add_argument("--seed", type=int, default=None)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", action="store_true", help="undecided side conditions are errors (default)")
    mode.add_argument("--permissive", action="store_true", help="undecided side conditions are excluded with a warning")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--events", help="append JSONL progress events to this file")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="termalg", description="Terms, positions and essentiality relative to an equational theory.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[[Context], Outcome], help_text: str, *positionals: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, parents=[common], help=help_text)
        for positional in positionals:
            command.add_argument(positional)
        command.set_defaults(handler=handler)
        return command

    add("positions", cmd_positions, "list positions in preorder", "term")
    add("subterm", cmd_subterm, "subterm at a position", "term", "position")
    add("depth", cmd_depth, "depth of a term", "term")
    add("compose-pos", cmd_compose_pos, "replace the subterm at one position", "term", "position", "replacement")
    add("compose-ind", cmd_compose_ind, "replace every occurrence of a subterm", "term", "pattern", "replacement")
    add("sigma-compose", cmd_sigma_compose, "replace subterms equal to a pattern modulo the theory", "term", "pattern", "replacement")
    add("ess-vars", cmd_ess_vars, "essential and fictive variables", "term")
    add("ess-pos", cmd_ess_pos, "essential and fictive positions", "term")
    add("pos-sets", cmd_pos_sets, "position sets of a pattern class", "term", "pattern")
    add("balanced", cmd_balanced, "check an identity for balance modulo the theory", "identity")
    add("equal", cmd_equal, "decide an identity with the theory's oracle", "identity")
    prove = add("prove", cmd_prove, "search for a derivation", "identity")
    prove.add_argument("--system", choices=[System.D.value, System.SIGMA_R.value], default=System.D.value)
    check = add("check-proof", cmd_check_proof, "validate a proof script", "proof")
    check.add_argument("--system", choices=[s.value for s in System], default=None)
    closure = add("closure-sample", cmd_closure_sample, "saturate the theory over small terms")
    closure.add_argument("--system", choices=[s.value for s in System], default=System.D.value)
    closure.add_argument("--variables", type=int, default=3)
    closure.add_argument("--all", action="store_true", help="include reflexive and mirrored pairs")
    models = add("models", cmd_models, "enumerate finite models")
    models.add_argument("--size", type=int, default=None)
    models.add_argument("--force", action="store_true")
    evaluation = add("eval", cmd_eval, "evaluate a term or check an identity in an algebra", "expression")
    evaluation.add_argument("--assign", help="assignment such as 'x1=0,x2=1'")
    hyper = add("hyper", cmd_hyper, "apply a hypersubstitution", "term")
    hyper.add_argument("--map", action="append", default=[], help="'f -> f(x2,x1)', repeatable")
    solid = add("solid-probe", cmd_solid_probe, "search hypersubstitution images of identities for a failure")
    solid.add_argument("identities", nargs="*")
    solid.add_argument("--map", action="append", default=[])
    stable = add("stable-probe", cmd_stable_probe, "search for a stability counterexample")
    stable.add_argument("--samples", type=int, default=None)
    return parser


def _configure_logging(verbose: int) -> None:
    level = logging.getLevelName(load_settings().log_level)
    if verbose:
        level = logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr, force=True)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return ExitStatus.USAGE
    _configure_logging(args.verbose)
    if args.format == "json" and args.command in _RANDOMIZED and args.seed is None:
        print("usage error: --seed is required with --format json for randomized commands", file=sys.stderr)
        return ExitStatus.USAGE
    event_cb = jsonl_event_writer(Path(args.events)) if args.events else None
    ctx = Context(args, event_cb)
    try:
        status, payload, text = args.handler(ctx)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return ExitStatus.USAGE
    except TheoryValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for item in exc.errors:
            print(f"  {item['field']}: {item['message']}", file=sys.stderr)
        return ExitStatus.DATA
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitStatus.DATA
    except UnknownVerdictError as exc:
        print(f"unknown: {exc}", file=sys.stderr)
        return ExitStatus.UNKNOWN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ExitStatus.DATA
    if args.format == "json":
        print(json_report(args.command, int(status), payload))
    else:
        sys.stdout.write(text)
    return int(status)


def main() -> None:
    sys.exit(run())
