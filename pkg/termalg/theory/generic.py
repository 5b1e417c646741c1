"""Semi-decision for theories without a built-in procedure.

Alternates proof-search expansions with batches of enumerated models;
every Equal answer is backed by a checked certificate and every Distinct
answer by a separating model.
"""

from __future__ import annotations

import logging
from itertools import islice

from termalg.algebra import enumerable_size, find_counterexample, model_list
from termalg.events import EventFn, emit
from termalg.terms import Identity, Term
from termalg.theory.types import Theory, Verdict, Witness


logger = logging.getLogger(__name__)

MODEL_BATCH = 64


def generic_equal(theory: Theory, t: Term, s: Term, event_cb: EventFn = None) -> Verdict:
    from termalg.deduction.certificates import chain_certificate, hint_certificate
    from termalg.deduction.checker import check_proof
    from termalg.deduction.search import chain_search
    from termalg.deduction.types import reflexivity_proof

    goal = Identity(t, s)
    if t == s:
        return Verdict.equal(reflexivity_proof(t, theory.describe()))

    for algebra in theory.witness_algebras:
        env = find_counterexample(algebra, goal)
        if env is not None:
            return Verdict.distinct(Witness.of(algebra, env))

    proof = hint_certificate(theory, goal)
    if proof is not None:
        if check_proof(theory, proof).valid:
            emit(event_cb, "GENERIC_HINT_PROOF", str(goal))
            return Verdict.equal(proof)
        logger.error("hint certificate for %s failed the checker", goal)

    budget = theory.budget
    models = iter(model_list(theory.sig, theory.axioms, enumerable_size(theory.sig, budget.max_model_size)))
    search = chain_search(theory, goal, budget)
    searching = True
    expansions = 0
    while True:
        if searching and expansions < budget.max_steps:
            expansions += 1
            try:
                found = next(search)
            except StopIteration:
                searching = False
                found = None
            if found is not None:
                proof = chain_certificate(theory, t, found)
                if proof is not None and check_proof(theory, proof).valid:
                    emit(event_cb, "GENERIC_PROOF", f"{goal} after {expansions} expansions")
                    return Verdict.equal(proof)
                searching = False
        else:
            searching = False
        batch = list(islice(models, MODEL_BATCH))
        for algebra in batch:
            env = find_counterexample(algebra, goal)
            if env is not None:
                emit(event_cb, "GENERIC_REFUTED", str(goal))
                return Verdict.distinct(Witness.of(algebra, env))
        if not searching and not batch:
            break

    emit(event_cb, "SEARCH_BUDGET_EXHAUSTED", f"{goal} after {expansions} expansions")
    logger.info("undecided %s within %s", goal, budget.render())
    return Verdict.unknown("budget exhausted")
