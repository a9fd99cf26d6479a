"""
Restricted partially ordered DESs: the projected automaton has no cycles other
than self-loops, and a state with a self-loop on an event cannot also leave on
that event. The observer of such a system is partially ordered as well, so
every observer cycle is a self-loop.
"""

import logging
from typing import Set

import networkx as nx

from automata import project
from checks import (
    STRONG_D,
    STRONG_PERIODIC_D,
    WEAK_D,
    WEAK_PERIODIC_D,
    ObserverAnalysis,
    strong_d_from,
)
from models import Des, Estimate, Spec
from observer import shortest_word
from schemas import Lasso, RpoReport, Verdict
from utils.config import MAX_OBSERVER_STATES
from utils.errors import InputError, InvariantViolation

logger = logging.getLogger(__name__)


def _without_self_loops(edges) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_edges_from((source, target) for source, target in edges if source != target)
    return graph


def classify_rpodes(des: Des) -> RpoReport:
    projected = project(des)
    graph = _without_self_loops((source, target) for source, _, target in projected.transitions)
    graph.add_nodes_from(projected.states)

    po_violation = None
    if not nx.is_directed_acyclic_graph(graph):
        po_violation = [source for source, _ in nx.find_cycle(graph)]

    selfloop_violation = None
    for state in projected.states:
        for event in projected.alphabet.events:
            targets = projected.successors(state, event)
            if state in targets and len(targets) > 1:
                selfloop_violation = (state, event)
                break
        if selfloop_violation:
            break

    return RpoReport(po_violation=po_violation, selfloop_violation=selfloop_violation)


def is_rpodes(des: Des) -> bool:
    return classify_rpodes(des).is_rpo


def _po_analysis(des: Des, spec: Spec, state_budget: int) -> ObserverAnalysis:
    report = classify_rpodes(des)
    if not report.is_rpo:
        raise InputError("The DES is not an rpoDES; use the general engine")
    analysis = ObserverAnalysis(des, spec, state_budget)
    if not nx.is_directed_acyclic_graph(_without_self_loops(analysis.graph.edges())):
        raise InvariantViolation("The observer of an rpoDES is not partially ordered")
    return analysis


def _looping(analysis: ObserverAnalysis, among: Set[Estimate]) -> Set[Estimate]:
    return {state for state in among if analysis.graph.has_edge(state, state)}


def _self_loop_lasso(analysis: ObserverAnalysis, targets: Set[Estimate]) -> Lasso:
    stem, hub = analysis.word_to(targets)
    cycle = analysis.cycle_at(hub, {hub})
    return Lasso(stem=stem, cycle=cycle)


def check_rpodes_strong_periodic_d(
    des: Des, spec: Spec, state_budget: int = MAX_OBSERVER_STATES
) -> Verdict:
    """
    Fails iff a reachable violating estimate has a self-loop. The strong
    verdict is computed alongside and reported in the notes.
    """
    analysis = _po_analysis(des, spec, state_budget)
    strong = strong_d_from(analysis)
    trapped = _looping(analysis, analysis.violating)
    holds = not trapped

    notes = [f"strong-d {'holds' if strong.holds else 'fails'}"]
    if strong.holds != holds:
        logger.warning(
            "Strong and strong periodic D-detectability disagree on this rpoDES "
            f"(strong {'holds' if strong.holds else 'fails'}, "
            f"strong periodic {'holds' if holds else 'fails'})"
        )
        notes.append("strong and strong periodic verdicts differ")

    if holds:
        return Verdict(
            property_name=STRONG_PERIODIC_D,
            engine="rpo",
            holds=True,
            bound_n=analysis.size + 1,
            notes=notes,
        )
    return Verdict(
        property_name=STRONG_PERIODIC_D,
        engine="rpo",
        holds=False,
        witness=_self_loop_lasso(analysis, trapped),
        notes=notes,
    )


def check_rpodes(
    des: Des, spec: Spec, property_name: str, state_budget: int = MAX_OBSERVER_STATES
) -> Verdict:
    """Any of the four variants on an rpoDES, using self-loops as the only observer cycles."""
    if property_name == STRONG_PERIODIC_D:
        return check_rpodes_strong_periodic_d(des, spec, state_budget)

    analysis = _po_analysis(des, spec, state_budget)
    if property_name == STRONG_D:
        hubs = _looping(analysis, set(analysis.observer.states))
        stems = {hub: analysis.word_to({hub})[0] for hub in hubs}
        for hub in sorted(hubs, key=lambda s: (len(stems[s]), stems[s])):
            found = shortest_word(analysis.observer.out_edges, hub, analysis.violating)
            if found is not None:
                witness = Lasso(stem=stems[hub], cycle=analysis.cycle_at(hub, {hub}), tail=found[0])
                return Verdict(property_name=STRONG_D, engine="rpo", holds=False, witness=witness)
        return Verdict(property_name=STRONG_D, engine="rpo", holds=True, bound_n=analysis.size)

    if property_name in (WEAK_D, WEAK_PERIODIC_D):
        # every cycle is a self-loop, so both weak variants ask for a free one
        resting = _looping(analysis, analysis.free)
        if not resting:
            return Verdict(property_name=property_name, engine="rpo", holds=False)
        witness = _self_loop_lasso(analysis, resting)
        bound = len(witness.stem) if property_name == WEAK_D else len(witness.stem) + 2
        return Verdict(
            property_name=property_name, engine="rpo", holds=True, bound_n=bound, witness=witness
        )

    raise InputError(f"Unknown property: {property_name}")
