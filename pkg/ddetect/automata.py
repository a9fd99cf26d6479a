"""
Core operations on discrete event systems: unobservable reach, projection,
state estimation and the two standing modelling assumptions.
"""

import logging
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Set

import networkx as nx

from models import Alphabet, Des, Estimate, Spec
from schemas import AssumptionReport, Lasso
from utils.errors import InputError

logger = logging.getLogger(__name__)


def _check_states(des: Des, states: Iterable[str]) -> None:
    for state in states:
        if not des.has_state(state):
            raise InputError(f"Unknown state: {state}")


def unobservable_reach(des: Des, start: Iterable[str]) -> Estimate:
    """Smallest superset of `start` closed under unobservable transitions."""
    start = frozenset(start)
    _check_states(des, start)
    unobservable = des.alphabet.unobservable
    if not unobservable:
        return start
    reached: Set[str] = set(start)
    stack = list(start)
    while stack:
        state = stack.pop()
        for event in unobservable:
            for target in des.successors(state, event):
                if target not in reached:
                    reached.add(target)
                    stack.append(target)
    return frozenset(reached)


def step(des: Des, estimate: Estimate, event: str) -> Estimate:
    """R(estimate, event): one observable step followed by unobservable closure."""
    if not des.alphabet.is_observable(event):
        raise InputError(f"Event {event!r} is not observable")
    closure = unobservable_reach(des, estimate)
    targets = {t for state in closure for t in des.successors(state, event)}
    return unobservable_reach(des, targets)


def initial_estimate(des: Des) -> Estimate:
    return unobservable_reach(des, des.initial)


def estimate(des: Des, observation: Sequence[str]) -> Estimate:
    """R(I, observation) for a string of observable events."""
    for event in observation:
        if not des.alphabet.is_observable(event):
            raise InputError(f"Observation contains non-observable symbol {event!r}")
    current = initial_estimate(des)
    for event in observation:
        if not current:
            break
        current = step(des, current, event)
    return current


def project(des: Des) -> Des:
    """
    P(G): eliminate unobservable events, keeping the same state set.

    The initial set becomes the unobservable reach of I, so estimates on the
    projected automaton coincide with estimates on the original for every
    observed string, the empty one included.
    """
    observable = des.alphabet.observable_events
    if not observable:
        raise InputError("Cannot project a DES without observable events")
    if not des.alphabet.unobservable:
        return des
    transitions = set()
    for state in des.states:
        closure = unobservable_reach(des, [state])
        for event in observable:
            for target in step(des, closure, event):
                transitions.add((state, event, target))
    logger.debug(f"Projected {len(des.transitions)} transitions onto {len(transitions)}")
    return Des(
        states=des.states,
        alphabet=Alphabet(events=observable, observable=frozenset(observable)),
        transitions=frozenset(transitions),
        initial=initial_estimate(des),
        marked=des.marked,
    )


def is_violating(est: Estimate, spec: Spec) -> bool:
    """True iff both members of some specification pair are in the estimate."""
    if len(est) ** 2 < len(spec.pairs):
        return any((p, q) in spec.pairs for p in est for q in est)
    return any(p in est and q in est for p, q in spec.pairs)


def detectability_spec(des: Des) -> Spec:
    """All ordered pairs of distinct states: plain detectability as a D-specification."""
    return Spec(pairs=frozenset(permutations(des.states, 2)))


def _unobservable_graph(des: Des) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(des.states)
    unobservable = des.alphabet.unobservable
    graph.add_edges_from(
        (source, target) for source, event, target in des.transitions if event in unobservable
    )
    return graph


def validate_assumptions(des: Des) -> AssumptionReport:
    """Report deadlock freedom and absence of purely unobservable loops."""
    with_successor = {source for source, _, _ in des.transitions}
    deadlocked = [state for state in des.states if state not in with_successor]

    offending_cycle: Optional[List[str]] = None
    graph = _unobservable_graph(des)
    try:
        cycle_edges = nx.find_cycle(graph)
        offending_cycle = [source for source, _ in cycle_edges]
    except nx.NetworkXNoCycle:
        pass

    return AssumptionReport(
        deadlock_free=not deadlocked,
        deadlocked_states=deadlocked,
        no_unobservable_loop=offending_cycle is None,
        unobservable_cycle=offending_cycle,
    )


def observable_successor_events(des: Des, est: Estimate) -> Dict[str, Estimate]:
    """Nonempty one-step successors of an estimate, keyed by observable event."""
    result = {}
    for event in des.alphabet.observable_events:
        target = step(des, est, event)
        if target:
            result[event] = target
    return result


def replay_lasso(des: Des, lasso: Lasso, repetitions: int = 1) -> List[Estimate]:
    """Estimates along stem . cycle^repetitions . tail, starting with the initial estimate."""
    if repetitions < 0:
        raise InputError("Repetitions must be nonnegative")
    word = lasso.word(repetitions)
    for event in word:
        if not des.alphabet.is_observable(event):
            raise InputError(f"Witness contains non-observable symbol {event!r}")
    current = initial_estimate(des)
    trace = [current]
    for event in word:
        current = step(des, current, event)
        trace.append(current)
    return trace
