"""
Reference deciders for the four D-detectability variants.

Every decider expands the observer and inspects its graph:

* strong:          no violating estimate is reachable from an estimate on a cycle
* strong periodic: no cycle consists of violating estimates only
* weak:            some reachable cycle consists of free estimates only
* weak periodic:   some reachable cycle visits a free estimate
"""

import logging
from typing import Dict, Optional, Set

import networkx as nx

from automata import is_violating, validate_assumptions
from models import Des, Estimate, Spec
from observer import (
    Observer,
    SccView,
    backward_closure,
    build_observer,
    cyclic_nodes_within,
    scc_view,
    shortest_word,
)
from schemas import Lasso, Verdict
from utils.config import MAX_OBSERVER_STATES
from utils.errors import AssumptionError, InvariantViolation

logger = logging.getLogger(__name__)

STRONG_D = "strong-d"
STRONG_PERIODIC_D = "strong-periodic-d"
WEAK_D = "weak-d"
WEAK_PERIODIC_D = "weak-periodic-d"


def ensure_assumptions(des: Des, force: bool = False) -> None:
    """Refuse DESs violating the standing assumptions unless forced."""
    report = validate_assumptions(des)
    if report.ok:
        return
    if force:
        logger.warning(f"Checking despite violated assumptions: {report.describe()}")
        return
    raise AssumptionError(f"Standing assumptions violated ({report.describe()}); use --force")


class ObserverAnalysis:
    """Fully expanded observer of a DES together with its violating/free partition."""

    def __init__(self, des: Des, spec: Spec, state_budget: int = MAX_OBSERVER_STATES):
        self.des = des
        self.spec = spec
        self.observer: Observer = build_observer(des, state_budget)
        self.graph: nx.DiGraph = self.observer.graph()
        self.view: SccView = scc_view(self.observer)
        self.violating: Set[Estimate] = {
            state for state in self.observer.states if is_violating(state, spec)
        }
        self.free: Set[Estimate] = set(self.observer.states) - self.violating

    @property
    def size(self) -> int:
        return len(self.observer)

    def word_to(self, targets: Set[Estimate]):
        return shortest_word(self.observer.out_edges, self.observer.initial, targets)

    def cycle_at(self, state: Estimate, allowed: Optional[Set[Estimate]] = None):
        found = shortest_word(self.observer.out_edges, state, {state}, allowed, nonempty=True)
        if found is None:
            raise InvariantViolation(f"No cycle through {self.observer.label(state)}")
        return found[0]


def strong_d(des: Des, spec: Spec, state_budget: int = MAX_OBSERVER_STATES, force: bool = False) -> Verdict:
    ensure_assumptions(des, force)
    analysis = ObserverAnalysis(des, spec, state_budget)
    return strong_d_from(analysis)


def strong_d_from(analysis: ObserverAnalysis) -> Verdict:
    cyclic = analysis.view.cyclic_nodes()
    leads_to_violation = backward_closure(analysis.graph, analysis.violating)
    candidates = cyclic & leads_to_violation
    if not candidates:
        return Verdict(property_name=STRONG_D, holds=True, bound_n=analysis.size)

    # prefer a violating estimate that itself lies on a cycle
    hubs = candidates & analysis.violating or candidates
    stem, hub = analysis.word_to(hubs)
    cycle = analysis.cycle_at(hub)
    tail, target = shortest_word(analysis.observer.out_edges, hub, analysis.violating)
    logger.info(f"strong-d fails: {analysis.observer.label(target)} reachable from a cycle")
    return Verdict(
        property_name=STRONG_D,
        holds=False,
        witness=Lasso(stem=stem, cycle=cycle, tail=tail),
    )


def strong_periodic_d(
    des: Des, spec: Spec, state_budget: int = MAX_OBSERVER_STATES, force: bool = False
) -> Verdict:
    ensure_assumptions(des, force)
    analysis = ObserverAnalysis(des, spec, state_budget)
    return strong_periodic_d_from(analysis)


def strong_periodic_d_from(analysis: ObserverAnalysis) -> Verdict:
    looping = cyclic_nodes_within(analysis.graph, analysis.violating)
    if not looping:
        return Verdict(property_name=STRONG_PERIODIC_D, holds=True, bound_n=analysis.size + 1)

    stem, hub = analysis.word_to(looping)
    cycle = analysis.cycle_at(hub, analysis.violating)
    return Verdict(
        property_name=STRONG_PERIODIC_D,
        holds=False,
        witness=Lasso(stem=stem, cycle=cycle),
    )


def weak_d(des: Des, spec: Spec, state_budget: int = MAX_OBSERVER_STATES, force: bool = False) -> Verdict:
    ensure_assumptions(des, force)
    analysis = ObserverAnalysis(des, spec, state_budget)
    return weak_d_from(analysis)


def weak_d_from(analysis: ObserverAnalysis) -> Verdict:
    looping = cyclic_nodes_within(analysis.graph, analysis.free)
    if not looping:
        return Verdict(property_name=WEAK_D, holds=False)

    stem, hub = analysis.word_to(looping)
    cycle = analysis.cycle_at(hub, analysis.free)
    return Verdict(
        property_name=WEAK_D,
        holds=True,
        bound_n=len(stem),
        witness=Lasso(stem=stem, cycle=cycle),
    )


def weak_periodic_d(
    des: Des, spec: Spec, state_budget: int = MAX_OBSERVER_STATES, force: bool = False
) -> Verdict:
    ensure_assumptions(des, force)
    analysis = ObserverAnalysis(des, spec, state_budget)
    return weak_periodic_d_from(analysis)


def weak_periodic_d_from(analysis: ObserverAnalysis) -> Verdict:
    recurring_free = analysis.view.cyclic_nodes() & analysis.free
    if not recurring_free:
        return Verdict(property_name=WEAK_PERIODIC_D, holds=False)

    stem, hub = analysis.word_to(recurring_free)
    cycle = analysis.cycle_at(hub)
    return Verdict(
        property_name=WEAK_PERIODIC_D,
        holds=True,
        bound_n=len(stem) + len(cycle) + 1,
        witness=Lasso(stem=stem, cycle=cycle),
    )


def check_all(
    des: Des, spec: Spec, state_budget: int = MAX_OBSERVER_STATES, force: bool = False
) -> Dict[str, Verdict]:
    """All four verdicts from a single observer expansion."""
    ensure_assumptions(des, force)
    analysis = ObserverAnalysis(des, spec, state_budget)
    return {
        STRONG_D: strong_d_from(analysis),
        STRONG_PERIODIC_D: strong_periodic_d_from(analysis),
        WEAK_D: weak_d_from(analysis),
        WEAK_PERIODIC_D: weak_periodic_d_from(analysis),
    }
