"""
Lazy subset-construction observer and the graph machinery shared by the
deciders: condensation (SccView) and shortest-word search.
"""

import logging
from collections import deque
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Set, Tuple

import networkx as nx

from automata import initial_estimate, step
from models import Des, Estimate
from utils.config import MAX_OBSERVER_STATES
from utils.errors import BudgetExceeded, InputError, InvariantViolation

logger = logging.getLogger(__name__)

Edge = Tuple[str, Hashable]
OutEdges = Callable[[Hashable], List[Edge]]
Word = Tuple[str, ...]


class Observer:
    """Deterministic automaton over observable events whose states are estimates."""

    def __init__(self, des: Des):
        self.source = des
        self.initial: Estimate = initial_estimate(des)
        self.states: List[Estimate] = [self.initial]
        self.transitions: Dict[Tuple[Estimate, str], Estimate] = {}
        self._known: Set[Estimate] = {self.initial}
        self._expanded: Set[Estimate] = set()
        self._frontier = deque([self.initial])

    def __len__(self) -> int:
        return len(self.states)

    @property
    def fully_expanded(self) -> bool:
        return not self._frontier

    def _register(self, state: Estimate) -> None:
        if state not in self._known:
            self._known.add(state)
            self.states.append(state)
            self._frontier.append(state)

    def step(self, state: Estimate, event: str) -> Optional[Estimate]:
        if state not in self._known:
            raise InputError(f"Estimate {self.label(state)} has not been discovered")
        if not self.source.alphabet.is_observable(event):
            raise InputError(f"Event {event!r} is not observable")
        key = (state, event)
        if key in self.transitions:
            return self.transitions[key]
        if state in self._expanded:
            return None
        target = step(self.source, state, event)
        if not target:
            return None
        self.transitions[key] = target
        self._register(target)
        return target

    def _expand(self, state: Estimate) -> None:
        for event in self.source.alphabet.observable_events:
            self.step(state, event)
        self._expanded.add(state)

    def expand_all(self, state_budget: int = MAX_OBSERVER_STATES) -> "Observer":
        if state_budget < 1:
            raise InputError("The observer state budget must be at least 1")
        while self._frontier:
            state = self._frontier.popleft()
            if state in self._expanded:
                continue
            self._expand(state)
            if len(self.states) > state_budget:
                logger.warning(f"Observer expansion stopped at {len(self.states)} states")
                raise BudgetExceeded("observer state", state_budget)
        self._check_invariants()
        logger.debug(f"Observer fully expanded: {len(self.states)} states")
        return self

    def _check_invariants(self) -> None:
        reached = {self.initial}
        queue = deque([self.initial])
        while queue:
            state = queue.popleft()
            for _, target in self.out_edges(state):
                if target not in reached:
                    reached.add(target)
                    queue.append(target)
        if reached != self._known:
            raise InvariantViolation("Observer contains unreachable estimates")

    def out_edges(self, state: Estimate) -> List[Edge]:
        """Outgoing transitions of an estimate in event order."""
        return [
            (event, self.transitions[(state, event)])
            for event in self.source.alphabet.observable_events
            if (state, event) in self.transitions
        ]

    def edges(self) -> Iterable[Tuple[Estimate, str, Estimate]]:
        for state in self.states:
            for event, target in self.out_edges(state):
                yield state, event, target

    def dead_states(self) -> List[Estimate]:
        return [state for state in self.states if not self.out_edges(state)]

    def label(self, state: Estimate) -> str:
        return "{" + ",".join(self.source.canonical(state)) + "}"

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.states)
        graph.add_edges_from((source, target) for source, _, target in self.edges())
        return graph


def observer_step(obs: Observer, state: Estimate, event: str) -> Optional[Estimate]:
    return obs.step(state, event)


def expand_all(obs: Observer, state_budget: int = MAX_OBSERVER_STATES) -> Observer:
    return obs.expand_all(state_budget)


def build_observer(des: Des, state_budget: int = MAX_OBSERVER_STATES) -> Observer:
    return Observer(des).expand_all(state_budget)


class SccView:
    """Condensation of a finite graph with a per-component "contains a cycle" flag."""

    def __init__(self, graph: nx.DiGraph):
        self.graph = graph
        self.dag = nx.condensation(graph)
        self.component: Dict[Hashable, int] = self.dag.graph["mapping"]
        self.cyclic: Dict[int, bool] = {}
        for cid, data in self.dag.nodes(data=True):
            members = data["members"]
            self.cyclic[cid] = len(members) > 1 or any(
                graph.has_edge(node, node) for node in members
            )

    def members(self, cid: int) -> Set[Hashable]:
        return set(self.dag.nodes[cid]["members"])

    def on_cycle(self, node: Hashable) -> bool:
        return self.cyclic[self.component[node]]

    def cyclic_nodes(self) -> Set[Hashable]:
        return {node for node, cid in self.component.items() if self.cyclic[cid]}


def scc_view(obs: Observer) -> SccView:
    if not obs.fully_expanded:
        raise InputError("scc_view requires a fully expanded observer")
    return SccView(obs.graph())


def cyclic_nodes_within(graph: nx.DiGraph, allowed: Iterable[Hashable]) -> Set[Hashable]:
    """Nodes lying on a cycle of the subgraph induced by `allowed`."""
    return SccView(graph.subgraph(allowed).copy()).cyclic_nodes()


def backward_closure(graph: nx.DiGraph, seeds: Iterable[Hashable]) -> Set[Hashable]:
    """All nodes from which some seed is reachable (seeds included)."""
    reached = set(seeds)
    queue = deque(reached)
    while queue:
        node = queue.popleft()
        for pred in graph.predecessors(node):
            if pred not in reached:
                reached.add(pred)
                queue.append(pred)
    return reached


def shortest_word(
    out_edges: OutEdges,
    source: Hashable,
    targets: Set[Hashable],
    allowed: Optional[Set[Hashable]] = None,
    nonempty: bool = False,
) -> Optional[Tuple[Word, Hashable]]:
    """
    Breadth-first search for the shortest, then lexicographically least, word
    leading from `source` to some target.

    Args:
        out_edges: Successor function returning (event, node) pairs in event order
        source: Start node
        targets: Acceptable end nodes
        allowed: When given, intermediate and end nodes must belong to it
        nonempty: Require at least one transition (used for cycles)

    Returns:
        (word, reached target) or None when no target is reachable
    """
    if not nonempty and source in targets:
        return (), source
    parent: Dict[Hashable, Optional[Tuple[Hashable, str]]] = {source: None}
    queue = deque([source])

    def rebuild(node: Hashable) -> Word:
        word: List[str] = []
        while parent[node] is not None:
            node, event = parent[node]
            word.append(event)
        return tuple(reversed(word))

    while queue:
        node = queue.popleft()
        for event, target in out_edges(node):
            if allowed is not None and target not in allowed:
                continue
            if target in targets:
                return rebuild(node) + (event,), target
            if target not in parent:
                parent[target] = (node, event)
                queue.append(target)
    return None
