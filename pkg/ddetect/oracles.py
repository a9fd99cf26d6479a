"""Brute-force ground truth for the reduction generators."""

import logging
from collections import deque
from itertools import product
from math import prod
from typing import Dict, List, Sequence, Tuple

import networkx as nx

from models import Des
from schemas import Cnf3, Dag
from utils.errors import BudgetExceeded, InputError

logger = logging.getLogger(__name__)

MAX_SAT_VARIABLES = 20
MAX_PRODUCT_STATES = 10**6

BINARY = ("0", "1")


def sat_bruteforce(phi: Cnf3) -> bool:
    if phi.variables > MAX_SAT_VARIABLES:
        raise BudgetExceeded("SAT variable", MAX_SAT_VARIABLES)
    for assignment in product((False, True), repeat=phi.variables):
        if all(
            any(assignment[variable] == positive for variable, positive in clause)
            for clause in phi.clauses
        ):
            return True
    return False


def dfa_table(dfa: Des) -> Dict[Tuple[str, str], str]:
    """Transition function of a total deterministic automaton over {0,1}."""
    if set(dfa.alphabet.events) != set(BINARY):
        raise InputError(f"DFA alphabet must be {{0,1}}, got {sorted(dfa.alphabet.events)}")
    if len(dfa.initial) != 1:
        raise InputError("A DFA must have exactly one initial state")
    table = {}
    for state in dfa.states:
        for symbol in BINARY:
            targets = dfa.successors(state, symbol)
            if len(targets) != 1:
                kind = "missing" if not targets else "nondeterministic"
                raise InputError(f"DFA transition on {symbol} from {state} is {kind}")
            table[(state, symbol)] = targets[0]
    return table


def dfa_intersection_empty(dfas: Sequence[Des]) -> bool:
    """True iff no binary word is accepted by every DFA (product-automaton search)."""
    if not dfas:
        raise InputError("At least one DFA is required")
    if prod(len(dfa.states) for dfa in dfas) > MAX_PRODUCT_STATES:
        raise BudgetExceeded("product state", MAX_PRODUCT_STATES)
    tables = [dfa_table(dfa) for dfa in dfas]
    marked: List[frozenset] = [dfa.marked_states for dfa in dfas]

    start = tuple(next(iter(dfa.initial)) for dfa in dfas)
    seen = {start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        if all(state in accepting for state, accepting in zip(current, marked)):
            return False
        for symbol in BINARY:
            following = tuple(table[(state, symbol)] for state, table in zip(current, tables))
            if following not in seen:
                seen.add(following)
                queue.append(following)
    logger.debug(f"Product automaton exhausted after {len(seen)} states")
    return True


def dag_reachable(g: Dag) -> bool:
    graph = nx.DiGraph()
    graph.add_nodes_from(g.vertices)
    graph.add_edges_from(g.edges)
    return any(node == g.target for node in nx.dfs_preorder_nodes(graph, g.source))
