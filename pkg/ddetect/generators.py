"""
Instance generators.

* gen_from_dag: unary instances whose strong D-detectability encodes DAG
  non-reachability
* gen_from_dfa_intersection: instances whose strong periodic D-detectability
  encodes emptiness of a DFA intersection
* gen_from_3cnf: unary instances whose strong periodic D-detectability encodes
  satisfiability of a formula
* gen_random_*: seeded random inputs for property tests
"""

import logging
import random
import re
from itertools import combinations, count
from typing import Dict, Iterable, List, Sequence, Set, Tuple

from pydantic import ValidationError

from models import Des, Spec, Transition, build_des
from oracles import BINARY, dfa_table
from schemas import Cnf3, Dag, GeneratedInstance, Literal
from utils.errors import InputError

logger = logging.getLogger(__name__)


def _fresh(name: str, taken: Set[str]) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _instance(des: Des, spec: Spec, **metadata: str) -> GeneratedInstance:
    spec.validate_against(des)
    logger.debug(
        f"Generated {metadata.get('reduction', 'instance')}: "
        f"{len(des.states)} states, {len(des.transitions)} transitions"
    )
    return GeneratedInstance(des=des, spec=spec, metadata=metadata)


def make_dag(
    vertices: Sequence[str], edges: Iterable[Tuple[str, str]], source: str, target: str
) -> Dag:
    try:
        return Dag(vertices=tuple(vertices), edges=tuple(edges), source=source, target=target)
    except ValidationError as e:
        raise InputError(f"Invalid DAG: {e.errors()[0]['msg']}")


def gen_from_dag(g: Dag) -> GeneratedInstance:
    """
    Single event a: every DAG edge not leaving t becomes an a-transition, every
    vertex but t also moves to a fresh sink x, and x and t carry a-self-loops.
    The result is always an rpoDES.
    The specification is {(t, x)}.
    """
    x = _fresh("x", set(g.vertices))
    transitions: Set[Transition] = {(p, "a", r) for p, r in g.edges if p != g.target}
    transitions.update((p, "a", x) for p in g.vertices if p != g.target)
    transitions.update({(x, "a", x), (g.target, "a", g.target)})
    des = build_des(g.vertices + (x,), ("a",), transitions, [g.source])
    return _instance(
        des,
        Spec(pairs=frozenset({(g.target, x)})),
        reduction="dag",
        vertices=str(len(g.vertices)),
        edges=" ".join(f"{p}>{r}" for p, r in g.edges),
        source=g.source,
        target=g.target,
    )


def _disjoint_names(dfas: Sequence[Des]) -> List[Dict[str, str]]:
    names = [dfa.states for dfa in dfas]
    flat = [state for group in names for state in group]
    if len(set(flat)) == len(flat):
        return [{state: state for state in group} for group in names]
    return [{state: f"{i}_{state}" for state in group} for i, group in enumerate(names, 1)]


def gen_from_dfa_intersection(dfas: Sequence[Des], encode_binary: bool = False) -> GeneratedInstance:
    """
    Nondeterministic union of total DFAs over {0,1} with a new event a leading
    rejecting states to q- and accepting states of the i-th DFA to qi+.
    q- loops on every event and qi+ cycles to q(i+1)+ on every event.

    With encode_binary every DFA transition on 0 becomes b then a and every
    transition on 1 becomes b then b through a new intermediate state, giving
    the alphabet {a, b}.
    """
    if not dfas:
        raise InputError("At least one DFA is required")
    tables = [dfa_table(dfa) for dfa in dfas]
    renames = _disjoint_names(dfas)
    taken = {name for rename in renames for name in rename.values()}
    sink = _fresh("q-", taken)
    plus = [_fresh(f"q{i}+", taken) for i in range(1, len(dfas) + 1)]
    alphabet = ("a", "b") if encode_binary else BINARY + ("a",)

    states: List[str] = []
    transitions: Set[Transition] = set()
    for dfa, table, rename, target_plus in zip(dfas, tables, renames, plus):
        marked = dfa.marked_states
        for state in dfa.states:
            states.append(rename[state])
            after = target_plus if state in marked else sink
            transitions.add((rename[state], "a", after))
        for state in dfa.states:
            for symbol in BINARY:
                source, target = rename[state], rename[table[(state, symbol)]]
                if not encode_binary:
                    transitions.add((source, symbol, target))
                    continue
                middle = _fresh(f"{source}.{symbol}.{target}", taken)
                states.append(middle)
                transitions.add((source, "b", middle))
                transitions.add((middle, "a" if symbol == "0" else "b", target))

    states.append(sink)
    states.extend(plus)
    for event in alphabet:
        transitions.add((sink, event, sink))
        for i, state in enumerate(plus):
            transitions.add((state, event, plus[(i + 1) % len(plus)]))

    initial = [sink] + [renames[i][next(iter(dfa.initial))] for i, dfa in enumerate(dfas)]
    des = build_des(states, alphabet, transitions, initial)
    return _instance(
        des,
        Spec(pairs=frozenset({(sink, plus[0])})),
        reduction="intersection",
        dfas=str(len(dfas)),
        encoded=str(encode_binary).lower(),
    )


def first_primes(n: int) -> List[int]:
    primes: List[int] = []
    for candidate in count(2):
        if len(primes) == n:
            return primes
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)


def _lasso_component(prefix: str, tail: int, period: int) -> Tuple[List[str], Set[Transition], str, str]:
    """Unary automaton for 0^tail (0^period)^*: (states, transitions, initial, marked)."""
    path = [f"{prefix}.s{i}" for i in range(tail)]
    loop = [f"{prefix}.c{i}" for i in range(period)]
    chain = path + loop
    transitions = {(chain[i], "0", chain[i + 1]) for i in range(len(chain) - 1)}
    transitions.add((loop[-1], "0", loop[0]))
    return chain, transitions, chain[0], loop[0]


def _residue_offset(literals: Sequence[Literal], primes: Sequence[int]) -> Tuple[int, int]:
    """Smallest z with z = 0 (mod p) for positive and z = 1 (mod p) for negated literals."""
    modulus = 1
    for variable, _ in literals:
        modulus *= primes[variable]
    for z in range(modulus):
        if all(z % primes[v] == (0 if positive else 1) for v, positive in literals):
            return z, modulus
    raise InputError("Clause residues have no common solution")


def gen_from_3cnf(phi: Cnf3) -> GeneratedInstance:
    """
    Unary instance over the event 0. The number r of observed events encodes an
    assignment through its residues modulo the first n primes (0 false, 1 true).
    A0 accepts every r that encodes no assignment, and the automaton of each
    clause accepts exactly the r whose assignment falsifies that clause.
    Specification pairs join states of different automata when at least one
    of them is accepting.
    """
    for clause in phi.clauses:
        variables = [variable for variable, _ in clause]
        if len(set(variables)) != len(variables):
            raise InputError(f"Clause repeats a variable: {clause}")
    primes = first_primes(phi.variables)

    components: List[Tuple[List[str], str, Set[str]]] = []
    transitions: Set[Transition] = set()

    branches = [(p, j) for p in primes for j in range(2, p)]
    if branches:
        root = "A0.init"
        states, marked = [root], set()
        for p, j in branches:
            chain, edges, start, accepting = _lasso_component(f"A0.p{p}j{j}", j - 1, p)
            states.extend(chain)
            transitions |= edges
            transitions.add((root, "0", start))
            marked.add(accepting)
        components.append((states, root, marked))

    for k, clause in enumerate(phi.clauses, 1):
        z, modulus = _residue_offset(clause, primes)
        chain, edges, start, accepting = _lasso_component(f"A{k}", z, modulus)
        transitions |= edges
        components.append((chain, start, {accepting}))

    pairs = set()
    for (left, _, left_marked), (right, _, right_marked) in combinations(components, 2):
        pairs.update((p, q) for p in left_marked for q in right)
        pairs.update((p, q) for p in left for q in right_marked)

    des = build_des(
        [state for states, _, _ in components for state in states],
        ("0",),
        transitions,
        [start for _, start, _ in components],
        marked=[state for _, _, marked in components for state in marked],
    )
    return _instance(
        des,
        Spec(pairs=frozenset(pairs)),
        reduction="3cnf",
        formula=phi.render(),
        primes=",".join(map(str, primes)),
    )


_LITERAL = re.compile(r"^\s*([~!-]?)\s*([A-Za-z_][A-Za-z0-9_]*)\s*$")


def parse_formula(text: str) -> Tuple[Cnf3, List[str]]:
    """
    Parse "(x|y)&(~x|y)". Variables are numbered by first appearance; the
    names are returned alongside the formula.
    """
    names: List[str] = []
    clauses = []
    for raw in text.split("&"):
        body = raw.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        if not body.strip():
            raise InputError(f"Empty clause in formula {text!r}")
        clause = []
        for token in body.split("|"):
            match = _LITERAL.match(token)
            if not match:
                raise InputError(f"Malformed literal {token.strip()!r}")
            negated, name = match.groups()
            if name not in names:
                names.append(name)
            clause.append((names.index(name), not negated))
        clauses.append(tuple(clause))
    try:
        return Cnf3(variables=max(len(names), 1), clauses=tuple(clauses)), names
    except ValidationError as e:
        raise InputError(f"Invalid formula: {e.errors()[0]['msg']}")


def gen_random_des(
    seed: int,
    state_count: int,
    event_count: int,
    observable_fraction: float = 0.5,
    density: float = 0.3,
) -> Des:
    """
    Random DES passing validate_assumptions: unobservable edges that do not go
    forward in a random state ranking are dropped, and every deadlocked state
    gets a self-loop on an observable event.
    """
    if state_count < 1 or event_count < 1:
        raise InputError("State and event counts must be positive")
    if not 0 <= observable_fraction <= 1 or not 0 <= density <= 1:
        raise InputError("Fractions must lie in [0, 1]")
    rng = random.Random(seed)
    states = [f"q{i}" for i in range(state_count)]
    events = [f"e{i}" for i in range(event_count)]
    observable = [e for e in events if rng.random() < observable_fraction]
    if not observable:
        observable = [events[0]]
    rank = {state: position for position, state in enumerate(rng.sample(states, len(states)))}

    transitions: Set[Transition] = set()
    for source in states:
        for event in events:
            for target in states:
                if rng.random() >= density:
                    continue
                if event not in observable and rank[target] <= rank[source]:
                    continue
                transitions.add((source, event, target))

    busy = {source for source, _, _ in transitions}
    for state in states:
        if state not in busy:
            transitions.add((state, rng.choice(observable), state))

    initial = [s for s in states if rng.random() < 0.3] or [states[0]]
    return build_des(states, events, transitions, initial, observable=observable)


def gen_random_rpodes(seed: int, state_count: int, event_count: int, density: float = 0.4) -> Des:
    """
    Random fully observable rpoDES: edges only go forward in state order, a
    self-loop on an event excludes leaving on that event, and sinks loop.
    """
    if state_count < 1 or event_count < 1:
        raise InputError("State and event counts must be positive")
    rng = random.Random(seed)
    states = [f"q{i}" for i in range(state_count)]
    events = [f"e{i}" for i in range(event_count)]

    transitions: Set[Transition] = set()
    for position, source in enumerate(states):
        later = states[position + 1:]
        for event in events:
            if rng.random() >= density:
                continue
            if not later or rng.random() < 0.3:
                transitions.add((source, event, source))
                continue
            for target in rng.sample(later, rng.randint(1, min(2, len(later)))):
                transitions.add((source, event, target))
        if not any(t[0] == source for t in transitions):
            transitions.add((source, rng.choice(events), source))

    initial = [s for s in states if rng.random() < 0.3] or [states[0]]
    return build_des(states, events, transitions, initial)


def gen_random_dfa(seed: int, state_count: int, prefix: str = "d") -> Des:
    """Random total DFA over {0,1} with a random accepting set."""
    if state_count < 1:
        raise InputError("A DFA needs at least one state")
    rng = random.Random(seed)
    states = [f"{prefix}{i}" for i in range(state_count)]
    transitions = {(state, symbol, rng.choice(states)) for state in states for symbol in BINARY}
    marked = [state for state in states if rng.random() < 0.5]
    return build_des(states, BINARY, transitions, [states[0]], marked=marked)


def gen_random_cnf(seed: int, variables: int, clauses: int) -> Cnf3:
    if variables < 1 or clauses < 1:
        raise InputError("Variable and clause counts must be positive")
    rng = random.Random(seed)
    result = []
    for _ in range(clauses):
        width = rng.randint(1, min(3, variables))
        chosen = rng.sample(range(variables), width)
        result.append(tuple((v, rng.random() < 0.5) for v in chosen))
    return Cnf3(variables=variables, clauses=tuple(result))


def random_dag(seed: int, vertex_count: int, density: float = 0.4) -> Dag:
    """Random DAG over v0..v(n-1) with edges following index order, s = v0, t = last vertex."""
    if vertex_count < 2:
        raise InputError("A DAG instance needs at least two vertices")
    rng = random.Random(seed)
    vertices = tuple(f"v{i}" for i in range(vertex_count))
    edges = tuple(
        (vertices[i], vertices[j])
        for i, j in combinations(range(vertex_count), 2)
        if rng.random() < density
    )
    return Dag(vertices=vertices, edges=edges, source=vertices[0], target=vertices[-1])
