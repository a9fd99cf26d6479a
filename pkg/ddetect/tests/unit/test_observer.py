import random

import networkx as nx
import pytest

from automata import estimate
from generators import gen_random_des
from models import build_des
from observer import (
    Observer,
    SccView,
    build_observer,
    expand_all,
    observer_step,
    scc_view,
    shortest_word,
)
from utils.errors import BudgetExceeded, InputError

S123 = frozenset({"1", "2", "3"})


def test_ex1_observer_matches_hand_construction(ex1):
    obs = build_observer(ex1)
    assert set(obs.states) == {S123, frozenset({"2"}), frozenset({"3"})}
    assert len(list(obs.edges())) == 4
    assert obs.initial == S123
    assert obs.dead_states() == []


def test_observer_step_is_lazy_and_memoized(ex1):
    obs = Observer(ex1)
    assert len(obs) == 1
    assert observer_step(obs, S123, "a") == S123
    assert observer_step(obs, S123, "b") == frozenset({"2"})
    assert observer_step(obs, frozenset({"2"}), "a") == frozenset({"3"})
    assert observer_step(obs, frozenset({"2"}), "b") is None
    assert not obs.fully_expanded
    expand_all(obs)
    assert obs.fully_expanded
    assert len(obs) == 3


def test_observer_step_rejects_unknown_inputs(ex1):
    obs = Observer(ex1)
    with pytest.raises(InputError):
        obs.step(frozenset({"2"}), "a")
    unobservable = build_des(["p"], ["a", "u"], [("p", "a", "p")], ["p"], observable=["a"])
    with pytest.raises(InputError):
        Observer(unobservable).step(frozenset({"p"}), "u")


def test_budget_is_enforced(ex1):
    with pytest.raises(BudgetExceeded) as excinfo:
        build_observer(ex1, state_budget=2)
    assert excinfo.value.exit_code == 3
    assert "observer state" in excinfo.value.detail


def test_encoded_intersection_observer_has_six_states(odd_even_encoded):
    obs = build_observer(odd_even_encoded.des)
    assert len(obs) == 6
    labels = {obs.label(state) for state in obs.states}
    assert "{q-,q1+}" in labels or "{q1+,q-}" in labels


def test_unary_formula_observer_is_a_lasso(phi1_instance):
    obs = build_observer(phi1_instance.des)
    assert len(obs) == 9
    assert all(len(obs.out_edges(state)) == 1 for state in obs.states)


def test_ex1_components(ex1):
    view = scc_view(build_observer(ex1))
    assert view.on_cycle(S123)
    assert view.on_cycle(frozenset({"2"}))
    assert view.component[frozenset({"2"})] == view.component[frozenset({"3"})]
    assert view.component[S123] != view.component[frozenset({"2"})]
    assert nx.is_directed_acyclic_graph(view.dag)


def test_chain_has_no_cyclic_component():
    graph = nx.DiGraph([(1, 2), (2, 3)])
    assert SccView(graph).cyclic_nodes() == set()


def test_encoded_intersection_components(odd_even_encoded):
    obs = build_observer(odd_even_encoded.des)
    view = scc_view(obs)
    sizes = sorted(len(view.members(cid)) for cid in view.dag.nodes if view.cyclic[cid])
    assert sizes == [2, 4]


def test_scc_view_requires_expansion(ex1):
    with pytest.raises(InputError):
        scc_view(Observer(ex1))


def test_shortest_word_prefers_lexicographic_order():
    edges = {0: [("a", 1), ("b", 2)], 1: [("b", 3)], 2: [("a", 3)], 3: []}
    assert shortest_word(edges.__getitem__, 0, {3}) == (("a", "b"), 3)
    assert shortest_word(edges.__getitem__, 0, {0}) == ((), 0)
    assert shortest_word(edges.__getitem__, 0, {0}, nonempty=True) is None
    assert shortest_word(edges.__getitem__, 0, {3}, allowed={2, 3}) == (("b", "a"), 3)


@pytest.mark.parametrize("seed", range(30))
def test_observer_language_matches_estimates(seed):
    des = gen_random_des(seed, 4, 3, observable_fraction=0.6, density=0.25)
    obs = build_observer(des)
    rng = random.Random(seed)
    observable = des.alphabet.observable_events
    for _ in range(20):
        word = [rng.choice(observable) for _ in range(rng.randint(0, 6))]
        state = obs.initial
        for event in word:
            state = obs.step(state, event) if state is not None else None
        expected = estimate(des, word)
        assert (state or frozenset()) == expected
    assert obs.dead_states() == []
