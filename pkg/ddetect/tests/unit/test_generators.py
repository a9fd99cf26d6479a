from itertools import combinations, combinations_with_replacement, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from automata import estimate, validate_assumptions
from checks import STRONG_D, strong_d, strong_periodic_d
from generators import (
    first_primes,
    gen_from_3cnf,
    gen_from_dag,
    gen_from_dfa_intersection,
    gen_random_cnf,
    gen_random_des,
    gen_random_dfa,
    make_dag,
    parse_formula,
    random_dag,
)
from models import build_des
from oracles import dag_reachable, dfa_intersection_empty, sat_bruteforce
from rpodes import is_rpodes
from schemas import Cnf3
from unary import check_unary, check_unary_strong_periodic_d
from utils.errors import InputError


def _dag_cases(size):
    vertices = [f"v{i}" for i in range(size)]
    candidate_edges = list(combinations(vertices, 2))
    for mask in range(2 ** len(candidate_edges)):
        edges = [edge for bit, edge in enumerate(candidate_edges) if mask >> bit & 1]
        yield vertices, edges


class TestDag:
    def test_direct_edge_is_reachable(self):
        g = make_dag(["s", "t"], [("s", "t")], "s", "t")
        instance = gen_from_dag(g)
        assert dag_reachable(g)
        assert not strong_d(instance.des, instance.spec).holds
        assert instance.spec.pairs == {("t", "x")}
        assert instance.metadata["reduction"] == "dag"

    def test_sink_name_avoids_existing_vertices(self):
        g = make_dag(["x", "t"], [], "x", "t")
        instance = gen_from_dag(g)
        assert "x'" in instance.des.states
        assert instance.spec.pairs == {("t", "x'")}

    def test_invalid_dags_are_rejected(self):
        with pytest.raises(InputError):
            make_dag(["s", "t"], [("s", "t"), ("t", "s")], "s", "t")
        with pytest.raises(InputError):
            make_dag(["s"], [], "s", "s")
        with pytest.raises(InputError):
            make_dag(["s", "t"], [("s", "u")], "s", "t")

    @pytest.mark.parametrize("size", [2, 3, 4])
    def test_all_small_dags_over_all_endpoints(self, size):
        for vertices, edges in _dag_cases(size):
            for source in vertices:
                for target in vertices:
                    if source == target:
                        continue
                    g = make_dag(vertices, edges, source, target)
                    instance = gen_from_dag(g)
                    assert strong_d(instance.des, instance.spec).holds != dag_reachable(g)
                    assert is_rpodes(instance.des)

    def test_all_five_vertex_dags(self):
        for vertices, edges in _dag_cases(5):
            g = make_dag(vertices, edges, "v0", "v4")
            instance = gen_from_dag(g)
            verdict = check_unary(instance.des, instance.spec, STRONG_D)
            assert verdict.holds != dag_reachable(g)

    def test_random_dag_is_seeded(self):
        assert random_dag(3, 6) == random_dag(3, 6)
        assert random_dag(3, 6).source == "v0"
        assert random_dag(3, 6).target == "v5"
        with pytest.raises(InputError):
            random_dag(3, 1)


class TestDfaIntersection:
    def test_odd_and_even_lengths_never_meet(self, odd_dfa, even_dfa):
        assert dfa_intersection_empty([odd_dfa, even_dfa])
        instance = gen_from_dfa_intersection([odd_dfa, even_dfa])
        assert instance.des.alphabet.events == ("0", "1", "a")
        assert strong_periodic_d(instance.des, instance.spec).holds

    def test_language_meets_itself(self, odd_dfa):
        assert not dfa_intersection_empty([odd_dfa, odd_dfa])
        instance = gen_from_dfa_intersection([odd_dfa, odd_dfa])
        assert {"1_a", "2_a", "1_b", "2_b"} <= set(instance.des.states)
        assert not strong_periodic_d(instance.des, instance.spec).holds

    def test_encoding_uses_two_events(self, odd_even_encoded):
        des = odd_even_encoded.des
        assert des.alphabet.events == ("a", "b")
        assert "a.0.b" in des.states
        assert {"q-", "q1+", "q2+"} <= set(des.states)
        assert odd_even_encoded.spec.pairs == {("q-", "q1+")}
        assert odd_even_encoded.metadata["encoded"] == "true"

    def test_non_total_dfa_is_rejected(self):
        partial = build_des(["p"], ["0", "1"], [("p", "0", "p")], ["p"])
        with pytest.raises(InputError):
            gen_from_dfa_intersection([partial])
        with pytest.raises(InputError):
            gen_from_dfa_intersection([])

    @pytest.mark.parametrize("seed", range(250))
    @pytest.mark.parametrize("encode", [False, True])
    def test_random_intersections_match_the_product_search(self, seed, encode):
        dfas = [gen_random_dfa(seed * 7 + i, 1 + (seed + i) % 4, prefix=f"d{i}_") for i in range(2 + seed % 2)]
        instance = gen_from_dfa_intersection(dfas, encode_binary=encode)
        assert validate_assumptions(instance.des).ok
        verdict = strong_periodic_d(instance.des, instance.spec)
        assert verdict.holds == dfa_intersection_empty(dfas)


def _falsifies(r, clause, primes):
    return all(r % primes[variable] == (0 if positive else 1) for variable, positive in clause)


def _all_clauses(variables):
    for width in range(1, min(3, variables) + 1):
        for chosen in combinations(range(variables), width):
            for signs in product((True, False), repeat=width):
                yield tuple(zip(chosen, signs))


def _all_formulas(variables, max_clauses):
    """Every clause multiset of up to max_clauses clauses that mentions the last variable."""
    clauses = list(_all_clauses(variables))
    for count in range(1, max_clauses + 1):
        for chosen in combinations_with_replacement(clauses, count):
            if any(v == variables - 1 for clause in chosen for v, _ in clause):
                yield Cnf3(variables=variables, clauses=chosen)


class TestCnf:
    def test_first_primes(self):
        assert first_primes(0) == []
        assert first_primes(5) == [2, 3, 5, 7, 11]

    def test_satisfiable_formula_instance(self, phi1, phi1_instance):
        assert len(phi1_instance.des.states) == 20
        assert phi1_instance.des.alphabet.events == ("0",)
        assert phi1_instance.metadata["primes"] == "2,3"
        assert phi1_instance.metadata["formula"] == phi1.render()
        assert sat_bruteforce(phi1)

    def test_unsatisfiable_formula_has_no_free_position(self, phi2):
        instance = gen_from_3cnf(phi2)
        assert not sat_bruteforce(phi2)
        assert not check_unary_strong_periodic_d(instance.des, instance.spec).holds

    def test_single_variable_formula_skips_the_residue_guard(self):
        instance = gen_from_3cnf(parse_formula("(x)")[0])
        assert not any(state.startswith("A0") for state in instance.des.states)
        assert instance.spec.pairs == frozenset()

    def test_repeated_variable_is_rejected(self):
        with pytest.raises(InputError):
            gen_from_3cnf(Cnf3(variables=1, clauses=(((0, True), (0, False)),)))

    def test_components_accept_the_intended_step_counts(self, phi1_instance, phi1):
        primes = [2, 3]
        for r in range(37):
            current = estimate(phi1_instance.des, "0" * r)
            for k, clause in enumerate(phi1.clauses, 1):
                assert (f"A{k}.c0" in current) == _falsifies(r, clause, primes)
            guard = any(state.startswith("A0") and state.endswith(".c0") for state in current)
            assert guard == any(r % p >= 2 for p in primes)

    @pytest.mark.parametrize("variables", [1, 2, 3])
    def test_all_small_formulas_match_brute_force(self, variables):
        for phi in _all_formulas(variables, max_clauses=3):
            instance = gen_from_3cnf(phi)
            verdict = check_unary_strong_periodic_d(instance.des, instance.spec)
            assert verdict.holds == sat_bruteforce(phi), phi.render()

    @pytest.mark.parametrize("seed", range(40))
    def test_unary_engine_matches_general_checker(self, seed):
        phi = gen_random_cnf(seed, 1 + seed % 3, 1 + (seed // 3) % 3)
        instance = gen_from_3cnf(phi)
        fast = check_unary_strong_periodic_d(instance.des, instance.spec)
        assert fast.holds == strong_periodic_d(instance.des, instance.spec).holds

    @given(seed=st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=40, deadline=None)
    def test_random_formulas_match_brute_force(self, seed):
        phi = gen_random_cnf(seed, 3, 4)
        instance = gen_from_3cnf(phi)
        assert check_unary_strong_periodic_d(instance.des, instance.spec).holds == sat_bruteforce(phi)

    @pytest.mark.parametrize("seed", range(200))
    def test_five_variable_formulas_match_brute_force(self, seed):
        phi = gen_random_cnf(1000 + seed, 5, 4 + seed % 5)
        instance = gen_from_3cnf(phi)
        verdict = check_unary_strong_periodic_d(instance.des, instance.spec)
        assert verdict.holds == sat_bruteforce(phi)


class TestParseFormula:
    def test_negation_markers(self):
        phi, names = parse_formula("(a | !b | -c) & (~b)")
        assert names == ["a", "b", "c"]
        assert phi.variables == 3
        assert phi.clauses == (((0, True), (1, False), (2, False)), ((1, False),))
        assert phi.render(names) == "(a|~b|~c)&(~b)"

    @pytest.mark.parametrize("text", ["()", "(x|1y)", "(a|b|c|d)", "(x)&"])
    def test_malformed_formulas(self, text):
        with pytest.raises(InputError):
            parse_formula(text)


class TestRandomDes:
    def test_seeded_generation_is_deterministic(self):
        assert gen_random_des(7, 5, 3) == gen_random_des(7, 5, 3)

    def test_smallest_instance_is_a_single_self_loop(self):
        des = gen_random_des(0, 1, 1, observable_fraction=1.0, density=1.0)
        assert des.states == ("q0",)
        assert des.transitions == {("q0", "e0", "q0")}

    @pytest.mark.parametrize("seed", range(100))
    def test_assumptions_hold(self, seed):
        des = gen_random_des(seed, 1 + seed % 7, 1 + seed % 4, observable_fraction=0.4, density=0.35)
        assert validate_assumptions(des).ok
        assert des.alphabet.observable

    def test_invalid_parameters(self):
        with pytest.raises(InputError):
            gen_random_des(0, 0, 1)
        with pytest.raises(InputError):
            gen_random_des(0, 1, 1, observable_fraction=1.5)
        with pytest.raises(InputError):
            gen_random_dfa(0, 0)
        with pytest.raises(InputError):
            gen_random_cnf(0, 0, 1)


class TestOracles:
    def test_sat_bruteforce(self, phi1, phi2):
        assert sat_bruteforce(phi1)
        assert not sat_bruteforce(phi2)

    def test_dag_reachable_is_transitive(self):
        g = make_dag(["s", "m", "t"], [("s", "m"), ("m", "t")], "s", "t")
        assert dag_reachable(g)
        assert not dag_reachable(make_dag(["s", "m", "t"], [("m", "t")], "s", "t"))

    def test_random_dfa_is_total(self):
        dfa = gen_random_dfa(4, 3)
        assert all(len(dfa.successors(state, symbol)) == 1 for state in dfa.states for symbol in "01")
