import pytest

from automata import detectability_spec
from checks import strong_d, strong_periodic_d
from detector import build_detector, check_strong_d_via_detector, check_strong_detectability
from generators import gen_from_dag, gen_random_des, make_dag
from models import Spec, build_des


def fs(*states):
    return frozenset(states)


def test_ex1_detector_matches_hand_construction(ex1):
    det = build_detector(ex1)
    assert det.initial == fs("1", "2", "3")
    assert len(det) == 6
    expected = {
        (fs("1", "2", "3"), "a", fs("1", "2")),
        (fs("1", "2", "3"), "a", fs("1", "3")),
        (fs("1", "2", "3"), "a", fs("2", "3")),
        (fs("1", "2", "3"), "b", fs("2")),
        (fs("1", "2"), "a", fs("1", "3")),
        (fs("1", "3"), "a", fs("1", "2")),
        (fs("2", "3"), "a", fs("2", "3")),
        (fs("1", "2"), "b", fs("2")),
        (fs("1", "3"), "b", fs("2")),
        (fs("2"), "a", fs("3")),
        (fs("3"), "a", fs("2")),
    }
    assert det.transitions == expected


def test_single_state_detector():
    des = build_des(["q"], ["a"], [("q", "a", "q")], ["q"])
    det = build_detector(des)
    assert det.states == [fs("q")]
    assert det.transitions == {(fs("q"), "a", fs("q"))}


def test_large_successor_splits_into_all_pairs():
    des = build_des(
        ["0", "1", "2", "3"],
        ["a"],
        [("0", "a", "1"), ("0", "a", "2"), ("0", "a", "3"), ("1", "a", "1"), ("2", "a", "2"), ("3", "a", "3")],
        ["0"],
    )
    targets = {target for source, _, target in build_detector(des).edges() if source == fs("0")}
    assert targets == {fs("1", "2"), fs("1", "3"), fs("2", "3")}


def test_ex1_strong_d_via_detector_fails_at_13(ex1, ex1_spec):
    verdict = check_strong_d_via_detector(ex1, ex1_spec)
    assert not verdict.holds
    assert verdict.engine == "detector"
    assert verdict.notes == ["x={1,3}", "y={1,3}"]
    assert verdict.witness.stem == ("a",)
    assert verdict.witness.cycle == ("a", "a")


def test_ex1_empty_spec_holds(ex1):
    verdict = check_strong_d_via_detector(ex1, Spec())
    assert verdict.holds
    assert verdict.bound_n == 6


def test_dag_instance_with_unreachable_target_holds():
    instance = gen_from_dag(make_dag(["s", "m", "t"], [("m", "t")], "s", "t"))
    assert check_strong_d_via_detector(instance.des, instance.spec).holds


def test_ex1_strong_detectability_fails(ex1):
    assert not check_strong_detectability(ex1).holds
    assert not check_strong_detectability(ex1, periodic=True).holds


def test_single_state_is_strongly_detectable():
    des = build_des(["q"], ["a"], [("q", "a", "q")], ["q"])
    assert check_strong_detectability(des).holds
    assert check_strong_detectability(des, periodic=True).holds


def test_twin_self_loops_are_never_told_apart():
    des = build_des(["p", "q"], ["a"], [("p", "a", "p"), ("q", "a", "q")], ["p", "q"])
    verdict = check_strong_detectability(des)
    assert not verdict.holds
    assert verdict.witness.cycle == ("a",)
    assert not check_strong_detectability(des, periodic=True).holds


@pytest.mark.parametrize("seed", range(1000))
def test_detector_agrees_with_observer(seed):
    des = gen_random_des(seed, 2 + seed % 5, 1 + seed % 3, observable_fraction=0.6, density=0.3)
    states = des.states
    pairs = {(states[i], states[(i * 7 + seed) % len(states)]) for i in range(0, len(states), 2)}
    spec = Spec(pairs=frozenset(pairs))
    n = len(des.states)
    det = build_detector(des)
    assert len(det) <= 1 + n + n * (n - 1) // 2
    assert check_strong_d_via_detector(des, spec).holds == strong_d(des, spec).holds
    plain = detectability_spec(des)
    assert check_strong_detectability(des).holds == strong_d(des, plain).holds


def test_periodic_mode_accepts_cycles_through_a_singleton():
    des = build_des(
        ["s", "t", "u"],
        ["a", "b"],
        [("s", "a", "t"), ("s", "a", "u"), ("t", "b", "s"), ("u", "b", "s")],
        ["s"],
    )
    assert not check_strong_detectability(des).holds
    verdict = check_strong_detectability(des, periodic=True)
    assert verdict.holds
    assert verdict.bound_n == 8
    assert strong_periodic_d(des, detectability_spec(des)).holds


@pytest.mark.parametrize("seed", range(300))
def test_periodic_detector_agrees_with_observer(seed):
    des = gen_random_des(seed, 2 + seed % 5, 1 + seed % 3, observable_fraction=0.6, density=0.3)
    detector_verdict = check_strong_detectability(des, periodic=True)
    observer_verdict = strong_periodic_d(des, detectability_spec(des))
    assert detector_verdict.holds == observer_verdict.holds
