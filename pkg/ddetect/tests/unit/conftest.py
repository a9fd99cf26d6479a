from pathlib import Path

import pytest

import desf
from generators import gen_from_3cnf, gen_from_dfa_intersection, parse_formula
from models import Spec, build_des


@pytest.fixture
def ex1():
    """Three states, a self-loop on 1, b from 1 to 2, and a 2-cycle 2 <-> 3 on a."""
    return build_des(
        ["1", "2", "3"],
        ["a", "b"],
        [("1", "a", "1"), ("1", "b", "2"), ("2", "a", "3"), ("3", "a", "2")],
        ["1", "2", "3"],
    )


@pytest.fixture
def ex1_spec():
    return Spec(pairs=frozenset({("1", "3")}))


@pytest.fixture
def odd_dfa():
    # accepts binary strings of odd length
    return build_des(
        ["a", "b"],
        ["0", "1"],
        [("a", "0", "b"), ("a", "1", "b"), ("b", "0", "a"), ("b", "1", "a")],
        ["a"],
        marked=["b"],
    )


@pytest.fixture
def even_dfa():
    # accepts binary strings of even length
    return build_des(
        ["c", "d"],
        ["0", "1"],
        [("d", "0", "c"), ("d", "1", "c"), ("c", "0", "d"), ("c", "1", "d")],
        ["d"],
        marked=["d"],
    )


@pytest.fixture
def odd_even_encoded(odd_dfa, even_dfa):
    return gen_from_dfa_intersection([odd_dfa, even_dfa], encode_binary=True)


@pytest.fixture
def phi1():
    return parse_formula("(x|y)&(~x|y)")[0]


@pytest.fixture
def phi2():
    return parse_formula("(x)&(~x)")[0]


@pytest.fixture
def phi1_instance(phi1):
    return gen_from_3cnf(phi1)


@pytest.fixture
def u1():
    return build_des(["1", "2"], ["a"], [("1", "a", "2"), ("2", "a", "1")], ["1"])


@pytest.fixture
def loop_chain():
    """x loops on a, moves to y on b, y moves to z on a, z loops on a."""
    return build_des(
        ["x", "y", "z"],
        ["a", "b"],
        [("x", "a", "x"), ("x", "b", "y"), ("y", "a", "z"), ("z", "a", "z")],
        ["x"],
    )


@pytest.fixture
def write_desf(tmp_path):
    def write(name, des, spec=None) -> str:
        path = Path(tmp_path) / name
        path.write_text(desf.serialize(des, spec), encoding="utf-8")
        return str(path)

    return write
