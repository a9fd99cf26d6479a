from models import build_des
from observer import build_observer
from utils.dot import des_dot, estimate_graph_dot, render


def test_des_dot_styles_unobservable_and_marked():
    des = build_des(
        ["p", "q"], ["a", "u"], [("p", "u", "q"), ("q", "a", "q")], ["p"], observable=["a"], marked=["q"]
    )
    text = render(des_dot(des))
    assert text.startswith("digraph {\n")
    assert '"q" [shape=doublecircle];' in text
    assert '"p" [shape=circle];' in text
    assert '__start0 -> "p";' in text
    assert '"p" -> "q" [label="u" style=dashed];' in text
    assert '"q" -> "q" [label="a"];' in text


def test_observer_dot_without_spec_has_no_double_circles(ex1):
    text = render(estimate_graph_dot(build_observer(ex1)))
    assert "doublecircle" not in text
    assert '"{1,2,3}" -> "{2}" [label="b"];' in text


def test_quotes_are_escaped():
    des = build_des(['say"hi'], ["a"], [('say"hi', "a", 'say"hi')], ['say"hi'])
    assert r'"say\"hi"' in render(des_dot(des))
