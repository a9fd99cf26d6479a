from typing import Callable, Hashable, Iterable, Iterator, Optional, Set, Tuple

from automata import is_violating
from models import Des, Spec


def _gvquote(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def _digraph(
    states: Iterable[Hashable],
    initial: Iterable[Hashable],
    edges: Iterable[Tuple[Hashable, str, Hashable]],
    label: Callable[[Hashable], str],
    double: Set[Hashable],
    dashed: Optional[Set[str]] = None,
) -> Iterator[str]:
    dashed = dashed or set()
    yield "digraph {\n"
    yield "  rankdir=LR;\n"
    for state in states:
        shape = "doublecircle" if state in double else "circle"
        yield f"  {_gvquote(label(state))} [shape={shape}];\n"
    for n, state in enumerate(initial):
        yield f"  __start{n} [shape=point];\n"
        yield f"  __start{n} -> {_gvquote(label(state))};\n"
    for source, event, target in edges:
        style = " style=dashed" if event in dashed else ""
        yield f"  {_gvquote(label(source))} -> {_gvquote(label(target))} [label={_gvquote(event)}{style}];\n"
    yield "}\n"


def des_dot(des: Des) -> Iterator[str]:
    """Marked states are drawn as double circles, unobservable events dashed."""
    marked = set(des.marked) if des.marked is not None else set()
    return _digraph(
        des.states,
        des.canonical(des.initial),
        des.sorted_transitions(),
        str,
        marked,
        set(des.alphabet.unobservable),
    )


def estimate_graph_dot(automaton, spec: Optional[Spec] = None) -> Iterator[str]:
    """
    DOT for an observer or detector. Estimates violating the specification
    are drawn as double circles.
    """
    violating = set()
    if spec is not None:
        violating = {state for state in automaton.states if is_violating(state, spec)}
    return _digraph(
        automaton.states,
        [automaton.initial],
        automaton.edges(),
        automaton.label,
        violating,
    )


def render(lines: Iterable[str]) -> str:
    return "".join(lines)
