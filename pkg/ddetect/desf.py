"""
DESF: the line-oriented text format for a DES and its specification.

    desf 1
    # comment
    events: a:o b:o u:uo
    states: 1 2 3
    initial: 1
    marked: 3            (optional, default all states)
    trans: 1 a 2         (one per line)
    spec: 1 3            (zero or more)
"""

import logging
import re
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from models import Alphabet, Des, Spec
from utils.errors import DesfParseError, InputError

logger = logging.getLogger(__name__)

HEADER = "desf 1"
SINGLE_KEYS = ("events", "states", "initial", "marked")
REPEATED_KEYS = ("trans", "spec")
OBSERVABILITY = {"o": True, "uo": False}

_TOKEN = re.compile(r"\S+")
_IDENTIFIER = re.compile(r"^[^\s#]+$")

Token = Tuple[str, int]


class DesfDocument(BaseModel):
    model_config = ConfigDict(frozen=True)

    des: Des
    spec: Spec = Field(default_factory=Spec)
    comments: Tuple[str, ...] = Field(default_factory=tuple, description="Provenance comment lines")


def _tokens(text: str, offset: int) -> List[Token]:
    """Whitespace-separated tokens with their 1-based columns."""
    return [(m.group(), offset + m.start() + 1) for m in _TOKEN.finditer(text)]


def parse(text: str) -> DesfDocument:
    singles: Dict[str, Tuple[int, List[Token]]] = {}
    transitions: List[Tuple[int, List[Token]]] = []
    spec_lines: List[Tuple[int, List[Token]]] = []
    comments: List[str] = []
    header_seen = False
    last_line = 0

    for number, raw in enumerate(text.splitlines(), 1):
        last_line = number
        content, _, comment = raw.partition("#")
        if not content.strip():
            if comment.strip():
                comments.append(comment.strip())
            continue
        if not header_seen:
            if content.strip() != HEADER:
                raise DesfParseError(f"expected header {HEADER!r}", number)
            header_seen = True
            continue
        key, colon, rest = content.partition(":")
        key = key.strip()
        if not colon:
            raise DesfParseError("expected 'key: values'", number)
        if key not in SINGLE_KEYS + REPEATED_KEYS:
            raise DesfParseError(f"unknown key {key!r}", number)
        tokens = _tokens(rest, len(content) - len(rest))
        if key in SINGLE_KEYS:
            if key in singles:
                raise DesfParseError(f"duplicate {key!r} line", number)
            singles[key] = (number, tokens)
        elif key == "trans":
            if len(tokens) != 3:
                raise DesfParseError("expected 'trans: source event target'", number)
            transitions.append((number, tokens))
        else:
            if len(tokens) != 2:
                raise DesfParseError("expected 'spec: state state'", number)
            spec_lines.append((number, tokens))

    if not header_seen:
        raise DesfParseError(f"missing header {HEADER!r}", max(last_line, 1))
    for key in ("events", "states", "initial"):
        if key not in singles:
            raise DesfParseError(f"missing {key!r} line", max(last_line, 1))

    events, observable = _parse_events(*singles["events"])
    states = _unique(*singles["states"], kind="state")
    known_states = set(states)
    known_events = set(events)

    def check_state(line: int, token: Token) -> str:
        if token[0] not in known_states:
            raise DesfParseError(f"unknown state {token[0]!r}", line, token[1])
        return token[0]

    initial = [check_state(singles["initial"][0], t) for t in singles["initial"][1]]
    if not initial:
        raise DesfParseError("initial state set must be nonempty", singles["initial"][0])
    marked = None
    if "marked" in singles:
        marked = [check_state(singles["marked"][0], t) for t in singles["marked"][1]]

    triples = set()
    for line, (source, event, target) in transitions:
        if event[0] not in known_events:
            raise DesfParseError(f"unknown event {event[0]!r}", line, event[1])
        triple = (check_state(line, source), event[0], check_state(line, target))
        if triple in triples:
            logger.debug(f"Ignoring duplicate transition on line {line}")
        triples.add(triple)
    pairs = {(check_state(line, p), check_state(line, q)) for line, (p, q) in spec_lines}

    try:
        des = Des(
            states=tuple(states),
            alphabet=Alphabet(events=tuple(events), observable=frozenset(observable)),
            transitions=frozenset(triples),
            initial=frozenset(initial),
            marked=None if marked is None else frozenset(marked),
        )
    except ValidationError as e:
        raise DesfParseError(e.errors()[0]["msg"], last_line)
    return DesfDocument(des=des, spec=Spec(pairs=frozenset(pairs)), comments=tuple(comments))


def _unique(line: int, tokens: List[Token], kind: str) -> List[str]:
    seen = set()
    for name, column in tokens:
        if name in seen:
            raise DesfParseError(f"duplicate {kind} {name!r}", line, column)
        seen.add(name)
    if not tokens:
        raise DesfParseError(f"at least one {kind} is required", line)
    return [name for name, _ in tokens]


def _parse_events(line: int, tokens: List[Token]) -> Tuple[List[str], List[str]]:
    events, observable = [], []
    for token, column in tokens:
        name, sep, flag = token.rpartition(":")
        if not sep or not name or flag not in OBSERVABILITY:
            raise DesfParseError(f"expected 'name:o' or 'name:uo', got {token!r}", line, column)
        if name in events:
            raise DesfParseError(f"duplicate event {name!r}", line, column)
        events.append(name)
        if OBSERVABILITY[flag]:
            observable.append(name)
    if not events:
        raise DesfParseError("at least one event is required", line)
    return events, observable


def _check_identifier(name: str) -> str:
    if not _IDENTIFIER.match(name):
        raise InputError(f"Identifier {name!r} cannot be written to DESF")
    return name


def serialize(des: Des, spec: Optional[Spec] = None, comments: Tuple[str, ...] = ()) -> str:
    """Canonical DESF text: Des order for states, events and transitions."""
    lines = [HEADER]
    lines.extend(f"# {comment}" for comment in comments)
    events = " ".join(
        f"{_check_identifier(e)}:{'o' if des.alphabet.is_observable(e) else 'uo'}"
        for e in des.alphabet.events
    )
    lines.append(f"events: {events}")
    lines.append("states: " + " ".join(_check_identifier(s) for s in des.states))
    lines.append("initial: " + " ".join(des.canonical(des.initial)))
    if des.marked is not None:
        lines.append(("marked: " + " ".join(des.canonical(des.marked))).rstrip())
    lines.extend(f"trans: {p} {e} {q}" for p, e, q in des.sorted_transitions())
    if spec is not None:
        pairs = sorted(spec.pairs, key=lambda pair: (des.index_of(pair[0]), des.index_of(pair[1])))
        lines.extend(f"spec: {p} {q}" for p, q in pairs)
    return "\n".join(lines) + "\n"


def serialize_document(document: DesfDocument) -> str:
    return serialize(document.des, document.spec, document.comments)


def load(path: Union[str, Path]) -> DesfDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}")
    except UnicodeDecodeError as e:
        raise InputError(f"Cannot read {path}: not UTF-8 text (byte {e.start})")
    try:
        document = parse(text)
    except DesfParseError as e:
        raise DesfParseError(e.reason, e.line, e.column, source=str(path)) from None
    logger.debug(f"Loaded {path}: {len(document.des.states)} states")
    return document
