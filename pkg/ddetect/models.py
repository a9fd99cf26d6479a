from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

# A state estimate: the set of states the system may be in after an observation.
Estimate = FrozenSet[str]

Transition = Tuple[str, str, str]


class Alphabet(BaseModel):
    model_config = ConfigDict(frozen=True)

    events: Tuple[str, ...] = Field(..., description="Event identifiers in canonical order")
    observable: FrozenSet[str] = Field(..., description="Observable events (Sigma_o)")

    @model_validator(mode="after")
    def validate_events(self):
        if not self.events:
            raise ValueError("Alphabet must contain at least one event")
        if len(set(self.events)) != len(self.events):
            raise ValueError("Event identifiers must be unique")
        unknown = self.observable - set(self.events)
        if unknown:
            raise ValueError(f"Observable events not in alphabet: {sorted(unknown)}")
        return self

    @property
    def unobservable(self) -> FrozenSet[str]:
        return frozenset(self.events) - self.observable

    @property
    def observable_events(self) -> Tuple[str, ...]:
        """Observable events in canonical order."""
        return tuple(e for e in self.events if e in self.observable)

    def is_observable(self, event: str) -> bool:
        return event in self.observable


class Des(BaseModel):
    """A discrete event system: an NFA with a partially observed alphabet."""

    model_config = ConfigDict(frozen=True)

    states: Tuple[str, ...] = Field(..., description="State identifiers in canonical order")
    alphabet: Alphabet = Field(..., description="Event alphabet with observability partition")
    transitions: FrozenSet[Transition] = Field(
        ..., description="Transition triples (source, event, target)"
    )
    initial: FrozenSet[str] = Field(..., description="Nonempty set of initial states")
    marked: Optional[FrozenSet[str]] = Field(
        None, description="Marked states; None means all states are marked"
    )

    _successors: Dict[Tuple[str, str], Tuple[str, ...]] = PrivateAttr(default_factory=dict)
    _order: Dict[str, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def validate_structure(self):
        if not self.states:
            raise ValueError("A DES must have at least one state")
        if len(set(self.states)) != len(self.states):
            raise ValueError("State identifiers must be unique")
        known = set(self.states)
        if not self.initial:
            raise ValueError("The initial state set must be nonempty")
        if not self.initial <= known:
            raise ValueError(f"Unknown initial states: {sorted(self.initial - known)}")
        if self.marked is not None and not self.marked <= known:
            raise ValueError(f"Unknown marked states: {sorted(self.marked - known)}")
        events = set(self.alphabet.events)
        for source, event, target in self.transitions:
            if source not in known or target not in known:
                raise ValueError(f"Transition ({source}, {event}, {target}) uses an unknown state")
            if event not in events:
                raise ValueError(f"Transition ({source}, {event}, {target}) uses an unknown event")
        return self

    def model_post_init(self, __context) -> None:
        self._order = {state: index for index, state in enumerate(self.states)}
        successors: Dict[Tuple[str, str], List[str]] = {}
        for source, event, target in self.transitions:
            successors.setdefault((source, event), []).append(target)
        self._successors = {
            key: tuple(sorted(targets, key=self._order.__getitem__))
            for key, targets in successors.items()
        }

    @property
    def marked_states(self) -> FrozenSet[str]:
        return self.marked if self.marked is not None else frozenset(self.states)

    def successors(self, state: str, event: str) -> Tuple[str, ...]:
        return self._successors.get((state, event), ())

    def index_of(self, state: str) -> int:
        return self._order[state]

    def canonical(self, states: Iterable[str]) -> List[str]:
        """Members of a state set in canonical (Des) order."""
        return sorted(states, key=self._order.__getitem__)

    def sorted_transitions(self) -> List[Transition]:
        event_order = {e: i for i, e in enumerate(self.alphabet.events)}
        return sorted(
            self.transitions,
            key=lambda t: (self._order[t[0]], event_order[t[1]], self._order[t[2]]),
        )

    def has_state(self, state: str) -> bool:
        return state in self._order


class Spec(BaseModel):
    """The specification T_spec: ordered pairs of states to be distinguished."""

    model_config = ConfigDict(frozen=True)

    pairs: FrozenSet[Tuple[str, str]] = Field(
        default_factory=frozenset, description="State pairs that must be distinguished"
    )

    def validate_against(self, des: Des) -> "Spec":
        for p, q in self.pairs:
            if not des.has_state(p) or not des.has_state(q):
                raise ValueError(f"Specification pair ({p}, {q}) uses an unknown state")
        return self


def build_des(
    states: Iterable[str],
    events: Iterable[str],
    transitions: Iterable[Transition],
    initial: Iterable[str],
    observable: Optional[Iterable[str]] = None,
    marked: Optional[Iterable[str]] = None,
) -> Des:
    """Convenience constructor; all events are observable unless `observable` is given."""
    events = tuple(events)
    return Des(
        states=tuple(states),
        alphabet=Alphabet(
            events=events,
            observable=frozenset(events if observable is None else observable),
        ),
        transitions=frozenset(transitions),
        initial=frozenset(initial),
        marked=None if marked is None else frozenset(marked),
    )
