from typing import Dict, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models import Des, Spec


class AssumptionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    deadlock_free: bool = Field(..., description="Every state has an outgoing transition")
    deadlocked_states: List[str] = Field(default_factory=list)
    no_unobservable_loop: bool = Field(
        ..., description="No cycle consists solely of unobservable events"
    )
    unobservable_cycle: Optional[List[str]] = Field(None, description="One offending cycle")

    @model_validator(mode="after")
    def validate_evidence(self):
        if self.deadlock_free == bool(self.deadlocked_states):
            raise ValueError("Deadlock evidence must be present exactly when deadlock_free is false")
        if self.no_unobservable_loop != (self.unobservable_cycle is None):
            raise ValueError("Cycle evidence must be present exactly when a loop exists")
        return self

    @property
    def ok(self) -> bool:
        return self.deadlock_free and self.no_unobservable_loop

    def describe(self) -> str:
        problems = []
        if not self.deadlock_free:
            problems.append(f"deadlocked states: {' '.join(self.deadlocked_states)}")
        if not self.no_unobservable_loop:
            problems.append(f"unobservable cycle: {' '.join(self.unobservable_cycle)}")
        return "; ".join(problems) if problems else "assumptions hold"


class Lasso(BaseModel):
    """A finite certificate for an infinite observation: stem, then cycle forever."""

    model_config = ConfigDict(frozen=True)

    stem: Tuple[str, ...] = Field(default_factory=tuple, description="Observed stem")
    cycle: Tuple[str, ...] = Field(..., min_length=1, description="Observed cycle")
    tail: Tuple[str, ...] = Field(
        default_factory=tuple,
        description="Continuation after pumping the cycle, leading to the witnessed estimate",
    )

    def word(self, repetitions: int) -> Tuple[str, ...]:
        return self.stem + self.cycle * repetitions + self.tail

    def render(self) -> str:
        text = f"stem={' '.join(self.stem)}; cycle={' '.join(self.cycle)}"
        if self.tail:
            text += f"; tail={' '.join(self.tail)}"
        return text

    @classmethod
    def parse(cls, text: str) -> "Lasso":
        """Inverse of render(): 'stem=a b; cycle=c; tail=d'."""
        parts = {}
        for chunk in text.split(";"):
            if not chunk.strip():
                continue
            key, sep, value = chunk.partition("=")
            if not sep:
                raise ValueError(f"Malformed lasso component: {chunk.strip()!r}")
            parts[key.strip()] = tuple(value.split())
        unknown = set(parts) - {"stem", "cycle", "tail"}
        if unknown:
            raise ValueError(f"Unknown lasso components: {sorted(unknown)}")
        return cls(
            stem=parts.get("stem", ()), cycle=parts.get("cycle", ()), tail=parts.get("tail", ())
        )


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    property_name: str = Field(..., description="Checked property, e.g. strong-d")
    engine: str = Field("general", description="Decision procedure that produced the verdict")
    holds: bool
    bound_n: Optional[int] = Field(None, description="A valid n for the existential quantifier")
    witness: Optional[Lasso] = None
    witness_position: Optional[int] = Field(
        None, description="Unary fast path: a free position in the cycle part"
    )
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_bound(self):
        if (self.bound_n is not None) != self.holds:
            raise ValueError("bound_n must be present exactly when the property holds")
        return self

    @property
    def exit_code(self) -> int:
        return 0 if self.holds else 1


class RpoReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    po_violation: Optional[List[str]] = Field(None, description="A nontrivial cycle of P(G)")
    selfloop_violation: Optional[Tuple[str, str]] = Field(
        None, description="(state, event) exhibiting the forbidden pattern"
    )

    @property
    def is_rpo(self) -> bool:
        return self.po_violation is None and self.selfloop_violation is None


class UnaryProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    tail: int = Field(..., ge=0, description="Number of estimates before the cycle (k)")
    period: int = Field(..., ge=1, description="Length of the estimate cycle (l)")


class Dag(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[str, ...]
    edges: Tuple[Tuple[str, str], ...] = ()
    source: str
    target: str

    @model_validator(mode="after")
    def validate_dag(self):
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise ValueError("Vertex identifiers must be unique")
        if self.source not in known or self.target not in known:
            raise ValueError("Source and target must be vertices")
        if self.source == self.target:
            raise ValueError("Source and target must differ")
        for p, r in self.edges:
            if p not in known or r not in known:
                raise ValueError(f"Edge ({p}, {r}) uses an unknown vertex")
        graph = nx.DiGraph()
        graph.add_edges_from(self.edges)
        if not nx.is_directed_acyclic_graph(graph):
            raise ValueError("Edge relation must be acyclic")
        return self


Literal = Tuple[int, bool]


class Cnf3(BaseModel):
    """A formula in 3CNF: literal = (variable index, positive?)."""

    model_config = ConfigDict(frozen=True)

    variables: int = Field(..., ge=1)
    clauses: Tuple[Tuple[Literal, ...], ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_clauses(self):
        for clause in self.clauses:
            if not 1 <= len(clause) <= 3:
                raise ValueError("Every clause must have one to three literals")
            for variable, _ in clause:
                if not 0 <= variable < self.variables:
                    raise ValueError(f"Variable index {variable} out of range")
        return self

    def render(self, names: Optional[List[str]] = None) -> str:
        names = names or [f"x{i}" for i in range(self.variables)]
        return "&".join(
            "(" + "|".join(("" if positive else "~") + names[v] for v, positive in clause) + ")"
            for clause in self.clauses
        )


class GeneratedInstance(BaseModel):
    model_config = ConfigDict(frozen=True)

    des: Des
    spec: Spec
    metadata: Dict[str, str] = Field(default_factory=dict, description="Reduction provenance")
