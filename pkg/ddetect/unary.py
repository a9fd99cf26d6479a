"""
Fast path for DESs with a single observable event.

The observer of such a system is a lasso a^k (a^l)^*: after a tail of k
estimates the estimate sequence repeats with period l. Estimates at very large
step counts are computed by repeated squaring of the boolean transition matrix.
"""

import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from automata import initial_estimate, is_violating, project, step
from checks import STRONG_D, STRONG_PERIODIC_D, WEAK_D, WEAK_PERIODIC_D
from models import Des, Estimate, Spec
from schemas import Lasso, UnaryProfile, Verdict
from utils.config import MAX_UNARY_STEPS
from utils.errors import BudgetExceeded, InputError

logger = logging.getLogger(__name__)


class BoolMatrix:
    """Square boolean matrix indexed by the states of a DES."""

    def __init__(self, states: Sequence[str], bits):
        self.states: Tuple[str, ...] = tuple(states)
        self.bits = np.array(bits, dtype=bool)
        if self.bits.shape != (len(self.states), len(self.states)):
            raise InputError(f"Matrix shape {self.bits.shape} does not match {len(self.states)} states")
        self.bits.setflags(write=False)
        self._index = {state: i for i, state in enumerate(self.states)}

    @classmethod
    def identity(cls, states: Sequence[str]) -> "BoolMatrix":
        return cls(states, np.eye(len(states), dtype=bool))

    @property
    def dimension(self) -> int:
        return len(self.states)

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        # boolean semiring product; integer entries never exceed the dimension
        product = self.bits.astype(np.int64) @ other.bits.astype(np.int64)
        return BoolMatrix(self.states, product > 0)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoolMatrix)
            and self.states == other.states
            and bool(np.array_equal(self.bits, other.bits))
        )

    def vector(self, est: Estimate) -> np.ndarray:
        row = np.zeros(self.dimension, dtype=bool)
        for state in est:
            if state not in self._index:
                raise InputError(f"Unknown state: {state}")
            row[self._index[state]] = True
        return row

    def image(self, row: np.ndarray) -> np.ndarray:
        return (row.astype(np.int64) @ self.bits.astype(np.int64)) > 0

    def estimate_of(self, row: np.ndarray) -> Estimate:
        return frozenset(self.states[i] for i in np.flatnonzero(row))

    def tolist(self) -> List[List[int]]:
        return self.bits.astype(int).tolist()


def is_unary(des: Des) -> bool:
    return len(des.alphabet.observable_events) == 1


def _single_event(des: Des) -> str:
    observable = des.alphabet.observable_events
    if len(observable) != 1:
        raise InputError(
            f"The unary fast path needs exactly one observable event, found {len(observable)}"
        )
    return observable[0]


def transition_matrix(des: Des) -> BoolMatrix:
    """M[i, j] = 1 iff the projected DES moves from state i to state j on its only event."""
    event = _single_event(des)
    projected = project(des)
    index = {state: i for i, state in enumerate(projected.states)}
    bits = np.zeros((len(index), len(index)), dtype=bool)
    for source, label, target in projected.transitions:
        if label == event:
            bits[index[source], index[target]] = True
    return BoolMatrix(projected.states, bits)


def estimate_at(matrix: BoolMatrix, initial: Estimate, r: int) -> Estimate:
    """
    Image of `initial` after r steps, using O(log r) boolean matrix squarings.

    Powers of a single matrix commute, so the row vector is multiplied by
    M^(2^i) for every set bit i of r.
    """
    if r < 0:
        raise InputError("The step count must be nonnegative")
    row = matrix.vector(initial)
    power = matrix
    remaining = int(r)
    while remaining:
        if remaining & 1:
            row = power.image(row)
            if not row.any():
                break
        remaining >>= 1
        if remaining:
            power = power @ power
    return matrix.estimate_of(row)


def _estimate_sequence(des: Des, step_budget: int) -> Tuple[List[Estimate], int]:
    """Estimates from the initial one up to the first repetition, and the tail length."""
    if step_budget < 1:
        raise InputError("The unary step budget must be at least 1")
    event = _single_event(des)
    seen: Dict[Estimate, int] = {}
    sequence: List[Estimate] = []
    current = initial_estimate(des)
    for index in range(step_budget + 1):
        if current in seen:
            logger.debug(f"Unary estimate sequence repeats after {index} steps")
            return sequence, seen[current]
        seen[current] = index
        sequence.append(current)
        current = step(des, current, event)
    logger.warning(f"No repetition of the estimate sequence within {step_budget} steps")
    raise BudgetExceeded("unary step", step_budget)


def unary_profile(des: Des, step_budget: int = MAX_UNARY_STEPS) -> UnaryProfile:
    sequence, tail = _estimate_sequence(des, step_budget)
    return UnaryProfile(tail=tail, period=len(sequence) - tail)


def _dead_end_verdict(property_name: str, k: int) -> Verdict:
    """
    The estimate sequence reaches the empty set after k observations, so no
    infinite observation exists: strong variants hold vacuously, weak ones fail.
    """
    logger.info(f"Unary estimate sequence dies out after {k} steps")
    notes = [f"estimates empty after {k} steps"]
    if property_name in (STRONG_D, STRONG_PERIODIC_D):
        return Verdict(
            property_name=property_name, engine="unary", holds=True, bound_n=k + 1, notes=notes
        )
    return Verdict(property_name=property_name, engine="unary", holds=False, notes=notes)


def check_unary(
    des: Des, spec: Spec, property_name: str, step_budget: int = MAX_UNARY_STEPS
) -> Verdict:
    """
    Decide any of the four variants on a unary DES.

    There is a single infinite observation, so weak and strong variants
    coincide: the non-periodic ones hold iff every cycle estimate is free,
    the periodic ones iff some cycle estimate is free.
    """
    event = _single_event(des)
    sequence, k = _estimate_sequence(des, step_budget)
    period = len(sequence) - k
    if property_name not in (STRONG_D, STRONG_PERIODIC_D, WEAK_D, WEAK_PERIODIC_D):
        raise InputError(f"Unknown property: {property_name}")
    if not sequence[k]:
        return _dead_end_verdict(property_name, k)
    free_positions = [m for m in range(k, len(sequence)) if not is_violating(sequence[m], spec)]
    lasso = Lasso(stem=(event,) * k, cycle=(event,) * period)

    if property_name in (STRONG_PERIODIC_D, WEAK_PERIODIC_D):
        holds = bool(free_positions)
    else:
        holds = len(free_positions) == period

    notes = [f"profile k={k} l={period}"]
    if not holds:
        if property_name == STRONG_D:
            first_violating = next(m for m in range(k, len(sequence)) if m not in free_positions)
            lasso = Lasso(stem=lasso.stem, cycle=lasso.cycle, tail=(event,) * (first_violating - k))
        return Verdict(
            property_name=property_name,
            engine="unary",
            holds=False,
            witness=lasso if property_name in (STRONG_D, STRONG_PERIODIC_D) else None,
            notes=notes,
        )
    return Verdict(
        property_name=property_name,
        engine="unary",
        holds=True,
        bound_n=k + period + 1,
        witness=lasso if property_name in (WEAK_D, WEAK_PERIODIC_D) else None,
        witness_position=free_positions[0],
        notes=notes,
    )


def check_unary_strong_periodic_d(
    des: Des, spec: Spec, step_budget: int = MAX_UNARY_STEPS
) -> Verdict:
    """Holds iff some estimate of the cycle part is free; witness_position names one."""
    return check_unary(des, spec, STRONG_PERIODIC_D, step_budget)
