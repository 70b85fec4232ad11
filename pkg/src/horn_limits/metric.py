"""Dyadic level metric on interpretations and fixed-point stability probing.

Two interpretations are at distance 2^-n where n is the least level at
which they differ, and at distance 0 when equal.  Levels start at 1, so
all distances are powers of two; they are kept exact (no floating point)
to make comparisons and golden outputs bit-stable.

Comparing depth-bounded truncations that agree everywhere below their
bound cannot distinguish "equal" from "differing only above the bound",
so :func:`distance` then returns an upper-bound marker ``<=2^-(D+1)``
instead of claiming zero.

The stability probe iterates the consequence operator from perturbed
starting points and records the distance trajectory back to a fixed
point.  A recorded distance at or above the tolerance refutes stability
with a concrete witness trial; staying below it for the whole horizon is
reported as "no escape observed", deliberately not as a proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .engine import _consequences, tp_step
from .errors import NonFinitaryError, NotAFixedPointError
from .guard import inspect_program
from .syntax import (
    Atom,
    Interpretation,
    Program,
    Signature,
    atom_sort_key,
    bounded_base,
    level,
)

# ---------------------------------------------------------------------------
# Distances


@dataclass(frozen=True)
class DyadicDistance:
    """Either 0, an exact 2^-n, or an upper-bound marker <= 2^-n.

    Ordering compares the (upper-bound) numeric value: 0 < 2^-n for every
    n, and 2^-n < 2^-m iff n > m.  Markers order by their bound.
    """

    exponent: int | None = None  # None encodes zero
    is_upper_bound: bool = False

    def __post_init__(self) -> None:
        if self.exponent is not None and self.exponent < 1:
            raise ValueError("distance exponent must be a positive integer")
        if self.exponent is None and self.is_upper_bound:
            raise ValueError("zero distance cannot be an upper-bound marker")

    @classmethod
    def zero(cls) -> "DyadicDistance":
        return cls(None)

    @classmethod
    def exact(cls, exponent: int) -> "DyadicDistance":
        return cls(exponent)

    @classmethod
    def at_most(cls, exponent: int) -> "DyadicDistance":
        return cls(exponent, is_upper_bound=True)

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    def value(self) -> Fraction:
        """Numeric value (for markers: the upper bound)."""
        if self.exponent is None:
            return Fraction(0)
        return Fraction(1, 2**self.exponent)

    def __str__(self) -> str:
        if self.exponent is None:
            return "0"
        prefix = "<=" if self.is_upper_bound else ""
        return f"{prefix}2^-{self.exponent}"

    def __lt__(self, other: "DyadicDistance") -> bool:
        return self.value() < other.value()

    def __le__(self, other: "DyadicDistance") -> bool:
        return self.value() <= other.value()

    def __gt__(self, other: "DyadicDistance") -> bool:
        return self.value() > other.value()

    def __ge__(self, other: "DyadicDistance") -> bool:
        return self.value() >= other.value()


def distance(left: Interpretation, right: Interpretation) -> DyadicDistance:
    """Least-differing-level distance between two interpretations.

    Exact whenever the least differing level is visible below the depth
    bounds involved; otherwise the upper-bound marker for the first
    invisible level.  Two unbounded equal sets are at distance zero.
    """
    horizon: int | None = None
    bounds = [b for b in (left.depth_bound, right.depth_bound) if b is not None]
    if bounds:
        horizon = min(bounds)
    diff = left.atoms ^ right.atoms
    if diff:
        least = min(level(a) for a in diff)
        if horizon is None or least <= horizon:
            return DyadicDistance.exact(least)
        return DyadicDistance.at_most(horizon + 1)
    if horizon is None:
        return DyadicDistance.zero()
    return DyadicDistance.at_most(horizon + 1)


def _set_distance(left: frozenset[Atom], right: frozenset[Atom]) -> DyadicDistance:
    """Distance of two explicit atom sets (no truncation markers)."""
    diff = left ^ right
    if not diff:
        return DyadicDistance.zero()
    return DyadicDistance.exact(min(level(a) for a in diff))


# ---------------------------------------------------------------------------
# Perturbations


def perturbation_family(
    fixpoint: Interpretation, signature: Signature, levels: Iterable[int]
) -> list[Interpretation]:
    """Single-atom toggles of ``fixpoint`` at the given levels.

    For each ground atom A over ``signature`` with level in ``levels`` (in
    canonical atom order) the result contains ``fixpoint`` with A's
    membership flipped, a perturbation at controlled distance 2^-level(A).
    """
    wanted = sorted(set(levels))
    if not wanted:
        return []
    if any(l < 1 for l in wanted):
        raise ValueError("levels must be positive integers")
    base = bounded_base(signature, max(wanted))
    family: list[Interpretation] = []
    for atom in base.in_canonical_order():
        if level(atom) in wanted:
            family.append(Interpretation(fixpoint.atoms ^ {atom}))
    return family


# ---------------------------------------------------------------------------
# Stability probing


@dataclass(frozen=True)
class Trial:
    perturbation: Interpretation
    initial_distance: DyadicDistance
    trajectory: tuple[DyadicDistance, ...]  # distance after step t, t = 1..T
    max_distance: DyadicDistance


@dataclass(frozen=True)
class StabilityReport:
    """Bounded-horizon stability observation around a fixed point.

    ``classification`` is "instability-witness" when some trial recorded a
    distance >= epsilon (the witness trial index is 0-based), otherwise
    "no-escape-observed".  The latter is an observation over ``steps``
    iterations and the probed perturbations only, not a stability proof.
    """

    fixpoint: Interpretation
    epsilon: DyadicDistance
    steps: int
    depth: int
    trials: tuple[Trial, ...]
    classification: str
    witness_trial: int | None

    @property
    def escaped(self) -> bool:
        return self.witness_trial is not None


def stability_probe(
    program: Program,
    fixpoint: Interpretation,
    perturbations: Sequence[Interpretation],
    epsilon: DyadicDistance,
    steps: int,
    depth: int,
) -> StabilityReport:
    """Iterate the consequence operator from each perturbation and record
    distances back to ``fixpoint``.

    ``fixpoint`` must actually be fixed under the depth-bounded operator;
    this is verified before probing.  Distances compare the explicit
    depth-bounded iterates as plain sets, so a trajectory that leaves the
    depth window reads as having returned to the fixed point; within the
    window all recorded values are exact.
    """
    if not perturbations:
        raise ValueError("at least one perturbation is required")
    if steps < 1:
        raise ValueError("steps must be a positive integer")
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    if epsilon.is_zero:
        raise ValueError("epsilon must be a positive distance")

    report = inspect_program(program)
    if not report.range_restricted_all:
        offender = next(v for v in report.clauses if not v.range_restricted)
        raise NonFinitaryError(offender.clause, offender.unbound_variable)

    for atom in fixpoint.atoms:
        if level(atom) > depth:
            raise ValueError(f"fixpoint atom {atom} exceeds depth {depth}")
    image = tp_step(program, fixpoint.without_bound(), depth)
    if image.atoms != fixpoint.atoms:
        raise NotAFixedPointError(
            f"interpretation is not a fixed point at depth {depth}: "
            f"the operator image differs on {sorted(image.atoms ^ fixpoint.atoms, key=atom_sort_key)[0]}"
        )

    trials: list[Trial] = []
    witness: int | None = None
    for index, start in enumerate(perturbations):
        for atom in start.atoms:
            if level(atom) > depth:
                raise ValueError(f"perturbation atom {atom} exceeds depth {depth}")
        current = start.atoms
        trajectory: list[DyadicDistance] = []
        for _ in range(steps):
            current = frozenset(_consequences(program, current, depth)[0])
            trajectory.append(_set_distance(current, fixpoint.atoms))
        max_distance = max(trajectory)
        trials.append(
            Trial(
                perturbation=start.without_bound(),
                initial_distance=_set_distance(start.atoms, fixpoint.atoms),
                trajectory=tuple(trajectory),
                max_distance=max_distance,
            )
        )
        if witness is None and any(d >= epsilon for d in trajectory):
            witness = index

    return StabilityReport(
        fixpoint=fixpoint,
        epsilon=epsilon,
        steps=steps,
        depth=depth,
        trials=tuple(trials),
        classification="instability-witness" if witness is not None else "no-escape-observed",
        witness_trial=witness,
    )
