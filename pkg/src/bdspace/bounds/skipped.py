"""Upper bound for sums of skipped blocks, checked by exact sampling.

The true norm is a sup over all of Gamma and cannot be computed on a finite
presentation; what we can certify is the closed-form bound C plus an exact
check that no explored coordinate exceeds it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..bdcore.dvector import CoordEvaluator, DVector
from ..bdcore.generation import GenerationSet
from ..bdcore.nodes import BDParams
from ..errors import BoundViolationError, DecompositionError, PreconditionError
from ..setsys import SetSystem
from .constants import constants_of


@dataclass
class SkippedDecomposition:
    blocks: list  # DVectors u_0..u_m
    markers: tuple  # n_1..n_m
    trace_set: tuple  # a member of the system's trace containing the markers
    block_bounds: list = field(default_factory=list)


@dataclass
class SampleReport:
    sampled: int
    max_abs: Fraction
    bound: Fraction
    argmax: str = ""


def check_skipped(dec: SkippedDecomposition, sys: SetSystem) -> None:
    """Raise unless ``range u_0 < n_1 <= range u_1 < n_2 <= ... <= range u_m``."""
    if not dec.blocks:
        raise DecompositionError("no blocks")
    if len(dec.markers) != len(dec.blocks) - 1:
        raise DecompositionError("need exactly one marker between consecutive blocks")
    ranges = []
    for u in dec.blocks:
        r = u.range()
        if r is None:
            raise DecompositionError("blocks must be nonzero")
        ranges.append(r)
    for j, n in enumerate(dec.markers, start=1):
        if not ranges[j - 1][1] < n <= ranges[j][0]:
            raise DecompositionError(f"marker {n} does not separate blocks {j - 1} and {j}")
    members = set(dec.trace_set)
    if not all(n in members for n in dec.markers):
        raise DecompositionError("markers are not inside the witness set")
    q = max(dec.markers) if dec.markers else 0
    if not sys.is_member_trace(tuple(sorted(members)), max([q] + list(members))):
        raise DecompositionError("witness set is not a member of the system")


def skipped_sum_bound(dec: SkippedDecomposition, params: BDParams, sys: SetSystem, probes=()):
    """Return ``(C, report)`` after checking every sampled coordinate against C."""
    check_skipped(dec, sys)
    consts = constants_of(params)
    bounds = [consts.iso_bound * u.l1() for u in dec.blocks]
    if any(b > 1 for b in bounds):
        raise PreconditionError("blocks must be scaled to certified norm at most 1")
    dec.block_bounds = bounds
    total = DVector()
    for u in dec.blocks:
        total = total + u
    nodes = GenerationSet(list(total.nodes()) + list(probes))
    ev = CoordEvaluator(total, params)
    best, arg = Fraction(0), ""
    for g in nodes:
        v = abs(ev.value(g))
        if v > consts.C:
            raise BoundViolationError(f"coordinate {v} exceeds {consts.C} at {g.id[:80]}")
        if v > best:
            best, arg = v, g.id
    return consts.C, SampleReport(len(nodes), best, consts.C, arg)
