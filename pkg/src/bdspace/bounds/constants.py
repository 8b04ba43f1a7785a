"""Closed-form constants of the construction."""

from dataclasses import dataclass
from fractions import Fraction

from ..bdcore.nodes import BDParams


@dataclass(frozen=True)
class ConstantsReport:
    iso_bound: Fraction  # norm bound for every extension operator
    proj_bound: Fraction  # norm bound for interval projections
    C: Fraction  # bound for sums of skipped normalized blocks
    c: Fraction  # lower constant of the block decomposition

    def check(self):
        return self.C > self.iso_bound > 1 > self.c > 0


def constants_of(params: BDParams) -> ConstantsReport:
    N, theta, omega = Fraction(params.N), params.theta, params.omega
    iso = N / (N - 2 * theta)
    proj = 2 * N / (N - 2 * theta)
    big = 1 / (1 - theta * omega) * (2 * N * (N + theta) / (N - 2 * theta))
    small = (N - 2 * theta) / (2 * N)
    return ConstantsReport(iso, proj, big, small)
