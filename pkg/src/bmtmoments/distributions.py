"""Single-variable laws as exact moment sequences, plus the reference
limit laws the convergence tables compare against.

Everything here is a rational number; moments may be formal (no positivity
check).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable

from .errors import CapExceeded, InputError
from .partitions import (
    ENUM_CAP_ALL,
    ENUM_CAP_PAIRING,
    PartitionClass,
    enumerate_partitions,
    monotone_label_count,
    nesting_forest_label_count,
    num_blocks,
)


@dataclass(frozen=True)
class MomentSequence:
    """A law identified with the sequence k -> moment(k).

    odd_vanish marks laws whose odd moments are all exactly zero; the
    limits module uses it (together with moment(1) == 0) to skip whole
    kernel classes.
    """

    name: str
    fn: Callable[[int], Fraction]
    odd_vanish: bool = False

    def moment(self, k: int) -> Fraction:
        if k < 0:
            raise InputError(f"moment order must be >= 0, got {k}")
        if k == 0:
            return Fraction(1)
        return Fraction(self.fn(k))

    @property
    def centered(self) -> bool:
        return self.moment(1) == 0


def centered_bernoulli() -> MomentSequence:
    """(δ₋₁ + δ₊₁)/2: odd moments 0, even moments 1."""
    return MomentSequence("centered-bernoulli", lambda k: Fraction(1 - k % 2), odd_vanish=True)


def poisson_bernoulli(lam: Fraction | int, N: int) -> MomentSequence:
    """(1 − λ/N)δ₀ + (λ/N)δ₁: every moment of order >= 1 equals λ/N."""
    lam = Fraction(lam)
    if N < 1:
        raise InputError(f"N must be >= 1, got {N}")
    if not 0 <= lam <= N:
        raise InputError(f"need 0 <= lambda <= N for a probability, got {lam}")
    p = lam / N
    return MomentSequence(f"poisson-bernoulli({lam},{N})", lambda k: p, odd_vanish=(lam == 0))


def _double_factorial_odd(k: int) -> int:
    # (k-1)!! for even k, i.e. the number of pairings of [k]
    return math.factorial(k) // (2 ** (k // 2) * math.factorial(k // 2))


class LawKind(Enum):
    SYMMETRIC_BERNOULLI = "symmetric-bernoulli"
    GAUSSIAN = "gaussian"
    ARCSINE = "arcsine"
    CLASSICAL_POISSON = "classical-poisson"
    BOOLEAN_POISSON = "boolean-poisson"
    MONOTONE_POISSON = "monotone-poisson"


_POISSON_KINDS = (
    LawKind.CLASSICAL_POISSON,
    LawKind.BOOLEAN_POISSON,
    LawKind.MONOTONE_POISSON,
)


@dataclass(frozen=True)
class ReferenceLaw:
    kind: LawKind
    lam: Fraction | None = None

    def __post_init__(self):
        if self.kind in _POISSON_KINDS:
            if self.lam is None:
                object.__setattr__(self, "lam", Fraction(1))
            else:
                object.__setattr__(self, "lam", Fraction(self.lam))
            if self.lam < 0:
                raise InputError("lambda must be >= 0")
        elif self.lam is not None:
            raise InputError(f"{self.kind.value} takes no rate parameter")

    @property
    def name(self) -> str:
        if self.kind in _POISSON_KINDS:
            return f"{self.kind.value}({self.lam})"
        return self.kind.value


def parse_law(name: str, lam: Fraction | None = None) -> ReferenceLaw:
    try:
        kind = LawKind(name.strip().lower())
    except ValueError:
        known = ", ".join(k.value for k in LawKind)
        raise InputError(f"unknown law {name!r}; known: {known}") from None
    return ReferenceLaw(kind, lam)


def reference_moment(law: ReferenceLaw, k: int) -> Fraction:
    if k < 0:
        raise InputError(f"moment order must be >= 0, got {k}")
    if k == 0:
        return Fraction(1)
    kind = law.kind

    if kind is LawKind.SYMMETRIC_BERNOULLI:
        return Fraction(1 - k % 2)

    if kind is LawKind.GAUSSIAN:
        return Fraction(0) if k % 2 else Fraction(_double_factorial_odd(k))

    if kind is LawKind.ARCSINE:
        if k % 2:
            return Fraction(0)
        if k > ENUM_CAP_PAIRING:
            raise CapExceeded(f"arcsine moment order {k} exceeds cap {ENUM_CAP_PAIRING}")
        total = sum(
            monotone_label_count(p)
            for p in enumerate_partitions(k, PartitionClass.NON_CROSSING_PAIRING)
        )
        return Fraction(total, math.factorial(k // 2))

    lam = law.lam
    if k > ENUM_CAP_ALL:
        raise CapExceeded(f"{kind.value} moment order {k} exceeds cap {ENUM_CAP_ALL}")

    if kind is LawKind.CLASSICAL_POISSON:
        return sum(
            (lam ** num_blocks(p) for p in enumerate_partitions(k, PartitionClass.ALL)),
            Fraction(0),
        )

    if kind is LawKind.BOOLEAN_POISSON:
        # interval partitions of [k] correspond to subsets of the k-1 gaps
        return sum(
            (math.comb(k - 1, j - 1) * lam**j for j in range(1, k + 1)),
            Fraction(0),
        )

    if kind is LawKind.MONOTONE_POISSON:
        total = Fraction(0)
        for p in enumerate_partitions(k, PartitionClass.NON_CROSSING):
            b = num_blocks(p)
            total += lam**b * Fraction(nesting_forest_label_count(p), math.factorial(b))
        return total

    raise InputError(f"unknown law kind {kind!r}")
