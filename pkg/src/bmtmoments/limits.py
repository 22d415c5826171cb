"""Exact finite-size sum moments, their leading terms, and the convergence
tables for the central-limit, Poisson, counterexample, perturbation, and
convolution-splitting statements.

Nothing here takes a limit. Tables hold exact rationals at each finite size
next to the analytically known target, and callers decide what decay to
assert.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .digraph import Digraph, GraphFamily, generate, parse_family, symmetric_difference_size
from .distributions import (
    LawKind,
    MomentSequence,
    ReferenceLaw,
    centered_bernoulli,
    poisson_bernoulli,
    reference_moment,
)
from .errors import CapExceeded, InputError
from .moments import BmtEnsemble, mixed_moment
from .partitions import PartitionClass, enumerate_partitions, nesting_crossing_graph, num_blocks

WORD_BUDGET = 10**7


def _falling(n: int, k: int) -> int:
    return math.perm(n, k)


@lru_cache(maxsize=None)
def _bell(m: int) -> int:
    if m == 0:
        return 1
    return sum(math.comb(m - 1, j) * _bell(j) for j in range(m))


def _pairing_count(m: int) -> int:
    return 0 if m % 2 else math.factorial(m) // (2 ** (m // 2) * math.factorial(m // 2))


def _normalize(total: Fraction, N: int, m: int, normalization: str) -> Fraction:
    if normalization == "none":
        return total
    if normalization != "sqrtN":
        raise InputError(f"normalization must be 'sqrtN' or 'none', got {normalization!r}")
    if m % 2 == 0:
        return total / Fraction(N) ** (m // 2)
    if total == 0:
        return Fraction(0)
    # an odd power of sqrt(N) cannot be cleared exactly
    raise InputError(
        f"odd moment {m} with sqrtN normalization is irrational unless the sum vanishes"
    )


def exact_sum_moment_naive(
    g: Digraph, marginal: MomentSequence, m: int, normalization: str = "sqrtN"
) -> Fraction:
    """Plain sum over all N^m words. Oracle for the class decomposition."""
    if m < 0:
        raise InputError("moment order must be >= 0")
    N = len(g.vertices)
    if N**m > WORD_BUDGET:
        raise CapExceeded(f"{N}^{m} words exceed the budget {WORD_BUDGET}")
    ens = BmtEnsemble.uniform(g, marginal)
    total = sum(
        (mixed_moment(ens, w) for w in itertools.product(g.vertices, repeat=m)),
        Fraction(0),
    )
    return _normalize(total, N, m, normalization)


def exact_sum_moment(
    g: Digraph, marginal: MomentSequence, m: int, normalization: str = "sqrtN"
) -> Fraction:
    """Moment of the (optionally sqrt(N)-normalized) sum of all vertex
    variables, computed exactly.

    Words are grouped by their plain kernel: each class is one partition
    with one injective block labeling, and whole classes are dropped when
    the marginal makes them vanish (any odd block when odd moments vanish,
    any singleton when centered). The surviving evaluation count must stay
    within WORD_BUDGET.
    """
    if m < 0:
        raise InputError("moment order must be >= 0")
    if m == 0:
        return Fraction(1)
    N = len(g.vertices)
    if _bell(m) > WORD_BUDGET:
        raise CapExceeded(f"{_bell(m)} kernel classes exceed the budget {WORD_BUDGET}")
    if marginal.odd_vanish:
        cls = PartitionClass.EVEN
    elif marginal.centered:
        cls = PartitionClass.NO_SINGLETON
    else:
        cls = PartitionClass.ALL
    ens = BmtEnsemble.uniform(g, marginal)
    total = Fraction(0)
    work = 0
    for p in enumerate_partitions(m, cls):
        k = num_blocks(p)
        work += _falling(N, k)
        if work > WORD_BUDGET:
            raise CapExceeded(f"class evaluations exceed the budget {WORD_BUDGET}")
        block_of = [0] * m
        for b, block in enumerate(p.blocks):
            for pos in block:
                block_of[pos - 1] = b
        for labels in itertools.permutations(g.vertices, k):
            word = tuple(labels[b] for b in block_of)
            total += mixed_moment(ens, word)
    return _normalize(total, N, m, normalization)


def clt_leading_term(g: Digraph, m: int) -> Fraction:
    """Sum over pair partitions of the count of injective labelings whose
    relabeled nesting-crossing graph sits inside g, divided by N^(m/2)."""
    if m < 0:
        raise InputError("moment order must be >= 0")
    if m % 2:
        return Fraction(0)
    if m == 0:
        return Fraction(1)
    N = len(g.vertices)
    k = m // 2
    if k > N:
        # no injective labeling of k blocks exists
        return Fraction(0)
    if _pairing_count(m) * _falling(N, k) > WORD_BUDGET:
        raise CapExceeded(f"leading-term evaluations exceed the budget {WORD_BUDGET}")
    count = 0
    for p in enumerate_partitions(m, PartitionClass.PAIRING):
        needed = nesting_crossing_graph(p).edges
        for labels in itertools.permutations(g.vertices, k):
            if all((labels[u - 1], labels[v - 1]) in g.edges for u, v in needed):
                count += 1
    return Fraction(count, N**k)


_CLT_REFERENCE = {
    "empty": ReferenceLaw(LawKind.SYMMETRIC_BERNOULLI),
    "complete": ReferenceLaw(LawKind.GAUSSIAN),
    "totalorder": ReferenceLaw(LawKind.ARCSINE),
}


def clt_reference(family: GraphFamily, m: int) -> Fraction | None:
    law = _CLT_REFERENCE.get(family.kind)
    return None if law is None else reference_moment(law, m)


@dataclass(frozen=True)
class CltConfig:
    family: GraphFamily
    marginal: MomentSequence
    moments_upto: int
    N_list: tuple[int, ...]

    def __post_init__(self):
        if self.marginal.moment(1) != 0 or self.marginal.moment(2) != 1:
            raise InputError("CLT marginal must be centered with unit variance")
        if self.moments_upto < 2 or self.moments_upto % 2:
            raise InputError("moments_upto must be an even integer >= 2")
        ns = tuple(self.N_list)
        if not ns or any(n < 1 for n in ns) or list(ns) != sorted(set(ns)):
            raise InputError("N_list must be strictly increasing positive integers")
        object.__setattr__(self, "N_list", ns)


@dataclass
class CltRow:
    N: int
    m: int
    exact: Fraction
    leading: Fraction
    reference: Fraction | None
    gap_leading: Fraction
    gap_reference: Fraction | None


@dataclass
class MomentTable:
    rows: list[CltRow]
    fitted_c: dict[int, float]
    monotone_decay: dict[int, bool]


def clt_table(
    family: GraphFamily,
    marginal: MomentSequence,
    n_list: Sequence[int],
    moments: Sequence[int],
) -> MomentTable:
    rows = []
    for m in moments:
        for N in n_list:
            g = family.build(N)
            exact = exact_sum_moment(g, marginal, m, "sqrtN")
            leading = clt_leading_term(g, m)
            reference = clt_reference(family, m)
            rows.append(
                CltRow(
                    N=N,
                    m=m,
                    exact=exact,
                    leading=leading,
                    reference=reference,
                    gap_leading=abs(exact - leading),
                    gap_reference=None if reference is None else abs(exact - reference),
                )
            )
    fitted = {}
    monotone = {}
    for m in moments:
        cells = [r for r in rows if r.m == m]
        fitted[m] = max(float(r.gap_leading) * math.sqrt(r.N) for r in cells)
        gaps = [r.gap_leading for r in cells]
        monotone[m] = all(a >= b for a, b in zip(gaps, gaps[1:]))
    return MomentTable(rows=rows, fitted_c=fitted, monotone_decay=monotone)


def clt_gap_decay(config: CltConfig) -> MomentTable:
    moments = range(2, config.moments_upto + 1, 2)
    return clt_table(config.family, config.marginal, config.N_list, list(moments))


@lru_cache(maxsize=None)
def counterexample_direct_fourth_moment(n: int) -> Fraction:
    """Fourth moment of the normalized sum on the n-th counterexample graph,
    by exact class enumeration."""
    g = generate(parse_family(f"counterexample:{n}"))
    return exact_sum_moment(g, centered_bernoulli(), 4, "sqrtN")


def counterexample_fourth_moment(n: int) -> Fraction:
    """Same value via the two-step averaging recursion, seeded by direct
    enumeration at the three smallest graphs."""
    if n < 0:
        raise InputError("index must be >= 0")
    if n <= 2:
        return counterexample_direct_fourth_moment(n)
    value = counterexample_direct_fourth_moment(2)
    for k in range(3, n + 1):
        bump = 1 if k % 2 == 0 else 3
        value = Fraction(1, 2) * (value + bump)
    return value


GraphBuilder = Callable[[int], Digraph]


@dataclass
class PerturbationRow:
    N: int
    diff_edges: int
    diff_ratio: Fraction
    gap: Fraction


def perturbation_gap(
    build_g: GraphFamily | GraphBuilder,
    build_h: GraphFamily | GraphBuilder,
    m: int,
    N_list: Sequence[int],
    marginal: MomentSequence | None = None,
) -> list[PerturbationRow]:
    """Moment gap between two graph sequences next to their edge-difference
    density; the theorem says the gap vanishes when the density does."""
    if marginal is None:
        marginal = centered_bernoulli()

    def materialize(b, N: int) -> Digraph:
        return b.build(N) if isinstance(b, GraphFamily) else b(N)

    rows = []
    for N in N_list:
        g = materialize(build_g, N)
        h = materialize(build_h, N)
        diff = symmetric_difference_size(g, h)
        gap = abs(
            exact_sum_moment(g, marginal, m, "sqrtN")
            - exact_sum_moment(h, marginal, m, "sqrtN")
        )
        nv = len(g.vertices)
        rows.append(PerturbationRow(N=nv, diff_edges=diff, diff_ratio=Fraction(diff, nv**2), gap=gap))
    return rows


@dataclass
class PoissonMoment:
    exact: Fraction
    leading: Fraction


def poisson_exact_moment(g: Digraph, lam: Fraction | int, m: int) -> PoissonMoment:
    """Un-normalized m-th moment of the sum of N Bernoulli(lambda/N)
    variables, plus the partition-sum leading term."""
    lam = Fraction(lam)
    N = len(g.vertices)
    exact = exact_sum_moment(g, poisson_bernoulli(lam, N), m, "none")
    if m == 0:
        return PoissonMoment(exact=exact, leading=Fraction(1))
    if _bell(m) > WORD_BUDGET:
        raise CapExceeded(f"{_bell(m)} partition classes exceed the budget {WORD_BUDGET}")
    leading = Fraction(0)
    work = 0
    for p in enumerate_partitions(m, PartitionClass.ALL):
        k = num_blocks(p)
        work += _falling(N, k)
        if work > WORD_BUDGET:
            raise CapExceeded(f"leading-term evaluations exceed the budget {WORD_BUDGET}")
        needed = nesting_crossing_graph(p).edges
        count = 0
        for labels in itertools.permutations(g.vertices, k):
            if all((labels[u - 1], labels[v - 1]) in g.edges for u, v in needed):
                count += 1
        leading += lam**k * Fraction(count, N**k)
    return PoissonMoment(exact=exact, leading=leading)


_POISSON_REFERENCE = {
    "empty": LawKind.BOOLEAN_POISSON,
    "complete": LawKind.CLASSICAL_POISSON,
    "totalorder": LawKind.MONOTONE_POISSON,
}


def poisson_reference(family: GraphFamily, lam: Fraction | int, m: int) -> Fraction | None:
    kind = _POISSON_REFERENCE.get(family.kind)
    if kind is None:
        return None
    return reference_moment(ReferenceLaw(kind, Fraction(lam)), m)


@dataclass
class PoissonRow:
    N: int
    m: int
    exact: Fraction
    leading: Fraction
    reference: Fraction | None
    gap_leading: Fraction
    gap_reference: Fraction | None


def poisson_table(
    family: GraphFamily,
    lam: Fraction | int,
    n_list: Sequence[int],
    moments: Sequence[int],
) -> list[PoissonRow]:
    lam = Fraction(lam)
    rows = []
    for m in moments:
        for N in n_list:
            g = family.build(N)
            pm = poisson_exact_moment(g, lam, m)
            reference = poisson_reference(family, lam, m)
            rows.append(
                PoissonRow(
                    N=N,
                    m=m,
                    exact=pm.exact,
                    leading=pm.leading,
                    reference=reference,
                    gap_leading=abs(pm.exact - pm.leading),
                    gap_reference=None if reference is None else abs(pm.leading - reference),
                )
            )
    return rows


_SPLIT_SHAPES = {
    # inside a part -> that block's limit law; between parts -> the pair's relation
    "bipartite": (LawKind.SYMMETRIC_BERNOULLI, "complete:2"),
    "disjointpair": (LawKind.GAUSSIAN, "empty:2"),
}


@dataclass
class ConvolutionRow:
    N: int
    exact: Fraction
    gap: Fraction


@dataclass
class ConvolutionReport:
    kind: str
    t: Fraction
    m: int
    limit: Fraction
    rows: list[ConvolutionRow]


def convolution_split_check(
    gf: GraphFamily,
    t: Fraction | int,
    m: int,
    n_list: Sequence[int] = (4, 8, 16),
) -> ConvolutionReport:
    """Compare the two-part family's exact moments against the mixture of
    the two block limits, with the mixture itself evaluated by the moments
    engine on a two-vertex graph carrying the cross-part edge pattern."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise InputError(f"t must lie in [0,1], got {t}")
    if gf.kind not in _SPLIT_SHAPES:
        raise InputError(f"family must be bipartite or disjointpair, got {gf.kind!r}")
    if len(gf.args) != 2:
        raise InputError("two part-size arguments required")
    block_kind, pair_spec = _SPLIT_SHAPES[gf.kind]
    block_law = ReferenceLaw(block_kind)

    def scaled(s: Fraction) -> MomentSequence:
        def fn(k: int) -> Fraction:
            if k % 2:
                return Fraction(0)
            return s ** (k // 2) * reference_moment(block_law, k)

        return MomentSequence(f"scaled-{block_kind.value}({s})", fn, odd_vanish=True)

    pair_graph = generate(parse_family(pair_spec))
    pair_ens = BmtEnsemble(pair_graph, {1: scaled(t), 2: scaled(1 - t)})
    limit = sum(
        (mixed_moment(pair_ens, w) for w in itertools.product((1, 2), repeat=m)),
        Fraction(0),
    )

    rows = []
    for N in n_list:
        g = gf.build(N)
        sizes = (gf._int(gf.args[0], N), gf._int(gf.args[1], N))
        if sizes[0] + sizes[1] != N:
            raise InputError(f"part sizes {sizes} do not sum to N={N}")
        if Fraction(sizes[0], N) != t:
            raise InputError(f"at N={N} the first part has density {Fraction(sizes[0], N)}, not t={t}")
        exact = exact_sum_moment(g, centered_bernoulli(), m, "sqrtN")
        rows.append(ConvolutionRow(N=N, exact=exact, gap=abs(exact - limit)))
    return ConvolutionReport(kind=gf.kind, t=t, m=m, limit=limit, rows=rows)
