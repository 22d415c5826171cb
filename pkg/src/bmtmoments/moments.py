"""The mixed-moment engine: factorization over graph kernels, with checks
that the right edge patterns recover Boolean, monotone, tensor, and weak
order-based behavior.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .digraph import Digraph, generate, is_subgraph, order_relation, parse_family, restrict
from .distributions import MomentSequence
from .errors import CapExceeded, InputError
from .kernel import ker, ker_g, relabeled_ncg

GROUP_WORD_CAP = 6


@dataclass(frozen=True)
class BmtEnsemble:
    """A digraph together with one marginal law per vertex."""

    graph: Digraph
    marginals: Mapping[int, MomentSequence]

    def __post_init__(self):
        missing = [v for v in self.graph.vertices if v not in self.marginals]
        if missing:
            raise InputError(f"vertices without a marginal: {missing}")
        object.__setattr__(self, "marginals", MappingProxyType(dict(self.marginals)))

    @classmethod
    def uniform(cls, graph: Digraph, law: MomentSequence) -> "BmtEnsemble":
        return cls(graph, {v: law for v in graph.vertices})

    def marginal(self, v: int) -> MomentSequence:
        try:
            return self.marginals[v]
        except KeyError:
            raise InputError(f"no marginal for vertex {v}") from None


def mixed_moment(e: BmtEnsemble, w: Sequence[int]) -> Fraction:
    """Product over blocks of the graph kernel of the block letter's moment."""
    if len(w) == 0:
        return Fraction(1)
    value = Fraction(1)
    for block in ker_g(w, e.graph).blocks:
        letter = w[block[0] - 1]
        value *= e.marginal(letter).moment(len(block))
    return value


def pair_partition_moment_is_indicator(e: BmtEnsemble, w: Sequence[int]) -> int:
    """For pairing-kernel words with centered unit-variance marginals the
    mixed moment is 0 or 1, and equals 1 exactly when the relabeled
    nesting-crossing graph sits inside the independence graph.

    Returns that indicator after checking the engine agrees with it.
    """
    partition = ker(w)
    if any(len(b) != 2 for b in partition.blocks):
        raise InputError("ker(w) must be a pair partition")
    for letter in set(w):
        law = e.marginal(letter)
        if law.moment(1) != 0 or law.moment(2) != 1:
            raise InputError(f"marginal at {letter} is not centered with unit variance")
    indicator = 1 if is_subgraph(relabeled_ncg(w), restrict(e.graph, set(w))) else 0
    value = mixed_moment(e, w)
    if value != indicator:
        raise RuntimeError(f"indicator theorem violated on {w}: moment {value}, indicator {indicator}")
    return indicator


def _is_total_order_graph(g: Digraph) -> bool:
    want = {(j, i) for i in g.vertices for j in g.vertices if i < j}
    return g.edges == want


def _drop(w: Sequence[int], pos: int) -> tuple[int, ...]:
    # pos is 1-based
    return tuple(w[: pos - 1]) + tuple(w[pos:])


def check_monotone_axioms(e: BmtEnsemble, w: Sequence[int]) -> bool:
    """On a totally ordered vertex set, peaks factor out one at a time and
    valley-shaped words factor completely."""
    if not _is_total_order_graph(e.graph):
        raise InputError("graph is not a total-order digraph")
    m = len(w)
    if any(w[j] == w[j + 1] for j in range(m - 1)):
        raise InputError(f"word {tuple(w)} is not alternating")
    ok = True
    for k in range(2, m):
        if w[k - 2] < w[k - 1] > w[k]:
            lhs = mixed_moment(e, w)
            rhs = e.marginal(w[k - 1]).moment(1) * mixed_moment(e, _drop(w, k))
            ok = ok and lhs == rhs
    p = 0
    while p + 1 < m and w[p] > w[p + 1]:
        p += 1
    if all(w[j] < w[j + 1] for j in range(p, m - 1)):
        product = Fraction(1)
        for letter in w:
            product *= e.marginal(letter).moment(1)
        ok = ok and mixed_moment(e, w) == product
    return ok


def _relation_symbol(rel: frozenset, x: int, y: int) -> str:
    if (x, y) in rel:
        return "<"
    if (y, x) in rel:
        return ">"
    return "~" if x != y else "="


def check_weak_bm(e: BmtEnsemble, order: Iterable[tuple[int, int]], words: Iterable[Sequence[int]]) -> bool:
    """Check the state-level reduction identities of order-based independence
    on the sampled words.

    order is the strict relation as (a, b) pairs meaning a below b; it must
    be exactly the relation encoded by e.graph.
    """
    rel = frozenset((int(a), int(b)) for a, b in order)
    if rel != order_relation(e.graph):
        raise InputError("order does not match the ensemble's graph")
    ok = True
    for w in words:
        m = len(w)
        # single-peak extraction at every interior position that matches
        # one of the three patterns
        for k in range(2, m):
            left = _relation_symbol(rel, w[k - 2], w[k - 1])
            right = _relation_symbol(rel, w[k], w[k - 1])
            if (left, right) in {("<", "<"), ("~", "<"), ("<", "~")}:
                lhs = mixed_moment(e, w)
                rhs = e.marginal(w[k - 1]).moment(1) * mixed_moment(e, _drop(w, k))
                ok = ok and lhs == rhs
        # full factorization when consecutive relations read >* ~* <*
        symbols = [_relation_symbol(rel, w[j], w[j + 1]) for j in range(m - 1)]
        if "=" not in symbols:
            j = 0
            while j < len(symbols) and symbols[j] == ">":
                j += 1
            while j < len(symbols) and symbols[j] == "~":
                j += 1
            while j < len(symbols) and symbols[j] == "<":
                j += 1
            if j == len(symbols):
                product = Fraction(1)
                for letter in w:
                    product *= e.marginal(letter).moment(1)
                ok = ok and mixed_moment(e, w) == product
    return ok


_GROUP_GRAPHS = {
    "boolean": "empty",
    "tensor": "complete",
    "monotone": "totalorder",
}


def check_consistency_grouping(
    e: BmtEnsemble,
    grouping: Sequence[Sequence[int]],
    relation: str,
    words: Iterable[Sequence[int]],
) -> bool:
    """Group the vertices, form each group's sum variable, and check that the
    sums are independent in the claimed sense.

    The left side expands group words by linearity into vertex words; the
    right side evaluates the same word on a small second-level ensemble
    whose graph encodes the claimed relation and whose marginals are the
    groups' own moment sequences. Group words longer than GROUP_WORD_CAP
    are refused.
    """
    if relation not in _GROUP_GRAPHS:
        raise InputError(f"relation must be one of {sorted(_GROUP_GRAPHS)}, got {relation!r}")
    groups = [tuple(g) for g in grouping]
    if not groups or any(not g for g in groups):
        raise InputError("groups must be nonempty")
    seen: set[int] = set()
    for g in groups:
        for v in g:
            if not e.graph.has_vertex(v):
                raise InputError(f"group member {v} is not a graph vertex")
            if v in seen:
                raise InputError(f"vertex {v} appears in two groups")
            seen.add(v)
    _check_cross_pattern(e.graph, groups, relation)

    cache: dict[tuple[int, int], Fraction] = {}

    def group_moment(a: int, k: int) -> Fraction:
        key = (a, k)
        if key not in cache:
            cache[key] = sum(
                (mixed_moment(e, mw) for mw in itertools.product(groups[a - 1], repeat=k)),
                Fraction(0),
            )
        return cache[key]

    def group_law(a: int) -> MomentSequence:
        return MomentSequence(f"group-{a}", lambda k, a=a: group_moment(a, k))

    group_graph = generate(parse_family(f"{_GROUP_GRAPHS[relation]}:{len(groups)}"))
    level2 = BmtEnsemble(group_graph, {a: group_law(a) for a in range(1, len(groups) + 1)})

    ok = True
    for gw in words:
        if len(gw) > GROUP_WORD_CAP:
            raise CapExceeded(f"group word longer than {GROUP_WORD_CAP}")
        if any(not 1 <= a <= len(groups) for a in gw):
            raise InputError(f"group word {tuple(gw)} uses unknown group indices")
        lhs = sum(
            (mixed_moment(e, mw) for mw in itertools.product(*[groups[a - 1] for a in gw])),
            Fraction(0),
        )
        rhs = mixed_moment(level2, gw)
        ok = ok and lhs == rhs
    return ok


def _check_cross_pattern(g: Digraph, groups: Sequence[tuple[int, ...]], relation: str) -> None:
    for a in range(len(groups)):
        for b in range(len(groups)):
            if a == b:
                continue
            for i in groups[a]:
                for j in groups[b]:
                    fwd = g.has_edge(i, j)
                    if relation == "boolean" and fwd:
                        raise InputError(f"boolean grouping forbids edge ({i},{j})")
                    if relation == "tensor" and not fwd:
                        raise InputError(f"tensor grouping requires edge ({i},{j})")
                    if relation == "monotone":
                        # members of the later group point at the earlier one
                        if a < b and fwd:
                            raise InputError(f"monotone grouping forbids edge ({i},{j})")
                        if a > b and not fwd:
                            raise InputError(f"monotone grouping requires edge ({i},{j})")
