"""Set partitions of {1..m}: enumeration, refinement, nesting and crossing.

Partitions are kept in a canonical form (blocks sorted by minimum element,
elements ascending inside each block), which makes equality and hashing a
byte comparison of the encoding. The enumeration works directly on
restricted-growth strings so every class comes out in lexicographic order
of encodings without a sort.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .errors import CapExceeded, InputError

ENUM_CAP_ALL = 14
ENUM_CAP_PAIRING = 20


class PartitionClass(Enum):
    ALL = "all"
    EVEN = "even"
    PAIRING = "pairing"
    NO_SINGLETON = "no-singleton"
    NON_CROSSING_PAIRING = "nc-pairing"
    NON_CROSSING = "non-crossing"


class Partition:
    """A set partition of {1..m} in canonical block order."""

    __slots__ = ("m", "blocks")

    def __init__(self, blocks: Iterable[Iterable[int]], m: int | None = None):
        blks = tuple(tuple(sorted(b)) for b in blocks)
        if any(len(b) == 0 for b in blks):
            raise InputError("empty block in partition")
        blks = tuple(sorted(blks, key=lambda b: b[0]))
        seen: list[int] = []
        for b in blks:
            seen.extend(b)
        if len(seen) != len(set(seen)):
            raise InputError("blocks are not disjoint")
        size = len(seen) if m is None else m
        if sorted(seen) != list(range(1, size + 1)):
            raise InputError(f"blocks do not cover 1..{size}")
        object.__setattr__(self, "m", size)
        object.__setattr__(self, "blocks", blks)

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "Partition":
        """Build from a restricted-growth string (0-based block index per position)."""
        blocks: dict[int, list[int]] = {}
        for pos, v in enumerate(rgs, start=1):
            blocks.setdefault(v, []).append(pos)
        return cls(blocks.values(), m=len(rgs))

    @property
    def rgs(self) -> tuple[int, ...]:
        out = [0] * self.m
        for idx, b in enumerate(self.blocks):
            for pos in b:
                out[pos - 1] = idx
        return tuple(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.blocks == other.blocks and self.m == other.m

    def __hash__(self) -> int:
        return hash((self.m, self.blocks))

    def __str__(self) -> str:
        return "/".join(",".join(str(x) for x in b) for b in self.blocks)

    def __repr__(self) -> str:
        return f"Partition({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "Partition":
        try:
            blocks = [[int(x) for x in part.split(",")] for part in text.strip().split("/")]
        except ValueError as exc:
            raise InputError(f"cannot parse partition {text!r}: {exc}") from None
        return cls(blocks)


def num_blocks(p: Partition) -> int:
    return len(p.blocks)


def is_refinement(p: Partition, q: Partition) -> bool:
    """True iff every block of p lies inside a block of q."""
    if p.m != q.m:
        raise InputError(f"ground-set mismatch: {p.m} vs {q.m}")
    owner = {}
    for idx, b in enumerate(q.blocks):
        for x in b:
            owner[x] = idx
    return all(len({owner[x] for x in b}) == 1 for b in p.blocks)


def _check_block_pair(B: Sequence[int], C: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    bb, cc = tuple(sorted(B)), tuple(sorted(C))
    if not bb or not cc:
        raise InputError("blocks must be non-empty")
    if set(bb) & set(cc):
        raise InputError("blocks overlap")
    return bb, cc


def nested(B: Sequence[int], C: Sequence[int]) -> bool:
    """True iff all of B sits strictly inside a single gap of C."""
    bb, cc = _check_block_pair(B, C)
    j = bisect_left(cc, bb[0])
    # need some element of C below min(B) and the next element of C above max(B)
    return 0 < j < len(cc) and bb[-1] < cc[j]


def crossing(B: Sequence[int], C: Sequence[int]) -> bool:
    """True iff the blocks interleave (b < c < b' < c' in either role assignment)."""
    bb, cc = _check_block_pair(B, C)
    hulls_overlap = not (bb[-1] < cc[0] or cc[-1] < bb[0])
    # disjoint blocks with overlapping hulls are nested one way or cross;
    # the brute-force quadruple test in the suite guards this trichotomy
    return hulls_overlap and not nested(bb, cc) and not nested(cc, bb)


def nesting_crossing_graph(p: Partition):
    """Digraph on block indices 1..k: edge (i,j) iff block i is nested in block j or they cross."""
    from .digraph import Digraph

    k = len(p.blocks)
    edges = set()
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if nested(p.blocks[i], p.blocks[j]) or crossing(p.blocks[i], p.blocks[j]):
                edges.add((i + 1, j + 1))
    return Digraph(range(1, k + 1), edges)


def _nesting_parents(p: Partition) -> list[int | None]:
    """parent[i] = index of the innermost block whose hull strictly contains block i."""
    parents: list[int | None] = []
    for i, b in enumerate(p.blocks):
        best = None
        for j, c in enumerate(p.blocks):
            if i == j:
                continue
            if c[0] < b[0] and b[-1] < c[-1]:
                if best is None or c[0] > p.blocks[best][0]:
                    best = j
        parents.append(best)
    return parents


def nesting_forest_label_count(p: Partition) -> int:
    """Number of bijective block labellings by 1..k weakly increasing outward
    along nesting (inner blocks get smaller labels).

    Requires a non-crossing partition so that hull containment is a forest
    order. Computed by the hook length formula for forests: k! divided by the
    product of subtree sizes.
    """
    k = len(p.blocks)
    for i in range(k):
        for j in range(i + 1, k):
            if crossing(p.blocks[i], p.blocks[j]):
                raise InputError("partition has crossing blocks")
    parents = _nesting_parents(p)
    subtree = [1] * k
    # children have strictly larger hull minimum, so iterating by descending
    # minimum accumulates child counts before their parent is visited
    for i in sorted(range(k), key=lambda i: -p.blocks[i][0]):
        if parents[i] is not None:
            subtree[parents[i]] += subtree[i]
    denom = math.prod(subtree)
    count, rem = divmod(math.factorial(k), denom)
    assert rem == 0
    return count


def monotone_label_count(p: Partition) -> int:
    """Nesting-compatible labelling count M for a non-crossing pairing."""
    if any(len(b) != 2 for b in p.blocks):
        raise InputError("not a pairing")
    return nesting_forest_label_count(p)


def enumerate_partitions(m: int, pclass: PartitionClass = PartitionClass.ALL) -> Iterator[Partition]:
    """Yield each partition of {1..m} in the class once, in lexicographic
    order of restricted-growth encodings."""
    if m < 1:
        raise InputError("m must be positive")
    cap = ENUM_CAP_PAIRING if pclass in (PartitionClass.PAIRING, PartitionClass.NON_CROSSING_PAIRING) else ENUM_CAP_ALL
    if m > cap:
        raise CapExceeded(f"enumeration of {pclass.value} partitions capped at m <= {cap}, got {m}")
    yield from (Partition.from_rgs(r) for r in _iter_rgs(m, pclass))


def _iter_rgs(m: int, pclass: PartitionClass) -> Iterator[tuple[int, ...]]:
    nc = pclass in (PartitionClass.NON_CROSSING, PartitionClass.NON_CROSSING_PAIRING)
    pairing = pclass in (PartitionClass.PAIRING, PartitionClass.NON_CROSSING_PAIRING)
    even = pclass is PartitionClass.EVEN
    no_single = pclass is PartitionClass.NO_SINGLETON

    rgs = [0] * m
    sizes: list[int] = []

    def feasible(rest: int, odd_open: int) -> bool:
        # odd_open counts blocks that still need at least one more element
        if pairing or even:
            return odd_open <= rest and (rest - odd_open) % 2 == 0
        if no_single:
            return odd_open <= rest
        return True

    def rec(pos: int, stack: tuple[int, ...], odd_open: int) -> Iterator[tuple[int, ...]]:
        if pos == m:
            yield tuple(rgs)
            return
        rest = m - pos - 1
        if nc:
            cands = (stack[-1:] if pairing else stack) + (len(sizes),)
        elif pairing:
            cands = tuple(v for v in range(len(sizes)) if sizes[v] == 1) + (len(sizes),)
        else:
            cands = tuple(range(len(sizes) + 1))
        for v in cands:
            new_block = v == len(sizes)
            rgs[pos] = v
            if new_block:
                sizes.append(1)
                delta = 1
                nxt_stack = stack + (v,) if nc else stack
            else:
                sizes[v] += 1
                if pairing:
                    delta = -1
                elif even:
                    delta = 1 if sizes[v] % 2 == 1 else -1
                else:  # no_single: block leaves deficit once it reaches size 2
                    delta = -1 if sizes[v] == 2 else 0
                if nc:
                    # extending v closes every block opened after it
                    depth = stack.index(v)
                    nxt_stack = stack[: depth + 1]
                    if pairing:
                        nxt_stack = nxt_stack[:-1]
                else:
                    nxt_stack = stack
            if feasible(rest, odd_open + delta):
                yield from rec(pos + 1, nxt_stack, odd_open + delta)
            if new_block:
                sizes.pop()
            else:
                sizes[v] -= 1

    return rec(0, (), 0)
