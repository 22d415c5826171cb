"""Kernels of words relative to an independence digraph.

Positions in a word are 1-based so they line up with partition elements.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from .digraph import Digraph, is_subgraph
from .errors import InputError
from .partitions import Partition, nesting_crossing_graph

Word = tuple[int, ...]


def parse_word(text: str) -> Word:
    parts = [p.strip() for p in text.split(",")]
    if not parts or any(not p for p in parts):
        raise InputError(f"bad word {text!r}")
    try:
        word = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"bad word {text!r}: {exc}") from None
    if any(x < 1 for x in word):
        raise InputError("word letters must be positive integers")
    return word


def _letter_positions(word: Sequence[int]) -> dict[int, list[int]]:
    pos = defaultdict(list)
    for k, letter in enumerate(word, start=1):
        pos[letter].append(k)
    return pos


def ker(word: Sequence[int]) -> Partition:
    """Plain kernel: positions carrying the same letter share a block."""
    if not word:
        raise InputError("empty word")
    return Partition(_letter_positions(word).values(), m=len(word))


def ker_g(word: Sequence[int], graph: Digraph) -> Partition:
    """Kernel relative to a digraph.

    Two positions of the same letter are joined exactly when every
    strictly intermediate position with a different letter carries an
    edge toward that letter. Joining is transitive along consecutive
    occurrences, so one left-to-right walk per letter suffices.
    """
    if not word:
        raise InputError("empty word")
    for letter in set(word):
        if not graph.has_vertex(letter):
            raise InputError(f"letter {letter} is not a graph vertex")
    blocks = []
    for letter, positions in _letter_positions(word).items():
        current = [positions[0]]
        for prev, nxt in zip(positions, positions[1:]):
            joined = all(
                graph.has_edge(word[mid - 1], letter)
                for mid in range(prev + 1, nxt)
                if word[mid - 1] != letter
            )
            if joined:
                current.append(nxt)
            else:
                blocks.append(current)
                current = [nxt]
        blocks.append(current)
    return Partition(blocks, m=len(word))


def relabeled_ncg(word: Sequence[int]) -> Digraph:
    """Nesting-crossing graph of the plain kernel, with each block renamed
    to the letter it carries."""
    partition = ker(word)
    letter_of = {b: word[block[0] - 1] for b, block in enumerate(partition.blocks, start=1)}
    ncg = nesting_crossing_graph(partition)
    return Digraph(letter_of.values(), ((letter_of[u], letter_of[v]) for u, v in ncg.edges))


def kernel_equality_criterion(word: Sequence[int], graph: Digraph) -> tuple[bool, bool]:
    """Return (ker_g equals plain ker, relabeled NCG is a subgraph of graph).

    The two booleans always agree; returning both lets callers check the
    equivalence rather than trust it.
    """
    equal = ker_g(word, graph) == ker(word)
    ncg = relabeled_ncg(word)
    subgraph = is_subgraph(ncg, graph)
    return equal, subgraph
