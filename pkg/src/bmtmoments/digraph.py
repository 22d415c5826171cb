"""Simple directed graphs on integer vertices, plus the generator families.

Undirected relations are always represented as both orientations; a single
directed edge is the order-sensitive (monotone) relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import CapExceeded, InputError

VERTEX_CAP = 512


class Digraph:
    """Loop-free digraph with a sorted vertex tuple and a frozen edge set."""

    __slots__ = ("vertices", "edges", "_vset")

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        vs = tuple(sorted(set(int(v) for v in vertices)))
        if any(v < 1 for v in vs):
            raise InputError("vertices must be positive integers")
        vset = frozenset(vs)
        es = frozenset((int(u), int(v)) for u, v in edges)
        for u, v in es:
            if u == v:
                raise InputError(f"loop at vertex {u}")
            if u not in vset or v not in vset:
                raise InputError(f"edge ({u},{v}) leaves the vertex set")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)
        object.__setattr__(self, "_vset", vset)

    def __setattr__(self, name, value):
        raise AttributeError("Digraph is immutable")

    def has_vertex(self, v: int) -> bool:
        return v in self._vset

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Digraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges))

    def __repr__(self) -> str:
        return f"Digraph(vertices={list(self.vertices)}, edges={sorted(self.edges)})"


def is_subgraph(g: Digraph, h: Digraph) -> bool:
    return set(g.vertices) <= set(h.vertices) and g.edges <= h.edges


def restrict(g: Digraph, vs: Iterable[int]) -> Digraph:
    """Induced subgraph on vs."""
    keep = set(vs)
    unknown = keep - set(g.vertices)
    if unknown:
        raise InputError(f"unknown vertices {sorted(unknown)}")
    return Digraph(keep, ((u, v) for u, v in g.edges if u in keep and v in keep))


def symmetric_difference_size(g: Digraph, h: Digraph) -> int:
    if g.vertices != h.vertices:
        raise InputError("vertex sets differ")
    return len(g.edges ^ h.edges)


def add_edges(g: Digraph, extra: Iterable[tuple[int, int]]) -> Digraph:
    return Digraph(g.vertices, set(g.edges) | set(extra))


def random_digraph(vertices: Sequence[int], rng, p: float = 0.5) -> Digraph:
    """Each ordered pair becomes an edge independently with probability p."""
    vs = list(vertices)
    edges = [(u, v) for u in vs for v in vs if u != v and rng.random() < p]
    return Digraph(vs, edges)


def format_graph(g: Digraph) -> str:
    lines = ["vertices: " + " ".join(str(v) for v in g.vertices)]
    lines += [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Digraph:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or not lines[0].startswith("vertices:"):
        raise InputError("graph text must start with a 'vertices:' line")
    try:
        vertices = [int(x) for x in lines[0][len("vertices:"):].split()]
    except ValueError as exc:
        raise InputError(f"bad vertex list: {exc}") from None
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"bad edge line {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise InputError(f"bad edge line {line!r}: {exc}") from None
    return Digraph(vertices, edges)


def digraph_of_order(n: int, precedes: Iterable[tuple[int, int]]) -> Digraph:
    """Digraph of a partial order on 1..n given (a,b) pairs meaning a strictly
    below b; takes the transitive closure and emits the edge (larger, smaller)
    for every comparable pair."""
    below = {(int(a), int(b)) for a, b in precedes}
    for a, b in below:
        if not (1 <= a <= n and 1 <= b <= n):
            raise InputError(f"order pair ({a},{b}) outside, 1..{n}")
        if a == b:
            raise InputError("order is irreflexive")
    changed = True
    while changed:
        changed = False
        for a, b in list(below):
            for c, d in list(below):
                if b == c and (a, d) not in below:
                    below.add((a, d))
                    changed = True
    for a, b in below:
        if (b, a) in below:
            raise InputError(f"not antisymmetric: {a} and {b}")
    return Digraph(range(1, n + 1), ((b, a) for a, b in below))


def order_relation(g: Digraph) -> set[tuple[int, int]]:
    """Recover the strict order from a partial-order digraph: (a,b) meaning
    a below b iff (b,a) is an edge and (a,b) is not. Validates the shape."""
    for u, v in g.edges:
        if (v, u) in g.edges:
            raise InputError(f"double edge between {u} and {v}: not a partial order")
    rel = {(v, u) for u, v in g.edges}
    for a, b in rel:
        for c, d in rel:
            if b == c and (a, d) not in rel:
                raise InputError(f"order not transitive at {a} < {b} < {d}")
    return rel


_FAMILY_KINDS = (
    "empty",
    "complete",
    "totalorder",
    "partialorder",
    "bipartite",
    "turan",
    "disjointpair",
    "counterexample",
)


@dataclass(frozen=True)
class GraphFamily:
    """A named generator with raw argument tokens; integer tokens may be the
    placeholder 'N' or 'N/2' so one family can be swept over sizes."""

    kind: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in _FAMILY_KINDS:
            raise InputError(f"unknown family {self.kind!r}; known: {', '.join(_FAMILY_KINDS)}")

    @property
    def needs_n(self) -> bool:
        return any("N" in a for a in self.args)

    def spec(self) -> str:
        return self.kind + (":" + ",".join(self.args) if self.args else "")

    def _int(self, token: str, N: int | None) -> int:
        token = token.strip()
        if token == "N" or token == "N/2":
            if N is None:
                raise InputError(f"family {self.spec()!r} needs an N value")
            if token == "N":
                return N
            if N % 2:
                raise InputError("N/2 requires even N")
            return N // 2
        try:
            return int(token)
        except ValueError:
            raise InputError(f"bad integer token {token!r} in family {self.spec()!r}") from None

    def build(self, N: int | None = None) -> Digraph:
        return generate(self, N)


def parse_family(spec: str) -> GraphFamily:
    spec = spec.strip()
    if ":" in spec:
        kind, argstr = spec.split(":", 1)
        args = tuple(a.strip() for a in argstr.split(",") if a.strip())
    else:
        kind, args = spec, ()
    return GraphFamily(kind.lower(), args)


def generate(family: GraphFamily, N: int | None = None) -> Digraph:
    kind, args = family.kind, family.args

    def arg(i: int) -> int:
        if i >= len(args):
            raise InputError(f"family {family.spec()!r} is missing argument {i + 1}")
        return family._int(args[i], N)

    if kind == "empty":
        n = _checked_size(arg(0))
        return Digraph(range(1, n + 1))
    if kind == "complete":
        n = _checked_size(arg(0))
        return _complete_on(range(1, n + 1))
    if kind == "totalorder":
        n = _checked_size(arg(0))
        return Digraph(range(1, n + 1), ((j, i) for i in range(1, n + 1) for j in range(i + 1, n + 1)))
    if kind == "partialorder":
        n = _checked_size(arg(0))
        pairs = []
        for token in args[1:]:
            if "<" not in token:
                raise InputError(f"partial order token {token!r} must look like a<b")
            a, b = token.split("<", 1)
            pairs.append((family._int(a, N), family._int(b, N)))
        return digraph_of_order(n, pairs)
    if kind == "bipartite":
        m, l = arg(0), arg(1)
        return _multipartite([m, l])
    if kind == "turan":
        n, r = _checked_size(arg(0)), arg(1)
        if not 1 <= r <= n:
            raise InputError(f"turan needs 1 <= r <= N, got r={r}, N={n}")
        q, s = divmod(n, r)
        return _multipartite([q + 1] * s + [q] * (r - s))
    if kind == "disjointpair":
        m, l = arg(0), arg(1)
        _checked_size(m + l)
        first = _complete_on(range(1, m + 1)).edges
        second = _complete_on(range(m + 1, m + l + 1)).edges
        return Digraph(range(1, m + l + 1), first | second)
    if kind == "counterexample":
        n = arg(0)
        if n < 0:
            raise InputError("counterexample index must be >= 0")
        if 2**n > VERTEX_CAP:
            raise CapExceeded(f"counterexample({n}) has {2**n} vertices; cap {VERTEX_CAP}")
        return _counterexample(n)
    raise InputError(f"unknown family {kind!r}")


def _checked_size(n: int) -> int:
    if n < 1:
        raise InputError("graph size must be positive")
    if n > VERTEX_CAP:
        raise CapExceeded(f"vertex count {n} exceeds cap {VERTEX_CAP}")
    return n


def _complete_on(vs: Iterable[int]) -> Digraph:
    vs = list(vs)
    return Digraph(vs, ((u, v) for u in vs for v in vs if u != v))


def _multipartite(part_sizes: Sequence[int]) -> Digraph:
    """Complete multipartite graph: contiguous parts, all cross pairs in both
    orientations, nothing inside a part."""
    if any(s < 0 for s in part_sizes):
        raise InputError("part sizes must be >= 0")
    n = _checked_size(sum(part_sizes))
    part_of = {}
    v = 1
    for idx, size in enumerate(part_sizes):
        for _ in range(size):
            part_of[v] = idx
            v += 1
    edges = ((u, w) for u in range(1, n + 1) for w in range(1, n + 1) if u != w and part_of[u] != part_of[w])
    return Digraph(range(1, n + 1), edges)


def _counterexample(n: int) -> Digraph:
    if n == 0:
        return Digraph([1])
    prev = _counterexample(n - 1)
    shift = len(prev.vertices)
    edges = set(prev.edges)
    edges |= {(u + shift, v + shift) for u, v in prev.edges}
    if n % 2 == 1:
        # odd step: the two copies are joined completely, both orientations
        for u in range(1, shift + 1):
            for v in range(shift + 1, 2 * shift + 1):
                edges.add((u, v))
                edges.add((v, u))
    return Digraph(range(1, 2 * shift + 1), edges)
