"""Finite-dimensional tensor-operator realization of graph independence.

Each vertex acts on its own slot of a Kronecker product; slots belonging
to other vertices carry either the identity (edge present) or the rank-1
projection onto that slot's distinguished unit vector (edge absent). The
vector state against the product of the unit vectors then reproduces the
combinatorial mixed moments, which is what makes this module the oracle
for the exact engine.

Everything here is complex double precision.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .digraph import Digraph, order_relation
from .errors import CapExceeded, InputError
from .moments import BmtEnsemble, mixed_moment

MODEL_DIM_CAP = 4096
MATERIALIZE_CAP = 256
ORACLE_TOL = 1e-10
REPRESENTATION_TOL = 1e-12


@dataclass(frozen=True)
class Site:
    """Local dimension, distinguished unit vector, and the vertex's matrix."""

    dim: int
    vec: np.ndarray
    op: np.ndarray

    def __post_init__(self):
        if self.dim < 2:
            raise InputError(f"site dimension must be >= 2, got {self.dim}")
        vec = np.asarray(self.vec, dtype=complex).reshape(-1)
        op = np.asarray(self.op, dtype=complex)
        if vec.shape != (self.dim,):
            raise InputError(f"unit vector has shape {vec.shape}, expected ({self.dim},)")
        if op.shape != (self.dim, self.dim):
            raise InputError(f"site matrix has shape {op.shape}, expected square of dim {self.dim}")
        if abs(np.linalg.norm(vec) - 1.0) > REPRESENTATION_TOL:
            raise InputError("distinguished vector must have unit norm")
        vec.setflags(write=False)
        op.setflags(write=False)
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "op", op)


def bernoulli_site() -> Site:
    return Site(2, np.array([1.0, 1.0]) / math.sqrt(2.0), np.diag([1.0, -1.0]))


def poisson_site(lam: Fraction | int, N: int) -> Site:
    p = float(Fraction(lam)) / N
    if not 0.0 <= p <= 1.0:
        raise InputError(f"lambda/N must lie in [0,1], got {p}")
    return Site(2, np.array([math.sqrt(p), math.sqrt(1.0 - p)]), np.diag([1.0, 0.0]))


def projection(site: Site) -> np.ndarray:
    """Rank-1 projection onto the site's distinguished vector."""
    return np.outer(site.vec, site.vec.conj())


class OperatorModel:
    """Assembled operators for one digraph and one site per vertex."""

    def __init__(self, graph: Digraph, sites: Sequence[Site]):
        if len(sites) != len(graph.vertices):
            raise InputError(f"{len(graph.vertices)} vertices but {len(sites)} sites")
        self.graph = graph
        self.sites = tuple(sites)
        self.dims = tuple(s.dim for s in self.sites)
        self.total_dim = math.prod(self.dims)
        if self.total_dim > MODEL_DIM_CAP:
            raise CapExceeded(f"total dimension {self.total_dim} exceeds cap {MODEL_DIM_CAP}")
        self._slot = {v: j for j, v in enumerate(graph.vertices)}
        self._site_of = dict(zip(graph.vertices, self.sites))

        xi = self.sites[0].vec
        for s in self.sites[1:]:
            xi = np.kron(xi, s.vec)
        self._xi_flat = xi
        self._xi_tensor = xi.reshape(self.dims)

        # non-identity factors of pi_v, keyed by slot
        self._factors: dict[int, list[tuple[int, np.ndarray]]] = {}
        for v in graph.vertices:
            facs = [(self._slot[v], self._site_of[v].op)]
            for u in graph.vertices:
                if u != v and not graph.has_edge(v, u):
                    facs.append((self._slot[u], projection(self._site_of[u])))
            self._factors[v] = facs

        self._ops: dict[int, np.ndarray] | None = None
        if self.total_dim <= MATERIALIZE_CAP:
            self._ops = {v: self.embed(v, self._site_of[v].op) for v in graph.vertices}

    def site(self, v: int) -> Site:
        try:
            return self._site_of[v]
        except KeyError:
            raise InputError(f"unknown vertex {v}") from None

    def embed(self, v: int, local: np.ndarray) -> np.ndarray:
        """Full matrix of pi_v(local). Only for small models."""
        if self.total_dim > MATERIALIZE_CAP:
            raise CapExceeded(f"materializing {self.total_dim}x{self.total_dim} refused")
        if v not in self._slot:
            raise InputError(f"unknown vertex {v}")
        local = np.asarray(local, dtype=complex)
        out = np.array([[1.0 + 0.0j]])
        for u in self.graph.vertices:
            if u == v:
                factor = local
            elif self.graph.has_edge(v, u):
                factor = np.eye(self._site_of[u].dim, dtype=complex)
            else:
                factor = projection(self._site_of[u])
            out = np.kron(out, factor)
        return out

    def operator(self, v: int) -> np.ndarray:
        if self._ops is None:
            raise CapExceeded(f"operators not materialized at dimension {self.total_dim}")
        if v not in self._ops:
            raise InputError(f"unknown vertex {v}")
        return self._ops[v]

    def apply(self, v: int, vec: np.ndarray) -> np.ndarray:
        """pi_v applied to a flat vector, without building the matrix."""
        if v not in self._slot:
            raise InputError(f"unknown vertex {v}")
        if self._ops is not None:
            return self._ops[v] @ vec
        t = vec.reshape(self.dims)
        for slot, factor in self._factors[v]:
            t = np.moveaxis(np.tensordot(factor, t, axes=(1, slot)), 0, slot)
        return t.reshape(-1)

    def state_vector(self) -> np.ndarray:
        return self._xi_flat

    def moment(self, word: Sequence[int]) -> complex:
        vec = self._xi_flat
        for letter in reversed(tuple(word)):
            vec = self.apply(letter, vec)
        return complex(np.vdot(self._xi_flat, vec))


def build(graph: Digraph, sites: Sequence[Site]) -> OperatorModel:
    model = OperatorModel(graph, sites)
    for v in graph.vertices:
        site = model.site(v)
        local = complex(np.vdot(site.vec, site.op @ site.vec))
        assembled = model.moment((v,))
        if abs(assembled - local) > REPRESENTATION_TOL:
            raise RuntimeError(f"marginal mismatch at vertex {v}: {assembled} vs {local}")
    return model


def state_moment(model: OperatorModel, word: Sequence[int]) -> complex:
    return model.moment(word)


@dataclass
class VerifyReport:
    cases: int
    tolerance: float
    max_deviation: float = 0.0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_bmt(
    model: OperatorModel,
    ensemble: BmtEnsemble,
    max_len: int,
    rng=None,
    samples: int = 2000,
) -> VerifyReport:
    """Compare every state moment against the combinatorial engine.

    Exhaustive over all nonempty words up to max_len when that stays small
    (|V| <= 5 and max_len <= 6); otherwise a random sample of `samples`
    words drawn with rng.
    """
    if ensemble.graph != model.graph:
        raise InputError("ensemble graph differs from model graph")
    for v in model.graph.vertices:
        site = model.site(v)
        local = site.vec.copy()
        for k in range(1, max_len + 1):
            local = site.op @ local
            want = float(ensemble.marginal(v).moment(k))
            got = complex(np.vdot(site.vec, local))
            if abs(got - want) > ORACLE_TOL:
                raise InputError(
                    f"site at vertex {v} has moment({k}) = {got}, marginal says {want}"
                )

    report = VerifyReport(cases=0, tolerance=ORACLE_TOL)

    def record(word: tuple[int, ...], vec: np.ndarray) -> None:
        got = complex(np.vdot(model._xi_flat, vec))
        want = float(mixed_moment(ensemble, word))
        dev = abs(got - want)
        report.cases += 1
        if dev > report.max_deviation:
            report.max_deviation = dev
        if dev > ORACLE_TOL:
            report.violations.append((word, dev))

    vertices = model.graph.vertices
    if len(vertices) <= 5 and max_len <= 6:
        def walk(word: tuple[int, ...], vec: np.ndarray) -> None:
            if word:
                record(word, vec)
            if len(word) == max_len:
                return
            for v in vertices:
                # prepending a letter applies its operator on the left
                walk((v,) + word, model.apply(v, vec))

        walk((), model._xi_flat)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        for _ in range(samples):
            length = int(rng.integers(1, max_len + 1))
            word = tuple(int(rng.choice(vertices)) for _ in range(length))
            vec = model._xi_flat
            for letter in reversed(word):
                vec = model.apply(letter, vec)
            record(word, vec)
    return report


_BM1_PATTERNS = ("below-peak-below", "incomparable-peak-below", "below-peak-incomparable")


@dataclass
class Bm1Report:
    triples: list
    draws: int
    tolerance: float
    max_deviation: float = 0.0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def bm1_triples(order: Iterable[tuple[int, int]], vertices: Sequence[int]) -> list[tuple[str, int, int, int]]:
    """All (pattern, x, peak, y) triples the operator identity applies to."""
    rel = frozenset((int(a), int(b)) for a, b in order)

    def below(a, b):
        return (a, b) in rel

    def incomp(a, b):
        return a != b and not below(a, b) and not below(b, a)

    out = []
    for x, r, y in itertools.permutations(vertices, 3):
        if below(x, r) and below(y, r):
            out.append((_BM1_PATTERNS[0], x, r, y))
        elif incomp(x, r) and below(y, r):
            out.append((_BM1_PATTERNS[1], x, r, y))
        elif below(x, r) and incomp(r, y):
            out.append((_BM1_PATTERNS[2], x, r, y))
    return out


def verify_bm1(model: OperatorModel, order: Iterable[tuple[int, int]], draws: int = 20, seed: int = 0) -> Bm1Report:
    """Check the middle-letter extraction identity at the operator level:
    pi_x(A) pi_r(B) pi_y(C) equals <B xi_r, xi_r> * pi_x(A) pi_y(C) for every
    triple matching one of the three order patterns."""
    rel = frozenset((int(a), int(b)) for a, b in order)
    if rel != order_relation(model.graph):
        raise InputError("order does not match the model graph")
    triples = bm1_triples(rel, model.graph.vertices)
    report = Bm1Report(triples=triples, draws=draws, tolerance=ORACLE_TOL)
    rng = np.random.default_rng(seed)

    def random_local(d: int) -> np.ndarray:
        return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))

    for pattern, x, r, y in triples:
        for _ in range(draws):
            a = random_local(model.site(x).dim)
            b = random_local(model.site(r).dim)
            c = random_local(model.site(y).dim)
            phi_b = complex(np.vdot(model.site(r).vec, b @ model.site(r).vec))
            left = model.embed(x, a) @ model.embed(r, b) @ model.embed(y, c)
            right = phi_b * (model.embed(x, a) @ model.embed(y, c))
            dev = float(np.max(np.abs(left - right)))
            if dev > report.max_deviation:
                report.max_deviation = dev
            if dev > ORACLE_TOL:
                report.violations.append(((pattern, x, r, y), dev))
    return report
