"""Implementation behind the service endpoints. The CLI calls these
functions in process, so there is exactly one behavior to test."""

from __future__ import annotations

import itertools
from fractions import Fraction

from ..digraph import Digraph, format_graph, parse_family, parse_graph
from ..distributions import (
    MomentSequence,
    centered_bernoulli,
    parse_law,
    poisson_bernoulli,
    reference_moment,
)
from ..errors import InputError
from ..kernel import ker, ker_g, kernel_equality_criterion, relabeled_ncg
from ..limits import clt_table, poisson_table
from ..moments import BmtEnsemble, mixed_moment, pair_partition_moment_is_indicator
from ..operator_model import bernoulli_site, build, verify_bmt
from ..partitions import PartitionClass, enumerate_partitions
from .schemas import (
    CltResponse,
    CltSummary,
    GraphGenResponse,
    GraphInput,
    KernelResponse,
    LawEntry,
    LawResponse,
    MomentResponse,
    OperatorVerifyResponse,
    PoissonResponse,
    Rational,
    SelftestCheck,
    SelftestResponse,
    TableCell,
)


def parse_rational(text: str | None, default: Fraction = Fraction(1)) -> Fraction:
    if text is None:
        return default
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}: {exc}") from None


def resolve_graph(spec: GraphInput) -> Digraph:
    if spec.text is not None:
        return parse_graph(spec.text)
    family = parse_family(spec.family)
    return family.build(spec.N)


def _marginal_for(name: str, lam: str | None, graph: Digraph) -> MomentSequence:
    name = name.strip().lower()
    if name == "bernoulli":
        return centered_bernoulli()
    if name == "poisson":
        return poisson_bernoulli(parse_rational(lam), len(graph.vertices))
    raise InputError(f"unknown marginal {name!r}; known: bernoulli, poisson")


def kernel_report(word: list[int], graph_spec: GraphInput) -> KernelResponse:
    word_t = tuple(word)
    if not word_t:
        raise InputError("empty word")
    g = resolve_graph(graph_spec)
    equal, subgraph = kernel_equality_criterion(word_t, g)
    return KernelResponse(
        word=list(word_t),
        ker=str(ker(word_t)),
        ker_g=str(ker_g(word_t, g)),
        equal=equal,
        ncg_subgraph=subgraph,
        ncg_edges=sorted(relabeled_ncg(word_t).edges),
    )


def moment_report(
    word: list[int], graph_spec: GraphInput, marginal: str = "bernoulli", lam: str | None = None
) -> MomentResponse:
    g = resolve_graph(graph_spec)
    law = _marginal_for(marginal, lam, g)
    ens = BmtEnsemble.uniform(g, law)
    value = mixed_moment(ens, tuple(word))
    return MomentResponse(
        moment=Rational.from_fraction(value),
        kernel=str(ker_g(tuple(word), g)),
        marginal=law.name,
    )


def law_table(name: str, upto: int, lam: str | None = None) -> LawResponse:
    rate = None if lam is None else parse_rational(lam)
    law = parse_law(name, rate)
    entries = [
        LawEntry(k=k, value=Rational.from_fraction(reference_moment(law, k)))
        for k in range(1, upto + 1)
    ]
    return LawResponse(law=law.name, moments=entries)


def operator_verify_report(graph_spec: GraphInput, max_len: int = 6, seed: int = 0) -> OperatorVerifyResponse:
    import numpy as np

    g = resolve_graph(graph_spec)
    ens = BmtEnsemble.uniform(g, centered_bernoulli())
    model = build(g, [bernoulli_site() for _ in g.vertices])
    report = verify_bmt(model, ens, max_len, rng=np.random.default_rng(seed))
    return OperatorVerifyResponse(
        cases=report.cases,
        ok=report.ok,
        max_deviation=report.max_deviation,
        tolerance=report.tolerance,
        violations=[f"word {w}: deviation {d:.3e}" for w, d in report.violations],
    )


def _cells(rows) -> list[TableCell]:
    out = []
    for r in rows:
        out.append(
            TableCell(
                N=r.N,
                m=r.m,
                exact=Rational.from_fraction(r.exact),
                leading=Rational.from_fraction(r.leading),
                reference=None if r.reference is None else Rational.from_fraction(r.reference),
                gap_leading=Rational.from_fraction(r.gap_leading),
                gap_reference=None if r.gap_reference is None else Rational.from_fraction(r.gap_reference),
            )
        )
    return out


def clt_payload(family: str, n_list: list[int], moments: list[int]) -> CltResponse:
    fam = parse_family(family)
    if not n_list or not moments:
        raise InputError("N list and moments list must be nonempty")
    table = clt_table(fam, centered_bernoulli(), n_list, moments)
    summary = [
        CltSummary(m=m, fitted_c=table.fitted_c[m], monotone_decay=table.monotone_decay[m])
        for m in sorted(table.fitted_c)
    ]
    return CltResponse(family=fam.spec(), rows=_cells(table.rows), summary=summary)


def poisson_payload(family: str, lam: str, n_list: list[int], moments: list[int]) -> PoissonResponse:
    fam = parse_family(family)
    if not n_list or not moments:
        raise InputError("N list and moments list must be nonempty")
    rate = parse_rational(lam)
    rows = poisson_table(fam, rate, n_list, moments)
    return PoissonResponse(family=fam.spec(), lam=str(rate), rows=_cells(rows))


def graph_gen_text(spec: str, N: int | None = None) -> GraphGenResponse:
    return GraphGenResponse(text=format_graph(parse_family(spec).build(N)))


def _check(name: str, fn) -> SelftestCheck:
    try:
        detail = fn()
        return SelftestCheck(name=name, ok=True, detail=detail)
    except Exception as exc:  # report, never raise: this is a diagnostics surface
        return SelftestCheck(name=name, ok=False, detail=f"{type(exc).__name__}: {exc}")


def _all_digraphs_on(vertices: tuple[int, ...]):
    pairs = [(u, v) for u in vertices for v in vertices if u != v]
    for bits in range(2 ** len(pairs)):
        yield Digraph(vertices, [p for i, p in enumerate(pairs) if bits >> i & 1])


def selftest_report() -> SelftestResponse:
    bern = centered_bernoulli()

    def partitions_check() -> str:
        counts = [len(list(enumerate_partitions(m, PartitionClass.ALL))) for m in range(1, 7)]
        if counts != [1, 2, 5, 15, 52, 203]:
            raise RuntimeError(f"partition counts {counts}")
        rgs = [p.rgs for p in enumerate_partitions(6, PartitionClass.PAIRING)]
        if rgs != sorted(rgs) or len(rgs) != 15:
            raise RuntimeError("pairings out of order")
        return "Bell counts through m=6, pairings lexicographic"

    def kernel_check() -> str:
        word = (4, 1, 3, 4, 1, 4)
        if str(ker(word)) != "1,4,6/2,5/3":
            raise RuntimeError(f"ker gave {ker(word)}")
        ncg = relabeled_ncg((1, 8, 8, 4, 1, 5, 8))
        want = {(1, 8), (8, 1), (4, 1), (4, 8), (5, 8)}
        if ncg.edges != want:
            raise RuntimeError(f"relabeled graph edges {sorted(ncg.edges)}")
        return "worked kernel and nesting-crossing examples"

    def criterion_check() -> str:
        cases = 0
        for g in _all_digraphs_on((1, 2, 3)):
            for length in range(1, 5):
                for w in itertools.product((1, 2, 3), repeat=length):
                    equal, subgraph = kernel_equality_criterion(w, g)
                    if equal != subgraph:
                        raise RuntimeError(f"criterion split on {w} / {sorted(g.edges)}")
                    cases += 1
        return f"{cases} word/graph cases"

    def oracle_check() -> str:
        worst = 0.0
        cases = 0
        for g in _all_digraphs_on((1, 2, 3)):
            ens = BmtEnsemble.uniform(g, bern)
            model = build(g, [bernoulli_site() for _ in range(3)])
            report = verify_bmt(model, ens, 4)
            if not report.ok:
                raise RuntimeError(f"oracle mismatch on {sorted(g.edges)}")
            worst = max(worst, report.max_deviation)
            cases += report.cases
        return f"{cases} cases, max deviation {worst:.2e}"

    def singleton_check() -> str:
        cases = 0
        for g in _all_digraphs_on((1, 2, 3)):
            ens = BmtEnsemble.uniform(g, bern)
            for length in range(1, 5):
                for w in itertools.product((1, 2, 3), repeat=length):
                    if any(len(b) == 1 for b in ker(w).blocks):
                        if mixed_moment(ens, w) != 0:
                            raise RuntimeError(f"singleton condition broken on {w}")
                        cases += 1
        return f"{cases} singleton words all vanish"

    def indicator_check() -> str:
        cases = 0
        for g in _all_digraphs_on((1, 2)):
            ens = BmtEnsemble.uniform(g, bern)
            for w in [(1, 2, 1, 2), (1, 2, 2, 1), (1, 1, 2, 2)]:
                pair_partition_moment_is_indicator(ens, w)
                cases += 1
        return f"{cases} pairing words kept the 0/1 law"

    def roundtrip_check() -> str:
        specs = ["empty:4", "complete:3", "totalorder:4", "turan:6,3", "counterexample:3"]
        for s in specs:
            g = parse_family(s).build()
            if parse_graph(format_graph(g)) != g:
                raise RuntimeError(f"round trip failed for {s}")
        return f"{len(specs)} family graphs round-trip"

    checks = [
        _check("partition enumeration", partitions_check),
        _check("kernel worked examples", kernel_check),
        _check("kernel equality criterion", criterion_check),
        _check("operator oracle agreement", oracle_check),
        _check("singleton condition", singleton_check),
        _check("pairing indicator", indicator_check),
        _check("graph text round-trip", roundtrip_check),
    ]
    return SelftestResponse(ok=all(c.ok for c in checks), checks=checks)
