"""Tensor-operator realization: representation identities at machine
precision, agreement with the combinatorial engine, and the projection
algebra that drives the middle-letter extraction."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from bmtmoments.digraph import Digraph, digraph_of_order, generate, parse_family, random_digraph
from bmtmoments.distributions import centered_bernoulli, poisson_bernoulli
from bmtmoments.errors import CapExceeded, InputError
from bmtmoments.moments import BmtEnsemble, mixed_moment
from bmtmoments.operator_model import (
    MATERIALIZE_CAP,
    MODEL_DIM_CAP,
    ORACLE_TOL,
    REPRESENTATION_TOL,
    OperatorModel,
    Site,
    bernoulli_site,
    bm1_triples,
    build,
    poisson_site,
    projection,
    state_moment,
    verify_bm1,
    verify_bmt,
)


def test_site_validation():
    with pytest.raises(InputError):
        Site(1, np.array([1.0]), np.eye(1))
    with pytest.raises(InputError):
        Site(2, np.array([1.0, 1.0]), np.eye(2))  # not normalized
    with pytest.raises(InputError):
        Site(2, np.array([1.0, 0.0, 0.0]), np.eye(2))
    with pytest.raises(InputError):
        Site(2, np.array([1.0, 0.0]), np.eye(3))
    s = bernoulli_site()
    assert not s.vec.flags.writeable
    assert not s.op.flags.writeable


def test_bernoulli_site_moments():
    s = bernoulli_site()
    # the distinguished state sees moments 0, 1, 0, 1, ...
    vec = s.vec.copy()
    for k in range(1, 7):
        vec = s.op @ vec
        want = 0.0 if k % 2 else 1.0
        assert abs(np.vdot(s.vec, vec) - want) < REPRESENTATION_TOL


def test_poisson_site_moments():
    s = poisson_site(Fraction(3, 2), 6)
    vec = s.vec.copy()
    for k in range(1, 7):
        vec = s.op @ vec
        assert abs(np.vdot(s.vec, vec) - 0.25) < REPRESENTATION_TOL
    with pytest.raises(InputError):
        poisson_site(7, 6)
    with pytest.raises(InputError):
        poisson_site(-1, 6)


def test_projection_identities():
    rng = np.random.default_rng(0)
    s = bernoulli_site()
    p = projection(s)
    assert np.allclose(p @ p, p, atol=REPRESENTATION_TOL)
    assert np.allclose(p.conj().T, p, atol=REPRESENTATION_TOL)
    for _ in range(10):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        phi_a = np.vdot(s.vec, a @ s.vec)
        # P a P = phi(a) P is the state-extraction identity behind every peak
        assert np.allclose(p @ a @ p, phi_a * p, atol=1e-12)


def test_two_vertex_models_have_the_advertised_matrices():
    empty = build(generate(parse_family("empty:2")), [bernoulli_site(), bernoulli_site()])
    a = np.diag([1.0, -1.0])
    p = np.full((2, 2), 0.5)
    assert np.allclose(empty.operator(1), np.kron(a, p), atol=REPRESENTATION_TOL)
    assert np.allclose(empty.operator(2), np.kron(p, a), atol=REPRESENTATION_TOL)
    complete = build(generate(parse_family("complete:2")), [bernoulli_site(), bernoulli_site()])
    assert np.allclose(complete.operator(1), np.kron(a, np.eye(2)), atol=REPRESENTATION_TOL)
    assert np.allclose(complete.operator(2), np.kron(np.eye(2), a), atol=REPRESENTATION_TOL)


def test_state_vector_and_first_moments():
    model = build(generate(parse_family("empty:2")), [bernoulli_site(), bernoulli_site()])
    xi = model.state_vector()
    assert abs(np.linalg.norm(xi) - 1.0) < REPRESENTATION_TOL
    assert abs(state_moment(model, (1,))) < REPRESENTATION_TOL
    assert abs(state_moment(model, (1, 1)) - 1.0) < REPRESENTATION_TOL
    assert abs(state_moment(model, ())) - 1.0 < REPRESENTATION_TOL


def test_embed_is_multiplicative_per_vertex():
    rng = np.random.default_rng(3)
    g = random_digraph([1, 2, 3], random.Random(8))
    model = build(g, [bernoulli_site()] * 3)
    for v in g.vertices:
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        left = model.embed(v, a) @ model.embed(v, b)
        right = model.embed(v, a @ b)
        assert np.max(np.abs(left - right)) < 1e-12
        adj = model.embed(v, a).conj().T
        assert np.max(np.abs(adj - model.embed(v, a.conj().T))) < 1e-12
        ident = model.embed(v, np.eye(2))
        assert np.max(np.abs(ident @ ident - ident)) < 1e-12


def test_apply_matches_materialized_operator():
    rng = np.random.default_rng(4)
    g = random_digraph([1, 2, 3, 4], random.Random(2))
    model = build(g, [bernoulli_site()] * 4)
    assert model.total_dim == 16
    for v in g.vertices:
        vec = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        assert np.max(np.abs(model.apply(v, vec) - model.operator(v) @ vec)) < 1e-12


def test_matrix_free_path_agrees_with_small_model():
    # same graph, one site of dimension 3 pushes a copy over the
    # materialization cap only when we scale up; here compare both code
    # paths on a 9-site model via sampled words against the engine
    rnd = random.Random(31)
    g = random_digraph(range(1, 10), rnd)
    model = build(g, [bernoulli_site()] * 9)
    assert model.total_dim == 512 > MATERIALIZE_CAP
    ens = BmtEnsemble.uniform(g, centered_bernoulli())
    report = verify_bmt(model, ens, 6, rng=np.random.default_rng(7), samples=400)
    assert report.ok
    assert report.cases == 400
    assert report.max_deviation < ORACLE_TOL
    with pytest.raises(CapExceeded):
        model.operator(1)
    with pytest.raises(CapExceeded):
        model.embed(1, np.eye(2))


def test_dimension_cap():
    g = generate(parse_family("empty:13"))
    with pytest.raises(CapExceeded):
        OperatorModel(g, [bernoulli_site()] * 13)
    with pytest.raises(InputError):
        OperatorModel(generate(parse_family("empty:2")), [bernoulli_site()])


def test_unknown_vertex_errors():
    model = build(generate(parse_family("empty:2")), [bernoulli_site(), bernoulli_site()])
    with pytest.raises(InputError):
        model.site(5)
    with pytest.raises(InputError):
        model.apply(5, model.state_vector())
    with pytest.raises(InputError):
        model.embed(5, np.eye(2))
    with pytest.raises(InputError):
        model.operator(5)


def test_verify_bmt_exhaustive_on_named_families():
    for spec in ("empty:2", "totalorder:3", "counterexample:2"):
        g = generate(parse_family(spec))
        model = build(g, [bernoulli_site()] * len(g.vertices))
        ens = BmtEnsemble.uniform(g, centered_bernoulli())
        report = verify_bmt(model, ens, 6)
        assert report.ok, spec
        n = len(g.vertices)
        assert report.cases == sum(n**k for k in range(1, 7))
        assert report.max_deviation < ORACLE_TOL


def test_verify_bmt_with_poisson_sites():
    g = generate(parse_family("totalorder:4"))
    lam = Fraction(3, 2)
    model = build(g, [poisson_site(lam, 4)] * 4)
    ens = BmtEnsemble.uniform(g, poisson_bernoulli(lam, 4))
    report = verify_bmt(model, ens, 5)
    assert report.ok and report.max_deviation < ORACLE_TOL


def test_verify_bmt_rejects_mismatched_inputs():
    g = generate(parse_family("empty:2"))
    model = build(g, [bernoulli_site(), bernoulli_site()])
    other = BmtEnsemble.uniform(generate(parse_family("complete:2")), centered_bernoulli())
    with pytest.raises(InputError):
        verify_bmt(model, other, 4)
    # marginal mismatch: sites are symmetric Bernoulli, law says Poisson
    wrong_law = BmtEnsemble.uniform(g, poisson_bernoulli(1, 2))
    with pytest.raises(InputError):
        verify_bmt(model, wrong_law, 4)


def test_bm1_triples_patterns():
    chain = {(1, 2), (1, 3), (2, 3)}
    triples = bm1_triples(chain, (1, 2, 3))
    patterns = {t[0] for t in triples}
    assert patterns == {"below-peak-below"}
    # x and y both below the peak, in either role order
    assert ("below-peak-below", 1, 3, 2) in triples
    assert ("below-peak-below", 2, 3, 1) in triples

    n_order = {(1, 3), (2, 3), (2, 4)}
    kinds = {}
    for pattern, *_ in bm1_triples(n_order, (1, 2, 3, 4)):
        kinds[pattern] = kinds.get(pattern, 0) + 1
    assert kinds == {
        "below-peak-below": 2,
        "incomparable-peak-below": 4,
        "below-peak-incomparable": 4,
    }

    antichain = bm1_triples(set(), (1, 2, 3))
    assert antichain == []


def test_verify_bm1_on_chain_and_n_poset():
    chain = generate(parse_family("totalorder:3"))
    model = build(chain, [bernoulli_site()] * 3)
    report = verify_bm1(model, {(1, 2), (1, 3), (2, 3)}, draws=5, seed=1)
    assert report.ok
    assert len(report.triples) == 2  # only the top element can be the peak
    assert report.max_deviation < ORACLE_TOL

    g = digraph_of_order(4, [(1, 3), (2, 3), (2, 4)])
    model4 = build(g, [bernoulli_site()] * 4)
    report4 = verify_bm1(model4, {(1, 3), (2, 3), (2, 4)}, draws=5, seed=2)
    assert report4.ok
    assert len(report4.triples) == 10


def test_verify_bm1_is_vacuous_on_antichain():
    g = generate(parse_family("empty:3"))
    model = build(g, [bernoulli_site()] * 3)
    report = verify_bm1(model, set(), draws=3)
    assert report.ok and report.triples == []


def test_verify_bm1_rejects_wrong_order():
    chain = generate(parse_family("totalorder:3"))
    model = build(chain, [bernoulli_site()] * 3)
    with pytest.raises(InputError):
        verify_bm1(model, {(1, 2)}, draws=1)
    not_order = Digraph([1, 2], [(1, 2), (2, 1)])
    model2 = build(not_order, [bernoulli_site()] * 2)
    with pytest.raises(InputError):
        verify_bm1(model2, {(1, 2)}, draws=1)


def test_caps_are_the_advertised_constants():
    assert MODEL_DIM_CAP == 4096
    assert MATERIALIZE_CAP == 256
    assert math.log2(MODEL_DIM_CAP) == 12
    assert ORACLE_TOL == 1e-10
    assert REPRESENTATION_TOL == 1e-12


def test_mixed_sites_of_different_dimension():
    # a dimension-3 site with the Bernoulli spectrum padded by a null state
    vec = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    op = np.diag([1.0, -1.0, 0.0])
    s3 = Site(3, vec, op)
    g = generate(parse_family("empty:2"))
    model = build(g, [s3, bernoulli_site()])
    assert model.total_dim == 6
    ens = BmtEnsemble.uniform(g, centered_bernoulli())
    report = verify_bmt(model, ens, 6)
    assert report.ok
