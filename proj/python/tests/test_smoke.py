import math

import numpy as np
import pytest

import membed


def test_identity_and_kendall():
    r = membed.decide(np.eye(3))
    assert r["verdict"] == "Embeddable"
    assert r["case_tag"]["pattern"] == "D3_IDENTITY"
    k = membed.decide(np.array([[0.4, 0.6], [0.6, 0.4]]))
    assert k["verdict"] == "NotEmbeddable"
    assert k["reason"] == "DET_NONPOSITIVE"


def test_round_trip():
    rng = np.random.default_rng(1)
    for n in (2, 3, 4):
        q = rng.uniform(0, 1, (n, n))
        np.fill_diagonal(q, 0)
        np.fill_diagonal(q, -q.sum(axis=1))
        m = membed.mat_exp(q)
        assert membed.is_markov(m)
        r = membed.decide(m)
        assert r["verdict"] in ("Embeddable", "Undecided")
        for g in r["generators"]:
            assert g["residual"] <= 1e-8
            assert np.abs(membed.mat_exp(np.array(g["matrix"])) - m).max() <= 1e-8


def test_log_and_errors():
    m = np.array([[0.9, 0.1], [0.2, 0.8]])
    q = membed.principal_log(m)
    assert membed.is_generator(q)
    assert q[0, 1] == pytest.approx(-math.log(0.7) / 3)
    with pytest.raises(membed.MembedError, match="SpectrumOnCut"):
        membed.principal_log(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(KeyError):
        membed.decide(np.eye(2), bogus=1.0)


def test_classify_document():
    doc = membed.classify(np.array([[0.5, 0.5, 0], [0, 1, 0], [0.5, 0, 0.5]]))
    assert doc["case_tag"]["pattern"] == "D3_JORDAN2"
    assert doc["necessary"]["transitivity_ok"] is False


def test_equal_input_extremal():
    assert membed.delta_min(1, 1, 1) == pytest.approx(math.pi * math.sqrt(3))
    qp, qm = membed.eq_input_extremal_generators(0.2, 0.3, 0.5)
    assert np.allclose(membed.mat_exp(qp), membed.mat_exp(qm), atol=1e-9)
    cmax = 1 + math.exp(-math.pi * math.sqrt(3))
    r = membed.equal_input([cmax / 3] * 3)
    assert r["verdict"] == "Embeddable"
    assert r["uniqueness"] == "MultipleKnown"


def test_models():
    assert membed.k3st(0.1, 0.1, 0.1)["verdict"] == "Embeddable"
    assert membed.k3st(0.1, 0.5, 0.1)["verdict"] == "NotEmbeddable"
    assert membed.tn_matrix(0.1, 0.15, 0.05, 0.1, 0.05, 1.7).shape == (4, 4)
    assert membed.tn(0.15, 0.15, 0.15, 0.15, 2.0, 1.8)["verdict"] == "Embeddable"


def test_flows_and_g_embedding():
    q1 = np.array([[-1.0, 1, 0], [0, 0, 0], [0, 0, 0]])
    q2 = np.array([[0.0, 0, 0], [0, 0, 0], [1, 0, -1]])
    segs = [(q1, 0.5), (q2, 0.8)]
    m = membed.evolve(segs)
    assert np.allclose(m, membed.mat_exp(0.5 * q1) @ membed.mat_exp(0.8 * q2), atol=1e-14)
    assert np.allclose(membed.peano_baker(segs, 1.3), m, atol=1e-8)
    assert membed.liouville_det(segs, 1.3) == pytest.approx(np.linalg.det(m), rel=1e-12)
    assert membed.decide(m)["reason"] == "TRANSITIVITY"
    assert membed.gcheck(m)["verdict"] == "GEmbeddable"
    j = membed.star_point(3)
    assert np.allclose(j @ j, j)
