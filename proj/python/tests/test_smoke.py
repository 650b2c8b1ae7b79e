import math

import numpy as np
import pytest

import igalsq


def test_knots_and_basis():
    kv = igalsq.knot_vector(2, 4, 1)
    assert kv[0] == 0.0 and kv[-1] == 1.0
    assert igalsq.num_basis(3, 5, 1) == (5 - 1) * 2 + 4
    x = np.linspace(0.0, 1.0, 57)
    B = igalsq.bspline_basis(4, 6, 3, x)
    assert B.shape == (57, igalsq.num_basis(4, 6, 3))
    np.testing.assert_allclose(B.sum(axis=1), 1.0, atol=1e-13)
    dB = igalsq.bspline_basis(4, 6, 3, x, deriv=1)
    np.testing.assert_allclose(dB.sum(axis=1), 0.0, atol=1e-10)


def test_point_sets():
    np.testing.assert_allclose(igalsq.greville_points(2, 4), [0.0, 0.25, 0.75, 1.0])
    assert len(igalsq.sc_points(4, 2, 3)) == 5
    pts, interior = igalsq.collocation_points("quarter_annulus", 3, 4, 2, "greville", 4.0)
    assert pts.shape[1] == 2
    assert interior.sum() < len(interior)
    with pytest.raises(igalsq.DomainError):
        igalsq.sc_points(8, 2, 7)


def test_assemble_spectra_solve():
    sys = igalsq.assemble("interval", 2, 10, 1, factor=1.0)
    assert sys["dof"] == 10
    A = igalsq.as_scipy(sys["A"])
    assert A.shape == (sys["m_in"], sys["dof"])
    rep = igalsq.singular_extremes(A)
    dense = np.linalg.svd(A.toarray(), compute_uv=False)
    assert rep["sigma_max"] == pytest.approx(dense[0], rel=1e-12)
    assert rep["sigma_min"] == pytest.approx(dense[-1], rel=1e-10)
    it = igalsq.singular_extremes(sys["A"], method="iterative")
    assert it["sigma_min"] == pytest.approx(dense[-1], rel=1e-8)

    sol = igalsq.solve("quarter_annulus", 3, 4, 2, factor=4.0, source="polynomial")
    assert sol["max_error"] < 1e-10
    with pytest.raises(ValueError):
        igalsq.solve("quarter_annulus", 3, 4, 2, source="sine")


def test_sweep_and_fits():
    cfg = """
[domain]
tag = "interval"
[discretization]
p = 3
n = [10, 20, 40, 80]
k = "p-1"
factor = 4
[run]
targets = ["A"]
"""
    records = igalsq.sweep(cfg, threads=2)
    assert len(records) == 4
    assert all(r["status"] == "ok" for r in records)
    fit = igalsq.fit_power([r["h"] for r in records], [r["sigma_max"] for r in records])
    assert -2.2 < fit["slope"] < -1.8
    assert "p-1" in igalsq.echo_config(cfg)
    with pytest.raises(igalsq.ConfigError):
        igalsq.sweep(cfg, overrides=["discretization.p=1"])


def test_reference_laws():
    assert igalsq.reference_law("iga_l.M_1.cond", 0.1, 3, 2) == pytest.approx(64.0)
    assert igalsq.reference_law("iga_l.M_pm1.sigma_min", 0.1, 4, 1) == pytest.approx(math.exp(-2.0))
    assert igalsq.regime_boundary("iga_l.A_1.cond", 3, 1) is None
    assert len(igalsq.reference_law_names()) == 24
    g = igalsq.fit_exponential([2, 3, 4, 5], [math.exp(0.5 * q) for q in (2, 3, 4, 5)])
    assert g["slope"] == pytest.approx(0.5, abs=1e-12)
