"""Smoke tests for the pycwls module: end-to-end pipeline on small problems."""

import json
import math

import numpy as np
import pytest

import pycwls as cw


def test_index_sets():
    s = cw.hyperbolic_cross(2, 3)
    assert len(s) == 8
    assert s.indices()[0] == [0, 0]
    assert cw.is_lower_set(s)
    assert len(cw.total_degree(3, 2)) == 10
    assert len(cw.parse_index_set("tp:d=2,n=4")) == 25
    with pytest.raises(cw.ConfigError):
        cw.parse_index_set("hc:d=0,n=1")


def test_legendre_values():
    assert cw.legendre_1d(0, 0.37) == 1.0
    assert cw.legendre_1d(1, 1.0) == pytest.approx(math.sqrt(3.0))
    assert cw.legendre_1d(2, 0.0) == pytest.approx(-math.sqrt(5.0) / 2.0)


def test_domains_and_sampling():
    dom = cw.parse_domain("annulus:rmin=0.25,rmax=1", 2)
    assert not dom.contains(np.zeros(2))
    rng = cw.RngStream(1, 1)
    pts = cw.sample_uniform(dom, 200, rng)
    assert pts.shape == (200, 2)
    norms = np.linalg.norm(pts, axis=1)
    assert (norms >= 0.25).all() and (norms <= 1.0).all()

    rng2 = cw.RngStream(1, 1)
    pts2 = cw.sample_uniform(dom, 200, rng2)
    assert (pts == pts2).all()


def test_factorization_identities():
    dom = cw.annulus(2, 0.25, 1.0)
    grid = cw.generate_grid(dom, 800, cw.RngStream(3, 1))
    basis = cw.TensorLegendreBasis(cw.hyperbolic_cross(2, 8))
    f = cw.assemble_and_factor(grid, basis)
    n = len(f)
    assert np.abs(f.Q.T @ f.Q - np.eye(n)).max() < 1e-12
    assert (np.diag(f.R) > 0).all()

    pi, w = cw.method1_distribution(f)
    assert pi.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.abs(len(pi) * pi * w.w - 1.0).max() < 1e-12


def test_end_to_end_recovery():
    dom = cw.halfspace_cut_cube(2)
    grid = cw.generate_grid(dom, 1000, cw.RngStream(5, 1))
    basis = cw.TensorLegendreBasis(cw.hyperbolic_cross(2, 9))
    f = cw.assemble_and_factor(grid, basis)
    n = len(f)
    target = cw.make_in_space(f, basis, 11)
    grid_values = cw.evaluate_on_grid(f, target.coefficients)

    plan = cw.make_method1_plan(f, cw.m_target_nlogn(n), cw.RngStream(5, 2))
    A, b = cw.assemble_method1(f, plan, grid_values[plan.indices])
    sol = cw.solve(A, b)
    rel = np.linalg.norm(sol.c - target.coefficients) / np.linalg.norm(
        target.coefficients
    )
    assert rel < 1e-10
    assert cw.error_on_grid(grid_values, cw.evaluate_on_grid(f, sol.c)) < 1e-10

    y = np.array([0.2, -0.4])
    assert cw.evaluate_at(f, basis, sol.c, y) == pytest.approx(target(y), rel=1e-8)


def test_method2_recycling():
    dom = cw.cube(2)
    grid = cw.generate_grid(dom, 500, cw.RngStream(7, 1))
    small = cw.TensorLegendreBasis(cw.hyperbolic_cross(2, 3))
    big = cw.TensorLegendreBasis(cw.hyperbolic_cross(2, 6))
    f_small = cw.assemble_and_factor(grid, small)
    f_big = cw.extend_factorization(f_small, grid, big)
    assert np.abs(f_big.Q[:, : len(f_small)] - f_small.Q).max() == 0.0

    rng = cw.RngStream(7, 2)
    plan = cw.method2_advance(cw.Method2Plan(), f_small, 3, rng)
    m1 = plan.current_M()
    plan2 = cw.method2_advance(plan, f_big, 3, rng)
    assert plan2.indices()[:m1] == plan.indices()
    assert plan2.stages()[-1].fresh_draws == plan2.current_M() - m1
    assert cw.mixture_check(plan2, f_big) < 1e-12


def test_bounds():
    assert cw.bound_M_method1(100, 0.01, 0.5) == 9794
    assert cw.nikolskii_lambda_rect(10, 1.0) == 100.0
    assert cw.bound_M_maw2(10, 0.1, 0.5) == 490
    with pytest.raises(cw.ConfigError):
        cw.bound_M_method1(10, 1.5, 0.5)


def test_run_sweep_config():
    cfg = {
        "domain": "cube",
        "function": "inspace:seed=3",
        "index_set": "hc:d=1",
        "schedule": [0, 1, 2],
        "method": "method1",
        "K": 300,
        "trials": 2,
        "seed": 99,
    }
    out = cw.run_sweep_config(json.dumps(cfg))
    rows = out["rows"]
    trials = [r for r in rows if r["kind"] == "trial"]
    means = [r for r in rows if r["kind"] == "mean"]
    assert len(trials) == 6 and len(means) == 3
    assert all(r["E_tau"] < 1e-8 for r in trials)
    summary = json.loads(out["summary"])
    assert summary["K"] == 300
    assert len(summary["stages"]) == 3
    assert "M_method1" in summary["stages"][0]["theory"]


def test_validation_entry_point():
    passed, report = cw.run_validation("oracle")
    assert passed
    assert json.loads(report)["suite"] == "oracle"


def test_diagnostics_report():
    rep = cw.make_report(100, 0.5, 0.01, 0.25)
    assert rep.theory["M_method1"] == 9794
    assert "K_lambda_rect" in rep.theory
    rep.C = 1.25
    j = json.loads(rep.to_json())
    assert j["C"] == 1.25
    assert any("N_t" in n for n in j["notes"])


def test_fit_helpers():
    dom = cw.cube(1)
    grid = cw.generate_grid(dom, 200, cw.RngStream(9, 1))
    basis = cw.TensorLegendreBasis(cw.hyperbolic_cross(1, 5))
    f = cw.assemble_and_factor(grid, basis)
    t = cw.make_in_space(f, basis, 13)
    gv = cw.evaluate_on_grid(f, t.coefficients)
    plan = cw.make_method1_plan(f, 30, cw.RngStream(9, 2))
    fit = cw.fit_method1(f, plan, gv[plan.indices])
    assert np.linalg.norm(fit.c - t.coefficients) < 1e-10
    assert fit.kappa() >= 1.0
    summary = json.loads(cw.fit_summary_json(fit, 9))
    assert summary["method"] == "method1" and summary["N"] == 6
