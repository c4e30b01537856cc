import math

import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from helpers import random_hurwitz, random_spd, random_stabilizable

from etlqr import (EtmDesign, SynthesisError, compute_sigma, lqr_gain, min_iet,
                   solve_care, solve_lyapunov, spectral_norm, synthesize)
from etlqr.synthesis import care_residual, lyapunov_residual


# ---------------------------------------------------------------- spectral norm

def test_spectral_norm_matches_svd():
    rng = np.random.RandomState(11)
    for shape in [(4, 4), (4, 4), (3, 5), (6, 2)]:
        for _ in range(5):
            a = rng.standard_normal(shape) * 10.0 ** rng.uniform(-3, 3)
            ref = np.linalg.norm(a, 2)
            assert spectral_norm(a) == pytest.approx(ref, rel=1e-10)


def test_spectral_norm_special_cases():
    assert spectral_norm(np.zeros((4, 4))) == 0.0
    assert spectral_norm(np.eye(4)) == pytest.approx(1.0, rel=1e-12)
    u = np.array([1.0, -2.0, 3.0, 0.5])
    v = np.array([0.3, 1.0, -1.0, 2.0])
    ref = np.linalg.norm(u) * np.linalg.norm(v)
    assert spectral_norm(np.outer(u, v)) == pytest.approx(ref, rel=1e-12)


# ---------------------------------------------------------------- Lyapunov

def test_lyapunov_diagonal_exact():
    a = np.diag([-1.0, -2.0, -3.0, -4.0])
    m = solve_lyapunov(a, np.eye(4))
    assert np.allclose(m, np.diag([0.5, 0.25, 1.0 / 6.0, 0.125]), rtol=1e-13)


def test_lyapunov_matches_scipy_and_residual():
    rng = np.random.RandomState(5)
    for _ in range(50):
        a = random_hurwitz(rng)
        n = random_spd(rng)
        m = solve_lyapunov(a, n)
        ref = scipy.linalg.solve_continuous_lyapunov(a.T, -n)
        assert np.linalg.norm(m - ref, "fro") <= 1e-9 * max(1.0, np.linalg.norm(ref, "fro"))
        assert lyapunov_residual(a, n, m) <= 1e-10 * np.linalg.norm(n, "fro")
        assert np.linalg.eigvalsh(m).min() > 0.0


def test_lyapunov_rejects_bad_inputs():
    with pytest.raises(SynthesisError, match="Hurwitz"):
        solve_lyapunov(np.eye(4), np.eye(4))
    a = np.diag([-1.0, -2.0, -3.0, -4.0])
    with pytest.raises(SynthesisError, match="positive definite"):
        solve_lyapunov(a, np.diag([1.0, 1.0, 1.0, -1.0]))
    with pytest.raises(SynthesisError, match="symmetric"):
        solve_lyapunov(a, np.eye(4) + np.triu(np.ones((4, 4)), 1))


# ---------------------------------------------------------------- Riccati

def test_care_scalar_analytic():
    p = solve_care(np.array([[0.0]]), np.array([[1.0]]),
                   np.array([[1.0]]), np.array([[1.0]]))
    assert p[0, 0] == pytest.approx(1.0, rel=1e-12)
    k = lqr_gain(p, np.array([[1.0]]), np.array([[1.0]]))
    assert k[0, 0] == pytest.approx(1.0, rel=1e-12)


def test_care_zero_cost_stable_plant():
    a = np.diag([-1.0, -2.0, -0.5, -3.0])
    p = solve_care(a, np.ones((4, 1)), np.zeros((4, 4)), np.array([[1.0]]))
    assert np.max(np.abs(p)) <= 1e-12


def test_care_benchmark_matches_scipy(plant, weights):
    r = np.array([[weights.r]])
    p = solve_care(plant.A, plant.B, weights.Q, r)
    ref = scipy.linalg.solve_continuous_are(plant.A, plant.B, weights.Q, r)
    assert np.linalg.norm(p - ref, "fro") <= 1e-8 * (1.0 + np.linalg.norm(ref, "fro"))


def test_care_random_stabilizable_certificates():
    rng = np.random.RandomState(23)
    for _ in range(50):
        a, b, q, r = random_stabilizable(rng)
        p = solve_care(a, b, q, r)
        assert care_residual(a, b, q, r, p) <= 1e-8 * (1.0 + np.linalg.norm(p, "fro"))
        k = lqr_gain(p, b, r)
        assert np.max(np.linalg.eigvals(a - b @ k).real) < 0.0
        assert np.linalg.eigvalsh(p).min() >= -1e-8 * (1.0 + np.linalg.norm(p, "fro"))


def test_care_unstable_open_loop_two_states():
    a = np.array([[2.0, 1.0], [0.0, 1.0]])
    b = np.array([[0.0], [1.0]])
    q = np.eye(2)
    r = np.array([[1.0]])
    p = solve_care(a, b, q, r)
    ref = scipy.linalg.solve_continuous_are(a, b, q, r)
    assert np.allclose(p, ref, rtol=1e-9, atol=1e-12)


def test_care_rejects_unstabilizable_pair():
    a = np.diag([1.0, -1.0, -2.0, -3.0])  # unstable mode untouched by b
    b = np.array([[0.0], [1.0], [0.0], [0.0]])
    with pytest.raises(SynthesisError):
        solve_care(a, b, np.eye(4), np.array([[1.0]]))


def test_care_rejects_indefinite_q():
    with pytest.raises(ValueError, match="semidefinite"):
        solve_care(np.zeros((2, 2)), np.eye(2)[:, :1], -np.eye(2), np.array([[1.0]]))


# ---------------------------------------------------------------- trigger constants

def test_sigma_scales_with_design(syn_improved, plant):
    base = compute_sigma(syn_improved.M, plant.B, syn_improved.K, syn_improved.N, 8.0, 0.1)
    assert compute_sigma(syn_improved.M, plant.B, syn_improved.K, syn_improved.N,
                         8.0, 0.05) == pytest.approx(base / 4.0, rel=1e-13)
    assert compute_sigma(syn_improved.M, plant.B, syn_improved.K, syn_improved.N,
                         16.0, 0.1) == pytest.approx(base / 2.0, rel=1e-13)
    # scaling N scales lam_min(N) and divides sigma accordingly
    assert compute_sigma(syn_improved.M, plant.B, syn_improved.K, 2.0 * syn_improved.N,
                         8.0, 0.1) == pytest.approx(base / 2.0, rel=1e-13)


def test_sigma_design_ratio(syn_improved, syn_original):
    assert syn_improved.sigma / syn_original.sigma == pytest.approx(0.1 ** 2 / 8.0, rel=1e-12)


def test_sigma_validation(syn_improved, plant):
    with pytest.raises(ValueError, match="theta_l"):
        compute_sigma(syn_improved.M, plant.B, syn_improved.K, syn_improved.N, 0.5, 0.1)
    with pytest.raises(ValueError, match="theta_r"):
        compute_sigma(syn_improved.M, plant.B, syn_improved.K, syn_improved.N, 8.0, 0.0)
    with pytest.raises(ValueError, match="positive definite"):
        compute_sigma(-np.eye(4), plant.B, syn_improved.K, syn_improved.N, 8.0, 0.1)


def test_min_iet_unit_case():
    assert min_iet(1.0, 1.0, 1.0) == math.atan(2.0) - math.atan(1.0)


def test_min_iet_small_sigma_limit():
    assert abs(min_iet(1e-12, 1.0, 1.0) - 1.0) <= 1e-5
    assert min_iet(1e-12, 1.0, 1.0) < 1.0  # always strictly below z_bar/epsilon


def test_min_iet_monotone_grid():
    sigmas = np.logspace(-3.0, 3.0, 20)
    epsilons = np.logspace(-2.0, 2.0, 20)
    taus = np.array([[min_iet(s, e, 1.0) for e in epsilons] for s in sigmas])
    assert np.all(np.diff(taus, axis=0) < 0.0)  # decreasing in sigma
    assert np.all(np.diff(taus, axis=1) < 0.0)  # decreasing in epsilon


def test_min_iet_quadrature_oracle():
    cases = [(1.0, 1.0, 1.0), (536.1871569970242, 1.0, 1.0), (0.05, 2.0, 3.0),
             (1e-6, 0.5, 1.0), (428949.7255976193, 1.0, 1.0)]
    for sigma, eps, z_bar in cases:
        ref, _ = scipy.integrate.quad(lambda z: 1.0 / (sigma * (1.0 + z) ** 2 + eps),
                                      0.0, z_bar)
        assert min_iet(sigma, eps, z_bar) == pytest.approx(ref, rel=1e-9)


def test_min_iet_bounds_random():
    rng = np.random.RandomState(17)
    for _ in range(200):
        sigma = 10.0 ** rng.uniform(-6, 6)
        eps = 10.0 ** rng.uniform(-3, 3)
        z_bar = 10.0 ** rng.uniform(-2, 2)
        tau = min_iet(sigma, eps, z_bar)
        assert 0.0 < tau < z_bar / eps


def test_min_iet_validation():
    for bad in [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)]:
        with pytest.raises(ValueError):
            min_iet(*bad)


# ---------------------------------------------------------------- full pass

def test_synthesize_internal_consistency(plant, weights, design_improved, syn_improved):
    s = syn_improved
    assert s.K.shape == (1, 4)
    assert np.linalg.eigvalsh(s.P).min() > 0.0
    assert np.linalg.eigvalsh(s.M).min() > 0.0
    assert np.max(s.closed_loop_eigs.real) < 0.0
    assert s.care_res <= 1e-8 * (1.0 + np.linalg.norm(s.P, "fro"))
    assert s.lyap_res <= 1e-10 * np.linalg.norm(s.N, "fro")
    assert s.lam_min_m == np.linalg.eigvalsh(s.M).min()
    assert s.lam_min_n == np.linalg.eigvalsh(s.N).min()
    assert s.mbk_norm == spectral_norm(s.M @ plant.B @ s.K)
    assert s.sigma == compute_sigma(s.M, plant.B, s.K, s.N,
                                    design_improved.theta_l, design_improved.theta_r)
    assert s.tau == min_iet(s.sigma, design_improved.epsilon, design_improved.z_bar)


def test_synthesize_frozen_benchmark_values(syn_improved, syn_original):
    # values frozen from an independent dense-solver pipeline
    assert np.allclose(syn_improved.K.ravel(),
                       [-0.61190686, 0.08511516, 0.04417965, 0.03162278], atol=1e-7)
    assert syn_improved.lam_min_m == pytest.approx(0.0350716265386588, rel=1e-10)
    assert syn_improved.mbk_norm == pytest.approx(122.65384046176, rel=1e-10)
    assert syn_improved.sigma == pytest.approx(536.1871569970, rel=1e-10)
    assert syn_improved.tau == pytest.approx(9.31496963689e-4, rel=1e-9)
    assert syn_original.sigma == pytest.approx(428949.7255976, rel=1e-10)
    assert syn_original.tau == pytest.approx(1.16563618114e-6, rel=1e-9)


def test_etm_design_validation():
    with pytest.raises(ValueError, match="z_bar"):
        EtmDesign(z_bar=0.0, epsilon=1.0)
    with pytest.raises(ValueError, match="epsilon"):
        EtmDesign(z_bar=1.0, epsilon=0.0)
    with pytest.raises(ValueError, match="theta_l"):
        EtmDesign(z_bar=1.0, epsilon=1.0, theta_l=0.99)
    with pytest.raises(ValueError, match="theta_r"):
        EtmDesign(z_bar=1.0, epsilon=1.0, theta_r=1.01)
    # boundary design used by the undeformed trigger must be accepted
    EtmDesign(z_bar=1.0, epsilon=1.0, theta_l=1.0, theta_r=1.0)
