"""Shared generators for randomized tests."""
from __future__ import annotations

import numpy as np


def random_vehicle(rng: np.random.RandomState):
    """Physically plausible random vehicle parameters."""
    from etlqr import VehicleParams

    return VehicleParams(
        m=rng.uniform(800.0, 2500.0),
        mu=rng.uniform(0.2, 1.0),
        vx=rng.uniform(5.0, 40.0),
        iz=rng.uniform(1000.0, 5000.0),
        cf=rng.uniform(5e4, 3e5),
        cr=rng.uniform(5e4, 3e5),
        lf=rng.uniform(0.8, 1.8),
        lr=rng.uniform(0.8, 1.8),
        rho=rng.uniform(-0.01, 0.01),
    )


def random_stabilizable(rng: np.random.RandomState, n: int = 4):
    """Random (A, B, Q, R) with (A, B) controllable almost surely.

    A is generic (often unstable), Q is random positive definite, R a
    positive scalar matrix. Scales are normalized (unit-norm A, unit-mean
    Q, R >= 1) and nearly uncontrollable pairs are rejected via a smallest
    singular value threshold on the controllability matrix; without both,
    the closed-loop Lyapunov solution can reach sizes where absolute
    residual targets fall below the double-precision floor eps |M| |A|.
    """
    while True:
        a = rng.standard_normal((n, n))
        a /= np.linalg.norm(a, 2)
        b = rng.standard_normal((n, 1))
        ctrb = np.hstack([np.linalg.matrix_power(a, k) @ b for k in range(n)])
        if np.linalg.svd(ctrb, compute_uv=False)[-1] >= 0.3:
            break
    w = rng.standard_normal((n, n))
    q = (w.T @ w) / n + 0.1 * np.eye(n)
    r = np.array([[10.0 ** rng.uniform(0.0, 1.0)]])
    return a, b, q, r


def random_hurwitz(rng: np.random.RandomState, n: int = 4):
    """Random strictly stable matrix."""
    a = rng.standard_normal((n, n))
    shift = np.max(np.linalg.eigvals(a).real) + rng.uniform(0.5, 2.0)
    return a - shift * np.eye(n)


def random_spd(rng: np.random.RandomState, n: int = 4):
    """Random symmetric positive definite matrix."""
    w = rng.standard_normal((n, n))
    return w.T @ w + 0.1 * np.eye(n)
