"""Controller synthesis: LQR gain via the continuous algebraic Riccati
equation, Lyapunov certificates, and the event-trigger design constants.

The Riccati solve is Kleinman-Newton iteration (each step a Lyapunov solve),
started from a Bass stabilizing gain when the open loop is unstable. The
Lyapunov solver vectorizes to a dense Kronecker linear system, which is exact
and ample for the 4-dimensional plants this package targets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SynthesisError

__all__ = [
    "LqrWeights",
    "EtmDesign",
    "SynthesisResult",
    "spectral_norm",
    "solve_lyapunov",
    "solve_care",
    "lqr_gain",
    "compute_sigma",
    "min_iet",
    "care_residual",
    "lyapunov_residual",
    "synthesize",
]

_CARE_RTOL = 1e-8    # residual acceptance: |R(P)|_F <= _CARE_RTOL * (1 + |P|_F)
_LYAP_RTOL = 1e-10   # residual acceptance: |A'M + MA + N|_F <= _LYAP_RTOL * |N|_F


@dataclass
class LqrWeights:
    """Quadratic cost weights: state weight Q (4x4, symmetric PSD) and a
    positive scalar input weight r."""

    Q: np.ndarray
    r: float

    def __post_init__(self) -> None:
        self.Q = np.ascontiguousarray(self.Q, dtype=float)
        if self.Q.shape != (4, 4):
            raise ValueError("Q must be 4x4")
        if not np.all(np.isfinite(self.Q)):
            raise ValueError("Q must be finite")
        if np.max(np.abs(self.Q - self.Q.T)) > 1e-10 * (1.0 + np.max(np.abs(self.Q))):
            raise ValueError("Q must be symmetric")
        if np.linalg.eigvalsh(self.Q).min() < -1e-10 * (1.0 + np.max(np.abs(self.Q))):
            raise ValueError("Q must be positive semidefinite")
        if not (math.isfinite(self.r) and self.r > 0.0):
            raise ValueError(f"r must be a positive scalar, got {self.r!r}")


@dataclass
class EtmDesign:
    """Event-trigger design knobs.

    z_bar    clock ceiling, reset value after each event [s-like units]
    epsilon  constant clock drain rate, > 0
    theta_l  left scaling of the quadratic trigger term, >= 1
    theta_r  right scaling of the cross trigger term, in (0, 1]

    theta_l = theta_r = 1 recovers the undeformed trigger; pushing theta_l up
    and theta_r down slows the clock drain and stretches inter-event times.
    """

    z_bar: float
    epsilon: float
    theta_l: float = 1.0
    theta_r: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.z_bar) and self.z_bar > 0.0):
            raise ValueError(f"z_bar must be positive, got {self.z_bar!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (math.isfinite(self.theta_l) and self.theta_l >= 1.0):
            raise ValueError(f"theta_l must be >= 1, got {self.theta_l!r}")
        if not (math.isfinite(self.theta_r) and 0.0 < self.theta_r <= 1.0):
            raise ValueError(f"theta_r must lie in (0, 1], got {self.theta_r!r}")


@dataclass
class SynthesisResult:
    """Outputs of a full synthesis pass.

    K, P come from the Riccati solve; M solves the closed-loop Lyapunov
    equation with right-hand side -N; sigma and tau are the trigger drain
    envelope constant and the guaranteed minimum inter-event time for the
    design the result was synthesized with. The remaining scalars are
    derived certificates cached so that downstream consumers (trigger
    evaluation, reporting) need no access to the plant matrices.
    """

    K: np.ndarray  # (1, 4)
    P: np.ndarray  # (4, 4)
    M: np.ndarray  # (4, 4)
    N: np.ndarray  # (4, 4)
    sigma: float
    tau: float
    lam_min_m: float = 0.0
    lam_min_n: float = 0.0
    mbk_norm: float = 0.0
    care_res: float = 0.0
    lyap_res: float = 0.0
    closed_loop_eigs: np.ndarray = field(default_factory=lambda: np.zeros(4, complex))


def spectral_norm(a: np.ndarray, tol: float = 1e-12, max_iter: int = 1000) -> float:
    """Largest singular value by power iteration on the Gram matrix A'A.

    Deterministic start vector; converges when the Rayleigh-quotient
    estimate is stable to ``tol`` (relative). The matrices this package
    feeds in are tiny, so the dense Gram product is the cheap route.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("spectral_norm expects a matrix")
    gram = a.T @ a
    n = gram.shape[0]
    v = np.arange(1.0, n + 1.0)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        lam_next = float(v @ w)
        v = w / nw
        if abs(lam_next - lam) <= tol * max(1.0, abs(lam_next)):
            lam = lam_next
            break
        lam = lam_next
    return math.sqrt(max(lam, 0.0))


def _lyap_core(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve A'M + MA = -rhs by Kronecker vectorization (row-major vec).

    One pass of iterative refinement follows the direct solve, which takes
    the residual down to the floor set by rounding M itself."""
    n = a.shape[0]
    eye = np.eye(n)
    coeff = np.kron(a.T, eye) + np.kron(eye, a.T)
    try:
        m_vec = np.linalg.solve(coeff, -rhs.reshape(-1))
        m = m_vec.reshape(n, n)
        residual = a.T @ m + m @ a + rhs
        m = m - np.linalg.solve(coeff, residual.reshape(-1)).reshape(n, n)
    except np.linalg.LinAlgError as exc:
        raise SynthesisError(f"Lyapunov subproblem is singular: {exc}") from exc
    return 0.5 * (m + m.T)


def solve_lyapunov(a_cl: np.ndarray, n_mat: np.ndarray) -> np.ndarray:
    """Solve A_cl' M + M A_cl = -N for symmetric positive definite M.

    Requires A_cl Hurwitz and N symmetric positive definite; both are
    checked and violations raise SynthesisError with the failing quantity.
    """
    a_cl = np.asarray(a_cl, dtype=float)
    n_mat = np.asarray(n_mat, dtype=float)
    if a_cl.shape != n_mat.shape or a_cl.ndim != 2 or a_cl.shape[0] != a_cl.shape[1]:
        raise ValueError("A_cl and N must be square matrices of equal size")
    re_max = np.max(np.linalg.eigvals(a_cl).real)
    if not re_max < 0.0:
        raise SynthesisError(f"A_cl is not Hurwitz (max Re eig = {re_max:.6g})")
    scale = 1.0 + np.max(np.abs(n_mat))
    if np.max(np.abs(n_mat - n_mat.T)) > 1e-10 * scale:
        raise SynthesisError("N must be symmetric")
    if np.linalg.eigvalsh(n_mat).min() <= 0.0:
        raise SynthesisError("N must be positive definite")

    m = _lyap_core(a_cl, n_mat)
    res = lyapunov_residual(a_cl, n_mat, m)
    if res > _LYAP_RTOL * np.linalg.norm(n_mat, "fro"):
        raise SynthesisError(f"Lyapunov residual too large: {res:.3e}")
    if np.linalg.eigvalsh(m).min() <= 0.0:
        raise SynthesisError("Lyapunov solution is not positive definite")
    return m


def lyapunov_residual(a_cl: np.ndarray, n_mat: np.ndarray, m: np.ndarray) -> float:
    """Frobenius norm of A_cl' M + M A_cl + N."""
    return float(np.linalg.norm(a_cl.T @ m + m @ a_cl + n_mat, "fro"))


def care_residual(a: np.ndarray, b: np.ndarray, q: np.ndarray,
                  r: np.ndarray, p: np.ndarray) -> float:
    """Frobenius norm of A'P + PA - P B R^-1 B' P + Q."""
    rinv_btp = np.linalg.solve(r, b.T @ p)
    return float(np.linalg.norm(a.T @ p + p @ a - p @ b @ rinv_btp + q, "fro"))


def _bass_initial_gain(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Stabilizing initial gain via Bass's method.

    With beta exceeding the spectral abscissa of -A, the Gramian-like
    solution Z of (A + beta I) Z + Z (A + beta I)' = 2 B B' is positive
    definite for controllable (A, B) and K0 = B' Z^-1 places A - B K0
    strictly in the left half plane.
    """
    n = a.shape[0]
    beta = 1.0 + float(np.linalg.norm(a, "fro"))
    shifted = -(a + beta * np.eye(n))  # Hurwitz by choice of beta
    z = _lyap_core(shifted.T, 2.0 * (b @ b.T))
    try:
        k0 = np.linalg.solve(z, b).T
    except np.linalg.LinAlgError as exc:
        raise SynthesisError(
            f"stabilizing initialization failed, (A, B) may be uncontrollable: {exc}"
        ) from exc
    re_max = np.max(np.linalg.eigvals(a - b @ k0).real)
    if not re_max < 0.0:
        raise SynthesisError(
            f"initial gain does not stabilize (max Re eig = {re_max:.6g}); "
            "(A, B) may not be stabilizable"
        )
    return k0


def solve_care(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray,
               max_iter: int = 60, tol: float = 1e-13) -> np.ndarray:
    """Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0.

    Kleinman-Newton iteration: each step solves one closed-loop Lyapunov
    equation and converges quadratically and monotonically from any
    stabilizing gain. Raises SynthesisError when no stabilizing start can
    be built, a Lyapunov step is singular, or the final residual fails the
    acceptance bound.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    q = np.asarray(q, dtype=float)
    r = np.atleast_2d(np.asarray(r, dtype=float))
    n = a.shape[0]
    if a.shape != (n, n) or b.ndim != 2 or b.shape[0] != n:
        raise ValueError("need A (n,n) and B (n,m)")
    m_in = b.shape[1]
    if q.shape != (n, n) or r.shape != (m_in, m_in):
        raise ValueError("need Q (n,n) and R (m,m)")
    scale_q = 1.0 + np.max(np.abs(q))
    if np.max(np.abs(q - q.T)) > 1e-10 * scale_q:
        raise ValueError("Q must be symmetric")
    if np.linalg.eigvalsh(q).min() < -1e-10 * scale_q:
        raise ValueError("Q must be positive semidefinite")
    if np.linalg.eigvalsh(0.5 * (r + r.T)).min() <= 0.0:
        raise ValueError("R must be positive definite")

    if np.max(np.linalg.eigvals(a).real) < 0.0:
        k = np.zeros((m_in, n))
    else:
        k = _bass_initial_gain(a, b)

    p = np.zeros((n, n))
    converged = False
    for _ in range(max_iter):
        a_cl = a - b @ k
        p_next = _lyap_core(a_cl, q + k.T @ r @ k)
        k = np.linalg.solve(r, b.T @ p_next)
        if np.linalg.norm(p_next - p, "fro") <= tol * max(1.0, np.linalg.norm(p_next, "fro")):
            p = p_next
            converged = True
            break
        p = p_next

    res = care_residual(a, b, q, r, p)
    bound = _CARE_RTOL * (1.0 + np.linalg.norm(p, "fro"))
    if not converged and res > bound:
        raise SynthesisError(f"Riccati iteration did not converge (residual {res:.3e})")
    if res > bound:
        raise SynthesisError(f"Riccati residual too large: {res:.3e} > {bound:.3e}")
    if np.linalg.eigvalsh(p).min() < -bound:
        raise SynthesisError("Riccati solution is not positive semidefinite")
    re_max = np.max(np.linalg.eigvals(a - b @ np.linalg.solve(r, b.T @ p)).real)
    if not re_max < 0.0:
        raise SynthesisError(f"closed loop not Hurwitz (max Re eig = {re_max:.6g})")
    return p


def lqr_gain(p: np.ndarray, b: np.ndarray, r: np.ndarray) -> np.ndarray:
    """State-feedback gain K = R^-1 B' P for u = -K x."""
    p = np.asarray(p, dtype=float)
    b = np.asarray(b, dtype=float)
    r = np.atleast_2d(np.asarray(r, dtype=float))
    return np.linalg.solve(r, b.T @ p)


def compute_sigma(m_mat: np.ndarray, b: np.ndarray, k: np.ndarray,
                  n_mat: np.ndarray, theta_l: float, theta_r: float) -> float:
    """Envelope constant of the clock drain rate.

    sigma = theta_r^2 |M B K|^2 / (theta_l lam_min(M) lam_min(N)), with |.|
    the spectral norm. It bounds the trigger's cross term via Young's
    inequality, so the drain rate never falls below -sigma (1+z)^2 - eps.
    """
    if not theta_l >= 1.0:
        raise ValueError(f"theta_l must be >= 1, got {theta_l!r}")
    if not 0.0 < theta_r <= 1.0:
        raise ValueError(f"theta_r must lie in (0, 1], got {theta_r!r}")
    m_mat = np.asarray(m_mat, dtype=float)
    n_mat = np.asarray(n_mat, dtype=float)
    lam_m = float(np.linalg.eigvalsh(m_mat).min())
    lam_n = float(np.linalg.eigvalsh(n_mat).min())
    if lam_m <= 0.0 or lam_n <= 0.0:
        raise ValueError("M and N must be positive definite")
    mbk = m_mat @ np.asarray(b, dtype=float) @ np.asarray(k, dtype=float)
    nrm = spectral_norm(mbk)
    return theta_r * theta_r * nrm * nrm / (theta_l * lam_m * lam_n)


def min_iet(sigma: float, epsilon: float, z_bar: float) -> float:
    """Guaranteed minimum inter-event time of the clock trigger.

    Time for the clock to drain from z_bar to 0 under the worst-case rate
    -sigma (1+z)^2 - epsilon:

        tau = sqrt(1/(sigma eps)) (atan(sqrt(sigma/eps) (1+z_bar))
                                   - atan(sqrt(sigma/eps)))

    Strictly decreasing in sigma and epsilon; tends to z_bar/epsilon as
    sigma -> 0.
    """
    for name, value in (("sigma", sigma), ("epsilon", epsilon), ("z_bar", z_bar)):
        if not (math.isfinite(value) and value > 0.0):
            raise ValueError(f"{name} must be positive, got {value!r}")
    s = math.sqrt(sigma / epsilon)
    return math.sqrt(1.0 / (sigma * epsilon)) * (math.atan(s * (1.0 + z_bar)) - math.atan(s))


def synthesize(plant, weights: LqrWeights, design: EtmDesign,
               n_mat: np.ndarray | None = None) -> SynthesisResult:
    """Full synthesis pass: Riccati, gain, Lyapunov certificate, trigger
    constants, plus the derived scalars used by the trigger at run time."""
    a, b = plant.A, plant.B
    r = np.array([[weights.r]])
    n_mat = np.eye(4) if n_mat is None else np.asarray(n_mat, dtype=float)

    p = solve_care(a, b, weights.Q, r)
    k = lqr_gain(p, b, r)
    a_cl = a - b @ k
    m_mat = solve_lyapunov(a_cl, n_mat)

    sigma = compute_sigma(m_mat, b, k, n_mat, design.theta_l, design.theta_r)
    tau = min_iet(sigma, design.epsilon, design.z_bar)
    mbk = m_mat @ b @ k
    return SynthesisResult(
        K=k,
        P=p,
        M=m_mat,
        N=n_mat,
        sigma=sigma,
        tau=tau,
        lam_min_m=float(np.linalg.eigvalsh(m_mat).min()),
        lam_min_n=float(np.linalg.eigvalsh(n_mat).min()),
        mbk_norm=spectral_norm(mbk),
        care_res=care_residual(a, b, weights.Q, r, p),
        lyap_res=lyapunov_residual(a_cl, n_mat, m_mat),
        closed_loop_eigs=np.linalg.eigvals(a_cl),
    )
