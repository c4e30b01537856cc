"""Lateral error dynamics of a front-steered vehicle tracking a reference path.

Linear single-track (bicycle) model in error coordinates
x = (sideslip error, yaw-rate error, lateral-velocity error, lateral error),
driven by the front steering angle deviation and an additive disturbance:

    dx/dt = A x + B u + G xi
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "VehicleParams",
    "ErrorState",
    "PlantMatrices",
    "Equilibrium",
    "TrajectoryPair",
    "build_plant",
    "equilibrium",
    "reconstruct_trajectory",
]


@dataclass
class VehicleParams:
    """Physical vehicle parameters and the reference-path curvature.

    m     vehicle mass [kg]
    mu    tyre-road friction coefficient, 0 < mu <= 1
    vx    longitudinal speed [m/s]
    iz    yaw moment of inertia [kg m^2]
    cf    front cornering stiffness [N/rad]
    cr    rear cornering stiffness [N/rad]
    lf    CoG to front axle distance [m]
    lr    CoG to rear axle distance [m]
    rho   reference-path curvature [1/m] (any sign, 0 = straight)
    """

    m: float
    mu: float
    vx: float
    iz: float
    cf: float
    cr: float
    lf: float
    lr: float
    rho: float = 0.0

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        for name in ("m", "vx", "iz", "cf", "cr", "lf", "lr"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if not (math.isfinite(self.mu) and 0.0 < self.mu <= 1.0):
            raise ValueError(f"mu must lie in (0, 1], got {self.mu!r}")
        if not math.isfinite(self.rho):
            raise ValueError(f"rho must be finite, got {self.rho!r}")


@dataclass
class ErrorState:
    """Typed view of the 4-dimensional error state."""

    beta_tilde: float
    psidot_tilde: float
    edot: float
    e: float

    def __post_init__(self) -> None:
        for name in ("beta_tilde", "psidot_tilde", "edot", "e"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.beta_tilde, self.psidot_tilde, self.edot, self.e])

    @classmethod
    def from_array(cls, x: np.ndarray) -> "ErrorState":
        x = np.asarray(x, dtype=float).reshape(4)
        return cls(float(x[0]), float(x[1]), float(x[2]), float(x[3]))


@dataclass
class PlantMatrices:
    """State-space matrices of the error dynamics."""

    A: np.ndarray  # (4, 4)
    B: np.ndarray  # (4, 1)
    G: np.ndarray  # (4, 4) disturbance input matrix

    def __post_init__(self) -> None:
        self.A = np.ascontiguousarray(self.A, dtype=float)
        self.B = np.ascontiguousarray(self.B, dtype=float).reshape(4, 1)
        self.G = np.ascontiguousarray(self.G, dtype=float)
        if self.A.shape != (4, 4) or self.G.shape != (4, 4):
            raise ValueError("A and G must be 4x4")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.B))
                and np.all(np.isfinite(self.G))):
            raise ValueError("plant matrices must be finite")
        # structural zeros of the error kinematics: de/dt = edot exactly
        if self.A[3, 2] != 1.0 or self.A[3, 3] != 0.0 or self.B[3, 0] != 0.0:
            raise ValueError("last state row must be pure integration: "
                             "A[3,2] = 1, A[3,3] = 0, B[3] = 0")


class Equilibrium(NamedTuple):
    """Steady-state operating point on a constant-curvature path."""

    beta_star: float
    psidot_star: float
    delta_star: float


class TrajectoryPair(NamedTuple):
    """Planar trajectory of the vehicle and of the reference path."""

    actual: np.ndarray     # (n, 2) columns X, Y [m]
    reference: np.ndarray  # (n, 2) columns X_ref, Y_ref [m]


def build_plant(p: VehicleParams, g: np.ndarray | None = None) -> PlantMatrices:
    """Assemble the error-dynamics matrices from physical parameters.

    Parameters
    ----------
    p : VehicleParams
    g : optional 4x4 disturbance input matrix, identity when omitted.
    """
    p.validate()
    m, mu, vx, iz = p.m, p.mu, p.vx, p.iz
    cf, cr, lf, lr = p.cf, p.cr, p.lf, p.lr

    a = np.array([
        [-mu * (cf + cr) / (m * vx), -1.0 - mu * (lf * cf - lr * cr) / (m * vx * vx), 0.0, 0.0],
        [-mu * (lf * cf - lr * cr) / iz, -mu * (lf * lf * cf + lr * lr * cr) / (iz * vx), 0.0, 0.0],
        [-mu * (cf + cr) / m, -mu * (lf * cf - lr * cr) / (m * vx), 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
    b = np.array([
        [mu * cf / (m * vx)],
        [mu * lf * cf / iz],
        [mu * cf / m],
        [0.0],
    ])
    g_mat = np.eye(4) if g is None else np.asarray(g, dtype=float)
    return PlantMatrices(A=a, B=b, G=g_mat)


def equilibrium(p: VehicleParams) -> Equilibrium:
    """Steady-state sideslip, yaw rate and steering angle on the reference path.

    All three are linear in the curvature rho; rho = 0 gives the origin.
    """
    p.validate()
    m, mu, vx = p.m, p.mu, p.vx
    cf, cr, lf, lr = p.cf, p.cr, p.lf, p.lr
    wheelbase = lf + lr

    beta_star = (lr - lf * m * vx * vx / (mu * cr * wheelbase)) * p.rho
    psidot_star = vx * p.rho
    delta_star = (wheelbase + m * vx * vx * (lr * cr - lf * cf) / (mu * cf * cr * wheelbase)) * p.rho
    return Equilibrium(beta_star, psidot_star, delta_star)


def reconstruct_trajectory(
    log,
    p: VehicleParams,
    origin: tuple[float, float] = (0.0, 0.0),
    heading: float = 0.0,
) -> TrajectoryPair:
    """Map a logged lateral-error history onto the road plane for plotting.

    ``log`` is anything with ``times`` (n,) and ``states`` (n, 4) arrays,
    e.g. a SimLog. The reference path is a constant-curvature arc traversed
    at speed vx, starting at ``origin`` with the given heading. The vehicle
    position is the reference point offset by the lateral error along the
    local path normal (positive error = left of the path). Display-level
    kinematics only; no dynamics are solved here.
    """
    times = np.asarray(log.times, dtype=float)
    states = np.asarray(log.states, dtype=float)
    if states.ndim != 2 or states.shape != (times.size, 4):
        raise ValueError("log must carry times (n,) and states (n, 4)")
    e = states[:, 3]
    if times.size == 0:
        empty = np.empty((0, 2))
        return TrajectoryPair(empty, empty.copy())

    x0, y0 = origin
    theta = heading + p.vx * p.rho * times
    if p.rho == 0.0:
        s = p.vx * times
        x_ref = x0 + s * math.cos(heading)
        y_ref = y0 + s * math.sin(heading)
    else:
        x_ref = x0 + (np.sin(theta) - math.sin(heading)) / p.rho
        y_ref = y0 + (math.cos(heading) - np.cos(theta)) / p.rho
    normal_x = -np.sin(theta)
    normal_y = np.cos(theta)
    actual = np.column_stack([x_ref + e * normal_x, y_ref + e * normal_y])
    reference = np.column_stack([x_ref + 0.0 * e, y_ref + 0.0 * e])
    return TrajectoryPair(actual, reference)
