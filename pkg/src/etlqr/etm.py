"""Clock-variable event triggering.

A scalar clock z in [0, z_bar] drains at a state-dependent rate and fires
an event when it reaches zero, at which point the controller resamples the
state and the clock resets to z_bar. The drain rate is never slower than
-sigma (1+z)^2 - epsilon, which yields a designable, strictly positive
lower bound on the time between events (synthesis.min_iet).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .synthesis import EtmDesign, SynthesisResult

__all__ = ["Strategy", "EtmState", "initial_state", "varpi", "omega",
           "step_clock", "control_input"]


@dataclass
class Strategy:
    """Control-update policy: periodic resampling or the clock trigger.

    Use the constructors ``Strategy.time_triggered(period)`` and
    ``Strategy.etm(design)``.
    """

    kind: str
    period: float | None = None
    design: EtmDesign | None = None

    def __post_init__(self) -> None:
        if self.kind == "time_triggered":
            if self.period is None or not (math.isfinite(self.period) and self.period > 0.0):
                raise ValueError(f"period must be positive, got {self.period!r}")
            if self.design is not None:
                raise ValueError("time_triggered strategy takes no EtmDesign")
        elif self.kind == "etm":
            if not isinstance(self.design, EtmDesign):
                raise ValueError("etm strategy requires an EtmDesign")
            if self.period is not None:
                raise ValueError("etm strategy takes no period")
        else:
            raise ValueError(f"unknown strategy kind {self.kind!r}")

    @classmethod
    def time_triggered(cls, period: float) -> "Strategy":
        return cls(kind="time_triggered", period=period)

    @classmethod
    def etm(cls, design: EtmDesign) -> "Strategy":
        return cls(kind="etm", design=design)


@dataclass
class EtmState:
    """Trigger bookkeeping carried between samples.

    z                  clock value in [0, z_bar]
    eta                held state minus current state (sampling error)
    last_trigger_time  time of the most recent event [s]
    held_state         state sample the controller is currently acting on
    time               current time [s]
    """

    z: float
    eta: np.ndarray
    last_trigger_time: float
    held_state: np.ndarray
    time: float = 0.0


def initial_state(x0: np.ndarray, design: EtmDesign, t0: float = 0.0) -> EtmState:
    """State right after the initial event at t0: fresh sample, full clock."""
    x0 = np.asarray(x0, dtype=float).reshape(4).copy()
    return EtmState(z=design.z_bar, eta=np.zeros(4), last_trigger_time=t0,
                    held_state=x0, time=t0)


def varpi(x_tilde: np.ndarray, eta: np.ndarray, z: float,
          syn: SynthesisResult, d: EtmDesign) -> float:
    """State-dependent part of the clock drain rate.

    With ratio rho = |x| / |eta|:

        varpi = theta_l lam_min(N)/lam_min(M) rho^2
                - 2 (1+z) theta_r |M B K|/lam_min(M) rho

    Scale-invariant in (x, eta) jointly. Undefined for eta = 0; calling it
    so is a programming error and raises ValueError.
    """
    eta = np.asarray(eta, dtype=float)
    norm_eta = float(np.linalg.norm(eta))
    if norm_eta == 0.0:
        raise ValueError("varpi is undefined for eta = 0; omega handles that branch")
    ratio = float(np.linalg.norm(np.asarray(x_tilde, dtype=float))) / norm_eta
    coef_quad = d.theta_l * syn.lam_min_n / syn.lam_min_m
    coef_cross = d.theta_r * syn.mbk_norm / syn.lam_min_m
    return coef_quad * ratio * ratio - 2.0 * (1.0 + z) * coef_cross * ratio


def omega(x_tilde: np.ndarray, eta: np.ndarray, z: float,
          syn: SynthesisResult, d: EtmDesign) -> float:
    """Clock drain rate: min(0, varpi) - epsilon, or -epsilon while the
    sampling error is exactly zero. Always <= -epsilon, and never below
    -sigma (1+z)^2 - epsilon."""
    if float(np.linalg.norm(np.asarray(eta, dtype=float))) == 0.0:
        return -d.epsilon
    w = varpi(x_tilde, eta, z, syn, d)
    if w > 0.0:
        w = 0.0
    return w - d.epsilon


def step_clock(s: EtmState, x_tilde_now: np.ndarray, dt: float,
               syn: SynthesisResult, d: EtmDesign) -> tuple[EtmState, bool]:
    """Advance the clock by one sampling interval; report whether it fired.

    The drain rate is evaluated on the stored sample (explicit Euler over
    the elapsed interval, left endpoint), so the step right after an event
    always drains at exactly -epsilon. The clock clamps at zero; reaching
    zero fires the event: the state passed in becomes the new held sample
    and the clock resets to z_bar.
    """
    x_now = np.asarray(x_tilde_now, dtype=float).reshape(4)
    x_prev = s.held_state - s.eta
    w = omega(x_prev, s.eta, s.z, syn, d)
    z_new = s.z + w * dt
    if z_new < 0.0:
        z_new = 0.0
    t_new = s.time + dt
    if z_new == 0.0:
        nxt = EtmState(z=d.z_bar, eta=np.zeros(4), last_trigger_time=t_new,
                       held_state=x_now.copy(), time=t_new)
        return nxt, True
    nxt = EtmState(z=z_new, eta=s.held_state - x_now,
                   last_trigger_time=s.last_trigger_time,
                   held_state=s.held_state, time=t_new)
    return nxt, False


def control_input(strategy: Strategy, s: EtmState, x_tilde_now: np.ndarray,
                  k: np.ndarray) -> float:
    """Zero-order-hold feedback u = -K x_held.

    Constant between events for either strategy kind; the held sample in
    ``s`` is refreshed by step_clock (etm) or by the simulation loop at
    period boundaries (time_triggered). The instantaneous state is accepted
    for signature symmetry but never read: only the held sample drives u.
    """
    del x_tilde_now
    k_row = np.asarray(k, dtype=float).reshape(-1)
    return -float(k_row @ s.held_state)
