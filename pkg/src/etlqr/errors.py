"""Exception types shared across the package."""
from __future__ import annotations


class EtlqrError(Exception):
    """Base class for errors raised by this package."""


class SynthesisError(EtlqrError):
    """A controller-synthesis step failed (non-convergence, singular
    subproblem, or a solution that violates its certificate)."""


class SimulationDiverged(EtlqrError):
    """The closed-loop state left the trust region during integration."""

    def __init__(self, step: int, time: float, norm: float):
        self.step = step
        self.time = time
        self.norm = norm
        super().__init__(
            f"state diverged at step {step} (t = {time:.6g} s): |x| = {norm:.3e} > 1e6"
        )
