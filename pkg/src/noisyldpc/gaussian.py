"""Gaussian-approximation density evolution for a belief-propagation decoder
whose messages suffer bounded additive noise in [-alpha/2, alpha/2].

The tracked state is the mean belief ``s`` at a variable node.  The worst
bounded noise subtracts ``alpha/2`` from every message, which gives the
deterministic recursion implemented by :func:`gaussian_de_step`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "PHI_A",
    "PHI_B",
    "PHI_C",
    "GaussParams",
    "GaussTrace",
    "ThresholdResult",
    "phi",
    "phi_inv",
    "gaussian_de_step",
    "gaussian_iterate",
    "gaussian_threshold",
    "CONVERGED",
    "STUCK",
    "UNDECIDED",
]

PHI_A = -0.4527
PHI_B = 0.0218
PHI_C = 0.86

CONVERGED = "converged-to-zero-error"
STUCK = "stuck"
UNDECIDED = "undecided"

DEFAULT_BREAKOUT = 1e4
DEFAULT_MAX_ITER = 2000
STUCK_TOL = 1e-9


@dataclass(frozen=True)
class GaussParams:
    eps2: float
    alpha: float
    dv: int
    dr: int

    def __post_init__(self):
        if not self.eps2 > 0:
            raise ValueError(f"eps2 must be positive, got {self.eps2}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be non-negative, got {self.alpha}")
        if self.dv < 2 or self.dr < 2:
            raise ValueError(f"degrees must be >= 2, got ({self.dv}, {self.dr})")

    @classmethod
    def from_sigma(cls, sigma, alpha, dv, dr):
        return cls(sigma * sigma, alpha, dv, dr)

    @property
    def s0(self):
        return 2.0 / self.eps2


@dataclass
class GaussTrace:
    states: np.ndarray
    verdict: str

    @property
    def iterations(self):
        return len(self.states) - 1


class ThresholdResult(NamedTuple):
    eps_star: float
    found: bool


def phi(v):
    """exp(a v^c + b) clipped to (0, 1], with phi(0) = 1 exactly."""
    v = np.asarray(v, dtype=float)
    if np.any(v < 0):
        raise ValueError("phi is defined for v >= 0")
    with np.errstate(divide="ignore"):
        out = np.minimum(1.0, np.exp(PHI_A * np.power(v, PHI_C) + PHI_B))
    out = np.where(v == 0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def phi_inv(y):
    """Inverse of :func:`phi` on (0, 1); returns 0 for y >= 1."""
    y = float(y)
    if not y > 0:
        raise ValueError(f"phi_inv needs y > 0, got {y}")
    if y >= 1:
        return 0.0
    return ((math.log(y) - PHI_B) / PHI_A) ** (1 / PHI_C)


def _check_message(u, dr):
    # 1 - (1 - phi(u))**(dr-1) without cancellation; 0 means the belief is infinite
    p = phi(u)
    if p >= 1:
        return 1.0
    return -math.expm1((dr - 1) * math.log1p(-p))


def gaussian_de_step(s, p: GaussParams):
    """One iteration; ``math.inf`` is the absorbing divergence state.

    Negative arguments of phi are clamped to 0 and the output is floored at
    0, so the state stays a valid (non-negative) mean belief.
    """
    if math.isinf(s):
        return math.inf
    u = max(s - p.alpha / 2, 0.0)
    y = _check_message(u, p.dr)
    if y <= 0:
        return math.inf
    nxt = p.s0 - (p.dv - 1) * p.alpha / 2 + (p.dv - 1) * phi_inv(y)
    return max(nxt, 0.0)


def gaussian_iterate(p: GaussParams, max_iter=DEFAULT_MAX_ITER, s_breakout=DEFAULT_BREAKOUT):
    """Iterate from ``2/eps2`` and classify the outcome.

    The verdict is CONVERGED once the state exceeds ``s_breakout``, STUCK when
    it settles (step below 1e-9) under the breakout value, and UNDECIDED if
    neither happens within ``max_iter`` steps.
    """
    s = p.s0
    states = [s]
    if s > s_breakout:
        return GaussTrace(np.array(states), CONVERGED)
    for _ in range(max_iter):
        nxt = gaussian_de_step(s, p)
        states.append(nxt)
        if nxt > s_breakout:
            return GaussTrace(np.array(states), CONVERGED)
        if abs(nxt - s) < STUCK_TOL:
            return GaussTrace(np.array(states), STUCK)
        s = nxt
    return GaussTrace(np.array(states), UNDECIDED)


def gaussian_threshold(alpha, dv, dr, tol=1e-6, max_bisect=60, eps_max=10.0,
                       max_iter=DEFAULT_MAX_ITER, s_breakout=DEFAULT_BREAKOUT) -> ThresholdResult:
    """Largest channel noise std ``eps`` for which decoding reaches zero error.

    Bisection over ``[tol, eps_max]`` on the verdict of :func:`gaussian_iterate`;
    an UNDECIDED run counts as failure.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    def good(eps):
        tr = gaussian_iterate(GaussParams.from_sigma(eps, alpha, dv, dr), max_iter, s_breakout)
        return tr.verdict == CONVERGED

    lo, hi = tol, eps_max
    if not good(lo):
        return ThresholdResult(0.0, False)
    if good(hi):
        return ThresholdResult(hi, True)
    for _ in range(max_bisect):
        if hi - lo < tol:
            break
        mid = (lo + hi) / 2
        if good(mid):
            lo = mid
        else:
            hi = mid
    return ThresholdResult(lo, True)
