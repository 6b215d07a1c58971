"""Memories built from noisy registers refreshed by a noisy Gallager A network.

At every time step the registers flip with probability ``alpha_r`` and the
correcting network (wire noise ``alpha``) decodes them, feeding its output
back as the next stored value.  The stored-bit error ``s`` then follows the
Gallager A recursion with the channel level replaced by
``s (1 - alpha_r) + alpha_r (1 - s)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ensembles import ConfigurationError, EnsembleSpec, design_rate
from .gallager_a import DEFAULT_MAX_ITER, DEFAULT_TOL, ROOT_DEDUP, _q_polys, q_minus, q_plus
from .polyroots import exact, padd, peval, pmul, psub, real_roots

__all__ = [
    "EPS_GLB_36",
    "MemoryParams",
    "CapacityReport",
    "MemoryRegionRow",
    "memory_de_step",
    "iterate_memory",
    "memory_polynomial",
    "memory_region",
    "memory_stable",
    "complexity",
    "complexity_breakdown",
    "redundancy",
    "storage_capacity_lb",
    "capacity_report",
]

#: Gallager lower bound on the ML threshold of the (3,6) ensemble (external table value).
EPS_GLB_36 = 0.0914755


@dataclass(frozen=True)
class MemoryParams:
    alpha: float
    alpha_r: float
    eps: float
    ensemble: EnsembleSpec

    def __post_init__(self):
        for name in ("alpha", "alpha_r", "eps"):
            v = getattr(self, name)
            if not 0 <= v <= 0.5:
                raise ValueError(f"{name} must lie in [0, 1/2], got {v}")


@dataclass
class CapacityReport:
    ensemble: str
    complexity: int
    n: int
    rate: float
    redundancy: float
    capacity_lb: float
    stable: bool | None

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class MemoryRegionRow:
    alpha: float
    alpha_r: float
    use_low: float | None
    eps_low: float | None
    eps_high: float | None
    stable: bool

    @property
    def empty(self):
        return self.eps_high is None


def _eps2(s, alpha_r):
    return s * (1 - alpha_r) + alpha_r * (1 - s)


def memory_de_step(s, mp: MemoryParams):
    e2 = _eps2(s, mp.alpha_r)
    return e2 - e2 * q_plus(s, mp.alpha, mp.ensemble) + (1 - e2) * q_minus(s, mp.alpha, mp.ensemble)


def iterate_memory(mp: MemoryParams, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Iterate from the initial storage error ``eps``; returns ``(limit, converged, steps)``."""
    s = mp.eps
    for k in range(1, max_iter + 1):
        nxt = float(memory_de_step(s, mp))
        if abs(nxt - s) < tol:
            return nxt, True, k
        s = nxt
    return s, False, max_iter


def memory_polynomial(alpha, alpha_r, e: EnsembleSpec):
    """Exact coefficients of ``memory_de_step(s) - s``."""
    a_r = exact(alpha_r)
    qp, qm = _q_polys(exact(alpha), e)
    e2 = [a_r, 1 - 2 * a_r]
    one_minus_e2 = psub([Fraction(1)], e2)
    poly = psub(e2, pmul(e2, list(qp)))
    poly = padd(poly, pmul(one_minus_e2, list(qm)))
    return psub(poly, [Fraction(0), Fraction(1)])


def _benefit_intervals(alpha, alpha_r, e):
    poly = memory_polynomial(alpha, alpha_r, e)
    roots = real_roots(poly, 0, Fraction(1, 2))
    cuts = sorted(set([0.0, 0.5] + roots))
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo < ROOT_DEDUP:
            continue
        if peval(poly, exact((lo + hi) / 2)) < 0:
            out.append((lo, hi))
    return out


def memory_region(e: EnsembleSpec, alpha_grid, tie_alpha_r_to_alpha=True, alpha_r=0.0,
                  silver_threshold=EPS_GLB_36):
    """Per-alpha extent of the region where the memory lowers the stored error.

    ``use_low``/``eps_high`` bound the lowest interval of initial errors for
    which one time step reduces the error (so the iterates settle below the
    start); ``eps_low`` is 0 after adding the hypograph below that interval.
    ``stable`` applies :func:`memory_stable` just inside the upper boundary.
    """
    rows = []
    for alpha in alpha_grid:
        a_r = alpha if tie_alpha_r_to_alpha else alpha_r
        iv = _benefit_intervals(alpha, a_r, e)
        if not iv:
            rows.append(MemoryRegionRow(alpha, a_r, None, None, None, False))
            continue
        lo, hi = iv[0]
        probe = hi * (1 - 1e-9)
        ok = memory_stable(MemoryParams(alpha, a_r, probe, e), silver_threshold)
        rows.append(MemoryRegionRow(alpha, a_r, lo, 0.0, hi, ok))
    return rows


def memory_stable(mp: MemoryParams, silver_threshold=EPS_GLB_36, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """True when the iterated stored-bit error settles below the silver decoder threshold."""
    if not 0 < silver_threshold < 0.5:
        raise ValueError(f"silver_threshold must lie in (0, 1/2), got {silver_threshold}")
    limit, _, _ = iterate_memory(mp, tol, max_iter)
    return limit < silver_threshold


def complexity(dv, dr, n):
    """Component count n (dv dr - 1) of the register + correcting-network memory."""
    if dv < 2 or dr < 2 or n < 1:
        raise ValueError("need dv, dr >= 2 and n >= 1")
    return n * (dv * dr - 1)


def complexity_breakdown(dv, dr, n):
    """Registers, variable-node consensus logic (2 dv - 2 each) and two-input XOR gates."""
    return {
        "registers": n,
        "variable_logic": n * (2 * dv - 2),
        "check_xor_gates": n * dv * (dr - 2),
    }


def _node_degrees(e: EnsembleSpec, literal=False):
    if literal:
        return float(e.lam.derivative(1.0)), float(e.rho.derivative(1.0))
    if e.is_regular:
        return Fraction(e.regular_dv), Fraction(e.regular_dr)
    return 1 / e.lam.integral(), 1 / e.rho.integral()


def redundancy(e: EnsembleSpec):
    """Complexity per stored information bit, (l r - 1) / rate with average node degrees l, r."""
    rate = design_rate(e)
    if rate <= 0:
        raise ConfigurationError(f"design rate {rate} leaves no information bits")
    l, r = _node_degrees(e)
    if e.is_regular:
        return float((l * r - 1) / (1 - l / r))
    return (l * r - 1) / rate


def storage_capacity_lb(e: EnsembleSpec, literal_derivatives=False):
    """Lower bound (1 - l/r) / (l r - 1) on storage capacity.

    ``l`` and ``r`` are the average variable and check node degrees, which
    makes the regular case exactly ``(1 - dv/dr) / (dv dr - 1)``.  With
    ``literal_derivatives`` the edge-perspective lambda'(1), rho'(1) are used
    instead, for comparison only.
    """
    l, r = _node_degrees(e, literal_derivatives)
    den = l * r - 1
    if den <= 0:
        raise ConfigurationError("degenerate degrees give a non-positive denominator")
    return float((1 - l / r) / den)


def capacity_report(e: EnsembleSpec, n=1, stable=None):
    if e.is_regular:
        chi = complexity(e.regular_dv, e.regular_dr, n)
    else:
        l, r = _node_degrees(e)
        chi = int(round(n * (l * r - 1)))
    return CapacityReport(e.describe(), chi, n, design_rate(e), redundancy(e),
                          storage_capacity_lb(e), stable)
