"""Density evolution for Gallager A decoding on the BSC when every message
crosses an independent BSC(alpha) wire.

The state ``s`` is the probability that a variable-to-check message is wrong.
One iteration maps ``s`` to::

    eps - eps * q_plus(s) + (1 - eps) * q_minus(s)

with ``q_plus``/``q_minus`` defined below.  Everything is a polynomial in
``s``, so fixed points and threshold crossings are found as exact real roots.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .ensembles import EnsembleSpec, regular
from .polyroots import (
    exact,
    padd,
    pcompose,
    pderiv,
    peval,
    pmul,
    pscale,
    psub,
    real_roots,
)

log = logging.getLogger(__name__)

__all__ = [
    "NoiseParams",
    "DeTrace",
    "FixedPointSet",
    "SingularityError",
    "omega",
    "q_plus",
    "q_minus",
    "de_step",
    "de_step_derivative",
    "iterate_de",
    "fixed_point_polynomial",
    "fixed_points",
    "final_error",
    "tau_polynomial",
    "tau_points",
    "decoder_benefit_intervals",
    "channel_for_fixed_point",
    "threshold_eta",
    "eta_at_threshold",
    "region_to_use_decoder",
    "noiseless_threshold_bru",
    "appendix_c_constants",
    "appendix_c_threshold",
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
    "ROOT_DEDUP",
]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100_000
ROOT_DEDUP = 1e-10
_HALF = Fraction(1, 2)


class SingularityError(ZeroDivisionError):
    """The threshold formula's denominator vanishes."""


@dataclass(frozen=True)
class NoiseParams:
    eps: float
    alpha: float

    def __post_init__(self):
        for name in ("eps", "alpha"):
            v = getattr(self, name)
            if not 0 <= v <= 0.5:
                raise ValueError(f"{name} must lie in [0, 1/2], got {v}")


@dataclass
class DeTrace:
    states: np.ndarray
    converged: bool
    limit: float | None

    @property
    def iterations(self):
        return len(self.states) - 1


@dataclass
class FixedPointSet:
    roots: list
    stability: list
    derivatives: list

    def stable_roots(self):
        return [r for r, s in zip(self.roots, self.stability) if s == "stable"]

    def __len__(self):
        return len(self.roots)


def omega(s, alpha):
    return (2 * alpha - 1) * (2 * s - 1)


def _inner(s, alpha, e):
    r = e.rho(omega(s, alpha))
    half_gap = (1 - 2 * alpha) * r / 2
    return 0.5 + half_gap, 0.5 - half_gap


def q_plus(s, alpha, e: EnsembleSpec):
    """Probability that all incoming check messages at a variable arrive correct."""
    xp, _ = _inner(s, alpha, e)
    return e.lam(xp)


def q_minus(s, alpha, e: EnsembleSpec):
    """Probability that all incoming check messages at a variable arrive wrong."""
    _, xm = _inner(s, alpha, e)
    return e.lam(xm)


def de_step(s, p: NoiseParams, e: EnsembleSpec):
    xp, xm = _inner(s, p.alpha, e)
    return p.eps - p.eps * e.lam(xp) + (1 - p.eps) * e.lam(xm)


def de_step_derivative(s, p: NoiseParams, e: EnsembleSpec):
    """d(de_step)/ds by the chain rule; non-negative on [0, 1/2]."""
    xp, xm = _inner(s, p.alpha, e)
    common = e.rho.derivative(omega(s, p.alpha)) * (1 - 2 * p.alpha) ** 2
    return common * (p.eps * e.lam.derivative(xp) + (1 - p.eps) * e.lam.derivative(xm))


def iterate_de(p: NoiseParams, e: EnsembleSpec, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, s0=None):
    """Run the recursion from ``s0`` (default: the channel crossover ``eps``).

    Stops once successive states differ by less than ``tol``.  Hitting
    ``max_iter`` is not an error; the trace comes back with ``converged=False``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = p.eps if s0 is None else float(s0)
    states = [s]
    converged = False
    for _ in range(max_iter):
        nxt = float(de_step(s, p, e))
        states.append(nxt)
        if abs(nxt - s) < tol:
            converged = True
            s = nxt
            break
        s = nxt
    return DeTrace(np.array(states), converged, s if converged else None)


# -- exact polynomial machinery ------------------------------------------------

@lru_cache(maxsize=256)
def _q_polys(alpha: Fraction, e: EnsembleSpec):
    lam = e.lam.exact_coeffs()
    rho = e.rho.exact_coeffs()
    w = [1 - 2 * alpha, 4 * alpha - 2]
    r = pcompose(rho, w)
    gap = pscale(r, (1 - 2 * alpha) / 2)
    qp = pcompose(lam, padd([_HALF], gap))
    qm = pcompose(lam, psub([_HALF], gap))
    return tuple(qp), tuple(qm)


def fixed_point_polynomial(p: NoiseParams, e: EnsembleSpec):
    """Exact ascending coefficients of ``de_step(s) - s`` (Fractions)."""
    eps = exact(p.eps)
    qp, qm = _q_polys(exact(p.alpha), e)
    poly = padd(pscale(list(qp), -eps), pscale(list(qm), 1 - eps))
    return padd(poly, [eps, Fraction(-1)])


def _dedup(roots, tol=ROOT_DEDUP):
    out = []
    for r in sorted(roots):
        if out and r - out[-1] < tol:
            continue
        out.append(r)
    return out


def fixed_points(p: NoiseParams, e: EnsembleSpec) -> FixedPointSet:
    """All fixed points in [0, 1/2] with their stability under iteration."""
    roots = _dedup(real_roots(fixed_point_polynomial(p, e), 0, _HALF))
    labels, derivs = [], []
    for r in roots:
        d = float(de_step_derivative(r, p, e))
        derivs.append(d)
        if abs(abs(d) - 1) < 1e-9:
            log.warning("fixed point %.12g at eps=%g alpha=%g is marginal (|slope|=%g)", r, p.eps, p.alpha, d)
            labels.append("unstable")
        else:
            labels.append("stable" if abs(d) < 1 else "unstable")
    return FixedPointSet(roots, labels, derivs)


def tau_polynomial(alpha, e: EnsembleSpec):
    """Cleared form of ``(s - q_minus)/(1 - q_plus - q_minus) - s``.

    Equals ``s - de_step(s)`` when the channel crossover is set to ``s``
    itself, so it is positive exactly where decoding lowers the error.
    """
    qp, qm = _q_polys(exact(alpha), e)
    s = [Fraction(0), Fraction(1)]
    return psub(pmul(s, list(qp)), pmul([Fraction(1), Fraction(-1)], list(qm)))


def _tau_denominator(alpha, e):
    qp, qm = _q_polys(exact(alpha), e)
    return psub([Fraction(1)], padd(list(qp), list(qm)))


@lru_cache(maxsize=256)
def _all_tau_roots(alpha, e):
    return _dedup(real_roots(tau_polynomial(alpha, e), 0, _HALF))


def tau_points(alpha, e: EnsembleSpec):
    """Channel levels in (0, 1/2) at which a fixed point equals the channel level.

    The root at 1/2 is always present (no information either way) and is
    dropped, as are roots where the denominator vanishes.
    """
    if not 0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    den = _tau_denominator(alpha, e)
    out = []
    for r in _all_tau_roots(alpha, e):
        if r <= 0 or r >= 0.5 - ROOT_DEDUP:
            continue
        if abs(float(peval(den, exact(r)))) < 1e-14:
            continue
        out.append(r)
    return out


def decoder_benefit_intervals(alpha, e: EnsembleSpec):
    """Maximal open intervals of eps in (0, 1/2) where one decoding step lowers the error."""
    poly = tau_polynomial(alpha, e)
    cuts = sorted(set([0.0, 0.5] + _all_tau_roots(alpha, e)))
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo < ROOT_DEDUP:
            continue
        if peval(poly, exact((lo + hi) / 2)) > 0:
            if out and abs(out[-1][1] - lo) < ROOT_DEDUP:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return out


def final_error(p: NoiseParams, e: EnsembleSpec, from_below=False):
    """Limit of the recursion started at ``eps``, read off the fixed points.

    The one-step map is non-decreasing in ``s``, so the iterates move
    monotonically to the nearest fixed point in the direction of the first
    step.  With ``from_below`` the left limit as the channel level rises to
    ``eps`` is returned, which differs from the value at ``eps`` only when
    ``eps`` is itself one of the tau points.
    """
    fps = fixed_points(p, e).roots
    eps = p.eps
    f = fixed_point_polynomial(p, e)
    value = peval(f, exact(eps))
    on_root = value == 0 or any(abs(r - eps) < 1e-12 for r in fps)
    if on_root and from_below:
        if eps == 0:
            return 0.0
        # which way does the first step go for channel levels just below eps?
        taus = [t for t in _all_tau_roots(p.alpha, e) if t < eps - ROOT_DEDUP]
        gap = eps - (taus[-1] if taus else 0.0)
        probe = exact(eps) - exact(min(1e-9, gap / 2))
        going_down = peval(tau_polynomial(p.alpha, e), probe) > 0
        if going_down:
            below = [r for r in fps if r < eps - ROOT_DEDUP]
            return below[-1] if below else 0.0
        return eps
    if on_root:
        return eps
    if value < 0:
        below = [r for r in fps if r < eps]
        return below[-1]
    above = [r for r in fps if r > eps]
    return above[0]


def channel_for_fixed_point(eta, alpha, e: EnsembleSpec):
    """Closed form (eta - q_minus(eta)) / (1 - q_plus(eta) - q_minus(eta)).

    This is the unique channel level at which ``eta`` is a fixed point; it is
    the eta-threshold whenever the small stable fixed point reaches ``eta``
    before the decoder stops being useful.
    """
    qp, qm = q_plus(eta, alpha, e), q_minus(eta, alpha, e)
    den = 1 - qp - qm
    if abs(den) < 1e-14:
        raise SingularityError(f"denominator {den!r} vanishes at eta={eta}, alpha={alpha}")
    return (eta - qm) / den


def _saddle_channels(alpha, e):
    """Channel levels where two fixed points merge (tangencies of the fixed-point curve)."""
    qp, qm = _q_polys(exact(alpha), e)
    A = psub([Fraction(1)], padd(list(qp), list(qm)))
    B = list(qm)
    s = [Fraction(0), Fraction(1)]
    num = psub(pmul(psub([Fraction(1)], pderiv(B)), A), pmul(psub(s, B), pderiv(A)))
    if not num:
        return []
    out = []
    for r in real_roots(num, 0, _HALF):
        a = float(peval(A, exact(r)))
        if abs(a) < 1e-14:
            continue
        out.append((r - float(peval(B, exact(r)))) / a)
    return out


def threshold_eta(eta, alpha, e: EnsembleSpec):
    """Largest channel level in [0, 1/2] whose final error stays below ``eta``.

    The final error, as a function of the channel level, is piecewise
    continuous; it can only jump at tau points or at fixed-point tangencies
    and can only cross ``eta`` where ``channel_for_fixed_point`` says so.
    Testing one point inside each piece therefore gives the supremum exactly.
    Returns 0.0 when no channel level qualifies.
    """
    if not 0 <= alpha <= 0.5:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    points = {0.0, 0.5}
    points.update(_all_tau_roots(alpha, e))
    try:
        points.add(float(channel_for_fixed_point(eta, alpha, e)))
    except SingularityError:
        pass
    points = {c for c in points if 0 <= c <= 0.5}
    cuts = _dedup(points | {c for c in _saddle_channels(alpha, e) if 0 <= c <= 0.5}, tol=1e-13)

    def ok(eps):
        return final_error(NoiseParams(eps, alpha), e) < eta

    best = 0.0
    for i, c in enumerate(cuts):
        # tangency points are skipped: the slope there is exactly 1
        if c in points and ok(c):
            best = max(best, c)
        if i + 1 < len(cuts) and ok((c + cuts[i + 1]) / 2):
            best = max(best, cuts[i + 1])
    return best


def eta_at_threshold(eta, alpha, e: EnsembleSpec):
    """``(eps_star, final error just below eps_star)``."""
    eps_star = threshold_eta(eta, alpha, e)
    return eps_star, final_error(NoiseParams(eps_star, alpha), e, from_below=True)


def region_to_use_decoder(e: EnsembleSpec, alpha_grid):
    """``(alpha, tau1, tau2)`` per grid point, ``(alpha, None, None)`` if decoding never helps.

    ``tau1``/``tau2`` bound the lowest interval of channel levels where the
    final error is below the channel level; the endpoints are excluded.
    """
    rows = []
    for alpha in alpha_grid:
        if not 0 <= alpha <= 0.5:
            raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
        iv = decoder_benefit_intervals(alpha, e)
        if iv:
            rows.append((alpha, iv[0][0], iv[0][1]))
        else:
            rows.append((alpha, None, None))
    return rows


def noiseless_threshold_bru():
    """Closed-form noiseless Gallager A threshold of the (3,6) ensemble.

    ``sigma = (1 - 2 eps)**2`` is the real root in (0, 1) of
    ``x**4 + x**3 + x**2 - x - 1``, written out by Ferrari's method.
    """
    c = 83 + 3 * math.sqrt(993)
    b = 8 / 3 * (2 / c) ** (1 / 3) - (c / 2) ** (1 / 3) / 3
    root = math.sqrt(-5 / 12 - b)
    sigma = -0.25 + root / 2 + math.sqrt(-5 / 6 + b + 11 / (4 * root)) / 2
    return (1 - math.sqrt(sigma)) / 2


_QUINTIC_COEFFS = (
    (0, 0, 36, -360, 1860, -6240, 14752, -25344, 31680, -28160, 16896, -6144, 1024),
    (1, -72, 1080, -8160, 38640, -125952, 295424, -506880, 633600, -563200, 337920, -122880, 20480),
    (32, -864, 10080, -69120, 314880, -1012224, 2364928, -4055040, 5068800, -4505600, 2703360,
     -983040, 163840),
    (160, -3840, 42240, -281600, 1267200, -4055040, 9461760, -16220160, 20275200, -18022400,
     10813440, -3932160, 655360),
    (320, -7680, 84480, -563200, 2534400, -8110080, 18923520, -32440320, 40550400, -36044800,
     21626880, -7864320, 1310720),
    (256, -6144, 67584, -450560, 2027520, -6488064, 15138816, -25952256, 32440320, -28835840,
     17301504, -6291456, 1048576),
)


def appendix_c_constants(alpha):
    """The six alpha-polynomial coefficients of the (3,6) eta=1/10 threshold quintic.

    Evaluated in exact rational arithmetic (floats are read by their decimal repr).
    """
    a = exact(alpha)
    if not 0 <= a <= _HALF:
        raise ValueError(f"alpha must lie in [0, 1/2], got {alpha}")
    return tuple(peval([Fraction(c) for c in row], a) for row in _QUINTIC_COEFFS)


def appendix_c_threshold(alpha):
    """``(1 - sqrt(1 + 4 c7)) / 2`` with c7 the second real root of the quintic."""
    cs = appendix_c_constants(alpha)
    bound = 1 + max(abs(c / cs[-1]) for c in cs[:-1])
    roots = real_roots(list(cs), -bound, bound)
    if len(roots) < 2:
        raise ArithmeticError(f"quintic has {len(roots)} real roots; need at least two")
    c7 = roots[1]
    return (1 - math.sqrt(1 + 4 * c7)) / 2


REGULAR_36 = regular(3, 6)
