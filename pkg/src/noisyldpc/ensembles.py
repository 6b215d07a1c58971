"""LDPC degree-distribution ensembles and configuration-model Tanner graphs."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .polyroots import exact

__all__ = [
    "DegreePoly",
    "EnsembleSpec",
    "TannerGraph",
    "ConfigurationError",
    "eval_degree_poly",
    "design_rate",
    "regular",
    "bazzi_family",
    "A_OPT",
    "node_degree_counts",
    "sample_graph",
    "parse_ensemble",
]

#: Numerical optimum of the rate-1/2 family for noiseless Gallager A.
A_OPT = 0.1115


class ConfigurationError(ValueError):
    """Inconsistent ensemble, graph or simulation configuration."""


@dataclass(frozen=True)
class DegreePoly:
    """Edge-perspective degree distribution.

    ``coeffs`` holds ``(degree, fraction)`` pairs; a degree ``i`` contributes
    ``fraction * x**(i - 1)`` to the generating function.
    """

    coeffs: tuple

    def __post_init__(self):
        pairs = tuple((int(d), float(f)) for d, f in self.coeffs)
        object.__setattr__(self, "coeffs", pairs)
        if not pairs:
            raise ConfigurationError("degree distribution is empty")
        degrees = [d for d, _ in pairs]
        if any(d < 2 for d in degrees):
            raise ConfigurationError(f"degrees must be >= 2, got {degrees}")
        if any(b <= a for a, b in zip(degrees, degrees[1:])):
            raise ConfigurationError(f"degrees must be strictly increasing, got {degrees}")
        fracs = [f for _, f in pairs]
        if any(f < 0 or f > 1 for f in fracs):
            raise ConfigurationError(f"fractions must lie in [0, 1], got {fracs}")
        if abs(math.fsum(fracs) - 1.0) > 1e-12:
            raise ConfigurationError(f"fractions must sum to 1, got {math.fsum(fracs)!r}")

    @classmethod
    def monomial(cls, degree):
        return cls(((degree, 1.0),))

    @property
    def degrees(self):
        return [d for d, _ in self.coeffs]

    @property
    def max_degree(self):
        return self.coeffs[-1][0]

    def __call__(self, x):
        return eval_degree_poly(self, x)

    def derivative(self, x):
        return sum(f * (d - 1) * np.power(x, d - 2) for d, f in self.coeffs)

    def integral(self):
        """Integral over [0, 1], i.e. the reciprocal of the average node degree."""
        return math.fsum(f / d for d, f in self.coeffs)

    def exact_coeffs(self):
        """Ascending coefficient list (Fractions) of the generating function."""
        out = [Fraction(0)] * self.max_degree
        for d, f in self.coeffs:
            out[d - 1] = exact(f)
        return out


def eval_degree_poly(p: DegreePoly, x):
    """Evaluate ``sum_i f_i x**(i-1)``; works elementwise on arrays."""
    return sum(f * np.power(x, d - 1) for d, f in p.coeffs)


@dataclass(frozen=True)
class EnsembleSpec:
    lam: DegreePoly
    rho: DegreePoly
    regular_dv: int | None = None
    regular_dr: int | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.regular_dv is not None and self.lam != DegreePoly.monomial(self.regular_dv):
            raise ConfigurationError("lambda does not match regular_dv")
        if self.regular_dr is not None and self.rho != DegreePoly.monomial(self.regular_dr):
            raise ConfigurationError("rho does not match regular_dr")
        r = design_rate(self)
        if not 0 < r < 1:
            raise ConfigurationError(f"design rate {r} is outside (0, 1)")

    @property
    def is_regular(self):
        return self.regular_dv is not None and self.regular_dr is not None

    @property
    def avg_var_degree(self):
        return 1.0 / self.lam.integral()

    @property
    def avg_check_degree(self):
        return 1.0 / self.rho.integral()

    def describe(self):
        if self.label:
            return self.label
        if self.is_regular:
            return f"regular {self.regular_dv} {self.regular_dr}"
        return json.dumps({"lambda": [list(c) for c in self.lam.coeffs],
                           "rho": [list(c) for c in self.rho.coeffs]})


def design_rate(e: EnsembleSpec) -> float:
    if e.regular_dv is not None and e.regular_dr is not None:
        return float(1 - Fraction(e.regular_dv, e.regular_dr))
    return 1.0 - e.rho.integral() / e.lam.integral()


def regular(dv: int, dr: int) -> EnsembleSpec:
    if dv < 2 or dr < 2:
        raise ConfigurationError(f"regular degrees must be >= 2, got ({dv}, {dr})")
    return EnsembleSpec(DegreePoly.monomial(dv), DegreePoly.monomial(dr), dv, dr)


def bazzi_family(a: float) -> EnsembleSpec:
    """Rate-1/2 family lambda = a x^2 + (1-a) x^3, rho = (7a/3) x^6 + ((3-7a)/3) x^7."""
    if not 0 <= a <= 3 / 7 + 1e-15:
        raise ConfigurationError(f"a must lie in [0, 3/7], got {a}")
    a = min(float(a), 3 / 7)

    def build(pairs):
        kept = [(d, f) for d, f in pairs if f > 1e-15]
        if len(kept) == 1:
            kept = [(kept[0][0], 1.0)]
        return DegreePoly(tuple(kept))

    r6 = 7 * a / 3
    lam = build(((3, a), (4, 1 - a)))
    rho = build(((7, r6), (8, 1 - r6)))
    dv = lam.max_degree if len(lam.coeffs) == 1 else None
    dr = rho.max_degree if len(rho.coeffs) == 1 else None
    return EnsembleSpec(lam, rho, dv, dr, label=f"bazzi {a!r}")


@dataclass(frozen=True)
class TannerGraph:
    """Labelled bipartite graph; edge ``k`` joins ``edge_var[k]`` and ``edge_check[k]``.

    Edges are stored sorted by variable node, so ``var_ptr`` slices the edge
    array per variable; ``check_order``/``check_ptr`` give the same view per check.
    Multi-edges are allowed.
    """

    n: int
    m: int
    edge_var: np.ndarray
    edge_check: np.ndarray
    var_degree: np.ndarray
    check_degree: np.ndarray
    var_ptr: np.ndarray
    check_order: np.ndarray
    check_ptr: np.ndarray

    @property
    def num_edges(self):
        return int(self.edge_var.size)

    @property
    def edges(self):
        return list(zip(self.edge_var.tolist(), self.edge_check.tolist()))

    @classmethod
    def from_edges(cls, n, m, edge_var, edge_check):
        edge_var = np.asarray(edge_var, dtype=np.int64)
        edge_check = np.asarray(edge_check, dtype=np.int64)
        order = np.lexsort((edge_check, edge_var))
        edge_var, edge_check = edge_var[order], edge_check[order]
        var_degree = np.bincount(edge_var, minlength=n)
        check_degree = np.bincount(edge_check, minlength=m)
        if var_degree.size != n or check_degree.size != m:
            raise ConfigurationError("edge endpoints out of range")
        var_ptr = np.concatenate(([0], np.cumsum(var_degree)))
        check_order = np.argsort(edge_check, kind="stable")
        check_ptr = np.concatenate(([0], np.cumsum(check_degree)))
        return cls(n, m, edge_var, edge_check, var_degree, check_degree,
                   var_ptr, check_order, check_ptr)

    @classmethod
    def from_parity_check(cls, H):
        H = np.asarray(H)
        checks, variables = np.nonzero(H)
        return cls.from_edges(H.shape[1], H.shape[0], variables, checks)

    def parity_check_matrix(self):
        """Dense m x n binary matrix; multi-edges cancel in pairs."""
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        np.add.at(H, (self.edge_check, self.edge_var), 1)
        return H & 1


def _apportion(total, weights):
    """Largest-remainder apportionment of ``total`` items over ``weights``."""
    weights = np.asarray(weights, dtype=float)
    raw = total * weights / weights.sum()
    counts = np.floor(raw).astype(np.int64)
    short = total - int(counts.sum())
    if short:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:short]] += 1
    return counts


def node_degree_counts(e: EnsembleSpec, n: int):
    """Integer node counts per degree for a length-n realisation of ``e``.

    Returns ``(var_degrees, var_counts, check_degrees, check_counts)``.
    Check counts are chosen so the check sockets equal the variable sockets
    exactly; if no such rounding exists a ConfigurationError is raised.
    """
    if n < 1:
        raise ConfigurationError(f"n must be positive, got {n}")
    if e.is_regular:
        dv, dr = e.regular_dv, e.regular_dr
        if (n * dv) % dr:
            raise ConfigurationError(f"n*dv = {n * dv} sockets is not divisible by dr = {dr}")
        return [dv], np.array([n]), [dr], np.array([n * dv // dr])

    vdeg = np.array(e.lam.degrees)
    vnode = np.array([f / d for d, f in e.lam.coeffs])
    vcount = _apportion(n, vnode)
    sockets = int((vcount * vdeg).sum())

    cdeg = np.array(e.rho.degrees)
    cnode = np.array([f / d for d, f in e.rho.coeffs])
    m = max(1, round(sockets * e.rho.integral()))
    best = None
    for mm in sorted(range(max(1, m - 3), m + 4), key=lambda k: abs(k - m)):
        ccount = _apportion(mm, cnode)
        diff = sockets - int((ccount * cdeg).sum())
        # shift single nodes between adjacent degrees to absorb the socket mismatch
        for _ in range(4 * len(cdeg) + abs(diff)):
            if diff == 0:
                break
            step = 1 if diff > 0 else -1
            moved = False
            for i in range(len(cdeg) - 1):
                src, dst = (i, i + 1) if step > 0 else (i + 1, i)
                gap = cdeg[i + 1] - cdeg[i]
                if ccount[src] > 0 and gap <= abs(diff):
                    ccount[src] -= 1
                    ccount[dst] += 1
                    diff -= step * gap
                    moved = True
                    break
            if not moved:
                break
        if diff == 0:
            best = ccount
            break
    if best is None:
        raise ConfigurationError(f"cannot realise {sockets} check sockets with degrees {cdeg.tolist()}")
    return vdeg.tolist(), vcount, cdeg.tolist(), best


def sample_graph(e: EnsembleSpec, n: int, seed=None) -> TannerGraph:
    """Configuration-model sample: sockets matched by a uniform random permutation."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    vdeg, vcount, cdeg, ccount = node_degree_counts(e, n)
    var_sockets = np.repeat(np.arange(n), np.repeat(vdeg, vcount))
    m = int(np.sum(ccount))
    check_sockets = np.repeat(np.arange(m), np.repeat(cdeg, ccount))
    if var_sockets.size != check_sockets.size:
        raise ConfigurationError("socket counts do not match")
    perm = rng.permutation(check_sockets.size)
    return TannerGraph.from_edges(n, m, var_sockets, check_sockets[perm])


def _pairs(obj):
    return tuple((int(d), float(f)) for d, f in obj)


def parse_ensemble(text) -> EnsembleSpec:
    """Parse an ensemble descriptor.

    Accepted forms: ``"regular 3 6"``, ``"3,6"``, ``"bazzi 0.1115"`` and JSON
    ``{"lambda": [[2, 0.5], [3, 0.5]], "rho": [[6, 1]]}`` (or the same dict).
    """
    if isinstance(text, EnsembleSpec):
        return text
    if isinstance(text, dict):
        obj = text
    else:
        s = str(text).strip()
        if s.startswith("{"):
            obj = json.loads(s)
        else:
            tokens = [t for t in re.split(r"[\s,()]+", s) if t]
            if tokens and tokens[0].lower() in ("regular", "reg"):
                tokens = tokens[1:]
            if tokens and tokens[0].lower() == "bazzi":
                if len(tokens) != 2:
                    raise ConfigurationError(f"expected 'bazzi <a>', got {text!r}")
                a = A_OPT if tokens[1].lower() in ("opt", "a_opt") else float(tokens[1])
                return bazzi_family(a)
            if len(tokens) != 2:
                raise ConfigurationError(f"cannot parse ensemble {text!r}")
            try:
                return regular(int(tokens[0]), int(tokens[1]))
            except ValueError as exc:
                raise ConfigurationError(f"cannot parse ensemble {text!r}") from exc
    if "regular" in obj:
        dv, dr = obj["regular"]
        return regular(int(dv), int(dr))
    try:
        lam, rho = obj["lambda"], obj["rho"]
    except KeyError as exc:
        raise ConfigurationError("ensemble JSON needs 'lambda' and 'rho'") from exc
    return EnsembleSpec(DegreePoly(_pairs(lam)), DegreePoly(_pairs(rho)))
