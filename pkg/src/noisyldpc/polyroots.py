"""Exact univariate polynomials over the rationals and guaranteed real-root isolation.

Polynomials are plain lists of :class:`fractions.Fraction` coefficients in
ascending order (``p[i]`` multiplies ``x**i``).  Real roots are isolated with a
Sturm sequence and then refined by exact bisection, so no root inside the
search interval can be skipped.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = [
    "exact",
    "trim",
    "padd",
    "psub",
    "pmul",
    "pscale",
    "ppow",
    "pcompose",
    "pderiv",
    "peval",
    "pdivmod",
    "pgcd",
    "squarefree",
    "primitive",
    "sturm_sequence",
    "count_roots",
    "real_roots",
    "RootFindingError",
]


class RootFindingError(ArithmeticError):
    """Raised when root isolation cannot finish within its step budget."""


def exact(x) -> Fraction:
    """Convert a number to a Fraction.

    Floats go through their shortest repr, so ``0.005`` becomes ``1/200``
    rather than the nearest binary fraction.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot represent {x!r} exactly")
    return Fraction(repr(x))


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def padd(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def psub(p, q):
    return padd(p, [-c for c in q])


def pscale(p, c):
    return trim([c * a for a in p])


def pmul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def ppow(p, k):
    out = [Fraction(1)]
    base = list(p)
    while k:
        if k & 1:
            out = pmul(out, base)
        k >>= 1
        if k:
            base = pmul(base, base)
    return out


def pcompose(p, q):
    """Return p(q(x))."""
    out = []
    for c in reversed(p):
        out = padd(pmul(out, q), [c])
    return out


def pderiv(p):
    return trim([i * p[i] for i in range(1, len(p))])


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pdivmod(p, q):
    p, q = trim(p), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in p]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    if len(r) - 1 < dq:
        return [], r
    quot = [Fraction(0)] * (len(r) - dq)
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lead
        quot[k] = c
        if c:
            for j in range(dq + 1):
                r[k + j] -= c * q[j]
    return trim(quot), trim(r[:dq])


def primitive(p):
    """Scale p by a positive rational so its coefficients are coprime integers.

    The sign of every value p(x) is unchanged, which is what Sturm counting needs.
    """
    p = trim(p)
    if not p:
        return []
    den = 1
    for c in p:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [Fraction(c // g) for c in ints]


def pgcd(p, q):
    a, b = primitive(p), primitive(q)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, primitive(r)
    if not a:
        return []
    return pscale(a, 1 / a[-1])


def squarefree(p):
    """Product of the distinct irreducible factors of p (same real roots, all simple)."""
    p = trim(p)
    if len(p) <= 2:
        return primitive(p)
    g = pgcd(p, pderiv(p))
    if len(g) <= 1:
        return primitive(p)
    quot, _ = pdivmod(p, g)
    return primitive(quot)


def sturm_sequence(p):
    """Sturm chain of p, each member rescaled by a positive constant."""
    p = primitive(p)
    seq = [p]
    if len(p) <= 1:
        return seq
    seq.append(primitive(pderiv(p)))
    while len(seq[-1]) > 1:
        _, r = pdivmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append(primitive([-c for c in r]))
    return seq


def _sign_changes(seq, x):
    changes = 0
    last = 0
    for q in seq:
        v = peval(q, x)
        if v == 0:
            continue
        s = 1 if v > 0 else -1
        if last and s != last:
            changes += 1
        last = s
    return changes


def count_roots(p, a, b):
    """Number of distinct real roots of p in the half-open interval (a, b]."""
    seq = sturm_sequence(squarefree(p))
    return _sign_changes(seq, exact(a)) - _sign_changes(seq, exact(b))


def _isolate(seq, a, b, va, vb, out, depth=0):
    n = va - vb
    if n <= 0:
        return
    if n == 1:
        out.append((a, b))
        return
    if depth > 200:
        raise RootFindingError(f"Sturm isolation did not separate roots in ({float(a)}, {float(b)}]")
    m = (a + b) / 2
    vm = _sign_changes(seq, m)
    _isolate(seq, a, m, va, vm, out, depth + 1)
    _isolate(seq, m, b, vm, vb, out, depth + 1)


def _refine(f, seq, a, b, tol):
    # one simple root in (a, b]
    if peval(f, b) == 0:
        return b
    fa = peval(f, a)
    if fa == 0:
        # the root sits strictly inside; nudge a inward with Sturm counts until p(a) != 0
        vb = _sign_changes(seq, b)
        while fa == 0:
            m = (a + b) / 2
            if _sign_changes(seq, m) - vb == 1:
                a = m
            else:
                b = m
                if peval(f, b) == 0:
                    return b
            fa = peval(f, a)
    sa = fa > 0
    for _ in range(400):
        if b - a <= tol:
            break
        m = (a + b) / 2
        fm = peval(f, m)
        if fm == 0:
            return m
        if (fm > 0) == sa:
            a = m
        else:
            b = m
    else:
        raise RootFindingError("bisection did not reach the requested tolerance")
    return (a + b) / 2


def real_roots(p, lo=0, hi=1, tol=1e-14):
    """All distinct real roots of p in the closed interval [lo, hi], ascending.

    Roots are returned as floats, each within ``tol`` of an exact root.
    The zero polynomial raises ``ValueError`` since every point is a root.
    """
    p = trim([exact(c) for c in p])
    if not p:
        raise ValueError("the zero polynomial has no isolated roots")
    lo, hi = exact(lo), exact(hi)
    if len(p) == 1:
        return []
    f = squarefree(p)
    seq = sturm_sequence(f)
    roots = []
    if peval(f, lo) == 0:
        roots.append(float(lo))
    intervals = []
    _isolate(seq, lo, hi, _sign_changes(seq, lo), _sign_changes(seq, hi), intervals)
    tol = exact(tol)
    for a, b in intervals:
        roots.append(float(_refine(f, seq, a, b, tol)))
    return roots
