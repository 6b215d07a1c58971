from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyldpc.polyroots import (
    count_roots,
    exact,
    pcompose,
    pdivmod,
    peval,
    pgcd,
    pmul,
    real_roots,
    squarefree,
    trim,
)


def test_exact_reads_decimal_repr():
    assert exact(0.005) == Fraction(1, 200)
    assert exact(1e-10) == Fraction(1, 10**10)
    assert exact(Fraction(3, 7)) == Fraction(3, 7)
    assert exact(3) == 3


def test_compose_matches_sympy():
    x = sympy.Symbol("x")
    p = [Fraction(1), Fraction(-2), Fraction(0), Fraction(5)]
    q = [Fraction(1, 3), Fraction(2)]
    ours = pcompose(p, q)
    ref = sympy.Poly(sympy.expand(sum(c * (sympy.Rational(1, 3) + 2 * x) ** i for i, c in enumerate([1, -2, 0, 5]))), x)
    assert ours == [Fraction(int(c.p), int(c.q)) for c in reversed(ref.all_coeffs())]


def test_divmod_roundtrip():
    p = [Fraction(c) for c in (3, 0, -1, 4, 2)]
    q = [Fraction(c) for c in (1, 1)]
    quo, rem = pdivmod(p, q)
    back = trim([a + b for a, b in zip(pmul(quo, q) + [0] * 5, rem + [0] * 10)])
    assert back == trim(p)


def test_gcd_and_squarefree():
    # (x - 1/2)^2 (x + 3)
    p = pmul(pmul([Fraction(-1, 2), Fraction(1)], [Fraction(-1, 2), Fraction(1)]), [Fraction(3), Fraction(1)])
    g = pgcd(p, [Fraction(-1, 2), Fraction(1)])
    assert len(g) == 2 and peval(g, Fraction(1, 2)) == 0
    sf = squarefree(p)
    assert len(sf) == 3


def test_double_root_found_once():
    p = pmul([Fraction(-1, 4), Fraction(1)], [Fraction(-1, 4), Fraction(1)])
    assert real_roots(p, 0, 1) == pytest.approx([0.25], abs=1e-14)


def test_count_roots_half_open():
    p = pmul([Fraction(0), Fraction(1)], [Fraction(-1), Fraction(1)])  # roots 0, 1
    assert count_roots(p, Fraction(0), Fraction(1)) == 1
    assert count_roots(p, Fraction(-1), Fraction(1)) == 2


def test_clustered_roots_separated():
    roots = [Fraction(1, 10), Fraction(1, 10) + Fraction(1, 10**9), Fraction(3, 10)]
    p = [Fraction(1)]
    for r in roots:
        p = pmul(p, [-r, Fraction(1)])
    got = real_roots(p, 0, 1)
    assert got == pytest.approx([float(r) for r in roots], abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=2, max_size=8).filter(lambda c: c[-1] != 0))
def test_roots_agree_with_numpy(coeffs):
    p = [Fraction(c) for c in coeffs]
    ours = real_roots(p, -30, 30)
    for r in ours:
        assert abs(float(peval(p, exact(r)))) < 1e-6 * max(1, max(abs(c) for c in coeffs)) * 30 ** len(coeffs)
    ref = sorted(set(sympy.Poly(list(reversed(coeffs)), sympy.Symbol("x")).real_roots()))
    assert len(ours) == len(ref)
    assert np.allclose(ours, [float(r) for r in ref], atol=1e-12)
