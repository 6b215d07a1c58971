"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line in the terminal summary (see conftest.py).
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from noisyldpc import gallager_a as ga
from noisyldpc import gaussian as gs
from noisyldpc import memory as mm
from noisyldpc import montecarlo as mc
from noisyldpc.ensembles import A_OPT, bazzi_family, regular, sample_graph

E36 = regular(3, 6)


def criterion(label):
    def wrap(fn):
        fn.criterion = label
        return fn
    return wrap


# alpha, eps*(0.1, alpha), eta* at eps*, eta* at eps = 0.01
PERFORMANCE_ROWS = [
    (0.0, 0.0394636562, 0.0, 0.0),
    (1e-10, 0.0394636560, 7.8228e-11, 1.3333e-11),
    (1e-8, 0.0394636335, 7.8228e-9, 1.3333e-9),
    (1e-6, 0.0394613836, 7.8234e-7, 1.3338e-7),
    (1e-4, 0.0392359948, 7.8866e-5, 1.3812e-5),
    (3e-4, 0.0387781564, 2.4050e-4, 4.4357e-5),
    (1e-3, 0.0371477336, 8.4989e-4, 1.8392e-4),
    (3e-3, 0.0321984070, 3.0536e-3, 9.2572e-4),
    (5e-3, 0.0266099758, 6.3032e-3, 2.4230e-3),
]

QUINTIC_RATIONALS = (
    Fraction(3424572914129280658801, 4000000000000000000000000),
    Fraction(133200752195329280658801, 200000000000000000000000),
    Fraction(698088841835929280658801, 25000000000000000000000),
    Fraction(886384871716129280658801, 6250000000000000000000),
    Fraction(886384871716129280658801, 3125000000000000000000),
    Fraction(886384871716129280658801, 3906250000000000000000),
)


@criterion("Performance table: 9 rows, eps* to 1e-8, eta* columns to 1e-7, under 5 s")
def test_performance_table():
    ga._q_polys.cache_clear()
    ga._all_tau_roots.cache_clear()
    t0 = time.perf_counter()
    rows = []
    for alpha, *_ in PERFORMANCE_ROWS:
        eps_star, eta_thr = ga.eta_at_threshold(0.1, alpha, E36)
        eta_001 = ga.iterate_de(ga.NoiseParams(0.01, alpha), E36).limit
        rows.append((eps_star, eta_thr, eta_001))
    elapsed = time.perf_counter() - t0
    for (alpha, e_ref, h_ref, h001_ref), (e, h, h001) in zip(PERFORMANCE_ROWS, rows):
        assert abs(e - e_ref) <= 1e-8, (alpha, e, e_ref)
        assert abs(h - h_ref) <= 1e-7, (alpha, h, h_ref)
        assert abs(h001 - h001_ref) <= 1e-7, (alpha, h001, h001_ref)
    assert elapsed < 5.0, elapsed


@criterion("Threshold quintic: c1..c6 to 1e-12 relative, eps* = 0.0266099758 +- 1e-9, agrees with threshold_eta")
def test_threshold_quintic():
    cs = ga.appendix_c_constants(5e-3)
    for got, ref in zip(cs, QUINTIC_RATIONALS):
        assert abs(got - ref) <= Fraction(1, 10**12) * abs(ref)
    eps = ga.appendix_c_threshold(5e-3)
    assert abs(eps - 0.0266099758) <= 1e-9
    assert abs(eps - ga.threshold_eta(0.1, 5e-3, E36)) <= 1e-9


@criterion("Noiseless recovery: closed form = 0.0394636562 +- 1e-9 = top tau point at alpha = 0")
def test_noiseless():
    v = ga.noiseless_threshold_bru()
    assert abs(v - 0.0394636562) <= 1e-9
    assert abs(v - max(ga.tau_points(0.0, E36))) <= 1e-9


@criterion("Irregular comparison: eps* 0.048239 / 0.047857 +- 2e-5, eta* 0.01869 / 0.01766 +- 2e-4, both orderings")
def test_irregular_comparison():
    alpha = 1 / 500
    t1, h1 = ga.eta_at_threshold(0.1, alpha, bazzi_family(0.1))
    t2, h2 = ga.eta_at_threshold(0.1, alpha, bazzi_family(A_OPT))
    assert abs(t1 - 0.048239) <= 2e-5
    assert abs(t2 - 0.047857) <= 2e-5
    assert abs(h1 - 0.01869) <= 2e-4
    assert abs(h2 - 0.01766) <= 2e-4
    assert t1 > t2
    assert h2 < h1


@criterion("Gaussian thresholds: 0.8747 / 0.8323 / 0.7910 +- 5e-3 at alpha = 0, non-increasing in alpha, ordering kept, under 30 s")
def test_gaussian_thresholds():
    codes = [(3, 6), (4, 8), (5, 10)]
    refs = [0.8747, 0.8323, 0.7910]
    alphas = [0.0, 0.05, 0.1, 0.2, 0.3]
    t0 = time.perf_counter()
    table = {c: [gs.gaussian_threshold(a, *c) for a in alphas] for c in codes}
    elapsed = time.perf_counter() - t0
    for c, ref in zip(codes, refs):
        assert all(r.found for r in table[c])
        assert abs(table[c][0].eps_star - ref) <= 5e-3
        curve = [r.eps_star for r in table[c]]
        assert all(a >= b for a, b in zip(curve, curve[1:])), curve
    for i in range(len(alphas)):
        vals = [table[c][i].eps_star for c in codes]
        assert vals[0] > vals[1] > vals[2]
    assert elapsed < 30.0, elapsed


@criterion("Memory: redundancy 34, capacity 1/34, memory region inside decoder region on a 10-point grid")
def test_memory():
    assert mm.redundancy(E36) == 34
    assert Fraction(mm.storage_capacity_lb(E36)).limit_denominator(10**6) == Fraction(1, 34)
    assert mm.storage_capacity_lb(E36) == 1 / 34
    grid = list(np.linspace(0.0, 0.009, 10))
    mem = mm.memory_region(E36, grid)
    dec = ga.region_to_use_decoder(E36, grid)
    nonempty = 0
    for m, d in zip(mem, dec):
        if m.empty:
            continue
        nonempty += 1
        assert d[2] is not None
        assert m.eps_high <= d[2]
        assert m.use_low >= d[1]
    assert nonempty >= 5


@criterion("Positivity grid: eta* > 0 for alpha in {1e-4,1e-3,1e-2} x eps in {0,0.01,0.03}; eps = 0 trace rises to smallest root of s = q-(s)")
def test_positivity():
    for alpha in (1e-4, 1e-3, 1e-2):
        for eps in (0.0, 0.01, 0.03):
            tr = ga.iterate_de(ga.NoiseParams(eps, alpha), E36)
            assert tr.converged and tr.limit > 0
        tr = ga.iterate_de(ga.NoiseParams(0.0, alpha), E36)
        assert np.all(np.diff(tr.states)[:-1] > 0)
        # smallest positive root of q-(s) - s: the first fixed point at eps = 0
        roots = [r for r in ga.fixed_points(ga.NoiseParams(0.0, alpha), E36).roots if r > 0]
        assert abs(tr.limit - roots[0]) < 1e-10


@criterion("MC vs DE: (3,6) n=2e4 eps=0.02 alpha=1e-3 5 iterations 20 trials, within 3 SE at every iteration, under 2 min")
def test_mc_vs_de():
    cfg = mc.McConfig(E36, 20000, 0.02, 1e-3, 5, 20, seed=0)
    t0 = time.perf_counter()
    res = mc.mc_experiment(cfg)
    elapsed = time.perf_counter() - t0
    de = ga.iterate_de(ga.NoiseParams(0.02, 1e-3), E36, max_iter=5).states
    assert len(de) == 6
    se = res.stderr_ber
    assert np.all(se > 0)
    z = (res.mean_ber - de) / se
    print("per-iteration z:", np.round(z, 3).tolist())
    assert np.all(np.abs(z) <= 3), z
    assert elapsed < 120.0, elapsed


@criterion("Concentration: std(Z)/(dv n) falls from n=1e3 to n=1e4 (50 trials); tail frequency within the exponential bound")
def test_concentration():
    out = {}
    for n in (1000, 10000):
        cfg = mc.McConfig(E36, n, 0.02, 1e-3, 5, 50, seed=1)
        res = mc.mc_experiment(cfg, deviation=0.02)
        out[n] = res
        assert res.tail_frequency <= res.tail_bound
    spread = {n: r.std_z[-1] / (3 * n) for n, r in out.items()}
    assert spread[10000] < spread[1000], spread


@criterion("Symmetry: all-one vs random codeword BER within 4 SE at (3,6) n=1e4 eps=0.03 alpha=1e-3, 50 trials per arm")
def test_symmetry():
    g = sample_graph(E36, 10000, seed=mc.trial_rng(1, 2**32))
    res = mc.symmetry_test(g, 0.03, 1e-3, 5, 50, seed=1)
    print("symmetry:", res.summary())
    assert res.stderr > 0
    assert abs(res.z_score) <= 4
