import itertools
import math

import numpy as np
import pytest

from noisyldpc import gallager_a as ga
from noisyldpc import montecarlo as mc
from noisyldpc.ensembles import ConfigurationError, TannerGraph, regular, sample_graph

E36 = regular(3, 6)


@pytest.fixture(scope="module")
def small_graph():
    return sample_graph(E36, 12, seed=4)


def test_transmit_bsc():
    rng = np.random.default_rng(0)
    x = np.ones(100_000, dtype=np.int8)
    assert np.array_equal(mc.transmit_bsc(x, 0.0, rng), x)
    assert np.array_equal(mc.transmit_bsc(x, 1.0, rng), -x)
    frac = np.mean(mc.transmit_bsc(x, 0.1, rng) == -1)
    assert abs(frac - 0.1) < 3 * math.sqrt(0.1 * 0.9 / x.size)


def test_check_map_parity_exhaustive():
    g = TannerGraph.from_edges(6, 1, np.arange(6), np.zeros(6, dtype=np.int64))
    for bits in itertools.product((1, -1), repeat=6):
        inc = np.array(bits, dtype=np.int8)
        out = mc.check_update(g, inc)
        for k in range(6):
            assert out[k] == np.prod(np.delete(inc, k))


def test_variable_map_truth_table():
    # one variable with three edges into three checks
    g = TannerGraph.from_edges(1, 3, np.zeros(3, dtype=np.int64), np.arange(3))
    for y in (1, -1):
        y_edge = np.full(3, y, dtype=np.int8)
        for bits in itertools.product((1, -1), repeat=3):
            inc = np.array(bits, dtype=np.int8)
            out, _ = mc.variable_update(g, y_edge, inc)
            for k in range(3):
                others = np.delete(inc, k)
                expect = -y if np.all(others == -y) else y
                assert out[k] == expect


def test_extrinsic_perturbation(small_graph):
    g = small_graph
    rng = np.random.default_rng(1)
    y_edge = np.where(rng.random(g.num_edges) < 0.3, -1, 1).astype(np.int8)
    inc = np.where(rng.random(g.num_edges) < 0.4, -1, 1).astype(np.int8)
    base_c = mc.check_update(g, inc)
    base_v, _ = mc.variable_update(g, y_edge, inc)
    for k in range(g.num_edges):
        flipped = inc.copy()
        flipped[k] = -flipped[k]
        assert mc.check_update(g, flipped)[k] == base_c[k]
        assert mc.variable_update(g, y_edge, flipped)[0][k] == base_v[k]


def test_noiseless_decoding_is_clean(small_graph):
    rng = np.random.default_rng(2)
    y = mc.transmit_bsc(np.ones(small_graph.n, dtype=np.int8), 0.0, rng)
    res = mc.decode_gallager_a_faulty(small_graph, y, 0.0, 4, rng)
    assert np.all(res.z == 0) and np.all(res.node_ber == 0)


def test_decoder_shape_checks(small_graph):
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigurationError):
        mc.decode_gallager_a_faulty(small_graph, np.ones(5), 0.0, 1, rng)
    with pytest.raises(ConfigurationError):
        mc.decode_gallager_a_faulty(small_graph, np.ones(12), 0.0, 1, rng, codeword=np.ones(3))


def test_tiny_graph_smoke():
    g = TannerGraph.from_edges(1, 1, [0, 0], [0, 0])
    rng = np.random.default_rng(0)
    res = mc.decode_gallager_a_faulty(g, np.array([-1], dtype=np.int8), 0.1, 3, rng)
    assert res.z.shape == (4,) and np.all((0 <= res.z) & (res.z <= 2))


def test_experiment_reproducible_and_bounded():
    cfg = mc.McConfig(E36, 600, 0.03, 0.01, 3, 4, seed=9)
    a, b = mc.mc_experiment(cfg), mc.mc_experiment(cfg)
    assert np.array_equal(a.z, b.z) and np.array_equal(a.ber, b.ber)
    assert np.all(a.z >= 0) and np.all(a.z <= 3 * 600)
    assert np.all((a.ber >= 0) & (a.ber <= 1))
    c = mc.mc_experiment(mc.McConfig(E36, 600, 0.03, 0.01, 3, 4, seed=10))
    assert not np.array_equal(a.z, c.z)


def test_single_trial_degenerate():
    res = mc.mc_experiment(mc.McConfig(E36, 600, 0.03, 0.01, 2, 1, seed=0))
    assert res.degenerate and np.all(res.std_z == 0)
    assert res.summary()["degenerate"] is True


def test_config_validation_and_dict():
    with pytest.raises(ConfigurationError):
        mc.McConfig(E36, 600, 0.03, 0.01, 2, 0)
    cfg = mc.McConfig.from_dict({"ensemble": "regular 3 6", "n": 600, "eps": 0.02,
                                 "alpha": 0.0, "ell": 2, "trials": 3, "seed": 5})
    assert cfg.iters == 2 and cfg.as_dict()["seed"] == 5


def test_mean_ber_tracks_density_evolution():
    cfg = mc.McConfig(E36, 6000, 0.03, 0.002, 4, 12, seed=3)
    res = mc.mc_experiment(cfg)
    de = ga.iterate_de(ga.NoiseParams(0.03, 0.002), E36, max_iter=4).states
    se = np.maximum(res.stderr_ber, 1e-12)
    assert np.all(np.abs(res.mean_ber - de) <= 4 * se)


def test_beta_values():
    assert mc.concentration_bound_beta(3, 6, 1) == 1 / 67392
    assert mc.concentration_bound_beta(3, 6, 2) < mc.concentration_bound_beta(3, 6, 1)
    b3 = mc.concentration_bound_beta(3, 6, 3)
    assert math.log(b3) == pytest.approx(mc.log_concentration_bound_beta(3, 6, 3), rel=1e-12)
    big = mc.concentration_bound_beta(3, 6, 400)
    assert isinstance(big, mc.LogBeta)
    assert big.log_value == pytest.approx(mc.log_concentration_bound_beta(3, 6, 400), rel=1e-12)
    with pytest.raises(ValueError):
        mc.concentration_bound_beta(3, 6, 0)


def test_tail_statistics_reported():
    res = mc.mc_experiment(mc.McConfig(E36, 600, 0.03, 0.01, 2, 5, seed=1), deviation=0.05)
    assert 0 <= res.tail_frequency <= 1
    assert res.tail_frequency <= res.tail_bound
    assert res.summary()["tail_deviation"] == 0.05


def test_gf2_rref_rank_matches_numpy_small():
    rng = np.random.default_rng(7)
    for _ in range(20):
        H = (rng.random((6, 130)) < 0.3).astype(np.uint8)
        A, piv, n = mc.gf2_rref(H)
        bits = np.unpackbits(A.view(np.uint8), axis=1, bitorder="little")[:, :n]
        # pivot columns are unit vectors in the reduced matrix
        for i, c in enumerate(piv):
            col = bits[:, c]
            assert col[i] == 1 and col.sum() == 1
        # the row space is preserved: each reduced row is a combination of H rows
        # (checked via rank of the stacked matrix over GF(2) by brute reduction)
        stacked = np.vstack([H, bits[: len(piv)]])
        _, piv2, _ = mc.gf2_rref(stacked)
        assert len(piv2) == len(piv)


def test_codeword_sampler():
    g = sample_graph(E36, 100, seed=8)
    s = mc.CodewordSampler(g)
    assert s.dimension >= 50
    assert np.all(s.from_free_bits(np.zeros(s.dimension)) == 1)
    rng = np.random.default_rng(0)
    H = g.parity_check_matrix()
    for _ in range(10):
        x = s.sample(rng)
        bits = (x == -1).astype(np.int64)
        assert np.all((H.astype(np.int64) @ bits) % 2 == 0)
        for c in range(g.m):
            edges = g.edge_var[g.edge_check == c]
            assert np.prod(x[edges]) == 1


def test_codeword_sampler_trivial_code():
    g = TannerGraph.from_parity_check(np.eye(4, dtype=np.uint8))
    with pytest.raises(ConfigurationError):
        mc.CodewordSampler(g)


def test_symmetry_trivial_and_deterministic():
    g = sample_graph(E36, 300, seed=1)
    r = mc.symmetry_test(g, 0.0, 0.0, 3, 5, seed=2)
    assert r.mean_all_one == 0 and r.mean_random == 0 and r.z_score == 0
    a = mc.symmetry_test(g, 0.04, 0.01, 3, 5, seed=2)
    b = mc.symmetry_test(g, 0.04, 0.01, 3, 5, seed=2)
    assert np.array_equal(a.ber_all_one, b.ber_all_one)
    assert np.array_equal(a.ber_random, b.ber_random)
