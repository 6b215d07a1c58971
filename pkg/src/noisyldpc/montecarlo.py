"""Monte Carlo simulation of the faulty Gallager A decoder on sampled graphs.

Messages use the +-1 convention (+1 is bit 0).  Every variable-to-check and
every check-to-variable message crosses its own BSC(alpha) wire once per
iteration, including the very first variable-to-check message.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .ensembles import ConfigurationError, EnsembleSpec, TannerGraph, parse_ensemble, sample_graph

__all__ = [
    "McConfig",
    "TrialResult",
    "McResult",
    "SymmetryResult",
    "CodewordSampler",
    "trial_rng",
    "transmit_bsc",
    "decode_gallager_a_faulty",
    "mc_experiment",
    "concentration_bound_beta",
    "log_concentration_bound_beta",
    "LogBeta",
    "sample_codeword",
    "symmetry_test",
    "gf2_rref",
]


def trial_rng(seed, *index):
    """Independent generator for one trial, derived by hashing (seed, *index)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, index)]))


@dataclass(frozen=True)
class McConfig:
    ensemble: EnsembleSpec
    n: int
    eps: float
    alpha: float
    iters: int
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.iters < 0:
            raise ConfigurationError("iters must be >= 0")
        for name in ("eps", "alpha"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigurationError(f"{name} must be a probability, got {v}")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["ensemble"] = parse_ensemble(d.get("ensemble", "regular 3 6"))
        if "ell" in d:
            d["iters"] = d.pop("ell")
        return cls(**{k: d[k] for k in ("ensemble", "n", "eps", "alpha", "iters", "trials", "seed") if k in d})

    def as_dict(self):
        return {"ensemble": self.ensemble.describe(), "n": self.n, "eps": self.eps,
                "alpha": self.alpha, "iters": self.iters, "trials": self.trials, "seed": self.seed}


@dataclass
class TrialResult:
    """One decoding run; index ``l`` of each array is iteration ``l`` (0 = channel output)."""

    z: np.ndarray
    ber: np.ndarray
    node_ber: np.ndarray
    num_edges: int


@dataclass
class McResult:
    z: np.ndarray            # (trials, iters + 1)
    ber: np.ndarray          # (trials, iters + 1)
    node_ber: np.ndarray     # (trials, iters + 1)
    num_edges: np.ndarray    # (trials,)
    seed: int
    tail_deviation: float | None = None
    tail_frequency: float | None = None
    tail_bound: float | None = None
    config: dict = field(default_factory=dict)

    @property
    def trials(self):
        return self.z.shape[0]

    @property
    def degenerate(self):
        """A single trial gives no spread estimate."""
        return self.trials < 2

    def _std(self, a):
        if self.degenerate:
            return np.zeros(a.shape[1])
        return a.std(axis=0, ddof=1)

    @property
    def mean_z(self):
        return self.z.mean(axis=0)

    @property
    def std_z(self):
        return self._std(self.z.astype(float))

    @property
    def mean_ber(self):
        return self.ber.mean(axis=0)

    @property
    def std_ber(self):
        return self._std(self.ber)

    @property
    def stderr_ber(self):
        return self.std_ber / math.sqrt(self.trials)

    def summary(self):
        out = {
            "seed": self.seed,
            "trials": self.trials,
            "degenerate": self.degenerate,
            "mean_z": self.mean_z.tolist(),
            "std_z": self.std_z.tolist(),
            "mean_ber": self.mean_ber.tolist(),
            "stderr_ber": self.stderr_ber.tolist(),
            "mean_node_ber": self.node_ber.mean(axis=0).tolist(),
        }
        if self.tail_deviation is not None:
            out.update(tail_deviation=self.tail_deviation, tail_frequency=self.tail_frequency,
                       tail_bound=self.tail_bound)
        if self.config:
            out["config"] = self.config
        return out


def transmit_bsc(codeword, eps, rng):
    """Flip each +-1 entry independently with probability ``eps``."""
    codeword = np.asarray(codeword)
    flips = rng.random(codeword.shape) < eps
    return np.where(flips, -codeword, codeword).astype(np.int8)


def _wire(msgs, alpha, rng):
    if alpha <= 0:
        return msgs
    return np.where(rng.random(msgs.shape) < alpha, -msgs, msgs)


def check_update(g: TannerGraph, incoming):
    """Extrinsic product at every check: the outgoing message on edge k multiplies
    all messages arriving at that check except the one on edge k."""
    neg = incoming < 0
    parity = np.bincount(g.edge_check, weights=neg, minlength=g.m).astype(np.int64) & 1
    out_neg = parity[g.edge_check] ^ neg
    return np.where(out_neg, -1, 1).astype(np.int8)


def variable_update(g: TannerGraph, y_edge, incoming):
    """Gallager A rule per edge: send -y only if every other incoming message says -y.

    Also returns the per-edge count of disagreeing inputs summed over the whole
    node, which the node decision reuses.
    """
    disagree = incoming == -y_edge
    count = np.bincount(g.edge_var, weights=disagree, minlength=g.n).astype(np.int64)
    others = count[g.edge_var] - disagree
    out = np.where(others == g.var_degree[g.edge_var] - 1, -y_edge, y_edge).astype(np.int8)
    return out, count


def decode_gallager_a_faulty(g: TannerGraph, received, alpha, ell, rng, codeword=None) -> TrialResult:
    """Run ``ell`` noisy Gallager A iterations and record errors after each.

    ``z[l]`` counts wrong variable-to-check messages (over all edges) emitted
    at iteration ``l``; ``node_ber[l]`` uses each variable's decision, which
    flips the received bit only when all incoming check messages oppose it.
    Errors are measured against ``codeword`` (all +1 by default).
    """
    received = np.asarray(received, dtype=np.int8)
    if received.shape != (g.n,):
        raise ConfigurationError(f"received vector has shape {received.shape}, graph has n={g.n}")
    ref = np.ones(g.n, dtype=np.int8) if codeword is None else np.asarray(codeword, dtype=np.int8)
    if ref.shape != (g.n,):
        raise ConfigurationError("codeword length does not match the graph")
    ref_edge = ref[g.edge_var]
    y_edge = received[g.edge_var]

    z = np.empty(ell + 1, dtype=np.int64)
    node_ber = np.empty(ell + 1)
    v2c = y_edge.copy()
    z[0] = np.count_nonzero(v2c != ref_edge)
    node_ber[0] = np.count_nonzero(received != ref) / g.n
    for it in range(1, ell + 1):
        c2v = check_update(g, _wire(v2c, alpha, rng))
        incoming = _wire(c2v, alpha, rng)
        v2c, count = variable_update(g, y_edge, incoming)
        z[it] = np.count_nonzero(v2c != ref_edge)
        decision = np.where(count == g.var_degree, -received, received)
        node_ber[it] = np.count_nonzero(decision != ref) / g.n
    E = g.num_edges
    return TrialResult(z, z / E, node_ber, E)


class LogBeta(NamedTuple):
    """Natural log of a concentration constant too small for a double."""

    log_value: float


def concentration_bound_beta(dv, dr, ell):
    """beta = 1 / ((544 + 80 ell) dv^(2 ell - 1) dr^(2 ell)).

    The denominator is formed as an exact integer.  Once beta underflows
    double precision the log-space value comes back wrapped in :class:`LogBeta`.
    """
    if dv < 2 or dr < 2 or ell < 1:
        raise ValueError("need dv, dr >= 2 and ell >= 1")
    inv = (544 + 80 * ell) * dv ** (2 * ell - 1) * dr ** (2 * ell)
    beta = float(Fraction(1, inv))
    if beta < sys.float_info.min:
        return LogBeta(log_concentration_bound_beta(dv, dr, ell))
    return beta


def log_concentration_bound_beta(dv, dr, ell):
    if dv < 2 or dr < 2 or ell < 1:
        raise ValueError("need dv, dr >= 2 and ell >= 1")
    return -(math.log(544 + 80 * ell) + (2 * ell - 1) * math.log(dv) + 2 * ell * math.log(dr))


def _tail_bound(cfg, deviation):
    e = cfg.ensemble
    if e.is_regular:
        log_beta = log_concentration_bound_beta(e.regular_dv, e.regular_dr, max(cfg.iters, 1))
    else:
        log_beta = log_concentration_bound_beta(e.lam.max_degree, e.rho.max_degree, max(cfg.iters, 1))
    return min(1.0, 2 * math.exp(-math.exp(log_beta) * deviation ** 2 * cfg.n))


def mc_experiment(cfg: McConfig, deviation=None, graph=None) -> McResult:
    """Independent trials (fresh graph, channel and decoder noise each) aggregated by index.

    With ``deviation`` set, also reports how often the final-iteration Z leaves
    ``mean(Z) +- E * deviation / 2`` (E = number of edges) next to the
    exponential bound built from :func:`concentration_bound_beta`.
    """
    zs, bers, nodes, edges = [], [], [], []
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, t)
        g = graph if graph is not None else sample_graph(cfg.ensemble, cfg.n, rng)
        y = transmit_bsc(np.ones(g.n, dtype=np.int8), cfg.eps, rng)
        res = decode_gallager_a_faulty(g, y, cfg.alpha, cfg.iters, rng)
        zs.append(res.z)
        bers.append(res.ber)
        nodes.append(res.node_ber)
        edges.append(res.num_edges)
    out = McResult(np.array(zs), np.array(bers), np.array(nodes), np.array(edges), cfg.seed,
                   config=cfg.as_dict())
    if deviation is not None:
        zl = out.z[:, -1].astype(float)
        dev = np.abs(zl - zl.mean())
        out.tail_deviation = float(deviation)
        out.tail_frequency = float(np.mean(dev > out.num_edges * deviation / 2))
        out.tail_bound = _tail_bound(cfg, deviation)
    return out


# -- codewords -----------------------------------------------------------------

def gf2_rref(H):
    """Reduced row echelon form over GF(2) on bit-packed rows.

    Returns ``(packed_rows, pivots, n)``; only the first ``len(pivots)`` rows
    are meaningful.  Bit j of a row lives in word j // 64, position j % 64.
    """
    H = np.asarray(H, dtype=np.uint8) & 1
    m, n = H.shape
    pad = (-n) % 64
    A = np.packbits(np.pad(H, ((0, 0), (0, pad))), axis=1, bitorder="little")
    A = A.view("<u8").copy()
    one = np.uint64(1)
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        w, b = divmod(c, 64)
        b = np.uint64(b)
        hits = np.flatnonzero((A[r:, w] >> b) & one)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        rows = np.flatnonzero((A[:, w] >> b) & one)
        rows = rows[rows != r]
        if rows.size:
            # columns left of c are already zero in the pivot row
            A[rows, w:] ^= A[r, w:]
        pivots.append(c)
        r += 1
    return A, np.array(pivots, dtype=np.int64), n


class CodewordSampler:
    """Uniform codewords of the code defined by a Tanner graph.

    The parity-check matrix is reduced once; a sample draws the free
    (non-pivot) bits uniformly and solves for the pivot bits.
    """

    def __init__(self, g: TannerGraph):
        A, pivots, n = gf2_rref(g.parity_check_matrix())
        self.n = n
        self.rank = len(pivots)
        self.pivots = pivots
        mask = np.ones(n, dtype=bool)
        mask[pivots] = False
        self.free = np.flatnonzero(mask)
        if self.free.size == 0:
            raise ConfigurationError("the code has only the zero codeword")
        bits = np.unpackbits(A[: self.rank].view(np.uint8), axis=1, bitorder="little")[:, :n]
        self._coupling = np.ascontiguousarray(bits[:, self.free])

    @property
    def dimension(self):
        return self.free.size

    def from_free_bits(self, free_bits):
        free_bits = np.asarray(free_bits, dtype=np.uint8) & 1
        x = np.zeros(self.n, dtype=np.uint8)
        x[self.free] = free_bits
        x[self.pivots] = (self._coupling @ free_bits) & 1
        return np.where(x == 1, -1, 1).astype(np.int8)

    def sample(self, rng):
        return self.from_free_bits(rng.integers(0, 2, size=self.free.size, dtype=np.uint8))


def sample_codeword(g: TannerGraph, rng):
    return CodewordSampler(g).sample(rng)


@dataclass
class SymmetryResult:
    ber_all_one: np.ndarray
    ber_random: np.ndarray

    @property
    def mean_all_one(self):
        return float(self.ber_all_one.mean())

    @property
    def mean_random(self):
        return float(self.ber_random.mean())

    @property
    def stderr(self):
        def var(a):
            return a.var(ddof=1) / a.size if a.size > 1 else 0.0
        return math.sqrt(var(self.ber_all_one) + var(self.ber_random))

    @property
    def z_score(self):
        """Difference of the two mean BERs in standard-error units."""
        diff = self.mean_random - self.mean_all_one
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.copysign(math.inf, diff)
        return diff / self.stderr

    def summary(self):
        return {"mean_all_one": self.mean_all_one, "mean_random": self.mean_random,
                "stderr": self.stderr, "z_score": self.z_score,
                "trials": [int(self.ber_all_one.size), int(self.ber_random.size)]}


def symmetry_test(g: TannerGraph, eps, alpha, ell, trials, seed=0, sampler=None) -> SymmetryResult:
    """Final-iteration BER with the all-one codeword versus fresh random codewords.

    Both arms decode on the same graph; each arm's trials use their own derived
    seeds, and the random-codeword arm measures errors against the codeword sent.
    """
    sampler = sampler or CodewordSampler(g)
    ones = np.ones(g.n, dtype=np.int8)
    arm_a, arm_b = [], []
    for t in range(trials):
        rng = trial_rng(seed, 0, t)
        y = transmit_bsc(ones, eps, rng)
        arm_a.append(decode_gallager_a_faulty(g, y, alpha, ell, rng).ber[-1])
        rng = trial_rng(seed, 1, t)
        x = sampler.sample(rng)
        y = transmit_bsc(x, eps, rng)
        arm_b.append(decode_gallager_a_faulty(g, y, alpha, ell, rng, codeword=x).ber[-1])
    return SymmetryResult(np.array(arm_a), np.array(arm_b))
