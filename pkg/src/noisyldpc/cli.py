"""Command-line front end: sweeps and experiments written as CSV or JSON tables."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import gallager_a as ga
from . import gaussian, memory, montecarlo
from .ensembles import ConfigurationError, parse_ensemble, regular, sample_graph
from .io import emit_table, render_table, write_text

log = logging.getLogger("noisyldpc")

OUT_DIR_ENV = "NOISYLDPC_OUT_DIR"
PERFORMANCE_ALPHAS = (0.0, 1e-10, 1e-8, 1e-6, 1e-4, 3e-4, 1e-3, 3e-3, 5e-3)
GAUSS_DEFAULT_ENSEMBLES = ("regular 3 6", "regular 4 8", "regular 5 10")

DEFAULTS = {
    "ensemble": None,
    "alpha": None,
    "eps": None,
    "eta": None,
    "n": 20000,
    "trials": 20,
    "seed": 0,
    "iters": 5,
    "format": None,
    "out": None,
    "alpha_r": None,
    "deviation": None,
    "tol": None,
    "verbose_trace": False,
}


class UsageError(Exception):
    pass


def parse_grid(text):
    """Comma-separated floats, or ``start:stop:num`` for an inclusive linspace."""
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            return [float(v) for v in np.linspace(float(start), float(stop), int(num))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}") from exc


def _resolve(args):
    cfg = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    if cfg["format"] is None:
        cfg["format"] = "json" if args.command == "capacity" else "csv"
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    if cfg["out"] is None and os.environ.get(OUT_DIR_ENV):
        cfg["out"] = os.path.join(os.environ[OUT_DIR_ENV], f"{args.command}.{cfg['format']}")
    cfg["command"] = args.command
    return cfg


def _ensembles(cfg, default):
    raw = cfg["ensemble"] or default
    if isinstance(raw, str):
        raw = [raw]
    return [parse_ensemble(r) for r in raw]


def _spec(cfg, **extra):
    spec = {k: v for k, v in cfg.items() if v is not None and k not in ("out",)}
    spec.update(extra)
    return spec


def cmd_table1(cfg):
    e = _ensembles(cfg, "regular 3 6")[0]
    alphas = parse_grid(cfg["alpha"]) or list(PERFORMANCE_ALPHAS)
    eta = float(cfg["eta"]) if cfg["eta"] is not None else 0.1
    eps = float(parse_grid(cfg["eps"])[0]) if cfg["eps"] is not None else 0.01
    rows = []
    for a in alphas:
        eps_star, eta_thr = ga.eta_at_threshold(eta, a, e)
        trace = ga.iterate_de(ga.NoiseParams(eps, a), e)
        rows.append([a, eps_star, eta_thr, trace.limit])
    cols = ["alpha", "eps_star", "eta_star_at_threshold", f"eta_star_at_eps_{eps:g}"]
    emit_table(cfg["out"], cols, rows, cfg["format"],
               _spec(cfg, ensemble=e.describe(), alpha=alphas, eps=eps, eta=eta))


def cmd_region(cfg):
    e = _ensembles(cfg, "regular 3 6")[0]
    alphas = parse_grid(cfg["alpha"]) or parse_grid("0:0.006:13")
    rows = [list(r) for r in ga.region_to_use_decoder(e, alphas)]
    emit_table(cfg["out"], ["alpha", "tau1", "tau2"], rows, cfg["format"],
               _spec(cfg, ensemble=e.describe(), alpha=alphas))


def cmd_thresholds(cfg):
    e = _ensembles(cfg, "regular 3 6")[0]
    alphas = parse_grid(cfg["alpha"]) or list(PERFORMANCE_ALPHAS)
    etas = parse_grid(cfg["eta"])
    rows = []
    for eta in etas:
        for a in alphas:
            eps_star, eta_thr = ga.eta_at_threshold(eta, a, e)
            rows.append([a, eta, eps_star, eta_thr])
    emit_table(cfg["out"], ["alpha", "eta", "eps_star", "eta_star_at_threshold"], rows, cfg["format"],
               _spec(cfg, ensemble=e.describe(), alpha=alphas, eta=etas))


def cmd_sweep(cfg):
    e = _ensembles(cfg, "regular 3 6")[0]
    alphas = parse_grid(cfg["alpha"]) or [0.0, 1e-3, 5e-3]
    epss = parse_grid(cfg["eps"]) or [0.01, 0.02, 0.03]
    tol = float(cfg["tol"]) if cfg["tol"] is not None else ga.DEFAULT_TOL
    rows, traces = [], []
    for a in alphas:
        for eps in epss:
            tr = ga.iterate_de(ga.NoiseParams(eps, a), e, tol=tol)
            final = tr.limit if tr.converged else float(tr.states[-1])
            rows.append([a, eps, final, tr.converged, tr.iterations])
            if cfg["verbose_trace"]:
                traces.append({"alpha": a, "eps": eps, "states": tr.states.tolist()})
    cols = ["alpha", "eps", "eta_star", "converged", "iters"]
    spec = _spec(cfg, ensemble=e.describe(), alpha=alphas, eps=epss)
    if cfg["verbose_trace"] and cfg["format"] == "json":
        doc = json.loads(render_table(cols, rows, "json", spec))
        doc["traces"] = traces
        write_text(cfg["out"], json.dumps(doc, indent=2) + "\n")
        return
    emit_table(cfg["out"], cols, rows, cfg["format"], spec)
    if cfg["verbose_trace"]:
        for t in traces:
            sys.stderr.write(json.dumps(t) + "\n")


def cmd_gauss_thresholds(cfg):
    ens = _ensembles(cfg, list(GAUSS_DEFAULT_ENSEMBLES))
    alphas = parse_grid(cfg["alpha"]) or [0.0, 0.05, 0.1, 0.2, 0.3]
    tol = float(cfg["tol"]) if cfg["tol"] is not None else 1e-6
    rows = []
    for e in ens:
        if not e.is_regular:
            raise UsageError("the Gaussian approximation supports regular ensembles only")
        for a in alphas:
            res = gaussian.gaussian_threshold(a, e.regular_dv, e.regular_dr, tol=tol)
            rows.append([a, e.regular_dv, e.regular_dr, res.eps_star if res.found else None])
    emit_table(cfg["out"], ["alpha", "dv", "dr", "eps_star"], rows, cfg["format"],
               _spec(cfg, ensemble=[e.describe() for e in ens], alpha=alphas, tol=tol))


def cmd_memory_region(cfg):
    e = _ensembles(cfg, "regular 3 6")[0]
    alphas = parse_grid(cfg["alpha"]) or parse_grid("0:0.005:11")
    tied = cfg["alpha_r"] is None
    rows = memory.memory_region(e, alphas, tie_alpha_r_to_alpha=tied,
                                alpha_r=0.0 if tied else float(cfg["alpha_r"]))
    out = [[r.alpha, r.eps_low, r.eps_high, r.stable] for r in rows]
    emit_table(cfg["out"], ["alpha", "eps_low", "eps_high", "stable"], out, cfg["format"],
               _spec(cfg, ensemble=e.describe(), alpha=alphas, alpha_r="tied" if tied else cfg["alpha_r"]))


def cmd_capacity(cfg):
    e = _ensembles(cfg, "regular 3 6")[0]
    n = int(cfg["n"]) if cfg["n"] is not None else 1
    rep = memory.capacity_report(e, n)
    d = rep.as_dict()
    d.pop("stable")
    cols = list(d)
    emit_table(cfg["out"], cols, [[d[c] for c in cols]], cfg["format"], _spec(cfg, ensemble=e.describe()))


def _mc_config(cfg):
    e = _ensembles(cfg, "regular 3 6")[0]
    eps = parse_grid(cfg["eps"])[0] if cfg["eps"] is not None else 0.02
    alpha = parse_grid(cfg["alpha"])[0] if cfg["alpha"] is not None else 1e-3
    return montecarlo.McConfig(e, int(cfg["n"]), float(eps), float(alpha), int(cfg["iters"]),
                               int(cfg["trials"]), int(cfg["seed"]))


def cmd_mc(cfg):
    mc = _mc_config(cfg)
    dev = float(cfg["deviation"]) if cfg["deviation"] is not None else None
    res = montecarlo.mc_experiment(mc, deviation=dev)
    spec = _spec(cfg, **mc.as_dict())
    summary = res.summary()
    if cfg["format"] == "json":
        rows = [[t, it, float(res.ber[t, it]), int(res.z[t, it])]
                for t in range(res.trials) for it in range(res.z.shape[1])]
        doc = json.loads(render_table(["trial", "iter", "ber", "z"], rows, "json", spec))
        doc["summary"] = summary
        write_text(cfg["out"], json.dumps(doc, indent=2) + "\n")
        return
    rows = [[t, it, float(res.ber[t, it]), int(res.z[t, it])]
            for t in range(res.trials) for it in range(res.z.shape[1])]
    emit_table(cfg["out"], ["trial", "iter", "ber", "z"], rows, "csv", spec)
    doc = json.dumps({"run_spec": spec, "summary": summary}, indent=2) + "\n"
    if cfg["out"] is None:
        sys.stderr.write(doc)
    else:
        base, _ = os.path.splitext(cfg["out"])
        write_text(base + ".summary.json", doc)


def cmd_symmetry_test(cfg):
    mc = _mc_config(cfg)
    g = sample_graph(mc.ensemble, mc.n, montecarlo.trial_rng(mc.seed, 2**32))
    res = montecarlo.symmetry_test(g, mc.eps, mc.alpha, mc.iters, mc.trials, seed=mc.seed)
    s = res.summary()
    cols = ["mean_all_one", "mean_random", "stderr", "z_score"]
    emit_table(cfg["out"], cols, [[s[c] for c in cols]], cfg["format"], _spec(cfg, **mc.as_dict()))


COMMANDS = {
    "table1": cmd_table1,
    "region": cmd_region,
    "thresholds": cmd_thresholds,
    "sweep": cmd_sweep,
    "gauss-thresholds": cmd_gauss_thresholds,
    "memory-region": cmd_memory_region,
    "capacity": cmd_capacity,
    "mc": cmd_mc,
    "symmetry-test": cmd_symmetry_test,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="noisyldpc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "table1": "noisy Gallager A performance table for the (3,6) code",
        "region": "region to use decoder (tau1, tau2) over an alpha grid",
        "thresholds": "eta-reliability thresholds over alpha for given --eta values",
        "sweep": "final error eta* over an (alpha, eps) grid",
        "gauss-thresholds": "Gaussian-approximation thresholds over alpha",
        "memory-region": "memory region with register noise tied to alpha",
        "capacity": "complexity, redundancy and storage capacity bound",
        "mc": "Monte Carlo faulty-decoder experiment",
        "symmetry-test": "all-one versus random codeword BER comparison",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="JSON file with option values (flags win)")
        p.add_argument("--ensemble", action="append",
                       help="'regular 3 6', 'bazzi 0.1115' or JSON; repeatable for gauss-thresholds")
        p.add_argument("--alpha", help="decoder noise value(s): 'a,b,c' or 'start:stop:num'")
        p.add_argument("--eps", help="channel noise value(s)")
        p.add_argument("--eta", help="target error level(s)")
        p.add_argument("--alpha-r", dest="alpha_r", type=float, help="register flip probability (memory-region)")
        p.add_argument("--n", type=int, help="block length")
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--iters", type=int, help="decoding iterations")
        p.add_argument("--deviation", type=float, help="tail deviation for the concentration check (mc)")
        p.add_argument("--tol", type=float)
        p.add_argument("--verbose-trace", dest="verbose_trace", action="store_true",
                       help="dump full density-evolution traces (sweep)")
        p.add_argument("--out", help=f"output path (default: ${OUT_DIR_ENV}/<command>.<format> or stdout)")
        p.add_argument("--format", choices=["csv", "json"])
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve(args)
        if args.command == "thresholds" and cfg["eta"] is None:
            raise UsageError("--eta is required")
        if isinstance(cfg["ensemble"], list) and len(cfg["ensemble"]) > 1 and args.command != "gauss-thresholds":
            raise UsageError("only gauss-thresholds accepts several --ensemble values")
        COMMANDS[args.command](cfg)
    except (UsageError, ConfigurationError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"noisyldpc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"noisyldpc {args.command}: numerical error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
