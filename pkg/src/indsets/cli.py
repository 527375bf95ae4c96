"""Command-line entry point: ``indsets <command> [options]``.

Exit codes: 0 success, 2 usage error, 3 precondition violation, 4 resource
refusal (size caps or the wall-clock budget). Every option of the shared
group can also be set through an ``INDSETS_<NAME>`` environment variable,
e.g. ``INDSETS_SEED=7``; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import signal
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import InconsistencyError, PreconditionError, ResourceLimitError

SCHEMA_VERSION = 1
ENV_PREFIX = "INDSETS_"
SUITES = ("glauber", "sample-k", "oracle")
log = logging.getLogger("indsets")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    c_mix: float = 2.0
    c_loop: float = 3.0
    c_samples: float = 1.0
    c_anneal: float = 0.5
    c_reduction: float = 1.0
    format: str = "json"
    threads: int = 1
    exact_limit: int = 40
    degree_cap: int = 200_000
    time_budget: float = 0.0


# -- argument helpers -----------------------------------------------------------

def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    parse.__name__ = kind.__name__
    return parse


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _int_list(text):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("expected a non-empty list of positive integers")
    return values


def _env(name: str, default):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    return default if raw is None else raw


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--seed", type=_non_negative_int, default=_env("seed", 0))
    for name, default in (("c-mix", 2.0), ("c-loop", 3.0), ("c-samples", 1.0),
                          ("c-anneal", 0.5), ("c-reduction", 1.0)):
        g.add_argument(f"--{name}", type=_positive(float), default=_env(name, default))
    g.add_argument("--format", choices=("json", "table"), default=_env("format", "json"))
    g.add_argument("--threads", type=_positive(int), default=_env("threads", os.cpu_count() or 1))
    g.add_argument("--exact-limit", type=_positive(int), default=_env("exact-limit", 40))
    g.add_argument("--degree-cap", type=_positive(int), default=_env("degree-cap", 200_000))
    g.add_argument("--time-budget", type=float, default=_env("time-budget", 0.0),
                   help="wall-clock limit in seconds; 0 disables")
    g.add_argument("--log-level", default=_env("log-level", "WARNING"))
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="indsets", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    p = add("thresholds", "critical fugacity and density for a maximum degree")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--alpha", type=float, help="also report lambda_star(alpha)")

    p = add("poly", "exact independence polynomial")
    p.add_argument("--graph", required=True)

    p = add("sample-hc", "hard-core samples by Glauber dynamics")
    p.add_argument("--graph", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--eps", type=_positive(float), default=0.01)
    p.add_argument("--n-samples", type=_positive(int), default=1)

    p = add("sample-k", "approximately uniform independent set of size k")
    _graph_k_alpha(p)
    p.add_argument("--eps", type=_positive(float), default=0.05)
    p.add_argument("--triangle-free", action="store_true")
    p.add_argument("--tf-delta", type=_positive(float), default=0.05)
    p.add_argument("--trace", help="write the search trace as JSON lines to this file")

    p = add("count-ik", "approximate number of size-k independent sets")
    _graph_k_alpha(p)
    p.add_argument("--eps", type=_positive(float), default=0.5)
    p.add_argument("--with-exact", action="store_true", help="also report the exact i_k")

    p = add("reduce", "build G plus r gadget copies")
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eps", type=_positive(float), default=0.1)
    p.add_argument("--r", type=_positive(int), help="override the replication count")
    p.add_argument("--out", required=True, help="output prefix; writes PREFIX.el and PREFIX.json")

    p = add("verify-reduction", "exact check of a reduction instance")
    p.add_argument("--instance", required=True, help="JSON sidecar written by 'reduce'")
    p.add_argument("--r-sweep", type=_int_list, help="comma-separated replication counts")
    p.add_argument("--plot-dir", help="write reduction.png here")

    p = add("ising-count", "approximate Ising coefficient c_k(G, B)")
    _graph_k_alpha(p, with_delta=False)
    p.add_argument("--B", dest="B", type=float, required=True)
    p.add_argument("--eps", type=_positive(float), default=0.5)
    p.add_argument("--lambda-max", type=float, default=1.0)
    p.add_argument("--with-exact", action="store_true")

    p = add("bench", "timing ladder; CSV plus a figure")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--sizes", type=_int_list, help="n ladder (default depends on suite)")
    p.add_argument("--repeats", type=_positive(int), default=1)
    p.add_argument("--csv", help="also write the CSV here")
    p.add_argument("--plot", help="figure path (PNG)")
    return parser


def _graph_k_alpha(p, with_delta=True):
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=_non_negative_int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--n-samples-override", type=_positive(int),
                   help="fixed batch size; voids the accuracy guarantee")
    if with_delta:
        p.add_argument("--delta", type=int, help="degree bound (default max(3, max degree))")


def run_config(args) -> RunConfig:
    return RunConfig(
        seed=int(args.seed), c_mix=float(args.c_mix), c_loop=float(args.c_loop),
        c_samples=float(args.c_samples), c_anneal=float(args.c_anneal),
        c_reduction=float(args.c_reduction), format=args.format, threads=int(args.threads),
        exact_limit=int(args.exact_limit), degree_cap=int(args.degree_cap),
        time_budget=float(args.time_budget),
    )


# -- graph input ----------------------------------------------------------------

def load_graph(spec: str):
    """An edge-list path, or ``gen:NAME[:ARG...]`` for a built-in family:
    petersen, clique:M, cycle:M, path:M, kbip:S:T, empty:N,
    regular:N:D[:SEED], gadget:A:B:DELTA."""
    from . import graph as g

    if not spec.startswith("gen:"):
        path = Path(spec)
        if not path.is_file():
            raise PreconditionError(f"graph file not found: {spec}")
        return g.read_edge_list(path)
    name, *rest = spec[4:].split(":")
    try:
        nums = [int(x) for x in rest]
    except ValueError:
        raise PreconditionError(f"bad generator arguments in {spec!r}")
    makers = {
        "petersen": ((0,), g.petersen),
        "clique": ((1,), g.clique),
        "cycle": ((1,), g.cycle),
        "path": ((1,), g.path),
        "empty": ((1,), g.empty_graph),
        "kbip": ((2,), g.complete_bipartite),
        "regular": ((2, 3), g.random_regular),
        "gadget": ((3,), g.gadget),
    }
    if name not in makers:
        raise PreconditionError(f"unknown generator {name!r}; known: {', '.join(sorted(makers))}")
    arities, fn = makers[name]
    if len(nums) not in arities:
        raise PreconditionError(f"generator {name!r} takes {' or '.join(map(str, arities))} arguments")
    if name == "regular" and len(nums) == 2:
        nums.append(0)  # generated inputs must not depend on OS entropy
    return fn(*nums)


# -- commands ---------------------------------------------------------------------

def _sampler_config(args, cfg: RunConfig, epsilon: float, mode: str = "general"):
    from .sample_k import SamplerConfig

    return SamplerConfig(
        c_loop=cfg.c_loop, c_samples=cfg.c_samples, epsilon=epsilon, seed=cfg.seed,
        c_mix=cfg.c_mix, mode=mode, tf_delta=getattr(args, "tf_delta", 0.05),
        n_samples_override=getattr(args, "n_samples_override", None),
    )


def cmd_thresholds(args, cfg):
    from .thresholds import alpha_c, lambda_c, lambda_star

    d = args.delta
    out = {"delta": d, "lambda_c": lambda_c(d), "alpha_c": alpha_c(d), "b_c": (d - 2) / d}
    if d <= 300:
        out["lambda_c_exact"] = str(lambda_c(d, exact=True))
        out["alpha_c_exact"] = str(alpha_c(d, exact=True))
    if args.alpha is not None:
        out["alpha"] = args.alpha
        out["lambda_star"] = lambda_star(args.alpha, d)
    return out


def cmd_poly(args, cfg):
    from .exact import independence_polynomial

    G = load_graph(args.graph)
    P = independence_polynomial(G, limit=cfg.exact_limit)
    return {"n": G.n, "m": G.num_edges, "coefficients": list(P.coeffs)}


def cmd_sample_hc(args, cfg):
    from .glauber import has_mixing_guarantee, sample_batch

    G = load_graph(args.graph)
    if args.lam < 0:
        raise PreconditionError("lambda must be non-negative")
    sets = sample_batch(G, args.lam, args.eps, args.n_samples, seed=cfg.seed, c_mix=cfg.c_mix)
    return {
        "lambda": args.lam, "epsilon": args.eps, "n_samples": args.n_samples,
        "guarantee": has_mixing_guarantee(G, args.lam),
        "samples": [sorted(s) for s in sets],
    }


def cmd_sample_k(args, cfg):
    from .sample_k import sample_k

    G = load_graph(args.graph)
    mode = "triangle_free" if args.triangle_free else "general"
    scfg = _sampler_config(args, cfg, args.eps, mode)
    S, trace = sample_k(G, args.k, args.alpha, scfg, delta=args.delta)
    if args.trace:
        Path(args.trace).write_text("\n".join(trace.to_json_lines()) + "\n")
    return {
        "k": args.k, "alpha": args.alpha, "epsilon": args.eps, "mode": mode,
        "set": sorted(S), "outcome": trace.outcome, "guarantee": trace.guarantee,
        "iterations": len(trace.records), "n_samples": trace.n_samples,
    }


def cmd_count_ik(args, cfg):
    from .annealing import count_ik
    from .exact import independence_polynomial

    G = load_graph(args.graph)
    scfg = _sampler_config(args, cfg, 0.05)
    est = count_ik(G, args.k, args.alpha, args.eps, scfg, c_anneal=cfg.c_anneal, delta=args.delta)
    out = {
        "k": args.k, "alpha": args.alpha, "epsilon": args.eps,
        "estimate": est.decimal(),
        "log_estimate": est.log_estimate if math.isfinite(est.log_estimate) else None,
        "levels": est.levels, "guarantee": est.guarantee_valid,
    }
    if args.with_exact:
        out["exact"] = independence_polynomial(G, limit=cfg.exact_limit).coefficient(args.k)
    return out


def cmd_reduce(args, cfg):
    from .graph import write_edge_list
    from .reduction import build_instance, gadget_variance_floor

    G = load_graph(args.graph)
    inst = build_instance(G, args.alpha, args.eps, c_reduction=cfg.c_reduction, r=args.r)
    if inst.N > cfg.degree_cap * 10:
        raise ResourceLimitError(f"G' would have {inst.N} vertices")
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    el, side = prefix.with_suffix(".el"), prefix.with_suffix(".json")
    write_edge_list(inst.g_prime, el)
    sidecar = inst.sidecar(G)
    side.write_text(json.dumps(sidecar, sort_keys=True, indent=1) + "\n")
    meta = {k: v for k, v in sidecar.items() if k != "graph"}
    meta.update(edge_list=str(el), sidecar=str(side),
                gadget_variance=gadget_variance_floor(inst.gadget))
    return meta


def cmd_verify_reduction(args, cfg):
    from .graph import from_edge_list
    from .reduction import build_instance, verify_reduction

    path = Path(args.instance)
    if not path.is_file():
        raise PreconditionError(f"sidecar not found: {args.instance}")
    side = json.loads(path.read_text())
    if side.get("schema_version") != SCHEMA_VERSION:
        raise PreconditionError("unsupported sidecar schema_version")
    G = from_edge_list(side["graph"]["n"], map(tuple, side["graph"]["edges"]))
    rs = args.r_sweep or [side["r"]]
    reports = []
    for r in rs:
        inst = build_instance(G, side["alpha"], side["epsilon"], r=r, delta=side["delta"],
                              build_graph=False)
        if (inst.gadget.a, inst.gadget.b) != (side["a"], side["b"]):
            raise InconsistencyError("sidecar gadget does not match the recomputed gadget")
        reports.append(verify_reduction(G, inst, cfg.degree_cap).as_dict())
    out = {"a": side["a"], "b": side["b"], "lambda": side["lambda"], "reports": reports}
    if args.plot_dir:
        from .plotting import plot_reduction

        fig = plot_reduction(rs, [r["log_ratio"] for r in reports],
                             Path(args.plot_dir) / "reduction.png")
        out["figure"] = str(fig)
    return out


def cmd_ising_count(args, cfg):
    from .ising import conjectured_alpha_min, count_coefficient, ising_coefficients

    G = load_graph(args.graph)
    scfg = _sampler_config(args, cfg, 0.05)
    est = count_coefficient(G, args.k, args.alpha, args.eps, args.B, args.lambda_max, scfg,
                            c_anneal=cfg.c_anneal)
    out = {
        "k": args.k, "alpha": args.alpha, "B": args.B, "lambda_max": args.lambda_max,
        "epsilon": args.eps, "estimate": est.decimal(), "log_estimate": est.log_estimate,
        "levels": est.levels, "guarantee": est.guarantee_valid,
        "conjectured_alpha_min": conjectured_alpha_min(args.B, args.lambda_max,
                                                       max(3, G.max_degree)),
    }
    if args.with_exact:
        out["exact"] = float(ising_coefficients(G, Fraction(str(args.B)))[args.k])
    return out


# -- bench -------------------------------------------------------------------------

BENCH_FIELDS = ("suite", "op", "n", "repeat", "seconds", "work", "rate", "threads")


def _bench_glauber(n, cfg, repeat):
    from .glauber import GlauberSampler, seed_words
    from .graph import random_regular

    G = random_regular(n, 3, seed=cfg.seed + repeat)
    sampler = GlauberSampler(cfg.c_mix)
    chains, eps = 256, 0.01
    sampler.draw(G, 1.0, 1, eps, 0)  # compile outside the timer
    t0 = time.perf_counter()
    sampler.draw(G, 1.0, chains, eps, seed_words(cfg.seed + repeat)[0])
    dt = time.perf_counter() - t0
    steps = chains * sampler.schedule.steps(n, eps)
    return "batch", dt, steps


def _bench_sample_k(n, cfg, repeat):
    from .graph import random_regular
    from .sample_k import SamplerConfig, sample_k

    G = random_regular(n, 3, seed=cfg.seed + repeat)
    alpha = 0.2
    k = math.floor(alpha * n)
    scfg = SamplerConfig(c_loop=cfg.c_loop, c_samples=cfg.c_samples, seed=cfg.seed + repeat,
                         c_mix=cfg.c_mix)
    t0 = time.perf_counter()
    _, trace = sample_k(G, k, alpha, scfg)
    dt = time.perf_counter() - t0
    return "sample_k", dt, len(trace.records) * trace.n_samples


def _bench_oracle(n, cfg, repeat):
    from .exact import independence_polynomial
    from .graph import random_regular

    G = random_regular(n, 3, seed=cfg.seed + repeat)
    t0 = time.perf_counter()
    P = independence_polynomial(G, limit=cfg.exact_limit)
    return "independence_polynomial", time.perf_counter() - t0, P.degree + 1


_BENCH = {
    "glauber": (_bench_glauber, (50, 100, 200, 400)),
    "sample-k": (_bench_sample_k, (50, 100, 200, 400)),
    "oracle": (_bench_oracle, (16, 24, 32, 40)),
}


def run_bench(suite: str, sizes, repeats: int, cfg: RunConfig) -> list[dict]:
    fn, default_sizes = _BENCH[suite]
    sizes = sizes or default_sizes
    fn(min(sizes), cfg, 0)  # warm-up: JIT cache loads stay out of the first row
    rows = []
    for n in sizes:
        for rep in range(repeats):
            op, dt, work = fn(n, cfg, rep)
            rows.append({"suite": suite, "op": op, "n": n, "repeat": rep, "seconds": dt,
                         "work": work, "rate": work / dt if dt > 0 else 0.0,
                         "threads": cfg.threads})
    return rows


def bench_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_bench(args, cfg):
    rows = run_bench(args.suite, args.sizes, args.repeats, cfg)
    text = bench_csv(rows)
    out = {"suite": args.suite, "rows": rows}
    if args.csv:
        Path(args.csv).write_text(text)
        out["csv"] = args.csv
    if args.plot:
        from .plotting import plot_bench

        out["figure"] = str(plot_bench(rows, args.plot, title=f"bench: {args.suite}"))
    return out


COMMANDS = {
    "thresholds": cmd_thresholds,
    "poly": cmd_poly,
    "sample-hc": cmd_sample_hc,
    "sample-k": cmd_sample_k,
    "count-ik": cmd_count_ik,
    "reduce": cmd_reduce,
    "verify-reduction": cmd_verify_reduction,
    "ising-count": cmd_ising_count,
    "bench": cmd_bench,
}


# -- output ------------------------------------------------------------------------

def schema_path(command: str) -> Path:
    """Location of the JSON schema that ``command``'s output follows."""
    return Path(__file__).parent / "schemas" / f"{command}.v{SCHEMA_VERSION}.schema.json"


def envelope(command: str, cfg: RunConfig, result: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command,
            "config": asdict(cfg), "result": result}


def render_table(command: str, result: dict) -> str:
    if command == "sample-hc":
        return "".join(" ".join(map(str, s)) + "\n" for s in result["samples"])
    if command == "bench":
        return bench_csv(result["rows"])
    lines = []
    for key in sorted(result):
        value = result[key]
        if isinstance(value, (list, dict)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}\t{value}")
    return "\n".join(lines) + "\n"


def _error(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "reason": str(exc)}, sort_keys=True) + "\n")
    return code


def _on_alarm(signum, frame):
    raise ResourceLimitError("wall-clock budget exhausted")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = run_config(args)
    except (TypeError, ValueError) as exc:  # malformed environment override
        return _error("usage", exc, 2)
    logging.basicConfig(level=str(args.log_level).upper(), format="%(levelname)s %(name)s: %(message)s")

    from .glauber import set_threads

    set_threads(cfg.threads)
    if cfg.time_budget > 0:
        signal.signal(signal.SIGALRM, _on_alarm)
        signal.setitimer(signal.ITIMER_REAL, cfg.time_budget)
    try:
        result = COMMANDS[args.command](args, cfg)
    except PreconditionError as exc:
        return _error("precondition", exc, 3)
    except ResourceLimitError as exc:
        return _error("resource", exc, 4)
    except InconsistencyError as exc:
        return _error("inconsistency", exc, 1)
    finally:
        if cfg.time_budget > 0:
            signal.setitimer(signal.ITIMER_REAL, 0)

    if cfg.format == "json":
        sys.stdout.write(json.dumps(envelope(args.command, cfg, result), sort_keys=True) + "\n")
    else:
        sys.stdout.write(render_table(args.command, result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
