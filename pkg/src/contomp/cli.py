"""Command-line experiment harness.

Subcommands:

* ``run``      one pursuit on an explicit signal, with trace and verdict
* ``trial``    seeded Monte-Carlo trials emitting one record per trial
* ``certify``  certificate reports for an explicit support
* ``examples`` canned demonstration scenarios with asserted outcomes

Configs are JSON documents carrying a ``schema_version`` field.  Exit codes:
0 completed, 1 scenario assertion failed, 2 invalid configuration,
3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import sys
import time
from typing import Any

import numpy as np

from . import certify
from .errors import DegenerateSupportError, ParameterError
from .gram import GramMatrix
from .kernels import KernelSpec, inverse_linear, laplace
from .omp import (
    EPS_STOP,
    TAU_MATCH,
    SparseSignal,
    Termination,
    classify,
    recovered_signal,
    run_omp,
)
from .optimizer import CorrelationFunction, OptimizerConfig, global_argmax
from .param_space import CartesianGrid, Support, set_aug

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

CSV_HEADER = "trial_index,seed,k,D,verdict,iterations,residual,erc_max,ms"


class ConfigError(Exception):
    pass


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}")
    return cfg


def _build_kernel(cfg: dict) -> KernelSpec:
    kc = cfg.get("kernel")
    if not isinstance(kc, dict) or "family" not in kc:
        raise ConfigError("config needs kernel.family")
    family = kc["family"]
    try:
        if family == "gaussian":
            return KernelSpec.gaussian_control()
        lam = float(kc.get("lam", 1.0))
        p = float(kc.get("p", 1.0))
        dimension = int(kc.get("dimension", 1))
        if family == "laplace":
            return KernelSpec.cmf_kernel(laplace(lam), p, dimension)
        if family == "inverse_linear":
            return KernelSpec.cmf_kernel(inverse_linear(lam), p, dimension)
    except (ParameterError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown kernel family {family!r}")


def _random_support(spec: dict, dimension: int, rng: np.random.Generator) -> Support:
    k = int(spec.get("count", 3))
    lo, hi = (float(x) for x in spec.get("box", (-5.0, 5.0)))
    min_gap = float(spec.get("min_gap", 1e-2))
    if k < 1 or hi <= lo or min_gap <= 0:
        raise ConfigError("invalid random support spec")
    for _ in range(1000):
        pts = rng.uniform(lo, hi, size=(k, dimension))
        ok = all(
            float(np.max(np.abs(pts[i] - pts[j]))) >= min_gap
            for i in range(k)
            for j in range(i + 1, k)
        )
        if ok:
            return Support.from_points(pts)
    raise ConfigError("could not draw a support satisfying the gap constraint")


def _random_coefficients(spec: dict, k: int, rng: np.random.Generator) -> tuple[float, ...]:
    lo, hi = (float(x) for x in spec.get("magnitude", (0.1, 10.0)))
    signs = spec.get("signs", "signed")
    if not 0 < lo <= hi or signs not in ("signed", "positive"):
        raise ConfigError("invalid random coefficient spec")
    mags = rng.uniform(lo, hi, k)
    if signs == "signed":
        mags *= rng.choice([-1.0, 1.0], k)
    return tuple(float(m) for m in mags)


def _build_signal(cfg: dict, kernel: KernelSpec, rng: np.random.Generator) -> SparseSignal:
    sc = cfg.get("support")
    if not isinstance(sc, dict):
        raise ConfigError("config needs a support section")
    try:
        if "points" in sc:
            support = Support.from_points(sc["points"])
        elif "random" in sc:
            support = _random_support(sc["random"], kernel.dimension, rng)
        else:
            raise ConfigError("support needs 'points' or 'random'")
        if support.dimension != kernel.dimension:
            raise ConfigError("support dimension does not match the kernel")
        cc = cfg.get("coefficients")
        if not isinstance(cc, dict):
            raise ConfigError("config needs a coefficients section")
        if "values" in cc:
            coefs = tuple(float(c) for c in cc["values"])
        elif "random" in cc:
            coefs = _random_coefficients(cc["random"], len(support), rng)
        else:
            raise ConfigError("coefficients needs 'values' or 'random'")
        return SparseSignal.from_points(support.points, coefs)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def _omp_params(cfg: dict) -> tuple[int | None, float, float]:
    oc = cfg.get("omp", {})
    max_iter = oc.get("max_iter")
    return (
        None if max_iter is None else int(max_iter),
        float(oc.get("eps_stop", EPS_STOP)),
        float(oc.get("tau_match", TAU_MATCH)),
    )


def _optimizer_config(cfg: dict) -> OptimizerConfig:
    oc = cfg.get("optimizer", {})
    out = OptimizerConfig(
        grid_points_per_axis=int(oc.get("grid_points_per_axis", 512)),
        refine_iterations=int(oc.get("refine_iterations", 60)),
        tie_tolerance=float(oc.get("tie_tolerance", 1e-9)),
        exclusion_epsilon=float(oc.get("exclusion_epsilon", 1e-12)),
    )
    if (
        out.grid_points_per_axis <= 0
        or out.refine_iterations <= 0
        or out.tie_tolerance <= 0
        or out.exclusion_epsilon <= 0
    ):
        raise ConfigError("optimizer parameters must be positive")
    return out


def _restricted_erc_value(kernel: KernelSpec, support: Support) -> float:
    return certify.restricted_erc(kernel, support).statistic


def _trace_document(trace, verdict, reconstruction) -> dict:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "signal": {
            "support": [list(p) for p in (trace.signal.support.points if trace.signal.support else ())],
            "coefficients": list(trace.signal.coefficients),
        },
        "terminated": trace.terminated.value,
        "signal_norm": trace.signal_norm,
        "verdict": verdict.kind.value,
        "iterations": [
            {
                "selected": list(it.selected),
                "tie_set": [list(t) for t in it.tie_set],
                "correlation": it.correlation,
                "ls_coefficients": list(it.ls_coefficients),
                "residual_norm": it.residual_norm,
            }
            for it in trace.iterations
        ],
    }
    if reconstruction is not None:
        doc["reconstruction"] = {
            "ok": reconstruction.ok,
            "entries": [dataclasses.asdict(e) for e in reconstruction.entries],
        }
    return doc


def _write_out(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    kernel = _build_kernel(cfg)
    rng = np.random.default_rng(args.seed)
    signal = _build_signal(cfg, kernel, rng)
    max_iter, eps_stop, tau_match = _omp_params(cfg)
    try:
        trace = run_omp(
            signal, kernel, max_iter=max_iter, eps_stop=eps_stop,
            optimizer_config=_optimizer_config(cfg),
        )
    except DegenerateSupportError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    verdict = classify(trace, tol_match=tau_match)
    reconstruction = (
        recovered_signal(trace, tol_match=tau_match)
        if trace.terminated is Termination.CONVERGED
        else None
    )
    doc = _trace_document(trace, verdict, reconstruction)
    body = json.dumps(doc, indent=2) + "\n"
    if args.format == "json":
        _write_out(body, args.out)
    else:
        if args.out:
            _write_out(body, args.out)
        print(f"verdict: {verdict.kind.value}")
        print(f"iterations: {len(trace.iterations)}")
        print(f"terminated: {trace.terminated.value}")
        print(f"residual: {_fmt(trace.residual_norm)}")
        for it in trace.iterations:
            print(f"  selected {tuple(it.selected)}  residual {_fmt(it.residual_norm)}")
    if trace.terminated is Termination.DEGENERATE:
        return EXIT_DEGENERATE
    return EXIT_OK


def _one_trial(cfg: dict, master_seed: int, index: int, no_timing: bool) -> tuple:
    """Worker for a single Monte-Carlo trial; rebuilds everything from the config."""
    ss = np.random.SeedSequence((master_seed, index))
    seed64 = int(ss.generate_state(1, dtype=np.uint64)[0])
    rng = np.random.default_rng(ss)
    kernel = _build_kernel(cfg)
    signal = _build_signal(cfg, kernel, rng)
    max_iter, eps_stop, tau_match = _omp_params(cfg)
    t0 = time.perf_counter()
    trace = run_omp(
        signal, kernel, max_iter=max_iter, eps_stop=eps_stop,
        optimizer_config=_optimizer_config(cfg),
    )
    ms = 0.0 if no_timing else (time.perf_counter() - t0) * 1e3
    verdict = classify(trace, tol_match=tau_match)
    erc_max = _restricted_erc_value(kernel, signal.support) if signal.k else 0.0
    return (
        index,
        seed64,
        signal.k,
        kernel.dimension,
        verdict.kind.value,
        len(trace.iterations),
        trace.residual_norm,
        erc_max,
        ms,
    )


def cmd_trial(args) -> int:
    cfg = _load_config(args.config)
    _build_kernel(cfg)  # validate eagerly
    trials = int(cfg.get("trials", 0))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    master_seed = int(args.seed)
    records = []
    if args.jobs and args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_one_trial, cfg, master_seed, i, args.no_timing)
                for i in range(trials)
            ]
            records = [f.result() for f in futures]
    else:
        records = [_one_trial(cfg, master_seed, i, args.no_timing) for i in range(trials)]
    records.sort(key=lambda r: r[0])

    counts: dict[str, int] = {}
    for r in records:
        counts[r[4]] = counts.get(r[4], 0) + 1

    if args.format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "records": [
                {
                    "trial_index": r[0], "seed": r[1], "k": r[2], "D": r[3],
                    "verdict": r[4], "iterations": r[5],
                    "residual": r[6], "erc_max": r[7], "ms": r[8],
                }
                for r in records
            ],
            "summary": counts,
        }
        _write_out(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK

    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r[0]},{r[1]},{r[2]},{r[3]},{r[4]},{r[5]},{_fmt(r[6])},{_fmt(r[7])},{_fmt(r[8])}"
        )
    for kind in sorted(counts):
        lines.append(f"# {kind}={counts[kind]}")
    lines.append(f"# trials={trials}")
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = _load_config(args.config)
    kernel = _build_kernel(cfg)
    sc = cfg.get("support", {})
    if "points" not in sc:
        raise ConfigError("certify needs an explicit support")
    try:
        support = Support.from_points(sc["points"])
        reports = [certify.restricted_erc(kernel, support)]
        reports.append(certify.coherence_certificate(kernel, support))
        if kernel.cmf is not None and kernel.cmf.name == "laplace":
            reports.append(certify.separation_certificate(kernel, support))
        falsifier = None
        if kernel.cmf is not None:
            falsifier = certify.axis_admissibility_falsifier(
                kernel, set_aug(support), trials=int(cfg.get("trials", 100)),
                seed=int(args.seed),
            )
    except DegenerateSupportError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE

    if args.format == "json":
        doc: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "certificates": [
                {
                    "name": r.name, "status": r.status, "statistic": r.statistic,
                    "threshold": r.threshold, "margin": r.margin,
                }
                for r in reports
            ],
        }
        if falsifier is not None:
            doc["axis_falsifier"] = {
                "falsified": falsifier.falsified,
                "trials": falsifier.trials,
            }
        _write_out(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK

    lines = []
    for r in reports:
        lines.append(
            f"{r.name}: {r.status} (statistic={_fmt(r.statistic)}, threshold={_fmt(r.threshold)})"
        )
    if falsifier is not None:
        status = "violated" if falsifier.falsified else "not-falsified"
        lines.append(f"axis_falsifier: {status} after {falsifier.trials} trials")
    _write_out("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_examples(args) -> int:
    """Canned scenarios with asserted outcomes; exit 1 on any failure."""
    failures = []
    out: list[str] = []

    # Scenario 1: the smooth control kernel selects between the two atoms.
    kernel = KernelSpec.gaussian_control()
    f = CorrelationFunction(np.array([1.0, 1.0]), np.array([[0.0], [1.0]]), kernel)
    res = global_argmax(f)
    sel = res.canonical[0]
    if min(abs(sel), abs(sel - 1.0)) > 1e-3 and abs(sel - 0.5) <= 1e-4:
        out.append(f"PASS control-kernel-midpoint: first selection at {_fmt(sel)}")
    else:
        failures.append("control-kernel-midpoint")
        out.append(f"FAIL control-kernel-midpoint: first selection at {_fmt(sel)}")

    # Scenario 2: cluster margin sign flips across the crossover.
    lap = laplace(1.0)
    below = certify.symmetric_cluster_margin(lap, 3, 0.9 * math.log(2.0))
    above = certify.symmetric_cluster_margin(lap, 3, 1.5 * math.log(2.0))
    inv = inverse_linear(1.0)
    cross = certify.symmetric_cluster_crossover(inv, 3)
    inv_below = certify.symmetric_cluster_margin(inv, 3, 0.9 * cross)
    inv_above = certify.symmetric_cluster_margin(inv, 3, 1.1 * cross)
    if below < 0 < above and inv_below < 0 < inv_above:
        out.append(f"PASS cluster-margin-crossover: inverse-linear crossover at {_fmt(cross)}")
    else:
        failures.append("cluster-margin-crossover")
        out.append("FAIL cluster-margin-crossover")

    # Scenario 3: balanced grid exposes an interior section maximizer.
    k2 = KernelSpec.cmf_kernel(inv, 1.0, 2)
    f0, fd, fm = certify.balanced_grid_section(inv, 1.0, 1.0)
    grid = CartesianGrid.from_axes([[0.0, 1.0], [0.0, 1.0]])
    rep = certify.axis_admissibility_falsifier(k2, grid, trials=0, seed=args.seed)
    if abs(f0) <= 1e-12 and abs(fd) <= 1e-12 and abs(fm) > 1e-3 and rep.falsified:
        out.append(f"PASS balanced-grid-interior-maximum: midpoint section value {_fmt(fm)}")
    else:
        failures.append("balanced-grid-interior-maximum")
        out.append(f"FAIL balanced-grid-interior-maximum: midpoint section value {_fmt(fm)}")

    _write_out("\n".join(out) + "\n", args.out)
    return EXIT_ASSERTION if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contomp",
        description="Matching pursuit over continuous kernel dictionaries",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
        p.add_argument("--out", default=None, help="write output to this path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_run = sub.add_parser("run", help="one pursuit on an explicit signal")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_trial = sub.add_parser("trial", help="seeded Monte-Carlo trials")
    common(p_trial)
    p_trial.add_argument(
        "--no-timing", action="store_true",
        help="report 0 in the ms column for byte-identical reruns",
    )
    p_trial.set_defaults(func=cmd_trial)

    p_cert = sub.add_parser("certify", help="certificate reports for a support")
    common(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_ex = sub.add_parser("examples", help="canned demonstration scenarios")
    common(p_ex, needs_config=False)
    p_ex.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateSupportError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
