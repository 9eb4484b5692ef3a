"""Command-line front end: run identity checks, suites, and convergence studies.

Subcommands mirror the checkers one-to-one (``check-douglas``,
``check-hardy-stein``, ``check-pvariance``, ``check-remainder``,
``check-vanishing``, ``check-minimizer``, ``check-quasimin``,
``check-fpequiv``, ``mc-validate``), plus ``convergence`` for error tables
against closed-form anchors and ``suite`` to run everything with defaults.

Reports are JSON documents validated against REPORT_SCHEMA before writing;
the results array is deterministic for a given config and seed (timestamps
live only in the metadata block).  Exit status: 0 all checks passed, 1 some
check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

import jsonschema
import numpy as np

from . import identities
from .errors import PDouglasError, UnsupportedInputError
from .forms import QuadratureGrid, base_grid, poisson_expectation
from .harmonic import BoundaryFunction
from .kernels import Ball, Disk, Interval, KernelSet
from .montecarlo import McConfig, mc_expectation, stream_rng
from .presets import ball_preset, boundary_preset, interior_preset, interval_preset

__all__ = ["RunConfig", "REPORT_SCHEMA", "main", "run", "convergence_rows"]

TWO_PI = 2.0 * math.pi

_IDENTITY_RESULT = {
    "type": "object",
    "required": [
        "identity", "domain", "p", "params", "lhs", "rhs",
        "abs_diff", "rel_diff", "tolerance", "pass", "grid", "notes",
    ],
    "properties": {
        "identity": {"type": "string"},
        "domain": {"type": "string"},
        "p": {"type": "number"},
        "params": {"type": "object"},
        "lhs": {"type": "number"},
        "rhs": {"type": "number"},
        "abs_diff": {"type": "number"},
        "rel_diff": {"type": "number"},
        "tolerance": {"type": "number"},
        "pass": {"type": "boolean"},
        "grid": {"type": "object"},
        "notes": {"type": "array", "items": {"type": "string"}},
        "extras": {"type": "object"},
    },
}

_ENVELOPE_RESULT = {
    "type": "object",
    "required": ["identity", "p_values", "envelopes", "n_samples", "seed", "pass"],
    "properties": {
        "identity": {"const": "fpequiv"},
        "p_values": {"type": "array", "items": {"type": "number"}},
        "envelopes": {"type": "object"},
        "n_samples": {"type": "integer"},
        "seed": {"type": "integer"},
        "pass": {"type": "boolean"},
        "notes": {"type": "array"},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["metadata", "results"],
    "properties": {
        "metadata": {
            "type": "object",
            "required": ["tool", "version", "config"],
            "properties": {
                "tool": {"const": "pdouglas"},
                "version": {"type": "string"},
                "timestamp": {"type": ["string", "null"]},
                "config": {"type": "object"},
            },
        },
        "results": {
            "type": "array",
            "items": {"oneOf": [_IDENTITY_RESULT, _ENVELOPE_RESULT]},
        },
    },
}


@dataclass
class RunConfig:
    """Parsed CLI configuration; round-trips through to_dict/from_dict."""

    subcommand: str
    domain: str = "disk"
    a: float = 0.0
    b: float = 1.0
    g: str = "cos"
    g_csv: Optional[str] = None
    u: Optional[str] = None
    p: list = field(default_factory=lambda: [2.0])
    levels: int = 3
    tolerance: Optional[float] = None
    seed: int = 1
    n: int = 100_000
    x: Optional[list] = None
    w: float = 0.0
    rho: list = field(default_factory=lambda: [0.5, 0.7, 0.9])
    order: int = 16
    eps: float = 1e-3
    envelope: bool = False
    samples: int = 10_000
    out: Optional[str] = None
    reference: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(**d)


def _domain_obj(cfg: RunConfig):
    if cfg.domain == "disk":
        return Disk()
    if cfg.domain == "ball":
        return Ball()
    if cfg.domain == "interval":
        return Interval(cfg.a, cfg.b)
    raise UnsupportedInputError(f"unknown domain {cfg.domain!r} (disk, ball, interval)")


def _boundary_data(cfg: RunConfig):
    dom = _domain_obj(cfg)
    if isinstance(dom, Interval):
        return interval_preset(cfg.u or "linear:1,0", dom)
    if isinstance(dom, Ball):
        return ball_preset(cfg.g if cfg.g.startswith("linear") else "linear:0,0,0,1")
    if cfg.g_csv:
        return BoundaryFunction.from_fourier_csv(cfg.g_csv)
    return boundary_preset(cfg.g)


def _point(cfg: RunConfig, default):
    return list(default) if cfg.x is None else list(cfg.x)


def _mc_result(cfg: RunConfig, grid) -> dict:
    dom = _domain_obj(cfg)
    if isinstance(dom, Interval):
        raise UnsupportedInputError("mc-validate supports the disk and the ball")
    p = cfg.p[0]
    if isinstance(dom, Disk):
        g = _boundary_data(cfg)
        x = _point(cfg, (0.3, 0.0))
        quad = poisson_expectation(KernelSet(dom), g, p, x)
        mc_cfg = McConfig(n=cfg.n, seed=cfg.seed, x=tuple(x), domain=dom, wos_eps=cfg.eps)
        est = mc_expectation(mc_cfg, g, p)
        bias_allowance = 0.0
        label = g.label
    else:
        data = _boundary_data(cfg)
        x = _point(cfg, (0.0, 0.0, 0.4))
        quad = poisson_expectation(KernelSet(dom), data, p, x)
        mc_cfg = McConfig(n=cfg.n, seed=cfg.seed, x=tuple(x), domain=dom, wos_eps=cfg.eps)
        est = mc_expectation(mc_cfg, data, p)
        bias_allowance = 2.0 * cfg.eps * max(abs(quad), 1.0)
        label = f"linear:{data.c0:g},{data.c[0]:g},{data.c[1]:g},{data.c[2]:g}"
    band = 4.0 * est.stderr + bias_allowance
    passed = abs(est.mean - quad) <= band
    result = {
        "identity": "mc-validate",
        "domain": cfg.domain,
        "p": float(p),
        "params": {"g": label, "x": [float(v) for v in x], "n": cfg.n, "seed": cfg.seed},
        "lhs": est.mean,
        "rhs": quad,
        "abs_diff": abs(est.mean - quad),
        "rel_diff": abs(est.mean - quad) / max(abs(est.mean), abs(quad), 1e-300),
        "tolerance": band,
        "pass": bool(passed),
        "grid": {},
        "notes": ["tolerance is 4 standard errors plus the walk-on-spheres bias allowance"],
        "extras": {"stderr": est.stderr, "wos_eps": cfg.eps if cfg.domain == "ball" else None},
    }
    if cfg.envelope:
        inside = 0
        seeds = 50
        for k in range(seeds):
            est_k = mc_expectation(
                McConfig(n=max(cfg.n // 10, 1000), seed=cfg.seed + 1 + k, x=tuple(x), domain=dom, wos_eps=cfg.eps),
                _boundary_data(cfg) if cfg.domain == "disk" else data,
                p,
            )
            if abs(est_k.mean - quad) <= 4.0 * est_k.stderr + bias_allowance:
                inside += 1
        result["extras"]["envelope"] = {"inside": inside, "seeds": seeds, "required": 46}
        result["pass"] = bool(result["pass"] and inside >= 46)
        result["notes"].append(f"chebyshev envelope: {inside}/{seeds} seeds within 4 sigma")
    return result


def _report_to_result(report) -> dict:
    d = report.to_dict()
    d["pass"] = d.pop("passed")
    return d


def _checks_for(cfg: RunConfig, grid: QuadratureGrid):
    """Yield result dicts for the configured subcommand."""
    dom = _domain_obj(cfg)
    sub = cfg.subcommand
    if sub == "check-douglas":
        for p in cfg.p:
            yield _report_to_result(
                identities.check_douglas(_boundary_data(cfg), p, dom, grid, cfg.tolerance, cfg.order)
            )
    elif sub == "check-hardy-stein":
        g = _boundary_data(cfg)
        for p in cfg.p:
            yield _report_to_result(
                identities.check_hardy_stein(g, p, _point(cfg, (0.0, 0.0)), grid, cfg.tolerance, cfg.order)
            )
    elif sub == "check-pvariance":
        g = _boundary_data(cfg)
        for p in cfg.p:
            yield _report_to_result(
                identities.check_p_variance(g, p, _point(cfg, (0.2, 0.1)), w=cfg.w, grid=grid)
            )
    elif sub == "check-remainder":
        u = interior_preset(cfg.u or "x1sq")
        for p in cfg.p:
            yield _report_to_result(
                identities.check_remainder(u, p, grid, cfg.tolerance or 1e-3, max(cfg.order, 32))
            )
    elif sub == "check-vanishing":
        v = interior_preset(cfg.u or "one-minus-rsq")
        for p in cfg.p:
            yield _report_to_result(identities.check_vanishing(v, p, grid, cfg.tolerance))
    elif sub == "check-minimizer":
        g = _boundary_data(cfg)
        for p in cfg.p:
            yield _report_to_result(identities.check_minimizer(g, p, grid, max(cfg.order, 48)))
    elif sub == "check-quasimin":
        g = _boundary_data(cfg)
        for p in cfg.p:
            for rho in cfg.rho:
                yield _report_to_result(identities.check_quasimin(g, p, rho, grid, max(cfg.order, 48)))
    elif sub == "check-fpequiv":
        rep = identities.check_fpequiv(tuple(cfg.p) if cfg.p else (2.0,), cfg.samples, cfg.seed)
        d = rep.to_dict()
        d["identity"] = "fpequiv"
        d["pass"] = d.pop("passed")
        yield d
    elif sub == "mc-validate":
        yield _mc_result(cfg, grid)
    else:
        raise UnsupportedInputError(f"unknown subcommand {sub!r}")


def _suite_results(cfg: RunConfig, grid: QuadratureGrid):
    results = []
    dom = _domain_obj(cfg)
    if isinstance(dom, Interval):
        for p in cfg.p or [1.5, 2.0, 3.0]:
            results.append(
                _report_to_result(identities.check_douglas(_boundary_data(cfg), p, dom, grid, cfg.tolerance))
            )
        results.append(_fpequiv_result(cfg))
        return results
    if isinstance(dom, Ball):
        for p in cfg.p:
            results.append(
                _report_to_result(identities.check_douglas(_boundary_data(cfg), p, dom, grid, cfg.tolerance))
            )
        results.append(_mc_result(cfg, grid))
        results.append(_fpequiv_result(cfg))
        return results
    g = _boundary_data(cfg)
    for p in cfg.p:
        results.append(_report_to_result(identities.check_douglas(g, p, dom, grid, cfg.tolerance, cfg.order)))
        results.append(
            _report_to_result(identities.check_hardy_stein(g, p, [0.0, 0.0], grid, cfg.tolerance, cfg.order))
        )
        results.append(
            _report_to_result(identities.check_hardy_stein(g, p, [0.3, 0.0], grid, None, cfg.order))
        )
        results.append(
            _report_to_result(identities.check_p_variance(g, p, [0.2, 0.1], w=cfg.w, grid=grid))
        )
        if p >= 2.0:
            results.append(
                _report_to_result(identities.check_remainder(interior_preset("x1sq"), p, grid, 1e-3, 32))
            )
        results.append(
            _report_to_result(identities.check_vanishing(interior_preset("one-minus-rsq"), p, grid))
        )
        results.append(_report_to_result(identities.check_minimizer(g, p, grid)))
        for rho in cfg.rho:
            results.append(_report_to_result(identities.check_quasimin(g, p, rho, grid)))
    results.append(_fpequiv_result(cfg))
    mc_cfg = RunConfig(**{**cfg.to_dict(), "subcommand": "mc-validate"})
    results.append(_mc_result(mc_cfg, grid))
    return results


def _fpequiv_result(cfg: RunConfig) -> dict:
    rep = identities.check_fpequiv((1.2, 1.5, 2.0, 3.0, 4.0), cfg.samples, cfg.seed)
    d = rep.to_dict()
    d["identity"] = "fpequiv"
    d["pass"] = d.pop("passed")
    return d


# ---------------------------------------------------------------------------
# convergence tables
# ---------------------------------------------------------------------------

_NOISE_FLOOR = 1e-12


def convergence_rows(cfg: RunConfig):
    """(level, value, abs_error, observed_order) rows for an anchored check.

    Only targets with a closed-form reference are accepted: douglas on the
    interval (exact), douglas on the disk at p = 2 with g = cos (2 pi),
    hardy-stein at the origin at p = 2 with g = cos (1/2), and the vanishing
    identity for 1 - r^2 at p = 2 (2 pi).  The tracked value is the
    quadrature-heavy side (rhs).
    """
    sub = cfg.reference or ""
    dom = _domain_obj(cfg)
    rows = []
    if sub == "douglas" and isinstance(dom, Interval):
        u = interval_preset(cfg.u or "linear:1,0", dom)
        ref = None
        for level in range(1, cfg.levels + 1):
            rep = identities.check_douglas(u, cfg.p[0], dom, base_grid(level))
            ref = rep.lhs
            rows.append((level, rep.rhs, abs(rep.rhs - ref)))
    elif sub == "douglas" and isinstance(dom, Disk) and cfg.p[0] == 2.0 and cfg.g == "cos":
        ref = TWO_PI
        for level in range(1, cfg.levels + 1):
            rep = identities.check_douglas(boundary_preset("cos"), 2.0, dom, base_grid(level))
            rows.append((level, rep.rhs, abs(rep.rhs - ref)))
    elif sub == "hardy-stein" and isinstance(dom, Disk) and cfg.p[0] == 2.0 and cfg.g == "cos":
        ref = 0.5
        for level in range(1, cfg.levels + 1):
            rep = identities.check_hardy_stein(boundary_preset("cos"), 2.0, [0.0, 0.0], base_grid(level))
            rows.append((level, rep.rhs, abs(rep.rhs - ref)))
    elif sub == "vanishing" and isinstance(dom, Disk) and cfg.p[0] == 2.0:
        ref = TWO_PI
        for level in range(1, cfg.levels + 1):
            rep = identities.check_vanishing(interior_preset("one-minus-rsq"), 2.0, base_grid(level))
            rows.append((level, rep.rhs, abs(rep.rhs - ref)))
    else:
        raise UnsupportedInputError(
            "convergence requires a closed-form anchored target: "
            "douglas (interval; disk p=2 g=cos), hardy-stein (disk p=2 g=cos origin), "
            "or vanishing (disk p=2)"
        )
    out = []
    prev_err = None
    for level, value, err in rows:
        if prev_err is None or prev_err <= _NOISE_FLOOR or err <= _NOISE_FLOOR:
            order = ""
        else:
            order = f"{math.log2(prev_err / max(err, 1e-300)):.3f}"
        out.append({"level": level, "value": value, "abs_error": err, "observed_order": order})
        prev_err = err
    return out


def _monotone_ok(rows) -> bool:
    errs = [r["abs_error"] for r in rows]
    for a, b in zip(errs, errs[1:]):
        if b > max(1.05 * a, 2.0 * _NOISE_FLOOR):
            return False
    return True


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------

def _parse_p(text: str):
    return [float(v) for v in text.split(",") if v]


def _parse_point(text: str):
    return [float(v) for v in text.split(",") if v]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdouglas",
        description="Verify interior/boundary p-energy identities on model domains.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    names = [
        "check-douglas", "check-hardy-stein", "check-pvariance", "check-remainder",
        "check-vanishing", "check-minimizer", "check-quasimin", "check-fpequiv",
        "mc-validate", "convergence", "suite",
    ]
    for name in names:
        sp = sub.add_parser(name)
        sp.add_argument("--domain", default="disk", choices=["disk", "ball", "interval"])
        sp.add_argument("--a", type=float, default=0.0, help="interval left endpoint")
        sp.add_argument("--b", type=float, default=1.0, help="interval right endpoint")
        sp.add_argument("--g", default="cos", help="boundary preset, e.g. shifted-cos:1.5")
        sp.add_argument("--g-csv", default=None, help="Fourier coefficient CSV (n,a_n,b_n)")
        sp.add_argument("--u", default=None, help="interval linear:c,d or interior C2 preset")
        sp.add_argument("--p", type=_parse_p, default=[2.0], help="comma-separated exponents")
        sp.add_argument("--levels", type=int, default=3)
        sp.add_argument("--tolerance", type=float, default=None)
        sp.add_argument("--seed", type=int, default=1)
        sp.add_argument("--n", type=int, default=100_000, help="Monte Carlo sample count")
        sp.add_argument("--x", type=_parse_point, default=None, help="interior point, e.g. 0.3,0")
        sp.add_argument("--w", type=float, default=0.0, help="p-variance base angle")
        sp.add_argument("--rho", type=_parse_p, default=[0.5, 0.7, 0.9])
        sp.add_argument("--order", type=int, default=16, help="Fourier truncation order")
        sp.add_argument("--eps", type=float, default=1e-3, help="walk-on-spheres shell")
        sp.add_argument("--envelope", action="store_true", help="run the 50-seed envelope test")
        sp.add_argument("--samples", type=int, default=10_000, help="fpequiv sample pairs")
        sp.add_argument("--out", default=None, help="output path (default <outdir>/<subcommand>.json)")
        sp.add_argument("--reference", default=None, help="convergence target, e.g. douglas")
    return parser


def _out_path(cfg: RunConfig, suffix: str) -> str:
    if cfg.out:
        return cfg.out
    outdir = os.environ.get("PDOUGLAS_OUTDIR", ".")
    os.makedirs(outdir, exist_ok=True)
    return os.path.join(outdir, f"{cfg.subcommand}{suffix}")


def run(cfg: RunConfig, timestamp: Optional[str] = "auto") -> int:
    """Execute one configured subcommand; write reports; return exit status."""
    try:
        if cfg.subcommand == "convergence":
            rows = convergence_rows(cfg)
            path = _out_path(cfg, ".csv")
            with open(path, "w", newline="") as handle:
                writer = csv.DictWriter(handle, fieldnames=["level", "value", "abs_error", "observed_order"])
                writer.writeheader()
                writer.writerows(rows)
            ok = _monotone_ok(rows)
            for r in rows:
                print(f"level {r['level']}: value={r['value']:.12g} err={r['abs_error']:.3e} order={r['observed_order']}")
            print(f"convergence: {'monotone' if ok else 'NOT monotone'} -> {path}")
            return 0 if ok else 1

        grid = base_grid(cfg.levels)
        if cfg.subcommand == "suite":
            results = _suite_results(cfg, grid)
        else:
            results = list(_checks_for(cfg, grid))
        stamp = (
            datetime.datetime.now(datetime.timezone.utc).isoformat()
            if timestamp == "auto"
            else timestamp
        )
        document = {
            "metadata": {
                "tool": "pdouglas",
                "version": _version(),
                "timestamp": stamp,
                "config": cfg.to_dict(),
            },
            "results": results,
        }
        jsonschema.validate(document, REPORT_SCHEMA)
        path = _out_path(cfg, ".json")
        with open(path, "w") as handle:
            json.dump(document, handle, indent=2, sort_keys=True)
            handle.write("\n")
        all_pass = all(r["pass"] for r in results)
        for r in results:
            tag = "PASS" if r["pass"] else "FAIL"
            if r["identity"] == "fpequiv":
                print(f"[{tag}] fpequiv p={r['p_values']}")
            else:
                print(
                    f"[{tag}] {r['identity']} ({r['domain']}, p={r['p']:g}): "
                    f"lhs={r['lhs']:.9g} rhs={r['rhs']:.9g} rel={r['rel_diff']:.3e}"
                )
        print(f"report -> {path}")
        return 0 if all_pass else 1
    except PDouglasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("pdouglas")
    except Exception:
        return "unknown"


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    kwargs = {k: v for k, v in vars(ns).items()}
    kwargs["g_csv"] = kwargs.pop("g_csv", None)
    cfg = RunConfig(**kwargs)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
