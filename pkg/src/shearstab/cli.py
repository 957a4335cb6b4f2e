"""Command-line front end.

Subcommands map one-to-one onto the library drivers:

* ``certify``        positivity certificate over the inflection set
* ``rayleigh-scan``  inviscid spectrum versus resolution
* ``sweep``          scaling-law sweeps (see ``sweep --help`` for kinds)
* ``pseudo``         resolvent norm over a shift rectangle
* ``airy-selftest``  kernel identities and frozen constants

Profiles are JSON, inline or in a file: {"family": "tanh_shear", "K": 2.0}.
Unknown keys are rejected.  Exit codes: 0 success/certified, 1 violated/not
certified, 2 inconclusive/degraded, 3 usage or invalid input.  All file
output is written atomically and is byte-stable across reruns.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .airy import (
    AI_AT_ZERO,
    AI_PRIME_AT_ZERO,
    TAIL_AT_ZERO,
    airy_ai,
    airy_ai_prime,
    airy_tail_integral,
    airy_zeros,
    rotation_identity_residual,
)
from .certify import certify_profile, rayleigh_spectrum_scan
from .profile import Profile, couette, cubic, polynomial, tanh_shear
from .spectral import pseudospectrum_grid
from .sweeps import (
    data_preset,
    l1_approximation_sweep,
    os_boundary_sweep,
    os_large_alpha_sweep,
    os_large_lambda_check,
    schrodinger_sweep,
    weighted_data_sweep,
)

__all__ = ["main", "profile_from_config"]


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # route usage problems to exit code 3
        raise _CliError(message)


_FAMILIES = {
    "couette": ((), lambda: couette()),
    "cubic": (("a",), lambda a: cubic(float(a))),
    "tanh_shear": (("K",), lambda k: tanh_shear(float(k))),
    "polynomial": (("coeffs",), lambda c: polynomial(tuple(float(v) for v in c))),
}


def profile_from_config(config: dict) -> Profile:
    """Build a profile from {"family": ..., <params>}, rejecting strays."""
    if not isinstance(config, dict):
        raise ValueError("profile config must be a JSON object")
    family = config.get("family")
    if family not in _FAMILIES:
        raise ValueError(
            f"unknown profile family {family!r}; expected one of {sorted(_FAMILIES)}"
        )
    keys, maker = _FAMILIES[family]
    stray = sorted(set(config) - {"family", *keys})
    if stray:
        raise ValueError(f"unknown profile keys {stray} for family {family!r}")
    missing = [k for k in keys if k not in config]
    if missing:
        raise ValueError(f"profile family {family!r} needs keys {missing}")
    return maker(*[config[k] for k in keys])


def _load_profile(source: str) -> tuple[Profile, dict]:
    text = source
    if not source.lstrip().startswith("{"):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    config = json.loads(text)
    return profile_from_config(config), config


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {
            (k if isinstance(k, str) else repr(k)): _jsonable(v)
            for k, v in obj.items()
        }
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".shearstab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_json(path: str, config: dict, result) -> None:
    document = {
        "tool": {"name": "shearstab", "version": __version__},
        "config": _jsonable(config),
        "result": _jsonable(result),
    }
    _write_atomic(path, json.dumps(document, sort_keys=True, indent=2) + "\n")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    return str(value)


def _emit_csv(path: str, header: list[str], rows: list[list]) -> None:
    import csv

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(v) for v in row])
    _write_atomic(path, buf.getvalue())


def _emit_plotdata(path: str, header: list[str], rows: list[list[float]]) -> None:
    """Whitespace-separated numeric table with a comment header (gnuplot)."""
    if not rows:
        raise ValueError("no rows to plot")
    lines = ["# " + " ".join(header)]
    for row in rows:
        lines.append(" ".join(_format_cell(v) for v in row))
    _write_atomic(path, "\n".join(lines) + "\n")


def _sweep_table(result) -> tuple[list[str], list[list]]:
    header = [
        "beta",
        "alpha",
        "lam_re",
        "lam_im",
        "n_used",
        "converged",
        "metric",
        "bound_ratio",
    ]
    rows = [
        [
            r.beta,
            r.alpha,
            r.lam.real,
            r.lam.imag,
            r.n_used,
            r.converged,
            r.metric,
            r.bound_ratio,
        ]
        for r in result.rows
    ]
    return header, rows


def _build_parser() -> _Parser:
    parser = _Parser(prog="shearstab", description=__doc__.splitlines()[0])
    parser.add_argument("--threads", type=int, default=None, help="worker threads")
    sub = parser.add_subparsers(dest="command", required=True)

    cert = sub.add_parser("certify", help="positivity certificate")
    cert.add_argument("profile", help="profile JSON (inline or file path)")
    cert.add_argument("--interval-density", type=int, default=33)
    cert.add_argument("--margin", type=float, default=1e-6)
    cert.add_argument("--json", dest="json_path")

    scan = sub.add_parser("rayleigh-scan", help="inviscid spectrum scan")
    scan.add_argument("profile")
    scan.add_argument("--alpha", type=float, default=1.0)
    scan.add_argument("--n-list", default="128,256,512")
    scan.add_argument("--json", dest="json_path")

    sweep = sub.add_parser("sweep", help="scaling-law sweeps")
    sweep.add_argument(
        "kind",
        choices=[
            "schrodinger",
            "l1-approx",
            "weighted",
            "os-boundary",
            "os-alpha",
            "os-lambda",
        ],
    )
    sweep.add_argument("profile")
    sweep.add_argument("--betas", default=None, help="comma-separated")
    sweep.add_argument("--beta", type=float, default=1e5)
    sweep.add_argument("--alpha", type=float, default=1.0)
    sweep.add_argument("--alphas", default=None, help="comma-separated")
    sweep.add_argument("--lam", default="0", help="complex literal, e.g. -0.1+0.2j")
    sweep.add_argument("--lams", default=None, help="comma-separated complex")
    sweep.add_argument("--fraction", type=float, default=0.5)
    sweep.add_argument("--data", choices=["exp", "affine", "trig"], default="exp")
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--json", dest="json_path")
    sweep.add_argument("--csv", dest="csv_path")
    sweep.add_argument("--plot", dest="plot_path")

    pseudo = sub.add_parser("pseudo", help="resolvent norm over a shift grid")
    pseudo.add_argument("profile")
    pseudo.add_argument(
        "--kind",
        choices=["schrodinger", "rayleigh_shifted", "orr_sommerfeld"],
        default="schrodinger",
    )
    pseudo.add_argument("--alpha", type=float, default=0.0)
    pseudo.add_argument("--beta", type=float, default=1e4)
    pseudo.add_argument("--mu-range", nargs=3, type=float, default=[-0.2, 0.2, 5],
                        metavar=("LO", "HI", "COUNT"))
    pseudo.add_argument("--nu-range", nargs=3, type=float, default=[-1.0, 1.0, 5],
                        metavar=("LO", "HI", "COUNT"))
    pseudo.add_argument("--json", dest="json_path")
    pseudo.add_argument("--csv", dest="csv_path")

    selftest = sub.add_parser("airy-selftest", help="kernel identity checks")
    selftest.add_argument("--seed", type=int, default=20260819)
    selftest.add_argument("--json", dest="json_path")
    return parser


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _run_certify(args) -> int:
    profile, config = _load_profile(args.profile)
    result = certify_profile(
        profile,
        interval_density=args.interval_density,
        margin=args.margin,
        threads=args.threads,
    )
    print(
        f"verdict={result.verdict} sigma0={result.sigma0!r} "
        f"margin={result.margin!r} velocities={len(result.entries)}"
    )
    if args.json_path:
        _emit_json(
            args.json_path,
            {
                "command": "certify",
                "profile": config,
                "interval_density": args.interval_density,
                "margin": args.margin,
            },
            result,
        )
    return {"certified": 0, "not_certified": 1, "inconclusive": 2}[result.verdict]


def _run_rayleigh_scan(args) -> int:
    profile, config = _load_profile(args.profile)
    n_list = tuple(int(v) for v in args.n_list.split(",") if v.strip())
    result = rayleigh_spectrum_scan(profile, args.alpha, n_list=n_list)
    distances = ", ".join(repr(d) for d in result.max_distances)
    print(
        f"segment=[{result.segment[0]!r}, {result.segment[1]!r}] "
        f"max_distances=[{distances}] "
        f"monotone={result.monotone} persistent={len(result.persistent_offsets)}"
    )
    if args.json_path:
        _emit_json(
            args.json_path,
            {
                "command": "rayleigh-scan",
                "profile": config,
                "alpha": args.alpha,
                "n_list": list(n_list),
            },
            result,
        )
    if result.persistent_offsets:
        return 1
    return 0 if result.monotone else 2


def _run_sweep(args) -> int:
    profile, config = _load_profile(args.profile)
    lam = complex(args.lam)
    data = data_preset(args.data, seed=args.seed) if args.data != "exp" or args.seed else None
    betas = _parse_floats(args.betas) if args.betas else None
    if args.kind == "schrodinger":
        kwargs = {"lam": lam, "margin_fraction": args.fraction}
        if betas:
            kwargs["betas"] = betas
        result = schrodinger_sweep(profile, **kwargs)
    elif args.kind == "l1-approx":
        kwargs = {"lam": lam, "data": data}
        if betas:
            kwargs["betas"] = betas
        result = l1_approximation_sweep(profile, **kwargs)
    elif args.kind == "weighted":
        kwargs = {"lam": lam, "data": data}
        if betas:
            kwargs["betas"] = betas
        result = weighted_data_sweep(profile, **kwargs)
    elif args.kind == "os-boundary":
        kwargs = {"alpha": args.alpha, "margin_fraction": args.fraction}
        if betas:
            kwargs["betas"] = betas
        result = os_boundary_sweep(profile, **kwargs)
    elif args.kind == "os-alpha":
        if not args.alphas:
            raise _CliError("os-alpha needs --alphas")
        result = os_large_alpha_sweep(
            profile,
            _parse_floats(args.alphas),
            args.beta,
            margin_fraction=args.fraction,
        )
    else:
        kwargs = {"alpha": args.alpha, "beta": args.beta}
        if args.lams:
            kwargs["lams"] = [complex(v) for v in args.lams.split(",") if v.strip()]
        result = os_large_lambda_check(profile, **kwargs)

    slope = repr(result.fit.slope) if result.fit else "n/a"
    print(
        f"kind={result.kind} rows={len(result.rows)} slope={slope} "
        f"span={result.span!r} bound_ratio_max={result.bound_ratio_max!r} "
        f"converged={result.converged_fraction!r} checks={sorted(result.checks.items())}"
    )
    resolved = {
        "command": "sweep",
        "kind": args.kind,
        "profile": config,
        "lam": {"re": lam.real, "im": lam.imag},
        "fraction": args.fraction,
        "data": args.data,
        "seed": args.seed,
    }
    if betas:
        resolved["betas"] = betas
    header, rows = _sweep_table(result)
    if args.json_path:
        _emit_json(args.json_path, resolved, result)
    if args.csv_path:
        _emit_csv(args.csv_path, header, rows)
    if args.plot_path:
        _emit_plotdata(args.plot_path, header, rows)
    if result.degraded:
        return 2
    return 0 if all(result.checks.values()) else 1


def _run_pseudo(args) -> int:
    profile, config = _load_profile(args.profile)
    mu_lo, mu_hi, mu_n = args.mu_range
    nu_lo, nu_hi, nu_n = args.nu_range
    mu_values = np.linspace(mu_lo, mu_hi, int(mu_n))
    nu_values = np.linspace(nu_lo, nu_hi, int(nu_n))
    grid = pseudospectrum_grid(
        profile,
        args.kind,
        args.alpha,
        args.beta,
        mu_values,
        nu_values,
        threads=args.threads,
    )
    n_conv = sum(s.converged for s in grid.samples)
    print(
        f"kind={grid.kind} points={len(grid.samples)} converged={n_conv} "
        f"max_norm={float(np.max(grid.norms))!r}"
    )
    if args.json_path:
        _emit_json(
            args.json_path,
            {
                "command": "pseudo",
                "profile": config,
                "kind": args.kind,
                "alpha": args.alpha,
                "beta": args.beta,
                "mu_range": list(args.mu_range),
                "nu_range": list(args.nu_range),
            },
            grid,
        )
    if args.csv_path:
        header = ["mu", "nu", "norm_inv", "norm_d_inv", "n_used", "converged"]
        rows = [
            [s.lam.real, s.lam.imag, s.norm_inv, s.norm_d_inv, s.n_used, s.converged]
            for s in grid.samples
        ]
        _emit_csv(args.csv_path, header, rows)
    return 0 if n_conv == len(grid.samples) else 2


def _run_airy_selftest(args) -> int:
    rng = np.random.default_rng(args.seed)
    radius = 8.0 * np.sqrt(rng.random(100))
    angle = 2.0 * math.pi * rng.random(100)
    points = radius * np.exp(1j * angle)
    rotation_worst = max(rotation_identity_residual(z) for z in points)
    zeros = airy_zeros(10)
    zero_worst = float(np.max(np.abs(airy_ai(zeros))))
    report = {
        "ai_at_zero_error": abs(complex(airy_ai(0.0)) - AI_AT_ZERO),
        "ai_prime_at_zero_error": abs(complex(airy_ai_prime(0.0)) - AI_PRIME_AT_ZERO),
        "tail_at_zero_error": abs(airy_tail_integral(0.0) - TAIL_AT_ZERO),
        "rotation_identity_worst": rotation_worst,
        "zero_residual_worst": zero_worst,
    }
    thresholds = {
        "ai_at_zero_error": 1e-12,
        "ai_prime_at_zero_error": 1e-12,
        "tail_at_zero_error": 1e-10,
        "rotation_identity_worst": 1e-11,
        "zero_residual_worst": 1e-12,
    }
    passed = all(report[k] <= thresholds[k] for k in report)
    for key in sorted(report):
        print(f"{key}={report[key]!r} (tol {thresholds[key]!r})")
    print(f"selftest={'pass' if passed else 'FAIL'}")
    if args.json_path:
        _emit_json(
            args.json_path,
            {"command": "airy-selftest", "seed": args.seed},
            {"report": report, "thresholds": thresholds, "passed": passed},
        )
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "certify":
            return _run_certify(args)
        if args.command == "rayleigh-scan":
            return _run_rayleigh_scan(args)
        if args.command == "sweep":
            return _run_sweep(args)
        if args.command == "pseudo":
            return _run_pseudo(args)
        return _run_airy_selftest(args)
    except (_CliError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"shearstab: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
