"""Command-line entry point.

Subcommands: ``hc`` (emit a hyperbolic cross), ``lattice`` (search or verify
a reconstructing lattice), ``approx`` (one-shot error for a configuration),
``sweep`` (full experiment: CSV and figure), ``selftest`` (quick oracle
checks).  Exit codes: 0 success, 1 usage error, 2 numerical/search failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import DomainError, LatcubeError, LatticeSearchError, ResourceLimitError
from .experiment import ExperimentConfig, random_coefficients, run_sweep, write_csv
from .freqset import difference_set, from_indices, hyperbolic_cross, write_frequency_set
from .lattice import (
    find_reconstructing_lattice,
    is_reconstructing,
    lattice_to_line,
    parse_lattice_option,
)
from .plotting import render_plot
from .spectral import dft_forward, evaluate_at_lattice, reconstruct_from_lattice
from .transforms import parse_product_transform

USAGE_ERROR = 1
FAILURE = 2


def _out_stream(path: str):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="ascii", newline=""), True


def _parse_n_range(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) == 2:
        parts.append("1")
    if len(parts) != 3:
        raise DomainError(f"N range must look like 'a:b:s', got {text!r}")
    try:
        a, b, s = (int(p) for p in parts)
    except ValueError:
        raise DomainError(f"N range must be integers, got {text!r}") from None
    return a, b, s


def _cmd_hc(args) -> int:
    I = hyperbolic_cross(args.dim, args.N, cap=args.cap)
    stream, close = _out_stream(args.out)
    try:
        write_frequency_set(I, stream)
    finally:
        if close:
            stream.close()
    return 0


def _cmd_lattice(args) -> int:
    I = hyperbolic_cross(args.dim, args.N)
    if args.lattice:
        lat = parse_lattice_option(args.lattice)
        ok = is_reconstructing(lat, I)
        print(f"{lattice_to_line(lat)} {'reconstructing' if ok else 'not-reconstructing'}")
        return 0 if ok else FAILURE
    floor = math.ceil(args.oversample * len(I))
    strategy = args.strategy if args.strategy != "auto" else ("korobov" if args.dim <= 2 else "cbc")
    lat = find_reconstructing_lattice(I, strategy=strategy, min_size=floor)
    stream, close = _out_stream(args.out)
    try:
        stream.write(lattice_to_line(lat) + "\n")
    finally:
        if close:
            stream.close()
    return 0


def _experiment_config(args, n_range: tuple[int, int, int]) -> ExperimentConfig:
    fields = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            fields = json.load(fh)
        if not isinstance(fields, dict):
            raise DomainError(f"config file {args.config} must hold a JSON object")
        if "N_range" in fields:
            fields["N_range"] = tuple(fields["N_range"])
    overrides = {
        "dim": args.dim,
        "test_function": args.function,
        "transform": args.transform,
        "oversampling_factor": args.oversample,
        "seed": args.seed,
        "strategy": args.strategy,
        "record_timing": getattr(args, "timing", False) or None,
    }
    if n_range is not None:
        overrides["N_range"] = n_range
    for key, value in overrides.items():
        if value is not None:
            fields[key] = value
    if "dim" not in fields:
        raise DomainError("a dimension is required (--dim or config file)")
    fields.setdefault("record_timing", False)
    try:
        return ExperimentConfig(**fields)
    except TypeError as exc:
        raise DomainError(f"bad config field: {exc}") from exc


def _cmd_approx(args) -> int:
    if args.N is None and args.config is None:
        raise DomainError("approx needs --N (or a config file with N_range)")
    n_range = (args.N, args.N, 1) if args.N is not None else None
    cfg = _experiment_config(args, n_range)
    lattice = parse_lattice_option(args.lattice) if args.lattice else None
    rows = run_sweep(cfg, lattice=lattice)
    if not rows:
        print("no result row (all budgets skipped)", file=sys.stderr)
        return FAILURE
    stream, close = _out_stream(args.out)
    try:
        write_csv(rows, stream)
    finally:
        if close:
            stream.close()
    return 0


def _cmd_sweep(args) -> int:
    if args.n_range is None and args.config is None:
        raise DomainError("sweep needs --N-range (or a config file with N_range)")
    n_range = _parse_n_range(args.n_range) if args.n_range is not None else None
    cfg = _experiment_config(args, n_range)
    rows = run_sweep(cfg)
    if not rows:
        print("no result rows (all budgets skipped)", file=sys.stderr)
        return FAILURE
    out = args.out if args.out is not None else cfg.output_path
    wants_csv = args.format in ("csv", "both")
    wants_svg = args.format in ("svg", "both")
    if out in (None, "-"):
        if wants_svg:
            raise DomainError("figure output needs a file path (--out PATH)")
        write_csv(rows, sys.stdout)
        return 0
    base = out
    for suffix in (".csv", ".svg"):
        if base.endswith(suffix):
            base = base[: -len(suffix)]
    label = cfg.product_transform().label()
    if wants_csv:
        write_csv(rows, base + ".csv")
    if wants_svg:
        render_plot({label: rows}, base + ".svg",
                    title=f"{cfg.test_function}, d={cfg.dim}")
    return 0


def _selftest_checks():
    import itertools

    def check_cross():
        got = len(hyperbolic_cross(2, 16))
        box = sum(
            1
            for k in itertools.product(range(-16, 17), repeat=2)
            if max(1, abs(k[0])) * max(1, abs(k[1])) <= 16
        )
        return got == box == 265 and len(hyperbolic_cross(1, 4)) == 9

    def check_dft():
        rng = np.random.default_rng(7)
        for M in (16, 97):
            v = rng.standard_normal(M) + 1j * rng.standard_normal(M)
            naive = np.asarray(
                [sum(v[j] * np.exp(-2j * np.pi * l * j / M) for j in range(M)) for l in range(M)]
            )
            if np.max(np.abs(dft_forward(v) - naive)) > 1e-10:
                return False
        return True

    def check_roundtrip():
        I = hyperbolic_cross(2, 8)
        lat = find_reconstructing_lattice(I)
        c = random_coefficients(I, 11)
        rec = reconstruct_from_lattice(evaluate_at_lattice(c, lat), I, lat)
        return float(np.max(np.abs(rec.values - c.values))) < 1e-10

    def check_reconstruction_oracle():
        rng = np.random.default_rng(3)
        from .lattice import Rank1Lattice

        for _ in range(20):
            d = int(rng.integers(1, 4))
            rows = rng.integers(-4, 5, size=(int(rng.integers(2, 20)), d))
            I = from_indices(d, rows)
            M = int(rng.integers(len(I), 4 * len(I) + 2))
            lat = Rank1Lattice(rng.integers(0, M, size=d), M)
            D = difference_set(I)
            literal = all(
                (np.dot(t, lat.z) % M) != 0 for t in D if any(v != 0 for v in t)
            )
            if literal != is_reconstructing(lat, I):
                return False
        return True

    def check_transforms():
        specs = ["sine", "id", "log:2", "log:4", "erf:2"]
        for s in specs:
            t = parse_product_transform(s).components[0]
            x = np.linspace(-0.49, 0.49, 41)
            fd = (t.forward(x + 1e-6) - t.forward(x - 1e-6)) / 2e-6
            if np.max(np.abs(fd - t.derivative(x)) / np.abs(t.derivative(x))) > 1e-5:
                return False
            if np.max(np.abs(t.inverse(t.forward(x)) - x)) > 1e-10:
                return False
        return True

    return [
        ("hyperbolic-cross-vs-box-scan", check_cross),
        ("dft-vs-naive", check_dft),
        ("evaluate-reconstruct-roundtrip", check_roundtrip),
        ("reconstruction-vs-difference-set", check_reconstruction_oracle),
        ("transform-derivative-and-inverse", check_transforms),
    ]


def _cmd_selftest(_args) -> int:
    failed = 0
    for name, fn in _selftest_checks():
        try:
            ok = fn()
        except Exception as exc:  # a crash is a failure, not a usage error
            print(f"FAIL {name} ({exc})")
            failed += 1
            continue
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        failed += 0 if ok else 1
    return 0 if failed == 0 else FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latcube",
        description="Approximation on the cube via torus-to-cube periodization "
        "and rank-1 lattice FFT methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_hc = sub.add_parser("hc", help="emit a hyperbolic cross frequency set")
    p_hc.add_argument("--dim", type=int, required=True)
    p_hc.add_argument("--N", type=int, required=True)
    p_hc.add_argument("--cap", type=int, default=100_000_000)
    p_hc.add_argument("--out", default="-")
    p_hc.set_defaults(handler=_cmd_hc)

    p_lat = sub.add_parser("lattice", help="search or verify a reconstructing lattice")
    p_lat.add_argument("--dim", type=int, required=True)
    p_lat.add_argument("--N", type=int, required=True)
    p_lat.add_argument("--strategy", choices=("auto", "korobov", "cbc"), default="auto")
    p_lat.add_argument("--oversample", type=float, default=1.0)
    p_lat.add_argument("--lattice", help="verify this lattice (form M:z1,z2,...)")
    p_lat.add_argument("--out", default="-")
    p_lat.set_defaults(handler=_cmd_lattice)

    def add_experiment_flags(p):
        p.add_argument("--dim", type=int)
        p.add_argument("--function", choices=("quad", "sum", "poly"))
        p.add_argument("--transform", help="e.g. log:4 | erf:2.5 | sine | id | log:4,sine | log:4^3")
        p.add_argument("--oversample", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--strategy", choices=("auto", "korobov", "cbc"))
        p.add_argument("--lattice", help="bypass the search (form M:z1,z2,...)")
        p.add_argument("--config", help="JSON file with ExperimentConfig fields")
        p.add_argument("--out", default=None)

    p_apx = sub.add_parser("approx", help="one-shot relative discrete error")
    add_experiment_flags(p_apx)
    p_apx.add_argument("--N", type=int)
    p_apx.set_defaults(handler=_cmd_approx)

    p_sweep = sub.add_parser("sweep", help="full experiment: CSV and figure")
    add_experiment_flags(p_sweep)
    p_sweep.add_argument("--N-range", dest="n_range", help="inclusive range a:b:s")
    p_sweep.add_argument("--format", choices=("csv", "svg", "both"), default="both")
    p_sweep.add_argument("--timing", action="store_true",
                         help="record per-row wall time (CSV no longer byte-reproducible)")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_self = sub.add_parser("selftest", help="run the quick oracle-equivalence checks")
    p_self.set_defaults(handler=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else USAGE_ERROR
    try:
        return args.handler(args)
    except (DomainError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return USAGE_ERROR
    except (LatticeSearchError, LatcubeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":
    sys.exit(main())
