"""Command-line surface: build, validate, simulate, analyze.

Batch-oriented; every simulate run is fully determined by its flags plus
``--seed`` and prints the configuration digest it persists with.  Exit
codes: 0 success, 1 validation failure, 2 usage/parameter error, 3 I/O
error.  The ``QSAGMS_LOG`` environment variable (error, info, debug,
trace) controls logging verbosity.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    alpha_star_approx,
    alpha_star_exact,
    delta_alpha,
    op_count,
    sample_transfer_curve,
    write_curve,
)
from .code import (
    CodeFormatError,
    GbSpec,
    OrthogonalityError,
    build_gb,
    compute_params,
    load_code,
    save_code,
    tanner_graph,
)
from .decoder import DecoderConfig, GainParams
from .harness import SweepConfig, config_digest, run_sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3

TRACE_LEVEL = 5
logging.addLevelName(TRACE_LEVEL, "TRACE")
_LOG_LEVELS = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
    "trace": TRACE_LEVEL,
}

log = logging.getLogger("qsagms.cli")


class UsageError(ValueError):
    """Bad flag combination or parameter value (exit code 2)."""


def _setup_logging() -> None:
    name = os.environ.get("QSAGMS_LOG", "error").lower()
    level = _LOG_LEVELS.get(name)
    if level is None:
        print(f"warning: unknown QSAGMS_LOG level {name!r}", file=sys.stderr)
        level = logging.ERROR
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _parse_exponents(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _parse_float_list(text: str, log_spaced: bool) -> tuple[float, ...]:
    """Comma list, or start:stop:count range (log-spaced for noise grids)."""
    import numpy as np

    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be start:stop:count, got {text!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError(f"bad range {text!r}") from None
        if count < 1:
            raise UsageError("range count must be at least 1")
        if count == 1:
            return (start,)
        if log_spaced:
            if start <= 0 or stop <= 0:
                raise UsageError("log-spaced range needs positive endpoints")
            values = np.geomspace(start, stop, count)
        else:
            values = np.linspace(start, stop, count)
        return tuple(float(v) for v in values)
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated floats, got {text!r}") from None


def cmd_build_code(args) -> int:
    try:
        spec = GbSpec(
            ell=args.ell,
            a_exponents=_parse_exponents(args.a),
            b_exponents=_parse_exponents(args.b),
        )
        H = build_gb(spec)
    except (ValueError, OrthogonalityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        save_code(H, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(compute_params(H))
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        H = load_code(args.code, validate=True)
    except FileNotFoundError:
        print(f"error: no such file: {args.code}", file=sys.stderr)
        return EXIT_IO
    except CodeFormatError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OrthogonalityError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(compute_params(H))
    return EXIT_OK


def _decoder_config(args) -> DecoderConfig:
    variant = args.decoder
    if variant == "sms":
        return DecoderConfig(
            variant="sms", l_max=args.lmax, alpha=args.alpha, vn_mode=args.vn_mode
        )
    if variant == "sagms":
        try:
            gain = GainParams(
                alpha_min=args.alpha_min,
                alpha_max=args.alpha_max,
                eta_unsat=args.eta,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return DecoderConfig(
            variant="sagms", l_max=args.lmax, gain=gain, vn_mode=args.vn_mode
        )
    return DecoderConfig(variant=variant, l_max=args.lmax, vn_mode=args.vn_mode)


def cmd_simulate(args) -> int:
    try:
        epsilons = _parse_float_list(args.eps, log_spaced=True)
        if args.eps0 == "matched":
            mode, eps0 = "matched", None
        else:
            try:
                mode, eps0 = "fixed", float(args.eps0)
            except ValueError:
                raise UsageError(
                    f"--eps0 must be 'matched' or a float, got {args.eps0!r}"
                ) from None
        decoder = _decoder_config(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        H = load_code(args.code, validate=True)
    except FileNotFoundError:
        print(f"error: no such file: {args.code}", file=sys.stderr)
        return EXIT_IO
    except (CodeFormatError, OrthogonalityError) as exc:
        print(f"error: invalid code file: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    code_sha = hashlib.sha256(Path(args.code).read_bytes()).hexdigest()
    try:
        cfg = SweepConfig(
            code_id=f"{Path(args.code).name}:{code_sha[:16]}",
            decoder=decoder,
            epsilon_list=epsilons,
            seed=args.seed,
            epsilon0_mode=mode,
            epsilon0=eps0,
            target_failures=args.target_failures,
            max_frames=args.max_frames,
            workers=args.threads,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    digest = config_digest(cfg)
    print(f"config digest: {digest}")
    graph = tanner_graph(H)
    try:
        points = run_sweep(H, graph, cfg, out_dir=args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in points:
        cap = " CAP-HIT" if p.cap_hit else ""
        print(
            f"eps={p.epsilon:.6g} fer={p.fer:.6g} "
            f"wilson95=[{p.wilson_low:.6g}, {p.wilson_high:.6g}] "
            f"failures={p.failures} frames={p.frames} "
            f"mean_iters={p.mean_iterations:.3f}{cap}"
        )
    print(f"results written to {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    try:
        if args.mode == "transfer":
            return _analyze_transfer(args)
        if args.mode == "alpha-star":
            for d_c in _parse_exponents(args.dc):
                if d_c < 2:
                    raise UsageError("d_c must be at least 2")
                print(
                    f"dc={d_c} alpha_star_approx={alpha_star_approx(args.L0, d_c):.6g} "
                    f"alpha_star_exact={alpha_star_exact(args.L0, d_c):.6g}"
                )
            return EXIT_OK
        if args.mode == "delta-alpha":
            value = delta_alpha(args.L0, args.dc_ref, args.dc_new)
            print(f"delta_alpha={value:.6g}")
            return EXIT_OK
        if args.mode == "opcount":
            print("variant adds muls cmps trans weighted")
            for variant in ("bp4", "ms", "sms", "sagms"):
                c = op_count(variant, args.dc)
                print(
                    f"{variant} {c.adds} {c.muls} {c.cmps} "
                    f"{c.transcendentals} {c.weighted_total}"
                )
            return EXIT_OK
        raise UsageError(f"unknown analyze mode {args.mode!r}")
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _analyze_transfer(args) -> int:
    kappas = _parse_float_list(args.kappa, log_spaced=False)
    curves = [
        ("ms", sample_transfer_curve("ms", kappas)),
        ("sms", sample_transfer_curve("sms", kappas, gain=args.alpha)),
        ("sagms", sample_transfer_curve("sagms", kappas, gain=args.alpha_eff)),
        ("bp4", sample_transfer_curve("bp4", kappas, d_c=args.dc)),
    ]
    if args.out:
        prefix = Path(args.out)
        try:
            prefix.parent.mkdir(parents=True, exist_ok=True)
            for name, curve in curves:
                with open(f"{prefix}_{name}.txt", "w", encoding="utf-8") as fh:
                    write_curve(curve.samples, fh)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {len(curves)} curves to {prefix}_*.txt")
    else:
        for name, curve in curves:
            print(f"# variant={name}")
            write_curve(curve.samples, sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsagms",
        description="Quantum LDPC min-sum decoding with syndrome-adaptive gain",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser(
        "build-code", help="construct a generalized bicycle code file",
        formatter_class=fmt,
    )
    p.add_argument("--ell", type=int, required=True, help="circulant size")
    p.add_argument("--a", required=True, help="exponents of a(x), e.g. 0,1")
    p.add_argument("--b", required=True, help="exponents of b(x), e.g. 0,2")
    p.add_argument("--out", required=True, help="output code file")
    p.set_defaults(func=cmd_build_code)

    p = sub.add_parser(
        "validate", help="check a code file's invariants", formatter_class=fmt
    )
    p.add_argument("code", help="code file to validate")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser(
        "simulate", help="Monte Carlo frame-error-rate sweep", formatter_class=fmt
    )
    p.add_argument("--code", required=True, help="code file")
    p.add_argument(
        "--decoder", required=True, choices=("bp4", "ms", "sms", "sagms")
    )
    p.add_argument(
        "--eps", required=True,
        help="noise levels: comma list or log-spaced start:stop:count",
    )
    p.add_argument(
        "--eps0", default="matched",
        help="decoder prior rate: 'matched' or a fixed value",
    )
    p.add_argument("--lmax", type=int, default=8, help="iteration budget")
    p.add_argument("--alpha", type=float, default=0.50, help="sms scaling factor")
    p.add_argument("--alpha-min", type=float, default=0.30, help="sagms ramp floor")
    p.add_argument("--alpha-max", type=float, default=0.50, help="sagms ramp ceiling")
    p.add_argument(
        "--eta", type=float, default=1.10, help="sagms unsatisfied-check boost"
    )
    p.add_argument(
        "--vn-mode", default="marginal", choices=("marginal", "additive"),
        help="qubit-node update rule",
    )
    p.add_argument(
        "--target-failures", type=int, default=500,
        help="stop a point after this many failures",
    )
    p.add_argument(
        "--max-frames", type=int, default=20_000_000,
        help="frame cap per point",
    )
    p.add_argument(
        "--seed", type=int, required=True,
        help="master seed (required; all randomness derives from it)",
    )
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out", default="results", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser(
        "analyze", help="analytical curves and tables", formatter_class=fmt
    )
    asub = p.add_subparsers(dest="mode", required=True)

    t = asub.add_parser(
        "transfer", help="check-node transfer curves", formatter_class=fmt
    )
    t.add_argument("--dc", type=int, default=4, help="check degree for the bp4 curve")
    t.add_argument("--alpha", type=float, default=0.85, help="sms gain")
    t.add_argument("--alpha-eff", type=float, default=0.65, help="sagms effective gain")
    t.add_argument(
        "--kappa", default="0.05:3:20",
        help="kappa grid: comma list or linear start:stop:count",
    )
    t.add_argument("--out", default=None, help="output file prefix (default stdout)")
    t.set_defaults(func=cmd_analyze)

    a = asub.add_parser(
        "alpha-star", help="matching-ratio table", formatter_class=fmt
    )
    a.add_argument("--L0", type=float, required=True, help="prior LLR")
    a.add_argument("--dc", required=True, help="comma list of check degrees")
    a.set_defaults(func=cmd_analyze)

    d = asub.add_parser(
        "delta-alpha", help="degree-mismatch penalty", formatter_class=fmt
    )
    d.add_argument("--L0", type=float, required=True, help="prior LLR")
    d.add_argument("--dc-ref", type=int, required=True, help="reference check degree")
    d.add_argument("--dc-new", type=int, required=True, help="new check degree")
    d.set_defaults(func=cmd_analyze)

    o = asub.add_parser(
        "opcount", help="operation counts per check-node update", formatter_class=fmt
    )
    o.add_argument("--dc", type=int, required=True, help="check degree")
    o.set_defaults(func=cmd_analyze)

    p = sub.add_parser("version", help="print the package version")
    p.set_defaults(func=lambda args: print(__version__) or EXIT_OK)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
