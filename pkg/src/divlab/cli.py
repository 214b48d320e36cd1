"""Command-line front end (``divlab``).

Exit status: 0 on success, 2 on a usage error, 1 on a runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field

from . import divisor, experiments, stochastic
from .svg import render_svg

DEFAULT_C = 1.0 / 12.0


@dataclass
class RunConfig:
    n_max: int = 10**5
    checkpoints: list[int] | None = None
    psi: experiments.PsiSpec = field(default_factory=experiments.PsiSpec)
    mu1w_constant: float = DEFAULT_C
    out_dir: str = "."
    seed: int = 0
    workers: int = 1
    fmt: str = "csv"

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("--n-max must be >= 1")
        if self.workers < 1:
            raise ValueError("--workers must be >= 1")


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _u64(text):
    v = int(text)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _psi(text):
    try:
        return experiments.PsiSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _checkpoints(text):
    try:
        return [_positive(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad checkpoint list {text!r}") from None


def _emit(obj, fmt):
    if fmt == "json":
        print(json.dumps(obj, indent=1))
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(obj.keys())
        w.writerow(obj.values())


def cmd_dn(args):
    print(divisor.d_brute(args.n) if args.brute else divisor.d_hyperbola(args.n))


def cmd_rn(args):
    r = divisor.remainder_r(args.n)
    _emit(
        {
            "n": args.n,
            "d": divisor.d_hyperbola(args.n),
            "r": r,
            "abs_r": abs(r),
            "s_centered": divisor.centered_frac_sum(args.n),
        },
        args.format,
    )


def cmd_sweep(args):
    cfg = RunConfig(
        n_max=args.n_max,
        checkpoints=args.checkpoints,
        mu1w_constant=args.c,
        out_dir=experiments.output_dir(args.out),
        workers=args.workers,
        fmt=args.format,
    )
    res = experiments.run_sweep(cfg.n_max, cfg.checkpoints, cfg.mu1w_constant, cfg.workers)
    os.makedirs(cfg.out_dir, exist_ok=True)
    write = experiments.write_json if cfg.fmt == "json" else experiments.write_csv
    rec_path = os.path.join(cfg.out_dir, f"records.{cfg.fmt}")
    agg_path = os.path.join(cfg.out_dir, f"aggregates.{cfg.fmt}")
    write(res, rec_path)
    write(res.aggregates, agg_path)
    if cfg.fmt == "json":
        # plot reads CSV; keep one next to the JSON output
        experiments.write_csv(res.aggregates, os.path.join(cfg.out_dir, "aggregates.csv"))
    a = res.aggregates
    print(f"wrote {rec_path} ({len(res)} records) and {agg_path}")
    for cp, dr, dw, sr, sw in a.rows():
        print(f"N={cp}\tDelta_R={dr:.6g}\tDelta_W={dw:.6g}\td_R={sr:.6g}\td_W={sw:.6g}")


def cmd_cov(args):
    spec = stochastic.CovarianceSpec.build(args.a, args.b)
    _emit(
        {
            "a": spec.a,
            "b": spec.b,
            "gcd": spec.g,
            "lcm": spec.l,
            "analytic": str(spec.analytic),
            "oracle": str(spec.oracle),
            "equal": spec.analytic == spec.oracle,
        },
        args.format,
    )


def cmd_toth(args):
    t = stochastic.toth_sum(args.m, args.method)
    _emit({"m": args.m, "method": args.method, "T": t, "T_over_m": t / args.m}, args.format)


def cmd_moments(args):
    m = stochastic.moment_summary(args.n)
    out = {
        "n": args.n,
        "s": m.s,
        "mu1_r": m.mu1_r,
        "mu2_r_exact": m.mu2_r_exact,
        "mu2_r_asym": m.mu2_r_asym,
        "toth": m.toth,
        "independent_variance": stochastic.independent_variance(args.n),
    }
    if args.samples:
        import numpy as np

        draws = stochastic.sample_w_deviations(args.n, stochastic.RngSeed(args.seed), args.samples)
        out["mc_mean"] = float(np.mean(draws))
        out["mc_variance"] = float(np.var(draws, ddof=1))
    _emit(out, args.format)


def cmd_kubilius(args):
    rep = experiments.kubilius_frequency(args.n_max, args.psi)
    out = experiments.summary_dict(rep)
    if args.format == "json":
        _emit(out, "json")
        return
    print(f"psi={rep.psi} n_max={rep.n_max}")
    print(f"centered   within={rep.count_within} frequency={rep.frequency:.6f}")
    print(f"uncentered within={rep.count_within_uncentered} frequency={rep.frequency_uncentered:.6f}")
    for lo, hi, within, total in rep.decades:
        print(f"  [{lo}, {hi}]\t{within}/{total}")


def cmd_uniformity(args):
    res = experiments.chi_square_residues(args.x, args.n_max)
    _emit(
        {
            "x": args.x,
            "n_max": args.n_max,
            "chi2": res.statistic,
            "dof": res.dof,
            "critical_99": res.critical,
            "flagged": res.flagged,
        },
        args.format,
    )


def cmd_fourier(args):
    if args.x is not None:
        v = divisor.fourier_centered_frac(args.n, args.x, args.k_max)
        exact = (args.n % args.x) / args.x - 0.5
        out = {"n": args.n, "x": args.x, "k_max": args.k_max, "series": v, "frac_minus_half": exact}
        if args.n % args.x == 0:
            out["note"] = "x divides n: the series tends to 0, not -1/2"
        _emit(out, args.format)
        return
    fr = divisor.fourier_remainder(args.n, args.k_max)
    _emit(
        {
            "n": fr.n,
            "k_max": fr.k_max,
            "raw": fr.raw,
            "divisor_terms": fr.divisor_terms,
            "corrected": fr.corrected,
            "centered_frac_sum": divisor.centered_frac_sum(args.n),
            "note": "raw misses -1/2 for each x dividing n; corrected adds them back",
        },
        args.format,
    )


def cmd_fit_c(args):
    _emit(experiments.summary_dict(experiments.constant_c_fit(args.n_max)), args.format)


def cmd_eq2_probe(args):
    p = experiments.eq2_factor_probe(args.n_max)
    out = experiments.summary_dict(p)
    out["verdict"] = p.verdict
    _emit(out, args.format)


def cmd_plot(args):
    out = args.output
    if out is None:
        out = os.path.join(experiments.output_dir(args.out), f"{args.kind}.svg")
    render_svg(args.aggregates, args.kind, out)
    print(f"wrote {out}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="divlab", description="Dirichlet divisor problem experiments")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    s = sub.add_parser("dn", parents=[common], help="divisor summatory function D(n)")
    s.add_argument("n", type=_positive)
    s.add_argument("--brute", action="store_true", help="O(n) direct sum")
    s.set_defaults(func=cmd_dn)

    s = sub.add_parser("rn", parents=[common], help="signed remainder R(n) and S(n)")
    s.add_argument("n", type=_positive)
    s.set_defaults(func=cmd_rn)

    s = sub.add_parser("sweep", parents=[common], help="D(n) vs mu1[W(n)] sweep")
    s.add_argument("--n-max", type=_positive, default=10**5)
    s.add_argument("--out", default=None, help="output directory (default $DIVLAB_OUT or .)")
    s.add_argument("--c", type=float, default=DEFAULT_C)
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--checkpoints", type=_checkpoints, default=None, help="comma-separated N values")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("cov", parents=[common], help="Cov(w_a, w_b), closed form and period oracle")
    s.add_argument("a", type=_positive)
    s.add_argument("b", type=_positive)
    s.set_defaults(func=cmd_cov)

    s = sub.add_parser("toth", parents=[common], help="sum of gcd/lcm over a, b <= m")
    s.add_argument("m", type=_positive)
    s.add_argument("--method", choices=("brute", "mobius"), default="mobius")
    s.set_defaults(func=cmd_toth)

    s = sub.add_parser("moments", parents=[common], help="model moments of S(n)")
    s.add_argument("n", type=_positive)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--samples", type=int, default=0, help="Monte Carlo draws (0 = none)")
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("kubilius", parents=[common], help="Kubilius frequency test")
    s.add_argument("--n-max", type=_positive, default=10**5)
    s.add_argument("--psi", type=_psi, default=experiments.PsiSpec())
    s.set_defaults(func=cmd_kubilius)

    s = sub.add_parser("uniformity", parents=[common], help="chi-square test of n mod x")
    s.add_argument("x", type=_positive)
    s.add_argument("--n-max", type=_positive, default=10**5)
    s.set_defaults(func=cmd_uniformity)

    s = sub.add_parser("fourier", parents=[common], help="sawtooth-series evaluation")
    s.add_argument("n", type=_positive)
    s.add_argument("--x", type=_positive, default=None)
    s.add_argument("--k-max", type=_positive, default=10**4)
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("fit-c", parents=[common], help="fit C in sum {n/x} ~ C isqrt(n)")
    s.add_argument("--n-max", type=_positive, default=10**5)
    s.set_defaults(func=cmd_fit_c)

    s = sub.add_parser("eq2-probe", parents=[common], help="regress S(n) on R(n)")
    s.add_argument("--n-max", type=_positive, default=10**5)
    s.set_defaults(func=cmd_eq2_probe)

    s = sub.add_parser("plot", help="render an aggregates CSV as SVG")
    s.add_argument("aggregates")
    s.add_argument("--kind", choices=tuple(("figure1", "figure2")), default="figure1")
    s.add_argument("--output", default=None)
    s.add_argument("--out", default=None, help="output directory when --output is absent")
    s.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (ValueError, OSError, OverflowError) as exc:
        print(f"divlab {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
