"""Command-line front end.

Subcommands:

* ``expansion-study`` -- supremum-error curves over a nu range, CSV plus a
  plot-data companion and rendered figures.
* ``moments`` -- closed-form vs Monte Carlo trace moments.
* ``metrics`` -- TV / Hellinger estimates with the C = 1 bounds.
* ``sample`` -- raw matrix-T draws, one vectorized row per line.

Exit codes: 0 success, 2 usage error, 3 input/parse error, 4 numerical
failure.  All outputs are UTF-8 with LF line endings and are byte-identical
across reruns with the same configuration and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .matcore import NumericalError, SpdMatrix, TParams, fmt_float, load_spd
from .expansion import error_exponent_curve, nu_progression
from .metrics import (
    MetricRow,
    hellinger_monte_carlo,
    hellinger_quadrature_1d,
    metric_bound,
    tv_monte_carlo,
    tv_quadrature_1d,
    write_metric_csv,
)
from .stochastic import sample_matrix_t, verify_trace_moments, worker_rngs, write_moment_csv

__all__ = ["main"]

#: Types used when a key=value config file supplies flag defaults.
_CONFIG_TYPES = {
    "d": int,
    "m": int,
    "sigma": str,
    "omega": str,
    "nu_min": float,
    "nu_max": float,
    "nu_step": float,
    "grid": int,
    "samples": int,
    "seed": int,
    "workers": int,
    "out": str,
    "k": str,
    "constant": float,
}


def _derive_seed(seed: int, index: int) -> int:
    """Deterministic per-row seed from the master seed."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1, np.uint64)[0])


def _read_config(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_TYPES[key](value.strip())
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key!r}") from exc
    return values


def _add_common(sub: argparse.ArgumentParser, *, sampling: bool) -> None:
    sub.add_argument("--config", type=str, default=None, help="key=value file of flag defaults")
    sub.add_argument("--d", type=int, default=None, help="row dimension (default: from --sigma)")
    sub.add_argument("--m", type=int, default=None, help="column dimension (default: from --omega)")
    sub.add_argument("--sigma", type=str, default=None, help="row scale matrix file (default: identity)")
    sub.add_argument("--omega", type=str, default=None, help="column scale matrix file (default: identity)")
    sub.add_argument("--nu-min", type=float, required=True, help="first degrees-of-freedom value")
    sub.add_argument("--nu-max", type=float, default=None, help="last value (default: --nu-min)")
    sub.add_argument("--nu-step", type=float, default=5.0, help="progression step (default: 5)")
    sub.add_argument("--workers", type=int, default=1, help="Monte Carlo worker substreams")
    sub.add_argument("--out", type=str, required=True, help="output file path")
    if sampling:
        sub.add_argument("--samples", type=int, required=True, help="number of Monte Carlo draws")
        sub.add_argument("--seed", type=int, default=0, help="64-bit generator seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtxt",
        description="Matrix-variate T vs matrix-normal: expansions, moments, metrics.",
    )
    parser.add_argument("--version", action="version", version=f"mtxt {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    study = commands.add_parser("expansion-study", help="supremum-error decay study")
    _add_common(study, sampling=False)
    study.add_argument("--grid", type=int, default=128, help="grid points per spectral axis")
    study.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    moments = commands.add_parser("moments", help="trace-moment verification")
    _add_common(moments, sampling=True)
    moments.add_argument("--k", choices=("1", "2", "both"), default="both", help="which trace powers")

    metrics = commands.add_parser("metrics", help="TV / Hellinger estimation")
    _add_common(metrics, sampling=True)
    metrics.add_argument("--constant", type=float, default=1.0, help="bound constant C")
    metrics.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    sample = commands.add_parser("sample", help="export matrix-T draws")
    _add_common(sample, sampling=True)
    return parser


def _resolve_params(args, nu: float) -> TParams:
    if args.sigma is not None:
        sigma = load_spd(args.sigma)
        if args.d is not None and args.d != sigma.dim:
            raise ValueError(f"--d {args.d} conflicts with {args.sigma} (dim {sigma.dim})")
    else:
        if args.d is None:
            raise ValueError("either --d or --sigma is required")
        sigma = SpdMatrix(np.eye(args.d))
    if args.omega is not None:
        omega = load_spd(args.omega)
        if args.m is not None and args.m != omega.dim:
            raise ValueError(f"--m {args.m} conflicts with {args.omega} (dim {omega.dim})")
    else:
        if args.m is None:
            raise ValueError("either --m or --omega is required")
        omega = SpdMatrix(np.eye(args.m))
    return TParams(nu=nu, sigma=sigma, omega=omega)


def _nus(args) -> np.ndarray:
    nu_max = args.nu_max if args.nu_max is not None else args.nu_min
    return nu_progression(args.nu_min, nu_max, args.nu_step)


def _write_text(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _matrix_inline(mat: SpdMatrix) -> str:
    return ";".join(",".join(fmt_float(v) for v in row) for row in mat.values)


def _cmd_expansion_study(args) -> int:
    nus = _nus(args)
    params = _resolve_params(args, float(nus[0]))
    curve = error_exponent_curve(params, float(nus[0]), float(nus[-1]), args.nu_step, args.grid)
    out = Path(args.out)
    curve.to_csv(out)

    base = out.with_suffix("")
    plotdata = [
        f"# command=expansion-study d={params.d} m={params.m} "
        f"nu=[{fmt_float(nus[0])},{fmt_float(nus[-1])}] step={fmt_float(args.nu_step)} "
        f"grid={args.grid} workers={args.workers}",
        "# block: inverse errors (log-log axes: nu, 1/E0, 1/E1, 1/E2)",
    ]
    for nu, e0, e1, e2 in zip(curve.nu, curve.e0, curve.e1, curve.e2):
        plotdata.append(" ".join(fmt_float(v) for v in (nu, 1.0 / e0, 1.0 / e1, 1.0 / e2)))
    plotdata.append("")
    plotdata.append("# block: exponents (axes: nu, exp0, exp1, exp2)")
    for nu, x0, x1, x2 in zip(curve.nu, curve.exp0, curve.exp1, curve.exp2):
        plotdata.append(" ".join(fmt_float(v) for v in (nu, x0, x1, x2)))
    _write_text(base.parent / (base.name + ".plotdata.txt"), plotdata)

    if not args.no_figures:
        from .figures import plot_exponents, plot_inverse_errors

        plot_inverse_errors(curve, base.parent / (base.name + ".inverse_errors.png"))
        plot_exponents(curve, base.parent / (base.name + ".exponents.png"))
    return 0


def _cmd_moments(args) -> int:
    nus = _nus(args)
    ks = {"1": (1,), "2": (2,), "both": (1, 2)}[args.k]
    if 2 in ks and any(nu <= 4.0 for nu in nus):
        raise ValueError("moment requires nu > 4 (second trace power)")
    if 1 in ks and any(nu <= 2.0 for nu in nus):
        raise ValueError("moment requires nu > 2 (first trace power)")
    reports = []
    for i, nu in enumerate(nus):
        params = _resolve_params(args, float(nu))
        for j, k in enumerate(ks):
            seed = _derive_seed(args.seed, 2 * i + j)
            reports.append(
                verify_trace_moments(params, k, args.samples, seed, workers=args.workers)
            )
    comment = (
        f"command=moments d={args.d or ''} m={args.m or ''} seed={args.seed} "
        f"samples={args.samples} workers={args.workers}"
    )
    write_moment_csv(args.out, reports, comment=comment, pass_gate=4.0)
    return 0


def _cmd_metrics(args) -> int:
    nus = _nus(args)
    rows = []
    for i, nu in enumerate(nus):
        params = _resolve_params(args, float(nu))
        d, m = params.d, params.m
        if d == 1 and m == 1:
            tv, se = tv_quadrature_1d(float(nu)), 0.0
            hell = hellinger_quadrature_1d(float(nu))
        else:
            tv, se = tv_monte_carlo(
                params, args.samples, _derive_seed(args.seed, 2 * i), workers=args.workers
            )
            hell, _ = hellinger_monte_carlo(
                params, args.samples, _derive_seed(args.seed, 2 * i + 1), workers=args.workers
            )
        bound = metric_bound(d, m, float(nu), args.constant)
        rows.append(
            MetricRow(
                d=d,
                m=m,
                nu=float(nu),
                tv_estimate=tv,
                tv_std_error=se,
                hellinger=hell,
                tv_bound_c1=bound.tv_bound,
                hellinger_bound_c1=bound.hellinger_bound,
            )
        )
    comment = (
        f"command=metrics seed={args.seed} samples={args.samples} "
        f"workers={args.workers} C={fmt_float(args.constant)}"
    )
    write_metric_csv(args.out, rows, comment=comment)
    if not args.no_figures:
        from .figures import plot_metric_decay

        base = Path(args.out).with_suffix("")
        plot_metric_decay(rows, base.parent / (base.name + ".decay.png"))
    return 0


def _cmd_sample(args) -> int:
    nu = float(args.nu_min)
    params = _resolve_params(args, nu)
    if args.samples < 0:
        raise ValueError("--samples must be nonnegative")
    lines = [
        "# mtxt sample: one vec(X) per line (columns of X stacked)",
        f"# d={params.d} m={params.m} nu={fmt_float(nu)} seed={args.seed} "
        f"n_samples={args.samples} workers={args.workers}",
        f"# sigma={_matrix_inline(params.sigma)} omega={_matrix_inline(params.omega)}",
    ]
    if args.samples > 0:
        counts = [args.samples // args.workers] * args.workers
        for i in range(args.samples % args.workers):
            counts[i] += 1
        rngs = worker_rngs(args.seed, args.workers)
        for sub, count in zip(rngs, counts):
            if count == 0:
                continue
            draws = sample_matrix_t(params, sub, size=count)
            vecs = draws.transpose(0, 2, 1).reshape(count, -1)
            lines.extend(" ".join(fmt_float(v) for v in row) for row in vecs)
    _write_text(args.out, lines)
    return 0


_COMMANDS = {
    "expansion-study": _cmd_expansion_study,
    "moments": _cmd_moments,
    "metrics": _cmd_metrics,
    "sample": _cmd_sample,
}


def main(argv=None) -> int:
    parser = _build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # config values are injected as flags right after the subcommand, so
    # explicitly passed flags still win (later occurrences override)
    if "--config" in argv and argv and argv[0] in _COMMANDS:
        try:
            cfg_path = argv[argv.index("--config") + 1]
        except IndexError:
            print("mtxt: error: --config requires a file path", file=sys.stderr)
            return 2
        try:
            defaults = _read_config(cfg_path)
        except (OSError, ValueError) as exc:
            print(f"mtxt: error: {exc}", file=sys.stderr)
            return 3
        injected = []
        for key, value in defaults.items():
            injected.extend([f"--{key.replace('_', '-')}", str(value)])
        argv = [argv[0]] + injected + argv[1:]
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"mtxt: error: {exc}", file=sys.stderr)
        return 3
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"mtxt: numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
