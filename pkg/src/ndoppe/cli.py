"""Command line entry point: ``ndoppe {fit,simulate,mse-study,pmf-table}``.

Reports are JSON, tables and curves are CSV.  Floats are written with
``repr`` so identical flags give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import estimate, model as _model, risk
from .model import ModelSpec, Theta
from .sampler import SeededStream, sample

log = logging.getLogger("ndoppe")

_TOKEN = re.compile(rb"[0-9]+")
_SEPARATORS = re.compile(rb"[ \t\n\r\f\v]+")
# fit report adds the alternative CDF column when it moves by more than this
_VARIANT_REPORT_TOL = 1e-6

FIT_COLUMNS = ("x", "observed", "mle_pmf", "umvue_pmf", "mle_cdf", "umvue_cdf")
MSE_COLUMNS = ("estimator", "target", "n", "mse", "std_error", "exact_mse")
PMF_COLUMNS = ("x", "pmf", "cdf")


class DatasetParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"token {position}: {message}")
        self.position = position


def parse_dataset(data: bytes | str) -> estimate.Sample:
    """Whitespace-separated nonnegative decimal integers -> Sample (order kept).

    Token positions in errors are 1-based.
    """
    if isinstance(data, str):
        data = data.encode()
    tokens = [tok for tok in _SEPARATORS.split(data) if tok]
    if not tokens:
        raise DatasetParseError("empty dataset")
    for i, tok in enumerate(tokens, 1):
        if not _TOKEN.fullmatch(tok):
            raise DatasetParseError(f"not a nonnegative integer: {tok.decode(errors='replace')!r}", i)
    return estimate.Sample(np.array([int(tok) for tok in tokens], dtype=np.int64))


def bundled_dataset_path() -> Path:
    """The 123 Greek forest-district fire counts (July-August 1998)."""
    return Path(str(resources.files("ndoppe") / "data" / "greece_fires.txt"))


def load_dataset(path) -> estimate.Sample:
    return parse_dataset(Path(path).read_bytes())


# ------------------------------------------------------------------- fit


@dataclass
class FitReport:
    r: int
    coefficients: list[float]
    n: int
    t: int
    mean: float
    theta_mle: float
    nll_mle: float
    nll_umvue: float
    table: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    def to_csv(self) -> str:
        cols = list(FIT_COLUMNS)
        if self.table and "umvue_cdf_alt" in self.table[0]:
            cols.append("umvue_cdf_alt")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in self.table:
            w.writerow([_fmt(row[c]) for c in cols])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_fit(data: estimate.Sample | str | Path, model: ModelSpec | None = None, x_max: int | None = None) -> FitReport:
    """MLE plug-in and UMVUE fits with their negative log-likelihoods."""
    model = model or ModelSpec.ndl()
    s = data if isinstance(data, estimate.Sample) else load_dataset(data)
    if x_max is None:
        x_max = int(s.values.max())
    theta = estimate.mle_theta(s, model)
    n, t = s.n, s.t

    nll_mle = -estimate.log_likelihood(s, lambda x: _model.pmf(x, theta, model))
    if n >= 2:
        nll_umvue = -estimate.log_likelihood(s, lambda x: estimate.conditional_pmf(x, t, n, model))
    else:
        nll_umvue = math.nan

    xs = np.arange(x_max + 1)
    counts = np.bincount(s.values, minlength=x_max + 1)[: x_max + 1]
    mle_pmf = np.atleast_1d(_model.pmf(xs, theta, model))
    mle_cdf = [_model.cdf(int(x), theta, model) for x in xs]
    u_pmf = np.atleast_1d(estimate.conditional_pmf(xs, t, n, model))
    u_cdf = estimate.umvue_cdf_table(x_max, n, t, model)[0]
    table = [
        {
            "x": int(x),
            "observed": float(counts[x] / n),
            "mle_pmf": float(mle_pmf[x]),
            "umvue_pmf": float(u_pmf[x]),
            "mle_cdf": float(mle_cdf[x]),
            "umvue_cdf": float(u_cdf[x]),
        }
        for x in xs
    ]
    notes = []
    if n >= 2:
        alt = [estimate.umvue_cdf_alt(int(x), n, t, model) for x in xs]
        if max(abs(p - row["umvue_cdf"]) for p, row in zip(alt, table)) > _VARIANT_REPORT_TOL:
            for p, row in zip(alt, table):
                row["umvue_cdf_alt"] = float(p)
            notes.append(
                "umvue_cdf_alt uses C(t+m-1, t-w) in place of C(t-w+m-1, t-w); "
                "it is not the running sum of umvue_pmf. Both NLLs use umvue_pmf only."
            )
    return FitReport(
        r=model.order,
        coefficients=list(model.coefficients),
        n=n,
        t=t,
        mean=s.mean,
        theta_mle=theta.value,
        nll_mle=nll_mle,
        nll_umvue=nll_umvue,
        table=table,
        notes=notes,
    )


# -------------------------------------------------------------- simulate


def cmd_simulate(n: int, theta: float, model: ModelSpec, seed: int) -> str:
    """n draws, one per line, from substream 0 of ``seed``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    draws = sample(n, theta, model, SeededStream(seed, 0))
    return "".join(f"{int(v)}\n" for v in draws)


# ------------------------------------------------------------- mse study


def cmd_mse_study(config: risk.MseStudyConfig, include_exact: bool = False) -> str:
    curves = risk.mc_mse_study(config)
    for p in curves[0].points:
        if p.degenerate:
            log.warning("n=%d: %d all-zero samples (%s)", p.n, p.degenerate, config.degenerate)
    exact = risk.exact_mse_curves(config) if include_exact else {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MSE_COLUMNS)
    for c in curves:
        ex = exact.get(c.target) if c.estimator == "UMVUE" else None
        for i, p in enumerate(c.points):
            exact_val = _fmt(ex.points[i].mse) if ex is not None else ""
            w.writerow([c.estimator, c.target, p.n, _fmt(p.mse), _fmt(p.std_error), exact_val])
    return buf.getvalue()


# ------------------------------------------------------------- pmf table


def cmd_pmf_table(theta: float, model: ModelSpec, x_max: int) -> str:
    x, f, F = _model.pmf_table(theta, model, x_max)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PMF_COLUMNS)
    for row in zip(x, f, F):
        w.writerow([int(row[0]), _fmt(float(row[1])), _fmt(float(row[2]))])
    return buf.getvalue()


# ---------------------------------------------------------------- parsing


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {s}")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be a nonnegative integer, got {s}")
    return v


def _theta_arg(s: str) -> float:
    v = float(s)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"theta must lie in (0, 1), got {s}")
    return v


def _float_list(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _int_list(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v.strip()]


def _model_from_args(parser: argparse.ArgumentParser, args) -> ModelSpec:
    coeffs = args.coeffs
    if coeffs is None:
        coeffs = [1.0] * (args.r if args.r is not None else 2)
    if args.r is not None and args.r != len(coeffs):
        parser.error(f"--r {args.r} does not match {len(coeffs)} coefficients")
    try:
        return ModelSpec(tuple(coeffs))
    except ValueError as exc:
        parser.error(str(exc))


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", type=_positive_int, default=None, help="family order (default 2)")
    p.add_argument("--coeffs", type=_float_list, default=None, help="a0,a1,... (default all ones)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ndoppe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit MLE and UMVUE to a dataset; report NLLs and estimated PMF/CDF")
    p.add_argument("dataset", nargs="?", default=None, help="count file (default: bundled Greece fires data)")
    _add_model_flags(p)
    p.add_argument("--x-max", type=_nonneg_int, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)

    p = sub.add_parser("simulate", help="draw a sample, one value per line")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--theta", type=_theta_arg, required=True)
    _add_model_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("mse-study", help="Monte Carlo MSE of MLE and UMVUE (optionally with exact UMVUE MSE)")
    _add_model_flags(p)
    p.add_argument("--theta", type=_theta_arg, default=0.01)
    p.add_argument("--x", type=_nonneg_int, default=2)
    p.add_argument("--sizes", type=_int_list, default=list(risk.DEFAULT_SIZES))
    p.add_argument("--reps", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="add the exact UMVUE MSE column")
    p.add_argument(
        "--degenerate",
        choices=risk.DEGENERATE_POLICIES,
        default="boundary",
        help="all-zero samples: keep with the theta -> 1 MLE limit, or redraw",
    )
    p.add_argument("--out", default=None)

    p = sub.add_parser("pmf-table", help="x, pmf, cdf for x = 0..x_max")
    p.add_argument("--theta", type=_theta_arg, required=True)
    _add_model_flags(p)
    p.add_argument("--x-max", type=_nonneg_int, default=20)
    p.add_argument("--out", default=None)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    logging.captureWarnings(True)
    model = _model_from_args(parser, args)
    try:
        if args.command == "fit":
            path = args.dataset if args.dataset is not None else bundled_dataset_path()
            report = cmd_fit(path, model, args.x_max)
            _emit(report.to_json() if args.format == "json" else report.to_csv(), args.out)
        elif args.command == "simulate":
            _emit(cmd_simulate(args.n, args.theta, model, args.seed), args.out)
        elif args.command == "mse-study":
            try:
                config = risk.MseStudyConfig(
                    model, Theta(args.theta), args.x, tuple(args.sizes), args.reps, args.seed, args.degenerate
                )
            except ValueError as exc:
                parser.error(str(exc))
            _emit(cmd_mse_study(config, args.exact), args.out)
        elif args.command == "pmf-table":
            _emit(cmd_pmf_table(args.theta, model, args.x_max), args.out)
    except (OSError, ValueError, ArithmeticError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
