"""Command-line front end: price, table, compare, converge, validate, bench.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, DomainError
from .market import MarketParams
from .mellin import (ContourSpec, MellinBarnes2D, cahen_mellin_inverse, contour_price_2d,
                     phase_weighted_series, residue_series_exponential)
from .reference import brenner_approx, closed_form_call, green_quadrature_call
from .series import SeriesConfig, atm_term_grid, build_term_grid

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

METHODS = ("closed_form", "series", "atm_series", "brenner", "quadrature", "contour2d")
SERIES_METHODS = ("series", "atm_series")

# market settings of the two published term tables (tau = 1 and tau = 5)
TABLE_PARAMS = (MarketParams(3800, 4000, 0.01, 0.2, 1), MarketParams(3800, 4000, 0.01, 0.2, 5))
ALT_CONTOURS = ((1.5, 0.3), (1.1, 0.8))


def fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class PriceReport:
    spot: float
    strike: float
    rate: float
    vol: float
    tau: float
    method: str
    price: float
    max_n: Optional[int]
    max_m: Optional[int]
    abs_diff_vs_closed_form: float
    wall_time_ns: int

    def to_dict(self) -> dict:
        return asdict(self)


def _params(args) -> MarketParams:
    return MarketParams(args.spot, args.strike, args.rate, args.vol, args.tau)


def _series_cfg(args) -> SeriesConfig:
    return SeriesConfig(args.max_n, args.max_m, args.tolerance)


def price_report(params: MarketParams, method: str, cfg: SeriesConfig | None = None) -> PriceReport:
    cfg = cfg or SeriesConfig()
    truncation = (None, None)
    start = time.perf_counter_ns()
    if method == "closed_form":
        price = closed_form_call(params)
    elif method in SERIES_METHODS:
        grid = (build_term_grid if method == "series" else atm_term_grid)(params, cfg)
        price = grid.price
        truncation = (grid.max_n, grid.max_m)
    elif method == "brenner":
        price = brenner_approx(params)
    elif method == "quadrature":
        price = green_quadrature_call(params)
    elif method == "contour2d":
        price = contour_price_2d(params)
    else:
        raise ValueError(f"unknown method {method!r}")
    elapsed = time.perf_counter_ns() - start
    return PriceReport(
        spot=params.spot, strike=params.strike, rate=params.rate, vol=params.volatility,
        tau=params.tau, method=method, price=price, max_n=truncation[0], max_m=truncation[1],
        abs_diff_vs_closed_form=abs(price - closed_form_call(params)), wall_time_ns=elapsed,
    )


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, float) else ("" if v is None else v) for v in row])
    return buf.getvalue()


def _json_rows(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    return json.dumps([dict(zip(header, row)) for row in rows], indent=2) + "\n"


def table_rows(params: MarketParams, cfg: SeriesConfig) -> tuple[list[str], list[list]]:
    grid = build_term_grid(params, cfg)
    header = ["n"] + [f"m={m}" for m in range(1, grid.max_m + 1)]
    rows = [[n] + [float(x) for x in grid.terms[n]] for n in range(grid.max_n + 1)]
    rows.append(["Call"] + [float(x) for x in grid.cumulative_price])
    return header, rows


def compare_rows(spots, taus, strike, rate, vol, cfg) -> tuple[list[str], list[list]]:
    header = ["spot", "tau", "closed_form", "series", "abs_diff"]
    rows = []
    for spot in spots:
        for tau in taus:
            p = MarketParams(spot, strike, rate, vol, tau)
            cf = closed_form_call(p)
            s = build_term_grid(p, cfg).price
            rows.append([float(spot), float(tau), cf, s, abs(s - cf)])
    return header, rows


def converge_rows(params: MarketParams, cfg: SeriesConfig) -> tuple[list[str], list[list]]:
    grid = build_term_grid(params, cfg)
    cf = closed_form_call(params)
    header = ["m", "column_sum", "cumulative_price", "abs_error_vs_closed_form"]
    rows = [[m, grid.column_sum(m), grid.cumulative(m), abs(grid.cumulative(m) - cf)]
            for m in range(1, grid.max_m + 1)]
    return header, rows


def self_check(text: str, header: Sequence[str], rows: Sequence[Sequence], tol: float = 1e-12) -> list[str]:
    """Re-parse emitted CSV and compare every cell with the recomputed rows."""
    parsed = list(csv.reader(io.StringIO(text)))
    problems = []
    if parsed[0] != list(header):
        problems.append(f"header mismatch: {parsed[0]} != {list(header)}")
    if len(parsed) - 1 != len(rows):
        problems.append(f"row count {len(parsed) - 1} != {len(rows)}")
    for i, (got, want) in enumerate(zip(parsed[1:], rows), start=1):
        for j, (g, w) in enumerate(zip(got, want)):
            if isinstance(w, float):
                if not abs(float(g) - w) <= tol * max(1.0, abs(w)):
                    problems.append(f"row {i} col {j}: {g} != {fmt(w)}")
            elif str(w) != g:
                problems.append(f"row {i} col {j}: {g!r} != {w!r}")
    return problems


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_rows(args, header, rows, recompute: Callable[[], tuple[list[str], list[list]]]) -> int:
    text = _json_rows(header, rows) if args.format == "json" else _csv_text(header, rows)
    _emit(args, text)
    if getattr(args, "self_check", False) and args.format == "csv":
        problems = self_check(text, *recompute())
        for line in problems:
            print(f"self-check: {line}", file=sys.stderr)
        return EXIT_FAILED if problems else EXIT_OK
    return EXIT_OK


def cmd_price(args) -> int:
    report = price_report(_params(args), args.method, _series_cfg(args))
    data = report.to_dict()
    if args.format == "json":
        _emit(args, json.dumps(data) + "\n")
    else:
        _emit(args, _csv_text(list(data), [list(data.values())]))
    return EXIT_OK


def cmd_table(args) -> int:
    params, cfg = _params(args), _series_cfg(args)
    header, rows = table_rows(params, cfg)
    return _emit_rows(args, header, rows, lambda: table_rows(params, cfg))


def cmd_compare(args) -> int:
    cfg = _series_cfg(args)
    run = lambda: compare_rows(args.spots, args.taus, args.strike, args.rate, args.vol, cfg)  # noqa: E731
    header, rows = run()
    return _emit_rows(args, header, rows, run)


def cmd_converge(args) -> int:
    params, cfg = _params(args), _series_cfg(args)
    header, rows = converge_rows(params, cfg)
    return _emit_rows(args, header, rows, lambda: converge_rows(params, cfg))


def validation_checks(spec: ContourSpec) -> list[tuple[str, bool, str]]:
    """Run the Mellin-Barnes validation suite; returns (name, passed, detail) triples."""
    spec.check_1d()
    spec.check_2d()
    out = []
    errs = [abs(cahen_mellin_inverse(x, spec) - math.exp(-x)) for x in (0.1, 1.0, 5.0)]
    out.append(("cahen-mellin 1-D inversion", max(errs) <= 1e-8, f"max abs err {max(errs):.3e} (tol 1e-08)"))
    errs = [abs(cahen_mellin_inverse(x, spec) - residue_series_exponential(x, 40)) for x in (0.1, 1.0, 5.0)]
    out.append(("cahen-mellin vs residue series", max(errs) <= 1e-7, f"max abs err {max(errs):.3e} (tol 1e-07)"))

    for label, params in zip(("table 1", "table 2"), TABLE_PARAMS):
        mb = MellinBarnes2D(params, spec)
        witness = abs(mb.integral(0.5 * math.pi) - phase_weighted_series(params, 0.5 * math.pi))
        out.append((f"2-D residue theorem at x2 = i, {label}", witness <= 1e-6,
                    f"abs err {witness:.3e} (tol 1e-06)"))
        series = build_term_grid(params, SeriesConfig()).price
        diff = abs(mb.continued_price().real - series)
        out.append((f"2-D contour price vs series, {label}", diff <= 1e-3, f"abs err {diff:.3e} (tol 1e-03)"))

    params = TABLE_PARAMS[0]
    prices = [contour_price_2d(params, spec)]
    for c1, c2 in ALT_CONTOURS:
        prices.append(contour_price_2d(params, ContourSpec(c1, c2, spec.height, spec.step)))
    spread = max(prices) - min(prices)
    out.append(("contour independence", spread <= 2e-3, f"spread {spread:.3e} (tol 2e-03)"))
    return out


def cmd_validate(args) -> int:
    spec = ContourSpec(args.c1, args.c2, args.height, args.step)
    results = validation_checks(spec)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}: {detail}" for name, ok, detail in results]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_FAILED


def random_params(size: int, seed: int, strike: float = 4000.0) -> list[MarketParams]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        out.append(MarketParams(
            spot=strike * rng.uniform(0.8, 1.2), strike=strike, rate=rng.uniform(0.0, 0.05),
            volatility=rng.uniform(0.1, 0.4), tau=rng.uniform(0.25, 5.0)))
    return out


def bench_rows(methods: Sequence[str], repetitions: int, grid_size: int, seed: int,
               cfg: SeriesConfig) -> tuple[list[str], list[list]]:
    header = ["method", "params_per_sec", "mean_ns", "p99_ns"]
    if repetitions <= 0 or grid_size <= 0:
        return header, []
    grid = random_params(grid_size, seed)
    pricers: dict[str, Callable[[MarketParams], float]] = {
        "closed_form": closed_form_call,
        "series": lambda p: build_term_grid(p, cfg).price,
        "brenner": brenner_approx,
        "quadrature": green_quadrature_call,
        "contour2d": contour_price_2d,
    }
    rows = []
    for method in methods:
        fn = pricers[method]
        samples = np.empty(repetitions * grid_size, dtype=np.int64)
        k = 0
        for _ in range(repetitions):
            for p in grid:
                t0 = time.perf_counter_ns()
                fn(p)
                samples[k] = time.perf_counter_ns() - t0
                k += 1
        mean = float(samples.mean())
        rows.append([method, 1e9 / mean if mean > 0 else math.inf, mean,
                     float(np.percentile(samples, 99))])
    return header, rows


def cmd_bench(args) -> int:
    header, rows = bench_rows(args.methods, args.repetitions, args.grid_size, args.seed, _series_cfg(args))
    text = _json_rows(header, rows) if args.format == "json" else _csv_text(header, rows)
    _emit(args, text)
    return EXIT_OK


def _add_market(p: argparse.ArgumentParser, max_n: int = 20, max_m: int = 20, fmt_default: str = "csv") -> None:
    p.add_argument("--spot", type=float, default=3800.0)
    p.add_argument("--strike", type=float, default=4000.0)
    p.add_argument("--rate", type=float, default=0.01)
    p.add_argument("--vol", type=float, default=0.2)
    p.add_argument("--tau", type=float, default=1.0)
    _add_truncation(p, max_n, max_m)
    _add_output(p, fmt_default)


def _add_truncation(p: argparse.ArgumentParser, max_n: int, max_m: int) -> None:
    p.add_argument("--max-n", type=int, default=max_n)
    p.add_argument("--max-m", type=int, default=max_m)
    p.add_argument("--tolerance", type=float, default=None)


def _add_output(p: argparse.ArgumentParser, fmt_default: str) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    p.add_argument("--output", default=None, help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bsseries", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price one call and report the difference to the closed form")
    _add_market(p, fmt_default="json")
    p.add_argument("--method", choices=METHODS, default="series")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("table", help="(n, m) term table with the cumulative Call row")
    _add_market(p, max_n=6, max_m=7)
    p.add_argument("--self-check", action="store_true")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("compare", help="closed form vs truncated series over spots x maturities")
    p.add_argument("--spots", type=float, nargs="+", default=[3800.0, 4000.0, 4200.0])
    p.add_argument("--taus", type=float, nargs="+", default=[1.0, 2.0, 3.0, 4.0, 5.0])
    p.add_argument("--strike", type=float, default=4000.0)
    p.add_argument("--rate", type=float, default=0.01)
    p.add_argument("--vol", type=float, default=0.2)
    _add_truncation(p, 20, 20)
    _add_output(p, "csv")
    p.add_argument("--self-check", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("converge", help="column sums and partial prices as a function of m")
    _add_market(p)
    p.add_argument("--self-check", action="store_true")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("validate", help="numerical Mellin-Barnes checks")
    defaults = ContourSpec()
    p.add_argument("--c1", type=float, default=defaults.c1)
    p.add_argument("--c2", type=float, default=defaults.c2)
    p.add_argument("--height", type=float, default=defaults.height)
    p.add_argument("--step", type=float, default=defaults.step)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="throughput of the pricers on a random parameter grid")
    p.add_argument("--repetitions", type=int, default=100)
    p.add_argument("--grid-size", type=int, default=100)
    p.add_argument("--methods", nargs="+", choices=[m for m in METHODS if m != "atm_series"],
                   default=["closed_form", "series"])
    p.add_argument("--seed", type=int, default=0)
    _add_truncation(p, 20, 20)
    _add_output(p, "csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
