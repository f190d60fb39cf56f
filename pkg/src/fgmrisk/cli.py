"""Command-line front end: ``fgmrisk COMMAND [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .aggregate_me import aggregate
from .allocation import allocation_series, cmrs, tvar_allocation
from .copula import FgmCopula, subset_of
from .discrete_agg import DiscretizationSpec, aggregate_pmf, discretize, risk_measures, tvar_sandwich
from .errors import FGMError, NumericalError, ValidationError
from .marginals import Discrete, Exponential, MixedErlang
from .mc_oracle import sample_portfolio
from .moments import aggregate_moment
from .portfolio import Portfolio
from .tables import TABLES

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3
COMMANDS = ("info", "aggregate", "moments", "risk", "bounds", "allocate", "share", "sample", "reproduce")
MAX_LISTED_THETAS = 64

log = logging.getLogger("fgmrisk")


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fgmrisk", description="Risk aggregation and allocation under FGM dependence.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("table", nargs="?", help="table name for 'reproduce' (table1..table5, relative)")
    p.add_argument("--config", type=Path, help="portfolio config (JSON)")
    p.add_argument("--kappa", type=_floats, default=[0.9, 0.99, 0.999], help="comma-separated risk levels")
    p.add_argument("--h", type=float, help="discretization span")
    p.add_argument("--method", choices=("lower", "upper"), default="upper", help="discretization method")
    p.add_argument("--order", type=int, default=2, help="highest moment order")
    p.add_argument("--s", type=_floats, help="comma-separated aggregate values for 'share'")
    p.add_argument("--seed", type=int, help="random seed for 'sample' (default: config option)")
    p.add_argument("--n", type=int, default=10_000, help="sample size for 'sample'")
    p.add_argument("--subset", help="restrict 'reproduce', e.g. d=1,2,10,100 or h=2,1")
    p.add_argument("--out", type=Path, help="write the table here instead of stdout")
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    p.add_argument("--trunc-eps", type=float, help="truncation tolerance (overrides config)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{x:.6g}"
    return str(x)


def render(header: list[str], rows: list[list], fmt: str) -> str:
    cells = [[c if isinstance(c, str) else _fmt(c) for c in row] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(cells)
        return buf.getvalue()
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _load(args):
    if args.config is None:
        raise ValidationError(f"'{args.command}' needs --config")
    cfg = cfgmod.load(args.config)
    eps = args.trunc_eps if args.trunc_eps is not None else cfg.options.trunc_eps
    return cfg, cfgmod.to_portfolio(cfg), eps


def _is_me(p: Portfolio) -> bool:
    return all(isinstance(m, (MixedErlang, Exponential)) for m in p.marginals)


def _discrete(p: Portfolio, args, eps) -> Portfolio:
    if all(isinstance(m, Discrete) for m in p.marginals):
        return p
    if args.h is None:
        raise ValidationError("marginals are not mixed Erlang; pass --h (and --method) to discretize them")
    spec = DiscretizationSpec(args.method, args.h)
    return Portfolio(tuple(discretize(m, spec, eps=eps) for m in p.marginals), p.dependence)


def cmd_info(args):
    cfg, p, _ = _load(args)
    rows = [["d", p.d], ["dependence", repr(p.dependence)]]
    for k, m in enumerate(p.marginals, start=1):
        rows.append([f"marginal {k}", f"{type(m).__name__} mean={m.mean:.6g}"])
    if isinstance(p.dependence, FgmCopula) or p.d <= 20:
        copula = p.copula  # raises on inadmissible parameters
        rows.append(["admissible", "yes"])
        for mask, value in sorted(copula.theta.items())[:MAX_LISTED_THETAS]:
            rows.append(["theta " + ",".join(str(k + 1) for k in subset_of(mask)), value])
        if len(copula.theta) > MAX_LISTED_THETAS:
            rows.append(["theta", f"... {len(copula.theta) - MAX_LISTED_THETAS} more"])
    else:
        rows.append(["admissible", "yes (Bernoulli scheme)"])
    return ["quantity", "value"], rows


def cmd_aggregate(args):
    _, p, eps = _load(args)
    if _is_me(p):
        agg = aggregate(p, eps)
        return ["rate", "shape", "weight"], [[agg.rate, j, w] for j, w in zip(agg.shapes, agg.weights)]
    pmf = aggregate_pmf(_discrete(p, args, eps))
    return ["x", "mass"], [[x, f] for x, f in zip(pmf.support, pmf.masses)]


def cmd_moments(args):
    _, p, _ = _load(args)
    rows = [[m, aggregate_moment(p, m)] for m in range(1, args.order + 1)]
    return ["order", "moment"], rows


def cmd_risk(args):
    _, p, eps = _load(args)
    rows = []
    if _is_me(p):
        agg = aggregate(p, eps)
        for kappa in args.kappa:
            var = agg.var_risk(kappa)
            rows.append([kappa, var, agg.tvar(kappa, var)])
    else:
        pmf = aggregate_pmf(_discrete(p, args, eps))
        rows = [[kappa, *risk_measures(pmf, kappa)] for kappa in args.kappa]
    return ["kappa", "VaR", "TVaR"], rows


def cmd_bounds(args):
    _, p, eps = _load(args)
    if args.h is None:
        raise ValidationError("'bounds' needs --h")
    rows = [[kappa, *tvar_sandwich(p, args.h, kappa, eps)] for kappa in args.kappa]
    return ["kappa", "tvar_upper_method", "tvar_lower_method"], rows


def cmd_allocate(args):
    _, p, eps = _load(args)
    series = allocation_series(p, eps)
    rows = []
    for kappa in args.kappa:
        res = tvar_allocation(p, kappa, series)
        rows += [[kappa, k, c] for k, c in enumerate(res.contributions, start=1)]
        rows.append([kappa, "total", res.reference])
    return ["kappa", "risk", "contribution"], rows


def cmd_share(args):
    _, p, eps = _load(args)
    if not args.s:
        raise ValidationError("'share' needs --s")
    series = allocation_series(p, eps)
    rows = []
    for s in args.s:
        res = cmrs(p, s, series)
        rows += [[s, k, c] for k, c in enumerate(res.contributions, start=1)]
    return ["s", "risk", "conditional_mean"], rows


def cmd_sample(args):
    cfg, p, _ = _load(args)
    seed = cfg.options.seed if args.seed is None else args.seed
    batch = sample_portfolio(p, args.n, seed)
    header = [f"x{k}" for k in range(1, p.d + 1)] + ["S"]
    return header, [list(row) + [row.sum()] for row in batch.values]


def _subset(text: str | None) -> dict:
    if not text:
        return {}
    key, _, values = text.partition("=")
    if key == "d":
        return {"ds": [int(v) for v in values.split(",")]}
    if key == "h":
        return {"hs": [float(v) for v in values.split(",")]}
    raise ValidationError(f"--subset must look like d=1,2 or h=2,1; got {text!r}")


def cmd_reproduce(args):
    if args.table not in TABLES:
        raise ValidationError(f"reproduce needs one of {sorted(TABLES)}")
    entries = TABLES[args.table](**_subset(args.subset))
    rows = [
        [e.table, e.key, f"{e.value:.{e.digits}f}", f"{e.reference:.{e.digits}f}", f"{e.diff:.2e}", f"{e.tol:g}",
         "ok" if e.ok else "MISMATCH"]
        for e in entries
    ]
    args._mismatch = not all(e.ok for e in entries)
    return ["table", "entry", "computed", "reference", "diff", "tol", "status"], rows


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        header, rows = HANDLERS[args.command](args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FGMError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    text = render(header, rows, args.format)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_MISMATCH if getattr(args, "_mismatch", False) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
