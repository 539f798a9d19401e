"""Command-line front end.

    poincare-dyadic decompose --shape disk --depth 9 --out cubes.csv
    poincare-dyadic estimate --shape square --field eigenfunction --p 2 --q 4 --depth 6 --json out.json
    poincare-dyadic oracle --shape lshape-classical --grid 256
    poincare-dyadic counterexample --kmax 512
    poincare-dyadic gradcheck --field bump --trials 100 --seed 0
    poincare-dyadic sweep --shape disk --field bump --depths 3,4,5,6 --orders 4,8

Exit codes: 0 ok, 1 invalid arguments, 2 bad shape, 3 unbounded domain,
4 gradient-free field, 5 singular cell, 6 solver non-convergence,
7 gradient check failed, 8 embedding violated, 9 degenerate domain.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass

from . import __version__
from .errors import PoincareError, ShapeError, UnboundedDomainError
from .estimates import (NESTED_COVER_NOTE, counterexample_partial_sums, divergence_crossing,
                        theorem_constant)
from .fields import FIELD_IDS, get_field, gradient_check
from .geometry import (AxisBox, Annulus, Ball, Domain, LShape, Union, classical_l_shape, decompose,
                       diameter, interval_list, l_shape, total_measure, unit_square, write_csv)
from .oracles import (convex_p1_constant, convex_pp_report, dirichlet_lambda1, rayleigh_ratio)
from .quadrature import NormSpec, global_norms

SCHEMA_VERSION = 1
EXIT_USAGE = 1

SHAPES = ("square", "cube", "interval", "intervals", "disk", "annulus", "lshape",
          "lshape-classical", "two-disks", "halfplane")


def build_domain(name: str, radius: float = 1.0) -> Domain:
    if name == "square":
        return Domain(unit_square(2))
    if name == "cube":
        return Domain(unit_square(3))
    if name == "interval":
        return Domain(AxisBox((0.0,), (1.0,)))
    if name == "intervals":
        return Domain(interval_list([(0.0, 0.25), (0.5, 1.0)]))
    if name == "disk":
        return Domain(Ball((0.0, 0.0), radius))
    if name == "annulus":
        return Domain(Annulus((0.0, 0.0), radius / 2, radius))
    if name == "lshape":
        return Domain(l_shape())
    if name == "lshape-classical":
        return Domain(classical_l_shape())
    if name == "two-disks":
        return Domain(Union((Ball((-radius, 0.0), 0.8 * radius), Ball((radius, 0.0), 0.8 * radius))))
    if name in ("halfplane", "halfspace", "plane"):
        raise UnboundedDomainError(f"shape {name!r}")
    raise ShapeError(f"unknown shape {name!r}; choose from {', '.join(SHAPES)}")


@dataclass
class RunConfig:
    shape: str = "square"
    radius: float = 1.0
    field: str = "eigenfunction"
    p: float = 2.0
    q: float = 4.0
    depth: int = 6
    min_depth: int = 0
    order: int = 8
    grid: int = 128
    kmax: int = 512
    seed: int = 0
    trials: int = 100
    workers: int = 1
    depths: str | None = None
    orders: str | None = None
    output: str = "table"
    out: str | None = None
    json: str | None = None

    def validate(self):
        if not (1 <= self.p < self.q):
            raise ValueError(f"need 1 <= p < q, got p={self.p}, q={self.q}")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if not 0 <= self.min_depth <= self.depth:
            raise ValueError("need 0 <= min_depth <= depth")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.radius <= 0 or not math.isfinite(self.radius):
            raise ShapeError("radius must be positive and finite")
        if self.output not in ("json", "csv", "table"):
            raise ValueError("output must be json, csv or table")

    def to_dict(self):
        d = dataclasses.asdict(self)
        for k in ("out", "json", "output", "workers"):
            d.pop(k)
        return d


def _fmt(x):
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _dump(payload, path):
    text = json.dumps(payload, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


@contextlib.contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _field_for(cfg, domain):
    return get_field(cfg.field, domain.dim, domain.bounding_box)


def _bounding_box_lambda1(domain):
    return sum((math.pi / w) ** 2 for w in domain.bounding_box.widths)


def cmd_decompose(cfg: RunConfig) -> int:
    domain = build_domain(cfg.shape, cfg.radius)
    dec = decompose(domain, cfg.depth, cfg.min_depth)
    measure = total_measure(dec)
    with _sink(cfg.out) as fh:
        write_csv(dec, fh)
    info = sys.stderr if cfg.out in (None, "-") else sys.stdout
    print(f"cubes: {len(dec)}  total measure: {measure!r}  mode: {dec.classification_mode}", file=info)
    if cfg.json:
        _dump({"schema_version": SCHEMA_VERSION, "command": "decompose", "config": cfg.to_dict(),
               "domain": domain.describe(), "cubes": len(dec), "max_level": dec.max_level,
               "total_measure": measure, "exact_measure": domain.exact_measure(),
               "classification_mode": dec.classification_mode}, cfg.json)
    return 0


def _oracles(domain, spec, grid):
    out = {"diameter": diameter(domain)}
    if domain.convex:
        out["convex_p1"] = {"kind": "convex_p1", "value": convex_p1_constant(domain)}
    if spec.p >= 2:
        out["convex_pp"] = convex_pp_report(spec.p, out["diameter"]).to_dict()
    if spec.p == 2:
        try:
            out["dirichlet_p2"] = dirichlet_lambda1(domain, grid).to_dict()
        except ShapeError:
            out["bounding_box_lambda1"] = _bounding_box_lambda1(domain)
    return out


def cmd_estimate(cfg: RunConfig) -> int:
    domain = build_domain(cfg.shape, cfg.radius)
    spec = NormSpec(cfg.p, cfg.q, cfg.order)
    field = _field_for(cfg, domain)
    dec = decompose(domain, cfg.depth, cfg.min_depth)
    report = global_norms(field, dec, spec, workers=cfg.workers)
    result = theorem_constant(report)
    oracles = _oracles(domain, spec, cfg.grid)
    if spec.p == 2:
        oracles["rayleigh_ratio"] = rayleigh_ratio(report)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "estimate",
        "config": cfg.to_dict(),
        "domain": domain.describe(),
        "decomposition": {"cubes": len(dec), "max_level": dec.max_level,
                          "total_measure": total_measure(dec),
                          "exact_measure": domain.exact_measure(),
                          "classification_mode": dec.classification_mode},
        "norm_report": report.to_dict(per_cube=False),
        "estimate": result.to_dict(),
        "oracles": oracles,
    }
    if cfg.output == "json":
        _dump(payload, cfg.json or "-")
    else:
        if cfg.json:
            _dump(payload, cfg.json)
        oracle_value = None
        if "dirichlet_p2" in oracles:
            oracle_value = oracles["dirichlet_p2"]["alt_value"]
        elif "convex_p1" in oracles and spec.p == 1:
            oracle_value = oracles["convex_p1"]["value"]
        cols = ["field", "C", "actual_ratio", "oracle", "chain_margin", "min_cube_margin"]
        vals = [field.id, result.constant, result.actual_ratio, oracle_value,
                result.chain_margin, result.min_cube_margin]
        print("  ".join(f"{c:>16}" for c in cols))
        print("  ".join(f"{_fmt(v):>16}" for v in vals))
    if cfg.out:
        with _sink(cfg.out) as fh:
            report.write_csv(fh)
    return 0


def cmd_oracle(cfg: RunConfig) -> int:
    domain = build_domain(cfg.shape, cfg.radius)
    payload = {"schema_version": SCHEMA_VERSION, "command": "oracle", "config": cfg.to_dict(),
               "oracles": _oracles(domain, NormSpec(cfg.p, cfg.q, cfg.order), cfg.grid)}
    _dump(payload, cfg.json or "-")
    return 0


def cmd_counterexample(cfg: RunConfig) -> int:
    rows = counterexample_partial_sums(cfg.kmax)
    with _sink(cfg.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "norm", "partial_sum"])
        for k, norm, s in rows:
            w.writerow([k, repr(norm), repr(s)])
    info = sys.stderr if cfg.out in (None, "-") else sys.stdout
    hit = divergence_crossing(rows)
    if hit is None:
        print(f"partial sum at k={cfg.kmax}: {rows[-1][2]:.6g} (threshold 1e3 not yet crossed)", file=info)
    else:
        print(f"partial sums exceed 1e3 at k={hit}; the series diverges like ln(k!)", file=info)
    print(f"note: {NESTED_COVER_NOTE}", file=info)
    return 0


def cmd_gradcheck(cfg: RunConfig) -> int:
    dim = 1 if cfg.field == "reciprocal" else build_domain(cfg.shape, cfg.radius).dim
    f = get_field(cfg.field, dim)
    rep = gradient_check(f, cfg.trials, cfg.seed, raise_on_fail=False)
    _dump({"schema_version": SCHEMA_VERSION, "command": "gradcheck", "report": rep.to_dict()},
          cfg.json or "-")
    return 0 if rep.passed else 7


def _int_list(text, fallback):
    if not text:
        return fallback
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_sweep(cfg: RunConfig) -> int:
    domain = build_domain(cfg.shape, cfg.radius)
    field = _field_for(cfg, domain)
    depths = _int_list(cfg.depths, list(range(min(2, cfg.depth), cfg.depth + 1)))
    orders = _int_list(cfg.orders, [cfg.order])
    cols = ["depth", "order", "cubes", "measure", "up_pow", "uq_pow", "gradp_pow",
            "constant", "actual_ratio", "chain_margin"]
    with _sink(cfg.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for depth in depths:
            dec = decompose(domain, depth, min(cfg.min_depth, depth))
            for order in orders:
                report = global_norms(field, dec, NormSpec(cfg.p, cfg.q, order), cfg.workers)
                t = report.totals
                if t["gradp_pow"] > 0:
                    res = theorem_constant(report)
                    tail = [res.constant, res.actual_ratio, res.chain_margin]
                else:
                    tail = ["", "", ""]
                w.writerow([depth, order, len(dec)] + [repr(v) if isinstance(v, float) else v
                            for v in [t["measure"], t["up_pow"], t["uq_pow"], t["gradp_pow"]] + tail])
    return 0


COMMANDS = {
    "decompose": cmd_decompose,
    "estimate": cmd_estimate,
    "oracle": cmd_oracle,
    "counterexample": cmd_counterexample,
    "gradcheck": cmd_gradcheck,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    common.add_argument("--shape", help=f"one of: {', '.join(SHAPES)}")
    common.add_argument("--radius", type=float)
    common.add_argument("--depth", type=int, help="max dyadic level")
    common.add_argument("--min-depth", dest="min_depth", type=int,
                        help="split cubes coarser than this even when inside (uniform partitions)")
    common.add_argument("--field", help=f"one of: {', '.join(FIELD_IDS)}")
    common.add_argument("--p", type=float)
    common.add_argument("--q", type=float)
    common.add_argument("--order", type=int, help="Gauss-Legendre points per axis")
    common.add_argument("--grid", type=int, help="eigensolver intervals per axis")
    common.add_argument("--kmax", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--depths", help="comma-separated depths for sweep")
    common.add_argument("--orders", help="comma-separated quadrature orders for sweep")
    common.add_argument("--output", choices=("json", "csv", "table"))
    common.add_argument("--out", help="CSV output path")
    common.add_argument("--json", help="JSON output path ('-' for stdout)")

    parser = _Parser(prog="poincare-dyadic", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def load_config(args) -> RunConfig:
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            values.update(json.load(fh))
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for name in known:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except PoincareError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
