"""Command-line front end.

    torsion-density density  --catalog pmm
    torsion-density verify   --catalog pmm --radii 10,20,40
    torsion-density catalog  --format csv
    torsion-density growth   --heisenberg 1 --radii 8,12,16

Exact values are printed as reduced fractions "p/q"; anything estimated
from a finite ball is a decimal and is labelled "est".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import exact_linalg as la
from .affine_cryst import (
    DEFAULT_MAX_BALL,
    CrystGroup,
    ball_sequence,
    coset_equidistribution,
    empirical_density,
    growth_degree_fit,
    load_group,
)
from .constructors import catalog_entry, gamma_m, load_catalog, rational_density_group, zn
from .errors import BallTooLarge, TorsionDensityError
from .nilpotent import (
    NilAlgebra,
    NilAutomorphism,
    h2_automorphism,
    heisenberg,
    load_algebra,
    nil_ball_bfs,
)
from .point_group import closure, density_exact

THREADS_ENV = "TORSION_DENSITY_THREADS"


@dataclass
class RunConfig:
    max_ball_elements: int = DEFAULT_MAX_BALL
    radii: list = field(default_factory=list)
    threads: int = 1
    output_format: str = "table"
    order_cap: int | None = None

    def __post_init__(self):
        if self.max_ball_elements < 1 or self.threads < 1:
            raise ValueError("caps and thread count must be positive")
        if self.order_cap is not None and self.order_cap < 1:
            raise ValueError("order cap must be positive")
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radius schedule must be strictly increasing")


@dataclass
class Source:
    label: str
    cryst: CrystGroup | None = None
    algebra: NilAlgebra | None = None
    auto: NilAutomorphism | None = None

    @property
    def point_group(self):
        if self.cryst is not None:
            return self.cryst.point_group
        if self.auto is None:
            return closure([la.identity(self.algebra.dim)])
        return closure([self.auto.matrix], dim=self.algebra.dim)

    @property
    def predicted_degree(self) -> int:
        if self.cryst is not None:
            return self.cryst.dim
        return self.algebra.lcs.degree


def _parse_fraction(text: str) -> tuple[int, int]:
    p, _, q = text.partition("/")
    try:
        return int(p), int(q or 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p/q, got {text!r}") from None


def _parse_radii(text: str) -> list[int]:
    try:
        radii = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"radii must be comma-separated integers: {text!r}") from None
    if not radii:
        raise argparse.ArgumentTypeError("empty radius schedule")
    return radii


def resolve_source(args) -> Source:
    if args.catalog:
        e = catalog_entry(args.catalog)
        return Source(e.name, cryst=e.group)
    if args.file:
        G = load_group(args.file)
        return Source(G.name or args.file, cryst=G)
    if args.cyclotomic is not None:
        return Source(f"Gamma_{args.cyclotomic}", cryst=gamma_m(args.cyclotomic))
    if args.rational is not None:
        p, q = args.rational
        return Source(f"rational {p}/{q}", cryst=rational_density_group(p, q))
    if args.zn is not None:
        return Source(f"Z^{args.zn}", cryst=zn(args.zn))
    if args.heisenberg is not None:
        return Source(f"h_{args.heisenberg} lattice", algebra=heisenberg(args.heisenberg))
    if args.heisenberg2_example:
        a = heisenberg(2)
        return Source("h_2 x| <T>", algebra=a, auto=h2_automorphism(a))
    if args.algebra:
        a, auto = load_algebra(args.algebra)
        return Source(args.algebra, algebra=a, auto=auto)
    raise TorsionDensityError("no group source given (try --catalog NAME)")


# ---------------------------------------------------------------------------
# output

def _emit(rows: list[dict], fmt: str, header: dict | None = None, out=None):
    out = out or sys.stdout
    if fmt == "json":
        payload = dict(header or {})
        payload["rows"] = rows
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    if fmt == "csv":
        if not rows:
            return
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        out.write(buf.getvalue())
        return
    for k, v in (header or {}).items():
        out.write(f"{k}: {v}\n")
    if rows:
        cols = list(rows[0])
        widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
        out.write("  ".join(c.ljust(widths[c]) for c in cols).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(str(r[c]).ljust(widths[c]) for c in cols).rstrip() + "\n")


def _est(x) -> str:
    return f"{float(x):.4f}"


def _matrix_str(A) -> str:
    return "[" + ";".join(",".join(str(x) for x in row) for row in A) + "]"


# ---------------------------------------------------------------------------
# commands

def cmd_density(args, cfg: RunConfig) -> int:
    src = resolve_source(args)
    report = density_exact(src.point_group)
    header = {
        "group": src.label,
        "dim": src.point_group.dim,
        "point_group_order": report.group_order,
        "m": report.m,
        "density": la.format_rational(report.density),
    }
    rows = []
    if not args.no_elements:
        for i, rec in enumerate(report.per_element):
            rows.append({
                "index": i,
                "matrix": _matrix_str(rec.matrix),
                "order": rec.order,
                "eigenvalue_one": "yes" if rec.has_eigenvalue_one else "no",
            })
    _emit(rows, cfg.output_format, header)
    return 0


def _cryst_stats(src: Source, cfg: RunConfig):
    return ball_sequence(src.cryst, cfg.radii, max_elements=cfg.max_ball_elements, order_cap=cfg.order_cap)


def _nil_stats(src: Source, cfg: RunConfig):
    return nil_ball_bfs(src.algebra, cfg.radii, src.auto, max_elements=cfg.max_ball_elements,
                        workers=cfg.threads).stats


def _stats_for(src: Source, cfg: RunConfig):
    return _cryst_stats(src, cfg) if src.cryst is not None else _nil_stats(src, cfg)


def cmd_verify(args, cfg: RunConfig) -> int:
    src = resolve_source(args)
    exact = density_exact(src.point_group).density
    stats = _stats_for(src, cfg)
    rows = []
    gap = None
    for s in stats:
        emp = empirical_density(s)
        gap = abs(emp - exact)
        cosets = ";".join(f"{_matrix_str(A)}:{c}/{t}" for A, (c, t) in sorted(s.per_coset.items()))
        rows.append({
            "radius": s.radius,
            "total": s.total,
            "torsion": s.torsion,
            "empirical_density_est": _est(emp),
            "gap_est": _est(gap),
            "coset_deviation_est": _est(coset_equidistribution(s)),
            "per_coset": cosets,
        })
    ok = gap is not None and gap <= args.tol
    header = {
        "group": src.label,
        "exact_density": la.format_rational(exact),
        "tolerance": args.tol,
        "result": "PASS" if ok else "FAIL",
    }
    _emit(rows, cfg.output_format, header)
    return 0 if ok else 1


def cmd_catalog(args, cfg: RunConfig) -> int:
    rows = []
    for e in load_catalog():
        rep = density_exact(e.group.point_group)
        rows.append({
            "name": e.name,
            "point_group_order": rep.group_order,
            "m": rep.m,
            "density": la.format_rational(rep.density),
        })
    _emit(rows, cfg.output_format)
    return 0


def cmd_growth(args, cfg: RunConfig) -> int:
    src = resolve_source(args)
    stats = _stats_for(src, cfg)
    slope = growth_degree_fit(stats)
    d = src.predicted_degree
    ok = abs(slope - d) <= args.tol
    rows = [{"radius": s.radius, "total": s.total} for s in stats]
    header = {
        "group": src.label,
        "slope_est": _est(slope),
        "predicted_degree": d,
        "tolerance": args.tol,
        "result": "PASS" if ok else "FAIL",
    }
    _emit(rows, cfg.output_format, header)
    return 0 if ok else 1


# ---------------------------------------------------------------------------

def _add_source_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--catalog", metavar="NAME", help="plane group from the embedded catalog")
    g.add_argument("--file", metavar="PATH", help="group definition file (JSON)")
    g.add_argument("--cyclotomic", type=int, metavar="M", help="Gamma_m built from the m-th cyclotomic polynomial")
    g.add_argument("--rational", type=_parse_fraction, metavar="P/Q", help="group with density p/q")
    g.add_argument("--zn", type=int, metavar="N", help="the lattice Z^n")
    g.add_argument("--heisenberg", type=int, metavar="N", help="integral lattice of the Heisenberg algebra h_n")
    g.add_argument("--heisenberg2-example", action="store_true", help="h_2 lattice extended by its order-4 automorphism")
    g.add_argument("--algebra", metavar="PATH", help="nilpotent algebra file, optionally with an automorphism")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--max-ball", type=int, default=DEFAULT_MAX_BALL, help="abort when a ball exceeds this many elements")
    common.add_argument("--order-cap", type=int, default=None, help="cap for finite-order searches")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker processes for nilpotent ball censuses (default ${THREADS_ENV} or 1)")

    parser = argparse.ArgumentParser(prog="torsion-density", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", parents=[common], help="exact density m/|F| from the holonomy census")
    _add_source_args(p)
    p.add_argument("--no-elements", action="store_true", help="omit the per-element table")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("verify", parents=[common], help="compare the exact density with word-ball censuses")
    _add_source_args(p)
    p.add_argument("--radii", type=_parse_radii, default=[8, 16, 32])
    p.add_argument("--tol", type=float, default=0.1, help="allowed final gap (default 0.1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", parents=[common], help="density table for the 17 plane groups")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("growth", parents=[common], help="fit the polynomial growth degree")
    _add_source_args(p)
    p.add_argument("--radii", type=_parse_radii, default=[8, 16, 32])
    p.add_argument("--tol", type=float, default=0.5, help="allowed |slope - d| (default 0.5)")
    p.set_defaults(func=cmd_growth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = args.threads if args.threads is not None else int(os.environ.get(THREADS_ENV, "1"))
    try:
        cfg = RunConfig(
            max_ball_elements=args.max_ball,
            radii=getattr(args, "radii", []),
            threads=threads,
            output_format=args.format,
            order_cap=args.order_cap,
        )
        return args.func(args, cfg)
    except BallTooLarge as exc:
        print(f"error: {exc} (radius {exc.radius})", file=sys.stderr)
        return 2
    except (TorsionDensityError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
