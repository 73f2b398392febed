"""Command-line surface tying the modules together.

Subcommands: curve, surface, steiner, integral-geometry, regge, lk, cgb,
converge.  Exit codes: 0 success, 2 validation/parse error, 3 numerical
check failure.  All randomized commands take an explicit --seed (default
0xDD6C); identical configurations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import analytic
from .complexes import cone_angles, validate
from .config import DEFAULT_TOLERANCES, TOLERANCE_KEYS, Tolerances
from .curves import (
    PlanarPolygon,
    SpacePolygon,
    crofton_length_estimate,
    open_hemisphere_witness,
    signed_turning_angles,
    tangent_indicatrix,
    total_curvature,
    turning_number,
)
from .errors import GeometryError, ParseError, StallError
from .io import load_surface, parse_complex_json, parse_polygon_json, write_table
from .lk import cgb_check, lk_total
from .montecarlo import DEFAULT_SEED, MCConfig
from .regge import regge_functional, regge_gradient, regge_relax
from .surfaces import (
    ConvexPolyhedron,
    edge_exterior_angles,
    euler_characteristic,
    gauss_bonnet_check,
    mean_projection_area,
    mean_width,
    steiner_polynomials,
    total_mean_curvature,
    vertex_angle_defects,
    vertex_exterior_angles,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


@dataclass
class RunConfig:
    """Seed, sample budget, tolerance overrides, and output target."""

    seed: int = DEFAULT_SEED
    mc_samples: int = 100_000
    tolerances: Tolerances = field(default_factory=lambda: DEFAULT_TOLERANCES)
    out: Path | None = None
    format: str = "csv"

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        overrides = {}
        for item in args.tol or []:
            key, _, value = item.partition("=")
            if key not in TOLERANCE_KEYS:
                raise ParseError(f"unknown tolerance key {key!r} "
                                 f"(known: {', '.join(TOLERANCE_KEYS)})")
            try:
                overrides[key] = float(value)
            except ValueError:
                raise ParseError(f"bad tolerance value in {item!r}") from None
        seed = int(args.seed)
        samples = int(args.samples)
        if seed <= 0 or samples <= 0:
            raise ParseError("seed and samples must be positive")
        return cls(seed=seed, mc_samples=samples,
                   tolerances=DEFAULT_TOLERANCES.updated(**overrides),
                   out=Path(args.out) if args.out else None,
                   format=args.format)

    def emit(self, header, rows) -> None:
        if self.out is not None:
            write_table(self.out, header, rows, self.format)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", default=DEFAULT_SEED, type=int,
                   help="seed for randomized estimates (default 0xDD6C)")
    p.add_argument("--samples", default=100_000, type=int,
                   help="Monte Carlo sample budget")
    p.add_argument("--tol", action="append", metavar="KEY=VALUE",
                   help="tolerance override, repeatable")
    p.add_argument("--out", help="write the report table to this path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def _cmd_curve(args) -> int:
    cfg = RunConfig.from_args(args)
    poly = parse_polygon_json(_read(args.input), tol=cfg.tolerances)
    rows = []
    if isinstance(poly, PlanarPolygon):
        angles = signed_turning_angles(poly)
        k = turning_number(poly)
        total = float(angles.sum())
        print(f"planar polygon: {len(poly)} vertices")
        print(f"total signed turning: {total!r}")
        print(f"turning number: {k}")
        space = SpacePolygon(
            [[float(x), float(y), 0.0] for x, y in poly.vertices],
            tol=cfg.tolerances)
    else:
        space = poly
        angles = None
    if space.closed:
        tc = total_curvature(space)
        ind = tangent_indicatrix(space)
        witness = open_hemisphere_witness(ind)
        est = crofton_length_estimate(ind, samples=cfg.mc_samples, seed=cfg.seed)
        print(f"total curvature: {tc.total!r} (fenchel equality: "
              f"{tc.fenchel_equality})")
        print(f"indicatrix length: {ind.length()!r}")
        print(f"hemisphere witness: {'none' if witness is None else list(witness)}")
        print(f"crofton estimate: {est.mean!r} +- {est.stderr!r} "
              f"({est.samples} samples, seed {est.seed})")
        if angles is None:
            from .curves import turning_angles
            angles = turning_angles(space)
    rows = [(i, float(a)) for i, a in enumerate(angles)]
    cfg.emit(("vertex", "turning_angle"), rows)
    return EXIT_OK


def _cmd_surface(args) -> int:
    cfg = RunConfig.from_args(args)
    mesh = load_surface(args.input, tol=cfg.tolerances)
    chi = euler_characteristic(mesh)
    report = gauss_bonnet_check(mesh)
    v2 = total_mean_curvature(mesh)
    defects = vertex_angle_defects(mesh)
    print(f"surface: {mesh.n_vertices} vertices, {mesh.n_edges} edges, "
          f"{mesh.n_faces} faces; chi = {chi}")
    print(f"area: {mesh.surface_area()!r}")
    print(f"total mean curvature: {v2!r}")
    print(f"total defect: {report.total_defect!r} "
          f"(2*pi*chi = {report.expected!r}, residual {report.residual:.3e})")
    cfg.emit(("vertex", "angle_defect"),
             [(v, d) for v, d in sorted(defects.items())])
    if args.edges_out:
        table = edge_exterior_angles(mesh)
        write_table(args.edges_out, ("edge", "exterior_angle", "length"),
                    [(e, b, l) for e, (b, l) in sorted(table.items())],
                    cfg.format)
    if not report.passed:
        print("gauss-bonnet residual above tolerance", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_steiner(args) -> int:
    cfg = RunConfig.from_args(args)
    mesh = load_surface(args.input, tol=cfg.tolerances)
    if not isinstance(mesh, ConvexPolyhedron):
        mesh = ConvexPolyhedron.from_triangle_mesh(mesh)
    st = steiner_polynomials(mesh)
    co = st.coefficients
    print(f"V0 (volume): {co.V0!r}")
    print(f"V1 (area): {co.V1!r}")
    print(f"V2 (total mean curvature): {co.V2!r}")
    print(f"V3: {co.V3!r} (4*pi/3 = {4 * math.pi / 3!r})")
    radii = [float(r) for r in (args.radius or [0.0, 0.5, 1.0])]
    rows = [(r, st.area_at(r), st.volume_at(r)) for r in radii]
    for r, a, v in rows:
        print(f"r = {r}: area {a!r}, volume {v!r}")
    cfg.emit(("r", "area", "volume"), rows)
    return EXIT_OK


def _cmd_integral_geometry(args) -> int:
    cfg = RunConfig.from_args(args)
    mesh = load_surface(args.input, tol=cfg.tolerances)
    if not isinstance(mesh, ConvexPolyhedron):
        mesh = ConvexPolyhedron.from_triangle_mesh(mesh)
    v2 = total_mean_curvature(mesh)
    area = mesh.surface_area()
    mw = mean_width(mesh, samples=cfg.mc_samples, seed=cfg.seed)
    mp = mean_projection_area(mesh, samples=cfg.mc_samples,
                              seed=cfg.seed + 1)
    width_pred = 2.0 * math.pi * mw.mean
    proj_pred = 4.0 * mp.mean
    print(f"mean width: {mw.mean!r} +- {mw.stderr!r}")
    print(f"2*pi*mean width: {width_pred!r} vs total mean curvature {v2!r} "
          f"({mw.sigmas_from(v2 / (2 * math.pi)):.2f} sigma)")
    print(f"mean projection area: {mp.mean!r} +- {mp.stderr!r}")
    print(f"4*mean projection: {proj_pred!r} vs area {area!r} "
          f"({mp.sigmas_from(area / 4.0):.2f} sigma)")
    cfg.emit(("quantity", "estimate", "stderr", "samples", "seed"),
             [("mean_width", mw.mean, mw.stderr, mw.samples, mw.seed),
              ("mean_projection_area", mp.mean, mp.stderr, mp.samples, mp.seed)])
    if mw.sigmas_from(v2 / (2 * math.pi)) > 4.0 or \
            mp.sigmas_from(area / 4.0) > 4.0:
        print("integral-geometry identity violated beyond 4 sigma",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_regge(args) -> int:
    cfg = RunConfig.from_args(args)
    metric = parse_complex_json(_read(args.input), tol=cfg.tolerances)
    report = validate(metric)
    print(f"complex: dim {report.dim}, f-vector {report.f_vector}, "
          f"chi {report.euler_characteristic}")
    table = cone_angles(metric)
    F = regge_functional(metric, table)
    print(f"total scalar curvature: {F!r}")
    print(f"max |deficit|: {table.max_abs_deficit()!r}")
    if args.relax:
        try:
            result = regge_relax(metric, tolerance=args.relax_tol,
                                 max_iters=args.max_iters,
                                 volume_normalization=args.normalize_volume)
        except StallError as exc:
            result = exc.result
            print(f"relaxation stalled: {exc}", file=sys.stderr)
            _emit_trajectory(cfg, result)
            return EXIT_NUMERICAL
        print(f"relaxation: converged={result.converged} "
              f"iterations={result.iterations} "
              f"max|K|={result.final_max_deficit!r}")
        _emit_trajectory(cfg, result)
        return EXIT_OK if result.converged else EXIT_NUMERICAL
    if args.grad:
        grad = regge_gradient(metric, table)
        rows = [(e, metric.lengths[e], grad[e]) for e in sorted(grad)]
        cfg.emit(("edge", "length", "dF_dl"), rows)
        gmax = max(abs(g) for g in grad.values())
        print(f"max |dF/dl|: {gmax!r}")
    else:
        rows = [(r.face, r.cone_angle, r.deficit, r.volume) for r in table]
        cfg.emit(("face", "cone_angle", "deficit", "volume"), rows)
    return EXIT_OK


def _emit_trajectory(cfg: RunConfig, result) -> None:
    cfg.emit(("iteration", "energy", "max_abs_deficit", "total_volume"),
             [(s.iteration, s.energy, s.max_abs_deficit, s.total_volume)
              for s in result.steps])


def _cmd_lk(args) -> int:
    cfg = RunConfig.from_args(args)
    metric = parse_complex_json(_read(args.input), tol=cfg.tolerances)
    report = lk_total(metric, args.k,
                      MCConfig(samples=cfg.mc_samples, seed=cfg.seed))
    kind = "exact" if report.exact else "monte carlo"
    print(f"S_{2 * args.k}: {report.total!r} +- {report.stderr!r} ({kind})")
    cfg.emit(("face", "curvature", "stderr", "volume"),
             [(r.face, r.curvature, r.stderr, r.volume) for r in report])
    return EXIT_OK


def _cmd_cgb(args) -> int:
    cfg = RunConfig.from_args(args)
    metric = parse_complex_json(_read(args.input), tol=cfg.tolerances)
    report = cgb_check(metric, MCConfig(samples=cfg.mc_samples, seed=cfg.seed))
    print(f"sum of vertex curvatures: {report.total!r} +- {report.stderr!r}")
    print(f"euler characteristic: {report.euler_characteristic}")
    print(f"residual: {report.residual!r}")
    cfg.emit(("quantity", "value"),
             [("total", report.total), ("stderr", report.stderr),
              ("chi", report.euler_characteristic),
              ("residual", report.residual)])
    if not report.within():
        print("chern-gauss-bonnet residual out of bounds", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_converge(args) -> int:
    cfg = RunConfig.from_args(args)
    builder = analytic.EXPERIMENTS.get(args.experiment)
    if builder is None:
        raise ParseError(f"unknown experiment {args.experiment!r} "
                         f"(known: {', '.join(sorted(analytic.EXPERIMENTS))})")
    report = builder(args.schedule) if args.schedule else builder()
    print(f"experiment: {report.quantity}")
    for row in report:
        print(f"  {row.refinement:g}: discrete {row.discrete!r} "
              f"analytic {row.analytic!r} rel_err {row.rel_err:.3e}")
    print(f"errors monotone: {report.monotone}")
    cfg.emit(("refinement", "discrete", "analytic", "abs_err", "rel_err"),
             [(r.refinement, r.discrete, r.analytic, r.abs_err, r.rel_err)
              for r in report])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polycurv",
        description="Discrete curvature of polygons, surfaces, and "
                    "polyhedral manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="turning angles and total curvature "
                                     "of a polygon (JSON vertex list)")
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("surface", help="defects and Gauss-Bonnet of an "
                                       "OFF surface")
    p.add_argument("input")
    p.add_argument("--edges-out",
                   help="also write the per-edge exterior-angle table here")
    _add_common(p)
    p.set_defaults(func=_cmd_surface)

    p = sub.add_parser("steiner", help="Steiner polynomials of a convex "
                                       "OFF polyhedron")
    p.add_argument("input")
    p.add_argument("--radius", "-r", action="append", type=float,
                   help="evaluate area(r)/vol(r), repeatable")
    _add_common(p)
    p.set_defaults(func=_cmd_steiner)

    p = sub.add_parser("integral-geometry",
                       help="mean width / mean projection identities")
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(func=_cmd_integral_geometry)

    p = sub.add_parser("regge", help="total scalar curvature of a "
                                     "polyhedral metric (JSON complex)")
    p.add_argument("input")
    p.add_argument("--grad", action="store_true",
                   help="report the exact gradient instead of the table")
    p.add_argument("--relax", action="store_true",
                   help="relax toward a flat metric")
    p.add_argument("--relax-tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--normalize-volume", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_regge)

    p = sub.add_parser("lk", help="total Lipschitz-Killing curvature S_2k")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=_cmd_lk)

    p = sub.add_parser("cgb", help="discrete Chern-Gauss-Bonnet check")
    p.add_argument("input")
    _add_common(p)
    p.set_defaults(func=_cmd_cgb)

    p = sub.add_parser("converge", help="convergence tables against "
                                        "analytic oracles")
    p.add_argument("--experiment", required=True)
    p.add_argument("--schedule", type=float, nargs="+",
                   help="refinement schedule (levels or sample counts)")
    _add_common(p)
    p.set_defaults(func=_cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
