"""Acceptance criteria, one test per criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one pass line
per criterion; any assertion failure marks the criterion failed.
"""

import math
import time

import numpy as np
import pytest

from polycurv import MCConfig
from polycurv.analytic import (
    helix_curvature_report,
    icosphere_area_report,
    icosphere_mean_curvature_report,
)
from polycurv.complexes import (
    PolyhedralMetric,
    barycentric_subdivide,
    boundary_of_simplex,
    cone_angles,
    flat_torus_2d,
    flat_torus_3d,
)
from polycurv.curves import (
    PlanarPolygon,
    SpacePolygon,
    crofton_length_estimate,
    open_hemisphere_witness,
    signed_turning_angles,
    tangent_indicatrix,
    total_curvature,
    turning_number,
)
from polycurv.geom import (
    SphericalPolygon,
    TET_EDGE_SLOTS,
    external_angle,
    random_realizable_simplex,
    tetra_dihedral_angles_batch,
)
from polycurv.lk import cgb_check
from polycurv.montecarlo import derived_seed
from polycurv.regge import regge_functional, regge_gradient, regge_relax
from polycurv.shapes import (
    cube,
    genus2_mesh,
    icosphere,
    regular_tetrahedron,
    regular_tetrahedron_mesh,
    torus_mesh,
)
from polycurv.surfaces import (
    gauss_bonnet_check,
    mean_projection_area,
    mean_width,
    steiner_polynomials,
    total_mean_curvature,
    vertex_angle_defects,
    vertex_exterior_angles,
)

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi
D4_DEFICIT = TWO_PI - 3.0 * math.acos(1.0 / 3.0)

UNIT_SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
CROSSING_OCTAGON = [(0, 0), (0.9, 1.15), (2, 2), (2.1, 1.0),
                    (2, 0), (0.9, 0.85), (0, 2), (-0.1, 1.0)]


def _done(n, message):
    print(f"criterion {n:02d} PASS - {message}")


def _random_star_polygon(rng, n):
    while True:
        angles = np.sort(rng.uniform(0, TWO_PI, size=n))
        gaps = np.diff(np.concatenate([angles, [angles[0] + TWO_PI]]))
        if np.min(gaps) > 1e-3 and np.max(gaps) < math.pi - 0.05:
            break
    radii = rng.uniform(0.5, 1.5, size=n)
    return PlanarPolygon(np.column_stack([radii * np.cos(angles),
                                          radii * np.sin(angles)]))


def _random_space_polygon(rng, n):
    return SpacePolygon(rng.uniform(-1, 1, size=(n, 3)))


def _perturbed(metric, scale, seed):
    rng = np.random.default_rng(seed)
    return metric.with_lengths({e: v * (1.0 + scale * rng.uniform(-1, 1))
                                for e, v in metric.lengths.items()})


def test_criterion_01_turning_numbers():
    start = time.monotonic()
    assert turning_number(PlanarPolygon(UNIT_SQUARE)) == 1
    assert turning_number(PlanarPolygon(UNIT_SQUARE[::-1])) == -1
    assert turning_number(PlanarPolygon(CROSSING_OCTAGON)) == 0
    rng = np.random.default_rng(0xC1)
    for _ in range(1000):
        p = _random_star_polygon(rng, int(rng.integers(4, 21)))
        total = float(signed_turning_angles(p).sum())
        assert abs(total - TWO_PI * turning_number(p)) <= 1e-8
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _done(1, f"turning numbers +1/-1/0 and 1000 random polygons in {elapsed:.2f}s")


def test_criterion_02_fenchel():
    start = time.monotonic()
    rng = np.random.default_rng(0xC2)
    for _ in range(1000):
        p = _random_space_polygon(rng, int(rng.integers(4, 21)))
        assert total_curvature(p).total >= TWO_PI - 1e-9
    for n in (3, 5, 8, 13):
        pts = [(2 * math.cos(TWO_PI * k / n), math.sin(TWO_PI * k / n), 0.0)
               for k in range(n)]
        total, flag = total_curvature(SpacePolygon(pts))
        assert abs(total - TWO_PI) <= 1e-9
        assert flag
    elapsed = time.monotonic() - start
    assert elapsed < 1.0
    _done(2, f"Fenchel bound on 1000 random and 4 convex polygons in {elapsed:.2f}s")


def test_criterion_03_indicatrix_identity():
    rng = np.random.default_rng(0xC3)
    for _ in range(500):
        p = _random_space_polygon(rng, int(rng.integers(4, 15)))
        ind = tangent_indicatrix(p)
        assert abs(total_curvature(p).total - ind.length()) <= 1e-10
        assert open_hemisphere_witness(ind) is None
    _done(3, "total curvature = indicatrix length and no hemisphere witness, "
             "500 random polygons")


def test_criterion_04_crofton():
    start = time.monotonic()
    arc = SphericalPolygon([(1, 0, 0), (0, 1, 0)], closed=False)
    est = crofton_length_estimate(arc, samples=1_000_000, seed=0xC4)
    assert est.sigmas_from(math.pi / 2) <= 3.0
    rng = np.random.default_rng(0xC4)
    p = _random_space_polygon(rng, 12)
    ind = tangent_indicatrix(p)
    cross = crofton_length_estimate(ind, samples=1_000_000, seed=0xC4 + 1)
    assert cross.sigmas_from(ind.length()) <= 4.0
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    _done(4, f"Crofton arc {est.mean:.5f}+-{est.stderr:.1e} and indicatrix "
             f"cross-check in {elapsed:.1f}s")


def test_criterion_05_cube_suite():
    start = time.monotonic()
    c = cube()
    beta_v = vertex_exterior_angles(c)
    defects = vertex_angle_defects(c)
    assert abs(sum(beta_v.values()) - FOUR_PI) <= 1e-9
    for v in beta_v:
        assert abs(beta_v[v] - defects[v]) <= 1e-9
    v2 = total_mean_curvature(c)
    assert abs(v2 - 3 * math.pi) <= 1e-9
    st = steiner_polynomials(c)
    assert abs(st.coefficients.V3 - FOUR_PI / 3.0) <= 1e-9
    predicted = st.volume_at(1.0)
    assert abs(predicted - (7 + 3 * math.pi + FOUR_PI / 3)) <= 1e-9
    # independent oracle: 1e7-point Monte Carlo volume of the r=1 neighborhood
    rng = np.random.default_rng(0xC5)
    n = 10_000_000
    hits = 0
    for _ in range(10):
        pts = rng.uniform(-1.0, 2.0, size=(n // 10, 3))
        d = np.maximum(pts - 1.0, 0.0) + np.maximum(-pts, 0.0)
        hits += int(np.count_nonzero(np.einsum("ij,ij->i", d, d) <= 1.0))
    box = 27.0
    prob = hits / n
    mc = box * prob
    stderr = box * math.sqrt(prob * (1 - prob) / n)
    assert abs(predicted - mc) <= 3 * stderr
    elapsed = time.monotonic() - start
    assert elapsed < 30.0
    _done(5, f"cube suite incl. Steiner vol(1)={predicted:.6f} vs "
             f"MC {mc:.6f}+-{stderr:.1e} in {elapsed:.1f}s")


def test_criterion_06_gauss_bonnet():
    fixtures = [cube(), regular_tetrahedron_mesh(),
                torus_mesh(2.0, 0.5, 16, 16), torus_mesh(1.5, 0.4, 9, 7),
                genus2_mesh()]
    fixtures += [icosphere(1.0, level) for level in range(5)]
    for m in fixtures:
        report = gauss_bonnet_check(m)
        assert report.residual <= 1e-8
    _done(6, f"Gauss-Bonnet residual <= 1e-8 on {len(fixtures)} fixtures "
             f"(chi = 2, 0, -2)")


def test_criterion_07_mean_width_and_projection():
    c = cube()
    mw = mean_width(c, samples=1_000_000, seed=0xC7)
    assert mw.sigmas_from(1.5) <= 3.0
    v2 = total_mean_curvature(c)
    assert abs(TWO_PI * mw.mean - v2) <= 3.0 * TWO_PI * mw.stderr
    mp = mean_projection_area(c, samples=1_000_000, seed=0xC7 + 1)
    assert mp.sigmas_from(1.5) <= 3.0
    # the working constant is area = 4 * mean projection (not 1/(2*pi))
    assert abs(4.0 * mp.mean - c.surface_area()) <= 12.0 * mp.stderr
    _done(7, f"cube mean width {mw.mean:.5f} (V2 link) and mean projection "
             f"{mp.mean:.5f} (area = 4x link)")


def test_criterion_08_schlaefli():
    rng = np.random.default_rng(0xC8)
    tets = [random_realizable_simplex(rng, 3) for _ in range(200)]
    L = np.array([[t.length(*e) for e in TET_EDGE_SLOTS] for t in tets])
    h = 1e-5
    worst = 0.0
    for s in range(6):
        Lp = L.copy()
        Lm = L.copy()
        Lp[:, s] += h
        Lm[:, s] -= h
        dA = (tetra_dihedral_angles_batch(Lp)
              - tetra_dihedral_angles_batch(Lm)) / (2 * h)
        residual = np.abs((L * dA).sum(axis=1))
        worst = max(worst, float(residual.max()))
        assert np.all(residual <= 1e-6)
    _done(8, f"Schlaefli residual <= 1e-6 on 200 random tetrahedra "
             f"(worst {worst:.1e})")


def test_criterion_09_regge_gradient():
    # dimension 3: the gradient component at an edge is the deficit itself
    for metric in (boundary_of_simplex(4), flat_torus_3d(3),
                   _perturbed(flat_torus_3d(3), 0.02, 0xC9)):
        table = cone_angles(metric)
        grad = regge_gradient(metric, table)
        for row in table:
            assert abs(grad[row.face] - row.deficit) <= 1e-12
    # dimension 4: central differences of F converge at O(h^2)
    metric = _perturbed(boundary_of_simplex(5), 0.02, 0xC9)
    analytic = regge_gradient(metric)
    residuals = {}
    for h in (1e-3, 1e-4):
        worst = 0.0
        for e in metric.complex.edges():
            lp = dict(metric.lengths)
            lm = dict(metric.lengths)
            lp[e] += h
            lm[e] -= h
            fd = (regge_functional(metric.with_lengths(lp))
                  - regge_functional(metric.with_lengths(lm))) / (2 * h)
            worst = max(worst, abs(fd - analytic[e]))
        residuals[h] = worst
    ratio = residuals[1e-3] / residuals[1e-4]
    assert residuals[1e-4] <= 1e-6
    assert ratio > 20.0
    _done(9, f"dim-3 gradient = deficits (1e-12); dim-4 FD ratio {ratio:.0f}x "
             f"for 10x step shrink")


def test_criterion_10_regge_values():
    torus = flat_torus_3d(3)
    table = cone_angles(torus)
    assert table.max_abs_deficit() <= 1e-9
    assert abs(regge_functional(torus, table)) <= 1e-9
    sphere = boundary_of_simplex(4)
    table = cone_angles(sphere)
    for row in table:
        assert abs(row.deficit - D4_DEFICIT) <= 1e-10
    F = regge_functional(sphere, table)
    assert abs(F - 10.0 * D4_DEFICIT) <= 1e-9
    _done(10, f"flat 3-torus F = 0 and round S^3 F = {F:.9f} "
              f"= 10 x (2pi - 3 acos(1/3))")


def test_criterion_11_relaxation():
    start = time.monotonic()
    noisy = _perturbed(flat_torus_3d(3), 0.02, 0xCB)
    result = regge_relax(noisy, tolerance=1e-6, max_iters=10_000)
    elapsed = time.monotonic() - start
    assert result.converged
    assert result.iterations <= 10_000
    assert result.final_max_deficit < 1e-6
    assert elapsed < 60.0
    _done(11, f"perturbed flat 3-torus relaxed to max|K| = "
              f"{result.final_max_deficit:.1e} in {result.iterations} "
              f"iterations, {elapsed:.1f}s")


def test_criterion_12_subdivision_invariance():
    for metric in (boundary_of_simplex(4),
                   _perturbed(flat_torus_3d(3), 0.01, 0xCC)):
        sub = barycentric_subdivide(metric)
        assert abs(regge_functional(sub) - regge_functional(metric)) <= 1e-8
    flat_sub = barycentric_subdivide(flat_torus_3d(3))
    assert cone_angles(flat_sub).max_abs_deficit() <= 1e-9
    _done(12, "F invariant under barycentric subdivision; flat stays flat")


def test_criterion_13_chern_gauss_bonnet():
    start = time.monotonic()
    # dimension 2, exact
    for metric, chi in ((boundary_of_simplex(3), 2),
                        (flat_torus_2d(3, 3), 0),
                        (PolyhedralMetric.from_triangle_mesh(genus2_mesh()), -2)):
        report = cgb_check(metric)
        assert report.exact
        assert report.euler_characteristic == chi
        assert report.residual <= 1e-10
    # dimension 4, Monte Carlo at 1e6 samples per cone
    mc = MCConfig(samples=1_000_000, seed=0xCD)
    sphere4 = boundary_of_simplex(5)
    report = cgb_check(sphere4, mc)
    assert report.euler_characteristic == 2
    assert report.residual <= 3.0 * report.stderr
    # per-simplex normalization: vertex external angles of every top
    # 4-simplex sum to 1 within the propagated Monte Carlo bound
    for top in sphere4.complex.top_simplices:
        ms = sphere4.face_simplex(top)
        total = 0.0
        variance = 0.0
        for v in range(5):
            cfg = MCConfig(samples=mc.samples,
                           seed=derived_seed(mc.seed, v, *top))
            est = external_angle(ms, (v,), cfg)
            total += est.mean
            variance += est.stderr ** 2
        assert abs(total - 1.0) <= 3.0 * math.sqrt(variance)
    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    _done(13, f"CGB exact in dim 2 (chi = 2, 0, -2); dim 4 total "
              f"{report.total:.4f}+-{report.stderr:.4f} vs chi = 2; "
              f"normal cones tile, {elapsed:.0f}s")


def test_criterion_14_convergence():
    v2 = icosphere_mean_curvature_report(levels=(1, 2, 3, 4, 5))
    assert v2.monotone
    assert v2.final_rel_err() < 0.01
    area = icosphere_area_report(levels=(1, 2, 3, 4, 5))
    assert area.monotone
    assert area.final_rel_err() < 0.005
    helix = helix_curvature_report(ns=(10, 100, 1000, 10_000))
    assert helix.monotone
    assert helix.final_rel_err() < 1e-4
    _done(14, f"icosphere level 5: V2 rel err {v2.final_rel_err():.1e}, "
              f"area {area.final_rel_err():.1e}; helix at 1e4: "
              f"{helix.final_rel_err():.1e}")
