import math

import numpy as np
import pytest

from polycurv import (
    MCConfig,
    MetricSimplex,
    MissingLength,
    NonManifold,
    OddDimension,
    StallError,
    UnrealizableMetric,
)
from polycurv.complexes import (
    PolyhedralMetric,
    SimplicialComplex,
    barycentric_subdivide,
    boundary_of_simplex,
    cone_angles,
    euler_characteristic,
    flat_torus_2d,
    flat_torus_3d,
    subdivide_simplex,
    validate,
)
from polycurv.lk import cgb_check, lk_curvature, lk_total
from polycurv.regge import regge_functional, regge_gradient, regge_relax
from polycurv.shapes import genus2_mesh, torus_mesh

TWO_PI = 2.0 * math.pi
D4_DEFICIT = TWO_PI - 3.0 * math.acos(1.0 / 3.0)


def _perturbed(metric, scale, seed):
    rng = np.random.default_rng(seed)
    return metric.with_lengths({e: v * (1.0 + scale * rng.uniform(-1, 1))
                                for e, v in metric.lengths.items()})


# ---------------------------------------------------------------------------
# validation


def test_boundary_of_4_simplex_valid():
    m = boundary_of_simplex(4)
    assert m.complex.f_vector() == (5, 10, 10, 5)
    report = validate(m)
    assert report.valid
    assert report.n_components == 1


def test_open_complex_rejected():
    # two tetrahedra glued along a single triangle leave boundary faces
    with pytest.raises(NonManifold):
        SimplicialComplex(3, [(0, 1, 2, 3), (0, 1, 2, 4)])


def test_flat_tetrahedron_in_complex_rejected():
    # the 2-3 length sqrt(3) folds two unit triangles flat
    tops = [(0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 3, 4), (0, 2, 3, 4), (1, 2, 3, 4)]
    lengths = {e: 1.0 for e in SimplicialComplex(3, tops).edges()}
    lengths[(2, 3)] = math.sqrt(3.0)
    with pytest.raises(UnrealizableMetric) as exc:
        PolyhedralMetric(SimplicialComplex(3, tops), lengths)
    assert exc.value.vertices is not None


def test_missing_length_names_edge():
    tops = list(SimplicialComplex(3, [(0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 3, 4),
                                      (0, 2, 3, 4), (1, 2, 3, 4)]).top_simplices)
    complex_ = SimplicialComplex(3, tops)
    lengths = {e: 1.0 for e in complex_.edges()}
    del lengths[(1, 3)]
    with pytest.raises(MissingLength) as exc:
        PolyhedralMetric(complex_, lengths)
    assert exc.value.edge == (1, 3)


def test_euler_characteristics():
    assert euler_characteristic(boundary_of_simplex(4)) == 0   # S^3
    assert euler_characteristic(boundary_of_simplex(5)) == 2   # S^4
    assert euler_characteristic(flat_torus_3d(3)) == 0
    assert euler_characteristic(flat_torus_2d(3, 4)) == 0


# ---------------------------------------------------------------------------
# cone angles


def test_flat_torus_deficits_vanish():
    table = cone_angles(flat_torus_3d(3))
    assert table.max_abs_deficit() <= 1e-9
    assert table.singular_faces() == []


def test_boundary_4_simplex_deficits():
    table = cone_angles(boundary_of_simplex(4))
    assert len(table) == 10
    for row in table:
        assert row.deficit == pytest.approx(D4_DEFICIT, abs=1e-10)
        assert row.volume == pytest.approx(1.0, abs=0)
        # each edge lies in exactly 3 tetrahedra
        assert row.cone_angle == pytest.approx(3 * math.acos(1 / 3), abs=1e-10)


def test_tetrahedron_boundary_surface_deficits():
    table = cone_angles(boundary_of_simplex(3))
    assert [row.deficit for row in table] == pytest.approx([math.pi] * 4)


# ---------------------------------------------------------------------------
# Regge functional and gradient


def test_flat_torus_functional_and_gradient():
    m = flat_torus_3d(3)
    assert abs(regge_functional(m)) <= 1e-9
    grad = regge_gradient(m)
    assert max(abs(g) for g in grad.values()) <= 1e-9


def test_boundary_4_simplex_functional():
    F = regge_functional(boundary_of_simplex(4))
    assert abs(F - 10.0 * D4_DEFICIT) <= 1e-9


def test_dim3_gradient_equals_deficit():
    for metric in (boundary_of_simplex(4), _perturbed(flat_torus_3d(3), 0.02, 1)):
        table = cone_angles(metric)
        grad = regge_gradient(metric, table)
        for row in table:
            assert abs(grad[row.face] - row.deficit) <= 1e-12


def test_functional_scaling():
    # deficits are scale-invariant; F scales like length^(n-2)
    lam = 1.7
    for metric, n in ((boundary_of_simplex(3), 2),
                      (boundary_of_simplex(4), 3),
                      (_perturbed(boundary_of_simplex(5), 0.01, 3), 4)):
        F = regge_functional(metric)
        F_scaled = regge_functional(metric.scaled(lam))
        assert F_scaled == pytest.approx(lam ** (n - 2) * F, rel=1e-9)
        t0 = cone_angles(metric).deficits()
        t1 = cone_angles(metric.scaled(lam)).deficits()
        assert np.allclose(t0, t1, atol=1e-10)


def test_dim2_functional_is_topological():
    # in dimension 2 the functional equals 2*pi*chi for any metric
    m = boundary_of_simplex(3)
    assert regge_functional(m) == pytest.approx(2 * TWO_PI, abs=1e-10)
    assert regge_functional(_perturbed(m, 0.05, 9)) == pytest.approx(
        2 * TWO_PI, abs=1e-10)
    assert regge_functional(flat_torus_2d(3, 3)) == pytest.approx(0.0, abs=1e-10)


def _fd_functional_gradient(metric, h):
    grad = {}
    for e in metric.complex.edges():
        lp = dict(metric.lengths)
        lm = dict(metric.lengths)
        lp[e] += h
        lm[e] -= h
        grad[e] = (regge_functional(metric.with_lengths(lp))
                   - regge_functional(metric.with_lengths(lm))) / (2 * h)
    return grad


@pytest.mark.parametrize("seed", [0, 1])
def test_gradient_fd_consistency_dim4(seed):
    # the Schlaefli cancellation, made testable: the FD of F matches the
    # volume-only gradient with an O(h^2) residual
    metric = _perturbed(boundary_of_simplex(5), 0.02, seed)
    analytic = regge_gradient(metric)
    res = {}
    for h in (1e-3, 1e-4):
        fd = _fd_functional_gradient(metric, h)
        res[h] = max(abs(fd[e] - analytic[e]) for e in analytic)
    assert res[1e-4] <= 1e-6
    assert res[1e-3] / res[1e-4] > 20.0  # ~100x for an O(h^2) scheme


def test_gradient_fd_consistency_dim3():
    metric = _perturbed(flat_torus_3d(3), 0.02, 5)
    analytic = regge_gradient(metric)
    fd = _fd_functional_gradient(metric, 1e-4)
    assert max(abs(fd[e] - analytic[e]) for e in analytic) <= 1e-6


# ---------------------------------------------------------------------------
# relaxation


def test_relax_perturbed_flat_torus():
    start = _perturbed(flat_torus_3d(3), 0.02, 2)
    result = regge_relax(start, tolerance=1e-6, max_iters=10_000)
    assert result.converged
    assert result.iterations < 10_000
    assert result.final_max_deficit < 1e-6
    # trajectory is monotone in energy
    energies = [s.energy for s in result.steps]
    assert all(b < a for a, b in zip(energies, energies[1:]))


def test_relax_flat_input_returns_immediately():
    result = regge_relax(flat_torus_3d(3), tolerance=1e-6)
    assert result.converged
    assert result.iterations == 0


def test_relax_sphere_is_obstructed():
    # no flat metric on S^3: expect a stall or max_iters with energy away
    # from zero, never a crash
    try:
        result = regge_relax(boundary_of_simplex(4), tolerance=1e-6,
                             max_iters=300, volume_normalization=True)
    except StallError as exc:
        result = exc.result
    assert not result.converged
    assert result.final_energy > 1.0


def test_relax_dim2_generic_path():
    start = _perturbed(flat_torus_2d(3, 3), 0.02, 4)
    result = regge_relax(start, tolerance=1e-6, max_iters=5000)
    assert result.converged
    assert result.final_max_deficit < 1e-6


def test_relax_volume_normalization_keeps_volume():
    start = _perturbed(flat_torus_3d(3), 0.02, 7)
    v0 = start.total_volume()
    result = regge_relax(start, tolerance=1e-4, max_iters=2000,
                         volume_normalization=True)
    assert result.steps[-1].total_volume == pytest.approx(v0, rel=1e-9)


# ---------------------------------------------------------------------------
# subdivision


def test_subdivide_single_triangle_matches_coordinates():
    pts = np.array([(0.0, 0.0), (1.0, 0.0), (0.3, 0.9)])
    tri = MetricSimplex.from_points(pts)
    tops, lengths = subdivide_simplex(tri)
    assert len(tops) == 6
    for (a, b), ell in lengths.items():
        pa = pts[list(a)].mean(axis=0)
        pb = pts[list(b)].mean(axis=0)
        assert ell == pytest.approx(float(np.linalg.norm(pa - pb)), abs=1e-12)


def test_subdivision_preserves_functional():
    for metric in (boundary_of_simplex(4), _perturbed(flat_torus_3d(3), 0.01, 6)):
        F0 = regge_functional(metric)
        F1 = regge_functional(barycentric_subdivide(metric))
        assert abs(F1 - F0) <= 1e-8


def test_subdivision_keeps_flat_metric_flat():
    sub = barycentric_subdivide(flat_torus_3d(3))
    assert cone_angles(sub).max_abs_deficit() <= 1e-9


def test_subdivision_counts():
    sub = barycentric_subdivide(boundary_of_simplex(4))
    assert len(sub.complex.top_simplices) == 5 * 24
    assert sub.complex.euler_characteristic() == 0
    assert validate(sub).valid


# ---------------------------------------------------------------------------
# Lipschitz-Killing curvatures


def test_lk_codim2_matches_deficit_normalization():
    for metric in (boundary_of_simplex(4), boundary_of_simplex(3),
                   _perturbed(flat_torus_3d(3), 0.01, 8)):
        table = cone_angles(metric)
        for row in table:
            value = lk_curvature(metric, row.face)
            assert abs(value - row.deficit / TWO_PI) <= 1e-10


def test_lk_flat_vertex_is_zero():
    t2 = flat_torus_2d(3, 3)
    for v in t2.complex.vertices():
        assert abs(lk_curvature(t2, (v,))) <= 1e-10


def test_lk_tetrahedron_boundary_vertex():
    b3 = boundary_of_simplex(3)
    for v in b3.complex.vertices():
        assert lk_curvature(b3, (v,)) == pytest.approx(0.5, abs=1e-12)


def test_lk_total_s0_is_volume():
    m = _perturbed(boundary_of_simplex(4), 0.01, 10)
    rep = lk_total(m, 0)
    assert rep.exact
    assert rep.total == pytest.approx(m.total_volume(), rel=1e-12)


def test_lk_total_s2_matches_regge_normalization():
    m = boundary_of_simplex(4)
    rep = lk_total(m, 1)
    assert rep.exact
    assert rep.total == pytest.approx(regge_functional(m) / TWO_PI, rel=1e-12)


# ---------------------------------------------------------------------------
# Chern-Gauss-Bonnet


def test_cgb_dim2_sphere_torus_genus2():
    assert cgb_check(boundary_of_simplex(3)).residual <= 1e-10
    assert cgb_check(boundary_of_simplex(3)).euler_characteristic == 2
    torus = flat_torus_2d(3, 3)
    assert cgb_check(torus).euler_characteristic == 0
    assert cgb_check(torus).residual <= 1e-10
    g2 = PolyhedralMetric.from_triangle_mesh(genus2_mesh())
    report = cgb_check(g2)
    assert report.euler_characteristic == -2
    assert report.residual <= 1e-10
    assert report.exact


def test_cgb_from_embedded_torus_mesh():
    m = PolyhedralMetric.from_triangle_mesh(torus_mesh(2.0, 0.5, 8, 8))
    report = cgb_check(m)
    assert report.euler_characteristic == 0
    assert report.residual <= 1e-10


def test_cgb_rejects_odd_dimension():
    with pytest.raises(OddDimension):
        cgb_check(boundary_of_simplex(4))


def test_cgb_dim4_monte_carlo():
    report = cgb_check(boundary_of_simplex(5), MCConfig(samples=100_000, seed=31))
    assert not report.exact
    assert report.euler_characteristic == 2
    assert report.residual <= 3.0 * report.stderr
    # deterministic for a fixed seed
    again = cgb_check(boundary_of_simplex(5), MCConfig(samples=100_000, seed=31))
    assert report == again
