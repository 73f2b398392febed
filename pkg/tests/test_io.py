import json
import math

import numpy as np
import pytest

from polycurv import IndexOutOfRange, MissingLength, NonManifold, ParseError
from polycurv.complexes import boundary_of_simplex, flat_torus_3d
from polycurv.curves import PlanarPolygon, SpacePolygon
from polycurv.io import (
    dump_complex_json,
    dump_off,
    dump_polygon_json,
    format_csv,
    parse_complex_json,
    parse_off,
    parse_polygon_json,
)
from polycurv.shapes import cube, regular_tetrahedron_mesh
from polycurv.surfaces import ConvexPolyhedron, TriangleMesh, euler_characteristic

CUBE_OFF = """OFF
# unit cube, quadrilateral faces
8 6 12
0.0 0.0 0.0
0.0 0.0 1.0
0.0 1.0 0.0
0.0 1.0 1.0
1.0 0.0 0.0
1.0 0.0 1.0
1.0 1.0 0.0
1.0 1.0 1.0
4 0 1 3 2
4 4 6 7 5
4 0 4 5 1
4 2 3 7 6
4 0 2 6 4
4 1 5 7 3
"""

TET_OFF = """OFF
4 4 6
1.0 1.0 1.0
1.0 -1.0 -1.0
-1.0 1.0 -1.0
-1.0 -1.0 1.0
3 0 1 2
3 0 2 3
3 0 3 1
3 1 3 2
"""


def test_parse_cube_off_is_convex_polyhedron():
    p = parse_off(CUBE_OFF)
    assert isinstance(p, ConvexPolyhedron)
    assert p.n_vertices == 8
    assert p.n_faces == 6
    assert euler_characteristic(p) == 2


def test_parse_tetra_off_is_triangle_mesh():
    m = parse_off(TET_OFF)
    assert isinstance(m, TriangleMesh)
    assert euler_characteristic(m) == 2


def test_parse_off_index_out_of_range():
    bad = TET_OFF.replace("3 1 3 2", "3 1 99 2")
    with pytest.raises(IndexOutOfRange) as exc:
        parse_off(bad)
    assert exc.value.line == 10


def test_parse_off_errors_carry_lines():
    with pytest.raises(ParseError):
        parse_off("NOT_OFF\n1 1 1\n")
    with pytest.raises(ParseError) as exc:
        parse_off("OFF\n4 4\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_off(TET_OFF.replace("3 0 1 2", "3 0 1"))


def test_off_round_trip_bit_exact():
    rng = np.random.default_rng(12)
    mesh = regular_tetrahedron_mesh()
    jiggled = TriangleMesh(mesh.vertices + 1e-3 * rng.standard_normal((4, 3)),
                           mesh.triangles)
    text = dump_off(jiggled)
    again = parse_off(text)
    assert np.array_equal(again.vertices, jiggled.vertices)
    assert np.array_equal(again.triangles, jiggled.triangles)
    assert dump_off(again) == text


def test_polygon_json_round_trip():
    p = SpacePolygon([(0, 0, 0), (1, 0, 0.25), (1, 1, 0.5), (0, 1, 0.75)])
    text = dump_polygon_json(p)
    q = parse_polygon_json(text)
    assert isinstance(q, SpacePolygon)
    assert np.array_equal(q.vertices, p.vertices)
    assert dump_polygon_json(q) == text


def test_polygon_json_planar_and_errors():
    p = parse_polygon_json('{"vertices": [[0,0],[1,0],[1,1]]}')
    assert isinstance(p, PlanarPolygon)
    with pytest.raises(ParseError):
        parse_polygon_json('{"vertices": [[0,0],[1,0],[1,1]], "extra": 1}')
    with pytest.raises(ParseError):
        parse_polygon_json('[1,2,3]')
    with pytest.raises(ParseError):
        parse_polygon_json('{"vertices"')


def test_complex_json_round_trip():
    m = flat_torus_3d(3)
    text = dump_complex_json(m)
    again = parse_complex_json(text)
    assert again.complex.top_simplices == m.complex.top_simplices
    assert again.lengths == m.lengths
    assert dump_complex_json(again) == text


def test_complex_json_boundary_of_4_simplex():
    m = parse_complex_json(dump_complex_json(boundary_of_simplex(4)))
    assert m.complex.f_vector() == (5, 10, 10, 5)


def test_complex_json_missing_length():
    data = json.loads(dump_complex_json(boundary_of_simplex(4)))
    removed = data["lengths"].pop(3)
    with pytest.raises(MissingLength) as exc:
        parse_complex_json(json.dumps(data))
    assert exc.value.edge == tuple(removed[:2])


def test_complex_json_dim_mismatch_and_duplicates():
    data = json.loads(dump_complex_json(boundary_of_simplex(3)))
    data["dim"] = 3
    with pytest.raises(ParseError):
        parse_complex_json(json.dumps(data))
    data = json.loads(dump_complex_json(boundary_of_simplex(3)))
    data["lengths"].append(data["lengths"][0])
    with pytest.raises(ParseError):
        parse_complex_json(json.dumps(data))


def test_complex_json_open_complex_rejected():
    text = json.dumps({"dim": 3,
                       "top_simplices": [[0, 1, 2, 3], [0, 1, 2, 4]],
                       "lengths": []})
    with pytest.raises(NonManifold):
        parse_complex_json(text)


def test_mesh_json_round_trip():
    from polycurv.io import dump_mesh_json, parse_mesh_json

    for mesh in (cube(), regular_tetrahedron_mesh()):
        text = dump_mesh_json(mesh)
        again = parse_mesh_json(text)
        assert type(again) is type(mesh)
        assert np.array_equal(again.vertices, mesh.vertices)
        assert dump_mesh_json(again) == text
    with pytest.raises(IndexOutOfRange):
        parse_mesh_json('{"vertices": [[0,0,0]], "faces": [[0, 1, 2]]}')


def test_csv_formatting_is_shortest_round_trip():
    text = format_csv(("a", "b"), [((0, 2), 1 / 3), ((1, 5), math.pi)])
    lines = text.splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == "0-2," + repr(1 / 3)
    assert float(lines[2].split(",")[1]) == math.pi
