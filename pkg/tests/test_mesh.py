import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cropopt.exceptions import AsymmetricMeshError, DimensionError, InvalidSpecError
from cropopt.mesh import (DomainSpec, TriMesh, benchmark_domain, dump_mesh, format_mesh,
                          generate_mesh, load_mesh, measure_indicator, reflect_indicator)

ALL_SPECS = [
    DomainSpec("rectangle", h=0.2, extent=(0.0, 1.0, 0.0, 2.0)),
    DomainSpec("disk", h=0.15, radius=1.0),
    DomainSpec("lshape", h=0.2),
    DomainSpec("cross", h=0.1),
    DomainSpec("polygon", h=0.3, vertices=((0, 0), (2, 0), (2, 1), (1, 0.5), (0, 1))),
]


def _edge_counts(tri):
    e = np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)
    return np.unique(e, axis=0, return_counts=True)


def test_unit_square_coarse_split():
    m = generate_mesh(DomainSpec("rectangle", h=1.5, extent=(0.0, 1.0, 0.0, 1.0)))
    assert (m.n_vertices, m.n_triangles) == (4, 2)
    assert m.area == pytest.approx(1.0, abs=1e-15)


def test_benchmark_disk_area(disk_mesh):
    assert abs(disk_mesh.area - 4.0) <= 0.01 * 4.0


def test_cross_exact_area():
    c = 1 / math.sqrt(5)
    spec = DomainSpec("cross", h=0.05, c=c)
    assert spec.exact_area() == pytest.approx(20 * c * c)
    assert generate_mesh(spec).area == pytest.approx(4.0, abs=1e-12)


@pytest.mark.parametrize("index", [1, 2, 4])
def test_polygonal_benchmarks_have_area_four(index, benchmark_meshes):
    assert benchmark_meshes[index].area == pytest.approx(4.0, abs=1e-12)


def test_lshape_layout():
    # lower bar ]-1,1[ x ]-1,0[ plus upright ]0,1[ x ]0,2[
    m = generate_mesh(DomainSpec("lshape", h=0.25))
    lo, hi = m.vertices.min(axis=0), m.vertices.max(axis=0)
    np.testing.assert_allclose(lo, [-1, -1])
    np.testing.assert_allclose(hi, [1, 2])
    inside = m.locate(np.array([[-0.5, -0.5], [0.5, 1.5], [-0.5, 1.0]]))
    assert inside[0] >= 0 and inside[1] >= 0 and inside[2] == -1


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.kind)
def test_mesh_invariants(spec):
    m = generate_mesh(spec)
    p = m.vertices[m.triangles]
    signed = 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                    - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1]))
    assert signed.min() > 0
    np.testing.assert_allclose(signed, m.element_area)
    edges, counts = _edge_counts(m.triangles)
    assert counts.max() <= 2
    expected = np.zeros(m.n_vertices, dtype=bool)
    expected[edges[counts == 1].ravel()] = True
    np.testing.assert_array_equal(m.boundary_vertex, expected)
    assert m.max_edge_length() <= 1.5 * spec.h
    if spec.kind != "disk":
        assert m.area == pytest.approx(spec.exact_area(), rel=1e-12)


def test_disk_area_converges_second_order():
    exact = math.pi
    errs = [abs(generate_mesh(DomainSpec("disk", h=h, radius=1.0)).area - exact)
            for h in (0.1, 0.05)]
    assert errs[0] / errs[1] >= 3.0


def test_disk_boundary_on_circle(coarse_disk):
    b = coarse_disk.vertices[coarse_disk.boundary_vertex]
    np.testing.assert_allclose(np.hypot(b[:, 0], b[:, 1]), 2 / math.sqrt(math.pi), rtol=1e-14)


@pytest.mark.parametrize("kind", ["rectangle", "disk", "cross"])
def test_centred_meshes_are_mirror_symmetric(kind):
    h = 0.1
    m = generate_mesh(DomainSpec(kind, h=h))
    c = m.centroids
    from scipy.spatial import cKDTree
    tree = cKDTree(c)
    for flip in ([-1, 1], [1, -1]):
        dist, _ = tree.query(c * np.array(flip))
        assert dist.max() <= h / 2


def test_invalid_specs():
    with pytest.raises(InvalidSpecError):
        DomainSpec("polygon", vertices=((0, 0), (1, 1), (1, 0), (0, 1)))
    with pytest.raises(InvalidSpecError):
        DomainSpec("polygon", vertices=((0, 0), (1, 0), (2, 0)))
    with pytest.raises(InvalidSpecError):
        DomainSpec("rectangle", extent=(0, 0, 0, 1))
    with pytest.raises(InvalidSpecError):
        DomainSpec("disk", radius=0.0)
    with pytest.raises(InvalidSpecError):
        DomainSpec("disk", h=0.0)
    with pytest.raises(InvalidSpecError):
        DomainSpec("hexagon")
    with pytest.raises(InvalidSpecError):
        benchmark_domain(5)


def test_measure_indicator_examples(unit_square, benchmark_meshes):
    assert measure_indicator(unit_square, np.ones(unit_square.n_triangles)) == pytest.approx(1.0)
    assert measure_indicator(unit_square, np.zeros(unit_square.n_triangles)) == 0.0
    m = benchmark_meshes[4]
    left = (m.centroids[:, 0] < 0).astype(float)
    assert abs(measure_indicator(m, left) - 2.0) <= m.element_area.max()
    with pytest.raises(DimensionError):
        measure_indicator(m, np.ones(3))


def test_reflect_symmetric_field_fixed(coarse_rect):
    w = (np.abs(coarse_rect.centroids[:, 0]) < 0.7).astype(float)
    np.testing.assert_array_equal(reflect_indicator(coarse_rect, w, "x=0"), w)


def test_reflect_swaps_halves(coarse_rect):
    c = coarse_rect.centroids
    left = (c[:, 0] < 0).astype(float)
    right = (c[:, 0] > 0).astype(float)
    np.testing.assert_array_equal(reflect_indicator(coarse_rect, left, "x=0"), right)
    top = (c[:, 1] > 0).astype(float)
    bottom = (c[:, 1] < 0).astype(float)
    np.testing.assert_array_equal(reflect_indicator(coarse_rect, top, "y=0"), bottom)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), axis=st.sampled_from(["x=0", "y=0"]))
def test_reflect_preserves_measure(seed, axis):
    m = _SYM_MESH
    w = np.random.default_rng(seed).random(m.n_triangles)
    r = reflect_indicator(m, w, axis)
    assert measure_indicator(m, r) == pytest.approx(measure_indicator(m, w), rel=1e-12)
    np.testing.assert_array_equal(reflect_indicator(m, r, axis), w)


_SYM_MESH = generate_mesh(DomainSpec("disk", h=0.2))


def test_reflect_asymmetric_mesh_rejected():
    m = generate_mesh(DomainSpec("lshape", h=0.25))
    with pytest.raises(AsymmetricMeshError):
        reflect_indicator(m, np.zeros(m.n_triangles), "x=0")
    with pytest.raises(ValueError):
        reflect_indicator(_SYM_MESH, np.zeros(_SYM_MESH.n_triangles), "z")


def test_dump_round_trip(tmp_path, coarse_disk):
    path = tmp_path / "mesh.txt"
    dump_mesh(coarse_disk, path)
    text = path.read_text()
    nv, nt = map(int, text.splitlines()[0].split())
    assert (nv, nt) == (coarse_disk.n_vertices, coarse_disk.n_triangles)
    assert len(text.splitlines()) == 1 + nv + nt
    back = load_mesh(path, kind="disk")
    np.testing.assert_array_equal(back.vertices, coarse_disk.vertices)
    np.testing.assert_array_equal(back.triangles, coarse_disk.triangles)
    np.testing.assert_array_equal(back.boundary_vertex, coarse_disk.boundary_vertex)
    assert format_mesh(back) == text


def test_mesh_generation_deterministic():
    spec = DomainSpec("cross", h=0.1)
    assert format_mesh(generate_mesh(spec)) == format_mesh(generate_mesh(spec))


def test_locate(unit_square):
    pts = np.array([[0.3, 0.4], [1.5, 0.5], [0.999, 0.001]])
    idx = unit_square.locate(pts)
    assert idx[1] == -1
    for k in (0, 2):
        tri = unit_square.vertices[unit_square.triangles[idx[k]]]
        lam = np.linalg.solve(np.vstack([tri.T, np.ones(3)]), np.append(pts[k], 1.0))
        assert lam.min() >= -1e-12


def test_mesh_is_immutable(unit_square):
    with pytest.raises(ValueError):
        unit_square.vertices[0, 0] = 5.0


def test_from_arrays_orients_ccw():
    v = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    m = TriMesh.from_arrays(v, np.array([[0, 2, 1]]))
    assert m.element_area[0] == pytest.approx(0.5)
    assert m.boundary_vertex.all()
