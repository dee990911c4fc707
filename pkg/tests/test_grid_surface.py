import numpy as np
import pytest

import wassersurf as ws
from wassersurf.errors import CornerMismatchError, ShapeMismatchError

# Coons fill of catenoid edge traces, 9x9 over [0.8, 2.1]^2: regression
# baseline for the interior gap to the analytic surface (the catenoid is
# not additively separable, so the fill cannot be exact).
CATENOID_COONS_GAP_9 = 0.053018863531085536


def plane_field(grid, a=2.0, b=3.0, m=1):
    s = grid.s_nodes[:, None, None]
    t = grid.t_nodes[None, :, None]
    vals = np.repeat(a * s + b * t, m, axis=2)
    return ws.SurfaceField(grid, vals)


def test_grid_nodes_hit_endpoints_exactly():
    g = ws.Grid2(7, 5)
    assert g.s_nodes[0] == 0.0 and g.s_nodes[-1] == 1.0
    assert g.t_nodes[0] == 0.0 and g.t_nodes[-1] == 1.0
    assert g.hs == pytest.approx(1.0 / 6.0, abs=0.0)
    assert g.ht == 0.25


def test_grid_rejects_single_node_direction():
    with pytest.raises(ValueError):
        ws.Grid2(1, 5)


def test_surface_field_rejects_nonfinite():
    g = ws.Grid2(3, 3)
    vals = np.zeros((3, 3, 1))
    vals[1, 1, 0] = np.nan
    with pytest.raises(ValueError):
        ws.SurfaceField(g, vals)


def test_surface_field_shape_check():
    with pytest.raises(ShapeMismatchError):
        ws.SurfaceField(ws.Grid2(3, 3), np.zeros((4, 3, 1)))


def test_coons_reproduces_plane_exactly():
    g = ws.Grid2(9, 9)
    exact = plane_field(g, a=2.0, b=3.0)
    fill = ws.coons_init(ws.BoundarySpec.of_field(exact))
    assert np.max(np.abs(fill.values - exact.values)) <= 1e-14


def test_coons_constant_edges_give_constant_field():
    g = ws.Grid2(6, 8)
    c = np.array([1.5, -2.0, 0.25])
    vals = np.broadcast_to(c, (6, 8, 3)).copy()
    fill = ws.coons_init(ws.BoundarySpec.of_field(ws.SurfaceField(g, vals)))
    assert np.max(np.abs(fill.values - vals)) <= 1e-15


def test_coons_exact_on_bilinear_fields(rng):
    g = ws.Grid2(11, 7)
    s = g.s_nodes[:, None, None]
    t = g.t_nodes[None, :, None]
    coef = rng.standard_normal((4, 3))
    vals = coef[0] + coef[1] * s + coef[2] * t + coef[3] * s * t
    exact = ws.SurfaceField(g, vals)
    fill = ws.coons_init(ws.BoundarySpec.of_field(exact))
    assert np.max(np.abs(fill.values - exact.values)) <= 1e-14


def test_coons_scherk_edges_are_reproduced_exactly():
    # Scherk surfaces are additively separable in (s, t); the bilinear
    # blend reproduces separable samples exactly, so the interior gap is
    # round-off rather than the O(h^2) a generic surface would show.
    g = ws.Grid2(9, 9)
    u = 0.5 * g.s_nodes
    uu, vv = np.meshgrid(u, u, indexing="ij")
    z = ws.evaluate(ws.Scherk(1.0), uu, vv).z
    exact = ws.SurfaceField(g, z[:, :, None])
    fill = ws.coons_init(ws.BoundarySpec.of_field(exact))
    gap = np.max(np.abs(fill.values[1:-1, 1:-1] - exact.values[1:-1, 1:-1]))
    assert gap <= 1e-15


def test_coons_catenoid_gap_regression():
    g = ws.Grid2(9, 9)
    u = 0.8 + (2.1 - 0.8) * g.s_nodes
    uu, vv = np.meshgrid(u, u, indexing="ij")
    z = ws.evaluate(ws.Catenoid(0.0, 1.0, 1), uu, vv).z
    exact = ws.SurfaceField(g, z[:, :, None])
    fill = ws.coons_init(ws.BoundarySpec.of_field(exact))
    gap = np.max(np.abs(fill.values[1:-1, 1:-1] - exact.values[1:-1, 1:-1]))
    assert gap > 1e-3
    assert gap == pytest.approx(CATENOID_COONS_GAP_9, rel=1e-12)


def test_apply_boundary_overwrites_edges_only():
    g = ws.Grid2(9, 9)
    plane = plane_field(g)
    b = ws.BoundarySpec.of_field(plane)
    zero = ws.SurfaceField(g, np.zeros((9, 9, 1)))
    out = ws.apply_boundary(zero, b)
    assert np.array_equal(out.values[0], b.edge_s0)
    assert np.array_equal(out.values[-1], b.edge_s1)
    assert np.array_equal(out.values[:, 0], b.edge_t0)
    assert np.array_equal(out.values[:, -1], b.edge_t1)
    assert np.all(out.values[1:-1, 1:-1] == 0.0)


def test_apply_boundary_idempotent():
    g = ws.Grid2(7, 7)
    b = ws.BoundarySpec.of_field(plane_field(g))
    zero = ws.SurfaceField(g, np.zeros((7, 7, 1)))
    once = ws.apply_boundary(zero, b)
    twice = ws.apply_boundary(once, b)
    assert np.array_equal(once.values, twice.values)


def test_apply_boundary_fixed_point_of_coons():
    g = ws.Grid2(9, 9)
    u = 0.8 + 1.3 * g.s_nodes
    uu, vv = np.meshgrid(u, u, indexing="ij")
    z = ws.evaluate(ws.Catenoid(0.0, 1.0, 1), uu, vv).z
    b = ws.BoundarySpec.of_field(ws.SurfaceField(g, z[:, :, None]))
    fill = ws.coons_init(b)
    again = ws.apply_boundary(fill, b)
    assert np.array_equal(fill.values, again.values)


def test_apply_boundary_shape_mismatch():
    b = ws.BoundarySpec.of_field(plane_field(ws.Grid2(9, 9)))
    small = ws.SurfaceField(ws.Grid2(5, 5), np.zeros((5, 5, 1)))
    with pytest.raises(ShapeMismatchError):
        ws.apply_boundary(small, b)


def test_corner_mismatch_rejected():
    g = ws.Grid2(5, 5)
    b = ws.BoundarySpec.of_field(plane_field(g))
    bad = b.edge_t0.copy()
    bad[0, 0] += 1e-9
    with pytest.raises(CornerMismatchError):
        ws.BoundarySpec(b.edge_s0, b.edge_s1, bad, b.edge_t1)


def test_corner_gap_within_tolerance_accepted():
    g = ws.Grid2(5, 5)
    b = ws.BoundarySpec.of_field(plane_field(g))
    nudged = b.edge_t0.copy()
    nudged[0, 0] += 5e-13
    ws.BoundarySpec(b.edge_s0, b.edge_s1, nudged, b.edge_t1)


def test_operations_are_pure_and_deterministic(rng):
    g = ws.Grid2(8, 6)
    vals = rng.standard_normal((8, 6, 2))
    f = ws.SurfaceField(g, vals)
    b = ws.BoundarySpec.of_field(f)
    a1 = ws.coons_init(b)
    a2 = ws.coons_init(b)
    assert np.array_equal(a1.values, a2.values)
    assert np.array_equal(ws.apply_boundary(f, b).values, ws.apply_boundary(f, b).values)


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_serialization_round_trips_bit_exactly(tmp_path, rng, fmt):
    g = ws.Grid2(6, 5)
    vals = rng.standard_normal((6, 5, 3))
    vals[0, 0, 0] = 1.0 / 3.0
    vals[1, 1, 1] = 1e-300
    vals[2, 2, 2] = 12345678.87654321
    f = ws.SurfaceField(g, vals)
    path = tmp_path / f"surface.{fmt}"
    if fmt == "csv":
        ws.save_csv(f, path)
        back = ws.load_csv(path)
    else:
        ws.save_json(f, path)
        back = ws.load_json(path)
    assert back.grid == f.grid
    assert np.array_equal(back.values, f.values)


def test_load_csv_rejects_incomplete(tmp_path):
    path = tmp_path / "surface.csv"
    path.write_text("i,j,s,t,k,value\n0,0,0,0,0,1.0\n1,1,1,1,0,2.0\n")
    with pytest.raises(ValueError):
        ws.load_csv(path)


def test_edges_from_corner_vectors_linear_and_consistent():
    g = ws.Grid2(5, 9)
    c00 = np.array([1.0, 2.0])
    c10 = np.array([3.0, 2.5])
    c01 = np.array([0.5, 4.0])
    c11 = np.array([2.0, 5.0])
    b = ws.edges_from_corner_vectors(c00, c10, c01, c11, g)
    assert np.array_equal(b.edge_s0[0], c00)
    assert np.array_equal(b.edge_s0[-1], c01)
    assert np.array_equal(b.edge_t1[-1], c11)
    mid = 0.5 * (c00 + c10)
    assert np.max(np.abs(b.edge_t0[2] - mid)) <= 1e-15
