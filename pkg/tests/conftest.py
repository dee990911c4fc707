import numpy as np
import pytest

import wassersurf as ws


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def fd_area_gradient_entry(f, acfg, i, j, k, step=1e-6):
    """Central finite difference of total_area wrt one node value."""
    vp = f.values.copy()
    vp[i, j, k] += step
    vm = f.values.copy()
    vm[i, j, k] -= step
    ap = ws.total_area(ws.SurfaceField(f.grid, vp), acfg)
    am = ws.total_area(ws.SurfaceField(f.grid, vm), acfg)
    return (ap - am) / (2.0 * step)


def smooth_test_field(grid, m, amplitude=0.3, seed=7):
    """Deterministic smooth nondegenerate field for gradient/residual tests."""
    rng = np.random.default_rng(seed)
    s = grid.s_nodes[:, None, None]
    t = grid.t_nodes[None, :, None]
    k = np.arange(m)[None, None, :]
    vals = (
        np.sin(1.0 + 0.7 * k) * s
        + np.cos(1.0 + 0.4 * k) * t
        + amplitude * np.sin(np.pi * s) * np.sin(np.pi * t) * (1.0 + 0.1 * k)
        + 0.05 * rng.standard_normal(m) * np.sin(2 * np.pi * s) * np.sin(np.pi * t)
    )
    return ws.SurfaceField(grid, vals)
