"""First-order minimization of the discrete area over interior nodes.

The solver moves only interior node values (optionally only a subset of
coordinates) with the four boundary edges held bit-exactly fixed.  Two
methods are available: plain gradient descent and Polak-Ribiere nonlinear
conjugate gradients with automatic restart, both under a backtracking
Armijo line search.  Every accepted step strictly decreases the area, so
the reported area trace is nonincreasing by construction.

The discrete optimality residual uses the same cell tangents as the
objective: per-cell flux vectors are differenced across the two cells on
either side of each interior node, which reproduces (up to the -1/(hs*ht)
quadrature factor) the exact algebraic gradient of the discrete area.
"""

import math
from dataclasses import dataclass

import numpy as np

from .area import (
    AreaConfig,
    _gram_terms,
    area_gradient,
    cell_area_field,
    degenerate_cell_count,
    tangent_fields,
    total_area,
)
from .errors import ShapeMismatchError, SolverNaNError
from .grid import BoundarySpec, Grid2, SurfaceField

_METHODS = {
    "gradient-descent": "gradient-descent",
    "gd": "gradient-descent",
    "nonlinear-cg": "nonlinear-cg",
    "cg": "nonlinear-cg",
}


def default_grad_tol(grid: Grid2) -> float:
    """Stopping threshold on the interior gradient max-norm: 1e-8 * hs * ht."""
    return 1e-8 * grid.hs * grid.ht


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 5000
    grad_tol: float | None = None
    method: str = "nonlinear-cg"
    armijo_c1: float = 1e-4
    backtrack: float = 0.5
    step0: float = 1.0
    max_backtracks: int = 40

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.grad_tol is not None and self.grad_tol <= 0.0:
            raise ValueError("grad_tol must be positive")
        if not (0.0 < self.armijo_c1 < 1.0 and 0.0 < self.backtrack < 1.0 and self.step0 > 0.0):
            raise ValueError("invalid line-search parameters")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {sorted(set(_METHODS.values()))}")
        object.__setattr__(self, "method", _METHODS[self.method])


@dataclass(eq=False)
class SolveReport:
    """Converged (or best-so-far) surface with convergence diagnostics."""

    field: SurfaceField
    iterations: int
    area_trace: list
    grad_norm: float
    el_residual: float
    converged: bool
    degenerate_cells: int
    stall: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iters": self.iterations,
            "area_trace": list(self.area_trace),
            "grad_norm": self.grad_norm,
            "el_residual": self.el_residual,
            "degenerate_cells": self.degenerate_cells,
            "stall": self.stall,
        }


@dataclass(frozen=True)
class ResidualReport:
    """Discrete optimality residual per node, zero on edges.

    Interior nodes whose four incident cells all sit below the Gram
    degeneracy floor are excluded from the max-norm and counted.
    """

    values: np.ndarray
    max_norm: float
    excluded_nodes: int
    excluded_mask: np.ndarray


def euler_lagrange_residual(f: SurfaceField, acfg: AreaConfig) -> ResidualReport:
    """Divergence-form optimality residual of the discrete area functional.

    Per cell, the two flux vectors (b*ds - c*dt)/A and (a*dt - c*ds)/A are
    built from the weighted Gram terms; the residual at an interior node
    differences the averaged fluxes of its adjacent cell pairs.  Sampled
    from a smooth critical point this is O(h^2); algebraically it equals
    -area_gradient / (hs*ht) whenever the same config is used.
    """
    grid = f.grid
    ns, nt, m = grid.ns, grid.nt, f.dim
    hs, ht = grid.hs, grid.ht
    w = acfg.weight_vector(m)
    ds, dt = tangent_fields(f)
    a, b, c = _gram_terms(ds, dt, w)
    gram = a * b - c * c
    root = np.sqrt(np.maximum(gram, 0.0) + acfg.epsilon)
    inv = np.where(gram > 0.0, 1.0 / root, 0.0)[..., None]
    fs = inv * w * (b[..., None] * ds - c[..., None] * dt)
    ft = inv * w * (a[..., None] * dt - c[..., None] * ds)

    values = np.zeros_like(f.values)
    if ns >= 3 and nt >= 3:
        s_term = ((fs[1:, :-1] + fs[1:, 1:]) - (fs[:-1, :-1] + fs[:-1, 1:])) / (2.0 * hs)
        t_term = ((ft[:-1, 1:] + ft[1:, 1:]) - (ft[:-1, :-1] + ft[1:, :-1])) / (2.0 * ht)
        values[1:-1, 1:-1] = s_term + t_term

    deg = gram < acfg.epsilon
    excluded = deg[:-1, :-1] & deg[:-1, 1:] & deg[1:, :-1] & deg[1:, 1:]
    inner = values[1:-1, 1:-1]
    kept = inner[~excluded]
    max_norm = float(np.max(np.abs(kept))) if kept.size else 0.0
    return ResidualReport(
        values=values,
        max_norm=max_norm,
        excluded_nodes=int(np.count_nonzero(excluded)),
        excluded_mask=excluded,
    )


def _normalize_free(free_coords, m: int) -> list:
    if free_coords is None:
        return list(range(m))
    free = sorted(set(int(k) for k in free_coords))
    if not free or free[0] < 0 or free[-1] >= m:
        raise ValueError(f"free_coords must be a nonempty subset of 0..{m - 1}")
    return free


def minimize(
    init: SurfaceField,
    b: BoundarySpec,
    cfg: SolverConfig,
    acfg: AreaConfig,
    free_coords=None,
) -> SolveReport:
    """Minimize the total area over interior values with fixed edges.

    ``init`` must already satisfy the boundary on its edges.  When
    ``free_coords`` is given, only those coordinate indices move (the
    graph problems pin the two affine parameter coordinates and descend
    on the height alone); the rest of the field is treated as data.

    Line-search failure after the backtracking budget returns the best
    field seen so far with ``converged=False`` and a stall diagnostic;
    conjugate gradients falls back to one steepest-descent retry first.
    Non-finite objective values raise SolverNaNError with the iteration.
    """
    grid = init.grid
    if (b.ns, b.nt, b.dim) != (grid.ns, grid.nt, init.dim):
        raise ShapeMismatchError("boundary shape does not match the initial field")
    v = init.values
    if not (
        np.array_equal(v[0, :, :], b.edge_s0)
        and np.array_equal(v[-1, :, :], b.edge_s1)
        and np.array_equal(v[:, 0, :], b.edge_t0)
        and np.array_equal(v[:, -1, :], b.edge_t1)
    ):
        raise ValueError("initial field does not satisfy the boundary on its edges")

    free = _normalize_free(free_coords, init.dim)
    tol = cfg.grad_tol if cfg.grad_tol is not None else default_grad_tol(grid)
    use_cg = cfg.method == "nonlinear-cg"

    work = init.values.copy()
    fld = SurfaceField(grid, work)
    inner_shape = (grid.ns - 2, grid.nt - 2, len(free))
    measure = grid.hs * grid.ht

    def push(x):
        work[1:-1, 1:-1, free] = x.reshape(inner_shape)

    def gradient():
        return area_gradient(fld, acfg)[1:-1, 1:-1, free].ravel()

    x = work[1:-1, 1:-1, free].reshape(-1).copy()
    cells_cur = cell_area_field(fld, acfg)
    f_cur = total_area(fld, acfg)
    trace = [f_cur]
    iterations = 0
    stall = None

    if x.size == 0:
        g = np.zeros(0)
        gnorm = 0.0
        converged = True
    else:
        g = gradient()
        gnorm = float(np.max(np.abs(g)))
        converged = gnorm <= tol
        d = -g
        it = 0
        while not converged and it < cfg.max_iters:
            it += 1
            gd = float(np.dot(g, d))
            if gd >= 0.0:
                d = -g
                gd = -float(np.dot(g, g))

            def line_search(direction, slope):
                # The Armijo decrease is evaluated as an exact (fsum) sum of
                # per-cell area differences: the plain difference of two
                # rounded totals cannot resolve decreases below eps*area,
                # which is where fine-grid solves live.
                alpha = cfg.step0
                for _ in range(cfg.max_backtracks + 1):
                    push(x + alpha * direction)
                    cells_try = cell_area_field(fld, acfg)
                    delta = measure * math.fsum((cells_try - cells_cur).ravel(order="C").tolist())
                    if math.isnan(delta):
                        raise SolverNaNError(it, "objective is NaN during line search")
                    if delta <= cfg.armijo_c1 * alpha * slope:
                        return alpha, delta, cells_try
                    alpha *= cfg.backtrack
                return None, None, None

            alpha, delta, cells_new = line_search(d, gd)
            if alpha is None and use_cg and not np.array_equal(d, -g):
                # restart once from steepest descent before declaring a stall
                d = -g
                gd = -float(np.dot(g, g))
                alpha, delta, cells_new = line_search(d, gd)
            if alpha is None:
                push(x)
                stall = (
                    f"line search stalled after {cfg.max_backtracks} backtracks at iteration {it}; "
                    f"gradient max-norm {gnorm:.3e} above tolerance {tol:.3e}"
                )
                break

            x = x + alpha * d
            push(x)
            if not np.all(np.isfinite(x)):
                raise SolverNaNError(it, "field values are not finite")
            cells_cur = cells_new
            f_cur = f_cur + delta
            trace.append(f_cur)
            iterations = it

            g_new = gradient()
            gnorm = float(np.max(np.abs(g_new)))
            if gnorm <= tol:
                converged = True
                g = g_new
                break
            if use_cg:
                beta = max(0.0, float(np.dot(g_new, g_new - g)) / float(np.dot(g, g)))
                d = -g_new + beta * d
            else:
                d = -g_new
            g = g_new

    final = SurfaceField(grid, work.copy())
    rep = euler_lagrange_residual(final, acfg)
    inner = rep.values[1:-1, 1:-1][:, :, free]
    kept = inner[~rep.excluded_mask] if inner.size else inner
    el_norm = float(np.max(np.abs(kept))) if kept.size else 0.0
    return SolveReport(
        field=final,
        iterations=iterations,
        area_trace=trace,
        grad_norm=gnorm,
        el_residual=el_norm,
        converged=converged,
        degenerate_cells=degenerate_cell_count(final, acfg),
        stall=stall,
    )


def perturb_interior(
    f: SurfaceField, amplitude: float, seed: int, free_coords=None
) -> SurfaceField:
    """Seeded smooth perturbation of the free interior values.

    Adds a random combination of the first 3x3 sine modes (vanishing on
    the edges), scaled to the given max amplitude.  Used by the CLI to
    explore alternative basins; deterministic for a fixed seed.
    """
    if amplitude == 0.0:
        return f.copy()
    grid = f.grid
    free = _normalize_free(free_coords, f.dim)
    rng = np.random.default_rng(seed)
    s = grid.s_nodes[:, None]
    t = grid.t_nodes[None, :]
    bump = np.zeros((grid.ns, grid.nt))
    for p in range(1, 4):
        for q in range(1, 4):
            bump += rng.uniform(-1.0, 1.0) * np.sin(p * np.pi * s) * np.sin(q * np.pi * t)
    peak = float(np.max(np.abs(bump)))
    if peak > 0.0:
        bump *= amplitude / peak
    vals = f.values.copy()
    for k in free:
        vals[1:-1, 1:-1, k] += bump[1:-1, 1:-1]
    return SurfaceField(grid, vals)
