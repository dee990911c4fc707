"""Two-parameter grids, vector-valued surface fields, and fixed boundary data.

Every surface flavor handled by this package (Euclidean graph, quantile
family of 1-D densities, diagonal covariance family) reduces to the same
discrete object: an ``ns x nt`` grid over the unit parameter square whose
nodes carry m-dimensional coordinate vectors.  The four edge curves are
data, never unknowns; optimizers only ever move interior nodes.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CornerMismatchError, ShapeMismatchError

#: absolute tolerance for corner agreement between adjacent boundary edges
CORNER_TOL = 1e-12


@dataclass(frozen=True)
class Grid2:
    """Uniform tensor grid on [0, 1]^2 with ``ns`` x ``nt`` nodes."""

    ns: int
    nt: int

    def __post_init__(self):
        if self.ns < 2 or self.nt < 2:
            raise ValueError(
                f"grid needs at least 2 nodes per direction, got {self.ns}x{self.nt}"
            )

    @property
    def hs(self) -> float:
        return 1.0 / (self.ns - 1)

    @property
    def ht(self) -> float:
        return 1.0 / (self.nt - 1)

    @property
    def s_nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.ns)

    @property
    def t_nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nt)


@dataclass(eq=False)
class SurfaceField:
    """Grid of m-dimensional coordinate vectors, shape ``(ns, nt, m)``.

    Edge rows/columns (index 0 or last in either direction) are treated as
    fixed data by every operation that moves nodes.
    """

    grid: Grid2
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 3:
            raise ShapeMismatchError(f"values must be (ns, nt, m), got shape {vals.shape}")
        if vals.shape[:2] != (self.grid.ns, self.grid.nt):
            raise ShapeMismatchError(
                f"values shape {vals.shape[:2]} does not match grid {self.grid.ns}x{self.grid.nt}"
            )
        if vals.shape[2] < 1:
            raise ShapeMismatchError("fields need at least one coordinate")
        if not np.all(np.isfinite(vals)):
            raise ValueError("surface values must be finite")
        self.values = vals

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    def copy(self) -> "SurfaceField":
        return SurfaceField(self.grid, self.values.copy())


@dataclass(eq=False)
class BoundarySpec:
    """The four fixed edge curves of a surface field.

    ``edge_s0``/``edge_s1`` run along t at s=0 and s=1 (shape ``(nt, m)``);
    ``edge_t0``/``edge_t1`` run along s at t=0 and t=1 (shape ``(ns, m)``).
    Shared corners of adjacent edges must agree to within ``CORNER_TOL``
    in every coordinate.
    """

    edge_s0: np.ndarray
    edge_s1: np.ndarray
    edge_t0: np.ndarray
    edge_t1: np.ndarray

    def __post_init__(self):
        edges = {}
        for name in ("edge_s0", "edge_s1", "edge_t0", "edge_t1"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 2:
                raise ShapeMismatchError(f"{name} must be 2-D (length x m), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            edges[name] = arr
            setattr(self, name, arr)
        if edges["edge_s0"].shape != edges["edge_s1"].shape:
            raise ShapeMismatchError("edge_s0 and edge_s1 must have equal shapes")
        if edges["edge_t0"].shape != edges["edge_t1"].shape:
            raise ShapeMismatchError("edge_t0 and edge_t1 must have equal shapes")
        if edges["edge_s0"].shape[1] != edges["edge_t0"].shape[1]:
            raise ShapeMismatchError("s-edges and t-edges must share the coordinate dimension")
        corners = [
            ("(0,0)", self.edge_s0[0], self.edge_t0[0]),
            ("(0,1)", self.edge_s0[-1], self.edge_t1[0]),
            ("(1,0)", self.edge_s1[0], self.edge_t0[-1]),
            ("(1,1)", self.edge_s1[-1], self.edge_t1[-1]),
        ]
        for label, a, b in corners:
            gap = float(np.max(np.abs(a - b)))
            if gap > CORNER_TOL:
                raise CornerMismatchError(
                    f"edges disagree at corner {label}: max gap {gap:.3e} > {CORNER_TOL:.1e}"
                )

    @property
    def ns(self) -> int:
        return self.edge_t0.shape[0]

    @property
    def nt(self) -> int:
        return self.edge_s0.shape[0]

    @property
    def dim(self) -> int:
        return self.edge_s0.shape[1]

    @classmethod
    def of_field(cls, f: SurfaceField) -> "BoundarySpec":
        """Extract the four edges of an existing field."""
        v = f.values
        return cls(v[0, :, :].copy(), v[-1, :, :].copy(), v[:, 0, :].copy(), v[:, -1, :].copy())


def edges_from_corner_vectors(c00, c10, c01, c11, grid: Grid2) -> BoundarySpec:
    """Boundary whose edges linearly interpolate four corner vectors.

    This is the shared construction for geodesic edges in coordinates where
    geodesics are straight lines (quantile values, sqrt-covariance entries):
    each edge interpolates its two corner vectors in the edge parameter, so
    corners are consistent by construction.
    """
    c00, c10, c01, c11 = (np.asarray(c, dtype=float) for c in (c00, c10, c01, c11))
    if not (c00.shape == c10.shape == c01.shape == c11.shape) or c00.ndim != 1:
        raise ShapeMismatchError("corner vectors must be 1-D and of equal length")
    s = grid.s_nodes[:, None]
    t = grid.t_nodes[:, None]
    return BoundarySpec(
        edge_s0=(1.0 - t) * c00 + t * c01,
        edge_s1=(1.0 - t) * c10 + t * c11,
        edge_t0=(1.0 - s) * c00 + s * c10,
        edge_t1=(1.0 - s) * c01 + s * c11,
    )


def apply_boundary(f: SurfaceField, b: BoundarySpec) -> SurfaceField:
    """Return a copy of ``f`` with its four edges overwritten by ``b``.

    Interior values are untouched; applying the same boundary twice is a
    no-op after the first application.
    """
    if (b.ns, b.nt, b.dim) != (f.grid.ns, f.grid.nt, f.dim):
        raise ShapeMismatchError(
            f"boundary ({b.ns}x{b.nt}x{b.dim}) does not match field "
            f"({f.grid.ns}x{f.grid.nt}x{f.dim})"
        )
    vals = f.values.copy()
    vals[0, :, :] = b.edge_s0
    vals[-1, :, :] = b.edge_s1
    vals[:, 0, :] = b.edge_t0
    vals[:, -1, :] = b.edge_t1
    return SurfaceField(f.grid, vals)


def coons_init(b: BoundarySpec) -> SurfaceField:
    """Transfinite (Coons) fill of four edge curves, used as initial guess.

    The interior blends the two pairs of opposite edges and subtracts the
    bilinear corner interpolant, which reproduces exactly any field whose
    coordinates have the form ``a + b*s + c*t + d*s*t``.  The edges of the
    result equal ``b`` bit-for-bit.
    """
    grid = Grid2(b.ns, b.nt)
    s = grid.s_nodes[:, None, None]
    t = grid.t_nodes[None, :, None]
    c00, c01 = b.edge_s0[0], b.edge_s0[-1]
    c10, c11 = b.edge_s1[0], b.edge_s1[-1]
    vals = (
        (1.0 - s) * b.edge_s0[None, :, :]
        + s * b.edge_s1[None, :, :]
        + (1.0 - t) * b.edge_t0[:, None, :]
        + t * b.edge_t1[:, None, :]
        - (
            (1.0 - s) * (1.0 - t) * c00
            + (1.0 - s) * t * c01
            + s * (1.0 - t) * c10
            + s * t * c11
        )
    )
    return apply_boundary(SurfaceField(grid, vals), b)


# ---------------------------------------------------------------------------
# serialization
#
# Both formats round-trip finite doubles bit-exactly: CSV prints 17
# significant digits, JSON uses Python's shortest-roundtrip float repr.
# ---------------------------------------------------------------------------

CSV_HEADER = "i,j,s,t,k,value"


def save_csv(f: SurfaceField, path) -> None:
    """Write a field as long-form CSV with header ``i,j,s,t,k,value``."""
    g = f.grid
    s, t, v = g.s_nodes, g.t_nodes, f.values
    lines = [CSV_HEADER]
    for i in range(g.ns):
        si = f"{s[i]:.17g}"
        for j in range(g.nt):
            tj = f"{t[j]:.17g}"
            for k in range(f.dim):
                lines.append(f"{i},{j},{si},{tj},{k},{v[i, j, k]:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_csv(path) -> SurfaceField:
    """Read a field from the long-form CSV format written by ``save_csv``."""
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0].strip() != CSV_HEADER:
        raise ValueError(f"expected header '{CSV_HEADER}' in {path}")
    entries = []
    for lineno, line in enumerate(text[1:], start=2):
        parts = line.split(",")
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
        entries.append((int(parts[0]), int(parts[1]), int(parts[4]), float(parts[5])))
    ns = max(e[0] for e in entries) + 1
    nt = max(e[1] for e in entries) + 1
    m = max(e[2] for e in entries) + 1
    vals = np.full((ns, nt, m), np.nan)
    for i, j, k, value in entries:
        vals[i, j, k] = value
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"{path}: incomplete surface (missing grid entries)")
    return SurfaceField(Grid2(ns, nt), vals)


def to_json_dict(f: SurfaceField) -> dict:
    return {
        "ns": f.grid.ns,
        "nt": f.grid.nt,
        "dim": f.dim,
        "values": f.values.ravel(order="C").tolist(),
    }


def from_json_dict(doc: dict) -> SurfaceField:
    ns, nt, dim = int(doc["ns"]), int(doc["nt"]), int(doc["dim"])
    vals = np.asarray(doc["values"], dtype=float)
    if vals.size != ns * nt * dim:
        raise ValueError(
            f"values length {vals.size} does not match ns*nt*dim = {ns * nt * dim}"
        )
    return SurfaceField(Grid2(ns, nt), vals.reshape(ns, nt, dim))


def save_json(f: SurfaceField, path) -> None:
    """Write a field as ``{ns, nt, dim, values}`` with a row-major flat array."""
    Path(path).write_text(json.dumps(to_json_dict(f)) + "\n")


def load_json(path) -> SurfaceField:
    return from_json_dict(json.loads(Path(path).read_text()))
