"""Sub-Riemannian distance fields through elliptic regularization.

The degenerate cometric of a field family is G_0(x) = sum_j X_j(x) X_j(x)^T;
adding eps * I makes it Riemannian, and the associated distance is computed
as the shortest-path metric of a grid graph whose edge (p, q) costs the
length of the segment in the midpoint metric,

    cost(p, q) = sqrt( (q - p)^T  G_eps((p+q)/2)^{-1}  (q - p) ).

Squeezing eps down a decreasing schedule produces a pointwise nondecreasing
family of fields whose limit estimates the degenerate distance; the
convergence report records the per-level increments, so the monotonicity that
the regularization theory predicts is checked rather than assumed.

Shortest paths are delegated to scipy's compiled Dijkstra on the assembled
sparse graph; distances are the unique fixpoint of edge relaxation, so they
do not depend on tie-breaking, and repeated runs are bitwise identical.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra as _dijkstra

from swlab.geometry import Grid, VectorFieldSet


# ---------------------------------------------------------------------------
# cometric
# ---------------------------------------------------------------------------

def cometric_at(fields: VectorFieldSet, epsilon: float, x) -> np.ndarray:
    """G_eps(x) = sum_j X_j(x) X_j(x)^T + eps I, a d x d symmetric matrix."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    x = np.asarray(x, dtype=float)
    return _cometric_many(fields, epsilon, x[None, :])[0]


def _cometric_many(fields: VectorFieldSet, epsilon: float,
                   pts: np.ndarray) -> np.ndarray:
    d = fields.dim
    g = np.zeros((pts.shape[0], d, d))
    for fld in fields.fields:
        vec = fld.evaluate(pts)                     # (M, d)
        g += vec[:, :, None] * vec[:, None, :]
    if epsilon:
        g[:, np.arange(d), np.arange(d)] += epsilon
    return g


# ---------------------------------------------------------------------------
# distance fields
# ---------------------------------------------------------------------------

@dataclass
class DistanceField:
    """Per-node distance to the source in the eps-regularized metric."""
    source: int
    epsilon: float
    values: np.ndarray
    stencil_radius: int
    grid: Grid
    converged: bool = True


@dataclass(frozen=True)
class RegularizationSchedule:
    """Strictly decreasing positive regularization levels."""
    eps_list: tuple

    def __post_init__(self):
        eps = self.eps_list
        if len(eps) == 0:
            raise ValueError("schedule must be nonempty")
        if any(e <= 0 for e in eps):
            raise ValueError("all levels must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("levels must decrease strictly")

    @classmethod
    def geometric(cls, eps0: float = 1.0, levels: int = 12,
                  ratio: float = 0.5) -> "RegularizationSchedule":
        if not 0 < ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        return cls(tuple(eps0 * ratio ** k for k in range(levels)))


def primitive_offsets(dim: int, radius: int) -> list:
    """Primitive lattice directions in the radius-r sup-norm box, one per line.

    Only one of {o, -o} is kept (first nonzero component positive); scalar
    multiples are dropped since their cost is never below the repeated
    primitive step.
    """
    out = []
    for o in itertools.product(range(-radius, radius + 1), repeat=dim):
        if all(v == 0 for v in o):
            continue
        g = 0
        for v in o:
            g = math.gcd(g, abs(v))
        if g != 1:
            continue
        lead = next(v for v in o if v != 0)
        if lead > 0:
            out.append(o)
    return sorted(out)


def _as_node(grid: Grid, x0) -> int:
    if np.isscalar(x0):
        idx = int(x0)
        if not 0 <= idx < grid.size:
            raise ValueError(f"node index {idx} out of range")
        return idx
    x0 = np.asarray(x0, dtype=float)
    idx = grid.nearest_node(x0)
    if np.max(np.abs(grid.node_coords(idx) - x0)) > 1e-9 + 1e-9 * np.max(np.abs(x0)):
        raise ValueError(f"point {x0} is not a grid node")
    return idx


def _edge_costs(grid: Grid, fields: VectorFieldSet, epsilon: float,
                radius: int) -> dict:
    """Per-offset (source nodes, costs) for all undirected edges."""
    dims = grid.dims
    dim = grid.ndim
    h = np.asarray(grid.spacing)
    coords = grid.coords()
    idx = np.indices(dims).reshape(dim, -1)

    table = {}
    for o in primitive_offsets(dim, radius):
        mask = np.ones(grid.size, dtype=bool)
        for a in range(dim):
            if o[a] > 0:
                mask &= idx[a] <= dims[a] - 1 - o[a]
            elif o[a] < 0:
                mask &= idx[a] >= -o[a]
        src = np.nonzero(mask)[0]
        if src.size == 0:
            continue
        step = np.array(o) * h
        mid = coords[src] + 0.5 * step
        g = _cometric_many(fields, epsilon, mid)
        rhs = np.broadcast_to(step, (src.size, dim))
        sol = np.linalg.solve(g, rhs[..., None])[..., 0]
        cost = np.sqrt(np.einsum("ij,ij->i", rhs, sol))
        table[o] = (src, cost)
    return table


def _graph_from_costs(grid: Grid, table: dict) -> sp.csr_matrix:
    dims = grid.dims
    dim = grid.ndim
    strides = np.ones(dim, dtype=np.int64)
    acc = 1
    for a in range(dim - 1, -1, -1):
        strides[a] = acc
        acc *= dims[a]
    rows, cols, data = [], [], []
    for o, (src, cost) in table.items():
        off_flat = int(sum(o[a] * strides[a] for a in range(dim)))
        rows.append(src)
        cols.append(src + off_flat)
        data.append(cost)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.concatenate(data)
    return sp.csr_matrix((data, (rows, cols)), shape=(grid.size, grid.size))


def riemannian_distance_field(grid: Grid, fields: VectorFieldSet,
                              epsilon: float, x0, stencil_radius: int = 2,
                              _table: dict | None = None) -> DistanceField:
    """Shortest-path distance field for the eps-regularized metric, eps > 0."""
    if epsilon <= 0:
        raise ValueError("riemannian_distance_field needs epsilon > 0; the "
                         "degenerate distance is reached only through "
                         "subriemannian_distance")
    if stencil_radius < 1:
        raise ValueError("stencil radius must be >= 1")
    source = _as_node(grid, x0)
    table = _table if _table is not None else _edge_costs(grid, fields,
                                                          epsilon,
                                                          stencil_radius)
    graph = _graph_from_costs(grid, table)
    values = _dijkstra(graph, directed=False, indices=source)
    return DistanceField(source=source, epsilon=float(epsilon), values=values,
                         stencil_radius=stencil_radius, grid=grid)


@dataclass
class ConvergenceReport:
    """Per-level increments of the regularized fields along the schedule."""
    eps: list
    max_increment: list
    mean_increment: list
    violations: list            # count of nodes decreasing beyond roundoff
    max_violation: list
    tau_mono: list              # per-level monotonicity tolerance
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "eps": list(self.eps),
            "max_increment": list(self.max_increment),
            "mean_increment": list(self.mean_increment),
            "violations": list(self.violations),
            "max_violation": list(self.max_violation),
            "tau_mono": list(self.tau_mono),
            "converged": self.converged,
        }


def subriemannian_distance(grid: Grid, fields: VectorFieldSet, x0,
                           schedule: RegularizationSchedule | None = None,
                           stencil_radius: int = 2):
    """Distance fields along the schedule plus the monotonicity report.

    The final field is the working estimate of the degenerate distance.
    Larger cometric means shorter paths, so the fields must be pointwise
    nondecreasing as eps drops; decreases beyond roundoff are counted and
    measured against the tolerance tau_mono = 2 max |edge-cost change|,
    flagged rather than fatal (they indicate stencil artifacts).
    """
    if schedule is None:
        schedule = RegularizationSchedule.geometric()
    source = _as_node(grid, x0)

    fields_out = []
    report = ConvergenceReport(eps=[], max_increment=[], mean_increment=[],
                               violations=[], max_violation=[], tau_mono=[],
                               converged=False)
    prev_field = None
    prev_costs = None
    for eps in schedule.eps_list:
        table = _edge_costs(grid, fields, eps, stencil_radius)
        dist = riemannian_distance_field(grid, fields, eps, source,
                                         stencil_radius, _table=table)
        costs = {o: c for o, (_, c) in table.items()}
        report.eps.append(float(eps))
        if prev_field is None:
            report.max_increment.append(float("nan"))
            report.mean_increment.append(float("nan"))
            report.violations.append(0)
            report.max_violation.append(0.0)
            report.tau_mono.append(0.0)
        else:
            inc = dist.values - prev_field.values
            tau = 2.0 * max(float(np.max(np.abs(costs[o] - prev_costs[o])))
                            for o in costs)
            bad = inc < -1e-12 * np.maximum(prev_field.values, 1.0)
            report.max_increment.append(float(np.max(inc)))
            report.mean_increment.append(float(np.mean(inc)))
            report.violations.append(int(np.count_nonzero(bad)))
            report.max_violation.append(float(-np.min(inc)) if bad.any() else 0.0)
            report.tau_mono.append(tau)
        fields_out.append(dist)
        prev_field = dist
        prev_costs = costs

    if len(fields_out) >= 2:
        scale = float(np.max(fields_out[-1].values))
        report.converged = report.max_increment[-1] <= 0.02 * max(scale, 1e-300)
    fields_out[-1].converged = report.converged
    return fields_out, report


# ---------------------------------------------------------------------------
# control paths
# ---------------------------------------------------------------------------

@dataclass
class ControlPath:
    """Piecewise-constant controls a_j(t) on a partition of [0, 1]."""
    times: np.ndarray           # (K+1,), increasing, 0 to 1
    controls: np.ndarray        # (K, r)
    start: np.ndarray
    trajectory: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.controls = np.atleast_2d(np.asarray(self.controls, dtype=float))
        self.start = np.asarray(self.start, dtype=float)
        if self.times.ndim != 1 or self.times.size != self.controls.shape[0] + 1:
            raise ValueError("times must have one more entry than control rows")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must increase strictly")


def control_path_energy(path: ControlPath, fields: VectorFieldSet,
                        grid: Grid | None = None,
                        max_step: float = 1e-3):
    """Energy of the control and the integrated endpoint.

    The horizontal flow sigma' = sum_j a_j X_j(sigma) is integrated with the
    explicit midpoint rule at substeps no longer than ``max_step``; the energy
    (sum_j int |a_j|^2 dt)^{1/2} upper-bounds the degenerate distance from the
    start to the endpoint.  Raises if the trajectory leaves the grid box.
    """
    if path.controls.shape[1] != fields.r:
        raise ValueError("controls must have one column per field")
    lo = hi = None
    if grid is not None:
        lo = np.asarray(grid.origin)
        hi = lo + (np.asarray(grid.dims) - 1) * np.asarray(grid.spacing)

    def velocity(p: np.ndarray, a: np.ndarray) -> np.ndarray:
        vel = np.zeros_like(p)
        for j, fld in enumerate(fields.fields):
            if a[j]:
                vel += a[j] * fld.evaluate(p[None, :])[0]
        return vel

    pos = path.start.astype(float).copy()
    points = [pos.copy()]
    energy_sq = 0.0
    for k in range(path.controls.shape[0]):
        a = path.controls[k]
        seg = path.times[k + 1] - path.times[k]
        energy_sq += float(a @ a) * seg
        nsub = max(1, int(math.ceil(seg / max_step)))
        hstep = seg / nsub
        for _ in range(nsub):
            mid = pos + 0.5 * hstep * velocity(pos, a)
            pos = pos + hstep * velocity(mid, a)
            if lo is not None and (np.any(pos < lo - 1e-12) or
                                   np.any(pos > hi + 1e-12)):
                raise ValueError("control path leaves the grid box")
        points.append(pos.copy())
    path.trajectory = np.stack(points)
    return math.sqrt(energy_sq), pos


# ---------------------------------------------------------------------------
# balls
# ---------------------------------------------------------------------------

def ball_mask(dist: DistanceField, rho: float) -> np.ndarray:
    """Strict metric ball {d < rho}; empty at rho = 0."""
    if rho < 0:
        raise ValueError("radius must be nonnegative")
    return dist.values < rho


@dataclass(frozen=True)
class BallComparison:
    m_upper: float
    delta: float
    samples: int


def ball_comparison(dist: DistanceField, along_axis: int | None = None,
                    max_radius: float | None = None,
                    min_samples: int = 5) -> BallComparison:
    """Fit d ~ M |x - x0|^delta over shells around the source.

    With ``along_axis`` the regression restricts to the coordinate line
    through the source (the route that exposes the anisotropic exponent 1/2
    of step-2 directions); otherwise all nodes enter, binned into shells by
    Euclidean radius.
    """
    grid = dist.grid
    coords = grid.coords()
    x0 = grid.node_coords(dist.source)
    rel = coords - x0
    rho = np.linalg.norm(rel, axis=1)

    keep = (rho > 0) & np.isfinite(dist.values) & (dist.values > 0)
    if along_axis is not None:
        others = [a for a in range(grid.ndim) if a != along_axis]
        for a in others:
            keep &= np.abs(rel[:, a]) < 1e-12 * max(1.0, abs(x0[a]))
    if max_radius is None:
        max_radius = 0.5 * float(np.max(rho[keep])) if keep.any() else 0.0
    keep &= rho <= max_radius
    if np.count_nonzero(keep) < min_samples:
        raise ValueError("too few shells for the ball regression")

    r = rho[keep]
    d = dist.values[keep]
    # shell-median the duplicated radii (symmetric node pairs)
    order = np.argsort(r)
    r, d = r[order], d[order]
    shells_r, shells_d = [], []
    i = 0
    while i < r.size:
        j = i
        while j < r.size and r[j] <= r[i] * (1 + 1e-12):
            j += 1
        shells_r.append(r[i])
        shells_d.append(float(np.median(d[i:j])))
        i = j
    if len(shells_r) < min_samples:
        raise ValueError("too few shells for the ball regression")
    logr = np.log(np.array(shells_r))
    logd = np.log(np.array(shells_d))
    slope, intercept = np.polyfit(logr, logd, 1)
    return BallComparison(m_upper=float(np.exp(intercept)), delta=float(slope),
                          samples=len(shells_r))


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

@dataclass
class ConeSpec:
    """Backward cone over the metric ball: slice at time t is {d < t0 - t - margin}."""
    t0: float
    distance: DistanceField
    margin: float = 0.0

    def __post_init__(self):
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if self.margin < 0:
            raise ValueError("margin must be nonnegative")

    @property
    def apex(self) -> tuple:
        return (self.t0, self.distance.source)
