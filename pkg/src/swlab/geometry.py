"""Grids, polynomial vector fields, and discrete sum-of-squares operators.

Vector fields are first-order operators X = sum_a c_a(x) d_a with polynomial
coefficients, discretized by second-order centered differences in the grid
interior and first-order one-sided differences on the boundary layer.  The
sum-of-squares operator is assembled as sum_j X_j^T X_j (plus an optional
elliptic regularization eps * sum_a D_a^T D_a), with the adjoint taken as the
exact matrix transpose in the uniformly weighted grid inner product, so the
result is symmetric positive semidefinite by construction.

Polynomial coefficients double as the symbolic layer: Lie brackets are
computed exactly on the coefficient tables, which is what the bracket-rank
check uses to certify that iterated brackets span the tangent space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Uniform Cartesian box grid with Dirichlet-truncated boundary."""
    dims: tuple
    origin: tuple
    spacing: tuple
    boundary: str = "dirichlet-truncated"

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    @property
    def weight(self) -> float:
        """Scalar quadrature weight of the grid inner product."""
        return float(np.prod(self.spacing))

    def coords(self) -> np.ndarray:
        """Node coordinates, shape (size, ndim), C-order node numbering."""
        axes = [self.origin[a] + self.spacing[a] * np.arange(self.dims[a])
                for a in range(self.ndim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def node_index(self, multi) -> int:
        return int(np.ravel_multi_index(tuple(multi), self.dims))

    def node_coords(self, index: int) -> np.ndarray:
        multi = np.unravel_index(index, self.dims)
        return np.array([self.origin[a] + self.spacing[a] * multi[a]
                         for a in range(self.ndim)])

    def nearest_node(self, point) -> int:
        point = np.asarray(point, dtype=float)
        multi = []
        for a in range(self.ndim):
            k = int(round((point[a] - self.origin[a]) / self.spacing[a]))
            multi.append(min(max(k, 0), self.dims[a] - 1))
        return self.node_index(multi)

    def boundary_mask(self) -> np.ndarray:
        """True on nodes of the outermost layer."""
        mask = np.zeros(self.dims, dtype=bool)
        for a in range(self.ndim):
            sl = [slice(None)] * self.ndim
            sl[a] = 0
            mask[tuple(sl)] = True
            sl[a] = self.dims[a] - 1
            mask[tuple(sl)] = True
        return mask.ravel()

    def interior_margin_mask(self, fraction: float) -> np.ndarray:
        """True on nodes at least ``fraction`` of the box size from the boundary."""
        mask = np.ones(self.dims, dtype=bool)
        for a in range(self.ndim):
            extent = self.spacing[a] * (self.dims[a] - 1)
            k = int(np.ceil(fraction * extent / self.spacing[a]))
            idx = np.arange(self.dims[a])
            keep = (idx >= k) & (idx <= self.dims[a] - 1 - k)
            shape = [1] * self.ndim
            shape[a] = self.dims[a]
            mask &= keep.reshape(shape)
        return mask.ravel()


def build_grid(box, resolution) -> Grid:
    """Uniform grid over a box; box is a sequence of (lo, hi) per axis.

    Requires at least 3 points per axis and a nondegenerate box.
    """
    box = np.atleast_2d(np.asarray(box, dtype=float))
    if box.shape[1] != 2:
        raise ValueError("box must be a sequence of (lo, hi) intervals")
    d = box.shape[0]
    if np.isscalar(resolution):
        res = [int(resolution)] * d
    else:
        res = [int(r) for r in resolution]
    if len(res) != d:
        raise ValueError("resolution and box dimensions disagree")
    for a, (lo, hi) in enumerate(box):
        if not hi > lo:
            raise ValueError(f"degenerate box on axis {a}: [{lo}, {hi}]")
        if res[a] < 3:
            raise ValueError(f"resolution must be >= 3 per axis, got {res[a]}")
    spacing = tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(box, res))
    return Grid(dims=tuple(res), origin=tuple(box[:, 0]), spacing=spacing)


# ---------------------------------------------------------------------------
# polynomials and vector fields
# ---------------------------------------------------------------------------

class Polynomial:
    """Multivariate polynomial as a map from exponent tuples to coefficients."""

    def __init__(self, dim: int, coeffs: dict | None = None):
        self.dim = dim
        self.coeffs = {}
        for exps, c in (coeffs or {}).items():
            if c != 0.0:
                self.coeffs[tuple(exps)] = self.coeffs.get(tuple(exps), 0.0) + c

    @classmethod
    def constant(cls, value: float, dim: int) -> "Polynomial":
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def monomial(cls, exponents, coefficient: float, dim: int) -> "Polynomial":
        return cls(dim, {tuple(exponents): coefficient})

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0.0) + c
        return Polynomial(self.dim, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0.0) - c
        return Polynomial(self.dim, out)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Polynomial(self.dim, out)

    def derivative(self, axis: int) -> "Polynomial":
        out = {}
        for e, c in self.coeffs.items():
            if e[axis] > 0:
                de = list(e)
                de[axis] -= 1
                out[tuple(de)] = out.get(tuple(de), 0.0) + c * e[axis]
        return Polynomial(self.dim, out)

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        vals = np.zeros(pts.shape[0])
        for e, c in self.coeffs.items():
            term = np.full(pts.shape[0], c)
            for a, p in enumerate(e):
                if p:
                    term = term * pts[:, a] ** p
            vals += term
        return vals

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs})"


@dataclass(frozen=True)
class VectorField:
    """First-order operator sum_a components[a](x) d_a with polynomial coefficients."""
    components: tuple
    name: str = "X"

    @property
    def dim(self) -> int:
        return len(self.components)

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        """Coefficient vectors at the points, shape (npts, dim)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.stack([c(pts) for c in self.components], axis=1)


def bracket(x: VectorField, y: VectorField) -> VectorField:
    """Lie bracket [X, Y], computed exactly on the coefficient polynomials."""
    d = x.dim
    comps = []
    for a in range(d):
        acc = Polynomial(d)
        for b in range(d):
            acc = acc + x.components[b] * y.components[a].derivative(b)
            acc = acc - y.components[b] * x.components[a].derivative(b)
        comps.append(acc)
    return VectorField(tuple(comps), name=f"[{x.name},{y.name}]")


@dataclass(frozen=True)
class VectorFieldSet:
    """The generating family X_1, ..., X_r of the sum-of-squares operator."""
    fields: tuple
    preset: str
    dim: int

    @property
    def r(self) -> int:
        return len(self.fields)


def _unit_field(axis: int, dim: int, name: str) -> VectorField:
    comps = [Polynomial(dim) for _ in range(dim)]
    comps[axis] = Polynomial.constant(1.0, dim)
    return VectorField(tuple(comps), name=name)


def make_fields(preset: str, dim: int | None = None) -> VectorFieldSet:
    """Preset families: "euclidean" (any dim), "heisenberg" (3D), "grushin" (2D)."""
    if preset == "euclidean":
        if dim is None:
            raise ValueError("euclidean preset needs an explicit dimension")
        fields = tuple(_unit_field(a, dim, f"X{a + 1}") for a in range(dim))
        return VectorFieldSet(fields, "euclidean", dim)
    if preset == "heisenberg":
        d = 3
        zero = Polynomial(d)
        one = Polynomial.constant(1.0, d)
        half_y = Polynomial.monomial((0, 1, 0), -0.5, d)
        half_x = Polynomial.monomial((1, 0, 0), 0.5, d)
        x1 = VectorField((one, zero, half_y), name="X1")      # d_x - (y/2) d_z
        x2 = VectorField((zero, one, half_x), name="X2")      # d_y + (x/2) d_z
        return VectorFieldSet((x1, x2), "heisenberg", d)
    if preset == "grushin":
        d = 2
        zero = Polynomial(d)
        one = Polynomial.constant(1.0, d)
        xc = Polynomial.monomial((1, 0), 1.0, d)
        x1 = VectorField((one, zero), name="X1")              # d_x
        x2 = VectorField((zero, xc), name="X2")               # x d_y
        return VectorFieldSet((x1, x2), "grushin", d)
    raise ValueError(f"unknown preset '{preset}'; known: {sorted(PRESETS)}")


PRESETS = ("euclidean", "heisenberg", "grushin")


def fields_from_table(rows, dim: int) -> VectorFieldSet:
    """Custom polynomial family from rows {field, axis, exponents, coefficient}."""
    by_field: dict = {}
    for row in rows:
        j = int(row["field"])
        axis = int(row["axis"])
        if not 0 <= axis < dim:
            raise ValueError(f"axis {axis} out of range for dimension {dim}")
        exps = tuple(int(e) for e in row["exponents"])
        if len(exps) != dim:
            raise ValueError("exponent tuple length must equal the dimension")
        mono = Polynomial.monomial(exps, float(row["coefficient"]), dim)
        comps = by_field.setdefault(j, [Polynomial(dim) for _ in range(dim)])
        comps[axis] = comps[axis] + mono
    fields = tuple(VectorField(tuple(by_field[j]), name=f"X{j + 1}")
                   for j in sorted(by_field))
    return VectorFieldSet(fields, "custom-polynomial", dim)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def _axis_difference_1d(n: int, h: float) -> sp.csr_matrix:
    """Centered first difference, one-sided first-order on the two end rows."""
    rows = [0, 0, n - 1, n - 1]
    cols = [0, 1, n - 2, n - 1]
    vals = [-1.0 / h, 1.0 / h, -1.0 / h, 1.0 / h]
    interior = np.arange(1, n - 1)
    rows += list(interior) + list(interior)
    cols += list(interior - 1) + list(interior + 1)
    vals += [-0.5 / h] * (n - 2) + [0.5 / h] * (n - 2)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def axis_difference(grid: Grid, axis: int) -> sp.csr_matrix:
    """Discrete d/dx_axis on the full grid (Kronecker lift of the 1D stencil)."""
    mats = []
    for a in range(grid.ndim):
        if a == axis:
            mats.append(_axis_difference_1d(grid.dims[a], grid.spacing[a]))
        else:
            mats.append(sp.identity(grid.dims[a], format="csr"))
    out = mats[0]
    for m in mats[1:]:
        out = sp.kron(out, m, format="csr")
    return out


def assemble_vector_field(fld: VectorField, grid: Grid) -> sp.csr_matrix:
    """Sparse matrix of X = sum_a c_a(x) d_a on the grid."""
    if fld.dim != grid.ndim:
        raise ValueError("field dimension does not match the grid")
    pts = grid.coords()
    out = None
    for a in range(grid.ndim):
        comp = fld.components[a]
        if comp.is_zero:
            continue
        diag = sp.diags(comp(pts))
        term = diag @ axis_difference(grid, a)
        out = term if out is None else out + term
    if out is None:
        out = sp.csr_matrix((grid.size, grid.size))
    return out.tocsr()


@dataclass
class AssembledOperator:
    """Sum-of-squares matrix sum_j X_j^T X_j + eps sum_a D_a^T D_a."""
    matrix: sp.csr_matrix
    fields_ref: VectorFieldSet
    grid_ref: Grid
    epsilon: float
    field_matrices: tuple
    axis_matrices: tuple

    @property
    def weight(self) -> float:
        return self.grid_ref.weight

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.matrix @ u


def assemble_sum_of_squares(fields: VectorFieldSet, grid: Grid,
                            epsilon: float = 0.0) -> AssembledOperator:
    """Assemble the (optionally regularized) operator; exactly symmetric."""
    if fields.dim != grid.ndim:
        raise ValueError(f"fields are {fields.dim}-dimensional but the grid "
                         f"is {grid.ndim}-dimensional")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    xmats = tuple(assemble_vector_field(f, grid) for f in fields.fields)
    dmats = tuple(axis_difference(grid, a) for a in range(grid.ndim))
    acc = None
    for x in xmats:
        term = (x.T @ x).tocsr()
        acc = term if acc is None else acc + term
    if epsilon > 0:
        for d in dmats:
            acc = acc + epsilon * (d.T @ d).tocsr()
    # enforce bitwise symmetry; entrywise (a_ij + a_ji)/2 is exchange-invariant
    sym = ((acc + acc.T) * 0.5).tocsr()
    sym.sum_duplicates()
    sym.sort_indices()
    return AssembledOperator(matrix=sym, fields_ref=fields, grid_ref=grid,
                             epsilon=float(epsilon), field_matrices=xmats,
                             axis_matrices=dmats)


def h1x_norm(u: np.ndarray, fields: VectorFieldSet, grid: Grid) -> float:
    """Squared graph norm sum_j ||X_j u||_w^2 + ||u||_w^2."""
    u = np.asarray(u, dtype=float)
    w = grid.weight
    total = w * float(u @ u)
    for f in fields.fields:
        xu = assemble_vector_field(f, grid) @ u
        total += w * float(xu @ xu)
    return total


# ---------------------------------------------------------------------------
# bracket generation
# ---------------------------------------------------------------------------

@dataclass
class BracketReport:
    point: np.ndarray
    depth: int
    rank: int
    generators: list
    ranks_by_depth: list


def _bracket_words(fields: VectorFieldSet, depth: int) -> list:
    """All bracket words grouped by length, one representative per (a, b) pair."""
    levels = {1: list(fields.fields)}
    for k in range(2, depth + 1):
        words = []
        for i in range(1, k // 2 + 1):
            j = k - i
            if i == j:
                pairs = itertools.combinations(levels[i], 2)
            else:
                pairs = itertools.product(levels[i], levels[j])
            for a, b in pairs:
                wrd = bracket(a, b)
                if not all(c.is_zero for c in wrd.components):
                    words.append(wrd)
        levels[k] = words
    return [levels[k] for k in range(1, depth + 1)]


def bracket_rank(fields: VectorFieldSet, point, depth: int) -> BracketReport:
    """Rank of the span of bracket words of length <= depth at the point.

    The full-rank outcome at every point is the hypoellipticity certificate
    for the assembled sum of squares.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    point = np.asarray(point, dtype=float)
    if point.size != fields.dim:
        raise ValueError("point dimension does not match the fields")

    levels = _bracket_words(fields, depth)
    vectors = []
    names = []
    ranks_by_depth = []
    for lvl in levels:
        for wrd in lvl:
            vectors.append(wrd.evaluate(point[None, :])[0])
            names.append(wrd.name)
        mat = np.stack(vectors) if vectors else np.zeros((0, fields.dim))
        ranks_by_depth.append(int(np.linalg.matrix_rank(mat, tol=1e-10)))

    rank = ranks_by_depth[-1]
    generators = []
    basis = np.zeros((0, fields.dim))
    for vec, name in zip(vectors, names):
        trial = np.vstack([basis, vec])
        if np.linalg.matrix_rank(trial, tol=1e-10) > basis.shape[0]:
            basis = trial
            generators.append(name)
        if basis.shape[0] == rank:
            break
    return BracketReport(point=point, depth=depth, rank=rank,
                         generators=generators, ranks_by_depth=ranks_by_depth)
