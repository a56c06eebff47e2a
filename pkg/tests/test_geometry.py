import numpy as np
import pytest

from swlab.geometry import (Polynomial, assemble_sum_of_squares,
                            assemble_vector_field, bracket, bracket_rank,
                            build_grid, fields_from_table, h1x_norm,
                            make_fields)
from tests.conftest import interior_bump


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def test_build_grid_1d():
    g = build_grid([(0.0, 1.0)], 5)
    assert g.dims == (5,)
    assert g.spacing == (0.25,)
    assert g.size == 5


def test_build_grid_2d():
    g = build_grid([(-1.0, 1.0), (-1.0, 1.0)], (3, 3))
    assert g.size == 9
    assert g.spacing == (1.0, 1.0)


def test_build_grid_errors():
    with pytest.raises(ValueError, match="degenerate"):
        build_grid([(0.0, 0.0)], 5)
    with pytest.raises(ValueError, match=">= 3"):
        build_grid([(0.0, 1.0)], 2)


def test_node_coord_bijection():
    g = build_grid([(0.0, 1.0), (-2.0, 2.0), (0.0, 3.0)], (4, 5, 6))
    coords = g.coords()
    for idx in (0, 17, g.size - 1):
        assert np.array_equal(g.node_coords(idx), coords[idx])
        assert g.nearest_node(coords[idx]) == idx


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------

def test_axis_field_exact_on_linear():
    g = build_grid([(0.0, 1.0)], 21)
    fields = make_fields("euclidean", 1)
    x = g.coords()[:, 0]
    xu = assemble_vector_field(fields.fields[0], g) @ x
    assert np.allclose(xu, 1.0, atol=1e-13)     # one-sided rows are exact too


def test_grushin_field_on_y():
    g = build_grid([(-1.0, 1.0)] * 2, 17)
    fields = make_fields("grushin")
    coords = g.coords()
    xu = assemble_vector_field(fields.fields[1], g) @ coords[:, 1]
    assert np.allclose(xu, coords[:, 0], atol=1e-12)


def test_heisenberg_field_on_z():
    # X1 = d_x - (y/2) d_z applied to u = z gives -y/2; the symbolic
    # coefficient evaluation is the oracle, the assembled matrix the check
    g = build_grid([(-1.0, 1.0)] * 3, 9)
    fields = make_fields("heisenberg")
    coords = g.coords()
    expected = fields.fields[0].evaluate(coords)[:, 2]
    got = assemble_vector_field(fields.fields[0], g) @ coords[:, 2]
    assert np.allclose(got, expected, atol=1e-12)
    assert np.allclose(expected, -coords[:, 1] / 2.0)


def test_fields_annihilate_constants():
    g = build_grid([(-1.0, 1.0)] * 2, 9)
    for name in ("euclidean", "grushin"):
        fields = make_fields(name, 2 if name == "euclidean" else None)
        ones = np.ones(g.size)
        for f in fields.fields:
            assert np.max(np.abs(assemble_vector_field(f, g) @ ones)) == 0.0


def test_custom_table_matches_preset():
    rows = [
        {"field": 0, "axis": 0, "exponents": (0, 0), "coefficient": 1.0},
        {"field": 1, "axis": 1, "exponents": (1, 0), "coefficient": 1.0},
    ]
    custom = fields_from_table(rows, dim=2)
    preset = make_fields("grushin")
    g = build_grid([(-1.0, 1.0)] * 2, 9)
    for fc, fp in zip(custom.fields, preset.fields):
        a = assemble_vector_field(fc, g)
        b = assemble_vector_field(fp, g)
        assert (a != b).nnz == 0


# ---------------------------------------------------------------------------
# operator assembly
# ---------------------------------------------------------------------------

def test_euclid_interior_stencil_and_row_sums():
    g = build_grid([(0.0, 1.0)] * 2, 9)
    op = assemble_sum_of_squares(make_fields("euclidean", 2), g)
    a = op.matrix.toarray()
    h = g.spacing[0]
    node = g.node_index((4, 4))                     # deep interior
    row = a[node]
    # centered-difference square couples the +-2 axis neighbors at 1/(4h^2)
    assert row[node] == pytest.approx(2.0 / (4 * h * h) * 2)
    for nb in ((2, 4), (6, 4), (4, 2), (4, 6)):
        assert row[g.node_index(nb)] == pytest.approx(-1.0 / (4 * h * h))
    interior = ~g.boundary_mask()
    sums = a.sum(axis=1)
    assert np.max(np.abs(sums)) < 1e-12             # constants in the kernel


def test_exact_symmetry_bitwise(heisenberg_small):
    _, _, op = heisenberg_small
    diff = op.matrix - op.matrix.T
    assert diff.nnz == 0
    op_eps = assemble_sum_of_squares(make_fields("heisenberg"),
                                     op.grid_ref, epsilon=0.37)
    assert (op_eps.matrix - op_eps.matrix.T).nnz == 0


def test_quadratic_form_nonnegative(heisenberg_small):
    _, _, op = heisenberg_small
    rng = np.random.default_rng(0)
    u = rng.standard_normal((op.matrix.shape[0], 10_000))
    quad = np.einsum("ij,ij->j", u, op.matrix @ u)
    norms = np.einsum("ij,ij->j", u, u)
    assert np.all(quad >= -1e-12 * norms)


def test_quadratic_form_equals_field_norms(heisenberg_small):
    grid, fields, op = heisenberg_small
    rng = np.random.default_rng(1)
    u = rng.standard_normal(grid.size) * interior_bump(
        grid.coords(), (0.0, 0.0, 0.0), 0.5)
    lhs = float(u @ (op.matrix @ u))
    rhs = sum(float(np.sum((x @ u) ** 2)) for x in op.field_matrices)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_dimension_mismatch_rejected():
    g = build_grid([(0.0, 1.0)] * 2, 5)
    with pytest.raises(ValueError, match="dimensional"):
        assemble_sum_of_squares(make_fields("heisenberg"), g)


def test_consistency_quadratic_exact_interior():
    g = build_grid([(0.0, 1.0)] * 2, 17)
    op = assemble_sum_of_squares(make_fields("euclidean", 2), g)
    coords = g.coords()
    u = coords[:, 0] ** 2 + 2.0 * coords[:, 1] ** 2
    au = op.matrix @ u
    # -Laplace(u) = -6 exactly at nodes two layers away from the boundary
    deep = g.interior_margin_mask(2.1 / 16.0)
    assert np.allclose(au[deep], -6.0, atol=1e-10)


def test_consistency_order_two_on_smooth():
    errs = []
    for n in (33, 65):
        g = build_grid([(0.0, 1.0)] * 2, n)
        op = assemble_sum_of_squares(make_fields("euclidean", 2), g)
        coords = g.coords()
        u = np.sin(np.pi * coords[:, 0]) * np.sin(2 * np.pi * coords[:, 1])
        exact = (np.pi ** 2 + 4 * np.pi ** 2) * u
        deep = g.interior_margin_mask(0.2)
        errs.append(np.max(np.abs((op.matrix @ u - exact)[deep])))
    order = np.log2(errs[0] / errs[1])
    assert order >= 1.9


# ---------------------------------------------------------------------------
# brackets
# ---------------------------------------------------------------------------

def test_bracket_rank_euclidean():
    fields = make_fields("euclidean", 3)
    rep = bracket_rank(fields, (0.3, -0.2, 0.9), 1)
    assert rep.rank == 3


def test_bracket_rank_heisenberg():
    fields = make_fields("heisenberg")
    rep = bracket_rank(fields, (0.0, 0.0, 0.0), 2)
    assert rep.ranks_by_depth == [2, 3]
    assert "[X1,X2]" in rep.generators
    # the bracket itself is d_z exactly
    br = bracket(fields.fields[0], fields.fields[1])
    assert br.components[0].is_zero and br.components[1].is_zero
    assert br.components[2].coeffs == {(0, 0, 0): 1.0}


def test_bracket_rank_grushin_degenerate_point():
    fields = make_fields("grushin")
    assert bracket_rank(fields, (0.0, 0.5), 1).rank == 1
    assert bracket_rank(fields, (0.0, 0.5), 2).rank == 2
    assert bracket_rank(fields, (0.7, 0.5), 1).rank == 2


def test_bracket_rank_monotone_and_full_at_samples():
    rng = np.random.default_rng(2)
    cases = [(make_fields("heisenberg"), 3, 2),
             (make_fields("grushin"), 2, 2),
             (make_fields("euclidean", 2), 2, 2)]
    for fields, d, depth in cases:
        for _ in range(5):
            pt = rng.uniform(-1, 1, size=d)
            rep = bracket_rank(fields, pt, depth)
            assert all(a <= b for a, b in
                       zip(rep.ranks_by_depth, rep.ranks_by_depth[1:]))
            assert rep.rank == d


# ---------------------------------------------------------------------------
# graph norm
# ---------------------------------------------------------------------------

def test_h1x_norm_zero(grid_1d):
    fields = make_fields("euclidean", 1)
    assert h1x_norm(np.zeros(grid_1d.size), fields, grid_1d) == 0.0


def test_h1x_norm_dominates_l2(grid_1d):
    fields = make_fields("euclidean", 1)
    u = interior_bump(grid_1d.coords(), (0.5,), 0.2)
    w = grid_1d.weight
    assert h1x_norm(u, fields, grid_1d) >= w * float(u @ u)


def test_h1x_norm_matrix_identity(heisenberg_small):
    grid, fields, op = heisenberg_small
    rng = np.random.default_rng(3)
    u = rng.standard_normal(grid.size)
    w = grid.weight
    expected = w * float(u @ (op.matrix @ u)) + w * float(u @ u)
    assert h1x_norm(u, fields, grid) == pytest.approx(expected, rel=1e-12)


def test_polynomial_algebra():
    p = Polynomial.monomial((1, 0), 2.0, 2)        # 2x
    q = Polynomial.monomial((0, 1), 1.0, 2)        # y
    prod = p * q
    assert prod.coeffs == {(1, 1): 2.0}
    assert (p.derivative(0)).coeffs == {(0, 0): 2.0}
    pts = np.array([[1.5, -2.0]])
    assert (p + q)(pts)[0] == pytest.approx(1.0)
