import numpy as np
import pytest

import babybps as bb
from babybps.errors import InputError, SpacingError
from babybps.fieldio import field_csv_text, parse_field_csv


def const_field(grid, w0):
    shape = grid.shape
    return bb.ComplexField2D.from_arrays(grid, np.full(shape, w0.real), np.full(shape, w0.imag))


@pytest.fixture
def grid():
    return bb.Grid2D.centered(17, 17, 1.0, 1.0)


class TestGrid:
    def test_centered_spans_symmetric_box(self, grid):
        assert grid.x[0] == -1.0 and grid.x[-1] == 1.0
        assert grid.y[0] == -1.0 and grid.y[-1] == 1.0

    def test_too_few_nodes_rejected(self):
        with pytest.raises(InputError):
            bb.Grid2D(2, 5, 0.1, 0.1)

    def test_nonpositive_spacing_rejected(self):
        with pytest.raises(InputError):
            bb.Grid2D(5, 5, 0.0, 0.1)


class TestStereographic:
    def test_north_pole(self, grid):
        s = bb.stereographic_project(const_field(grid, 0.0 + 0.0j))
        assert np.allclose(s.s1.values, 0) and np.allclose(s.s2.values, 0)
        assert np.allclose(s.s3.values, 1)

    def test_equator_real(self, grid):
        s = bb.stereographic_project(const_field(grid, 1.0 + 0.0j))
        assert np.allclose(s.s1.values, 1) and np.allclose(s.s2.values, 0)
        assert np.allclose(s.s3.values, 0, atol=1e-15)

    def test_equator_imag(self, grid):
        s = bb.stereographic_project(const_field(grid, 1.0j))
        assert np.allclose(s.s2.values, 1)
        assert np.allclose(s.s1.values, 0) and np.allclose(s.s3.values, 0, atol=1e-15)

    def test_inverse_north_pole(self, grid):
        s = bb.UnitVectorField.from_arrays(grid, np.zeros(grid.shape), np.zeros(grid.shape), np.ones(grid.shape))
        w, clamped = bb.stereographic_inverse(s)
        assert not clamped.any()
        assert np.allclose(w.u.values, 0) and np.allclose(w.v.values, 0)

    def test_inverse_equator(self, grid):
        s = bb.UnitVectorField.from_arrays(grid, np.ones(grid.shape), np.zeros(grid.shape), np.zeros(grid.shape))
        w, clamped = bb.stereographic_inverse(s)
        assert not clamped.any()
        assert np.allclose(w.u.values, 1) and np.allclose(w.v.values, 0)

    def test_round_trip_random_unit_vectors(self):
        # 10^3 nodes away from the south pole; project(inverse) within 1e-12
        rng = np.random.RandomState(42)
        g = bb.Grid2D(40, 25, 0.1, 0.1)
        vecs = rng.standard_normal((3, 25, 40))
        vecs /= np.sqrt(np.sum(vecs**2, axis=0))
        vecs[2] = np.maximum(vecs[2], -1 + 1e-6)
        vecs /= np.sqrt(np.sum(vecs**2, axis=0))
        s = bb.UnitVectorField.from_arrays(g, *vecs)
        w, clamped = bb.stereographic_inverse(s)
        assert not clamped.any()
        back = bb.stereographic_project(w)
        err = max(np.max(np.abs(back.s1.values - vecs[0])),
                  np.max(np.abs(back.s2.values - vecs[1])),
                  np.max(np.abs(back.s3.values - vecs[2])))
        assert err <= 1e-12

    def test_south_pole_clamped_with_phase(self, grid):
        s1 = np.zeros(grid.shape); s2 = np.zeros(grid.shape); s3 = np.ones(grid.shape)
        # one node exactly at the south pole, one near it with a definite phase
        s1[3, 3], s2[3, 3], s3[3, 3] = 0.0, 0.0, -1.0
        eps = 1e-13
        s1[5, 5], s2[5, 5], s3[5, 5] = 0.0, np.sqrt(1 - (1 - eps) ** 2), -(1 - eps)
        s = bb.UnitVectorField.from_arrays(grid, s1, s2, s3)
        w, clamped = bb.stereographic_inverse(s, cap=1e3)
        assert clamped[3, 3] and clamped[5, 5]
        assert clamped.sum() == 2
        assert abs(w.u.values[3, 3] - 1e3) < 1e-9  # phase 0 convention at the exact pole
        assert abs(w.v.values[5, 5] - 1e3) < 1e-9  # phase preserved (pure +i direction)

    def test_unit_norm_enforced(self, grid):
        with pytest.raises(InputError):
            bb.UnitVectorField.from_arrays(grid, np.ones(grid.shape), np.zeros(grid.shape), np.ones(grid.shape))


class TestDerivatives:
    def test_linear_exact_everywhere(self, grid):
        X, Y = grid.mesh()
        fx = bb.partial_x(bb.ScalarField2D(grid, X))
        fy = bb.partial_y(bb.ScalarField2D(grid, X))
        assert np.allclose(fx.values, 1, atol=1e-13)
        assert np.allclose(fy.values, 0, atol=1e-13)

    def test_quadratic_exact(self, grid):
        X, _ = grid.mesh()
        fx = bb.partial_x(bb.ScalarField2D(grid, X**2))
        assert np.max(np.abs(fx.values - 2 * X)) < 1e-12  # one-sided stencils are quadratic-exact too

    def test_sin_second_order(self):
        errs = []
        for N in (33, 65):
            g = bb.Grid2D.centered(N, N, 1.0, 1.0)
            X, _ = g.mesh()
            fx = bb.partial_x(bb.ScalarField2D(g, np.sin(3 * X)))
            errs.append(np.max(np.abs(fx.values - 3 * np.cos(3 * X))))
        ratio = errs[0] / errs[1]
        assert 3.5 <= ratio <= 4.5

    def test_jacobian_antiholomorphic(self, grid):
        X, Y = grid.mesh()
        w = bb.ComplexField2D.from_arrays(grid, X, -Y)
        assert np.allclose(bb.jacobian_det(w).values, -1, atol=1e-13)

    def test_jacobian_identity_map(self, grid):
        X, Y = grid.mesh()
        w = bb.ComplexField2D.from_arrays(grid, X, Y)
        assert np.allclose(bb.jacobian_det(w).values, 1, atol=1e-13)

    def test_jacobian_rank_deficient(self, grid):
        X, _ = grid.mesh()
        w = bb.ComplexField2D.from_arrays(grid, np.tanh(X), np.zeros(grid.shape))
        assert np.all(bb.jacobian_det(w).values == 0)

    def test_jacobian_swap_antisymmetry_exact(self, grid):
        rng = np.random.RandomState(0)
        u = rng.standard_normal(grid.shape)
        v = rng.standard_normal(grid.shape)
        J = bb.jacobian_det(bb.ComplexField2D.from_arrays(grid, u, v)).values
        Jswap = bb.jacobian_det(bb.ComplexField2D.from_arrays(grid, v, u)).values
        assert np.array_equal(Jswap, -J)

    def test_complex_derivative_identity(self, grid):
        # w_x w*_y - w_y w*_x = -2iJ, nodewise, to round-off
        rng = np.random.RandomState(1)
        w = bb.ComplexField2D.from_arrays(grid, rng.standard_normal(grid.shape),
                                          rng.standard_normal(grid.shape))
        wx, wy = w.derivative_arrays("fd")
        W = wx * np.conj(wy) - wy * np.conj(wx)
        J = bb.jacobian_det(w).values
        assert np.max(np.abs(W + 2j * J)) < 1e-12

    def test_stored_mode_requires_payload(self, grid):
        X, Y = grid.mesh()
        w = bb.ComplexField2D.from_arrays(grid, X, Y)
        with pytest.raises(InputError):
            w.derivative_arrays("stored")


class TestFieldCsv:
    def test_round_trip_is_exact(self, grid):
        rng = np.random.RandomState(5)
        w = bb.ComplexField2D.from_arrays(grid, rng.standard_normal(grid.shape),
                                          rng.standard_normal(grid.shape))
        w2 = parse_field_csv(field_csv_text(w))
        assert np.array_equal(w.u.values, w2.u.values)
        assert np.array_equal(w.v.values, w2.v.values)
        assert w2.grid.nx == grid.nx and abs(w2.grid.hx - grid.hx) < 1e-15

    def test_non_uniform_spacing_rejected(self):
        lines = ["x,y,u,v"]
        xs = [0.0, 0.1, 0.25]  # uneven
        for y in (0.0, 0.1, 0.2):
            for x in xs:
                lines.append(f"{x},{y},0,0")
        with pytest.raises(SpacingError, match="non-uniform x spacing"):
            parse_field_csv("\n".join(lines))

    def test_missing_header_rejected(self):
        with pytest.raises(InputError, match="header"):
            parse_field_csv("a,b,c,d\n0,0,0,0\n")

    def test_seventeen_significant_digits(self, grid):
        w = const_field(grid, (1 / 3) + 0j)
        text = field_csv_text(w)
        assert "0.33333333333333331" in text
