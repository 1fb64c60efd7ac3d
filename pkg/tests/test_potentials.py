import numpy as np
import pytest

import babybps as bb
from babybps.errors import InputError, NonHarmonicError, PotentialDomainError
from babybps.fullmodel import HarmonicFunction
from babybps.potentials import sqrt_clip_counter


class TestBuiltinFamilies:
    def test_old_baby_vacuum_at_north_pole(self):
        V = bb.builtin_potential("old_baby", [1.0])
        assert V.eval(0.0, 0.0) == 0.0

    def test_old_baby_limit_two(self):
        # V -> 2 mu^2 as |omega| -> infinity; probe at |omega| = 1e6
        V = bb.builtin_potential("old_baby", [1.0])
        assert abs(V.eval(1e6, 0.0) - 2.0) < 1e-11

    def test_old_baby_matches_s3(self):
        # V = mu^2 (1 - s3) under the projection
        V = bb.builtin_potential("old_baby", [1.3])
        rng = np.random.RandomState(2)
        u, v = rng.standard_normal(50), rng.standard_normal(50)
        s3 = (1 - u**2 - v**2) / (1 + u**2 + v**2)
        assert np.allclose(V.eval(u, v), 1.3**2 * (1 - s3), atol=1e-14)

    def test_bps_test_value(self):
        V = bb.builtin_potential("bps_test", [1.0, 1.0])
        assert abs(V.eval(1.0, 0.0) - 0.25) < 1e-15

    def test_half_u_squared_is_half_square(self):
        V = bb.builtin_potential("half_U_squared", [2.0])
        u, v = 0.7, -0.4
        s = u * u + v * v
        U = 2.0 * 2.0 * s / (1 + s)
        assert abs(V.eval(u, v) - 0.5 * U**2) < 1e-14

    def test_unknown_family_rejected(self):
        with pytest.raises(InputError, match="unknown potential"):
            bb.builtin_potential("nope")

    def test_negative_parameters_rejected(self):
        with pytest.raises(InputError):
            bb.builtin_potential("old_baby", [-1.0])
        with pytest.raises(InputError):
            bb.builtin_potential("bps_test", [-1.0, 1.0])

    @pytest.mark.parametrize("name,params", [("old_baby", [1.2]),
                                             ("half_U_squared", [0.8]),
                                             ("bps_test", [1.0, 1.5])])
    def test_analytic_grad_matches_finite_differences(self, name, params):
        V = bb.builtin_potential(name, params)
        rng = np.random.RandomState(3)
        u, v = rng.standard_normal(40), rng.standard_normal(40)
        errs = []
        for h in (1e-3, 5e-4):
            fd_u = (V.eval(u + h, v) - V.eval(u - h, v)) / (2 * h)
            fd_v = (V.eval(u, v + h) - V.eval(u, v - h)) / (2 * h)
            gu, gv = V.grad(u, v)
            errs.append(max(np.max(np.abs(fd_u - gu)), np.max(np.abs(fd_v - gv))))
        ratio = errs[0] / errs[1]
        assert 3.5 <= ratio <= 4.5

    def test_custom_U_potential(self):
        V = bb.potential_from_U(lambda u, v: np.asarray(u) ** 2)
        assert abs(V.eval(3.0, 1.0) - 0.5 * 81) < 1e-12

    def test_vacuum_point_validated(self):
        with pytest.raises(InputError, match="not a vacuum"):
            bb.potential_from_callable(lambda u, v: np.asarray(u) * 0 + 1.0,
                                       vacuum_points=[(0.0, 0.0)])


class TestModelParams:
    def test_lambda2_filled_from_beta(self):
        p = bb.ModelParams(beta=2.0)
        assert p.lambda2 == 32.0

    def test_beta_filled_from_lambda2(self):
        p = bb.ModelParams(lambda2=1.0, lambda1=1.0)
        assert p.beta == 1.0 / 16.0

    def test_inconsistent_pair_rejected(self):
        with pytest.raises(InputError, match="inconsistent"):
            bb.ModelParams(beta=1.0, lambda2=1.0)

    def test_negative_rejected(self):
        with pytest.raises(InputError):
            bb.ModelParams(beta=-1.0)
        with pytest.raises(InputError):
            bb.ModelParams(beta=1.0, lambda1=-0.5)


class TestGaugeFromPotential:
    def test_zero_potential_gives_zero_gauge(self):
        g = bb.gauge_from_potential(bb.zero_potential(), bb.ModelParams(beta=1.0))
        u = np.linspace(-2, 2, 11)
        assert np.all(g(u, u) == 0)

    def test_first_order_equation_value(self):
        # bps_test at |omega| = 1 with beta=lam=1, sigma=-1:
        # J = -(1+s)^4 g/(2 lambda2) must equal sigma sqrt(V) (1+s)^2/(4 sqrt(beta)) = -0.5
        params = bb.ModelParams(beta=1.0)
        V = bb.builtin_potential("bps_test", [1.0, 1.0])
        g = bb.gauge_from_potential(V, params, sigma=-1.0)
        T = 2.0
        J = -(T**4) * g(1.0, 0.0) / (2 * params.lambda2)
        assert abs(J - (-0.5)) < 1e-14

    def test_matches_restricted_rhs_for_random_points(self):
        # independent route: sigma sqrt(V) T^2/(4 sqrt(beta)) == -(T^4 g)/(2 lambda2)
        params = bb.ModelParams(beta=0.7)
        V = bb.builtin_potential("old_baby", [1.1])
        rng = np.random.RandomState(4)
        u, v = rng.standard_normal(60), rng.standard_normal(60)
        T = 1 + u**2 + v**2
        for sigma in (-1.0, 1.0):
            g = bb.gauge_from_potential(V, params, sigma)
            lhs = -(T**4) * g(u, v) / (2 * params.lambda2)
            rhs = sigma * np.sqrt(V.eval(u, v)) * T**2 / (4 * np.sqrt(params.beta))
            assert np.max(np.abs(lhs - rhs)) < 1e-13

    def test_branch_flip_negates_exactly(self):
        params = bb.ModelParams(beta=1.0)
        V = bb.builtin_potential("bps_test", [1.0, 1.0])
        gm = bb.gauge_from_potential(V, params, -1.0)
        gp = bb.gauge_from_potential(V, params, 1.0)
        u = np.linspace(-2, 2, 17)
        assert np.array_equal(gm(u, u), -gp(u, u))

    def test_negative_potential_reported_with_node(self):
        bad = bb.potential_from_callable(lambda u, v: -np.ones_like(np.asarray(u, dtype=float)))
        g = bb.gauge_from_potential(bad, bb.ModelParams(beta=1.0))
        with pytest.raises(PotentialDomainError, match="node"):
            g(np.array([0.0, 1.0]), np.array([0.0, 0.0]))

    def test_equipartition_identity(self):
        # plugging J = sigma sqrt(V) T^2/(4 sqrt(beta)) back gives 16 beta J^2/T^4 = V
        rng = np.random.RandomState(6)
        Vvals = rng.uniform(0, 3.0, 100)
        T = 1 + rng.uniform(0, 4.0, 100)
        beta = 0.9
        for sigma in (-1, 1):
            J = sigma * np.sqrt(Vvals) * T**2 / (4 * np.sqrt(beta))
            assert np.max(np.abs(16 * beta * J**2 / T**4 - Vvals)) < 1e-12

    def test_sqrt_clip_counter(self):
        sqrt_clip_counter.reset()
        bb.potentials.sqrt_nonneg(np.array([1.0, -1e-10, -1e-20]))
        assert sqrt_clip_counter.count == 1  # only the genuine negative counts


class TestConstructedPotential:
    def setup_method(self):
        self.params = bb.ModelParams(lambda2=1.0, lambda1=2.0)

    def test_zero_gauge_constant_harmonic_gives_zero(self):
        V = bb.build_full_model_potential(lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
                                          HarmonicFunction.constant(3.0), self.params)
        u = np.linspace(-1, 1, 9)
        assert np.allclose(V.eval(u, u), 0.0)

    def test_pure_gauge_term(self):
        # g = 2 lambda2/T^4 with constant H gives V = lambda2/T^4
        lam2 = self.params.lambda2
        def g(u, v):
            T = 1 + np.asarray(u) ** 2 + np.asarray(v) ** 2
            return 2 * lam2 / T**4
        V = bb.build_full_model_potential(g, HarmonicFunction.constant(), self.params)
        rng = np.random.RandomState(7)
        u, v = rng.standard_normal(50), rng.standard_normal(50)
        T = 1 + u**2 + v**2
        assert np.max(np.abs(V.eval(u, v) - lam2 / T**4)) < 1e-14

    def test_pure_harmonic_term(self):
        # H = c*u, g = 0 gives V = c^2 T^2/(2 lambda1)
        c = 0.7
        V = bb.build_full_model_potential(lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
                                          HarmonicFunction.linear(c, 0.0), self.params)
        rng = np.random.RandomState(8)
        u, v = rng.standard_normal(50), rng.standard_normal(50)
        T = 1 + u**2 + v**2
        assert np.max(np.abs(V.eval(u, v) - c**2 * T**2 / (2 * self.params.lambda1))) < 1e-13

    def test_nonnegative_by_construction(self):
        V = bb.build_full_model_potential(
            lambda u, v: np.sin(np.asarray(u)) / (1 + np.asarray(v) ** 2),
            HarmonicFunction.polynomial(re_coeffs=[0, 0.3, 0.1]), self.params)
        rng = np.random.RandomState(9)
        u, v = rng.uniform(-3, 3, 200), rng.uniform(-3, 3, 200)
        assert np.all(V.eval(u, v) >= 0)

    def test_non_harmonic_rejected_with_residual(self):
        from babybps.pipeline import parse_h2
        h = parse_h2("monomial:2,0")  # u^2: Laplacian 2
        with pytest.raises(NonHarmonicError) as err:
            bb.build_full_model_potential(lambda u, v: np.zeros_like(np.asarray(u, dtype=float)),
                                          h, self.params)
        assert abs(err.value.residual - 2.0) <= 1e-8

    def test_fd_grad_consistency(self):
        def g(u, v):
            T = 1 + np.asarray(u) ** 2 + np.asarray(v) ** 2
            return 1.0 / T**2
        V = bb.build_full_model_potential(g, HarmonicFunction.linear(0.2, 0.1), self.params)
        u, v = np.array([0.4]), np.array([-0.3])
        gu, gv = V.grad(u, v)
        h = 1e-5
        fd_u = (V.eval(u + h, v) - V.eval(u - h, v)) / (2 * h)
        assert abs(gu[0] - fd_u[0]) < 1e-6
