import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from bevolume.catalog import (
    bounded_weight,
    euclidean,
    gaussian_soliton,
    hyperbolic,
    linear_weight,
    perturbed,
    sphere,
)
from bevolume.checks import (
    check_bounded_gradient_remark,
    check_dyadic_bound,
    check_integral_estimate,
    check_main_theorem,
    check_petersen_wei,
    check_psi_lp,
    check_ratio_derivative,
    check_ratio_derivative_reduced,
    check_riccati,
    curvature_norm,
    volume_ratio,
)
from bevolume.model_space import unit_sphere_area
from bevolume.radial_manifold import mu_f


class TestRiccati:
    def test_euclidean_is_vacuous(self):
        rep = check_riccati(euclidean(3), 0.0, 0.0)
        assert rep.passed and rep.lhs == rep.rhs == 0.0
        assert "vacuous" in rep.notes[0]

    def test_hyperbolic_closed_form_at_one(self):
        rep = check_riccati(hyperbolic(3), 0.0, 0.0, grid=[1.0])
        c = 1 / math.tanh(1.0)
        psi = 2 * (c - 1.0)
        dpsi = 2 * (1.0 - c * c + 1.0)
        assert rep.lhs == pytest.approx(dpsi + psi**2 / 2, rel=1e-12)
        assert rep.rhs == pytest.approx(-2 * psi + 2.0, rel=1e-12)
        assert rep.passed

    def test_soliton_active_set_empty(self):
        rep = check_riccati(gaussian_soliton(3, 0.25), 0.0, 0.0, grid=np.linspace(0, 1, 101)[1:])
        assert rep.passed and rep.resolution["active_points"] == 0

    def test_grid_outside_domain_rejected(self):
        with pytest.raises(ValueError):
            check_riccati(sphere(3), 0.0, 0.0, grid=[0.5, 2.0])


class TestIntegralEstimate:
    def test_euclidean_zero(self):
        rep = check_integral_estimate(euclidean(3), 0.0, 0.0, 2.0, 1.0)
        assert rep.passed and rep.lhs == 0.0 and rep.rhs == 0.0

    def test_hyperbolic_against_scipy_oracle(self):
        rep = check_integral_estimate(hyperbolic(3), 0.0, 0.0, 1.75, 1.5)
        oracle = quad(lambda r: (2 * (1 / math.tanh(r) - 1 / r)) ** 3.5 * math.sinh(r) ** 2, 0, 1.5,
                      epsabs=0, epsrel=1e-12)[0]
        assert rep.lhs == pytest.approx(oracle, rel=1e-7)
        assert rep.passed
        assert rep.lhs <= rep.resolution["sharp_rhs"] <= rep.rhs

    def test_soliton_example(self):
        assert check_integral_estimate(gaussian_soliton(4, 0.25), 0.0, 1.0, 2.5, 2.0).passed

    def test_rejects_p_out_of_range(self):
        with pytest.raises(ValueError, match="violated"):
            check_integral_estimate(hyperbolic(3), 0.0, 0.0, 1.5, 1.0)
        with pytest.raises(ValueError, match="violated"):
            check_integral_estimate(hyperbolic(3), 0.0, 0.0, 3.0, 1.0)


class TestDyadic:
    def test_zero_gradient_excess(self):
        rep = check_dyadic_bound(bounded_weight(3, 0.5), 0.5, 2.0, 8.0, None, 3.0, 1.0)
        assert rep.passed and rep.lhs == 0.0

    @pytest.mark.parametrize("m, a, q, R", [(gaussian_soliton(3, 0.25), 0.0, 8.0, 1.0),
                                            (linear_weight(3), 0.5, 7.0, 2.0)])
    def test_examples(self, m, a, q, R):
        rep = check_dyadic_bound(m, a, 2.0, q, None, 3.0, R)
        assert rep.passed
        assert rep.resolution["shell_integral"] <= rep.resolution["shell_bound"]

    def test_shell_integral_against_oracle(self):
        # euclidean n=3, a=0: int_B r^{-s} = 4 pi R^{3-s}/(3-s)
        rep = check_dyadic_bound(euclidean(3), 0.0, 2.0, 8.0, None, 3.0, 1.5)
        s = 8 / 3
        assert rep.resolution["shell_integral"] == pytest.approx(4 * math.pi * 1.5 ** (3 - s) / (3 - s), rel=1e-7)

    def test_rejects_small_q(self):
        with pytest.raises(ValueError, match="q > l p"):
            check_dyadic_bound(gaussian_soliton(3), 0.0, 2.0, 6.0, None, 3.0, 1.0)


class TestPsiLp:
    def test_euclidean(self):
        rep = check_psi_lp(euclidean(3), 0.0, 0.0, 2.0, 8.0, None, 3.0, 1.0)
        assert rep.passed and rep.lhs == 0.0

    def test_examples(self):
        assert check_psi_lp(hyperbolic(3), 0.0, 0.0, 1.75, 20.0, None, 3.0, 1.0).passed
        assert check_psi_lp(gaussian_soliton(4, 0.25), 0.0, 0.5, 2.2, 30.0, None, 4.0, 2.0).passed


class TestRatioDerivative:
    def test_model_match(self):
        rep = check_ratio_derivative(hyperbolic(3), -1.0, 0.0, 1.0)
        assert rep.passed and abs(rep.lhs) < 1e-9 and rep.rhs == 0.0

    def test_examples(self):
        assert check_ratio_derivative(hyperbolic(3), 0.0, 0.0, 1.0).passed
        assert check_ratio_derivative(gaussian_soliton(3, 0.25), 0.0, 0.25, 1.5).passed

    def test_needs_room_for_the_stencil(self):
        with pytest.raises(ValueError):
            check_ratio_derivative(sphere(3), 1.0, 0.0, math.pi / 2)

    def test_reduced_examples(self):
        rep = check_ratio_derivative_reduced(euclidean(3), 0.0, 0.0, 2.0, 1.0)
        assert rep.passed and abs(rep.lhs) < 1e-9
        assert check_ratio_derivative_reduced(hyperbolic(2), 0.0, 0.0, 1.5, 1.0).passed
        assert check_ratio_derivative_reduced(sphere(3), 1.0, 0.0, 2.0, math.pi / 4).passed

    def test_volume_ratio_hyperbolic_vs_flat(self):
        # n = 2: vol B = 2 pi (cosh R - 1), v = pi R^2
        R = 1.2
        assert volume_ratio(hyperbolic(2), 0.0, 0.0, R) == pytest.approx(
            2 * (math.cosh(R) - 1) / R**2, rel=1e-11)


class TestMainTheorem:
    def test_euclidean(self):
        rep = check_main_theorem(euclidean(3), 0.0, 0.0, 2.0, 8.0, 3.0, 0.3, 1.0)
        assert rep.passed and abs(rep.lhs) < 1e-9 and rep.rhs == 0.0

    def test_model_match(self):
        rep = check_main_theorem(hyperbolic(3), -1.0, 0.0, 2.0, 8.0, 3.0, 0.3, 1.0)
        assert rep.passed and abs(rep.lhs) < 1e-9 and rep.rhs == 0.0

    def test_soliton_example(self):
        rep = check_main_theorem(gaussian_soliton(4, 0.25), 0.0, 0.0, 2.5, 40.0, 4.0, 0.25, 1.5)
        assert rep.passed
        assert rep.resolution["kappa"] > 0

    def test_positive_lambda_notes_restriction(self):
        rep = check_main_theorem(sphere(3), 0.5, 0.0, 2.0, 8.0, 3.0, 0.3, 1.0)
        assert rep.passed and rep.notes

    def test_parameter_violations(self):
        with pytest.raises(ValueError, match="p > n/2"):
            check_main_theorem(gaussian_soliton(4), 0.0, 0.0, 2.0, 40.0, 4.0, 0.25, 1.0)
        with pytest.raises(ValueError, match="r <= R"):
            check_main_theorem(gaussian_soliton(3), 0.0, 0.0, 2.0, 8.0, 3.0, 1.5, 1.0)
        with pytest.raises(ValueError, match="R0"):
            check_main_theorem(gaussian_soliton(3), 0.0, 0.0, 2.0, 8.0, 3.0, 0.5, 1.0, R0=0.5)


class TestPetersenWei:
    def test_examples(self):
        rep = check_petersen_wei(hyperbolic(3), 0.0, 2.0, 0.1, 1.0)
        assert rep.passed
        # ||Ric^0_-||_p on H^3 with Ric_- = 2: 2 (vol B(1))^{1/p}
        vol = unit_sphere_area(3) * quad(lambda t: math.sinh(t) ** 2, 0, 1)[0]
        assert rep.resolution["ric_norm"] == pytest.approx(2 * vol**0.5, rel=1e-7)
        assert check_petersen_wei(perturbed(3, 0.02), 0.0, 2.0, 0.1, 1.0).passed
        assert check_petersen_wei(euclidean(3), 0.0, 2.0, 0.1, 1.0).lhs == pytest.approx(0.0, abs=1e-9)

    def test_rejects_weighted_or_positive_lambda(self):
        with pytest.raises(ValueError, match="f == 0"):
            check_petersen_wei(gaussian_soliton(3), 0.0, 2.0, 0.1, 1.0)
        with pytest.raises(ValueError, match="lambda <= 0"):
            check_petersen_wei(sphere(3), 0.5, 2.0, 0.1, 1.0)


class TestBoundedGradient:
    def test_examples(self):
        assert check_bounded_gradient_remark(bounded_weight(3, 0.5), -1.0, 0.5, 2.0, 0.2, 1.0).passed
        assert check_bounded_gradient_remark(euclidean(3), 0.0, 0.0, 2.0, 0.2, 1.0).passed

    def test_rejects_large_gradient(self):
        with pytest.raises(ValueError, match="gradient bound violated"):
            check_bounded_gradient_remark(bounded_weight(3, 0.5), 0.0, 0.4, 2.0, 0.2, 1.0)


def test_bishop_gromov_regression():
    # phi = r - 0.02 r^3 has both eigenvalues >= 0: verify, then the ratio is non-increasing
    m = perturbed(3, -0.02)
    r = np.linspace(0.01, 2.0, 200)
    assert np.all(np.asarray(mu_f(m, r)) >= 0)
    ratios = [volume_ratio(m, 0.0, 0.0, R) for R in np.linspace(0.05, 2.0, 40)]
    assert np.all(np.diff(ratios) <= 1e-12)


_NORM_CHECKS = {
    "integral_estimate": lambda m, R: check_integral_estimate(m, 0.0, 0.0, 2.0, R),
    "dyadic_bound": lambda m, R: check_dyadic_bound(m, 0.0, 2.0, 8.0, 5.0, 3.0, R),
    "psi_lp": lambda m, R: check_psi_lp(m, 0.0, 0.0, 2.0, 8.0, 5.0, 3.0, R),
    "main_theorem": lambda m, R: check_main_theorem(m, 0.0, 0.0, 2.0, 8.0, 3.0, 0.05, R, R0=2.0),
    "petersen_wei": lambda m, R: check_petersen_wei(m, 0.0, 2.0, 0.05, R),
}


@pytest.mark.parametrize("check", sorted(_NORM_CHECKS))
def test_rhs_nondecreasing_in_R(check):
    m = hyperbolic(3) if check == "petersen_wei" else gaussian_soliton(3)
    rhs = [_NORM_CHECKS[check](m, R).rhs for R in np.linspace(0.2, 2.0, 7)]
    assert np.all(np.diff(rhs) >= -1e-12 * np.abs(rhs[1:]))


@settings(max_examples=15, deadline=None)
@given(k=st.floats(0.2, 2.0), R=st.floats(0.1, 2.0), p=st.floats(1.55, 2.9))
def test_hyperbolic_curvature_norm_closed_form(k, R, p):
    # Ric^0_- = 2k on H^3(k): ||.||_p = 2k vol(B_R)^{1/p}
    m = hyperbolic(3, k)
    s = math.sqrt(k)
    vol = 4 * math.pi * (math.sinh(2 * s * R) / (4 * s) - R / 2) / k
    assert curvature_norm(m, 0.0, 0.0, p, R) == pytest.approx(2 * k * vol ** (1 / p), rel=1e-6)


@settings(max_examples=10, deadline=None)
@given(c=st.floats(0.05, 1.0), R=st.floats(0.3, 2.0), n=st.integers(2, 4))
def test_soliton_lemma_chain_passes(c, R, n):
    p = {2: 1.5, 3: 2.0, 4: 2.5}[n]
    m = gaussian_soliton(n, c)
    assert check_integral_estimate(m, 0.0, 0.0, p, R).passed
    assert check_ratio_derivative(m, 0.0, 0.0, R).passed
