import math

import pytest
from hypothesis import given, strategies as st

from contomp import (
    KernelSpec,
    ParameterError,
    check_admissible,
    cmf_eval,
    inverse_linear,
    kernel_eval,
    laplace,
)
from contomp.kernels import finite_difference_check


class TestCMFFamilies:
    def test_laplace_values(self):
        lam = laplace(1.0)
        assert cmf_eval(lam, 0.0) == 1.0
        assert cmf_eval(lam, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_inverse_linear_values(self):
        inv = inverse_linear(2.0)
        assert cmf_eval(inv, 0.0) == 1.0
        assert cmf_eval(inv, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_negative_argument_rejected(self):
        with pytest.raises(ParameterError):
            cmf_eval(laplace(1.0), -0.1)

    @pytest.mark.parametrize("lam", [0.0, -1.0])
    def test_bad_lam_rejected(self, lam):
        with pytest.raises(ParameterError):
            laplace(lam)
        with pytest.raises(ParameterError):
            inverse_linear(lam)

    @pytest.mark.parametrize("factory,lam", [
        (laplace, 0.5), (laplace, 4.0), (inverse_linear, 0.5), (inverse_linear, 2.0),
    ])
    def test_derivatives_match_finite_differences(self, factory, lam):
        spec = factory(lam)
        assert finite_difference_check(spec, [0.1, 0.5, 1.0, 3.0])

    @pytest.mark.parametrize("factory", [laplace, inverse_linear])
    def test_radius_inverts_phi(self, factory):
        spec = factory(1.7)
        for eps in (0.5, 1e-3, 1e-9):
            assert spec.phi(spec.radius_for(eps)) == pytest.approx(eps, rel=1e-9)


class TestKernelSpec:
    def test_bad_p_rejected(self):
        with pytest.raises(ParameterError):
            KernelSpec.cmf_kernel(laplace(1.0), 1.5, 1)
        with pytest.raises(ParameterError):
            KernelSpec.cmf_kernel(laplace(1.0), 0.0, 1)

    def test_bad_dimension_rejected(self):
        with pytest.raises(ParameterError):
            KernelSpec.cmf_kernel(laplace(1.0), 1.0, 0)

    def test_gaussian_control_is_1d(self):
        g = KernelSpec.gaussian_control()
        assert g.dimension == 1
        assert not g.is_cmf

    def test_radius_for_tail_roundtrip(self):
        for k in (
            KernelSpec.cmf_kernel(laplace(2.0), 0.5, 1),
            KernelSpec.cmf_kernel(inverse_linear(1.0), 1.0, 2),
            KernelSpec.gaussian_control(),
        ):
            for eps in (0.3, 1e-6):
                R = k.radius_for_tail(eps)
                assert k.tail_bound(R) == pytest.approx(eps, rel=1e-9)

    def test_bad_tail_eps_rejected(self):
        k = KernelSpec.cmf_kernel(laplace(1.0), 1.0, 1)
        with pytest.raises(ParameterError):
            k.radius_for_tail(0.0)
        with pytest.raises(ParameterError):
            k.radius_for_tail(1.0)


class TestKernelEval:
    def test_unit_diagonal_exact(self):
        k = KernelSpec.cmf_kernel(laplace(3.0), 0.5, 2)
        assert kernel_eval(k, (0.3, -0.7), (0.3, -0.7)) == 1.0

    def test_laplace_value(self):
        k = KernelSpec.cmf_kernel(laplace(1.0), 1.0, 2)
        assert kernel_eval(k, (0.0, 0.0), (1.0, 1.0)) == pytest.approx(math.exp(-2.0), rel=1e-15)

    def test_gaussian_value(self):
        g = KernelSpec.gaussian_control()
        assert kernel_eval(g, 0.0, 1.0) == pytest.approx(math.exp(-0.25), rel=1e-15)

    def test_dimension_mismatch_rejected(self):
        k = KernelSpec.cmf_kernel(laplace(1.0), 1.0, 2)
        with pytest.raises(ParameterError):
            kernel_eval(k, (0.0,), (1.0, 1.0))

    @given(
        st.floats(-5, 5), st.floats(-5, 5),
        st.sampled_from([0.5, 1.0]),
    )
    def test_symmetric_and_bounded(self, a, b, p):
        k = KernelSpec.cmf_kernel(laplace(1.0), p, 1)
        v = kernel_eval(k, a, b)
        assert v == kernel_eval(k, b, a)
        assert 0.0 < v <= 1.0


class TestAdmissibility:
    @pytest.mark.parametrize("kernel", [
        KernelSpec.cmf_kernel(laplace(1.0), 1.0, 1),
        KernelSpec.cmf_kernel(laplace(0.5), 0.5, 3),
        KernelSpec.cmf_kernel(inverse_linear(2.0), 1.0, 2),
        KernelSpec.gaussian_control(),
    ])
    def test_axioms_hold_on_samples(self, kernel):
        report = check_admissible(kernel, n_samples=200, seed=3)
        assert report.passed, report.violations

    def test_sample_count_validated(self):
        with pytest.raises(ParameterError):
            check_admissible(KernelSpec.gaussian_control(), 0)
