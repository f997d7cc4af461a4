import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contomp import (
    CartesianGrid,
    KernelSpec,
    NotApplicableError,
    ParameterError,
    SparseSignal,
    Support,
    VerdictKind,
    adversarial_input,
    axis_admissibility_falsifier,
    axis_simplex_support,
    balanced_grid_section,
    balanced_grid_weights,
    chain_bound_violation,
    classify,
    coherence_certificate,
    inverse_linear,
    laplace,
    restricted_erc,
    run_omp,
    same_point,
    separation_certificate,
    separation_threshold,
    symmetric_cluster_crossover,
    symmetric_cluster_margin,
)


def lap(lam=1.0, p=1.0, D=1):
    return KernelSpec.cmf_kernel(laplace(lam), p, D)


def inv(lam=1.0, p=1.0, D=1):
    return KernelSpec.cmf_kernel(inverse_linear(lam), p, D)


class TestRestrictedErc:
    def test_single_atom_vacuous(self):
        rep = restricted_erc(lap(), Support.from_points([(0.0,)]))
        assert rep.holds
        assert rep.statistic == 0.0

    def test_collinear_support_vacuous(self):
        s = Support.from_points([(0.0, 1.0), (2.0, 1.0)])
        rep = restricted_erc(lap(D=2), s)
        assert rep.statistic == 0.0

    def test_diagonal_pair_oracle(self):
        # Probes (0,2) and (2,0) both give 2 e^{-2} / (1 + e^{-4}).
        s = Support.from_points([(0.0, 0.0), (2.0, 2.0)])
        rep = restricted_erc(lap(D=2), s)
        expected = 2 * math.exp(-2.0) / (1.0 + math.exp(-4.0))
        assert rep.statistic == pytest.approx(expected, abs=1e-14)
        assert rep.holds

    def test_translation_invariance(self):
        a = Support.from_points([(0.0, 0.0), (1.0, 0.5)])
        b = Support.from_points([(10.0, -3.0), (11.0, -2.5)])
        ra, rb = restricted_erc(lap(D=2), a), restricted_erc(lap(D=2), b)
        assert ra.statistic == pytest.approx(rb.statistic, abs=1e-12)

    def test_coordinate_permutation_invariance(self):
        a = Support.from_points([(0.0, 1.0), (2.0, 3.0)])
        b = Support.from_points([(1.0, 0.0), (3.0, 2.0)])
        ra, rb = restricted_erc(lap(D=2), a), restricted_erc(lap(D=2), b)
        assert ra.statistic == pytest.approx(rb.statistic, abs=1e-12)


class TestCoherence:
    def test_far_separated_pass(self):
        s = Support.from_points([(0.0,), (100.0,)])
        rep = coherence_certificate(lap(), s)
        assert rep.holds
        assert rep.witness[0] == pytest.approx(math.exp(-100.0), abs=1e-40)

    def test_boundary_at_threshold(self):
        # Gap exactly log 3 for k=2: mu = 1/3, bound = 2, strict inequality fails.
        s = Support.from_points([(0.0,), (math.log(3.0),)])
        rep = coherence_certificate(lap(), s)
        assert rep.witness[0] == pytest.approx(1.0 / 3.0, abs=1e-14)
        assert rep.threshold == pytest.approx(2.0, abs=1e-12)
        assert not rep.holds

    def test_single_atom_vacuous(self):
        rep = coherence_certificate(lap(), Support.from_points([(0.0,)]))
        assert rep.holds


class TestSeparation:
    def test_threshold_formula(self):
        assert separation_threshold(2, 1.0) == pytest.approx(math.log(3.0), rel=1e-15)
        assert separation_threshold(3, 2.0) == pytest.approx(math.log(5.0) / 2.0, rel=1e-15)

    def test_pass_and_fail(self):
        ok = separation_certificate(lap(), Support.from_points([(0.0,), (1.2,)]))
        assert ok.holds
        bad = separation_certificate(lap(), Support.from_points([(0.0,), (1.0,)]))
        assert not bad.holds

    def test_non_exponential_family_rejected(self):
        with pytest.raises(NotApplicableError):
            separation_certificate(inv(), Support.from_points([(0.0,), (5.0,)]))

    def test_single_atom_vacuous(self):
        rep = separation_certificate(lap(), Support.from_points([(0.0,)]))
        assert rep.holds


class TestAdversarialInput:
    @staticmethod
    def violating_case():
        kernel = lap(D=2)
        rng = np.random.default_rng(0)
        while True:
            pts = rng.uniform(-2, 2, (4, 2))
            try:
                s = Support.from_points(pts)
                rep = restricted_erc(kernel, s)
            except Exception:
                continue
            if rep.statistic >= 1.0:
                return kernel, s, rep

    def test_witness_identities(self):
        kernel, s, rep = self.violating_case()
        w = adversarial_input(kernel, s, rep.witness)
        assert all(abs(abs(x) - 1.0) <= 1e-9 for x in w.inner_correlations)
        assert w.outer_correlation == pytest.approx(w.erc_value, abs=1e-9)
        assert w.outer_correlation >= 1.0 - 1e-10

    def test_first_selection_not_strictly_inside(self):
        kernel, s, rep = self.violating_case()
        w = adversarial_input(kernel, s, rep.witness)
        sig = SparseSignal.from_points(s.points, w.coefficients)
        tr = run_omp(sig, kernel)
        first = tr.iterations[0]
        strictly_inside = any(
            same_point(first.selected, p, tol=1e-6) for p in s.points
        ) and all(
            any(same_point(t, p, tol=1e-6) for p in s.points) for t in first.tie_set
        )
        assert not strictly_inside

    def test_precondition_enforced(self):
        s = Support.from_points([(0.0,), (5.0,)])
        with pytest.raises(ParameterError):
            adversarial_input(lap(), s, (2.5,))


class TestChainInequality:
    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.floats(-5, 5), min_size=6, max_size=6),
        st.sampled_from([0.5, 1.0]),
        st.sampled_from(["laplace", "inverse_linear"]),
    )
    def test_product_bounded_by_direct_kernel(self, coords, p, family):
        cmf = laplace(1.3) if family == "laplace" else inverse_linear(0.7)
        k = KernelSpec.cmf_kernel(cmf, p, 2)
        a, b, c = coords[0:2], coords[2:4], coords[4:6]
        assert chain_bound_violation(k, a, b, c) <= 1e-12


class TestClusterMargin:
    def test_zero_at_origin(self):
        for cmf in (laplace(1.0), inverse_linear(1.0)):
            assert symmetric_cluster_margin(cmf, 4, 0.0) == 0.0

    def test_laplace_crossover_closed_form(self):
        for k in (3, 4, 6):
            root = symmetric_cluster_crossover(laplace(1.0), k)
            assert root == pytest.approx(math.log(k - 1.0), abs=1e-10)

    def test_inverse_linear_crossover_is_half(self):
        # Closed form for lam=1, k=3: margin reduces to x(2x-1) / ((1+x)(1+2x)).
        root = symmetric_cluster_crossover(inverse_linear(1.0), 3)
        assert root == pytest.approx(0.5, abs=1e-12)

    def test_sign_pattern_around_crossover(self):
        for cmf in (laplace(2.0), inverse_linear(0.5)):
            root = symmetric_cluster_crossover(cmf, 3)
            assert symmetric_cluster_margin(cmf, 3, 0.9 * root) < 0
            assert symmetric_cluster_margin(cmf, 3, 1.1 * root) > 0

    def test_small_k_rejected(self):
        with pytest.raises(ParameterError):
            symmetric_cluster_margin(laplace(1.0), 2, 1.0)


class TestSimplexSupport:
    def test_geometry(self):
        s = axis_simplex_support(3, 3, 1.0)
        arr = s.array()
        for i in range(3):
            assert np.sum(np.abs(arr[i])) == pytest.approx(1.0)
            for j in range(i + 1, 3):
                assert np.sum(np.abs(arr[i] - arr[j])) == pytest.approx(2.0)

    def test_k_bounds_enforced(self):
        with pytest.raises(ParameterError):
            axis_simplex_support(4, 3, 1.0)
        with pytest.raises(ParameterError):
            axis_simplex_support(2, 3, 1.0)


class TestBalancedGrid:
    def test_weight_magnitude_oracle(self):
        assert balanced_grid_weights(inverse_linear(1.0), 1.0, 1.0) == pytest.approx(1.8, abs=1e-14)

    def test_section_vanishes_at_grid_abscissae(self):
        f0, fd, fm = balanced_grid_section(inverse_linear(1.0), 1.0, 1.0)
        assert abs(f0) <= 1e-12
        assert abs(fd) <= 1e-12
        assert abs(fm) == pytest.approx(0.10666666666666667, abs=1e-12)

    def test_laplace_midpoint_vanishes(self):
        for delta in (0.3, 1.0, 2.7):
            f0, fd, fm = balanced_grid_section(laplace(1.0), delta, 1.0)
            assert abs(f0) <= 1e-12 and abs(fd) <= 1e-12 and abs(fm) <= 1e-12


class TestFalsifier:
    def test_inverse_linear_violated(self):
        grid = CartesianGrid.from_axes([[0.0, 1.0], [0.0, 1.0]])
        rep = axis_admissibility_falsifier(inv(D=2), grid, trials=0, seed=0)
        assert rep.falsified
        w = rep.witness
        assert all(abs(w.location - x) > 1e-6 for x in (0.0, 1.0))
        assert w.value > w.best_axis_value

    def test_laplace_not_falsified(self):
        grid = CartesianGrid.from_axes([[0.0, 1.0], [0.0, 1.0]])
        rep = axis_admissibility_falsifier(lap(D=2), grid, trials=50, seed=1)
        assert not rep.falsified

    def test_degenerate_single_point_grid(self):
        grid = CartesianGrid.from_axes([[0.0], [0.0]])
        rep = axis_admissibility_falsifier(lap(D=2), grid, trials=20, seed=2)
        assert not rep.falsified

    def test_gaussian_rejected(self):
        grid = CartesianGrid.from_axes([[0.0, 1.0]])
        with pytest.raises(NotApplicableError):
            axis_admissibility_falsifier(KernelSpec.gaussian_control(), grid, trials=1)


class TestTwoAtomRecoveryUnderErc:
    def test_random_pairs(self):
        # k=2 supports whose restricted ERC holds recover exactly.
        rng = np.random.default_rng(9)
        kernel = lap(D=2)
        for _ in range(10):
            pts = rng.uniform(-2, 2, (2, 2))
            if np.max(np.abs(pts[0] - pts[1])) < 0.1:
                continue
            s = Support.from_points(pts)
            if not restricted_erc(kernel, s).holds:
                continue
            c = rng.uniform(0.1, 5.0, 2) * rng.choice([-1.0, 1.0], 2)
            tr = run_omp(SparseSignal.from_points(s.points, c), kernel)
            assert classify(tr).kind is VerdictKind.EXACT_K_STEP
