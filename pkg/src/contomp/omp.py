"""Matching pursuit over a continuous kernel dictionary.

The observation is never discretized: it is the abstract superposition
y = sum_j c_j * atom(s_j), and every quantity the algorithm needs (residual
correlations, residual norms, least-squares updates) is expressed through
kernel evaluations against the finitely many anchor points touched so far.

Each iteration selects a global maximizer of the absolute residual
correlation, refits all selected atoms by least squares, and stops when the
relative residual norm falls below a threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSupportError, NotApplicableError, NumericalError, ParameterError
from .gram import GramMatrix, build_gram, correlation_vector
from .kernels import KernelSpec, kernel_eval
from .optimizer import CorrelationFunction, OptimizerConfig, global_argmax
from .param_space import Support, as_point, same_point, set_aug

# Default relative residual threshold for convergence.
EPS_STOP = 1e-10

# Selections within this distance of a target count as hitting it.
TAU_MATCH = 1e-6


@dataclass(frozen=True)
class SparseSignal:
    """A finite signed superposition of atoms; ``support`` is None when k = 0."""

    support: Support | None
    coefficients: tuple[float, ...]

    @classmethod
    def from_points(cls, points, coefficients) -> "SparseSignal":
        support = Support.from_points(points)
        coefs = tuple(float(c) for c in coefficients)
        if len(coefs) != len(support):
            raise ParameterError("one coefficient per support point required")
        if not all(math.isfinite(c) and c != 0.0 for c in coefs):
            raise ParameterError("coefficients must be finite and nonzero")
        return cls(support=support, coefficients=coefs)

    @classmethod
    def empty(cls) -> "SparseSignal":
        return cls(support=None, coefficients=())

    @property
    def k(self) -> int:
        return 0 if self.support is None else len(self.support)

    def norm(self, kernel: KernelSpec) -> float:
        """Hilbert norm of the superposition."""
        if self.k == 0:
            return 0.0
        c = np.asarray(self.coefficients)
        return math.sqrt(max(0.0, float(c @ build_gram(kernel, self.support) @ c)))


@dataclass(frozen=True)
class OMPIteration:
    selected: tuple[float, ...]
    tie_set: tuple[tuple[float, ...], ...]
    correlation: float
    ls_coefficients: tuple[float, ...]
    residual_norm: float


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    BUDGET = "budget"
    DEGENERATE = "degenerate"


class VerdictKind(str, enum.Enum):
    EXACT_K_STEP = "ExactKStep"
    DELAYED_WITHIN_GRID = "DelayedWithinGrid"
    SPURIOUS_SELECTION = "SpuriousSelection"
    BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass(frozen=True)
class Verdict:
    """Classification of a finished trace.

    ``matched`` pairs each true support point with the selection that hit it
    (or None when it was missed).
    """

    kind: VerdictKind
    matched: tuple[tuple[tuple[float, ...], tuple[float, ...] | None], ...]
    details: str = ""


@dataclass(frozen=True)
class OMPTrace:
    signal: SparseSignal
    kernel: KernelSpec = field(repr=False)
    iterations: tuple[OMPIteration, ...]
    terminated: Termination
    signal_norm: float

    @property
    def selected_points(self) -> tuple[tuple[float, ...], ...]:
        return tuple(it.selected for it in self.iterations)

    @property
    def residual_norm(self) -> float:
        if not self.iterations:
            return self.signal_norm
        return self.iterations[-1].residual_norm


def _merged_residual(
    signal: SparseSignal, selected: list[tuple[float, ...]], coefs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Residual as signed weights on the union of true and selected anchors.

    Selected points coinciding with a true point reuse its exact coordinates
    so the merged anchor set stays pairwise distinct.
    """
    anchors = [tuple(p) for p in (signal.support.points if signal.support else ())]
    weights = list(signal.coefficients)
    for s, b in zip(selected, coefs):
        for i, a in enumerate(anchors):
            if same_point(s, a):
                weights[i] -= b
                break
        else:
            anchors.append(tuple(s))
            weights.append(-b)
    return np.asarray(weights, dtype=float), np.asarray(anchors, dtype=float)


def _quad_form(kernel: KernelSpec, weights: np.ndarray, anchors: np.ndarray) -> float:
    """w^T G w over possibly near-coincident anchors, with round-off clamping."""
    m = len(anchors)
    G = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            G[i, j] = G[j, i] = kernel_eval(kernel, anchors[i], anchors[j])
    val = float(weights @ G @ weights)
    if val < 0:
        if val < -1e-12 * float(np.abs(weights).sum()) ** 2:
            raise NumericalError(f"negative squared residual {val:.3e}")
        val = 0.0
    return val


def default_max_iter(signal: SparseSignal) -> int:
    """Budget covering delayed recovery over the augmented grid."""
    if signal.k == 0:
        return 0
    return signal.k ** signal.support.dimension + signal.k


def run_omp(
    signal: SparseSignal,
    kernel: KernelSpec,
    max_iter: int | None = None,
    eps_stop: float = EPS_STOP,
    optimizer_config: OptimizerConfig | None = None,
) -> OMPTrace:
    """Run matching pursuit on the superposition until convergence or budget."""
    if signal.k > 0 and signal.support.dimension != kernel.dimension:
        raise ParameterError("signal and kernel dimensions differ")
    if max_iter is None:
        max_iter = default_max_iter(signal)
    ynorm = signal.norm(kernel)
    iterations: list[OMPIteration] = []
    selected: list[tuple[float, ...]] = []
    coefs = np.zeros(0)
    terminated = Termination.BUDGET
    c_true = np.asarray(signal.coefficients)

    while True:
        weights, anchors = _merged_residual(signal, selected, coefs)
        if len(anchors) == 0:
            terminated = Termination.CONVERGED
            break
        resid = math.sqrt(_quad_form(kernel, weights, anchors))
        if resid <= eps_stop * max(ynorm, 1e-300):
            terminated = Termination.CONVERGED
            break
        if len(iterations) >= max_iter:
            terminated = Termination.BUDGET
            break

        f = CorrelationFunction(weights, anchors, kernel)
        res = global_argmax(f, optimizer_config)
        pick = res.canonical

        try:
            sel_support = Support.from_points(selected + [pick])
            gm = GramMatrix.build(kernel, sel_support)
            cross = np.array(
                [correlation_vector(kernel, signal.support, s) for s in sel_support.points]
            )
            coefs = gm.solve(cross @ c_true)
        except (ParameterError, DegenerateSupportError):
            terminated = Termination.DEGENERATE
            break
        selected.append(as_point(pick))

        w_after, a_after = _merged_residual(signal, selected, coefs)
        resid_after = math.sqrt(_quad_form(kernel, w_after, a_after))
        iterations.append(
            OMPIteration(
                selected=as_point(pick),
                tie_set=res.maximizers,
                correlation=res.value,
                ls_coefficients=tuple(float(b) for b in coefs),
                residual_norm=resid_after,
            )
        )

    return OMPTrace(
        signal=signal,
        kernel=kernel,
        iterations=tuple(iterations),
        terminated=terminated,
        signal_norm=ynorm,
    )


def _match_map(
    true_pts, picks, tol: float
) -> tuple[tuple[tuple[float, ...], tuple[float, ...] | None], ...]:
    return tuple(
        (t, next((s for s in picks if same_point(t, s, tol=tol)), None)) for t in true_pts
    )


def iteration_residual_weights(trace: OMPTrace, t: int) -> tuple[np.ndarray, np.ndarray]:
    """(weights, anchors) of the residual after the least-squares update of iteration t."""
    it = trace.iterations[t]
    selected = [as_point(p) for p in trace.selected_points[: t + 1]]
    return _merged_residual(trace.signal, selected, np.asarray(it.ls_coefficients))


def classify(trace: OMPTrace, tol_match: float = TAU_MATCH) -> Verdict:
    """Judge a finished trace against the true support."""
    signal = trace.signal
    picks = trace.selected_points
    if signal.k == 0:
        kind = (
            VerdictKind.EXACT_K_STEP
            if trace.terminated is Termination.CONVERGED
            else VerdictKind.BUDGET_EXHAUSTED
        )
        return Verdict(kind=kind, matched=(), details="empty signal")
    true_pts = signal.support.points
    matched = _match_map(true_pts, picks, tol_match)

    if trace.terminated is Termination.DEGENERATE:
        return Verdict(VerdictKind.SPURIOUS_SELECTION, matched, "degenerate least squares")

    grid_pts = set_aug(signal.support).points
    within_grid = all(any(same_point(s, g, tol=tol_match) for g in grid_pts) for s in picks)
    if not within_grid:
        return Verdict(VerdictKind.SPURIOUS_SELECTION, matched, "selection outside the grid closure")
    if trace.terminated is Termination.BUDGET:
        return Verdict(VerdictKind.BUDGET_EXHAUSTED, matched, "iteration budget exhausted")

    covered = all(s is not None for _, s in matched)
    # Exact: a bijection between selections and true points in exactly k steps.
    if covered and len(picks) == signal.k:
        unmatched = list(true_pts)
        ok = True
        for s in picks:
            for i, t in enumerate(unmatched):
                if same_point(s, t, tol=tol_match):
                    unmatched.pop(i)
                    break
            else:
                ok = False
                break
        if ok and not unmatched:
            return Verdict(VerdictKind.EXACT_K_STEP, matched, "")
    if covered:
        return Verdict(VerdictKind.DELAYED_WITHIN_GRID, matched, "")
    return Verdict(VerdictKind.SPURIOUS_SELECTION, matched, "true support not covered")


@dataclass(frozen=True)
class ReconstructionEntry:
    selected: tuple[float, ...]
    coefficient: float
    matched_true: tuple[float, ...] | None
    true_coefficient: float | None


@dataclass(frozen=True)
class ReconstructionReport:
    """Final coefficients checked against the generating signal.

    ``ok`` requires every matched coefficient to reproduce its true value
    within ``coefficient_tol`` and every unmatched selection to carry a
    coefficient of at most that magnitude.
    """

    entries: tuple[ReconstructionEntry, ...]
    ok: bool
    coefficient_tol: float


def recovered_signal(
    trace: OMPTrace, tol_match: float = TAU_MATCH, coefficient_tol: float = 1e-8
) -> ReconstructionReport:
    """Match final least-squares coefficients against the true signal.

    Only defined for converged traces; the coefficients then reproduce the
    observation exactly up to the stopping tolerance.
    """
    if trace.terminated is not Termination.CONVERGED:
        raise NotApplicableError("trace did not converge; residual is nonzero")
    if not trace.iterations:
        return ReconstructionReport(entries=(), ok=True, coefficient_tol=coefficient_tol)
    last = trace.iterations[-1]
    true_pts = trace.signal.support.points if trace.signal.support else ()
    entries = []
    ok = True
    for s, b in zip(trace.selected_points, last.ls_coefficients):
        match = next(
            (i for i, t in enumerate(true_pts) if same_point(s, t, tol=tol_match)), None
        )
        if match is None:
            entries.append(ReconstructionEntry(s, b, None, None))
            ok = ok and abs(b) <= coefficient_tol
        else:
            c = trace.signal.coefficients[match]
            entries.append(ReconstructionEntry(s, b, true_pts[match], c))
            ok = ok and abs(b - c) <= coefficient_tol
    return ReconstructionReport(entries=tuple(entries), ok=ok, coefficient_tol=coefficient_tol)
