"""Recovery certificates and counterexample constructions.

Certificates are sufficient conditions for step-wise exact recovery, each
reported with its measured statistic, the threshold it is compared against,
and a strict margin classification.  The module also builds the matching
negative objects: adversarial superpositions whose first selection provably
leaves the support, and a randomized falsifier probing whether section
maxima of weighted kernel sums can escape the anchor coordinate set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import NotApplicableError, ParameterError
from .gram import GramMatrix, correlation_vector
from .kernels import CMFSpec, KernelSpec, cmf_eval, kernel_eval
from .optimizer import CorrelationFunction, OptimizerConfig, argmax_1d_section
from .param_space import CartesianGrid, Support, min_axis_separation, same_point, set_aug

# Margins within this band of a threshold are classified "boundary".
STRICT_MARGIN = 1e-10

# A section maximizer farther than this from every anchor coordinate counts
# as a genuine interior point.
INTERIOR_TOL = 1e-6

HOLDS = "holds"
FAILS = "fails"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one sufficient condition check."""

    name: str
    status: str
    statistic: float
    threshold: float
    margin: float
    witness: tuple | None = None

    @property
    def holds(self) -> bool:
        return self.status == HOLDS


def _status(margin: float) -> str:
    if margin > STRICT_MARGIN:
        return HOLDS
    if margin < -STRICT_MARGIN:
        return FAILS
    return BOUNDARY


def restricted_erc(kernel: KernelSpec, support: Support) -> CertificateReport:
    """Exact-recovery condition restricted to the augmented grid.

    The statistic is the largest l1 norm of G^{-1} g_theta over probe points
    theta in the support's Cartesian closure that are not support points.
    The certificate holds when it stays strictly below 1.
    """
    gm = GramMatrix.build(kernel, support)
    probes = [
        g
        for g in set_aug(support).points
        if not any(same_point(g, s) for s in support.points)
    ]
    if not probes:
        return CertificateReport(
            name="restricted_erc", status=HOLDS, statistic=0.0, threshold=1.0, margin=1.0
        )
    best_ratio, best_probe = -1.0, None
    for theta in probes:
        ratio = gm.erc_ratio(correlation_vector(kernel, support, theta))
        if ratio > best_ratio:
            best_ratio, best_probe = ratio, theta
    margin = 1.0 - best_ratio
    return CertificateReport(
        name="restricted_erc",
        status=_status(margin),
        statistic=best_ratio,
        threshold=1.0,
        margin=margin,
        witness=best_probe,
    )


def coherence_certificate(kernel: KernelSpec, support: Support) -> CertificateReport:
    """Coherence-based sufficient condition on the augmented grid.

    With mu the largest kernel value over distinct pairs of the support's
    Cartesian closure, the condition is k < (1 + 1/mu) / 2.
    """
    pts = set_aug(support).points
    if len(pts) < 2:
        return CertificateReport(
            name="coherence", status=HOLDS, statistic=float(len(support)),
            threshold=math.inf, margin=math.inf,
        )
    mu, pair = -1.0, None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            v = kernel_eval(kernel, pts[i], pts[j])
            if v > mu:
                mu, pair = v, (pts[i], pts[j])
    k = len(support)
    threshold = 0.5 * (1.0 + 1.0 / mu)
    margin = threshold - k
    return CertificateReport(
        name="coherence",
        status=_status(margin),
        statistic=float(k),
        threshold=threshold,
        margin=margin,
        witness=(mu,) + pair,
    )


def separation_threshold(k: int, lam: float) -> float:
    """Smallest admissible value of (axis separation)^p for exponential decay."""
    if k < 1 or lam <= 0:
        raise ParameterError("need k >= 1 and lam > 0")
    return math.log(2 * k - 1) / lam


def separation_certificate(kernel: KernelSpec, support: Support) -> CertificateReport:
    """Axis-separation sufficient condition for exponentially decaying kernels.

    Requires (minimum nonzero per-axis gap)^p >= log(2k - 1) / lam.  Only
    defined for the exponential CMF family.
    """
    if kernel.cmf is None or kernel.cmf.name != "laplace":
        raise NotApplicableError("separation certificate requires the exponential family")
    k = len(support)
    if k == 1:
        return CertificateReport(
            name="separation", status=HOLDS, statistic=math.inf, threshold=0.0, margin=math.inf
        )
    gap = min_axis_separation(support)
    if gap is None:
        raise ParameterError("support has no nonzero axis gap")
    statistic = gap ** kernel.p
    threshold = separation_threshold(k, kernel.lam)
    margin = statistic - threshold
    return CertificateReport(
        name="separation",
        status=_status(margin),
        statistic=statistic,
        threshold=threshold,
        margin=margin,
        witness=(gap,),
    )


@dataclass(frozen=True)
class AdversarialWitness:
    """Coefficients whose first selection provably leaves the support.

    ``inner_correlations`` are the correlation values at the support points
    (all of magnitude 1 by construction) and ``outer_correlation`` is the
    value at the probe, equal to the exact-recovery ratio there.
    """

    probe: tuple[float, ...]
    coefficients: tuple[float, ...]
    inner_correlations: tuple[float, ...]
    outer_correlation: float
    erc_value: float


def adversarial_input(kernel: KernelSpec, support: Support, probe) -> AdversarialWitness:
    """Build coefficients making the probe beat every support atom.

    With z = G^{-1} g_probe, the coefficients c = G^{-1} sign(z) give
    correlations of magnitude exactly 1 at the support points and ||z||_1 at
    the probe.  Requires the exact-recovery ratio at the probe to be >= 1,
    otherwise no such amplification exists and a ParameterError is raised.
    """
    gm = GramMatrix.build(kernel, support)
    g = correlation_vector(kernel, support, probe)
    z = gm.solve(g)
    ratio = float(np.abs(z).sum())
    if ratio < 1.0 - STRICT_MARGIN:
        raise ParameterError(
            f"exact-recovery ratio {ratio:.6f} < 1 at the probe; no adversarial amplification"
        )
    s = np.sign(z)
    s[s == 0.0] = 1.0
    c = gm.solve(s)
    inner = gm.matrix @ c
    outer = float(g @ c)
    return AdversarialWitness(
        probe=tuple(float(x) for x in np.atleast_1d(np.asarray(probe, dtype=float))),
        coefficients=tuple(float(x) for x in c),
        inner_correlations=tuple(float(x) for x in inner),
        outer_correlation=outer,
        erc_value=ratio,
    )


def chain_bound_violation(kernel: KernelSpec, a, b, c) -> float:
    """kappa(a,b) * kappa(b,c) - kappa(a,c); nonpositive for CMF kernels."""
    return kernel_eval(kernel, a, b) * kernel_eval(kernel, b, c) - kernel_eval(kernel, a, c)


def symmetric_cluster_margin(cmf: CMFSpec, k: int, x: float) -> float:
    """(k-1) phi(2x) - k phi(x) + 1 for a k-atom equispaced cluster.

    ``x`` is the CMF argument of the common distance to the cluster center.
    A negative value means the center out-correlates every cluster atom, so
    the first selection leaves the support.
    """
    if k < 3:
        raise ParameterError("cluster margin needs k >= 3")
    if x < 0:
        raise ParameterError("x must be nonnegative")
    return (k - 1) * cmf_eval(cmf, 2 * x) - k * cmf_eval(cmf, x) + 1.0


def symmetric_cluster_crossover(cmf: CMFSpec, k: int, hi: float = 1e3) -> float:
    """Positive root of the cluster margin, bracketing on (0, hi]."""
    if k < 3:
        raise ParameterError("the margin has no positive root for k < 3")
    f = lambda x: symmetric_cluster_margin(cmf, k, x)
    lo = 1e-12
    if f(lo) >= 0 or f(hi) <= 0:
        raise ParameterError("margin does not change sign on the bracket")
    return float(scipy.optimize.brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16))


def balanced_grid_weights(cmf: CMFSpec, delta: float, p: float) -> float:
    """Weight magnitude s that zeroes the section below at both grid abscissae."""
    q1 = cmf_eval(cmf, delta ** p)
    q2 = cmf_eval(cmf, 2 * delta ** p)
    return (1.0 + q1) / (q1 + q2)


def balanced_grid_section(cmf: CMFSpec, delta: float, p: float) -> tuple[float, float, float]:
    """Section values (at 0, delta, delta/2) for the balanced 2 x 2 grid.

    Anchors sit at the corners of the axis-aligned square of side ``delta``
    with weights (+1, +1, -s, -s); the section runs along the first axis at
    offset 0.  By construction the section vanishes at both grid abscissae;
    a nonzero midpoint value exhibits an interior section maximizer.
    """
    s = balanced_grid_weights(cmf, delta, p)
    dp = delta ** p
    hp = (delta / 2.0) ** p

    def section(t_terms: tuple[float, ...]) -> float:
        x1, x2, x3, x4 = t_terms
        return (
            cmf_eval(cmf, x1) + cmf_eval(cmf, x2)
            - s * cmf_eval(cmf, x3) - s * cmf_eval(cmf, x4)
        )

    f0 = section((0.0, dp, dp, 2 * dp))
    fd = section((dp, 0.0, 2 * dp, dp))
    fm = section((hp, hp, hp + dp, hp + dp))
    return f0, fd, fm


def balanced_grid_signal(cmf: CMFSpec, delta: float, p: float) -> tuple[np.ndarray, np.ndarray]:
    """(weights, anchors) of the balanced 2 x 2 grid in the plane."""
    s = balanced_grid_weights(cmf, delta, p)
    anchors = np.array([[0.0, 0.0], [delta, 0.0], [0.0, delta], [delta, delta]])
    weights = np.array([1.0, 1.0, -s, -s])
    return weights, anchors


def axis_simplex_support(k: int, dimension: int, delta: float) -> Support:
    """Support {delta * e_1, ..., delta * e_k} in R^dimension.

    Every point sits at the same distance from the origin and pairwise
    distances are all equal, the configuration the cluster margin analyzes.
    """
    if not 3 <= k <= dimension:
        raise ParameterError("need 3 <= k <= dimension")
    if delta <= 0:
        raise ParameterError("delta must be positive")
    pts = []
    for i in range(k):
        p = [0.0] * dimension
        p[i] = delta
        pts.append(tuple(p))
    return Support.from_points(pts)


@dataclass(frozen=True)
class FalsifierWitness:
    weights: tuple[float, ...]
    anchors: tuple[tuple[float, ...], ...]
    axis: int
    base: tuple[float, ...]
    location: float
    value: float
    best_axis_value: float


@dataclass(frozen=True)
class FalsifierReport:
    """One-sided outcome: falsified with a witness, or nothing found."""

    falsified: bool
    trials: int
    witness: FalsifierWitness | None


def _section_violation(
    kernel: KernelSpec,
    weights: np.ndarray,
    anchors: np.ndarray,
    axis: int,
    base: np.ndarray,
    cfg: OptimizerConfig,
) -> FalsifierWitness | None:
    if not np.any(weights):
        return None
    f = CorrelationFunction(weights, anchors, kernel)
    res = argmax_1d_section(f, base, axis, cfg)
    if res.identically_zero:
        return None
    coords = sorted(set(float(a) for a in anchors[:, axis]))
    pts = np.tile(base, (len(coords), 1))
    pts[:, axis] = coords
    best_axis = float(f.batch(pts).max())
    for t in res.maximizers:
        if res.value > best_axis + STRICT_MARGIN and all(
            abs(t - a) > INTERIOR_TOL for a in coords
        ):
            return FalsifierWitness(
                weights=tuple(float(w) for w in weights),
                anchors=tuple(tuple(float(x) for x in a) for a in anchors),
                axis=axis,
                base=tuple(float(x) for x in base),
                location=float(t),
                value=res.value,
                best_axis_value=best_axis,
            )
    return None


def _balanced_rectangle_weight(cmf: CMFSpec, dx: float, dy: float, p: float) -> float:
    """Magnitude s zeroing the rectangle section at both abscissae."""
    return (1.0 + cmf_eval(cmf, dx ** p)) / (
        cmf_eval(cmf, dy ** p) + cmf_eval(cmf, dx ** p + dy ** p)
    )


def _balanced_trials(kernel: KernelSpec, grid: CartesianGrid):
    """Deterministic weight patterns on 2 x 2 sub-rectangles of the grid.

    Each pattern zeroes its section at both abscissae, so any interior bump
    stands out against a flat baseline.  Yields (weights, axis, base).
    """
    pts = grid.points
    D = grid.dimension
    count = 0
    for d in range(D):
        for e in range(D):
            if e == d:
                continue
            xs, ys = grid.axes[d], grid.axes[e]
            for i in range(len(xs) - 1):
                for j in range(len(ys) - 1):
                    if count >= 50:
                        return
                    x1, x2 = xs[i], xs[i + 1]
                    y1, y2 = ys[j], ys[j + 1]
                    s = _balanced_rectangle_weight(kernel.cmf, x2 - x1, y2 - y1, kernel.p)
                    # Pin the remaining axes to their first coordinate.
                    pin = [grid.axes[a][0] for a in range(D)]
                    weights = np.zeros(len(pts))
                    for idx, q in enumerate(pts):
                        if all(a in (d, e) or abs(q[a] - pin[a]) <= 1e-12 for a in range(D)):
                            if q[d] in (x1, x2):
                                if q[e] == y1:
                                    weights[idx] = 1.0
                                elif q[e] == y2:
                                    weights[idx] = -s
                    base = np.array(pin, dtype=float)
                    base[d] = 0.0
                    base[e] = y1
                    count += 1
                    yield weights, d, base


def axis_admissibility_falsifier(
    kernel: KernelSpec,
    grid: CartesianGrid,
    trials: int = 500,
    seed: int = 0,
    optimizer_config: OptimizerConfig | None = None,
) -> FalsifierReport:
    """Search for a section maximizer escaping the grid's axis values.

    Runs random axis-parallel sections of random signed configurations on
    the grid (random direction, random offset in the inflated bounding box,
    plus the all-zeros offset), and deterministic balanced 2 x 2 patterns
    whose sections vanish at the grid abscissae.  One-sided: a witness
    refutes axis admissibility, absence of one does not prove it.
    Identically-zero sections are skipped.
    """
    if kernel.cmf is None:
        raise NotApplicableError("falsifier applies to CMF kernels")
    if grid.dimension != kernel.dimension:
        raise ParameterError("grid and kernel dimensions differ")
    cfg = optimizer_config or OptimizerConfig()
    rng = np.random.default_rng(seed)
    anchors = grid.array()
    D = grid.dimension
    lo, hi = anchors.min(axis=0), anchors.max(axis=0)
    gap = np.array([
        (hi[d] - lo[d]) / max(1, len(grid.axes[d]) - 1) for d in range(D)
    ])
    n_done = 0

    if D >= 2:
        for weights, axis, base in _balanced_trials(kernel, grid):
            n_done += 1
            w = _section_violation(kernel, weights, anchors, axis, base, cfg)
            if w is not None:
                return FalsifierReport(falsified=True, trials=n_done, witness=w)

    for _ in range(trials):
        mags = rng.uniform(0.1, 3.0, len(anchors))
        signs = rng.choice([-1.0, 1.0], len(anchors))
        weights = mags * signs
        axis = int(rng.integers(0, D))
        offset = rng.uniform(lo - gap, hi + gap)
        offset[axis] = 0.0
        n_done += 1
        for base in (offset, np.zeros(D)):
            w = _section_violation(kernel, weights, anchors, axis, base, cfg)
            if w is not None:
                return FalsifierReport(falsified=True, trials=n_done, witness=w)

    return FalsifierReport(falsified=False, trials=n_done, witness=None)
