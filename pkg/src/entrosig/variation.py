"""Numerical checks of the entropy-variation expansion and grouping identities.

The expansion under test: for a perturbed distribution p = q + dq with
sum(dq) = 0,

    H(p) - H(q) = LH(p||q) - D(p,q) * N / (2 ln 2) + o(dq^2),

whose residual shrinks like the cube of the perturbation scale in the
generic case. The grouping identities relate the entropy of the
per-sample distribution to the divergence between its two level-grouped
forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from entrosig import criteria
from entrosig.distributions import DEFAULT_LEVELS, DiscreteDistribution, dist_time_grouped

DEFAULT_SCALES = (1e-2, 5e-3, 2.5e-3, 1.25e-3)

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class EntropyVariationTerms:
    """First- and second-order terms of the expansion plus the exact residual."""

    lh_term: float
    d_term: float
    residual: float


@dataclass(frozen=True)
class ResidualOrderResult:
    """Residual magnitudes per perturbation scale and the fitted log-log slope."""

    scales: tuple[float, ...]
    residuals: tuple[float, ...]
    slope: float


@dataclass(frozen=True)
class ConnectionResult:
    """Both sides of the grouping identity and their gap, in bits."""

    lhs: float
    rhs: float
    gap: float


@dataclass(frozen=True)
class GroupingStabilityResult:
    """Divergence between the grouped forms per alphabet size, plus the spread."""

    divergences: dict[int, float]
    spread: float


def entropy_variation(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Exact entropy difference H(p) - H(q) in bits."""
    return criteria.entropy(p) - criteria.entropy(q)


def decompose_entropy_variation(p: DiscreteDistribution, q: DiscreteDistribution) -> EntropyVariationTerms:
    """Evaluate the expansion terms and the residual they leave.

    residual = [H(p) - H(q)] - (lh_term - d_term); it collects everything
    beyond second order in p - q.
    """
    lh_term = criteria.lh(p, q)
    d_term = criteria.disequilibrium(p, q) * p.size / (2.0 * _LN2)
    residual = entropy_variation(p, q) - (lh_term - d_term)
    return EntropyVariationTerms(lh_term=lh_term, d_term=d_term, residual=residual)


def residual_order_check(
    q: DiscreteDistribution,
    direction: Sequence[float] | np.ndarray,
    scales: Sequence[float] = DEFAULT_SCALES,
) -> ResidualOrderResult:
    """Fit the decay order of the expansion residual along one direction.

    The direction must sum to zero and q + eps*direction must stay a valid
    distribution for every scale. Returns the slope of log|residual|
    against log(eps); a slope near 3 confirms the residual is o(eps^2)
    with the generic cubic leading term.
    """
    d = np.asarray(direction, dtype=np.float64)
    if d.shape != q.probs.shape:
        raise ValueError("direction must match the distribution size")
    if abs(float(d.sum())) > 1e-9 * max(1.0, float(np.abs(d).sum())):
        raise ValueError("direction must sum to zero")
    if len(scales) < 2:
        raise ValueError("need at least two scales to fit a slope")

    residuals = []
    for eps in scales:
        if eps <= 0.0:
            raise ValueError("scales must be positive")
        probs = q.probs + eps * d
        if np.any(probs < 0.0):
            raise ValueError(f"perturbation leaves the simplex at scale {eps}")
        p = DiscreteDistribution(probs)
        residuals.append(decompose_entropy_variation(p, q).residual)

    magnitudes = np.abs(residuals)
    if np.any(magnitudes == 0.0):
        raise ValueError("residual vanished exactly; direction too symmetric to fit an order")
    slope, _ = np.polyfit(np.log(np.asarray(scales)), np.log(magnitudes), 1)
    return ResidualOrderResult(
        scales=tuple(float(s) for s in scales),
        residuals=tuple(float(r) for r in residuals),
        slope=float(slope),
    )


def connection_check(p0: DiscreteDistribution, n_levels: int = DEFAULT_LEVELS) -> ConnectionResult:
    """Compare H(p0) against log2 N - KL(mass-grouped || count-grouped).

    The two sides agree exactly (up to rounding) whenever p0 is
    piecewise-constant within the grouping levels; otherwise the gap
    measures the grouping approximation error.
    """
    p1, pt = dist_time_grouped(p0, n_levels)
    lhs = criteria.entropy(p0)
    rhs = math.log2(p0.size) - criteria.kl_divergence(p1, pt)
    return ConnectionResult(lhs=lhs, rhs=rhs, gap=lhs - rhs)


def grouping_stability(
    p0: DiscreteDistribution, n_values: Sequence[int]
) -> GroupingStabilityResult:
    """Tabulate KL(mass-grouped || count-grouped) across alphabet sizes.

    The divergence should stay roughly constant over a reasonable range
    of level counts; the spread (max - min) quantifies how constant.
    """
    if not n_values:
        raise ValueError("need at least one alphabet size")
    divergences: dict[int, float] = {}
    for n in n_values:
        p1, pt = dist_time_grouped(p0, n)
        divergences[int(n)] = criteria.kl_divergence(p1, pt)
    values = list(divergences.values())
    return GroupingStabilityResult(divergences=divergences, spread=max(values) - min(values))


def gaussianity_check(p1: DiscreteDistribution) -> float:
    """Kolmogorov-Smirnov-style distance of a level distribution from Gaussian.

    Places the level mass at bin centers on the normalized support [0, 1],
    moment-matches a Gaussian, and returns the maximum absolute gap
    between the two cumulative distributions at the bin edges. Diagnostic
    only: a zero-variance (single-level) distribution returns 1.0 as the
    maximally non-Gaussian answer.
    """
    n = p1.size
    centers = (np.arange(n) + 0.5) / n
    edges = np.arange(1, n + 1) / n
    mean = float(np.sum(p1.probs * centers))
    var = float(np.sum(p1.probs * (centers - mean) ** 2))
    if var <= 0.0:
        return 1.0
    sd = math.sqrt(var)
    empirical = np.cumsum(p1.probs)
    gaussian = np.array([0.5 * (1.0 + math.erf((e - mean) / (sd * math.sqrt(2.0)))) for e in edges])
    return float(np.max(np.abs(empirical - gaussian)))
