"""Scalar information criteria over discrete distributions.

All entropic quantities use base-2 logarithms (bits) with the convention
0 * log2(0) = 0. Divergence-style quantities that divide by a reference
distribution raise SupportMismatchError when the reference has zero mass
where the subject does not, unless the epsilon-floor mode is enabled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from entrosig.distributions import DiscreteDistribution

EPSILON_FLOOR = 1e-12


class SupportMismatchError(ValueError):
    """The reference distribution has zero mass where the subject has mass."""


def _check_pair(p: DiscreteDistribution, q: DiscreteDistribution) -> None:
    if p.size != q.size:
        raise ValueError(f"distribution sizes differ: {p.size} vs {q.size}")


def floor_distribution(p: DiscreteDistribution, eps: float = EPSILON_FLOOR) -> DiscreteDistribution:
    """Add a tiny floor to every entry and renormalize, removing zero bins."""
    return DiscreteDistribution((p.probs + eps) / (1.0 + p.size * eps))


def entropy(p: DiscreteDistribution) -> float:
    """Shannon entropy -sum p_i log2 p_i in bits; 0 <= H <= log2 N."""
    probs = p.probs[p.probs > 0.0]
    return float(-np.sum(probs * np.log2(probs)))


def normalized_entropy(p: DiscreteDistribution) -> float:
    """Entropy divided by its maximum log2 N, mapping into [0, 1]."""
    if p.size < 2:
        raise ValueError("normalized entropy needs at least 2 states")
    return entropy(p) / math.log2(p.size)


def cross_entropy(
    p: DiscreteDistribution, q: DiscreteDistribution, *, epsilon_floor: bool = False
) -> float:
    """Cross-entropy -sum p_i log2 q_i in bits; never below entropy(p)."""
    _check_pair(p, q)
    if epsilon_floor:
        q = floor_distribution(q)
    mask = p.probs > 0.0
    q_masked = q.probs[mask]
    if np.any(q_masked == 0.0):
        raise SupportMismatchError("reference has zero mass on the subject's support")
    return float(-np.sum(p.probs[mask] * np.log2(q_masked)))


def kl_divergence(
    p: DiscreteDistribution, q: DiscreteDistribution, *, epsilon_floor: bool = False
) -> float:
    """Kullback-Leibler divergence sum p_i log2(p_i / q_i), >= 0 (Gibbs)."""
    _check_pair(p, q)
    if epsilon_floor:
        q = floor_distribution(q)
    mask = p.probs > 0.0
    p_masked = p.probs[mask]
    q_masked = q.probs[mask]
    if np.any(q_masked == 0.0):
        raise SupportMismatchError("reference has zero mass on the subject's support")
    value = float(np.sum(p_masked * np.log2(p_masked / q_masked)))
    # rounding can leave a tiny negative when p ~ q; Gibbs guarantees >= 0
    return max(value, 0.0)


def symmetrized_kl(
    p: DiscreteDistribution, q: DiscreteDistribution, *, epsilon_floor: bool = False
) -> float:
    """Symmetrized Kullback-Leibler distance: KL(p||q) + KL(q||p)."""
    return kl_divergence(p, q, epsilon_floor=epsilon_floor) + kl_divergence(
        q, p, epsilon_floor=epsilon_floor
    )


def jsd(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Jensen-Shannon divergence via the midpoint mixture, in [0, 1] bit.

    Finite for any pair, including disjoint supports, since the mixture
    covers the union of both supports.
    """
    _check_pair(p, q)
    m = DiscreteDistribution((p.probs + q.probs) / 2.0)
    return 0.5 * (kl_divergence(p, m) + kl_divergence(q, m))


def sid(
    r_spec: DiscreteDistribution, t_spec: DiscreteDistribution, *, epsilon_floor: bool = False
) -> float:
    """Spectral information divergence between two spectral distributions.

    Identical to the symmetrized Kullback-Leibler distance; kept as its
    own entry point because it is conventionally applied to normalized
    spectra, where the epsilon floor absorbs empty bins.
    """
    return symmetrized_kl(r_spec, t_spec, epsilon_floor=epsilon_floor)


def lh(p: DiscreteDistribution, q: DiscreteDistribution, *, epsilon_floor: bool = False) -> float:
    """Cross-entropy minus reference entropy: H(p,q) - H(q).

    The first-order term of the entropy variation expansion; identically
    zero when q is uniform.
    """
    return cross_entropy(p, q, epsilon_floor=epsilon_floor) - entropy(q)


def disequilibrium(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Weighted squared variation (1/N) sum (p_i - q_i)^2 / q_i.

    Requires q strictly positive everywhere (chi-square style weighting).
    """
    _check_pair(p, q)
    if np.any(q.probs == 0.0):
        raise SupportMismatchError("disequilibrium reference must be strictly positive")
    diff = p.probs - q.probs
    return float(np.sum(diff * diff / q.probs) / p.size)


def d_sq(p: DiscreteDistribution) -> float:
    """Squared Euclidean distance from the uniform distribution.

    Equals sum p_i^2 - 1/N; ranges over [0, 1 - 1/N].
    """
    centered = p.probs - 1.0 / p.size
    return float(np.sum(centered * centered))


def c_sq(p: DiscreteDistribution, *, normalized: bool = True) -> float:
    """Statistical complexity H * D_sq; vanishes for uniform and delta.

    With normalized=True (default) the entropy factor is scaled to [0, 1];
    raw bits are available for analytical identity checks.
    """
    h = normalized_entropy(p) if normalized else entropy(p)
    return h * d_sq(p)


def c_jsd(p: DiscreteDistribution, *, normalized: bool = True) -> float:
    """Statistical complexity with the Jensen-Shannon disequilibrium.

    H(p) * JSD(p || uniform); the more common literature form.
    """
    h = normalized_entropy(p) if normalized else entropy(p)
    return h * jsd(p, DiscreteDistribution.uniform(p.size))


def c_general(p: DiscreteDistribution) -> float:
    """Alternative complexity H * (H_max - H) in bits squared."""
    h = entropy(p)
    return h * (math.log2(p.size) - h)


@dataclass(frozen=True)
class GaussianParams:
    """Mean and standard deviation of a Gaussian amplitude model."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")


def gaussian_entropy(g: GaussianParams) -> float:
    """Differential entropy of a Gaussian in bits: log2(sqrt(2 pi e) sigma)."""
    return math.log2(math.sqrt(2.0 * math.pi * math.e) * g.sigma)


def gaussian_disequilibrium(gp: GaussianParams, gq: GaussianParams) -> float:
    """Closed-form continuous disequilibrium between two Gaussians.

    sigma_q^2 / (sigma_p sqrt(2 sigma_q^2 - sigma_p^2))
    * exp((mu_p - mu_q)^2 / (2 sigma_q^2 - sigma_p^2)) - 1.

    The underlying integral only converges for 2 sigma_q^2 > sigma_p^2;
    outside that region the formula is singular and a ValueError is
    raised.
    """
    denom = 2.0 * gq.sigma**2 - gp.sigma**2
    if denom <= 0.0:
        raise ValueError("singular parameters: need 2*sigma_q^2 > sigma_p^2")
    scale = gq.sigma**2 / (gp.sigma * math.sqrt(denom))
    return scale * math.exp((gp.mu - gq.mu) ** 2 / denom) - 1.0


def gaussian_lh(gp: GaussianParams, gq: GaussianParams) -> float:
    """Closed-form LH between two Gaussians, in natural-log scale.

    (mu_p - mu_q)^2 / (2 sigma_q^2) + (sigma_p^2 / sigma_q^2 - 1) / 2.
    Returned unconverted (not bits), matching the conventional printed
    form of the expression.
    """
    return (gp.mu - gq.mu) ** 2 / (2.0 * gq.sigma**2) + 0.5 * (
        gp.sigma**2 / gq.sigma**2 - 1.0
    )
