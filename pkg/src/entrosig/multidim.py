"""Entropy, disequilibrium and complexity of independent product distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from entrosig import criteria
from entrosig.distributions import DiscreteDistribution

# marginals with entropy below this are treated as degenerate by the
# factored complexity, which divides by the marginal entropies
ZERO_ENTROPY_TOL = 1e-9


@dataclass(frozen=True)
class ProductDistribution2D:
    """Joint distribution of two independent discrete marginals.

    The joint entries p_ij = p1_i * p2_j form a valid distribution by
    construction; only product joints are represented.
    """

    p1: DiscreteDistribution
    p2: DiscreteDistribution

    @property
    def shape(self) -> tuple[int, int]:
        return (self.p1.size, self.p2.size)

    def joint(self) -> np.ndarray:
        return np.outer(self.p1.probs, self.p2.probs)


def entropy_2d(pd: ProductDistribution2D) -> float:
    """Joint entropy of a product distribution: H(p1) + H(p2), in bits."""
    return criteria.entropy(pd.p1) + criteria.entropy(pd.p2)


def disequilibrium_2d_direct(pd: ProductDistribution2D) -> float:
    """Squared distance of the explicit joint from the uniform N*K joint."""
    n, k = pd.shape
    centered = pd.joint() - 1.0 / (n * k)
    return float(np.sum(centered * centered))


def disequilibrium_2d_factored(pd: ProductDistribution2D) -> float:
    """Joint disequilibrium from the marginal ones, without forming the joint.

    D = D1/K + D2/N + D1*D2 where D1, D2 are the marginal squared
    distances from uniform; algebraically identical to the direct form.
    """
    n, k = pd.shape
    d1 = criteria.d_sq(pd.p1)
    d2 = criteria.d_sq(pd.p2)
    return d1 / k + d2 / n + d1 * d2


def complexity_2d(pd: ProductDistribution2D) -> float:
    """Joint statistical complexity: joint entropy times joint disequilibrium."""
    return entropy_2d(pd) * disequilibrium_2d_direct(pd)


def complexity_2d_factored(pd: ProductDistribution2D) -> float:
    """Joint complexity assembled from the marginal complexities.

    (C1/K)(1 + H2/H1) + (C2/N)(1 + H1/H2) + C1*C2*(1/H1 + 1/H2) with raw
    bit entropies. The expression divides by the marginal entropies, so a
    near-zero-entropy marginal falls back to the direct product, which is
    the continuous limit (zero).
    """
    n, k = pd.shape
    h1 = criteria.entropy(pd.p1)
    h2 = criteria.entropy(pd.p2)
    if h1 <= ZERO_ENTROPY_TOL or h2 <= ZERO_ENTROPY_TOL:
        return complexity_2d(pd)
    c1 = h1 * criteria.d_sq(pd.p1)
    c2 = h2 * criteria.d_sq(pd.p2)
    return (
        c1 / k * (1.0 + h2 / h1)
        + c2 / n * (1.0 + h1 / h2)
        + c1 * c2 * (1.0 / h1 + 1.0 / h2)
    )
