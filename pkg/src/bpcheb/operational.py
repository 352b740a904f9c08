"""Operational matrix of integration for the hybrid basis.

With H(t) the MK-vector of hybrid functions stacked block-major,
integral from t_0 to t of H is approximately P H(t).  On column coefficient
vectors the map is the transpose: coeffs of the running integral of f equal
P^T coeffs(f).

The within-block matrix is

    Phat = E_11 - (3/4) E_21
         + (1/2) [ sum_{k=1}^{M-1} (1/k) E_{k,k+1} - sum_{k=2}^{M-1} (1/(k+1)) E_{k+1,k} ]
         + sum_{k=3}^{M} ((-1)^{k-1}/k) E_{k1},

whose row m+1 holds the degree-truncated coefficients of the antiderivative
of S_m on [-1, 1].  The full matrix has diagonal K-blocks (d_k/2) Phat and,
for every later block j > i, the first-column entries d_i/(2kappa-1) at rows
2kappa-1 (the full-block integrals of the even-degree polynomials).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisConfig

__all__ = ["OperationalMatrix", "build_phat", "build_p"]


@dataclass(frozen=True)
class OperationalMatrix:
    """Integration matrix P (MK x MK) for a basis configuration."""

    P: np.ndarray
    cfg: BasisConfig

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        P.flags.writeable = False
        object.__setattr__(self, "P", P)


def build_phat(M: int) -> np.ndarray:
    """The M x M within-block integration matrix (local interval [-1, 1])."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    phat = np.zeros((M, M))
    phat[0, 0] = 1.0
    if M >= 2:
        phat[1, 0] = -0.75
    for k in range(1, M):  # superdiagonal 1/(2k)
        phat[k - 1, k] = 0.5 / k
    for k in range(2, M):  # subdiagonal -1/(2(k+1))
        phat[k, k - 1] = -0.5 / (k + 1)
    for k in range(3, M + 1):  # first column tail (-1)^(k-1)/k
        phat[k - 1, 0] = (-1.0) ** (k - 1) / k
    return phat


def build_p(cfg: BasisConfig) -> OperationalMatrix:
    """Assemble the full MK x MK operational matrix for cfg."""
    M, K = cfg.M, cfg.K
    widths = cfg.partition.widths
    phat = build_phat(M)
    P = np.zeros((M * K, M * K))
    for i in range(K):
        P[i * M : (i + 1) * M, i * M : (i + 1) * M] = 0.5 * widths[i] * phat
    # block (i, j), j > i: completed blocks contribute their full integral,
    # a constant, i.e. the first column of the later block
    rows = np.arange(0, M, 2)  # even degrees m = 2kappa-2
    vals = 1.0 / (rows + 1.0)
    for i in range(K):
        for j in range(i + 1, K):
            P[i * M + rows, j * M] = widths[i] * vals
    return OperationalMatrix(P, cfg)
