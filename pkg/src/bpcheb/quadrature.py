"""Gauss quadrature for the second-kind Chebyshev weight sqrt(1 - x^2).

Every projection integral in the library,

    (2/pi) * integral over [-1, 1] of f(x) S_m(x) sqrt(1 - x^2) dx,

is evaluated with the rule built here, so polynomial exactness is tested in
one place.  The n-point rule has closed-form nodes and weights

    x_i = cos(i pi / (n+1)),   w_i = (pi / (n+1)) sin^2(i pi / (n+1)),

i = 1..n, and integrates p(x) sqrt(1 - x^2) exactly for deg p <= 2n - 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import chebyshev_u_all

__all__ = ["WeightedRule", "gauss_u_rule", "project_scalar"]


@dataclass(frozen=True)
class WeightedRule:
    """Nodes (strictly decreasing, in (-1, 1)) and positive weights."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        nodes.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def order(self) -> int:
        return self.nodes.size


def gauss_u_rule(n: int) -> WeightedRule:
    """The n-point Gauss rule for the weight sqrt(1 - x^2) on [-1, 1]."""
    if n < 1:
        raise ValueError(f"rule order must be >= 1, got {n}")
    i = np.arange(1, n + 1, dtype=float)
    theta = i * np.pi / (n + 1)
    return WeightedRule(np.cos(theta), (np.pi / (n + 1)) * np.sin(theta) ** 2)


def project_scalar(f: Callable[[float], float], m: int, rule: WeightedRule) -> float:
    """Coefficient of S_m in f: (2/pi) * sum_i w_i f(x_i) S_m(x_i).

    Exact when f is a polynomial with deg f + m <= 2n - 1; the caller picks
    the rule order accordingly.
    """
    fx = np.array([f(x) for x in rule.nodes], dtype=float)
    sm = chebyshev_u_all(m, rule.nodes)[m]
    return float((2.0 / np.pi) * np.dot(rule.weights, fx * sm))


def projection_matrix(max_degree: int, rule: WeightedRule) -> np.ndarray:
    """Matrix mapping samples f(x_i) to coefficients of S_0..S_{max_degree}.

    Row m holds (2/pi) * w_i S_m(x_i); shape (max_degree+1, order).  Shared
    workhorse for the vectorized expansions.
    """
    smat = chebyshev_u_all(max_degree, rule.nodes)
    return (2.0 / np.pi) * smat * rule.weights[np.newaxis, :]
