"""Shared reference systems and oracles.

Two closed-form benchmark systems are used throughout:

* poly_system: 2-state system with polynomial data whose exact solution is
  [t^2, t^3]; on K=3, M=4 the discretization reproduces it exactly.
* expdecay_system: 2-state system with exponential data whose exact solution
  is [exp(-t), 3 exp(-t)]; the calibrated basis uses K=4 blocks.
"""

import numpy as np
import pytest

from bpcheb import SystemSpec

E1 = np.exp(-1.0)

# ten-point comparison grid and high-precision reference values for the
# exponential benchmark (14 significant digits)
EXP_TS = np.array([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])
EXP_X1 = np.exp(-EXP_TS)
EXP_X2 = 3.0 * np.exp(-EXP_TS)

# calibrated block count for the exponential benchmark (see test_acceptance)
EXP_K = 4


def poly_A(t):
    return np.array([[t**2 + 1.0, -t], [0.0, 1.0]])


def poly_N(t, s):
    return np.array([[s, 3.0], [3.0 * t**2, 0.0]])


def poly_B(t):
    return np.array([[-((t - 1.0) ** 2)], [2.0 * t**2 - t**3]])


@pytest.fixture
def poly_system() -> SystemSpec:
    return SystemSpec(
        n=2, r=1, t0=0.0, tf=1.0, x0=[0.0, 0.0],
        A=poly_A, N=poly_N, B=poly_B, u=lambda t: np.array([1.0]),
    )


def expdecay_A(t):
    return np.array([[1.0, t], [t, t**2 + 1.0]])


def expdecay_N(t, s):
    return np.array(
        [[3.0 * s**2, np.exp(-t) - s**2], [3.0 * t**2 + s * np.exp(-t), -(t**2)]]
    )


def expdecay_B(t):
    return np.array([[3.0 * E1 - 5.0 - 3.0 * t], [2.0 * E1 - 7.0 - t - 3.0 * t**2]])


@pytest.fixture
def expdecay_system() -> SystemSpec:
    return SystemSpec(
        n=2, r=1, t0=0.0, tf=1.0, x0=[1.0, 3.0],
        A=expdecay_A, N=expdecay_N, B=expdecay_B,
        u=lambda t: np.array([np.exp(-t)]),
    )


def rk4_reference(spec: SystemSpec, ts, step: float = 1e-4) -> np.ndarray:
    """Classic fixed-step 4th-order integrator for zero-kernel systems.

    Independent cross-check oracle; ts must be increasing and start at t0.
    """
    assert spec.N is None, "reference integrator handles ordinary systems only"

    def rhs(t, x):
        out = np.zeros_like(x)
        if spec.A is not None:
            out += np.atleast_2d(spec.A(t)) @ x
        if spec.B is not None and spec.u is not None:
            out += np.atleast_2d(spec.B(t)) @ np.atleast_1d(spec.u(t))
        return out

    x = np.asarray(spec.x0, dtype=float).copy()
    t = spec.t0
    results = []
    for target in ts:
        span = target - t
        nsteps = max(int(round(span / step)), 0)
        h = span / nsteps if nsteps else 0.0
        for _ in range(nsteps):
            k1 = rhs(t, x)
            k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2)
            k4 = rhs(t + h, x + h * k3)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        t = target
        results.append(x.copy())
    return np.array(results)
