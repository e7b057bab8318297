"""Pointwise optimization of the controlled drift-diffusion generator.

At a fixed state the value PDE requires

    sup over |z| <= K of  z + 0.5 * a * z**2,      a = v_y + v_yy.

The quadratic has an interior maximizer -1/a only when a < 0; otherwise
the supremum sits at the upper endpoint z = K (the linear gain term always
prefers larger z).  Both the exact optimizer and a scanning variant over a
finite z-grid are provided; the scanning variant exists so the PDE scheme
has a provably monotone interpretation, and it reproduces the closed form
exactly whenever the closed-form candidate is appended to the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HamiltonianResult:
    z_star: float
    value: float
    curvature: float


def optimal_z(a: float, K: float) -> HamiltonianResult:
    """Maximize z + 0.5*a*z**2 over |z| <= K in closed form."""
    if not math.isfinite(a):
        raise ValueError("curvature must be finite")
    if not math.isfinite(K) or K <= 0.0:
        raise ValueError("control bound must be positive")
    if a < 0.0:
        z = min(K, -1.0 / a)
    else:
        z = K
    return HamiltonianResult(z, z + 0.5 * a * z * z, a)


def optimal_z_values(a, K: float):
    """Vectorized twin of optimal_z: returns (z_star, value) arrays."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("curvature must be finite")
    if K <= 0.0:
        raise ValueError("control bound must be positive")
    with np.errstate(divide="ignore"):
        interior = np.where(a < 0.0, -1.0 / np.where(a < 0.0, a, -1.0), np.inf)
    z = np.minimum(K, np.where(a < 0.0, interior, K))
    return z, z + 0.5 * a * z * z


def hamiltonian_value(y: float, v_y: float, v_yy: float, k_a: float, K: float) -> float:
    """Full generator value k_a*y*v_y + sup_z { z + 0.5*(v_y+v_yy)*z**2 }."""
    if y < 0.0:
        raise ValueError("state must be nonnegative")
    return k_a * y * v_y + optimal_z(v_y + v_yy, K).value


def optimal_z_discrete(a: float, K: float, M: int) -> HamiltonianResult:
    """Scan a uniform z-grid of M points on [-K, K] plus the closed-form candidate.

    The candidate makes the scan exact: the quadratic's constrained maximizer
    is always among the evaluated points, so the result equals optimal_z.
    """
    if M < 2:
        raise ValueError("z-grid needs at least two points")
    closed = optimal_z(a, K)
    grid = -K + 2.0 * K * np.arange(M) / (M - 1)
    cand = np.append(grid, closed.z_star)
    vals = cand + 0.5 * a * cand * cand
    j = int(np.argmax(vals))
    return HamiltonianResult(float(cand[j]), float(vals[j]), a)
