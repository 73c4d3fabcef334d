"""Jump conditions for F and G across a moving medium/vacuum interface.

The interface is the level set ``Xi(t, x, y, z) = 0`` in lab Cartesian
coordinates, with normal covector ``n = dXi`` and spatial normal vector
``n_vec = -grad Xi``.  Free surface charges and currents are not modelled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exterior import KVector, MetricAtPoint, contract_right, wedge

ON_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class MovingBoundary:
    """Level-set interface ``xi`` moving with the spatial velocity field ``velocity``.

    Both callables take a lab Cartesian event ``(t, x, y, z)``.
    """

    xi: Callable[[np.ndarray], float]
    velocity: Callable[[np.ndarray], np.ndarray]
    h: float = 1e-5

    def gradient(self, point) -> np.ndarray:
        """Central-difference ``d Xi / d x^mu``."""
        point = np.asarray(point, dtype=float)
        out = np.zeros(4)
        for mu in range(4):
            step = np.zeros(4)
            step[mu] = self.h
            out[mu] = (self.xi(point + step) - self.xi(point - step)) / (2.0 * self.h)
        return out

    def normal(self, point) -> KVector:
        return KVector(1, self.gradient(point))

    def normal_spatial(self, point) -> np.ndarray:
        return -self.gradient(point)[1:]


def jump_residual_F(F_out: KVector, F_in: KVector, n: KVector) -> KVector:
    """``[F] ^ n``; vanishes when the homogeneous jump condition holds."""
    return wedge(F_out - F_in, n)


def jump_residual_G(G_out: KVector, G_in: KVector, n: KVector, m: MetricAtPoint) -> KVector:
    """``[G] |_ n``; vanishes when the excitation jump condition holds."""
    return contract_right(G_out - G_in, n, m)


def engineering_jump_residuals(dE, dB, dD, dH, n_vec, velocity) -> tuple:
    """Vector-calculus form of the jump conditions for jumps ``[E], [B], [D], [H]``.

    Returns ``(n.[B], n x [E] - (n.v)[B], n.[D], (n.v)[D] + n x [H])``.  The
    relative sign of the Faraday pair follows from ``[F] ^ dXi = 0``.
    """
    dE, dB, dD, dH = (np.asarray(a, dtype=float) for a in (dE, dB, dD, dH))
    n_vec = np.asarray(n_vec, dtype=float)
    nv = float(n_vec @ np.asarray(velocity, dtype=float))
    return (
        float(n_vec @ dB),
        np.cross(n_vec, dE) - nv * dB,
        float(n_vec @ dD),
        nv * dD + np.cross(n_vec, dH),
    )


def boundary_kinematics_residual(b: MovingBoundary, point, tol: float = ON_BOUNDARY_TOL) -> float:
    """``dXi/dt - n_vec . v`` at a point of the interface."""
    point = np.asarray(point, dtype=float)
    value = b.xi(point)
    if abs(value) > tol:
        raise ValueError(f"point not on boundary: Xi = {value!r}")
    grad = b.gradient(point)
    return float(grad[0] - (-grad[1:]) @ np.asarray(b.velocity(point), dtype=float))
