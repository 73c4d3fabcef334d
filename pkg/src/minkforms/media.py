"""Frame splits, the Minkowski constitutive relation and rotating frames.

Engineering 3-vectors are tied to forms in an orthonormal coframe
(``eta = diag(1, -1, -1, -1)``) by a single convention, implemented in
:func:`engineering_from_2form` / :func:`two_form_from_engineering`::

    F_{0i} = E_i,    F_{ij} = -eps_{ijk} B_k

Electric-type vectors (E, D, P) are the covariant spatial components of the
frame 1-form ``v _| F``; magnetic-type vectors (B, H, M) are the contravariant
ones, i.e. minus the covariant components of ``v _| *F``.  With this choice
the rotating-frame field formulas and the engineering jump conditions come
out as usually written.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exterior import (
    LEVI_CIVITA,
    ChartFieldSampler,
    KVector,
    MetricAtPoint,
    contract_left,
    exterior_derivative,
    from_tensor,
    hodge,
    inner,
    to_tensor,
    wedge,
)

FRAME_TOL = 1e-12
SPATIAL_TOL = 1e-12
ETA = MetricAtPoint.minkowski()


@dataclass(frozen=True)
class MediumParams:
    """Relative permittivity and permeability of a non-dispersive isotropic medium."""

    epsilon: float
    mu: float

    def __post_init__(self):
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be positive, got {self.mu}")

    @classmethod
    def vacuum(cls) -> "MediumParams":
        return cls(1.0, 1.0)


@dataclass(frozen=True)
class FrameVelocity:
    """Unit timelike, future-pointing 1-form ``v = g(V, .)`` of a reference frame."""

    v: KVector
    metric: MetricAtPoint
    vector: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.v.grade != 1:
            raise ValueError("frame velocity must be a 1-form")
        norm = inner(self.v, self.v, self.metric)
        if abs(norm - 1.0) > FRAME_TOL:
            raise ValueError(f"frame not normalized: g(V,V) = {norm!r}")
        if self.metric.raise_one_form(self.v)[0] <= 0:
            raise ValueError("frame is not future-pointing")
        if self.vector is None:
            object.__setattr__(self, "vector", self.metric.raise_one_form(self.v))

    @classmethod
    def from_vector(cls, V, metric: MetricAtPoint) -> "FrameVelocity":
        V = np.asarray(V, dtype=float)
        return cls(KVector(1, metric.lower_vector(V)), metric, V)

    @classmethod
    def lab(cls, metric: MetricAtPoint = ETA) -> "FrameVelocity":
        return cls.from_vector([1.0 / math.sqrt(metric.g[0, 0]), 0, 0, 0], metric)

    @classmethod
    def boosted(cls, beta, metric: MetricAtPoint = ETA) -> "FrameVelocity":
        """Frame moving with 3-velocity ``beta`` in an orthonormal coframe."""
        beta = np.asarray(beta, dtype=float)
        b2 = float(beta @ beta)
        if b2 >= 1.0:
            raise ValueError("frame speed must be below 1")
        gamma = 1.0 / math.sqrt(1.0 - b2)
        return cls.from_vector(gamma * np.concatenate([[1.0], beta]), metric)


@dataclass(frozen=True)
class FieldSplit:
    E: KVector
    B: KVector
    D: KVector
    H: KVector


def _require_spatial(v: FrameVelocity, *forms: KVector) -> None:
    for a in forms:
        c = contract_left(v.v, a, v.metric).components[0]
        if abs(c) > SPATIAL_TOL:
            raise ValueError(f"input is not spatial relative to the frame (v _| a = {c!r})")


def split_fields(F: KVector, G: KVector, v: FrameVelocity) -> FieldSplit:
    """``E = v_|F, B = v_|*F, D = v_|G, H = v_|*G``."""
    m = v.metric
    return FieldSplit(
        E=contract_left(v.v, F, m),
        B=contract_left(v.v, hodge(F, m), m),
        D=contract_left(v.v, G, m),
        H=contract_left(v.v, hodge(G, m), m),
    )


def assemble_field(v: FrameVelocity, a: KVector, b: KVector) -> KVector:
    """``v ^ a - *(v ^ b)``, the inverse of the frame split."""
    _require_spatial(v, a, b)
    return wedge(v.v, a) - hodge(wedge(v.v, b), v.metric)


def constitutive_minkowski(F: KVector, v: FrameVelocity, med: MediumParams) -> KVector:
    """Excitation of a medium at rest in ``v``:
    ``G = (eps*mu - 1)/mu * v ^ (v _| F) + F/mu``.
    """
    eps, mu = med.epsilon, med.mu
    vF = wedge(v.v, contract_left(v.v, F, v.metric))
    return vF * ((eps * mu - 1.0) / mu) + F * (1.0 / mu)


def constitutive_via_split(F: KVector, v: FrameVelocity, med: MediumParams) -> KVector:
    """Same relation built from ``D = eps E`` and ``H = B / mu`` in the rest frame."""
    m = v.metric
    E = contract_left(v.v, F, m)
    B = contract_left(v.v, hodge(F, m), m)
    return wedge(v.v, E) * med.epsilon - hodge(wedge(v.v, B), m) * (1.0 / med.mu)


def constitutive_component_checks(
    F: KVector, G: KVector, v: FrameVelocity, med: MediumParams
) -> tuple[np.ndarray, np.ndarray]:
    """Component residuals of the constitutive relation in the metric's chart.

    Returns ``v^mu G_{mu nu} - eps v^mu F_{mu nu}`` and
    ``mu eps^{mu nu kappa sigma} G_{mu nu} v_kappa - eps^{...} F_{mu nu} v_kappa``
    with ``eps^{...}`` the Levi-Civita symbol.
    """
    V = v.vector
    vl = v.v.components
    Ft, Gt = to_tensor(F), to_tensor(G)
    electric = V @ Gt - med.epsilon * (V @ Ft)
    mag_G = np.einsum("mnks,mn,k->s", LEVI_CIVITA, Gt, vl)
    mag_F = np.einsum("mnks,mn,k->s", LEVI_CIVITA, Ft, vl)
    return electric, med.mu * mag_G - mag_F


def vacuum_chi(m: MetricAtPoint) -> np.ndarray:
    """Vacuum constitutive array ``chi^{rho sigma mu nu} = g^{rm} g^{sn} - g^{rn} g^{sm}``."""
    gi = m.g_inv
    return np.einsum("rm,sn->rsmn", gi, gi) - np.einsum("rn,sm->rsmn", gi, gi)


def apply_chi(chi: np.ndarray, F: KVector) -> np.ndarray:
    """Contravariant components ``G^{mu nu} = 1/2 chi^{mu nu a b} F_{ab}``."""
    return 0.5 * np.einsum("mnab,ab->mn", chi, to_tensor(F))


def polarization_split(
    F: KVector, G: KVector, v: FrameVelocity
) -> tuple[KVector, KVector, KVector]:
    """``Pi = F - G`` with ``P = E - D`` and ``M = B - H`` relative to ``v``.

    The sign follows ``Pi := F - G``, so ``P`` is opposite to the usual
    engineering polarization ``D - E``.
    """
    pi = F - G
    m = v.metric
    P = contract_left(v.v, pi, m)
    M = contract_left(v.v, hodge(pi, m), m)
    return pi, P, M


def frame_decompose(X: KVector, v: FrameVelocity) -> tuple[KVector, KVector]:
    """Split ``X = v ^ X_v + X_s`` with ``X_v = v_|X`` and ``X_s = v_|(v^X)`` spatial."""
    m = v.metric
    return contract_left(v.v, X, m), contract_left(v.v, wedge(v.v, X), m)


def bound_current(pi_field: ChartFieldSampler, point, h: float = 1e-4) -> KVector:
    """Bound current 3-form ``-d * Pi`` at ``point`` (metric from the sampler)."""
    return -exterior_derivative(pi_field.dual(), point, h)


# ----------------------------------------------------------------------------
# engineering vector bridge (orthonormal coframe)

_SPATIAL_PAIRS = ((1, 2, 3), (1, 3, 2), (2, 3, 1))


def two_form_from_engineering(E, B) -> KVector:
    """2-form with ``F_{0i} = E_i`` and ``F_{ij} = -eps_{ijk} B_k``."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    t = np.zeros((4, 4))
    t[0, 1:] = E
    t[1:, 0] = -E
    for i in range(3):
        for j in range(3):
            for k in range(3):
                t[i + 1, j + 1] -= LEVI_CIVITA[0, i + 1, j + 1, k + 1] * B[k]
    return from_tensor(t, 2)


def engineering_from_2form(F: KVector) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`two_form_from_engineering`."""
    t = to_tensor(F)
    E = t[0, 1:].copy()
    B = np.array([-t[2, 3], -t[3, 1], -t[1, 2]])
    return E, B


def electric_vector(a: KVector) -> np.ndarray:
    """Engineering vector of an electric-type spatial 1-form (E, D, P)."""
    return np.array(a.components[1:])


def magnetic_vector(a: KVector) -> np.ndarray:
    """Engineering vector of a magnetic-type spatial 1-form (B, H, M)."""
    return -np.array(a.components[1:])


def electric_one_form(vec) -> KVector:
    return KVector(1, np.concatenate([[0.0], np.asarray(vec, dtype=float)]))


def magnetic_one_form(vec) -> KVector:
    return KVector(1, np.concatenate([[0.0], -np.asarray(vec, dtype=float)]))


# ----------------------------------------------------------------------------
# rotating frame


@dataclass(frozen=True)
class RotatingChart:
    """Coordinate maps between the lab and a frame rotating about z with ``omega``.

    Charts: lab Cartesian ``(t, x, y, z)``, lab cylindrical ``(t, r, phi, z)``,
    rotating Cartesian ``(t', x', y', z')`` and rotating cylindrical
    ``(t', r', phi', z')`` with ``phi' = phi - omega t``.
    """

    omega: float

    @staticmethod
    def cyl_to_cart(p) -> np.ndarray:
        t, r, phi, z = p
        return np.array([t, r * math.cos(phi), r * math.sin(phi), z])

    @staticmethod
    def cart_to_cyl(p) -> np.ndarray:
        t, x, y, z = p
        return np.array([t, math.hypot(x, y), math.atan2(y, x), z])

    def rot_to_lab(self, p) -> np.ndarray:
        t, xp, yp, z = p
        c, s = math.cos(self.omega * t), math.sin(self.omega * t)
        return np.array([t, xp * c - yp * s, xp * s + yp * c, z])

    def lab_to_rot(self, p) -> np.ndarray:
        t, x, y, z = p
        c, s = math.cos(self.omega * t), math.sin(self.omega * t)
        return np.array([t, x * c + y * s, -x * s + y * c, z])

    def lab_cyl_to_rot_cyl(self, p) -> np.ndarray:
        t, r, phi, z = p
        return np.array([t, r, phi - self.omega * t, z])

    def rot_cyl_to_lab_cyl(self, p) -> np.ndarray:
        t, r, phip, z = p
        return np.array([t, r, phip + self.omega * t, z])

    def jacobian(self, lab_point) -> np.ndarray:
        """``J[alpha, mu] = d x_lab^alpha / d x_rot^mu`` at a lab Cartesian event."""
        t, x, y, _ = lab_point
        w = self.omega
        c, s = math.cos(w * t), math.sin(w * t)
        return np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [-w * y, c, -s, 0.0],
                [w * x, s, c, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )

    def inverse_jacobian(self, lab_point) -> np.ndarray:
        """``d x_rot^mu / d x_lab^alpha``."""
        t, x, y, _ = lab_point
        w = self.omega
        c, s = math.cos(w * t), math.sin(w * t)
        xp, yp = x * c + y * s, -x * s + y * c
        return np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [w * yp, c, s, 0.0],
                [-w * xp, -s, c, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )


@dataclass(frozen=True)
class RotatingKinematics:
    """Frame data of the rotating observers at one event.

    ``V_cyl``/``v_cyl`` are in lab cylindrical components, ``V_cart``/``v_cart``
    in lab Cartesian ones.  ``g_rot`` is the metric in rotating Cartesian
    coordinates, ``g_hat`` in rotating cylindrical ones, ``jacobian`` is
    ``d x_lab / d x_rot``.
    """

    omega: float
    r: float
    speed: float
    gamma: float
    V_cyl: np.ndarray
    v_cyl: KVector
    V_cart: np.ndarray
    v_cart: KVector
    g_rot: np.ndarray
    g_hat: np.ndarray
    jacobian: np.ndarray
    lab_metric_cyl: MetricAtPoint

    def frame(self) -> FrameVelocity:
        return FrameVelocity(self.v_cart, ETA, self.V_cart)


def cylindrical_metric(r: float) -> np.ndarray:
    return np.diag([1.0, -1.0, -r * r, -1.0])


def rotating_kinematics(omega: float, point, delta: float = 1e-6) -> RotatingKinematics:
    """Rotating-frame quantities at a lab cylindrical event ``(t, r, phi, z)``."""
    t, r, phi, z = (float(c) for c in point)
    speed = abs(omega) * r
    if speed >= 1.0 - delta:
        raise ValueError(f"frame outside physical support: omega*r = {speed!r}")
    gamma = 1.0 / math.sqrt(1.0 - (omega * r) ** 2)
    g_cyl = cylindrical_metric(r)
    V_cyl = np.array([gamma, 0.0, gamma * omega, 0.0])
    v_cyl = KVector(1, g_cyl @ V_cyl)

    chart = RotatingChart(omega)
    lab = chart.cyl_to_cart((t, r, phi, z))
    x, y = lab[1], lab[2]
    V_cart = np.array([gamma, -gamma * omega * y, gamma * omega * x, 0.0])
    v_cart = KVector(1, ETA.g @ V_cart)
    J = chart.jacobian(lab)
    g_rot = J.T @ ETA.g @ J

    # rotating cylindrical: (t', r', phi', z') -> lab cylindrical (t, r, phi' + omega t, z)
    J_cyl = np.eye(4)
    J_cyl[2, 0] = omega
    g_hat = J_cyl.T @ g_cyl @ J_cyl
    return RotatingKinematics(
        omega=omega,
        r=r,
        speed=speed,
        gamma=gamma,
        V_cyl=V_cyl,
        v_cyl=v_cyl,
        V_cart=V_cart,
        v_cart=v_cart,
        g_rot=g_rot,
        g_hat=g_hat,
        jacobian=J,
        lab_metric_cyl=MetricAtPoint(g_cyl),
    )


def _check_support(omega: float, lab_point, delta: float = 1e-6) -> None:
    _, x, y, _ = lab_point
    if abs(omega) * math.hypot(x, y) >= 1.0 - delta:
        raise ValueError("frame outside physical support")


def transform_field_2form(F_lab: KVector, omega: float, lab_point) -> KVector:
    """Pull a lab Cartesian 2-form back to rotating Cartesian components.

    ``F'_{mu nu} = J^a_mu J^b_nu F_{ab}`` with ``J = d x_lab / d x_rot``;
    ``lab_point`` is the event ``(t, x, y, z)``.
    """
    _check_support(omega, lab_point)
    J = RotatingChart(omega).jacobian(lab_point)
    return from_tensor(J.T @ to_tensor(F_lab) @ J, 2)


def inverse_transform_field_2form(F_rot: KVector, omega: float, lab_point) -> KVector:
    _check_support(omega, lab_point)
    Ji = RotatingChart(omega).inverse_jacobian(lab_point)
    return from_tensor(Ji.T @ to_tensor(F_rot) @ Ji, 2)


def rotating_fields_closed_form(E, B, omega: float, lab_point) -> tuple[np.ndarray, np.ndarray]:
    """Rotating-frame ``(E', B')`` of lab fields ``(E, B)``, written out by hand.

    Uses primed coordinates in the transverse electric lines and lab
    coordinates in the axial one, as the expressions are derived.
    """
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    t, x, y, _ = lab_point
    c, s = math.cos(omega * t), math.sin(omega * t)
    xp, yp = x * c + y * s, -x * s + y * c
    Ep = np.array(
        [
            E[0] * c + E[1] * s + omega * xp * B[2],
            -E[0] * s + E[1] * c + omega * yp * B[2],
            E[2] - omega * y * B[1] - omega * x * B[0],
        ]
    )
    Bp = np.array([B[0] * c + B[1] * s, -B[0] * s + B[1] * c, B[2]])
    return Ep, Bp


def transform_current(rho: float, j, omega: float, lab_point) -> tuple[float, np.ndarray]:
    """Charge and current densities seen in rotating Cartesian coordinates."""
    _check_support(omega, lab_point)
    J = np.concatenate([[rho], np.asarray(j, dtype=float)])
    Jp = RotatingChart(omega).inverse_jacobian(lab_point) @ J
    return float(Jp[0]), Jp[1:]


def rotating_constitutive_engineering(E, B, velocity, med: MediumParams):
    """``(D', H', P', M')`` in the co-rotating chart from ``(E', B')``.

    ``velocity`` is the lab 3-velocity of the medium point expressed in the
    rotating axes.
    """
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    vel = np.asarray(velocity, dtype=float)
    v2 = float(vel @ vel)
    if v2 >= 1.0:
        raise ValueError("medium speed must be below 1")
    gamma2 = 1.0 / (1.0 - v2)
    eps, mu = med.epsilon, med.mu
    vxE = np.cross(vel, E)
    D = eps * E
    H = (B + gamma2 * (eps * mu - 1.0) * vxE) / mu
    P = (eps - 1.0) * E
    M = (1.0 - 1.0 / mu) * B + gamma2 * (1.0 - eps * mu) * vxE / mu
    return D, H, P, M
