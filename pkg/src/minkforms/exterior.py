"""Exterior algebra of a 4-dimensional cotangent space.

Forms are stored by their canonical components: one real number per strictly
increasing multi-index over ``{0, 1, 2, 3}``, ordered lexicographically.  A
2-form ``F = 1/2 F_{mu nu} theta^mu ^ theta^nu`` is stored as the six numbers
``F_{01}, F_{02}, F_{03}, F_{12}, F_{13}, F_{23}``.

Metric-dependent operators (contractions, scalar product, Hodge star) take a
:class:`MetricAtPoint`.  The exterior derivative works on a
:class:`ChartFieldSampler` using central differences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

DIM = 4

BASIS: tuple[tuple[tuple[int, ...], ...], ...] = tuple(
    tuple(itertools.combinations(range(DIM), r)) for r in range(DIM + 1)
)
INDEX: tuple[dict[tuple[int, ...], int], ...] = tuple(
    {idx: k for k, idx in enumerate(basis)} for basis in BASIS
)

DEGREE_OVERFLOW = "degree overflow"
GRADE_UNDERFLOW = "grade underflow"


def permutation_sign(seq: Sequence[int]) -> int:
    """Parity of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _levi_civita() -> np.ndarray:
    eps = np.zeros((DIM,) * DIM)
    for perm in itertools.permutations(range(DIM)):
        eps[perm] = permutation_sign(perm)
    return eps


LEVI_CIVITA = _levi_civita()


class KVector:
    """A grade-r form at a point, stored by canonical components.

    ``flag`` is ``None`` for ordinary results; operations that fall off the
    grade range return a zero form carrying ``DEGREE_OVERFLOW`` or
    ``GRADE_UNDERFLOW``.
    """

    __slots__ = ("grade", "components", "flag")

    def __init__(self, grade: int, components, flag: Optional[str] = None):
        if not 0 <= grade <= DIM:
            raise ValueError(f"grade must be in 0..{DIM}, got {grade}")
        comps = np.array(components, dtype=float).reshape(-1)
        if comps.size != math.comb(DIM, grade):
            raise ValueError(
                f"grade {grade} needs {math.comb(DIM, grade)} components, got {comps.size}"
            )
        comps.setflags(write=False)
        object.__setattr__(self, "grade", grade)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "flag", flag)

    def __setattr__(self, name, value):
        raise AttributeError("KVector is immutable")

    @classmethod
    def zero(cls, grade: int, flag: Optional[str] = None) -> "KVector":
        return cls(grade, np.zeros(math.comb(DIM, grade)), flag)

    @classmethod
    def scalar(cls, value: float) -> "KVector":
        return cls(0, [value])

    @classmethod
    def basis(cls, *indices: int) -> "KVector":
        """The blade ``theta^{i1} ^ ... ^ theta^{ir}`` (any index order)."""
        sign = permutation_sign(indices)
        comps = np.zeros(math.comb(DIM, len(indices)))
        if sign:
            comps[INDEX[len(indices)][tuple(sorted(indices))]] = sign
        return cls(len(indices), comps)

    @classmethod
    def from_dict(cls, grade: int, entries: dict) -> "KVector":
        """Build from ``{(i, j, ...): value}``; unsorted keys pick up their sign."""
        comps = np.zeros(math.comb(DIM, grade))
        for idx, value in entries.items():
            idx = tuple(idx) if not isinstance(idx, int) else (idx,)
            sign = permutation_sign(idx)
            if sign:
                comps[INDEX[grade][tuple(sorted(idx))]] += sign * value
        return cls(grade, comps)

    def __getitem__(self, idx) -> float:
        idx = tuple(idx) if not isinstance(idx, int) else (idx,)
        sign = permutation_sign(idx)
        if not sign:
            return 0.0
        return sign * float(self.components[INDEX[self.grade][tuple(sorted(idx))]])

    def _check(self, other: "KVector") -> None:
        if not isinstance(other, KVector) or other.grade != self.grade:
            raise ValueError("grade mismatch")

    def __add__(self, other: "KVector") -> "KVector":
        self._check(other)
        return KVector(self.grade, self.components + other.components)

    def __sub__(self, other: "KVector") -> "KVector":
        self._check(other)
        return KVector(self.grade, self.components - other.components)

    def __neg__(self) -> "KVector":
        return KVector(self.grade, -self.components)

    def __mul__(self, s: float) -> "KVector":
        return KVector(self.grade, self.components * float(s))

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "KVector":
        return KVector(self.grade, self.components / float(s))

    def __xor__(self, other: "KVector") -> "KVector":
        return wedge(self, other)

    def norm(self) -> float:
        """Euclidean norm of the canonical components (not a metric norm)."""
        return float(np.linalg.norm(self.components))

    def allclose(self, other: "KVector", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        return other.grade == self.grade and bool(
            np.allclose(self.components, other.components, atol=atol, rtol=rtol)
        )

    def __repr__(self) -> str:
        terms = [
            f"{c:+.6g}*th{''.join(map(str, idx))}"
            for idx, c in zip(BASIS[self.grade], self.components)
            if c != 0.0
        ]
        body = " ".join(terms) if terms else "0"
        tail = f", flag={self.flag!r}" if self.flag else ""
        return f"KVector(grade={self.grade}: {body}{tail})"


def to_tensor(a: KVector) -> np.ndarray:
    """Fully antisymmetric component array ``a_{i1...ir}`` of shape (4,)*r."""
    r = a.grade
    if r == 0:
        return np.array(a.components[0])
    out = np.zeros((DIM,) * r)
    perms = list(itertools.permutations(range(r)))
    for idx, c in zip(BASIS[r], a.components):
        if c == 0.0:
            continue
        for p in perms:
            out[tuple(idx[k] for k in p)] = permutation_sign(p) * c
    return out


def from_tensor(t: np.ndarray, grade: int) -> KVector:
    """Canonical components of an antisymmetric array (no symmetrization)."""
    t = np.asarray(t, dtype=float)
    if grade == 0:
        return KVector(0, [float(t)])
    return KVector(grade, [t[idx] for idx in BASIS[grade]])


@lru_cache(maxsize=None)
def _wedge_table(r: int, s: int) -> tuple:
    """Per output component, the ``(i, j, sign)`` terms contributing to it."""
    groups = [[] for _ in BASIS[r + s]]
    for i, I in enumerate(BASIS[r]):
        for j, J in enumerate(BASIS[s]):
            if set(I) & set(J):
                continue
            groups[INDEX[r + s][tuple(sorted(I + J))]].append((i, j, permutation_sign(I + J)))
    return tuple(tuple(g) for g in groups)


def wedge(a: KVector, b: KVector) -> KVector:
    """Exterior product; grades past 4 give a zero 4-form flagged ``DEGREE_OVERFLOW``.

    Each component is a correctly rounded sum (``math.fsum``), so
    ``a ^ b == (-1)^{rs} b ^ a`` holds bit for bit.
    """
    r, s = a.grade, b.grade
    if r + s > DIM:
        return KVector.zero(DIM, DEGREE_OVERFLOW)
    ac, bc = a.components.tolist(), b.components.tolist()
    out = [math.fsum(sign * ac[i] * bc[j] for i, j, sign in g) for g in _wedge_table(r, s)]
    return KVector(r + s, out)


def reversion(a: KVector) -> KVector:
    """``(-1)^{r(r-1)/2} a``: the sign picked up by reversing factor order."""
    r = a.grade
    return a * (-1) ** (r * (r - 1) // 2)


def grade_involution(a: KVector) -> KVector:
    """``(-1)^r a``."""
    return a * (-1) ** a.grade


class MetricAtPoint:
    """Lorentzian metric components at a point, signature (+,-,-,-).

    ``orientation`` (+1 or -1) fixes the volume element
    ``tau = orientation * sqrt|det g| theta^0 ^ theta^1 ^ theta^2 ^ theta^3``.
    """

    def __init__(self, g, orientation: int = 1):
        g = np.array(g, dtype=float)
        if g.shape != (DIM, DIM):
            raise ValueError(f"metric must be {DIM}x{DIM}")
        if not np.allclose(g, g.T, atol=1e-12, rtol=0.0):
            raise ValueError("metric not symmetric")
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        det = float(np.linalg.det(g))
        scale = max(1.0, float(np.max(np.abs(g)))) ** DIM
        if not math.isfinite(det) or abs(det) <= 1e-300 or abs(det) / scale < 1e-14:
            raise ValueError("degenerate metric")
        eig = np.linalg.eigvalsh(g)
        if int(np.sum(eig > 0)) != 1 or int(np.sum(eig < 0)) != 3:
            raise ValueError("metric is not Lorentzian with signature (+,-,-,-)")
        g_inv = np.linalg.inv(g)
        if not np.allclose(g @ g_inv, np.eye(DIM), atol=1e-10, rtol=0.0):
            raise ValueError("degenerate metric")
        g.setflags(write=False)
        g_inv.setflags(write=False)
        self.g = g
        self.g_inv = g_inv
        self.det_g = det
        self.orientation = orientation
        self._gram: dict[int, np.ndarray] = {}

    @classmethod
    def minkowski(cls) -> "MetricAtPoint":
        return cls(np.diag([1.0, -1.0, -1.0, -1.0]))

    @property
    def sqrt_abs_det(self) -> float:
        return math.sqrt(abs(self.det_g))

    @property
    def sign_det(self) -> int:
        return 1 if self.det_g > 0 else -1

    def volume(self) -> KVector:
        return KVector(DIM, [self.orientation * self.sqrt_abs_det])

    def gram(self, r: int) -> np.ndarray:
        """Matrix of basis scalar products ``theta^I . theta^J`` for grade r."""
        if r not in self._gram:
            basis = BASIS[r]
            m = np.ones((len(basis), len(basis)))
            if r > 0:
                for i, I in enumerate(basis):
                    for j, J in enumerate(basis):
                        m[i, j] = np.linalg.det(self.g_inv[np.ix_(I, J)])
            m.setflags(write=False)
            self._gram[r] = m
        return self._gram[r]

    def raise_tensor(self, t: np.ndarray) -> np.ndarray:
        """Raise every index of a covariant component array."""
        out = np.asarray(t, dtype=float)
        for axis in range(out.ndim):
            out = np.moveaxis(np.tensordot(self.g_inv, out, axes=([1], [axis])), 0, axis)
        return out

    def lower_vector(self, vec) -> np.ndarray:
        return self.g @ np.asarray(vec, dtype=float)

    def raise_one_form(self, a: KVector) -> np.ndarray:
        if a.grade != 1:
            raise ValueError("grade mismatch")
        return self.g_inv @ a.components


def one_form(components) -> KVector:
    return KVector(1, components)


def inner(a: KVector, b: KVector, m: MetricAtPoint) -> float:
    """Scalar product of equal-grade forms (Gram determinant on blades)."""
    if a.grade != b.grade:
        raise ValueError("grade mismatch")
    return float(a.components @ m.gram(a.grade) @ b.components)


def contract_left(a: KVector, b: KVector, m: MetricAtPoint) -> KVector:
    """Left contraction ``a _| b``, lowering grade from s to s - r.

    Defined by ``(a _| b) . c = b . (reversion(a) ^ c)``; for a 1-form this is
    the usual interior product ``(a _| b)_J = a^i b_{iJ}``.
    """
    r, s = a.grade, b.grade
    if r > s:
        return KVector.zero(0, GRADE_UNDERFLOW)
    if r == 0:
        return b * a.components[0]
    ra = m.raise_tensor(to_tensor(reversion(a)))
    t = np.tensordot(ra, to_tensor(b), axes=r) / math.factorial(r)
    return from_tensor(t, s - r)


def contract_right(b: KVector, a: KVector, m: MetricAtPoint) -> KVector:
    """Right contraction ``b |_ a`` by a 1-form, ``(-1)^(s+1) a _| b``.

    For 2-forms this gives ``b |_ a = -(a _| b)``, the sign relation used for
    the excitation jump condition.
    """
    if a.grade != 1:
        raise ValueError("right contraction is defined for a 1-form argument")
    s = b.grade
    if s == 0:
        return KVector.zero(0, GRADE_UNDERFLOW)
    return contract_left(a, b, m) * (-1) ** (s + 1)


def hodge(a: KVector, m: MetricAtPoint) -> KVector:
    """Hodge dual from the raised components and the Levi-Civita symbol.

    ``(*a)_{nu_{p+1}..nu_4} = (1/p!) sqrt|g| a^{nu_1..nu_p} eps_{nu_1..nu_4}``.
    """
    p = a.grade
    raised = m.raise_tensor(to_tensor(a))
    t = np.tensordot(raised, LEVI_CIVITA, axes=p) / math.factorial(p)
    t = t * (m.orientation * m.sqrt_abs_det)
    return from_tensor(t, DIM - p)


def hodge_inverse(a: KVector, m: MetricAtPoint) -> KVector:
    q = a.grade
    return hodge(a, m) * ((-1) ** (q * (DIM - q)) * m.sign_det)


def hodge_via_volume(a: KVector, m: MetricAtPoint) -> KVector:
    """``reversion(a) _| tau``; an independent route to the Hodge dual."""
    return contract_left(reversion(a), m.volume(), m)


@dataclass(frozen=True)
class ChartFieldSampler:
    """A form field of fixed grade given in a chart's natural cobasis.

    ``field`` maps a 4-coordinate point to a :class:`KVector`; ``metric``
    (optional for metric-free operations) maps it to a :class:`MetricAtPoint`.
    """

    field: Callable[[np.ndarray], KVector]
    grade: int
    metric: Optional[Callable[[np.ndarray], MetricAtPoint]] = None

    def __call__(self, point) -> KVector:
        value = self.field(np.asarray(point, dtype=float))
        if value.grade != self.grade:
            raise ValueError(f"sampler returned grade {value.grade}, expected {self.grade}")
        return value

    def metric_at(self, point) -> MetricAtPoint:
        if self.metric is None:
            raise ValueError("sampler has no metric")
        return self.metric(np.asarray(point, dtype=float))

    def map(self, fn: Callable[[KVector, np.ndarray], KVector], grade: int) -> "ChartFieldSampler":
        """Pointwise transform, e.g. the Hodge dual at each point."""
        return ChartFieldSampler(lambda x: fn(self(x), x), grade, self.metric)

    def dual(self) -> "ChartFieldSampler":
        return self.map(lambda a, x: hodge(a, self.metric_at(x)), DIM - self.grade)


def _partials(sampler: ChartFieldSampler, point: np.ndarray, h: float) -> np.ndarray:
    """``out[mu, k]``: d/dx^mu of canonical component k, central differences."""
    out = []
    for mu in range(DIM):
        step = np.zeros(DIM)
        step[mu] = h
        hi = sampler(point + step).components
        lo = sampler(point - step).components
        out.append((hi - lo) / (2.0 * h))
    return np.array(out)


def exterior_derivative(sampler: ChartFieldSampler, point, h: float = 1e-4) -> KVector:
    """Numeric ``d`` of a form field at ``point``.

    ``(d a)_{k_0..k_r} = sum_j (-1)^j d_{k_j} a_{k_0..^k_j..k_r}`` with each
    partial taken by a central difference of step ``h`` (error O(h^2)).
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    r = sampler.grade
    if r == DIM:
        return KVector.zero(DIM, DEGREE_OVERFLOW)
    point = np.asarray(point, dtype=float)
    partials = _partials(sampler, point, h)
    out = np.zeros(math.comb(DIM, r + 1))
    for k, K in enumerate(BASIS[r + 1]):
        total = 0.0
        for j, mu in enumerate(K):
            rest = K[:j] + K[j + 1:]
            total += (-1) ** j * partials[mu, INDEX[r][rest]]
        out[k] = total
    return KVector(r + 1, out)


def derivative_sampler(sampler: ChartFieldSampler, h: float = 1e-4) -> ChartFieldSampler:
    """The field ``d(sampler)`` as a sampler, for nested application."""
    return ChartFieldSampler(
        lambda x: exterior_derivative(sampler, x, h), sampler.grade + 1, sampler.metric
    )


def divergence_residual(
    field: ChartFieldSampler,
    current: ChartFieldSampler,
    point,
    h: float = 1e-4,
) -> np.ndarray:
    """Residuals ``(1/sqrt|g|) d_mu(sqrt|g| F^{mu nu}) - J^nu`` for nu = 0..3.

    ``field`` supplies contravariant components ``F^{mu nu}`` in canonical
    storage, ``current`` the components ``J^nu``; the metric comes from
    ``field.metric``.
    """
    if not h > 0:
        raise ValueError("step h must be positive")
    if field.grade != 2 or current.grade != 1:
        raise ValueError("expected a grade-2 field and a grade-1 current")
    point = np.asarray(point, dtype=float)

    def density(x):
        return field.metric_at(x).sqrt_abs_det * to_tensor(field(x))

    div = np.zeros(DIM)
    for mu in range(DIM):
        step = np.zeros(DIM)
        step[mu] = h
        div += (density(point + step)[mu] - density(point - step)[mu]) / (2.0 * h)
    return div / field.metric_at(point).sqrt_abs_det - current(point).components
