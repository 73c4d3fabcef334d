"""Seeded random property suite for the exterior algebra and the media relations.

Each check draws ``cases`` random inputs over random Lorentzian metrics and
records the worst relative error together with the inputs that produced it,
so a failure can be replayed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import exterior as ex
from .exterior import KVector, MetricAtPoint
from .media import (
    FrameVelocity,
    MediumParams,
    assemble_field,
    constitutive_component_checks,
    constitutive_minkowski,
    constitutive_via_split,
    split_fields,
    vacuum_chi,
)

DEFAULT_TOL = 1e-10
ETA_DIAG = np.diag([1.0, -1.0, -1.0, -1.0])


def random_lorentzian_metric(rng: np.random.Generator, max_cond: float = 10.0) -> MetricAtPoint:
    """``A^T eta A`` with ``A`` random and ``cond(A)**2 <= max_cond``."""
    q1, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    q2, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    s = rng.uniform(1.0, np.sqrt(max_cond), size=4)
    A = q1 @ np.diag(s) @ q2
    g = A.T @ ETA_DIAG @ A
    return MetricAtPoint(0.5 * (g + g.T))


def random_form(rng: np.random.Generator, grade: int) -> KVector:
    return KVector(grade, rng.normal(size=len(ex.BASIS[grade])))


def random_frame(rng: np.random.Generator, m: MetricAtPoint) -> FrameVelocity:
    """Random unit future-pointing timelike frame for the metric ``m``."""
    # tilt the timelike eigenvector of g; time orientation is taken as V^0 > 0
    w, vecs = np.linalg.eigh(m.g)
    n = vecs[:, np.argmax(w)]
    for _ in range(100):
        V = n + 0.3 * rng.normal(size=4)
        V = V if V[0] > 0 else -V
        norm2 = V @ m.g @ V
        if norm2 > 0 and V[0] > 1e-3:
            v = KVector(1, m.g @ V) / np.sqrt(norm2)
            # renormalize on the covector side so the frame check sees < 1e-12
            v = v / np.sqrt(ex.inner(v, v, m))
            return FrameVelocity(v, m)
    raise RuntimeError("could not draw a timelike frame")


def random_medium(rng: np.random.Generator) -> MediumParams:
    return MediumParams(float(rng.uniform(0.5, 10.0)), float(rng.uniform(0.5, 5.0)))


def rel_err(lhs, rhs) -> float:
    a = np.atleast_1d(lhs.components if isinstance(lhs, KVector) else np.asarray(lhs, dtype=float))
    b = np.atleast_1d(rhs.components if isinstance(rhs, KVector) else np.asarray(rhs, dtype=float))
    scale = max(float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    diff = float(np.max(np.abs(a - b), initial=0.0))
    if scale == 0.0:
        return diff
    return diff / scale


def _grades_le(rng, total: int = 4) -> tuple[int, int]:
    while True:
        r, s = rng.integers(0, 5, size=2)
        if r + s <= total:
            return int(r), int(s)


@dataclass
class Ops:
    """Operator table the suite checks; swapped out for fault injection in tests."""

    hodge: Callable = ex.hodge
    wedge: Callable = ex.wedge
    contract_left: Callable = ex.contract_left
    inner: Callable = ex.inner


@dataclass
class IdentityResult:
    name: str
    label: str
    max_error: float
    tolerance: float
    cases: int
    worst_case: Optional[dict] = None
    enforced: bool = True

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance


def _case(metric: MetricAtPoint, **forms) -> dict:
    out = {"metric": metric.g.tolist()}
    for k, v in forms.items():
        if isinstance(v, KVector):
            out[k] = {"grade": v.grade, "components": v.components.tolist()}
        else:
            out[k] = v
    return out


def _check_leibniz(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    while True:
        r, s = _grades_le(rng)
        if r >= 1 and s >= 1:
            break
    a, A, B = random_form(rng, 1), random_form(rng, r), random_form(rng, s)
    lhs = ops.contract_left(a, ops.wedge(A, B), m)
    rhs = ops.wedge(ops.contract_left(a, A, m), B) + ops.wedge(
        ex.grade_involution(A), ops.contract_left(a, B, m)
    )
    return rel_err(lhs, rhs), _case(m, a=a, A=A, B=B)


def _check_wedge_star_symmetric(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    r = int(rng.integers(0, 5))
    A, B = random_form(rng, r), random_form(rng, r)
    return rel_err(ops.wedge(A, ops.hodge(B, m)), ops.wedge(B, ops.hodge(A, m))), _case(m, A=A, B=B)


def _dot_star(rng, ops: Ops, corrected: bool):
    m = random_lorentzian_metric(rng)
    r = int(rng.integers(0, 5))
    s = 4 - r
    A, B = random_form(rng, r), random_form(rng, s)
    lhs = ops.inner(A, ops.hodge(B, m), m)
    rhs = ops.inner(B, ops.hodge(A, m), m)
    if corrected:
        rhs *= (-1) ** (r * s)
    return rel_err(lhs, rhs), _case(m, A=A, B=B)


def _check_wedge_star_contract(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    while True:
        r, s = (int(x) for x in rng.integers(0, 5, size=2))
        if r <= s:
            break
    A, B = random_form(rng, r), random_form(rng, s)
    lhs = ops.wedge(A, ops.hodge(B, m))
    rhs = ops.hodge(ops.contract_left(ex.reversion(A), B, m), m) * (-1) ** (r * (s - 1))
    return rel_err(lhs, rhs), _case(m, A=A, B=B)


def _check_contract_star_wedge(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    r, s = _grades_le(rng)
    A, B = random_form(rng, r), random_form(rng, s)
    lhs = ops.contract_left(A, ops.hodge(B, m), m)
    rhs = ops.hodge(ops.wedge(ex.reversion(A), B), m) * (-1) ** (r * s)
    return rel_err(lhs, rhs), _case(m, A=A, B=B)


def _check_star_volume(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    r = int(rng.integers(0, 5))
    A = random_form(rng, r)
    return rel_err(ops.hodge(A, m), ops.contract_left(ex.reversion(A), m.volume(), m)), _case(m, A=A)


def _check_star_tau(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    e1 = rel_err(ops.hodge(m.volume(), m), KVector.scalar(m.sign_det))
    e2 = rel_err(ops.hodge(KVector.scalar(1.0), m), m.volume())
    return max(e1, e2), _case(m)


def _check_double_star(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    r = int(rng.integers(0, 5))
    A = random_form(rng, r)
    expected = A * ((-1) ** (r * (4 - r)) * m.sign_det)
    return rel_err(ops.hodge(ops.hodge(A, m), m), expected), _case(m, A=A)


def _check_constitutive(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    v = random_frame(rng, m)
    med = random_medium(rng)
    F = random_form(rng, 2)
    G = constitutive_minkowski(F, v, med)
    err = rel_err(G, constitutive_via_split(F, v, med))
    e1, e2 = constitutive_component_checks(F, G, v, med)
    # residuals are relative to the size of the terms they difference
    size = max(np.max(np.abs(F.components)), np.max(np.abs(G.components)))
    size *= max(med.epsilon, med.mu, 1.0) * max(np.max(np.abs(v.vector)), np.max(np.abs(v.v.components)))
    err = max(err, float(np.max(np.abs(e1)) / size), float(np.max(np.abs(e2)) / size))
    return err, _case(m, F=F, v=v.v, epsilon=med.epsilon, mu=med.mu)


def _check_split_roundtrip(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    v = random_frame(rng, m)
    F, G = random_form(rng, 2), random_form(rng, 2)
    s = split_fields(F, G, v)
    F2 = assemble_field(v, s.E, s.B)
    G2 = assemble_field(v, s.D, s.H)
    return max(rel_err(F, F2), rel_err(G, G2)), _case(m, F=F, G=G, v=v.v)


def _check_chi(rng, ops: Ops):
    m = random_lorentzian_metric(rng)
    chi = vacuum_chi(m)
    sym = max(
        float(np.max(np.abs(chi + chi.transpose(1, 0, 2, 3)))),
        float(np.max(np.abs(chi + chi.transpose(0, 1, 3, 2)))),
        float(np.max(np.abs(chi - chi.transpose(1, 0, 3, 2)))),
    )
    F = random_form(rng, 2)
    raised = m.raise_tensor(ex.to_tensor(F))
    contracted = 0.5 * np.einsum("mnab,ab->mn", chi, ex.to_tensor(F))
    return max(sym, rel_err(raised, contracted)), _case(m, F=F)


# (name, label, check, enforced)
CHECKS: tuple = (
    ("leibniz", "a_|(A^B) = (a_|A)^B + A^ ^ (a_|B)", _check_leibniz, True),
    ("hodge.1", "A^*B = B^*A  (r = s)", _check_wedge_star_symmetric, True),
    ("hodge.2", "A.*B = (-1)^{r(n-r)} B.*A  (r + s = n)", lambda g, o: _dot_star(g, o, True), True),
    ("hodge.2-printed", "A.*B = B.*A  (r + s = n, as printed)", lambda g, o: _dot_star(g, o, False), False),
    ("hodge.3", "A^*B = (-1)^{r(s-1)} *(~A _| B)  (r <= s)", _check_wedge_star_contract, True),
    ("hodge.4", "A_|*B = (-1)^{rs} *(~A ^ B)  (r + s <= n)", _check_contract_star_wedge, True),
    ("hodge.5", "*A = ~A _| tau", _check_star_volume, True),
    ("hodge.6", "*tau = sgn det g; *1 = tau", _check_star_tau, True),
    ("double-star", "**A = (-1)^{r(n-r)} sgn(det g) A", _check_double_star, True),
    ("constitutive", "Minkowski relation = split construction; component checks", _check_constitutive, True),
    ("split-roundtrip", "assemble(split(F)) = F", _check_split_roundtrip, True),
    ("vacuum-chi", "chi symmetries; 1/2 chi(F) = raised F", _check_chi, True),
)


@dataclass
class SuiteReport:
    seed: int
    cases: int
    results: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if r.enforced)

    def failures(self) -> list:
        return [r for r in self.results if r.enforced and not r.passed]


def run_suite(
    seed: int,
    cases: int,
    ops: Optional[Ops] = None,
    tol: float = DEFAULT_TOL,
    only: Optional[set] = None,
) -> SuiteReport:
    """Run every check ``cases`` times from a generator seeded with ``seed``."""
    if cases < 1:
        raise ValueError("cases must be >= 1")
    ops = ops or Ops()
    report = SuiteReport(seed=seed, cases=cases)
    start = time.perf_counter()
    for k, (name, label, check, enforced) in enumerate(CHECKS):
        if only is not None and name not in only:
            continue
        rng = np.random.default_rng([seed, k])
        worst, worst_case = 0.0, None
        for _ in range(cases):
            err, case = check(rng, ops)
            if not np.isfinite(err):
                err = float("inf")
            if err > worst or worst_case is None:
                worst, worst_case = err, case
        report.results.append(IdentityResult(name, label, worst, tol, cases, worst_case, enforced))
    report.elapsed = time.perf_counter() - start
    return report
