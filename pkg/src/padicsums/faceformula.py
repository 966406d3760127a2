"""Certified evaluation of the face-decomposition identity.

For a prime p and exponent m the right-hand side is

    (1 - 1/p)^n * sum over faces tau of ( A(p,m,tau) + E(p,f_tau) B(p,m,tau) )

where A sums p^{-nu(k)} over the fiber {F(k) = tau, N(k) >= m} and B over
{F(k) = tau, N(k) = m-1}.  A and B are accumulated as exact rationals over
all lattice points with nu(k) <= T; the single truncation certificate

    tail(T) = (1 - 1/p)^{-n} - sum_{s<=T} C(s+n-1, n-1) p^{-s}

bounds the total omitted mass across every face and both sums at once, so
|exact - assembled| <= (1-1/p)^n * tail * (1 + max|E|) plus the float budgets
of the torus sums.  The left-hand side for comparison is the brute-force
complete sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import BudgetExceeded, WorkBudgetExceeded
from .newton import (
    DEFAULT_POINT_CAP,
    Face,
    NewtonPolyhedron,
    build_polyhedron,
    enumerate_faces,
    enumerate_lattice_points,
    frac_str,
    sigma_data,
)
from .poly import ExponentVector, Polynomial
from .sums import (
    DEFAULT_WORK_BUDGET,
    KERNEL_EPS,
    NondegReport,
    SumValue,
    brute_force_S,
    check_nondegenerate_mod_p,
    torus_E,
)

EpsLike = Union[Fraction, float, int, str]


@dataclass(frozen=True)
class ConeSumResult:
    """Truncated A and B for one face, with the shared exact tail certificate."""

    face_id: int
    A_partial: Fraction
    B_partial: Fraction
    truncation_T: int
    tail: Fraction


@dataclass(frozen=True)
class FormulaReport:
    p: int
    m: int
    lhs: Optional[SumValue]
    rhs: Optional[SumValue]
    certified_tolerance: Optional[float]
    verdict: str  # pass | fail | not-applicable | budget-exceeded
    nondeg: NondegReport
    truncation_T: Optional[int]
    tail: Optional[Fraction]

    def to_json_row(self) -> dict:
        def side(v: Optional[SumValue]):
            return None if v is None else {"re": v.value.real, "im": v.value.imag}

        return {
            "p": self.p,
            "m": self.m,
            "lhs": side(self.lhs),
            "rhs": side(self.rhs),
            "tol": self.certified_tolerance,
            "verdict": self.verdict,
            "T": self.truncation_T,
            "tail": None if self.tail is None else frac_str(self.tail),
        }


# ---------------------------------------------------------------------------
# truncation certificate and cone sums
# ---------------------------------------------------------------------------

def truncation_level(p: int, n: int, eps: EpsLike) -> Tuple[int, Fraction]:
    """Smallest T with tail(T) <= eps, and that exact tail.

    The full mass sum_{k in N^n} p^{-nu(k)} equals (1-1/p)^{-n}; levels
    nu = s carry C(s+n-1, n-1) points of weight p^{-s} each.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    total = (1 - Fraction(1, p)) ** (-n)
    partial = Fraction(0)
    T = 0
    while True:
        partial += comb(T + n - 1, n - 1) * Fraction(1, p) ** T
        tail = total - partial
        if tail <= eps:
            return T, tail
        T += 1


def cone_sums_multi(
    P: NewtonPolyhedron,
    p: int,
    ms: Sequence[int],
    eps: EpsLike,
    *,
    point_cap: int = DEFAULT_POINT_CAP,
) -> Tuple[Dict[int, List[ConeSumResult]], int, Fraction]:
    """A(p,m,tau) and B(p,m,tau) for every face and every requested m in one
    shared lattice-enumeration pass (classification dominates, so sharing it
    across m values is nearly free)."""
    for m in ms:
        if m < 0:
            raise ValueError("m must be >= 0")
    T, tail = truncation_level(p, P.n, eps)
    faces = enumerate_faces(P)
    # (face, N, nu) -> count; collapsing equal-weight points first keeps the
    # exact-rational work proportional to the profile, not the point count.
    counts: Dict[int, Dict[Tuple[int, int], int]] = {f.id: {} for f in faces}
    for pt in enumerate_lattice_points(P, T, point_cap=point_cap):
        cell = counts[pt.face_id]
        key = (pt.N, pt.nu)
        cell[key] = cell.get(key, 0) + 1
    scale = p ** T
    out: Dict[int, List[ConeSumResult]] = {}
    for m in ms:
        rows = []
        for face in faces:
            a_num = 0
            b_num = 0
            for (N, nu), cnt in counts[face.id].items():
                if N >= m:
                    a_num += cnt * p ** (T - nu)
                elif N == m - 1:
                    b_num += cnt * p ** (T - nu)
            rows.append(
                ConeSumResult(
                    face_id=face.id,
                    A_partial=Fraction(a_num, scale),
                    B_partial=Fraction(b_num, scale),
                    truncation_T=T,
                    tail=tail,
                )
            )
        out[m] = rows
    return out, T, tail


def cone_sums(
    P: NewtonPolyhedron,
    p: int,
    m: int,
    eps: EpsLike,
    *,
    point_cap: int = DEFAULT_POINT_CAP,
) -> List[ConeSumResult]:
    """Per-face truncated A and B for a single m."""
    per_m, _, _ = cone_sums_multi(P, p, [m], eps, point_cap=point_cap)
    return per_m[m]


# ---------------------------------------------------------------------------
# right-hand-side assembly
# ---------------------------------------------------------------------------

def _torus_values(
    faces: Sequence[Face],
    p: int,
    *,
    workers: int,
    work_budget: int,
    needed: Optional[Iterable[int]] = None,
) -> Dict[int, SumValue]:
    """E(p, f_tau) per face id, memoized across faces sharing a restriction."""
    wanted = set(needed) if needed is not None else {f.id for f in faces}
    memo: Dict[Tuple[Tuple[ExponentVector, int], ...], SumValue] = {}
    out: Dict[int, SumValue] = {}
    for face in faces:
        if face.id not in wanted:
            continue
        key = tuple(sorted(face.restriction.terms.items()))
        if key not in memo:
            memo[key] = torus_E(face.restriction, p, workers=workers, work_budget=work_budget)
        out[face.id] = memo[key]
    return out


def _assemble(
    P: NewtonPolyhedron,
    p: int,
    rows: Sequence[ConeSumResult],
    e_values: Dict[int, SumValue],
    tail: Fraction,
) -> SumValue:
    factor = (1 - Fraction(1, p)) ** P.n
    a_total = Fraction(0)
    eb_total = 0j
    e_budget = 0.0
    term_count = len(rows)
    for row in rows:
        a_total += row.A_partial
        if row.B_partial:
            ev = e_values[row.face_id]
            eb_total += float(row.B_partial) * ev.value
            e_budget += float(row.B_partial) * ev.abs_error_budget
            term_count += ev.term_count
    ffac = float(factor)
    value = float(factor * a_total) + ffac * eb_total
    # |E| <= 1, so 2 bounds (1 + max|E|) over every omitted fiber point.
    budget = float(factor * tail) * 2.0 + ffac * e_budget + KERNEL_EPS * len(rows)
    return SumValue(value, budget, term_count)


def rhs_assembly(
    f: Polynomial,
    p: int,
    m: int,
    eps: EpsLike,
    *,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    point_cap: int = DEFAULT_POINT_CAP,
) -> SumValue:
    """Assembled right-hand side of the face decomposition at (p, m).

    The caller is responsible for having verified (or explicitly waived)
    mod-p nondegeneracy; this function only computes the sum.
    """
    P = build_polyhedron(f)
    faces = enumerate_faces(P)
    per_m, _, tail = cone_sums_multi(P, p, [m], eps, point_cap=point_cap)
    rows = per_m[m]
    needed = [r.face_id for r in rows if r.B_partial]
    e_values = _torus_values(faces, p, workers=workers, work_budget=work_budget, needed=needed)
    return _assemble(P, p, rows, e_values, tail)


# ---------------------------------------------------------------------------
# verification scan
# ---------------------------------------------------------------------------

def verify_formula(
    f: Polynomial,
    p: int,
    m_range: Sequence[int],
    eps: EpsLike = Fraction(1, 10 ** 8),
    *,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    point_cap: int = DEFAULT_POINT_CAP,
    report_when_degenerate: bool = False,
) -> List[FormulaReport]:
    """Compare brute force against the assembled right-hand side for each m.

    When any face fails the mod-p nondegeneracy certificate the identity is
    not asserted: rows carry the verdict "not-applicable" (both sides are
    still reported for inspection when report_when_degenerate is set).
    Budget overruns are recorded per row without aborting the scan.
    """
    ms = sorted(set(int(m) for m in m_range))
    if any(m < 1 for m in ms):
        raise ValueError("m values must be >= 1")
    P = build_polyhedron(f)
    faces = enumerate_faces(P)
    nondeg = check_nondegenerate_mod_p(f, faces, p, work_budget=work_budget)

    if not nondeg.passed and not report_when_degenerate:
        return [
            FormulaReport(
                p=p, m=m, lhs=None, rhs=None, certified_tolerance=None,
                verdict="not-applicable", nondeg=nondeg, truncation_T=None, tail=None,
            )
            for m in ms
        ]

    reports: List[FormulaReport] = []
    try:
        per_m, T, tail = cone_sums_multi(P, p, ms, eps, point_cap=point_cap)
        needed = {r.face_id for rows in per_m.values() for r in rows if r.B_partial}
        e_values = _torus_values(
            faces, p, workers=workers, work_budget=work_budget, needed=needed
        )
    except (BudgetExceeded, WorkBudgetExceeded):
        return [
            FormulaReport(
                p=p, m=m, lhs=None, rhs=None, certified_tolerance=None,
                verdict="budget-exceeded", nondeg=nondeg, truncation_T=None, tail=None,
            )
            for m in ms
        ]

    for m in ms:
        try:
            lhs = brute_force_S(f, p, m, workers=workers, work_budget=work_budget)
        except WorkBudgetExceeded:
            reports.append(
                FormulaReport(
                    p=p, m=m, lhs=None, rhs=None, certified_tolerance=None,
                    verdict="budget-exceeded", nondeg=nondeg, truncation_T=T, tail=tail,
                )
            )
            continue
        rhs = _assemble(P, p, per_m[m], e_values, tail)
        tol = lhs.abs_error_budget + rhs.abs_error_budget
        if not nondeg.passed:
            verdict = "not-applicable"
        else:
            verdict = "pass" if abs(lhs.value - rhs.value) <= tol else "fail"
        reports.append(
            FormulaReport(
                p=p, m=m, lhs=lhs, rhs=rhs, certified_tolerance=tol,
                verdict=verdict, nondeg=nondeg, truncation_T=T, tail=tail,
            )
        )
    return reports


# ---------------------------------------------------------------------------
# empirical cone-sum growth monitor
# ---------------------------------------------------------------------------

def ab_ratio_monitor(
    P: NewtonPolyhedron,
    p: int,
    m_max: int,
    eps: EpsLike = Fraction(1, 10 ** 8),
    *,
    point_cap: int = DEFAULT_POINT_CAP,
) -> List[dict]:
    """Per-face suprema over 1 <= m <= m_max of the normalized cone sums

        A(p,m,tau) p^{m sigma} / m^{kappa-1}   and
        B(p,m,tau) p^{m sigma - sigma(f_tau)} / m^{kappa-1}.

    These are monitored (reported, never asserted): the theory provides an
    eventual constant bound, not a certified value at desk scale.
    """
    sig = sigma_data(P)
    faces = enumerate_faces(P)
    ms = list(range(1, m_max + 1))
    per_m, _, _ = cone_sums_multi(P, p, ms, eps, point_cap=point_cap)
    sup_a = {f.id: 0.0 for f in faces}
    sup_b = {f.id: 0.0 for f in faces}
    sigma = float(sig.sigma)
    for m in ms:
        weight = float(m) ** (sig.kappa - 1)
        for row in per_m[m]:
            face = faces[row.face_id]
            a_ratio = float(row.A_partial) * p ** (m * sigma) / weight
            b_ratio = (
                float(row.B_partial)
                * p ** (m * sigma - float(face.sigma_tau))
                / weight
            )
            sup_a[row.face_id] = max(sup_a[row.face_id], a_ratio)
            sup_b[row.face_id] = max(sup_b[row.face_id], b_ratio)
    return [
        {"face_id": f.id, "sup_A_ratio": sup_a[f.id], "sup_B_ratio": sup_b[f.id]}
        for f in faces
    ]
