"""Inequality verification and empirical decay tables.

Everything polyhedral is checked with exact rationals: the lattice lower
bound nu(k) >= sigma (N(k)+1) - sigma(f_tau) is a hard assertion over every
enumerated point, while the classical variant that subtracts
(dim tau + 1)/2 instead is only a findings generator (it is known to fail
without an extra vertex hypothesis).  Decay exponents of the torus sums are
fitted empirically and reported next to the two theoretical predictions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    DegenerateSampling,
    HypothesisUnmet,
    InsufficientPrimes,
    WorkBudgetExceeded,
)
from .newton import (
    DEFAULT_POINT_CAP,
    build_polyhedron,
    enumerate_faces,
    enumerate_lattice_points,
    sigma_data,
)
from .poly import ExponentVector, Polynomial, homogeneity
from .sums import (
    DEFAULT_WORK_BUDGET,
    brute_force_S,
    check_nondegenerate_mod_p,
    torus_E,
)


# ---------------------------------------------------------------------------
# lattice inequality scan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NuCheckRecord:
    k: ExponentVector
    face_id: int
    nu: int
    N: int
    rhs_main: Fraction       # sigma (N+1) - sigma(f_tau)
    rhs_halfdim: Fraction    # sigma (N+1) - (dim tau + 1)/2
    main_ok: bool
    halfdim_ok: bool


@dataclass(frozen=True)
class NuCheckFindings:
    T: int
    points_checked: int
    main_violations: Tuple[NuCheckRecord, ...]     # expected empty, hard assertion
    halfdim_violations: Tuple[NuCheckRecord, ...]  # findings only


def check_nu_inequality(
    f: Polynomial,
    T: int,
    *,
    point_cap: int = DEFAULT_POINT_CAP,
) -> NuCheckFindings:
    """Evaluate both lattice lower bounds for every k with nu(k) <= T.

    Exact rational arithmetic throughout; the per-face data (sigma(f_tau),
    dim tau) comes from the enumerated face lattice.
    """
    P = build_polyhedron(f)
    faces = enumerate_faces(P)
    sigma = sigma_data(P).sigma
    rhs_tau: Dict[int, Tuple[Fraction, Fraction]] = {
        face.id: (face.sigma_tau, Fraction(face.dim + 1, 2)) for face in faces
    }
    main_bad: List[NuCheckRecord] = []
    half_bad: List[NuCheckRecord] = []
    count = 0
    for pt in enumerate_lattice_points(P, T, point_cap=point_cap):
        count += 1
        sig_tau, half = rhs_tau[pt.face_id]
        rhs_main = sigma * (pt.N + 1) - sig_tau
        rhs_half = sigma * (pt.N + 1) - half
        main_ok = pt.nu >= rhs_main
        half_ok = pt.nu >= rhs_half
        if main_ok and half_ok:
            continue
        rec = NuCheckRecord(
            k=pt.k, face_id=pt.face_id, nu=pt.nu, N=pt.N,
            rhs_main=rhs_main, rhs_halfdim=rhs_half,
            main_ok=main_ok, halfdim_ok=half_ok,
        )
        if not main_ok:
            main_bad.append(rec)
        if not half_ok:
            half_bad.append(rec)
    return NuCheckFindings(
        T=T,
        points_checked=count,
        main_violations=tuple(main_bad),
        halfdim_violations=tuple(half_bad),
    )


def nu_record_to_dict(rec: NuCheckRecord) -> dict:
    from .newton import frac_str

    return {
        "k": list(rec.k),
        "face_id": rec.face_id,
        "nu": rec.nu,
        "N": rec.N,
        "rhs_main": frac_str(rec.rhs_main),
        "rhs_halfdim": frac_str(rec.rhs_halfdim),
        "main_ok": rec.main_ok,
        "halfdim_ok": rec.halfdim_ok,
    }


# ---------------------------------------------------------------------------
# convexity sampler
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexitySampleReport:
    face_id: int
    trials: int
    accepted: int
    passed: bool
    counterexample: Optional[dict] = None


def convexity_sampler(
    f: Polynomial,
    face_id: int,
    trials: int,
    seed: int,
) -> ConvexitySampleReport:
    """Randomized exact check of the diagonal-domination inequalities.

    Samples rational points R_j on the face (convex combinations of its
    vertices plus nonnegative multiples of its recession axes) and weights
    beta_j >= 0; whenever sum beta_j R_j <= (1/sigma, ..., 1/sigma) holds
    componentwise it asserts, with exact rationals,

        sum beta_j <= 1    and    sum beta_j <= sigma(f_tau) / sigma.

    Hypothesis-rejecting samples are discarded; DegenerateSampling fires when
    fewer than trials/10 samples satisfy the hypothesis.
    """
    P = build_polyhedron(f)
    faces = enumerate_faces(P)
    if not 0 <= face_id < len(faces):
        raise ValueError(f"no face with id {face_id}")
    tau = faces[face_id]
    sig = sigma_data(P)
    t_star = sig.t_star
    bound = tau.sigma_tau / sig.sigma
    verts = [P.vertices[i] for i in tau.vertex_ids]
    rng = random.Random(seed)

    accepted = 0
    for _ in range(trials):
        npts = rng.randint(1, 3)
        points: List[Tuple[Fraction, ...]] = []
        for _ in range(npts):
            weights = [rng.randint(0, 4) for _ in verts]
            if not any(weights):
                weights[rng.randrange(len(verts))] = 1
            wsum = sum(weights)
            coord = [Fraction(0)] * P.n
            for w, v in zip(weights, verts):
                for i, vi in enumerate(v):
                    coord[i] += Fraction(w, wsum) * vi
            for a in tau.recession_axes:
                coord[a] += Fraction(rng.randint(0, 8), 4)
            points.append(tuple(coord))
        betas = []
        for pt in points:
            if rng.random() < 0.5:
                betas.append(Fraction(rng.randint(0, 32), 16))
            else:
                peak = max(pt)
                betas.append(
                    Fraction(rng.randint(0, 16), 16) * t_star / (1 + peak)
                )
        combo = [
            sum(b * pt[i] for b, pt in zip(betas, points)) for i in range(P.n)
        ]
        if any(c > t_star for c in combo):
            continue
        accepted += 1
        total = sum(betas)
        if total > 1 or total > bound:
            return ConvexitySampleReport(
                face_id=face_id,
                trials=trials,
                accepted=accepted,
                passed=False,
                counterexample={
                    "points": [[str(c) for c in pt] for pt in points],
                    "betas": [str(b) for b in betas],
                    "beta_sum": str(total),
                    "bound": str(min(Fraction(1), bound)),
                },
            )
    if accepted < trials / 10:
        raise DegenerateSampling(
            f"only {accepted} of {trials} samples satisfied the hypothesis"
        )
    return ConvexitySampleReport(
        face_id=face_id, trials=trials, accepted=accepted, passed=True
    )


# ---------------------------------------------------------------------------
# main-bound ratio table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatioCell:
    p: int
    m: int
    abs_S: float
    error_budget: float
    ratio_main: float   # |S| p^{sigma m} / m^{kappa-1}
    ratio_coarse: float  # |S| p^{sigma m} / m^{n-1}


@dataclass
class RatioTable:
    sigma: Fraction
    kappa: int
    hypothesis_met: bool
    rows: List[RatioCell] = field(default_factory=list)
    errors: List[Tuple[int, int, str]] = field(default_factory=list)
    findings: List[RatioCell] = field(default_factory=list)

    @property
    def estimated_c(self) -> float:
        return max((r.ratio_main for r in self.rows), default=0.0)


def bound_ratio_table(
    f: Polynomial,
    primes: Sequence[int],
    m_range: Sequence[int],
    *,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
    ratio_ceiling: Optional[float] = None,
) -> RatioTable:
    """|S_f(p^m)| with the two normalizations of the decay bound.

    The main bound presumes a homogeneous f; non-homogeneous input still
    produces the table but is flagged hypothesis_met=False.  Budget errors
    are recorded per cell and the scan continues.  Cells whose main ratio
    exceeds ratio_ceiling are findings, never failures: the bounding constant
    is existential.
    """
    P = build_polyhedron(f)
    sig = sigma_data(P)
    table = RatioTable(
        sigma=sig.sigma,
        kappa=sig.kappa,
        hypothesis_met=homogeneity(f) is not None,
    )
    sigma = float(sig.sigma)
    for p in sorted(set(primes)):
        for m in sorted(set(m_range)):
            try:
                s = brute_force_S(f, p, m, workers=workers, work_budget=work_budget)
            except WorkBudgetExceeded as exc:
                table.errors.append((p, m, str(exc)))
                continue
            abs_s = abs(s.value)
            growth = p ** (sigma * m)
            cell = RatioCell(
                p=p,
                m=m,
                abs_S=abs_s,
                error_budget=s.abs_error_budget,
                ratio_main=abs_s * growth / m ** (sig.kappa - 1),
                ratio_coarse=abs_s * growth / m ** (f.n - 1),
            )
            table.rows.append(cell)
            if ratio_ceiling is not None and cell.ratio_main > ratio_ceiling:
                table.findings.append(cell)
    return table


# ---------------------------------------------------------------------------
# torus-sum decay fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EDecayRow:
    p: int
    abs_E: float
    status: str  # used | dropped-noise | dropped-degenerate | budget-exceeded


@dataclass(frozen=True)
class EDecayFit:
    face_id: int
    fitted_exponent: float
    sigma_tau: Fraction
    ds_exponent: Fraction  # -(dim tau + 1)/2
    rows: Tuple[EDecayRow, ...]


def e_decay_fit(
    f: Polynomial,
    face_id: int,
    primes: Sequence[int],
    *,
    workers: int = 1,
    work_budget: int = DEFAULT_WORK_BUDGET,
) -> EDecayFit:
    """Least-squares decay exponent of |E(p, f_tau)| across primes.

    Fits the unit-constant power law |E| = (p-1)^e, i.e. least squares of
    log|E| on log(p-1) through the origin.  The per-variable torus size p-1
    is the natural scale of these normalized sums and recovers the exponent
    exactly on closed-form cases at desk primes; per-prime rows are reported
    so callers can refit under other conventions.  Primes failing the face's
    mod-p nondegeneracy check are dropped, as are primes whose |E| sits below
    10x the kernel error budget; fewer than three survivors raise
    InsufficientPrimes.
    """
    P = build_polyhedron(f)
    faces = enumerate_faces(P)
    if not 0 <= face_id < len(faces):
        raise ValueError(f"no face with id {face_id}")
    tau = faces[face_id]

    rows: List[EDecayRow] = []
    xs: List[float] = []
    ys: List[float] = []
    for p in sorted(set(primes)):
        try:
            nd = check_nondegenerate_mod_p(f, [tau], p, work_budget=work_budget)
            if not nd.passed:
                rows.append(EDecayRow(p=p, abs_E=float("nan"), status="dropped-degenerate"))
                continue
            ev = torus_E(tau.restriction, p, workers=workers, work_budget=work_budget)
        except WorkBudgetExceeded:
            rows.append(EDecayRow(p=p, abs_E=float("nan"), status="budget-exceeded"))
            continue
        abs_e = abs(ev.value)
        if abs_e < 10 * ev.abs_error_budget:
            rows.append(EDecayRow(p=p, abs_E=abs_e, status="dropped-noise"))
            continue
        rows.append(EDecayRow(p=p, abs_E=abs_e, status="used"))
        xs.append(math.log(p - 1))
        ys.append(math.log(abs_e))
    if len(xs) < 3:
        raise InsufficientPrimes(
            f"{len(xs)} usable primes (need >= 3): {[r.status for r in rows]}"
        )
    slope = sum(x * y for x, y in zip(xs, ys)) / sum(x * x for x in xs)
    return EDecayFit(
        face_id=face_id,
        fitted_exponent=slope,
        sigma_tau=tau.sigma_tau,
        ds_exponent=-Fraction(tau.dim + 1, 2),
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# critical-locus dimension consistency gate
# ---------------------------------------------------------------------------

def check_sigma_dim_bound(f: Polynomial, d: int) -> bool:
    """Whether sigma(f) <= (n - d)/2 for the user-asserted dimension d of the
    critical locus.  The artifact never computes d; a False result flags an
    inconsistent d or a failed hypothesis and is reported as a finding."""
    deg = homogeneity(f)
    if deg is None or deg < 2:
        raise HypothesisUnmet("f must be homogeneous of degree >= 2")
    sigma = sigma_data(build_polyhedron(f)).sigma
    return sigma <= Fraction(f.n - d, 2)
