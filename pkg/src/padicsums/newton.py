"""Exact Newton polyhedron at the origin: V- and H-representations, the full
face lattice, and the diagonal invariants sigma, F0 and kappa.

The polyhedron of f is conv(Supp(f)) + R_+^n.  Its H-representation is
computed by an incremental double description pass over the homogenization
cone spanned by the lifted support points and the orthant rays, in exact
integer arithmetic; every derived quantity is an int or a Fraction.  Faces
are canonically keyed by (vertex index set, recession axis set), which
determines a face of this class of polyhedra (pointed, recession cone equal
to the orthant).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import BudgetExceeded, DimensionTooLarge, FacetCountTooLarge
from .poly import ExponentVector, Polynomial, face_restriction, render

DEFAULT_DIMENSION_CAP = 8
DEFAULT_FACET_SUBSET_CAP = 1 << 20
DEFAULT_POINT_CAP = 5_000_000

FaceKey = Tuple[Tuple[int, ...], Tuple[int, ...]]  # (vertex ids, 0-based recession axes)


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------

def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _primitive(vec: Sequence[int]) -> Tuple[int, ...]:
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in vec)


def _rank(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank over Q of an integer matrix."""
    mat = [[Fraction(x) for x in row] for row in rows if any(row)]
    if not mat:
        return 0
    ncols = len(mat[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c] / mat[r][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    return r


def _inverse_columns(rows: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    """Columns of the inverse of a square integer matrix, as primitive
    integer vectors.  Column c solves rows . x = e_c, so each returned ray
    satisfies the row system with the identity tightness pattern."""
    d = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(d)]
           for i, row in enumerate(rows)]
    for c in range(d):
        piv = next((i for i in range(c, d) if aug[i][c]), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = aug[c][c]
        aug[c] = [x / inv for x in aug[c]]
        for i in range(d):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    cols = []
    for c in range(d):
        col = [aug[i][d + c] for i in range(d)]
        denom = 1
        for x in col:
            denom = denom * x.denominator // gcd(denom, x.denominator)
        cols.append(_primitive([int(x * denom) for x in col]))
    return cols


def _extreme_rays(rows: List[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """Extreme rays of the pointed cone {a : row . a >= 0 for every row}.

    Incremental double description with the combinatorial adjacency test.
    The caller guarantees the row system has full column rank and a pointed
    solution cone; both hold for the homogenization systems built here.
    """
    d = len(rows[0])
    base: List[int] = []
    for i in range(len(rows)):
        if _rank([rows[j] for j in base] + [rows[i]]) > len(base):
            base.append(i)
            if len(base) == d:
                break
    if len(base) < d:
        raise ValueError("inequality system is rank deficient")

    rays = _inverse_columns([rows[i] for i in base])
    active = list(base)
    for idx in (i for i in range(len(rows)) if i not in set(base)):
        a = rows[idx]
        vals = [_dot(a, r) for r in rays]
        if all(v >= 0 for v in vals):
            active.append(idx)
            continue
        zsets = [frozenset(j for j in active if _dot(rows[j], r) == 0) for r in rays]
        keep = [r for r, v in zip(rays, vals) if v >= 0]
        new: List[Tuple[int, ...]] = []
        plus = [i for i, v in enumerate(vals) if v > 0]
        minus = [i for i, v in enumerate(vals) if v < 0]
        for ip in plus:
            for im in minus:
                z = zsets[ip] & zsets[im]
                if any(k != ip and k != im and z <= zsets[k] for k in range(len(rays))):
                    continue
                combo = tuple(
                    vals[ip] * rm - vals[im] * rp
                    for rp, rm in zip(rays[ip], rays[im])
                )
                new.append(_primitive(combo))
        rays = list(dict.fromkeys(keep + new))
        active.append(idx)
    return rays


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Facet:
    """Supporting inequality normal . x >= offset with primitive normal >= 0."""

    normal: ExponentVector
    offset: int


@dataclass(frozen=True)
class Face:
    """A face of the polyhedron, canonically (vertex ids, recession axes).

    ``witness_k`` is the sum of the active facet normals; re-evaluating the
    minimization at witness_k recovers exactly this face.  ``recession_axes``
    are 0-based internally (serialization emits them 1-based).
    """

    id: int
    vertex_ids: Tuple[int, ...]
    recession_axes: Tuple[int, ...]
    dim: int
    active_facet_ids: Tuple[int, ...]
    witness_k: ExponentVector
    sigma_tau: Fraction
    restriction: Polynomial

    @property
    def key(self) -> FaceKey:
        return (self.vertex_ids, self.recession_axes)


@dataclass(frozen=True)
class SigmaData:
    """Diagonal invariants: sigma, t* = 1/sigma, the face F0 where the
    diagonal first meets the polyhedron, and kappa = n - dim F0."""

    sigma: Fraction
    t_star: Fraction
    kappa: int
    f0_key: FaceKey
    f0_face_id: Optional[int] = None


class KEval(NamedTuple):
    nu: int
    N: int
    face: "Face"


@dataclass(frozen=True)
class LatticePoint:
    k: ExponentVector
    nu: int
    N: int
    face_id: int


@dataclass
class NewtonPolyhedron:
    n: int
    vertices: Tuple[ExponentVector, ...]
    facets: Tuple[Facet, ...]
    source: Polynomial
    _faces: Optional[Tuple[Face, ...]] = field(default=None, repr=False)
    _face_index: Optional[Dict[FaceKey, int]] = field(default=None, repr=False)
    _sigma_core: Optional[Tuple[Fraction, Fraction, int, FaceKey]] = field(
        default=None, repr=False
    )

    def classify(self, k: Sequence[int]) -> Tuple[int, int, FaceKey]:
        """(nu, N, face key) for a nonnegative integer functional k."""
        dots = [_dot(k, v) for v in self.vertices]
        N = min(dots)
        vids = tuple(i for i, d in enumerate(dots) if d == N)
        axes = tuple(j for j, kj in enumerate(k) if kj == 0)
        return sum(k), N, (vids, axes)

    def face_by_key(self, key: FaceKey) -> Face:
        faces = enumerate_faces(self)
        assert self._face_index is not None
        return faces[self._face_index[key]]


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_polyhedron(
    f: Polynomial, *, dimension_cap: int = DEFAULT_DIMENSION_CAP
) -> NewtonPolyhedron:
    """Exact V- and H-representation of conv(Supp(f)) + R_+^n.

    Requires f nonconstant with f(0) = 0.  Facet normals come out primitive
    with nonnegative entries; offsets are the exact minima over the support.
    """
    if f.n > dimension_cap:
        raise DimensionTooLarge(f"dimension {f.n} exceeds cap {dimension_cap}")
    if f.has_constant_term:
        raise ValueError("f(0) must be 0 for Newton polyhedron analysis")
    support = sorted(f.terms)

    rows: List[Tuple[int, ...]] = []
    for j in range(f.n):
        rows.append(tuple(int(i == j) for i in range(f.n)) + (0,))
    for v in support:
        rows.append(v + (1,))

    facets: List[Facet] = []
    for ray in _extreme_rays(rows):
        k, c = ray[:-1], ray[-1]
        if all(x == 0 for x in k):
            continue  # homogenization facet t >= 0
        offset = -c
        assert offset == min(_dot(k, v) for v in support)
        facets.append(Facet(tuple(k), offset))
    facets.sort(key=lambda F: F.normal)

    verts = []
    for v in support:
        tight = [F.normal for F in facets if _dot(F.normal, v) == F.offset]
        if _rank(tight) == f.n:
            verts.append(v)

    P = NewtonPolyhedron(n=f.n, vertices=tuple(verts), facets=tuple(facets), source=f)
    _check_duality(P, support)
    return P


def _check_duality(P: NewtonPolyhedron, support: Sequence[ExponentVector]) -> None:
    # Cross-checks that are cheap enough to always run: the two
    # representations must describe the same polyhedron.
    assert P.vertices, "polyhedron must have at least one vertex"
    assert any(F.offset > 0 for F in P.facets), "origin exclusion demands a positive offset"
    for s in support:
        assert all(_dot(F.normal, s) >= F.offset for F in P.facets), f"support point {s} outside"
    for F in P.facets:
        assert any(_dot(F.normal, v) == F.offset for v in P.vertices), f"facet {F} has no tight vertex"


# ---------------------------------------------------------------------------
# face lattice
# ---------------------------------------------------------------------------

def _face_dim(P: NewtonPolyhedron, key: FaceKey) -> int:
    vids, axes = key
    v0 = P.vertices[vids[0]]
    rows: List[Tuple[int, ...]] = [
        tuple(a - b for a, b in zip(P.vertices[i], v0)) for i in vids[1:]
    ]
    rows += [tuple(int(i == a) for i in range(P.n)) for a in axes]
    return _rank(rows)


def enumerate_faces(
    P: NewtonPolyhedron, *, facet_subset_cap: int = DEFAULT_FACET_SUBSET_CAP
) -> List[Face]:
    """The complete face lattice, including the polyhedron itself (witness 0).

    Every subset of facets contributes the face minimized by the sum of its
    normals; deduplication by (vertex ids, recession axes) leaves each face
    exactly once.  This is exhaustive because a face's normal cone is spanned
    by the normals of the facets containing it, and the sum of spanning
    normals lies in the cone's relative interior.
    """
    if P._faces is not None:
        return list(P._faces)
    nf = len(P.facets)
    if 2 ** nf > facet_subset_cap:
        raise FacetCountTooLarge(f"2^{nf} facet subsets exceed cap {facet_subset_cap}")

    keys: Dict[FaceKey, None] = {}
    for mask in range(2 ** nf):
        k = [0] * P.n
        for j in range(nf):
            if mask >> j & 1:
                for i, x in enumerate(P.facets[j].normal):
                    k[i] += x
        _, _, key = P.classify(k)
        keys.setdefault(key)

    support = P.source.support
    sigma_memo: Dict[Tuple[ExponentVector, ...], Fraction] = {}
    records = []
    for vids, axes in keys:
        active = tuple(
            j
            for j, F in enumerate(P.facets)
            if all(_dot(F.normal, P.vertices[i]) == F.offset for i in vids)
            and all(F.normal[a] == 0 for a in axes)
        )
        witness = tuple(
            sum(P.facets[j].normal[i] for j in active) for i in range(P.n)
        )
        _, _, recheck = P.classify(witness)
        assert recheck == (vids, axes), "witness does not recover its face"

        members = [
            s
            for s in support
            if all(_dot(P.facets[j].normal, s) == P.facets[j].offset for j in active)
        ]
        restr = face_restriction(P.source, members)
        assert restr is not None, "every face of the Newton polyhedron meets Supp(f)"

        skey = restr.support
        if skey not in sigma_memo:
            sigma_memo[skey] = sigma_data(build_polyhedron(restr)).sigma
        records.append(
            {
                "key": (vids, axes),
                "dim": _face_dim(P, (vids, axes)),
                "active": active,
                "witness": witness,
                "restriction": restr,
                "sigma_tau": sigma_memo[skey],
            }
        )

    records.sort(key=lambda r: (r["dim"], r["key"]))
    faces = tuple(
        Face(
            id=i,
            vertex_ids=r["key"][0],
            recession_axes=r["key"][1],
            dim=r["dim"],
            active_facet_ids=r["active"],
            witness_k=r["witness"],
            sigma_tau=r["sigma_tau"],
            restriction=r["restriction"],
        )
        for i, r in enumerate(records)
    )
    P._faces = faces
    P._face_index = {face.key: face.id for face in faces}
    return list(faces)


def eval_k(P: NewtonPolyhedron, k: Sequence[int]) -> KEval:
    """nu(k), N(k) and the face where the minimum over the polyhedron is attained."""
    k = tuple(int(x) for x in k)
    if any(x < 0 for x in k):
        raise ValueError("k must have nonnegative entries")
    nu, N, key = P.classify(k)
    return KEval(nu, N, P.face_by_key(key))


def sigma_data(P: NewtonPolyhedron) -> SigmaData:
    """sigma, t*, F0 and kappa from the facet description.

    t* is the exact maximum of offset/nu(normal) over positive-offset facets;
    the diagonal point (t*, ..., t*) lies on exactly the facets active at F0.
    """
    if P._sigma_core is None:
        t_star = max(
            Fraction(F.offset, sum(F.normal)) for F in P.facets if F.offset > 0
        )
        sigma = 1 / t_star
        active = [
            j
            for j, F in enumerate(P.facets)
            if t_star * sum(F.normal) == F.offset
        ]
        witness = tuple(
            sum(P.facets[j].normal[i] for j in active) for i in range(P.n)
        )
        _, _, key = P.classify(witness)
        kappa = P.n - _face_dim(P, key)
        P._sigma_core = (sigma, t_star, kappa, key)
    sigma, t_star, kappa, key = P._sigma_core
    face_id = P._face_index.get(key) if P._face_index is not None else None
    return SigmaData(sigma=sigma, t_star=t_star, kappa=kappa, f0_key=key, f0_face_id=face_id)


def f0_face(P: NewtonPolyhedron) -> Face:
    """The face where the diagonal first meets the polyhedron.

    Enumerates the face lattice on first use; sigma_data alone never does
    (it is also run on face-restriction polyhedra, where building the whole
    sub-lattice would recurse), so its f0_face_id stays None until then.
    """
    enumerate_faces(P)
    return P.face_by_key(sigma_data(P).f0_key)


def enumerate_lattice_points(
    P: NewtonPolyhedron, T: int, *, point_cap: int = DEFAULT_POINT_CAP
) -> Iterator[LatticePoint]:
    """Every k in N^n with nu(k) <= T, exactly once, tagged (nu, N, face id).

    The total count is C(T+n, n); BudgetExceeded fires before any point is
    produced if that exceeds the cap.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    count = comb(T + P.n, P.n)
    if count > point_cap:
        raise BudgetExceeded(f"{count} lattice points exceed cap {point_cap}")
    enumerate_faces(P)
    assert P._face_index is not None
    return _lattice_gen(P, T, P._face_index)


def _lattice_gen(
    P: NewtonPolyhedron, T: int, index: Dict[FaceKey, int]
) -> Iterator[LatticePoint]:
    n = P.n
    vertices = P.vertices
    k = [0] * n

    def rec(j: int, remaining: int) -> Iterator[LatticePoint]:
        if j == n:
            kt = tuple(k)
            dots = [_dot(kt, v) for v in vertices]
            N = min(dots)
            vids = tuple(i for i, d in enumerate(dots) if d == N)
            axes = tuple(i for i, x in enumerate(kt) if x == 0)
            yield LatticePoint(kt, sum(kt), N, index[(vids, axes)])
            return
        for val in range(remaining + 1):
            k[j] = val
            yield from rec(j + 1, remaining - val)
        k[j] = 0

    yield from rec(0, T)


# ---------------------------------------------------------------------------
# serialization helpers (report schema consumed by the CLI)
# ---------------------------------------------------------------------------

def frac_str(x: Fraction) -> str:
    """Rationals travel as "numerator/denominator" strings, never floats."""
    return f"{x.numerator}/{x.denominator}"


def face_to_dict(P: NewtonPolyhedron, face: Face) -> dict:
    return {
        "id": face.id,
        "vertices": [list(P.vertices[i]) for i in face.vertex_ids],
        "recession_axes": [a + 1 for a in face.recession_axes],
        "dim": face.dim,
        "witness": list(face.witness_k),
        "sigma_tau": frac_str(face.sigma_tau),
        "restriction": render(face.restriction),
    }


def polyhedron_to_dict(P: NewtonPolyhedron) -> dict:
    faces = enumerate_faces(P)
    sig = sigma_data(P)
    return {
        "n": P.n,
        "polynomial": render(P.source),
        "vertices": [list(v) for v in P.vertices],
        "facets": [{"normal": list(F.normal), "offset": F.offset} for F in P.facets],
        "sigma": frac_str(sig.sigma),
        "t_star": frac_str(sig.t_star),
        "kappa": sig.kappa,
        "f0_face_id": sig.f0_face_id,
        "faces": [face_to_dict(P, face) for face in faces],
    }
