"""Invariant parallel null line fields and totally null plane fields.

A left-invariant distribution on m is parallel exactly when it is invariant
under every connection matrix Lambda_i, and it descends to the coset space
when it is also invariant under every isotropy matrix H_j.  Lines are common
eigenvectors of that family; planes are the decomposable common
eigenvectors of the induced derivation action on bivectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

from .errors import ArithmeticDomainError
from .exactalg import (
    ZERO,
    Matrix,
    Scalar,
    Subspace,
    char_poly,
    congruence_diagonalize,
    exterior_square,
    factor_over_field,
    isotropic_vector,
    plane_from_bivector,
    plucker_polar,
    plucker_quadric,
    poly_at_matrix,
    quadratic_roots,
    radicand_of,
    signature,
    split_real,
    sqrt_in_field,
    wedge,
)
from .exactalg.linalg import BIVECTOR_PAIRS
from .geometry import ConnectionTable, levi_civita
from .model.homogeneous import HomogeneousModel

EXISTS = "exists"
NONE = "none"
INDETERMINATE = "indeterminate-exact"
ALL_LINES = "all-lines"
ALL_PLANES = "all-planes"


def invariant_family(model: HomogeneousModel, lam: ConnectionTable | None = None) -> list[Matrix]:
    """Lambda_1..Lambda_4 followed by the isotropy matrices H_j."""
    if lam is None:
        lam = levi_civita(model)
    return list(lam) + list(model.isotropy)


# --- common eigenvectors -------------------------------------------------------

@dataclass(frozen=True)
class CommonEigenspace:
    space: Subspace
    eigenvalues: tuple  # one per family member


@dataclass(frozen=True)
class EigenSearch:
    """All common eigenspaces of a matrix family over the scalar tower.

    ``unresolved`` holds subspaces on which some member still has real
    eigenvalues outside the active field; when it is empty the search is
    exhaustive.
    """

    n: int
    spaces: tuple
    unresolved: tuple
    root_counts: tuple
    branches: int
    radicand: int | None
    notes: tuple = ()

    @property
    def exhaustive(self) -> bool:
        return not self.unresolved

    @property
    def tuple_space(self) -> int:
        return prod(self.root_counts) if self.root_counts else 0

    def certificate(self) -> dict:
        return {
            "family_size": len(self.root_counts),
            "root_counts": list(self.root_counts),
            "tuple_space": self.tuple_space,
            "branches": self.branches,
            "exhaustive": self.exhaustive,
            "radicand": self.radicand,
        }


def _marker(d: int | None):
    return Scalar(0, 1, d) if d else ZERO


def _entries(mats) -> list:
    return [x for M in mats for row in M.rows for x in row]


def _field(g: Matrix, *vectors) -> int | None:
    """Radicand shared by g and the given vectors (MixedRadicands otherwise)."""
    return radicand_of([*_entries([g]), *(x for v in vectors for x in v)])


def common_eigenspaces(family, n: int | None = None, radicand: int | None = None) -> EigenSearch:
    """Intersect eigenspaces member by member, branching on eigenvalues.

    A branch that dies (empty intersection) covers every eigenvalue tuple
    extending it, so the enumeration is exhaustive over all tuples even
    though only ``branches`` intersections are computed.  Each branch keeps
    its own field: a radicand opened on one branch does not block another.
    """
    family = list(family)
    if n is None:
        n = family[0].nrows
    base = radicand_of([*_entries(family), _marker(radicand)])
    I = Matrix.identity(n)
    cands = [(Subspace.whole(n), (), base)]
    unresolved: list[Subspace] = []
    root_counts: list[int] = []
    notes: list[str] = []
    branches = 0
    for A in family:
        cp = char_poly(A)
        splits: dict = {}
        used: list[Scalar] = []
        new = []
        for S, om, d in cands:
            try:
                if d not in splits:
                    splits[d] = split_real(cp, d)
                sp = splits[d]
            except ArithmeticDomainError as exc:
                notes.append(str(exc))
                unresolved.append(S)
                continue
            roots = [r for r, _ in sp.roots]
            bucket = None
            if sp.remainder_real_roots:
                B = S.intersect_kernel(poly_at_matrix(sp.remainder, A))
                if B.dim:
                    extra = _open_roots(sp.remainder, d)
                    if extra is None:
                        bucket = B
                    else:
                        roots += extra
            for r in roots:
                branches += 1
                T = S.intersect_kernel(A - I.scale(r))
                if T.dim:
                    new.append((T, om + (r,), radicand_of([_marker(d), r])))
                    if r not in used:
                        used.append(r)
            if bucket is not None:
                # eigenvalue unknown; later members may still rule this branch out
                branches += 1
                new.append((bucket, om + (None,), d))
        root_counts.append(len(used))
        cands = new
    spaces = []
    for S, om, d in cands:
        if None not in om:
            spaces.append(CommonEigenspace(S, om))
            continue
        resolved = _resolve_unknown(S, om, family, d)
        if resolved is None:
            unresolved.append(S)
            notes.append(f"a {S.dim}-dim common subspace carries eigenvalues outside the active field")
        else:
            spaces.extend(resolved)
    return EigenSearch(n, tuple(spaces), tuple(unresolved), tuple(root_counts), branches,
                       _common_radicand(spaces, base), tuple(notes))


def _common_radicand(spaces, base) -> int | None:
    """Radicand shared by every eigenspace basis, or ``base`` when they differ."""
    try:
        return radicand_of([_marker(base), *(x for ce in spaces for v in ce.space.basis for x in v)])
    except ArithmeticDomainError:
        return base


def _resolve_unknown(S: Subspace, om: tuple, family, d) -> list | None:
    """Settle a surviving branch whose eigenvalue for some member is unknown.

    A common eigenvector inside S for such a member lies in an invariant
    part of S; when S (or a refined piece) is invariant, the member is
    restricted to it, and that lower-degree characteristic polynomial often
    factors in the tower.  Returns the common eigenspaces inside S (possibly
    none), or None when this cannot be decided.
    """
    n = S.n
    I = Matrix.identity(n)
    cands = [(S, (), d)]
    for A, w in zip(family, om):
        if w is not None:
            cands = [(T, o + (w,), dd) for T, o, dd in cands]
            continue
        nxt = []
        for T, o, dd in cands:
            if not T.is_invariant_under(A):
                if T.dim == 1:
                    continue  # a line that is not invariant holds no eigenvector
                return None
            TB = T.basis_matrix()
            R = (TB.T @ TB).inverse() @ TB.T @ A @ TB
            roots = _open_roots(char_poly(R), dd)
            if roots is None:
                return None
            for r in roots:
                U = T.intersect_kernel(A - I.scale(r))
                if U.dim:
                    nxt.append((U, o + (r,), radicand_of([_marker(dd), r])))
        cands = nxt
    return [CommonEigenspace(T, o) for T, o, _ in cands]


def _open_roots(rem, active) -> list[Scalar] | None:
    """Real roots of rem after opening one radicand, or None if impossible."""
    try:
        factors = factor_over_field(rem, active, open_radicand=active is None)
    except ArithmeticDomainError:
        return None
    out = []
    for f in factors:
        if f.is_linear:
            out.append(f.root)
        else:
            s, p = f.pair
            if (s * s - 4 * p).sign() >= 0:
                return None
    return out


# --- quadratic-form helpers ----------------------------------------------------

def _g(g: Matrix, x, y) -> Scalar:
    return sum((x[a] * g.rows[a][b] * y[b] for a in range(len(x)) for b in range(len(y))
                if not x[a].is_zero() and not y[b].is_zero()), ZERO)


def _comb(a, b, t):
    return tuple(x + t * y for x, y in zip(a, b))


def _witt_vectors(G: Matrix, active) -> list[tuple]:
    """Null vectors e_i + c f_j built from a congruence diagonalization.

    One vector per (positive, negative) pair and sign, plus every zero
    direction; pairs whose ratio has no square root in the field are skipped.
    """
    vals, P = congruence_diagonalize(G)
    cols = P.columns()
    out = [c for v, c in zip(vals, cols) if v.is_zero()]
    pos = [(v, c) for v, c in zip(vals, cols) if v.sign() > 0]
    neg = [(v, c) for v, c in zip(vals, cols) if v.sign() < 0]
    for vp, cp in pos:
        for vn, cn in neg:
            try:
                c = sqrt_in_field(-vp / vn, active)
                active = radicand_of([_marker(active), c])
            except ArithmeticDomainError:
                continue
            for s in (c, -c):
                out.append(tuple(x + s * y for x, y in zip(cp, cn)))
    return out


def _null_cone(G: Matrix, active) -> tuple[list, bool]:
    """Null directions of a form in dimension >= 3: sample vectors and
    whether there are infinitely many.  A semidefinite form is null exactly
    on its radical; an indefinite one has a whole cone."""
    vals, _ = congruence_diagonalize(G)
    npos = sum(1 for v in vals if v.sign() > 0)
    nneg = sum(1 for v in vals if v.sign() < 0)
    nzero = len(vals) - npos - nneg
    samples = _witt_vectors(G, active)
    if npos and nneg:
        if not samples:
            iso = isotropic_vector(G, active)
            samples = [] if iso is None else [iso]
        return samples, True
    return samples, nzero >= 2


def _dedupe(subspaces) -> list:
    out = []
    for s in subspaces:
        if s not in out:
            out.append(s)
    return out


# --- lines ---------------------------------------------------------------------

@dataclass(frozen=True)
class LineFieldResult:
    verdict: str
    witnesses: tuple  # 1-dim Subspaces
    omegas: tuple  # per witness, eigenvalues of Lambda_1..Lambda_4 on it
    certificate: dict = field(default_factory=dict)
    infinite: bool = False
    sentinel: str | None = None
    reason: str | None = None


def common_invariant_lines(family, radicand: int | None = None) -> EigenSearch:
    return common_eigenspaces(family, radicand=radicand)


def _null_lines_in(S: Subspace, g: Matrix, active) -> tuple[list, bool]:
    basis = list(S.basis)
    if len(basis) == 1:
        x = basis[0]
        return ([x] if _g(g, x, x).is_zero() else []), False
    if len(basis) == 2:
        a, b = basis
        c0, c1, c2 = _g(g, a, a), 2 * _g(g, a, b), _g(g, b, b)
        if c0.is_zero() and c1.is_zero() and c2.is_zero():
            return [a, b], True
        out = [b] if c2.is_zero() else []
        out += [_comb(a, b, t) for t in quadratic_roots(c2, c1, c0, active)]
        return out, False
    B = S.basis_matrix()
    samples, infinite = _null_cone(B.T @ g @ B, active)
    return [B @ c for c in samples], infinite


def null_filter_lines(search: EigenSearch, g: Matrix, n_connection: int = 4) -> LineFieldResult:
    witnesses, omegas, trouble = [], [], list(search.notes)
    infinite = False
    sentinel = None
    for ce in search.spaces:
        if ce.space.dim == search.n:
            sentinel = ALL_LINES
        try:
            vecs, inf = _null_lines_in(ce.space, g, _field(g, *ce.space.basis))
        except ArithmeticDomainError as exc:
            trouble.append(str(exc))
            continue
        infinite = infinite or inf
        for v in vecs:
            L = Subspace(search.n, [v])
            if L not in witnesses:
                witnesses.append(L)
                omegas.append(tuple(ce.eigenvalues[:n_connection]))
    cert = search.certificate()
    if sentinel and min(signature(g)) > 0:
        infinite = True
        verdict, reason = EXISTS, "every line is invariant"
    elif witnesses:
        verdict, reason = EXISTS, None
        if not search.exhaustive or trouble:
            reason = "witnesses verified; enumeration incomplete"
    elif not search.exhaustive or trouble:
        verdict, reason = INDETERMINATE, "; ".join(trouble) or "eigenvalues outside the scalar tower"
    else:
        verdict = NONE
        reason = "no common eigenvector" if not search.spaces else "no null common eigenvector"
    return LineFieldResult(verdict, tuple(witnesses), tuple(omegas), cert, infinite, sentinel, reason)


# --- planes --------------------------------------------------------------------

@dataclass(frozen=True)
class Pencil:
    """Invariant planes span(line, a + t b), all sharing one line."""

    line: tuple
    a: tuple
    b: tuple


@dataclass(frozen=True)
class PlaneSearch:
    bivectors: EigenSearch
    candidates: tuple  # invariant 2-dim Subspaces
    pencils: tuple
    large: tuple  # common bivector eigenspaces of dimension >= 3
    notes: tuple = ()

    @property
    def whole(self) -> bool:
        return any(ce.space.dim == 6 for ce in self.large)


@dataclass(frozen=True)
class PlaneFieldResult:
    verdict: str
    witnesses: tuple  # 2-dim Subspaces
    certificate: dict = field(default_factory=dict)
    infinite: bool = False
    sentinel: str | None = None
    reason: str | None = None


def _decomposable_in_pencil(a, b, active) -> tuple[list, bool]:
    """Decomposable bivectors in span(a, b): finite list or 'all' flag."""
    qa, pab, qb = plucker_quadric(a), plucker_polar(a, b), plucker_quadric(b)
    if qa.is_zero() and pab.is_zero() and qb.is_zero():
        return [a, b], True
    out = [b] if qb.is_zero() else []
    out += [_comb(a, b, t) for t in quadratic_roots(qb, 2 * pab, qa, active)]
    return out, False


def _scaled_complement(W: Subspace, line: tuple, w) -> tuple:
    """Vector v in W with line ^ v == w exactly."""
    for v in W.basis:
        lw = wedge(line, v)
        k = next((i for i, x in enumerate(lw) if not x.is_zero()), None)
        if k is not None:
            return tuple(x * (w[k] / lw[k]) for x in v)
    raise ArithmeticError("plane does not extend the line")


def _pencil(a, b) -> Pencil:
    Wa, Wb = plane_from_bivector(a), plane_from_bivector(b)
    L = Wa.intersect(Wb)
    if L.dim != 1:
        raise ArithmeticError("decomposable pencil without a common line")
    line = L.basis[0]
    return Pencil(line, _scaled_complement(Wa, line, a), _scaled_complement(Wb, line, b))


def common_invariant_planes(family, radicand: int | None = None) -> PlaneSearch:
    """Invariant planes from decomposable common eigenvectors on bivectors."""
    family = list(family)
    es = common_eigenspaces([exterior_square(A) for A in family], 6, radicand)
    cands, pencils, large, notes = [], [], [], list(es.notes)
    for ce in es.spaces:
        basis = ce.space.basis
        if len(basis) >= 3:
            large.append(ce)
            continue
        try:
            active = radicand_of([x for v in basis for x in v])
            if len(basis) == 1:
                ws, whole = ([basis[0]] if plucker_quadric(basis[0]).is_zero() else []), False
            else:
                ws, whole = _decomposable_in_pencil(basis[0], basis[1], active)
            if whole:
                pencils.append(_pencil(*basis))
                continue
        except ArithmeticDomainError as exc:
            notes.append(str(exc))
            continue
        for w in ws:
            W = plane_from_bivector(w)
            if W not in cands:
                cands.append(W)
    return PlaneSearch(es, tuple(cands), tuple(pencils), tuple(large), tuple(notes))


def _gram_zero(W: Subspace, g: Matrix) -> bool:
    u, v = W.basis
    return _g(g, u, u).is_zero() and _g(g, u, v).is_zero() and _g(g, v, v).is_zero()


def _null_planes_in_pencil(P: Pencil, g: Matrix, active) -> tuple[list, bool]:
    ell, a, b = P.line, P.a, P.b
    if not _g(g, ell, ell).is_zero():
        return [], False
    la, lb = _g(g, ell, a), _g(g, ell, b)
    aa, ab, bb = _g(g, a, a), _g(g, a, b), _g(g, b, b)
    if all(x.is_zero() for x in (la, lb, aa, ab, bb)):
        return [Subspace(4, [ell, a]), Subspace(4, [ell, b])], True
    ts = []
    if not lb.is_zero():
        t = -la / lb
        if (aa + 2 * t * ab + t * t * bb).is_zero():
            ts.append(t)
    elif la.is_zero():
        if not (aa.is_zero() and ab.is_zero() and bb.is_zero()):
            ts = quadratic_roots(bb, 2 * ab, aa, active)
    out = [Subspace(4, [ell, _comb(a, b, t)]) for t in ts]
    if lb.is_zero() and bb.is_zero():
        out.append(Subspace(4, [ell, b]))
    return out, False


def hodge_operator(g: Matrix) -> Matrix:
    """G2^-1 P on bivectors: squares to a scalar; its eigenspaces are the
    self-dual and anti-self-dual bivectors (up to normalization)."""
    G2 = Matrix([[g.rows[i][k] * g.rows[j][l] - g.rows[i][l] * g.rows[j][k]
                  for (k, l) in BIVECTOR_PAIRS] for (i, j) in BIVECTOR_PAIRS])
    P = Matrix([[plucker_polar(_unit(r), _unit(c)) * 2 for c in range(6)] for r in range(6)])
    return G2.inverse() @ P


def _unit(k: int) -> tuple:
    return tuple(Scalar(1) if i == k else ZERO for i in range(6))


def _duality_halves(g: Matrix, active) -> tuple[Subspace, Subspace] | None:
    """Self-dual / anti-self-dual bivector spaces, or None if they need a
    radicand outside the field.  In neutral signature a plane is totally
    null exactly when its bivector lies in one of them."""
    M = hodge_operator(g)
    k = (M @ M).rows[0][0]
    s = sqrt_in_field(k, active)
    if s is None:
        return None
    I = Matrix.identity(6)
    plus = Subspace.whole(6).intersect_kernel(M - I.scale(s))
    minus = Subspace.whole(6).intersect_kernel(M + I.scale(s))
    return plus, minus


def _null_planes_in_half(E: Subspace, active) -> tuple[list, bool]:
    basis = list(E.basis)
    if not basis:
        return [], False
    if len(basis) == 1:
        w = basis[0]
        return ([plane_from_bivector(w)] if plucker_quadric(w).is_zero() else []), False
    if len(basis) == 2:
        ws, whole = _decomposable_in_pencil(basis[0], basis[1], active)
        return [plane_from_bivector(w) for w in ws], whole
    B = E.basis_matrix()
    samples, infinite = _null_cone(Matrix([[plucker_polar(u, v) for v in basis] for u in basis]), active)
    return [plane_from_bivector(B @ c) for c in samples], infinite


def _witt_planes(g: Matrix, active) -> list[Subspace]:
    """Totally null sample planes span(e1 +- c f1, e2 +- c' f2) and the
    crossed pairing, from a congruence diagonalization of g."""
    vals, P = congruence_diagonalize(g)
    cols = P.columns()
    pos = [(v, c) for v, c in zip(vals, cols) if v.sign() > 0]
    neg = [(v, c) for v, c in zip(vals, cols) if v.sign() < 0]
    if len(pos) != 2 or len(neg) != 2:
        return []
    out = []
    for pairing in ((0, 1), (1, 0)):
        nulls = []
        for (vp, cp), j in zip(pos, pairing):
            vn, cn = neg[j]
            try:
                c = sqrt_in_field(-vp / vn, active)
                active = radicand_of([_marker(active), c])
            except ArithmeticDomainError:
                return out
            nulls.append([tuple(x + s * y for x, y in zip(cp, cn)) for s in (c, -c)])
        for u in nulls[0]:
            for v in nulls[1]:
                out.append(Subspace(4, [u, v]))
    return out


def null_filter_planes(search: PlaneSearch, g: Matrix, signature: tuple[int, int]) -> PlaneFieldResult:
    cert = search.bivectors.certificate()
    p, q = signature
    if min(p, q) < 2:
        reason = "max-isotropic-dim" if min(p, q) == 1 else "definite"
        return PlaneFieldResult(NONE, (), cert, False, None, reason)
    found: list[Subspace] = []
    infinite = False
    sentinel = None
    trouble = list(search.notes)
    found += [W for W in search.candidates if _gram_zero(W, g)]
    for P in search.pencils:
        try:
            planes, inf = _null_planes_in_pencil(P, g, _field(g, P.line, P.a, P.b))
        except ArithmeticDomainError as exc:
            trouble.append(str(exc))
            continue
        found += planes
        infinite = infinite or inf
    if search.whole:
        # every plane is invariant, so the neutral signature alone guarantees
        # totally null ones; exact samples are best effort
        sentinel = ALL_PLANES
        infinite = True
        found += _witt_planes(g, _field(g))
    elif search.large:
        try:
            halves = _duality_halves(g, _field(g))
        except ArithmeticDomainError as exc:
            halves = None
            trouble.append(str(exc))
        if halves is None:
            trouble.append("duality split needs a radicand outside the field")
        else:
            for ce in search.large:
                for half in halves:
                    try:
                        E = ce.space.intersect(half)
                        planes, inf = _null_planes_in_half(E, _field(g, *E.basis))
                    except ArithmeticDomainError as exc:
                        trouble.append(str(exc))
                        continue
                    found += planes
                    infinite = infinite or inf
    witnesses = [W for W in _dedupe(found) if W.dim == 2 and _gram_zero(W, g)]
    if sentinel:
        verdict, reason = EXISTS, "every plane is invariant"
    elif witnesses:
        verdict = EXISTS
        reason = "witnesses verified; enumeration incomplete" if (trouble or not search.bivectors.exhaustive) else None
    elif trouble or not search.bivectors.exhaustive:
        verdict, reason = INDETERMINATE, "; ".join(trouble) or "eigenvalues outside the scalar tower"
    else:
        verdict, reason = NONE, "no totally null invariant plane"
    return PlaneFieldResult(verdict, tuple(witnesses), cert, infinite, sentinel, reason)


# --- rechecks and the report ---------------------------------------------------

def line_is_sound(L: Subspace, g: Matrix, family) -> bool:
    x = L.basis[0]
    return _g(g, x, x).is_zero() and all(L.is_invariant_under(A) for A in family)


def plane_is_sound(W: Subspace, g: Matrix, family) -> bool:
    return W.dim == 2 and _gram_zero(W, g) and all(W.is_invariant_under(A) for A in family)


@dataclass(frozen=True)
class WalkerReport:
    line: LineFieldResult
    plane: PlaneFieldResult
    oracle_agreement: bool | None
    approx: dict = field(default_factory=dict)


def walker_report(model: HomogeneousModel, lam: ConnectionTable | None = None, *, oracle: bool = True) -> WalkerReport:
    """Exact line/plane verdicts, every witness rechecked from scratch."""
    family = invariant_family(model, lam)
    g = model.metric
    d = model.radicand
    line = null_filter_lines(common_invariant_lines(family, d), g)
    plane = null_filter_planes(common_invariant_planes(family, d), g, model.signature)
    for L in line.witnesses:
        if not line_is_sound(L, g, family):
            raise AssertionError(f"unsound line witness {L}")
    for W in plane.witnesses:
        if not plane_is_sound(W, g, family):
            raise AssertionError(f"unsound plane witness {W}")
    if not oracle:
        return WalkerReport(line, plane, None, {})
    from .oracle import float_walker, walker_agreement

    approx = float_walker(model)
    return WalkerReport(line, plane, walker_agreement(line, plane, approx), approx)
