"""Dense exact linear algebra over Scalar."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from ..errors import MixedRadicands, NotAnEigenvalue
from .poly import Poly, factor_over_field
from .scalar import ONE, ZERO, Scalar, radicand_of


class Matrix:
    """Immutable dense matrix of Scalars."""

    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows):
        rs = tuple(tuple(Scalar.coerce(x) for x in r) for r in rows)
        self.rows = rs
        self.nrows = len(rs)
        self.ncols = len(rs[0]) if rs else 0
        if any(len(r) != self.ncols for r in rs):
            raise ValueError("ragged matrix")

    @classmethod
    def _raw(cls, rows) -> Matrix:
        m = object.__new__(cls)
        m.rows = tuple(tuple(r) for r in rows)
        m.nrows = len(m.rows)
        m.ncols = len(m.rows[0]) if m.rows else 0
        return m

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> Matrix:
        m = n if m is None else m
        return cls._raw([[ZERO] * m for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls._raw([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, *entries) -> Matrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols) -> Matrix:
        cols = [tuple(Scalar.coerce(x) for x in c) for c in cols]
        return cls._raw(list(zip(*cols)))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> Matrix:
        return Matrix._raw(list(zip(*self.rows))) if self.rows else self

    @property
    def radicand(self) -> int | None:
        return radicand_of(x for r in self.rows for x in r)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self == self.T

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other: Matrix) -> Matrix:
        return Matrix._raw([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: Matrix) -> Matrix:
        return Matrix._raw([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> Matrix:
        return Matrix._raw([[-a for a in r] for r in self.rows])

    def scale(self, c) -> Matrix:
        c = Scalar.coerce(c)
        return Matrix._raw([[a * c for a in r] for r in self.rows])

    def __mul__(self, c) -> Matrix:
        if isinstance(c, Matrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            cols = list(zip(*other.rows))
            out = []
            for r in self.rows:
                out.append([_dot(r, c) for c in cols])
            return Matrix._raw(out)
        # vector
        return tuple(_dot(r, other) for r in self.rows)

    def __pow__(self, n: int) -> Matrix:
        out = Matrix.identity(self.nrows)
        for _ in range(n):
            out = out @ self
        return out

    def trace(self) -> Scalar:
        acc = ZERO
        for i in range(self.nrows):
            acc = acc + self.rows[i][i]
        return acc

    def det(self) -> Scalar:
        _, _, _, d = _eliminate(self)
        return d

    def rank(self) -> int:
        return rref(self)[1]

    def inverse(self) -> Matrix:
        n = self.nrows
        aug = Matrix._raw([list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)])
        R, rank, pivots, _ = _eliminate(aug)
        if pivots[:n] != list(range(n)):
            from ..errors import DivisionByZero

            raise DivisionByZero("singular matrix")
        return Matrix._raw([r[n:] for r in R.rows[:n]])

    def submatrix(self, rows, cols) -> Matrix:
        return Matrix._raw([[self.rows[i][j] for j in cols] for i in rows])

    def to_float(self):
        return [[float(x) for x in r] for r in self.rows]

    def tolist(self):
        return [list(r) for r in self.rows]

    def __repr__(self):
        return "Matrix([" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "])"


def _dot(u, v) -> Scalar:
    acc = ZERO
    for a, b in zip(u, v):
        if a.is_zero() or b.is_zero():
            continue
        acc = acc + a * b
    return acc


def vec(*xs) -> tuple[Scalar, ...]:
    return tuple(Scalar.coerce(x) for x in xs)


def _eliminate(M: Matrix):
    """Gauss-Jordan; returns (RREF, rank, pivot columns, determinant if square)."""
    rows = [list(r) for r in M.rows]
    n, m = M.nrows, M.ncols
    pivots: list[int] = []
    det = ONE
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if not rows[i][c].is_zero()), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            det = -det
        piv = rows[r][c]
        det = det * piv
        inv = piv.inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    if n != m or r < n:
        det = ZERO if n == m else None
    return Matrix._raw(rows), r, pivots, det


class Subspace:
    """Subspace of K^n stored by its canonical RREF basis rows."""

    __slots__ = ("n", "basis")

    def __init__(self, n: int, vectors=()):
        self.n = n
        vs = [tuple(Scalar.coerce(x) for x in v) for v in vectors]
        if vs:
            R, rank, _, _ = _eliminate(Matrix._raw(vs))
            self.basis = tuple(R.rows[:rank])
        else:
            self.basis = ()

    @classmethod
    def whole(cls, n: int) -> Subspace:
        return cls(n, Matrix.identity(n).rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def __contains__(self, v) -> bool:
        v = tuple(Scalar.coerce(x) for x in v)
        return Subspace(self.n, self.basis + (v,)).dim == self.dim

    def contains_subspace(self, other: Subspace) -> bool:
        return Subspace(self.n, self.basis + other.basis).dim == self.dim

    def basis_matrix(self) -> Matrix:
        """n x k matrix whose columns are the basis vectors."""
        if not self.basis:
            return Matrix._raw([[] for _ in range(self.n)])
        return Matrix.from_columns(self.basis)

    def intersect_kernel(self, A: Matrix) -> Subspace:
        """{x in self : A x = 0}."""
        if not self.basis:
            return self
        B = self.basis_matrix()
        coeffs = kernel(A @ B)
        return Subspace(self.n, [B @ c for c in coeffs.basis])

    def intersect(self, other: Subspace) -> Subspace:
        if not self.basis or not other.basis:
            return Subspace(self.n)
        # x = B s = C t  ->  [B | -C] (s,t) = 0
        k = self.dim
        M = Matrix._raw([list(rb) + [-x for x in rc] for rb, rc in zip(self.basis_matrix().rows, other.basis_matrix().rows)])
        sols = kernel(M)
        B = self.basis_matrix()
        return Subspace(self.n, [B @ s[:k] for s in sols.basis])

    def is_invariant_under(self, A: Matrix) -> bool:
        return all((A @ v) in self for v in self.basis)

    def __repr__(self):
        return "Subspace(" + ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.basis) + ")"


def rref(M: Matrix) -> tuple[Matrix, int, Subspace]:
    """Reduced row-echelon form, rank and exact kernel."""
    R, rank, _, _ = _eliminate(M)
    return R, rank, kernel(M, _reduced=(R, rank))


def kernel(M: Matrix, _reduced=None) -> Subspace:
    n = M.ncols
    if _reduced is None:
        R, rank, pivots, _ = _eliminate(M)
    else:
        R, rank = _reduced
        pivots = [next(j for j, x in enumerate(R.rows[i]) if not x.is_zero()) for i in range(rank)]
    free = [j for j in range(n) if j not in pivots]
    vecs = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -R.rows[i][f]
        vecs.append(v)
    return Subspace(n, vecs)


def char_poly(M: Matrix) -> Poly:
    """det(x I - M) via Faddeev-LeVerrier."""
    n = M.nrows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = Matrix.zeros(n)
    I = Matrix.identity(n)
    c = ONE
    for k in range(1, n + 1):
        Mk = M @ (Mk + I.scale(c))
        c = -Mk.trace() / k
        coeffs[n - k] = c
    return Poly(coeffs)


def poly_at_matrix(p: Poly, M: Matrix) -> Matrix:
    n = M.nrows
    acc = Matrix.zeros(n)
    I = Matrix.identity(n)
    for c in reversed(p.coeffs):
        acc = acc @ M + I.scale(c)
    return acc


def jordan_structure(M: Matrix, eigen) -> list[int]:
    """Jordan block sizes of M for a real eigenvalue or a complex pair.

    ``eigen`` is a Scalar (real eigenvalue) or a pair (s, p) encoding the
    irreducible quadratic x^2 - s x + p; block sizes count each complex
    block once (so they sum to half the algebraic multiplicity).
    """
    n = M.nrows
    I = Matrix.identity(n)
    if isinstance(eigen, tuple):
        s, p = (Scalar.coerce(x) for x in eigen)
        N = M @ M - M.scale(s) + I.scale(p)
        unit = 2
    else:
        N = M - I.scale(Scalar.coerce(eigen))
        unit = 1
    ranks = [n]
    Nk = I
    for _ in range(n):
        Nk = Nk @ N
        ranks.append(Nk.rank())
        if ranks[-1] == ranks[-2]:
            break
    if ranks[1] == n:
        raise NotAnEigenvalue(f"{eigen} is not an eigenvalue")
    # number of blocks of size >= k is (r_{k-1} - r_k) / unit
    ge = [(ranks[k - 1] - ranks[k]) // unit for k in range(1, len(ranks))]
    ge.append(0)
    sizes = []
    for k in range(1, len(ge)):
        cnt = ge[k - 1] - ge[k]
        sizes.extend([k] * cnt)
    return sorted(sizes, reverse=True)


BIVECTOR_PAIRS = tuple(combinations(range(4), 2))


def exterior_square(A: Matrix) -> Matrix:
    """Derivation action u^v -> Au^v + u^Av on bivectors (basis e12..e34)."""
    n = A.nrows
    pairs = tuple(combinations(range(n), 2))
    index = {p: k for k, p in enumerate(pairs)}
    D = [[ZERO] * len(pairs) for _ in pairs]
    for c, (i, j) in enumerate(pairs):
        for k in range(n):
            for a, b, coef in ((k, j, A.rows[k][i]), (i, k, A.rows[k][j])):
                if a == b or coef.is_zero():
                    continue
                if a < b:
                    D[index[(a, b)]][c] = D[index[(a, b)]][c] + coef
                else:
                    D[index[(b, a)]][c] = D[index[(b, a)]][c] - coef
    return Matrix._raw(D)


def wedge(u, v) -> tuple[Scalar, ...]:
    """Plucker coordinates of u^v in the lexicographic bivector basis."""
    n = len(u)
    return tuple(u[i] * v[j] - u[j] * v[i] for i, j in combinations(range(n), 2))


def plucker_quadric(w) -> Scalar:
    """w^w / (2 e1234): zero exactly for decomposable 4-dim bivectors."""
    p12, p13, p14, p23, p24, p34 = w
    return p12 * p34 - p13 * p24 + p14 * p23


def plucker_polar(w, z) -> Scalar:
    """Symmetric bilinear form with polar(w, w) == plucker_quadric(w)."""
    a = plucker_quadric(tuple(x + y for x, y in zip(w, z)))
    return (a - plucker_quadric(w) - plucker_quadric(z)) / 2


def plane_from_bivector(w) -> Subspace:
    """The 2-plane W with u^v proportional to the decomposable bivector w."""
    # W = {x : x ^ w = 0}; the map x -> x^w is linear into Lambda^3
    rows = []
    # coefficient of e_a^e_b^e_c in x^w for a<b<c
    idx = {p: k for k, p in enumerate(BIVECTOR_PAIRS)}
    for a, b, c in combinations(range(4), 3):
        row = [ZERO] * 4
        # x_a w_bc - x_b w_ac + x_c w_ab
        row[a] = row[a] + w[idx[(b, c)]]
        row[b] = row[b] - w[idx[(a, c)]]
        row[c] = row[c] + w[idx[(a, b)]]
        rows.append(row)
    return kernel(Matrix._raw(rows))


def congruence_diagonalize(G: Matrix) -> tuple[list[Scalar], Matrix]:
    """Return (values, P) with P^T G P diagonal; columns of P are the vectors."""
    n = G.nrows
    A = [list(r) for r in G.rows]
    P = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]

    def col_op(dst, src, f):  # column/row dst += f * src, symmetric
        for r in range(n):
            A[r][dst] = A[r][dst] + f * A[r][src]
        for c in range(n):
            A[dst][c] = A[dst][c] + f * A[src][c]
        for r in range(n):
            P[r][dst] = P[r][dst] + f * P[r][src]

    def swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        A[i], A[j] = A[j], A[i]
        for row in P:
            row[i], row[j] = row[j], row[i]

    for k in range(n):
        if A[k][k].is_zero():
            j = next((j for j in range(k + 1, n) if not A[j][j].is_zero()), None)
            if j is not None:
                swap(k, j)
            else:
                # all remaining diagonal entries vanish: A[k][k] becomes 2*A[k][j]
                j = next((j for j in range(k + 1, n) if not A[k][j].is_zero()), None)
                if j is None:
                    continue
                col_op(k, j, ONE)
        piv = A[k][k]
        for j in range(k + 1, n):
            if not A[k][j].is_zero():
                col_op(j, k, -A[k][j] / piv)
    vals = [A[i][i] for i in range(n)]
    return vals, Matrix._raw(P)


def signature(G: Matrix) -> tuple[int, int]:
    vals, _ = congruence_diagonalize(G)
    return sum(1 for v in vals if v.sign() > 0), sum(1 for v in vals if v.sign() < 0)


def isotropic_vector(G: Matrix, radicand: int | None = None):
    """A nonzero x with x^T G x = 0, or None when G is definite.

    May open Q(sqrt d) when no radicand is active; raises MixedRadicands when
    a second radicand would be required.
    """
    d = radicand_of([*(x for r in G.rows for x in r), Scalar(0, 1, radicand) if radicand else ZERO])
    vals, P = congruence_diagonalize(G)
    cols = P.columns()
    for v, c in zip(vals, cols):
        if v.is_zero():
            return c
    pos = [(v, c) for v, c in zip(vals, cols) if v.sign() > 0]
    neg = [(v, c) for v, c in zip(vals, cols) if v.sign() < 0]
    if not pos or not neg:
        return None
    fallback = None
    for p, e in pos:
        for q, f in neg:
            # x = e + t f with t^2 = p / (-q)
            ratio = p / (-q)
            try:
                t = ratio.sqrt() if ratio.d is None else None
            except MixedRadicands:
                t = None
            if t is None:
                continue
            if t.d is None or t.d == d:
                return tuple(a + t * b for a, b in zip(e, f))
            if d is None and fallback is None:
                fallback = tuple(a + t * b for a, b in zip(e, f))
    if fallback is not None:
        return fallback
    raise MixedRadicands("isotropic vector needs a second radicand")


__all__ = [
    "Matrix",
    "Subspace",
    "vec",
    "rref",
    "kernel",
    "char_poly",
    "poly_at_matrix",
    "jordan_structure",
    "exterior_square",
    "wedge",
    "plucker_quadric",
    "plucker_polar",
    "plane_from_bivector",
    "congruence_diagonalize",
    "signature",
    "isotropic_vector",
    "factor_over_field",
]
