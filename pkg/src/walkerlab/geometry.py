"""Levi-Civita connection, curvature, Ricci data and the Weyl tensor of an
invariant metric on a reductive homogeneous space, all in the invariant
frame of m (so every tensor has constant components)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .exactalg import ZERO, Matrix, Scalar
from .model.homogeneous import HomogeneousModel

_R4 = range(4)


@dataclass(frozen=True)
class ConnectionTable:
    """Lambda_i = nabla_{u_i} on m; column j of Lambda_i is nabla_{u_i} u_j."""

    matrices: tuple

    def __getitem__(self, i: int) -> Matrix:
        return self.matrices[i]

    def __iter__(self):
        return iter(self.matrices)

    def along(self, v) -> Matrix:
        """Lambda_v = sum_k v_k Lambda_k."""
        out = Matrix.zeros(4)
        for k, c in enumerate(v):
            if not Scalar.coerce(c).is_zero():
                out = out + self.matrices[k].scale(c)
        return out


@dataclass(frozen=True)
class CurvatureTensor:
    """ops[i][j] is the endomorphism R(u_i, u_j); lowered[i][j][k][h] = g(R(u_i,u_j)u_k, u_h)."""

    ops: tuple
    lowered: tuple

    def vector(self, i: int, j: int, k: int) -> tuple:
        return self.ops[i][j].column(k)


@dataclass(frozen=True)
class RicciData:
    rho: Matrix
    Q: Matrix
    tau: Scalar
    nabla_rho: tuple  # nabla_rho[i][j][k] = (nabla_{u_i} rho)(u_j, u_k)


def _dot_g(g: Matrix, x, y) -> Scalar:
    acc = ZERO
    for a in _R4:
        if x[a].is_zero():
            continue
        for b in _R4:
            if not y[b].is_zero() and not g.rows[a][b].is_zero():
                acc = acc + x[a] * g.rows[a][b] * y[b]
    return acc


def levi_civita(model: HomogeneousModel) -> ConnectionTable:
    """Koszul formula for an invariant metric:
    2 g(Lambda_X Y, Z) = g([X,Y]_m, Z) - g([Y,Z]_m, X) + g([Z,X]_m, Y)."""
    g = model.metric
    ginv = g.inverse()
    gcol = [g.column(k) for k in _R4]
    br = [[model.bracket_m(i, j) for j in _R4] for i in _R4]
    half = Scalar(Fraction(1, 2))

    def gv(v, k):  # g(v, u_k)
        return sum((v[a] * gcol[k][a] for a in _R4 if not v[a].is_zero()), ZERO)

    mats = []
    for i in _R4:
        cols = []
        for j in _R4:
            low = [(gv(br[i][j], k) - gv(br[j][k], i) + gv(br[k][i], j)) * half for k in _R4]
            cols.append(ginv @ tuple(low))
        mats.append(Matrix.from_columns(cols))
    return ConnectionTable(tuple(mats))


def curvature(model: HomogeneousModel, lam: ConnectionTable) -> CurvatureTensor:
    """R(u_i,u_j) = [Lambda_i, Lambda_j] - Lambda_{[u_i,u_j]_m} - rho([u_i,u_j]_h)."""
    iso = model.isotropy
    ops = [[None] * 4 for _ in _R4]
    for i in _R4:
        ops[i][i] = Matrix.zeros(4)
        for j in range(i + 1, 4):
            R = lam[i] @ lam[j] - lam[j] @ lam[i] - lam.along(model.bracket_m(i, j))
            for a, c in enumerate(model.bracket_h(i, j)):
                if not c.is_zero():
                    R = R - iso[a].scale(c)
            ops[i][j] = R
            ops[j][i] = -R
    g = model.metric
    lowered = tuple(
        tuple(
            tuple(tuple((g @ ops[i][j].column(k))[h] for h in _R4) for k in _R4)
            for j in _R4
        )
        for i in _R4
    )
    return CurvatureTensor(tuple(tuple(r) for r in ops), lowered)


def ricci(model: HomogeneousModel, R: CurvatureTensor, lam: ConnectionTable | None = None) -> RicciData:
    """rho(Y,Z) = tr(X -> R(X,Y)Z); Q = g^-1 rho; tau = tr Q;
    (nabla_i rho)(u_j,u_k) = -rho(Lambda_i u_j, u_k) - rho(u_j, Lambda_i u_k)."""
    rho = Matrix([[sum((R.ops[i][y].rows[i][z] for i in _R4), ZERO) for z in _R4] for y in _R4])
    Q = model.metric.inverse() @ rho
    tau = Q.trace()
    if lam is None:
        lam = levi_civita(model)
    nabla = tuple(-(lam[i].T @ rho + rho @ lam[i]) for i in _R4)
    return RicciData(rho, Q, tau, nabla)


def weyl(model: HomogeneousModel, R: CurvatureTensor, rd: RicciData) -> tuple[tuple, bool]:
    """Weyl tensor W_ijkh (same index layout as R.lowered) and the flatness flag."""
    g = model.metric.rows
    rho = rd.rho.rows
    sixth = rd.tau / 6
    half = Scalar(Fraction(1, 2))
    W = [[[[ZERO] * 4 for _ in _R4] for _ in _R4] for _ in _R4]
    flat = True
    for i, j, k, h in product(_R4, repeat=4):
        w = (R.lowered[i][j][k][h]
             - half * (g[i][h] * rho[j][k] + g[j][k] * rho[i][h] - g[i][k] * rho[j][h] - g[j][h] * rho[i][k])
             + sixth * (g[i][h] * g[j][k] - g[i][k] * g[j][h]))
        W[i][j][k][h] = w
        if not w.is_zero():
            flat = False
    return tuple(tuple(tuple(tuple(x) for x in b) for b in a) for a in W), flat


def is_ricci_parallel(rd: RicciData) -> bool:
    return all(m.is_zero() for m in rd.nabla_rho)


def covariant_derivative_curvature(lam: ConnectionTable, R: CurvatureTensor):
    """(nabla_{u_i} R)_{abcd} with Lambda_i acting as a derivation on all four slots."""
    T = R.lowered
    out = []
    for i in _R4:
        L = lam[i].rows  # L[p][a] = component p of Lambda_i u_a
        D = {}
        for a, b, c, d in product(_R4, repeat=4):
            acc = ZERO
            for p in _R4:
                if not L[p][a].is_zero():
                    acc = acc + L[p][a] * T[p][b][c][d]
                if not L[p][b].is_zero():
                    acc = acc + L[p][b] * T[a][p][c][d]
                if not L[p][c].is_zero():
                    acc = acc + L[p][c] * T[a][b][p][d]
                if not L[p][d].is_zero():
                    acc = acc + L[p][d] * T[a][b][c][p]
            D[a, b, c, d] = -acc
        out.append(D)
    return out


def is_locally_symmetric(model: HomogeneousModel, lam: ConnectionTable, R: CurvatureTensor) -> bool:
    return all(v.is_zero() for D in covariant_derivative_curvature(lam, R) for v in D.values())


@dataclass(frozen=True)
class Geometry:
    """Everything computed for one model."""

    model: HomogeneousModel
    connection: ConnectionTable
    curvature: CurvatureTensor
    ricci: RicciData
    weyl: tuple
    conformally_flat: bool
    ricci_parallel: bool
    locally_symmetric: bool


def analyze(model: HomogeneousModel) -> Geometry:
    lam = levi_civita(model)
    R = curvature(model, lam)
    rd = ricci(model, R, lam)
    W, flat = weyl(model, R, rd)
    rp = is_ricci_parallel(rd)
    # nabla R = 0 forces nabla rho = 0, so the expensive check only runs when rho is parallel
    ls = rp and is_locally_symmetric(model, lam, R)
    return Geometry(model, lam, R, rd, W, flat, rp, ls)
