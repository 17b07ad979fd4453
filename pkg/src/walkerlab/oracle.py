"""Double-precision cross-check of the exact pipeline.

Geometry is recomputed with numpy from the structure constants; the Walker
search takes a different route from the exact one: common eigenvectors come
from random combinations of the family with subspace refinement, and null
planes come from the self-dual / anti-self-dual split of bivectors (stored
as antisymmetric 4x4 matrices).
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .model.homogeneous import HomogeneousModel

TOL = 1e-9
_RANK_TOL = 1e-7


def _f(x) -> float:
    return float(x)


def _arrays(model: HomogeneousModel):
    n, h = model.n, model.dim_h
    C = np.array([[[_f(c) for c in vec] for vec in row] for row in model.structure], dtype=float)
    g = np.array([[_f(x) for x in row] for row in model.metric.rows], dtype=float)
    return C, g, h


# --- geometry ------------------------------------------------------------------

def float_geometry(model: HomogeneousModel) -> dict:
    """Lambda, R (operator and lowered), rho, Q, tau and W as numpy arrays."""
    C, g, h = _arrays(model)
    ginv = np.linalg.inv(g)
    Bm = C[h:, h:, h:]  # [u_i,u_j]_m components
    Bh = C[h:, h:, :h]
    GB = np.einsum("ija,ak->ijk", Bm, g)
    low = 0.5 * (GB - np.einsum("jki->ijk", GB) + np.einsum("kij->ijk", GB))
    lam = np.einsum("pk,ijk->ipj", ginv, low)  # lam[i][p, j]
    H = np.array([C[b, h:, h:].T for b in range(h)]).reshape(h, 4, 4)
    R = np.zeros((4, 4, 4, 4))
    for i in range(4):
        for j in range(4):
            R[i, j] = (lam[i] @ lam[j] - lam[j] @ lam[i]
                       - np.einsum("a,apq->pq", Bm[i, j], lam)
                       - (np.einsum("b,bpq->pq", Bh[i, j], H) if h else 0.0))
    Rlow = np.einsum("ijpk,pl->ijkl", R, g)
    rho = np.einsum("iyiz->yz", R)
    Q = ginv @ rho
    tau = float(np.trace(Q))
    W = (Rlow
         - 0.5 * (np.einsum("il,jk->ijkl", g, rho) + np.einsum("jk,il->ijkl", g, rho)
                  - np.einsum("ik,jl->ijkl", g, rho) - np.einsum("jl,ik->ijkl", g, rho))
         + tau / 6 * (np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)))
    return {"lambda": lam, "R": R, "R_lowered": Rlow, "rho": rho, "Q": Q, "tau": tau, "W": W, "H": H, "g": g}


def geometry_discrepancy(geo, fgeo: dict) -> float:
    """Largest entry-wise |exact - float| over Lambda, R, rho, Q, tau and W."""
    lam = np.array([M.to_float() for M in geo.connection])
    R = np.array([[geo.curvature.ops[i][j].to_float() for j in range(4)] for i in range(4)])
    Rl = np.array(geo.curvature.lowered, dtype=object).astype(float)
    W = np.array(geo.weyl, dtype=object).astype(float)
    diffs = [
        np.max(np.abs(lam - fgeo["lambda"])),
        np.max(np.abs(R - fgeo["R"])),
        np.max(np.abs(Rl - fgeo["R_lowered"])),
        np.max(np.abs(geo.ricci.rho.to_float() - fgeo["rho"])),
        np.max(np.abs(geo.ricci.Q.to_float() - fgeo["Q"])),
        abs(float(geo.ricci.tau) - fgeo["tau"]),
        np.max(np.abs(W - fgeo["W"])),
    ]
    return float(max(diffs))


# --- numeric common eigenspaces ------------------------------------------------

def _null(A: np.ndarray, tol: float = _RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of A."""
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, s, vh = np.linalg.svd(A)
    scale = max(1.0, float(s[0]) if s.size else 0.0)
    r = int(np.sum(s > tol * scale))
    return vh[r:].T


def _polish(F, K: np.ndarray) -> tuple[np.ndarray, float]:
    """Recompute a common eigenspace from Rayleigh-quotient eigenvalues."""
    for _ in range(3):
        k = K.shape[1]
        oms = [np.trace(K.T @ A @ K) / k for A in F]
        K2 = _null(np.vstack([A - w * np.eye(A.shape[0]) for A, w in zip(F, oms)]))
        if K2.shape[1] != k:
            break
        K = K2
    k = K.shape[1]
    res = max((np.linalg.norm(A @ K - K * (np.trace(K.T @ A @ K) / k)) for A in F), default=0.0)
    return K, float(res)


def _common(F, K: np.ndarray, rng, depth: int = 0) -> list[np.ndarray]:
    """Common eigenspaces of the family F inside span(K) (orthonormal columns)."""
    n = K.shape[0]
    if K.shape[1] == 0 or depth > 8:
        return []
    # shrink K to the largest subspace mapped into itself by every member
    for _ in range(n + 1):
        P = np.eye(n) - K @ K.T
        K2 = K @ _null(np.vstack([P @ A @ K for A in F]))
        if K2.shape[1] == 0:
            return []
        if K2.shape[1] == K.shape[1]:
            break
        K, _ = np.linalg.qr(K2)
    comp = [K.T @ A @ K for A in F]
    k = K.shape[1]
    if all(np.linalg.norm(c - np.trace(c) / k * np.eye(k)) < _RANK_TOL * max(1.0, np.linalg.norm(c)) for c in comp):
        return [K]
    M = sum(rng.standard_normal() * c for c in comp)
    ev = np.linalg.eigvals(M)
    scale = max(1.0, float(np.max(np.abs(ev))))
    seen: list[float] = []
    out = []
    for z in ev:
        if abs(z.imag) > 1e-6 * scale:
            continue
        mu = z.real
        if any(abs(mu - s) < 1e-5 * scale for s in seen):
            continue
        seen.append(mu)
        cluster = [w.real for w in ev if abs(w.imag) <= 1e-6 * scale and abs(w.real - mu) < 1e-5 * scale]
        mu = float(np.mean(cluster))
        V = _null(M - mu * np.eye(k), 1e-6)
        if V.shape[1] == 0:
            continue
        out.extend(_common(F, K @ V, rng, depth + 1))
    return out


def common_eigenspaces_float(F, n: int, seed: int = 0) -> list[tuple[np.ndarray, float]]:
    rng = np.random.default_rng(seed)
    spaces = _common(list(F), np.eye(n), rng)
    return [_polish(F, K) for K in spaces]


# --- null subspaces inside an eigenspace ---------------------------------------

def _null_directions(G: np.ndarray, tol: float) -> tuple[list[np.ndarray], bool]:
    """Null directions of the form G: finite list, or (samples, True) if infinite."""
    k = G.shape[0]
    w, V = np.linalg.eigh((G + G.T) / 2)
    scale = max(1.0, float(np.max(np.abs(w))))
    pos = [i for i in range(k) if w[i] > tol * scale]
    neg = [i for i in range(k) if w[i] < -tol * scale]
    zero = [i for i in range(k) if i not in pos and i not in neg]
    if pos and neg:
        samples = []
        for i in pos:
            for j in neg:
                for s in (1.0, -1.0):
                    samples.append(V[:, i] * np.sqrt(-w[j]) + s * V[:, j] * np.sqrt(w[i]))
        infinite = k >= 3 or bool(zero)
        return samples + [V[:, i] for i in zero], infinite
    return [V[:, i] for i in zero], len(zero) >= 2


# --- bivectors as antisymmetric matrices ---------------------------------------

_PAIRS = tuple(combinations(range(4), 2))


def _bivector_matrix(w: np.ndarray) -> np.ndarray:
    B = np.zeros((4, 4))
    for (i, j), x in zip(_PAIRS, w):
        B[i, j], B[j, i] = x, -x
    return B


def _bivector_vector(B: np.ndarray) -> np.ndarray:
    return np.array([B[i, j] for i, j in _PAIRS])


def induced_action(A: np.ndarray) -> np.ndarray:
    """6x6 matrix of B -> A B + B A^T on antisymmetric matrices."""
    cols = []
    for k in range(6):
        e = np.zeros(6)
        e[k] = 1.0
        B = _bivector_matrix(e)
        cols.append(_bivector_vector(A @ B + B @ A.T))
    return np.array(cols).T


def _levi_civita_pairing() -> np.ndarray:
    P = np.zeros((6, 6))
    for a, (i, j) in enumerate(_PAIRS):
        for b, (k, l) in enumerate(_PAIRS):
            if len({i, j, k, l}) == 4:
                perm = (i, j, k, l)
                inv = sum(1 for x in range(4) for y in range(x + 1, 4) if perm[x] > perm[y])
                P[a, b] = -1.0 if inv % 2 else 1.0
    return P


def duality_split(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of the +/- eigenspaces of the Hodge-type operator."""
    G2 = np.array([[g[i, k] * g[j, l] - g[i, l] * g[j, k] for (k, l) in _PAIRS] for (i, j) in _PAIRS])
    M = np.linalg.solve(G2, _levi_civita_pairing())
    s = np.sqrt(abs(np.trace(M @ M) / 6))
    plus = _null(M - s * np.eye(6))
    minus = _null(M + s * np.eye(6))
    return plus, minus


def _pfaffian_form(E: np.ndarray) -> np.ndarray:
    """Gram matrix of w -> Pf(w) (the decomposability quadric) on span(E)."""
    J = 0.5 * _levi_civita_pairing()
    return E.T @ J @ E


def _plane_of(w: np.ndarray) -> np.ndarray:
    u, s, _ = np.linalg.svd(_bivector_matrix(w))
    return u[:, :2]


# --- witness refinement ----------------------------------------------------------

def _witness_residual(F, g: np.ndarray, Y: np.ndarray) -> np.ndarray:
    Q, _ = np.linalg.qr(Y)
    P = np.eye(Y.shape[0]) - Q @ Q.T
    parts = [(P @ A @ Q).ravel() for A in F]
    parts.append((Q.T @ g @ Q)[np.triu_indices(Q.shape[1])])
    return np.concatenate(parts)


def refine_witness(F, g: np.ndarray, W: np.ndarray, steps: int = 8) -> np.ndarray:
    """Gauss-Newton on the graph chart Y = W + W_perp X for the conditions
    "Y is invariant under every member" and "Y is totally null".

    Eigenvector recovery inside defective blocks only reaches about eps^(1/k);
    these conditions are usually first order jointly, so a few steps restore
    full precision.  The refinement is kept only if it lowers the residual.
    """
    W, _ = np.linalg.qr(W)
    n, k = W.shape
    Wp = np.linalg.svd(np.eye(n) - W @ W.T)[0][:, : n - k]
    best, best_res = W, float(np.linalg.norm(_witness_residual(F, g, W)))
    X = np.zeros((n - k, k))
    for _ in range(steps):
        Y = W + Wp @ X
        r = _witness_residual(F, g, Y)
        J = np.empty((r.size, X.size))
        h = 1e-7
        for idx in range(X.size):
            D = np.zeros(X.size)
            D[idx] = h
            J[:, idx] = (_witness_residual(F, g, W + Wp @ (X + D.reshape(X.shape))) - r) / h
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        X = X + step.reshape(X.shape)
        Y = W + Wp @ X
        res = float(np.linalg.norm(_witness_residual(F, g, Y)))
        if res < best_res:
            best, best_res = np.linalg.qr(Y)[0], res
        if np.linalg.norm(step) < 1e-15:
            break
    return best


# --- the float Walker search ---------------------------------------------------

def float_walker(model: HomogeneousModel, seed: int = 0, tol: float = TOL) -> dict:
    """Approximate line/plane verdicts with witnesses as float lists."""
    fg = float_geometry(model)
    g = fg["g"]
    F = [fg["lambda"][i] for i in range(4)] + [fg["H"][j] for j in range(model.dim_h)]
    lines, line_inf, residual = [], False, 0.0
    for K, res in common_eigenspaces_float(F, 4, seed):
        residual = max(residual, res)
        dirs, inf = _null_directions(K.T @ g @ K, 1e-7)
        line_inf = line_inf or inf
        for c in dirs:
            x = refine_witness(F, g, (K @ c)[:, None])[:, 0]
            x = x / np.linalg.norm(x)
            if abs(x @ g @ x) < 1e-7 and not any(_same_span(x[:, None], y[:, None]) for y in lines):
                lines.append(x)
    evals = np.linalg.eigvalsh(g)
    p, q = int(np.sum(evals > 0)), int(np.sum(evals < 0))
    planes, plane_inf, reason = [], False, None
    if min(p, q) < 2:
        reason = "max-isotropic-dim" if min(p, q) == 1 else "definite"
    else:
        D = [induced_action(A) for A in F]
        for half in duality_split(g):
            restricted = [half.T @ A @ half for A in D]
            for K, res in common_eigenspaces_float(restricted, half.shape[1], seed + 1):
                residual = max(residual, res)
                E = half @ K
                dirs, inf = _null_directions(_pfaffian_form(E), 1e-7)
                plane_inf = plane_inf or inf
                for c in dirs:
                    W = refine_witness(F, g, _plane_of(E @ c))
                    if np.max(np.abs(W.T @ g @ W)) < 1e-7 and not any(_same_span(W, V) for V in planes):
                        planes.append(W)
    return {
        "line": {"verdict": "exists" if lines or line_inf else "none",
                 "witnesses": [x.tolist() for x in lines], "infinite": line_inf},
        "plane": {"verdict": "exists" if planes or plane_inf else "none",
                  "witnesses": [W.T.tolist() for W in planes], "infinite": plane_inf, "reason": reason},
        "residual": residual,
        "approximate": True,
    }


def _same_span(A: np.ndarray, B: np.ndarray, tol: float = 1e-6) -> bool:
    if A.shape[1] != B.shape[1]:
        return False
    QA, _ = np.linalg.qr(A)
    QB, _ = np.linalg.qr(B)
    return float(np.linalg.norm(QA @ QA.T - QB @ QB.T)) < tol


def _span_of(sub) -> np.ndarray:
    return np.array([[float(x) for x in v] for v in sub.basis]).T


def walker_agreement(line, plane, approx: dict) -> bool:
    """Exact and float verdicts agree; finite witness sets match as subspaces.

    Indeterminate exact verdicts are not counted as disagreement: the float
    result is the fallback there.
    """
    for exact, fl in ((line, approx["line"]), (plane, approx["plane"])):
        if exact.verdict == "indeterminate-exact":
            continue
        if exact.verdict != fl["verdict"]:
            return False
        if exact.infinite or fl["infinite"]:
            if exact.infinite != fl["infinite"]:
                return False
            continue
        fw = [np.array(w, dtype=float).T if np.ndim(w) == 2 else np.array(w, dtype=float)[:, None]
              for w in fl["witnesses"]]
        ew = [_span_of(s) for s in exact.witnesses]
        if len(fw) != len(ew):
            return False
        if not all(any(_same_span(e, f) for f in fw) for e in ew):
            return False
    return True


__all__ = [
    "TOL",
    "float_geometry",
    "geometry_discrepancy",
    "common_eigenspaces_float",
    "induced_action",
    "duality_split",
    "float_walker",
    "walker_agreement",
]
