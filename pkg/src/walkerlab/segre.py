"""Segre type of a self-adjoint operator on an indefinite inner-product space.

Each Jordan block carries a sign: for a real eigenvalue l with N = Q - l I,
the symmetric form B_k(x, y) = g(x, N^(k-1) y) on ker N^k has exactly one
+1 or -1 for every size-k block (its sign characteristic) and vanishes on
the rest.  Rendering puts real 1-blocks of sign +1 (spacelike eigenvectors)
left of the comma and everything else (timelike 1-blocks, blocks of size
>= 2 and complex pairs) to its right.  For Lorentzian metrics written with
more negative than positive directions the metric is negated first, so the
single timelike direction always has sign -1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedAlgebraicDegree
from .exactalg import Matrix, Scalar, char_poly, factor_over_field, jordan_structure, kernel, signature

BAR = "̄"


@dataclass(frozen=True)
class SegreBlock:
    size: int
    eigenvalue: object  # Scalar, (s, p) pair for x^2 - s x + p, or a float/complex when approximate
    complex_pair: bool = False
    sign: int | None = None  # +1 spacelike / -1 timelike (after normalization); None for complex
    causal: tuple = (0, 0)  # signature of g on the whole generalized eigenspace

    @property
    def comma_left(self) -> bool:
        return not self.complex_pair and self.size == 1 and self.sign == 1

    @property
    def weight(self) -> int:
        return 2 * self.size if self.complex_pair else self.size


@dataclass(frozen=True)
class SegreType:
    blocks: tuple
    groups: tuple  # tuples of block indices sharing one eigenvalue
    approximate: bool = False
    notes: tuple = field(default=())

    @property
    def render(self) -> str:
        return render(self)

    def block_multiset(self) -> tuple:
        return tuple(sorted((b.size, b.complex_pair) for b in self.blocks))

    def shape(self) -> tuple:
        """Eigenvalue-free description: group structure with sizes and signs."""
        return tuple(sorted(tuple(sorted((self.blocks[i].size, self.blocks[i].complex_pair, self.blocks[i].sign)
                                         for i in grp)) for grp in self.groups))


def _eig_key(ev):
    if isinstance(ev, tuple):
        return (1, float(ev[0]), float(ev[1]))
    if isinstance(ev, complex):
        return (1, ev.real, abs(ev.imag))
    return (0, float(ev), 0.0)


def normalized_metric(g: Matrix) -> Matrix:
    p, q = signature(g)
    return -g if (p == 1 and q == 3) else g


def _restricted_signature(g: Matrix, basis) -> tuple[int, int]:
    if not basis:
        return (0, 0)
    K = Matrix.from_columns(basis)
    return signature(K.T @ g @ K)


def classify(Q: Matrix, g: Matrix) -> SegreType:
    """Exact classification; falls back to floating point (approximate=True)
    when the characteristic polynomial leaves the scalar tower."""
    try:
        return _classify_exact(Q, g)
    except UnsupportedAlgebraicDegree:
        return classify_float(Q.to_float(), g.to_float())


def _classify_exact(Q: Matrix, g: Matrix) -> SegreType:
    n = Q.nrows
    gn = normalized_metric(g)
    d = Q.radicand
    factors = factor_over_field(char_poly(Q), radicand=d, open_radicand=True)
    I = Matrix.identity(n)
    blocks: list[SegreBlock] = []
    groups: list[tuple] = []
    for f in factors:
        start = len(blocks)
        if f.is_linear:
            lam = f.root
            N = Q - I.scale(lam)
            gen = kernel(N ** f.multiplicity).basis
            causal = _restricted_signature(g, gen)
            sizes = jordan_structure(Q, lam)
            for k in sorted(set(sizes), reverse=True):
                K = kernel(N ** k).basis
                B = Matrix.from_columns(K).T @ gn @ (N ** (k - 1)) @ Matrix.from_columns(K)
                pos, neg = signature(B)
                if pos + neg != sizes.count(k):
                    raise ArithmeticError("inconsistent sign characteristic")
                blocks.extend(SegreBlock(k, lam, False, +1, causal) for _ in range(pos))
                blocks.extend(SegreBlock(k, lam, False, -1, causal) for _ in range(neg))
        else:
            s, p = f.pair
            M = Q @ Q - Q.scale(s) + I.scale(p)
            gen = kernel(M ** f.multiplicity).basis
            causal = _restricted_signature(g, gen)
            for k in jordan_structure(Q, (s, p)):
                blocks.append(SegreBlock(k, (s, p), True, None, causal))
        groups.append(tuple(range(start, len(blocks))))
    return _canonical(blocks, groups, approximate=False)


def _canonical(blocks, groups, approximate, notes=()) -> SegreType:
    # blocks sorted: real before complex, descending size, then eigenvalue order
    order = sorted(range(len(blocks)), key=lambda i: (blocks[i].complex_pair, -blocks[i].size,
                                                      _eig_key(blocks[i].eigenvalue), -(blocks[i].sign or 0)))
    remap = {old: new for new, old in enumerate(order)}
    nb = tuple(blocks[i] for i in order)
    ng = tuple(sorted((tuple(sorted(remap[i] for i in grp)) for grp in groups if grp),
                      key=lambda grp: _eig_key(nb[grp[0]].eigenvalue)))
    return SegreType(nb, ng, approximate, tuple(notes))


def _sizes_text(blocks) -> str:
    reals = sorted(b.size for b in blocks if not b.complex_pair)
    cplx = sorted(b.size for b in blocks if b.complex_pair)
    return "".join(str(k) for k in reals) + "".join(f"{k}{k}{BAR}" for k in cplx)


def render(t: SegreType) -> str:
    left_only, straddle, right_only = [], [], []
    for grp in t.groups:
        bl = [t.blocks[i] for i in grp]
        L = [b for b in bl if b.comma_left]
        R = [b for b in bl if not b.comma_left]
        if L and R:
            straddle.append((L, R))
        elif L:
            left_only.append(_group_text(L))
        else:
            right_only.append(_group_text(R))
    if len(straddle) > 1:
        return fallback_text(t)
    left = "".join(left_only)
    right = "".join(right_only)
    if straddle:
        L, R = straddle[0]
        return f"[{left}({_sizes_text(L)},{_sizes_text(R)}){right}]"
    if left and right:
        return f"[{left},{right}]"
    return f"[{left}{right}]"


def _group_text(blocks) -> str:
    s = _sizes_text(blocks)
    return f"({s})" if len(blocks) > 1 else s


def fallback_text(t: SegreType) -> str:
    parts = []
    for gi, grp in enumerate(t.groups):
        for i in grp:
            b = t.blocks[i]
            tag = "c" if b.complex_pair else ("+" if b.sign == 1 else "-")
            parts.append(f"{b.size}{tag}@{gi}")
    causal = ",".join(f"({t.blocks[grp[0]].causal[0]},{t.blocks[grp[0]].causal[1]})" for grp in t.groups)
    return f"blocks={' '.join(parts)}; causal={causal}"


def is_degenerate(Q: Matrix) -> bool:
    return Q.det().is_zero()


def is_two_step_nilpotent(Q: Matrix) -> bool:
    return not Q.is_zero() and (Q @ Q).is_zero()


# --- floating-point fallback --------------------------------------------------

def _num_rank(A: np.ndarray, tol: float) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    scale = max(1.0, float(s[0]) if len(s) else 0.0)
    return int(np.sum(s > tol * scale))


def _null_basis(A: np.ndarray, tol: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(A)
    scale = max(1.0, float(s[0]) if len(s) else 0.0)
    r = int(np.sum(s > tol * scale))
    return vh[r:].conj().T


def classify_float(Q: np.ndarray, g: np.ndarray, tol: float = 1e-7) -> SegreType:
    """Approximate Segre type from double-precision data."""
    Q = np.asarray(Q, dtype=float)
    g = np.asarray(g, dtype=float)
    n = Q.shape[0]
    ev = np.linalg.eigvals(Q)
    pos = int(np.sum(np.linalg.eigvalsh(g) > 0))
    gn = -g if (pos == 1 and n == 4) else g
    clusters: list[list[complex]] = []
    cluster_tol = 1e-4 * max(1.0, float(np.max(np.abs(ev))))
    for z in ev:
        for c in clusters:
            if abs(c[0] - z) < cluster_tol:
                c.append(z)
                break
        else:
            clusters.append([z])
    blocks, groups = [], []
    I = np.eye(n)
    seen_conj = []
    for c in clusters:
        lam = complex(np.mean(c))
        m = len(c)
        start = len(blocks)
        if abs(lam.imag) < cluster_tol:
            lr = lam.real
            N = Q - lr * I
            ranks = [n] + [_num_rank(np.linalg.matrix_power(N, k), tol) for k in range(1, m + 1)]
            ge = [ranks[k - 1] - ranks[k] for k in range(1, m + 1)] + [0]
            gen = _null_basis(np.linalg.matrix_power(N, m), tol)
            causal = _float_sig(gen.T @ g @ gen)
            for k in range(m, 0, -1):
                cnt = ge[k - 1] - ge[k]
                if cnt <= 0:
                    continue
                K = _null_basis(np.linalg.matrix_power(N, k), tol)
                B = K.T @ gn @ np.linalg.matrix_power(N, k - 1) @ K
                w = np.linalg.eigvalsh((B + B.T) / 2)
                big = sorted(w, key=abs, reverse=True)[:cnt]
                for x in big:
                    blocks.append(SegreBlock(k, lr, False, 1 if x > 0 else -1, causal))
        else:
            if any(abs(lam.conjugate() - z) < cluster_tol for z in seen_conj):
                continue
            seen_conj.append(lam)
            s, p = 2 * lam.real, abs(lam) ** 2
            M = Q @ Q - s * Q + p * I
            ranks = [n] + [_num_rank(np.linalg.matrix_power(M, k), tol) for k in range(1, m + 1)]
            ge = [(ranks[k - 1] - ranks[k]) // 2 for k in range(1, m + 1)] + [0]
            gen = _null_basis(np.linalg.matrix_power(M, m), tol).real
            causal = _float_sig(gen.T @ g @ gen) if gen.size else (0, 0)
            for k in range(m, 0, -1):
                for _ in range(max(0, ge[k - 1] - ge[k])):
                    blocks.append(SegreBlock(k, complex(lam.real, abs(lam.imag)), True, None, causal))
        groups.append(tuple(range(start, len(blocks))))
    return _canonical(blocks, groups, approximate=True, notes=("float fallback",))


def _float_sig(G: np.ndarray, tol: float = 1e-9) -> tuple[int, int]:
    if G.size == 0:
        return (0, 0)
    w = np.linalg.eigvalsh((G + G.T) / 2)
    scale = max(1.0, float(np.max(np.abs(w))))
    return int(np.sum(w > tol * scale)), int(np.sum(w < -tol * scale))


def to_dict(t: SegreType) -> dict:
    def ev(b):
        if b.complex_pair and isinstance(b.eigenvalue, tuple):
            return {"s": str(b.eigenvalue[0]), "p": str(b.eigenvalue[1])}
        if isinstance(b.eigenvalue, Scalar):
            return str(b.eigenvalue)
        return repr(b.eigenvalue)

    return {
        "render": t.render,
        "approximate": t.approximate,
        "blocks": [
            {"size": b.size, "eigenvalue": ev(b), "complex": b.complex_pair, "sign": b.sign,
             "causal": list(b.causal), "group": next(gi for gi, grp in enumerate(t.groups) if i in grp)}
            for i, b in enumerate(t.blocks)
        ],
    }
