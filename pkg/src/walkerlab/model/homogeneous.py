"""Validated homogeneous models g = h + m built from catalog entries."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import (
    ConstraintViolated,
    JacobiFailed,
    MetricDegenerate,
    MetricNotIsotropyInvariant,
    ModelError,
    NotReductive,
    StubEntry,
    UnboundParameter,
    WalkerlabError,
)
from ..exactalg import ZERO, Matrix, Scalar, radicand_of
from ..exactalg import signature as form_signature
from .catalog import CatalogEntry
from .expr import eval_expr


@dataclass(frozen=True)
class HomogeneousModel:
    """Structure constants of g = h + m plus an invariant metric on m.

    Basis order of g is h first (indices 0..dim_h-1), then m.  ``structure``
    holds c[i][j] as a tuple of length dim_h+4 with [b_i, b_j] = sum_k c[i][j][k] b_k.
    """

    dim_h: int
    structure: tuple
    metric: Matrix
    id: str = ""
    params: Mapping[str, Fraction] = field(default_factory=dict)
    names: tuple = ()

    dim_m = 4

    @property
    def n(self) -> int:
        return self.dim_h + 4

    def bracket(self, i: int, j: int) -> tuple:
        return self.structure[i][j]

    def bracket_m(self, i: int, j: int) -> tuple:
        """m-component of [u_i, u_j] (indices 0..3 inside m)."""
        return self.structure[self.dim_h + i][self.dim_h + j][self.dim_h:]

    def bracket_h(self, i: int, j: int) -> tuple:
        return self.structure[self.dim_h + i][self.dim_h + j][: self.dim_h]

    @property
    def isotropy(self) -> tuple:
        """H_a = ad(h_a) restricted to m, one 4x4 matrix per basis element of h."""
        mats = []
        k = self.dim_h
        for a in range(k):
            cols = [self.structure[a][k + b][k:] for b in range(4)]
            mats.append(Matrix.from_columns(cols))
        return tuple(mats)

    @property
    def signature(self) -> tuple[int, int]:
        return form_signature(self.metric)

    @property
    def radicand(self) -> int | None:
        vals = [x for row in self.metric.rows for x in row]
        for row in self.structure:
            for vec in row:
                vals.extend(vec)
        return radicand_of(vals)

    @property
    def m_names(self) -> tuple:
        if self.names:
            return self.names[self.dim_h:]
        return ("e1", "e2", "e3", "e4") if self.dim_h == 0 else ("u1", "u2", "u3", "u4")

    def with_metric(self, metric: Matrix) -> HomogeneousModel:
        return build_model(self.dim_h, self.structure, metric, id=self.id, params=self.params, names=self.names)


def _zero_vec(n: int) -> tuple:
    return tuple(ZERO for _ in range(n))


def structure_from_brackets(n: int, brackets: Mapping[tuple[int, int], Sequence]) -> tuple:
    """Antisymmetric structure-constant table from a partial bracket map."""
    table = [[list(_zero_vec(n)) for _ in range(n)] for _ in range(n)]
    for (i, j), vec in brackets.items():
        if i == j:
            raise ModelError("bracket of a basis element with itself")
        for k, c in enumerate(vec):
            c = Scalar.coerce(c)
            table[i][j][k] = table[i][j][k] + c
            table[j][i][k] = table[j][i][k] - c
    return tuple(tuple(tuple(v) for v in row) for row in table)


def jacobi_violations(structure: tuple) -> list[tuple[int, int, int]]:
    """Triples i<j<k on which the Jacobi identity fails."""
    n = len(structure)

    def br(u, v):
        out = [ZERO] * n
        for a, ua in enumerate(u):
            if ua.is_zero():
                continue
            for b, vb in enumerate(v):
                if vb.is_zero():
                    continue
                coef = ua * vb
                for k, c in enumerate(structure[a][b]):
                    if not c.is_zero():
                        out[k] = out[k] + coef * c
        return out

    basis = [[Scalar(1) if t == s else ZERO for t in range(n)] for s in range(n)]
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s1 = br(structure[i][j], basis[k])
                s2 = br(structure[j][k], basis[i])
                s3 = br(structure[k][i], basis[j])
                if any(not (x + y + z).is_zero() for x, y, z in zip(s1, s2, s3)):
                    bad.append((i, j, k))
    return bad


def build_model(dim_h: int, structure: tuple, metric: Matrix, *, id: str = "",
                params: Mapping[str, Fraction] | None = None, names: tuple = ()) -> HomogeneousModel:
    """Validate and wrap raw data; raises a ModelError subclass on failure."""
    n = dim_h + 4
    if len(structure) != n or any(len(r) != n or any(len(v) != n for v in r) for r in structure):
        raise ModelError(f"structure table must be {n}x{n}x{n}")
    if metric.shape != (4, 4):
        raise ModelError("metric must be 4x4")
    if not metric.is_symmetric():
        raise ModelError("metric is not symmetric")
    bad = jacobi_violations(structure)
    if bad:
        label = lambda t: ",".join(names[x] if names else str(x + 1) for x in t)
        raise JacobiFailed(f"Jacobi identity fails on {len(bad)} triple(s), first ({label(bad[0])})")
    if metric.det().is_zero():
        raise MetricDegenerate("metric is degenerate (det = 0)")
    for a in range(dim_h):
        for b in range(dim_h):
            if any(not c.is_zero() for c in structure[a][b][dim_h:]):
                raise NotReductive("h is not a subalgebra: [h,h] has an m-component")
        for b in range(dim_h, n):
            if any(not c.is_zero() for c in structure[a][b][:dim_h]):
                raise NotReductive("[h,m] has an h-component")
    model = HomogeneousModel(dim_h, structure, metric, id=id, params=dict(params or {}), names=names)
    for idx, H in enumerate(model.isotropy):
        if not (H.T @ metric + metric @ H).is_zero():
            raise MetricNotIsotropyInvariant(f"metric is not invariant under isotropy generator {idx + 1}")
    return model


def evaluation_env(entry: CatalogEntry, params: Mapping[str, object]) -> dict[str, Scalar]:
    """Bind declared parameters, check them, then evaluate the defines."""
    env: dict[str, Scalar] = {}
    unknown = set(params) - set(entry.params)
    if unknown:
        raise UnboundParameter(f"unknown parameter(s) for {entry.id}: {', '.join(sorted(unknown))}")
    for p in entry.params:
        if p not in params:
            raise UnboundParameter(f"parameter {p} of {entry.id} is not bound")
        env[p] = Scalar.coerce(params[p])
    for c in entry.constraints:
        try:
            ok = c.holds(env)
        except WalkerlabError as exc:
            raise ConstraintViolated(f"constraint {c} cannot be evaluated: {exc}") from None
        if not ok:
            raise ConstraintViolated(f"constraint {c} violated")
    for name, e in entry.defines:
        env[name] = eval_expr(e, env)
    return env


def instantiate(entry: CatalogEntry, params: Mapping[str, object] | None = None) -> HomogeneousModel:
    """Evaluate an entry at a parameter assignment and validate the result."""
    if not entry.is_full:
        raise StubEntry(f"{entry.id} is a metric-only stub; attach brackets to instantiate it")
    env = evaluation_env(entry, params or {})
    names = entry.basis_symbols
    index = {s: i for i, s in enumerate(names)}
    n = len(names)
    brackets = {}
    for a, b, combo in entry.brackets:
        vec = [ZERO] * n
        for sym, coef in combo:
            vec[index[sym]] = vec[index[sym]] + eval_expr(coef, env)
        brackets[(index[a], index[b])] = vec
    structure = structure_from_brackets(n, brackets)
    rows = [[ZERO] * 4 for _ in range(4)]
    for (i, j), e in entry.metric:
        v = eval_expr(e, env)
        rows[i - 1][j - 1] = v
        rows[j - 1][i - 1] = v
    env_out = {k: v.to_fraction() for k, v in env.items() if k in entry.params}
    return build_model(entry.dim_h, structure, Matrix(rows), id=entry.id, params=env_out, names=names)


def signature(model: HomogeneousModel) -> tuple[int, int]:
    return model.signature


# --- parameter sampling ------------------------------------------------------

_POOL = sorted({Fraction(p, q) for p in range(-4, 5) for q in (1, 2, 3)} - {Fraction(0)}) + [Fraction(0)]


def random_assignment(entry: CatalogEntry, rng: random.Random, attempts: int = 200) -> dict[str, Fraction]:
    """Small random rationals satisfying the constraints, rejection-sampled.

    Zero is drawn with some probability so conditional loci are hit too; the
    assignment must also instantiate cleanly (full entries).
    """
    last: Exception | None = None
    for _ in range(attempts):
        cand = {}
        for p in entry.params:
            cand[p] = Fraction(0) if rng.random() < 0.1 else rng.choice(_POOL[:-1])
        try:
            if entry.is_full:
                instantiate(entry, cand)
            else:
                evaluation_env(entry, cand)
        except WalkerlabError as exc:
            last = exc
            continue
        return cand
    raise ConstraintViolated(f"no admissible parameters found for {entry.id}: {last}")


def trial_assignments(entry: CatalogEntry, seed: int, trials: int) -> list[dict[str, Fraction]]:
    """Reproducible assignments: declared samples first, then seeded random draws."""
    out = [dict(s) for s in entry.samples][:trials]
    rng = random.Random(f"{seed}:{entry.id}")
    while len(out) < trials:
        if entry.samples:
            out.append(dict(entry.samples[len(out) % len(entry.samples)]))
        else:
            out.append(random_assignment(entry, rng))
    return out
