from __future__ import annotations

import random
from itertools import product
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from walkerlab.exactalg import ZERO, Matrix, Scalar
from walkerlab.geometry import analyze
from walkerlab.model import builtin_catalog, build_model, find_entry, instantiate, structure_from_brackets, trial_assignments

settings.register_profile("walkerlab", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("walkerlab")

F = Fraction


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()


def entry(eid: str):
    e = find_entry(builtin_catalog(), eid)
    assert e is not None, eid
    return e


def model_of(eid: str, **params):
    return instantiate(entry(eid), {k: F(v) for k, v in params.items()})


def mat(rows) -> Matrix:
    return Matrix([[Scalar.coerce(F(x)) if not isinstance(x, Scalar) else x for x in r] for r in rows])


def full_runs(seed: int = 0, trials: int = 3):
    """(entry id, params, model) for every full built-in entry at its trial parameters."""
    out = []
    for e in builtin_catalog():
        if not e.is_full:
            continue
        for p in trial_assignments(e, seed, trials):
            out.append((e.id, p, instantiate(e, p)))
    return out


_RUNS = None


def catalog_runs():
    global _RUNS
    if _RUNS is None:
        _RUNS = [(eid, p, m, analyze(m)) for eid, p, m in full_runs()]
    return _RUNS


def nilpotent_model(rng: random.Random):
    """Random 4-dim nilpotent Lie algebra (upper triangular brackets) with a random
    nondegenerate metric; Jacobi holds for every choice of a, b, c, d."""
    pool = [F(p, q) for p in range(-3, 4) for q in (1, 2)]
    a, b, c, d = (rng.choice(pool) for _ in range(4))
    brackets = {(0, 1): [0, 0, a, b], (0, 2): [0, 0, 0, c], (1, 2): [0, 0, 0, d]}
    st = structure_from_brackets(4, {k: [Scalar.coerce(x) for x in v] for k, v in brackets.items()})
    while True:
        rows = [[F(0)] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(i, 4):
                x = rng.choice([-2, -1, 0, 0, 1, 2]) if i != j else rng.choice([-2, -1, 1, 2, 0])
                rows[i][j] = rows[j][i] = F(x)
        g = mat(rows)
        if not g.det().is_zero():
            return build_model(0, st, g, id="nilpotent-fuzz")


_FUZZ = None


def fuzz_corpus(count: int = 100, seed: int = 1234):
    """(model, geometry) for the shared 100-model nilpotent fuzz corpus."""
    global _FUZZ
    if _FUZZ is None:
        rng = random.Random(seed)
        models = [nilpotent_model(rng) for _ in range(count)]
        _FUZZ = [(m, analyze(m)) for m in models]
    return _FUZZ


R4 = range(4)


def closed_form_reductive_connection(a, b, c, l):
    """The four connection matrices of the 1.3^1:2 pair as closed-form functions
    of (a, b, c, l), written out independently of the Koszul computation."""
    h = (l + 1) / 2
    k = -(c * l + c + b) / (2 * a)
    L1 = [[0, 0, h, 0], [0, 0, 0, h], [0, 0, 0, 0], [0, 0, 0, 0]]
    L2 = [[0, 0, F(1, 2), 0], [0, 0, 0, F(1, 2)], [0, 0, 0, 0], [0, 0, 0, 0]]
    L3 = [[-h, F(1, 2), 0, c / (2 * a)], [-l, 0, c * l / a, k], [0, 0, 0, F(1, 2)], [0, 0, -l, h]]
    L4 = [[0, 0, c / (2 * a), 0], [h, -F(1, 2), k, 0], [0, 0, F(1, 2), 0], [0, 0, h, 0]]
    return [mat(L) for L in (L1, L2, L3, L4)]


def check_identities(m, geo):
    """Exact torsion, compatibility, curvature symmetry, Bianchi, Ricci and Weyl identities."""
    g = m.metric
    lam = geo.connection
    for i in R4:
        assert (lam[i].T @ g + g @ lam[i]).is_zero(), "metric compatibility"
        for j in R4:
            lhs = tuple(x - y for x, y in zip(lam[i].column(j), lam[j].column(i)))
            assert lhs == tuple(m.bracket_m(i, j)), "torsion"
    T = geo.curvature.lowered
    ops = geo.curvature.ops
    for i, j, k, h in product(R4, repeat=4):
        assert T[i][j][k][h] == -T[j][i][k][h]
        assert T[i][j][k][h] == -T[i][j][h][k]
        assert T[i][j][k][h] == T[k][h][i][j]
    for i, j, k in product(R4, repeat=3):
        s = tuple(a + b + c for a, b, c in zip(ops[i][j].column(k), ops[j][k].column(i), ops[k][i].column(j)))
        assert all(x.is_zero() for x in s), "first Bianchi"
    rho, Q = geo.ricci.rho, geo.ricci.Q
    assert rho.is_symmetric()
    assert (g @ Q).is_symmetric()
    assert geo.ricci.tau == Q.trace()
    ginv = g.inverse().rows
    W = geo.weyl
    for j, k in product(R4, repeat=2):
        tr = sum((ginv[i][h] * W[i][j][k][h] for i, h in product(R4, repeat=2)), ZERO)
        assert tr.is_zero(), "Weyl trace"
        ric = sum((ginv[i][h] * T[i][j][k][h] for i, h in product(R4, repeat=2)), ZERO)
        assert ric == rho[j, k]
