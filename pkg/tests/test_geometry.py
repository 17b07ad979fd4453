from __future__ import annotations

import random
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest

from walkerlab.errors import JacobiFailed
from walkerlab.exactalg import ZERO, Matrix, Scalar, char_poly, jordan_structure
from walkerlab.geometry import analyze, levi_civita
from walkerlab.model import build_model, structure_from_brackets
from walkerlab.oracle import float_geometry, geometry_discrepancy

from conftest import (
    catalog_runs,
    check_identities,
    fuzz_corpus,
    mat,
    model_of,
    nilpotent_model,
    closed_form_reductive_connection,
)

R4 = range(4)


def abelian(g=None):
    st = structure_from_brackets(4, {})
    return build_model(0, st, g or Matrix.diag(1, 1, -1, -1), id="abelian")


# --- connection matrices against closed-form expressions ------------------------------------

@pytest.mark.parametrize("alpha", [F(1), F(-2, 3), F(5, 2)])
@pytest.mark.parametrize("eps", [1, -1])
def test_neutral_family_connection(alpha, eps):
    lam = levi_civita(model_of("thm3.2-i-eps+1" if eps == 1 else "thm3.2-i-eps-1", alpha=alpha))
    a, p, m = alpha, alpha * (1 - eps), alpha * (1 + eps)
    assert lam[0] == mat([[0, 0, 0, 0], [0, 0, a, 0], [0, a, 0, 0], [0, 0, 0, 0]])
    assert lam[1] == mat([[0, 0, p, 0], [0, 0, 0, 0], [p, 0, 0, -m], [0, 0, m, 0]])
    assert lam[3] == mat([[0, 0, 0, 0], [0, 0, -eps * a, 0], [0, -eps * a, 0, 0], [0, 0, 0, 0]])


def test_neutral_family_connection_at_unit_alpha():
    lam = levi_civita(model_of("thm3.2-i-eps+1", alpha=1))
    assert lam[0] == mat([[0, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 0]])
    L2 = lam[1]
    assert L2[0, 2] == L2[2, 0] == ZERO
    assert L2[2, 3] == Scalar(-2) and L2[3, 2] == Scalar(2)


@pytest.mark.parametrize("params", [
    (F(1), F(0), F(0), F(1)),
    (F(-2, 3), F(3), F(1, 2), F(-4)),
    (F(5), F(-1, 3), F(-2), F(3, 2)),
    (F(1, 2), F(2), F(7), F(-1, 3)),
])
def test_reductive_connection_matches_closed_form(params):
    a, b, c, l = params
    lam = levi_civita(model_of("1.3^1:2", a=a, b=b, c=c, l=l))
    assert list(lam) == closed_form_reductive_connection(a, b, c, l)


def test_reductive_lambda3_example():
    lam = levi_civita(model_of("1.3^1:2", a=1, b=0, c=0, l=1))
    assert lam[2] == mat([[-1, F(1, 2), 0, 0], [-1, 0, 0, 0], [0, 0, 0, F(1, 2)], [0, 0, -1, 1]])


@pytest.mark.parametrize("c1,c2,c3", [(1, 0, 0), (F(-3, 2), 2, F(1, 3)), (F(2, 3), F(-1, 2), 4)])
def test_one_one_two_family_connection(c1, c2, c3):
    c1, c2, c3 = F(c1), F(c2), F(c3)
    lam = levi_civita(model_of("thm4.2-item1", c1=c1, c2=c2, c3=c3))
    q = 1 / (2 * c1)
    s = (1 + 2 * c1 ** 2) / (2 * c1)
    assert lam[0] == mat([[0, -q, q, 0], [q, 0, 0, 0], [q, 0, 0, 0], [0, 0, 0, 0]])
    L2 = mat([[0, -c2, c2, 0], [c2, 0, s, c3], [c2, s, 0, c3], [0, c3, -c3, 0]])
    assert lam[1] == L2 and lam[2] == -L2
    # the last matrix is only compared on the entries that are skew-consistent
    L4 = lam[3]
    assert (L4[2, 3], L4[3, 1], L4[3, 2]) == (Scalar(-c1), Scalar(-c1), Scalar(c1))


def test_abelian_connection_vanishes():
    geo = analyze(abelian())
    assert all(L.is_zero() for L in geo.connection)
    assert all(R.is_zero() for row in geo.curvature.ops for R in row)
    assert geo.ricci.rho.is_zero() and geo.ricci.Q.is_zero() and geo.ricci.tau == ZERO
    assert geo.conformally_flat and geo.ricci_parallel and geo.locally_symmetric


# --- identities over every catalog run and the fuzz corpus ---------------------------------

def test_identities_on_catalog_runs():
    runs = catalog_runs()
    assert len(runs) == 39
    for _, _, m, geo in runs:
        check_identities(m, geo)


def test_identities_on_fuzz_models():
    corpus = fuzz_corpus()
    assert len(corpus) == 100
    for m, geo in corpus:
        check_identities(m, geo)


def test_every_catalog_run_is_conformally_flat_and_matches_float():
    for eid, p, m, geo in catalog_runs():
        assert geo.conformally_flat, (eid, p)
        assert geometry_discrepancy(geo, float_geometry(m)) < 1e-9


def test_curvature_float_crosscheck_neutral():
    m = model_of("thm3.2-i-eps+1", alpha=1)
    geo, fgeo = analyze(m), float_geometry(m)
    R = np.array([[geo.curvature.ops[i][j].to_float() for j in R4] for i in R4])
    assert np.allclose(R, fgeo["R"], atol=1e-12)
    assert np.abs(R).max() > 0


def test_reductive_bianchi_at_several_parameters():
    for a, b, c, l in [(1, 0, 0, 1), (F(-2), F(1, 3), F(3), F(-1, 2)), (F(3, 2), F(-4), F(1), F(2))]:
        m = model_of("1.3^1:2", a=a, b=b, c=c, l=l)
        check_identities(m, analyze(m))


# --- Ricci data and flags ----------------------------------------------------------------

def test_one_one_two_ricci_operator():
    geo = analyze(model_of("thm4.2-item1", c1=1, c2=0, c3=0))
    Q = geo.ricci.Q
    assert char_poly(Q) == char_poly(Matrix.zeros(4))  # all eigenvalues equal (to 0)
    assert jordan_structure(Q, ZERO) != [1, 1, 1, 1]  # not diagonalizable
    assert not geo.ricci_parallel


def test_reductive_ricci_operator_degenerate():
    geo = analyze(model_of("1.3^1:2", a=1, b=0, c=0, l=1))
    assert geo.ricci.Q.det() == ZERO
    assert not geo.ricci.Q.is_zero()


def test_perturbed_metric_is_not_conformally_flat():
    m = model_of("thm3.2-i-eps+1", alpha=1).with_metric(Matrix.diag(1, 2, -1, -1))
    geo = analyze(m)
    assert not geo.conformally_flat
    assert np.linalg.norm(float_geometry(m)["W"]) > 1e-6


def test_flags_of_group_examples():
    geo = analyze(model_of("thm4.2-item2"))
    assert (geo.ricci_parallel, geo.locally_symmetric) == (False, False)
    geo = analyze(model_of("thm4.1-(1,3)", c1=F(-1, 2), c2=1, sgn=1))
    assert not geo.ricci_parallel and geo.conformally_flat


def test_locally_symmetric_implies_ricci_parallel():
    for _, _, _, geo in catalog_runs():
        assert not geo.locally_symmetric or geo.ricci_parallel


@pytest.mark.parametrize("scale", [F(2), F(-1), F(1, 3)])
def test_scaling_metric(scale):
    """g -> c g leaves the connection unchanged and scales Q by 1/c."""
    for eid, p, m, geo in catalog_runs()[::3]:
        m2 = m.with_metric(m.metric.scale(scale))
        geo2 = analyze(m2)
        assert list(geo2.connection) == list(geo.connection)
        assert geo2.ricci.Q == geo.ricci.Q.scale(1 / Scalar(scale))
        assert geo2.conformally_flat == geo.conformally_flat


# --- Jacobi perturbation fuzz ---------------------------------------------------------------

def test_jacobi_perturbation_rejected():
    """Perturbing one structure constant of a valid nilpotent algebra breaks Jacobi
    unless the perturbed triple stays inside the nilpotent pattern."""
    rng = random.Random(7)
    rejected = 0
    for _ in range(60):
        base = nilpotent_model(rng)
        i, j, k = 0, 3, rng.randrange(4)  # [e1,e4] is zero in the pattern; give it a component
        rows = {(a, b): list(base.structure[a][b]) for a in R4 for b in R4 if a < b}
        rows[(i, j)][k] = rows[(i, j)][k] + Scalar(rng.choice([1, -1, 2]))
        st = structure_from_brackets(4, rows)
        try:
            build_model(0, st, base.metric)
        except JacobiFailed:
            rejected += 1
            continue
        # accepted perturbations must really satisfy Jacobi numerically
        C = np.array([[[float(c) for c in v] for v in row] for row in st])
        ad = [C[x].T for x in R4]
        for x, y in product(R4, repeat=2):
            assert np.allclose(ad[x] @ ad[y] - ad[y] @ ad[x], np.einsum("k,kpq->pq", C[x, y], np.array(ad)))
    assert rejected > 0
