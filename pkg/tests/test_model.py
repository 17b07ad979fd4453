from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from walkerlab.errors import (
    ConstraintViolated,
    DivisionByZero,
    DuplicateId,
    ExprSyntaxError,
    ExprValueError,
    JacobiFailed,
    MetricDegenerate,
    StubEntry,
    UnboundParameter,
)
from walkerlab.exactalg import Matrix, Scalar
from walkerlab.model import (
    builtin_catalog,
    eval_expr,
    find_entry,
    free_names,
    instantiate,
    merge_catalogs,
    parse_catalog,
    parse_expr,
    select_entries,
    signature,
    to_text,
    trial_assignments,
)
from walkerlab.model.expr import Add, Div, Mul, Neg, Num, Pow, Sqrt, Sub, Var

from conftest import entry, mat, model_of

# --- expressions -----------------------------------------------------------------------

def test_parse_coefficient_tree():
    c1 = Var("c1")
    assert parse_expr("(2*c1^2+1)/(2*c1)") == Div(Add(Mul(Num(2), Pow(c1, Num(2))), Num(1)), Mul(Num(2), c1))


def test_parse_literal_zero():
    assert parse_expr("0") == Num(0)


def test_parse_sqrt_node():
    assert parse_expr("sqrt(2)/(4*c2)") == Div(Sqrt(Num(2)), Mul(Num(4), Var("c2")))


def test_power_is_right_associative():
    assert parse_expr("2^3^2") == Pow(Num(2), Pow(Num(3), Num(2)))
    assert eval_expr(parse_expr("2^3^2"), {}) == Scalar(512)


def test_evaluate_coefficient():
    assert eval_expr(parse_expr("(2*c1^2+1)/(2*c1)"), {"c1": 1}) == Scalar(F(3, 2))


def test_evaluate_sqrt_coefficient():
    assert eval_expr(parse_expr("sqrt(2)/(4*c2)"), {"c2": 1}) == Scalar(0, F(1, 4), 2)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        eval_expr(parse_expr("1/c1"), {"c1": 0})


def test_unbound_name():
    with pytest.raises(UnboundParameter):
        eval_expr(parse_expr("x+1"), {})


def test_non_integer_exponent_rejected():
    with pytest.raises(ExprValueError):
        eval_expr(parse_expr("x^(1/2)"), {"x": 4})


@pytest.mark.parametrize("text", ["", "1+", "(1", "1.5", "2**3", "sqrt 2", "a b"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse_expr(text)


names = st.sampled_from(["a", "b", "c1", "l"])


def exprs():
    leaves = st.one_of(st.integers(0, 9).map(Num), names.map(Var))

    def extend(children):
        bin_ops = st.sampled_from([Add, Sub, Mul, Div])
        return st.one_of(
            st.tuples(bin_ops, children, children).map(lambda t: t[0](t[1], t[2])),
            children.map(Neg),
            st.tuples(children, st.integers(0, 3)).map(lambda t: Pow(t[0], Num(t[1]))),
            st.integers(0, 9).map(lambda k: Sqrt(Num(k))),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@given(exprs())
def test_print_parse_roundtrip(e):
    assert parse_expr(to_text(e)) == e


@given(exprs(), st.fractions(min_value=-5, max_value=5, max_denominator=4))
def test_roundtrip_preserves_value(e, x):
    env = {"a": x, "b": F(1, 3), "c1": F(-2), "l": F(5, 2)}
    try:
        v = eval_expr(e, env)
    except Exception as exc:  # domain failures must be reproducible too
        with pytest.raises(type(exc)):
            eval_expr(parse_expr(to_text(e)), env)
        return
    assert eval_expr(parse_expr(to_text(e)), env) == v
    assert free_names(e) <= {"a", "b", "c1", "l"}


# --- catalog file -----------------------------------------------------------------------

def test_builtin_inventory(catalog):
    full = [e.id for e in catalog if e.is_full]
    stubs = [e.id for e in catalog if not e.is_full]
    assert len(full) >= 10
    for eid in ("thm3.2-i-eps+1", "thm3.2-i-eps-1", "thm3.2-ii-eps+1", "thm3.2-ii-eps-1",
                "thm3.3-i-eps+1", "thm3.3-i-eps-1", "thm3.3-ii-eps+1", "thm3.3-ii-eps-1",
                "thm4.1-(1,3)", "thm4.2-item1", "thm4.2-item2", "thm4.2-item3", "1.3^1:2"):
        assert eid in full
    assert len(stubs) >= 30
    assert all(s.endswith("-stub") for s in stubs)


def test_empty_file():
    assert parse_catalog("") == []
    assert parse_catalog("# only a comment\n\n") == []


def test_duplicate_ids():
    text = "[entry x]\ndim_h = 0\ng(1,1) = 1\n\n[entry x]\ndim_h = 0\ng(1,1) = 1\n"
    with pytest.raises(DuplicateId):
        parse_catalog(text)


def test_syntax_error_location():
    with pytest.raises(ExprSyntaxError) as info:
        parse_catalog("[entry x]\ndim_h = 0\ng(1,1) = 1 +* 2\n")
    assert (info.value.lineno, info.value.column) == (3, 13)


def test_every_builtin_expression_roundtrips(catalog):
    for e in catalog:
        for x in e.expressions():
            assert parse_expr(to_text(x)) == x


def test_lookup_heisenberg_family():
    e = find_entry(builtin_catalog(), "thm4.2-item3")
    assert e is not None and e.is_full
    (lhs, coef_map), = [((a, b), c) for a, b, c in e.brackets if {a, b} == {"e3", "e4"}]
    assert lhs == ("e3", "e4")
    assert {s for s, _ in coef_map} == {"e3", "e4"}
    for _, coef in coef_map:
        assert eval_expr(coef, {"c2": F(1)}) == Scalar(F(3, 2))
    (span,) = e.expected.lines
    assert span.generators == ((("e3", Num(1)), ("e4", Num(1))),)


def test_lookup_bare_label_reaches_stub():
    e = find_entry(builtin_catalog(), "1.3^1:30")
    assert e is not None and e.id == "1.3^1:30-stub" and not e.is_full
    metric = dict(e.metric)
    assert to_text(metric[(1, 4)]) == "-a" and to_text(metric[(2, 3)]) == "a"
    whens = sorted(str(s.when) for s in e.expected.lines)
    assert whens == ["l = -mu", "l = 0", "mu = 0"]


def test_lookup_missing():
    assert find_entry(builtin_catalog(), "nonexistent-id") is None


def test_select_by_prefix(catalog):
    assert [e.id for e in select_entries(catalog, "thm3.2-i")] == ["thm3.2-i-eps+1", "thm3.2-i-eps-1"]
    assert [e.id for e in select_entries(catalog, "1.3^1:30-stub")] == ["1.3^1:30-stub"]


def test_merge_attaches_brackets_to_stub(catalog):
    extra = parse_catalog("[entry 1.3^1:4-stub]\ndim_h = 1\nflag: full\n[e1,u3] = u1\n[e1,u4] = u2\n")
    merged = merge_catalogs(catalog, extra)
    e = find_entry(merged, "1.3^1:4-stub")
    old = find_entry(catalog, "1.3^1:4-stub")
    assert e.is_full and e.brackets and e.metric == old.metric and e.expected == old.expected
    assert len(merged) == len(catalog)


# --- instantiation -----------------------------------------------------------------------

def test_instantiate_neutral_family():
    m = model_of("thm3.2-i-eps+1", alpha=1)
    assert m.bracket(1, 2) == tuple(Scalar(x) for x in (2, 0, 0, 2))
    assert m.metric == Matrix.diag(1, 1, -1, -1)
    assert m.signature == (2, 2)


def test_instantiate_reductive_pair():
    m = model_of("1.3^1:2", a=1, b=0, c=0, l=1)
    (H,) = m.isotropy
    assert H == mat([[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]])
    assert m.metric == mat([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]])


def test_constraint_violation():
    with pytest.raises(ConstraintViolated):
        model_of("thm4.2-item1", c1=0, c2=0, c3=0)


def test_stub_cannot_be_instantiated():
    with pytest.raises(StubEntry):
        instantiate(entry("1.3^1:30"), {"a": 1, "b": 0, "d": 0, "l": 1, "mu": 1})


def test_jacobi_failure_surfaces_at_instantiate():
    (e,) = parse_catalog("[entry bad]\ndim_h = 0\n[e1,e2] = e3\n[e1,e3] = e1\ng(1,1) = 1\ng(2,2) = 1\ng(3,3) = 1\ng(4,4) = 1\n")
    with pytest.raises(JacobiFailed):
        instantiate(e, {})


def test_degenerate_metric():
    (e,) = parse_catalog("[entry bad]\ndim_h = 0\ng(1,1) = 1\ng(2,2) = 1\ng(3,3) = 1\n")
    with pytest.raises(MetricDegenerate):
        instantiate(e, {})


def test_signatures_of_models():
    assert signature(model_of("1.3^1:2", a=1, b=0, c=0, l=1)) == (2, 2)
    assert signature(model_of("thm4.2-item3", c1=1, c2=1, c3=0, c4=0)) == (3, 1)


def test_signature_of_reductive_metric_matches_float():
    import numpy as np
    m = model_of("1.3^1:2", a=1, b=0, c=0, l=1)
    ev = np.linalg.eigvalsh(np.array(m.metric.to_float()))
    assert m.signature == (int((ev > 0).sum()), int((ev < 0).sum()))


def test_trial_assignments_reproducible_and_admissible(catalog):
    for e in catalog:
        if not e.is_full:
            continue
        a = trial_assignments(e, 0, 3)
        assert a == trial_assignments(e, 0, 3)
        assert len(a) == 3
        for p in a:
            instantiate(e, p)
