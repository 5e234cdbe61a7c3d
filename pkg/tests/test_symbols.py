import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from relcalc.errors import CompositionError, OrderError, SymbolEvaluationError
from relcalc.symbols import (B, C, G, LITERAL_TABLE, ORDER_TABLE, LagrangianClass, MultiOrder,
                             Partial, Psi, Symbol, canonical_weight, check_symbol_estimates,
                             composable, make_classical_symbol, order_compose, sample_phase_points,
                             table_discrepancies, twisted_product_leading)

order_val = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 3))


def orders_for(cls):
    return st.tuples(*([order_val] * len(cls.order_names))).map(lambda t: MultiOrder(cls, t))


# ------------------------------------------------------------ construction

def test_multiorder_arity():
    with pytest.raises(OrderError):
        MultiOrder(B, (1.0,))
    o = MultiOrder(G, (1, 2, 3))
    assert (o.m, o.k, o.l) == (1.0, 2.0, 3.0)


def test_psi_order_zero_is_one():
    a = make_classical_symbol(Psi, 0)
    xi = np.random.default_rng(0).normal(size=(20, 2)) * 10
    np.testing.assert_allclose(a(np.zeros((20, 2)), xi), 1.0)


def test_partial_example():
    a = make_classical_symbol(Partial, -1)
    assert a(np.zeros(1), np.array([1.0])) == pytest.approx(2 ** -0.5)


def test_b_example():
    b = make_classical_symbol(B, (1, -2))
    assert b(np.zeros(1), np.zeros(1), np.array([2.0])) == pytest.approx(0.2)


def test_canonical_weight_factorisation():
    o = MultiOrder(G, (-1.0, 0.5, -2.0))
    p, q, e = np.array([3.0]), np.array([4.0]), np.array([1.0])
    expected = (1 + 9) ** 0.25 * (1 + 9 + 16) ** -0.5 * (1 + 9 + 1) ** -1
    assert canonical_weight(o, p, q, e) == pytest.approx(expected)


def test_non_finite_symbol_raises():
    bad = Symbol(Psi, MultiOrder(Psi, 0), lambda x, xi: np.full(x.shape[:-1], np.inf))
    with pytest.raises(SymbolEvaluationError):
        bad(np.zeros((1, 2)), np.zeros((1, 2)))


# -------------------------------------------------------------- estimates

def test_estimates_psi_order_zero():
    a = make_classical_symbol(Psi, 0)
    rep = check_symbol_estimates(a, 2, sample_phase_points(Psi, 2, 1, 300, 100.0))
    assert rep.passed and rep.max_sup <= 10


def test_estimates_canonical_b():
    b = make_classical_symbol(B, (1, -2))
    rep = check_symbol_estimates(b, 2, sample_phase_points(B, 2, 1, 300, 100.0))
    assert rep.passed


@pytest.mark.parametrize("cls, order", [(Psi, (-1,)), (Partial, (-1,)), (B, (1, -2)),
                                        (C, (-2, 1)), (G, (-0.75, 1, -1.25))])
def test_estimates_all_classes_with_profiles(cls, order):
    sym = make_classical_symbol(cls, order, base_profile=lambda x: 1 + 0.3 * np.cos(x.sum(-1)),
                                phase_profile=lambda t: 1 + 0.2 * np.cos(t.sum(-1)))
    rep = check_symbol_estimates(sym, 2, sample_phase_points(cls, 2, 1, 200, 300.0, seed=3))
    assert rep.passed, rep.worst()


def test_exponential_fails_estimates():
    sym = Symbol(Psi, MultiOrder(Psi, 0), lambda x, xi: np.exp(np.linalg.norm(xi, axis=-1)))
    rep = check_symbol_estimates(sym, 1, sample_phase_points(Psi, 2, 1, 200, 60.0))
    assert not rep.passed


def test_estimate_order_bound():
    with pytest.raises(ValueError):
        check_symbol_estimates(make_classical_symbol(Psi, 0), 4, sample_phase_points(Psi, 2, 1, 5, 2.0))


# -------------------------------------------------------------- order table

def test_c_after_b_order():
    r = order_compose(MultiOrder(C, (-1, 2)), MultiOrder(B, (3, -4)))
    assert r == MultiOrder(G, (-1, 5, -4))


def test_b_after_c_order_with_kappa_nu():
    r = order_compose(MultiOrder(B, (1, -2)), MultiOrder(C, (-3, 0.5)), kappa=1)
    assert r == MultiOrder(Partial, (1 - 2 + 0.5 - 3 + 1,))


def test_psi_then_b_incompatible():
    assert order_compose(MultiOrder(Psi, 0), MultiOrder(B, (0, 0))) is None
    assert not composable(Psi, B)


def test_documented_table_corrections():
    assert (Partial, C) in LITERAL_TABLE and (Partial, C) not in ORDER_TABLE
    assert (B, Partial) in LITERAL_TABLE and (B, Partial) not in ORDER_TABLE
    a, b = MultiOrder(G, (-1, 0, -2)), MultiOrder(G, (-3, 0, -2))
    assert order_compose(a, b).m == -1
    assert order_compose(a, b, literal=True).m == -3
    assert len(table_discrepancies()) == 3


def test_composable_pairs_chain_spaces():
    for (l, r) in ORDER_TABLE:
        assert l.spaces[1] == r.spaces[0]


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_order_composition_is_associative(data):
    triples = [t for t in itertools.product(LagrangianClass, repeat=3)
               if (t[0], t[1]) in ORDER_TABLE and (t[1], t[2]) in ORDER_TABLE]
    a_cls, b_cls, c_cls = data.draw(st.sampled_from(triples))
    a, b, c = (data.draw(orders_for(k)) for k in (a_cls, b_cls, c_cls))
    kappa = data.draw(st.sampled_from([1.0, 2.0]))
    ab = order_compose(a, b, kappa)
    bc = order_compose(b, c, kappa)
    left = order_compose(ab, c, kappa)
    right = order_compose(a, bc, kappa)
    assert (left is None) == (right is None)
    if left is not None:
        assert left.cls is right.cls
        np.testing.assert_allclose(left.values, right.values, atol=1e-9)


# ------------------------------------------------------------ twisted product

def test_twisted_ones_c_b():
    a = make_classical_symbol(C, (0, 0))
    b = make_classical_symbol(B, (0, 0))
    g = twisted_product_leading(a, b)
    assert g.cls is G
    vals = g(np.zeros((5, 1)), *np.random.default_rng(0).normal(size=(3, 5, 1)))
    np.testing.assert_allclose(vals, 1.0)


def test_twisted_partial_unit():
    one = make_classical_symbol(Partial, 0)
    b = make_classical_symbol(B, (1, -2), base_profile=lambda x: 2 + np.sin(x[..., 0]))
    r = np.random.default_rng(1)
    pts = (r.uniform(0, 6, (7, 1)), r.normal(size=(7, 1)), r.normal(size=(7, 1)))
    np.testing.assert_allclose(twisted_product_leading(one, b)(*pts), b(*pts))


def test_twisted_excess_example_against_quadrature():
    b = make_classical_symbol(B, (0, -2))
    c = make_classical_symbol(C, (-2, 0))
    oracle = quad(lambda t: (1 + t * t) ** -2, -np.inf, np.inf)[0] / (2 * np.pi)
    assert oracle == pytest.approx(0.25, abs=1e-12)
    a = twisted_product_leading(b, c, R=200.0)
    assert a.cls is Partial
    assert float(np.real(a(np.zeros(1), np.zeros(1)))) == pytest.approx(oracle, abs=1e-6)
    # away from zero: integral of (s + t^2)^-2 is pi / (2 s^{3/2})
    s = 1 + 2.0 ** 2
    assert float(np.real(a(np.zeros(1), np.array([2.0])))) == pytest.approx(
        np.pi / 2 * s ** -1.5 / (2 * np.pi), abs=1e-6)


def test_twisted_divergence_warning():
    b = make_classical_symbol(B, (0, -0.5))
    c = make_classical_symbol(C, (-0.25, 0))
    with pytest.warns(RuntimeWarning):
        twisted_product_leading(b, c)


def test_twisted_incompatible():
    with pytest.raises(CompositionError):
        twisted_product_leading(make_classical_symbol(Psi, 0), make_classical_symbol(B, (0, 0)))


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-3, 3))
def test_twisted_bilinear(s, t, xi):
    a1 = make_classical_symbol(Psi, -1)
    a2 = make_classical_symbol(Psi, -2, phase_profile=lambda th: 1 + 0.5 * th[..., 0])
    b = make_classical_symbol(Psi, 1)
    x, v = np.zeros((1, 2)), np.array([[xi, 1.0]])
    lhs = twisted_product_leading(a1.scale(s) + a2.scale(t), b)(x, v)
    rhs = s * twisted_product_leading(a1, b)(x, v) + t * twisted_product_leading(a2, b)(x, v)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
