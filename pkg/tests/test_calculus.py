import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relcalc.calculus import (adjoint, adjoint_order, compare_twisted, compose_blocks, l2_operator,
                              l2_orders, l2_violations, measure_slopes, operator_norm, predicted_slopes,
                              verify_l2_bound)
from relcalc.errors import PreconditionError, ShapeError
from relcalc.geometry import TorusEmbedding
from relcalc.quantizer import BlockOperator, extract_symbol, fourier_multiplier, quantize, symbol_table
from relcalc.suites import random_classical, random_operator
from relcalc.symbols import B, C, G, MultiOrder, Partial, Psi, make_classical_symbol, order_compose

EMB = TorusEmbedding(2, 1, 16)
SMALL = TorusEmbedding(2, 1, 8)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_identity_is_neutral():
    A = random_operator(SMALL, np.random.default_rng(0))
    out = compose_blocks(BlockOperator.identity(SMALL), A)
    np.testing.assert_allclose(out.full(), A.full(), atol=1e-15)


def test_grid_mismatch():
    with pytest.raises(ShapeError):
        compose_blocks(BlockOperator.zeros(SMALL), BlockOperator.zeros(EMB))


def test_c_after_b_matches_twisted_product():
    r = np.random.default_rng(2)
    res = compare_twisted(random_classical(C, r), random_classical(B, r), EMB)
    assert res["class"] is G
    assert res["rel_sup_error"] <= 0.10


def test_b_after_c_is_boundary_operator():
    b = make_classical_symbol(B, (1.0, -2.0))
    c = make_classical_symbol(C, (-2.0, 1.0))
    prod = compose_blocks(quantize(b, EMB), quantize(c, EMB))
    assert prod.meta["YY"] == (order_compose(b.order, c.order, EMB.nu),)
    assert not prod.flags
    assert np.linalg.norm(prod.MM) == 0


@pytest.mark.parametrize("left, right", [(C, B), (B, C), (G, G), (Psi, G), (B, Psi)])
def test_twisted_consistency_and_slopes(left, right):
    r = np.random.default_rng(11)
    res = compare_twisted(random_classical(left, r), random_classical(right, r), TorusEmbedding(2, 1, 32))
    assert res["rel_sup_error"] <= 0.10
    slopes = measure_slopes(res["extracted"], res["class"], TorusEmbedding(2, 1, 32))
    assert max(abs(a - b) for a, b in zip(slopes, predicted_slopes(res["order"]))) <= 0.15


def test_measure_slopes_on_canonical_symbol():
    e = TorusEmbedding(2, 1, 64)
    sym = make_classical_symbol(G, (-1.0, 0.5, -1.5))
    got = measure_slopes(symbol_table(sym, e, full=True), G, e)
    np.testing.assert_allclose(got, predicted_slopes(sym.order), atol=0.1)


def test_adjoint_of_restriction_is_coboundary():
    b = quantize(make_classical_symbol(B, (0, 0)), EMB)
    c = quantize(make_classical_symbol(C, (0, 0)), EMB)
    np.testing.assert_allclose(adjoint(b).MY, c.MY, atol=1e-12)
    assert adjoint(b).meta["MY"] == (MultiOrder(C, (0, 0)),)


def test_adjoint_orders():
    assert adjoint_order(MultiOrder(B, (1, 2))) == MultiOrder(C, (2, 1))
    assert adjoint_order(MultiOrder(G, (1, 2, 3))) == MultiOrder(G, (3, 2, 1))
    for o in (MultiOrder(B, (1, 2)), MultiOrder(C, (-1, 3)), MultiOrder(G, (1, 2, 3))):
        assert adjoint_order(adjoint_order(o)) == o


def test_adjoint_is_weighted_l2_adjoint():
    A = random_operator(SMALL, np.random.default_rng(3))
    r = np.random.default_rng(4)
    f = r.normal(size=A.full().shape[1]) + 1j * r.normal(size=A.full().shape[1])
    g = r.normal(size=f.size) + 1j * r.normal(size=f.size)
    w = A.weights()
    lhs = np.vdot(g, w * (A.full() @ f))
    rhs = np.vdot(w * (adjoint(A).full() @ g), f)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**20))
def test_associativity_and_antihomomorphism(seed):
    r = np.random.default_rng(seed)
    A, Bq, Cq = (random_operator(SMALL, r) for _ in range(3))
    lhs = compose_blocks(compose_blocks(A, Bq), Cq).full()
    rhs = compose_blocks(A, compose_blocks(Bq, Cq)).full()
    assert rel(lhs, rhs) <= 1e-10
    anti = rel(adjoint(compose_blocks(A, Bq)).full(), compose_blocks(adjoint(Bq), adjoint(A)).full())
    assert anti <= 1e-12
    assert rel(adjoint(adjoint(A)).full(), A.full()) <= 1e-15


# ----------------------------------------------------------------- norms

def test_norm_identity():
    assert operator_norm(np.eye(10)) == pytest.approx(1.0, abs=1e-10)
    assert operator_norm(BlockOperator.identity(SMALL)) == pytest.approx(1.0, abs=1e-10)


def test_norm_multiplier():
    M = fourier_multiplier(SMALL, "M", lambda k2: (1 + k2) ** -0.5)
    assert operator_norm(M) == pytest.approx(1.0, abs=1e-8)


def test_norm_zero():
    assert operator_norm(np.zeros((5, 5))) == 0.0


@pytest.mark.parametrize("method", ["power", "lanczos"])
@pytest.mark.parametrize("seed", range(5))
def test_norm_matches_svd(seed, method):
    r = np.random.default_rng(seed)
    A = r.normal(size=(8, 8)) + 1j * r.normal(size=(8, 8))
    assert operator_norm(A, method=method, max_iter=20000, tol=1e-14) == pytest.approx(
        np.linalg.svd(A, compute_uv=False)[0], abs=1e-8)


def test_weighted_norm_matches_svd():
    r = np.random.default_rng(9)
    A = r.normal(size=(6, 4))
    wo, wi = r.uniform(0.5, 2, 6), r.uniform(0.5, 2, 4)
    oracle = np.linalg.svd(np.sqrt(wo)[:, None] * A / np.sqrt(wi)[None, :], compute_uv=False)[0]
    assert operator_norm(A, weights=(wo, wi), tol=1e-14, max_iter=20000) == pytest.approx(oracle, abs=1e-8)


def test_power_and_lanczos_agree_on_operator_matrix():
    op = l2_operator(SMALL, l2_orders(-0.75, 1, 1, 1, 1))
    a = operator_norm(op, method="power", max_iter=20000, tol=1e-13)
    b = operator_norm(op, method="lanczos")
    assert a == pytest.approx(b, rel=1e-5)


def test_unknown_norm_method():
    with pytest.raises(ValueError):
        operator_norm(np.eye(2), method="qr")


def test_l2_orders_and_violations():
    o = l2_orders(-0.75, 1, 1, 1, 1)
    assert o["l_g"] == pytest.approx(-1.25)
    assert o["l_b"] == o["m_c"] == pytest.approx(-1.5)
    assert l2_violations(-0.75, 1, 1, 1, 1) == []
    assert l2_violations(-0.25, 1, 1, 1, 1) == ["m_g < -nu/2"]


def test_l2_precondition():
    with pytest.raises(PreconditionError):
        verify_l2_bound((-0.25, 1, 1, 1), [8])


def test_l2_zero_symbols():
    rep = verify_l2_bound((-0.75, 1, 1, 1), [8, 16], scale=0.0)
    assert rep.norms == [0.0, 0.0]


def test_l2_small_sweep_bounded():
    rep = verify_l2_bound((-0.75, 1, 1, 1), [8, 16, 32])
    assert rep.bounded and rep.ratio <= 1.10
