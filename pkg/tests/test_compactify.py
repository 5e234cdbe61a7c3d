import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from relcalc.compactify import (LITERAL_CANDIDATE, b_derivative_check, blowup_weight_fit,
                                boundary_defining, check_weight_equivalence, decompactify, fit_pair,
                                radial_compactify, sample_blowup_points)
from relcalc.errors import FitError
from relcalc.symbols import B, G, Psi, Symbol, make_classical_symbol


def test_origin_is_interior():
    pt = radial_compactify(np.zeros(2))
    np.testing.assert_array_equal(pt.eta, 0)
    assert pt.rho == 2.0 and not pt.boundary


def test_boundary_chart():
    pt = radial_compactify(np.array([3.0, 0.0]))
    assert pt.rho == pytest.approx(1 / 3) and pt.boundary
    np.testing.assert_allclose(pt.phi, [1, 0])


def test_round_trip_bulk():
    r = np.random.default_rng(0)
    xi = r.normal(size=(10_000, 3)) * np.exp(r.uniform(-3, 7, size=(10_000, 1)))
    back = decompactify(radial_compactify(xi))
    assert np.max(np.abs(back - xi) / np.maximum(1, np.abs(xi))) <= 1e-12


@given(arrays(float, 2, elements=st.floats(-1e4, 1e4)))
def test_round_trip_property(xi):
    back = decompactify(radial_compactify(xi))
    assert np.allclose(back, xi, rtol=1e-12, atol=1e-12)


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_boundary_defining_monotone(r, s):
    a, b = sorted((r, s))
    assert boundary_defining(a) >= boundary_defining(b)


def test_weight_equivalence_m0():
    wb = check_weight_equivalence(0, np.array([[1.0], [10.0], [500.0]]))
    assert wb.c1 == wb.c2 == 1.0


def test_weight_equivalence_m_minus_one():
    r = np.exp(np.random.default_rng(1).uniform(0, 8, 1000))[:, None]
    wb = check_weight_equivalence(-1, r)
    assert 0.5 <= wb.c1 and wb.c2 < 1 and wb.passed


@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
def test_weight_equivalence_bracket(m):
    r = np.exp(np.random.default_rng(m + 5).uniform(0, 8, 1000))[:, None]
    wb = check_weight_equivalence(m, r)
    assert wb.passed
    assert min(1, 2.0 ** m) - 1e-12 <= wb.c1 <= wb.c2 <= max(1, 2.0 ** m) + 1e-12


def test_weight_equivalence_needs_outer_samples():
    with pytest.raises(ValueError):
        check_weight_equivalence(1, np.array([[0.5]]))


@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
def test_b_derivatives_canonical(m):
    rep = b_derivative_check(make_classical_symbol(Psi, m), dim=2)
    assert rep.passed and max(rep.sups.values()) <= 4


def test_b_derivatives_constant():
    rep = b_derivative_check(make_classical_symbol(Psi, 0), dim=2)
    assert rep.sups[(0, 0)] == pytest.approx(1.0)
    assert all(v <= 1e-9 for k, v in rep.sups.items() if k != (0, 0))


def test_b_derivatives_oscillation_rejected():
    osc = Symbol(Psi, 0, lambda base, xi: np.sin(np.linalg.norm(xi, axis=-1)))
    assert not b_derivative_check(osc, dim=2).passed


def test_b_derivatives_class_check():
    with pytest.raises(ValueError):
        b_derivative_check(make_classical_symbol(B, (0, 0)))


def test_fit_zero_orders():
    fit = blowup_weight_fit(B, (0, 0))["fits"]["(xi', eta'')"]
    assert fit["best_residual"] <= 1e-12
    np.testing.assert_allclose(fit["candidates"][fit["best"]]["fitted"], (0, 0), atol=1e-9)


@pytest.mark.parametrize("k, l", [(-2, -2), (1, -1), (0, 1), (-1, -2)])
def test_fit_pattern_attained(k, l):
    fit = blowup_weight_fit(B, (k, l))["fits"]["(xi', eta'')"]
    assert fit["attained"] and fit["best_residual"] <= 0.05


def test_literal_candidate_misses():
    fit = blowup_weight_fit(B, (1, -2))["fits"]["(xi', eta'')"]
    assert fit["literal_residual"] > 0.5
    assert fit["best"] != LITERAL_CANDIDATE


def test_fit_g_orders():
    fits = blowup_weight_fit(G, (-0.75, 1.0, -1.25))["fits"]
    assert all(f["best_residual"] <= 0.05 for f in fits.values())


def test_degenerate_fit():
    p = np.full((50, 1), 10.0)
    tau = np.full((50, 1), 2.0)
    out = fit_pair(1, -1, p, tau)
    assert all(np.isnan(c["residual"]) for c in out["candidates"].values())
    from relcalc.compactify import _fit
    with pytest.raises(FitError):
        _fit(np.zeros(5), [np.ones(5)])


def test_blowup_samples_are_separated():
    p, tau = sample_blowup_points(count=100)
    ratio = np.linalg.norm(p, axis=1) / np.linalg.norm(tau, axis=1)
    assert np.all((ratio >= 99) | (ratio <= 1 / 99))
