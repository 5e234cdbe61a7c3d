import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relcalc.calculus import adjoint, block_adjoint
from relcalc.errors import ResolutionError, ShapeError
from relcalc.geometry import TorusEmbedding
from relcalc.quantizer import (BLOCK_OF, BlockOperator, extract_symbol, fourier_multiplier, quantize,
                               quantize_table, restriction_matrix, symbol_table)
from relcalc.symbols import B, C, G, LagrangianClass, MultiOrder, Partial, Psi, Symbol, make_classical_symbol

EMB = TorusEmbedding(2, 1, 16)


def band_limited(cls, emb, seed):
    """Random symbol table: random x-dependence, smooth fiber decay."""
    r = np.random.default_rng(seed)
    nb = cls.base_dim(emb.n, emb.d)
    nf = sum(cls.group_dims(emb.n, emb.d))
    shape = (emb.N,) * (nb + nf)
    return r.normal(size=shape) + 1j * r.normal(size=shape)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.mark.parametrize("cls", list(LagrangianClass))
def test_round_trip_tables(cls):
    t = band_limited(cls, EMB, 7)
    ext = extract_symbol(quantize_table(t, cls, EMB), cls, EMB)
    assert rel(ext, t) <= 1e-10


@pytest.mark.parametrize("cls, order", [(Psi, (-1,)), (Partial, (-1,)), (B, (1, -2)),
                                        (C, (-2, 1)), (G, (-0.75, 1, -1.25))])
def test_round_trip_symbols(cls, order):
    sym = make_classical_symbol(cls, order, base_profile=lambda x: 1 + 0.3 * np.cos(x.sum(-1)))
    op = quantize(sym, EMB)
    block = getattr(op, BLOCK_OF[cls])
    assert rel(extract_symbol(block, cls, EMB), symbol_table(sym, EMB, full=True)) <= 1e-10


def test_identity():
    op = quantize(make_classical_symbol(Psi, 0), EMB)
    np.testing.assert_allclose(op.MM, np.eye(EMB.m_size), atol=1e-12)


def test_restriction_recovery():
    op = quantize(make_classical_symbol(B, (0, 0)), EMB)
    assert np.max(np.abs(op.YM - restriction_matrix(EMB))) <= 1e-12


def test_restriction_on_band_limited_function():
    x = EMB.grid("M")
    f = np.cos(3 * x[:, 0]) * np.exp(np.sin(x[:, 1])) + np.sin(2 * x[:, 1])
    op = quantize(make_classical_symbol(B, (0, 0)), EMB)
    np.testing.assert_allclose(op.YM @ f, f[EMB.slice_indices()], atol=1e-12)


def test_spectral_derivative_matches_fft_oracle():
    sym = Symbol(Partial, MultiOrder(Partial, 1), lambda x, p: 1j * p[..., 0], x_independent=True)
    D = quantize(sym, EMB).YY
    N = EMB.N
    k = np.fft.fftfreq(N, 1 / N)
    for kk in (1, 3, -5):
        f = np.exp(1j * kk * EMB.axis)
        np.testing.assert_allclose(D @ f, 1j * kk * f, atol=1e-10)
    r = np.random.default_rng(0)
    f = r.normal(size=N)
    f = np.fft.ifft(np.fft.fft(f) * (np.abs(k) < N // 2))   # the Nyquist mode has no symmetric derivative
    oracle = np.fft.ifft(1j * k * np.fft.fft(f))
    np.testing.assert_allclose(D @ f, oracle, atol=1e-10)


def test_extract_identity_and_restriction():
    np.testing.assert_allclose(extract_symbol(np.eye(EMB.m_size), Psi, EMB), 1.0, atol=1e-12)
    np.testing.assert_allclose(extract_symbol(restriction_matrix(EMB), B, EMB), 1.0, atol=1e-12)


def test_coboundary_is_adjoint_of_restriction():
    b = quantize(make_classical_symbol(B, (0, 0)), EMB)
    c = quantize(make_classical_symbol(C, (0, 0)), EMB)
    np.testing.assert_allclose(adjoint(b).MY, c.MY, atol=1e-12)
    np.testing.assert_allclose(block_adjoint(b.YM, EMB, ("Y", "M")), c.MY, atol=1e-12)


def test_real_even_psi_symbol_is_hermitian():
    sym = make_classical_symbol(Psi, -1, phase_profile=lambda t: 1 + 0.3 * t[..., 0] ** 2)
    A = quantize(sym, EMB).MM
    np.testing.assert_allclose(A, A.conj().T, atol=1e-13)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(list(LagrangianClass)), st.complex_numbers(max_magnitude=5),
       st.complex_numbers(max_magnitude=5), st.integers(0, 2**20))
def test_quantize_is_linear(cls, s, t, seed):
    emb = TorusEmbedding(2, 1, 8)
    a, b = band_limited(cls, emb, seed), band_limited(cls, emb, seed + 1)
    lhs = quantize_table(s * a + t * b, cls, emb)
    rhs = s * quantize_table(a, cls, emb) + t * quantize_table(b, cls, emb)
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * max(1.0, np.max(np.abs(rhs)))


def test_cutoff_difference_converges():
    # the chi-difference tends to a fixed smoothing operator, not to zero
    sym = make_classical_symbol(Partial, -1)
    vals = []
    for N in (32, 64):
        e = TorusEmbedding(2, 1, N)
        diff = quantize(sym, e, cutoff=True).YY - quantize(sym, e).YY
        vals.append(np.linalg.norm(diff, 2))
    assert vals[1] > 0.1
    assert abs(vals[1] - vals[0]) / vals[1] <= 0.01


def test_resolution_error():
    with pytest.raises(ResolutionError):
        quantize(make_classical_symbol(Psi, 20), EMB)


def test_block_shape_checks():
    with pytest.raises(ShapeError):
        extract_symbol(np.eye(EMB.y_size), Psi, EMB)
    with pytest.raises(ShapeError):
        BlockOperator.single(EMB, MultiOrder(B, (0, 0)), np.zeros((EMB.y_size, EMB.m_size))).__class__(
            EMB, np.zeros((3, 3)), np.zeros((1, 1)), np.zeros((1, 1)), np.zeros((1, 1)))


def test_fourier_multiplier_eigenfunction():
    M = fourier_multiplier(EMB, "M", lambda k2: (1 + k2) ** -1)
    x = EMB.grid("M")
    f = np.exp(1j * (2 * x[:, 0] - 3 * x[:, 1]))
    np.testing.assert_allclose(M @ f, f / 14, atol=1e-12)
