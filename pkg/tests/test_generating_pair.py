import numpy as np
import pytest

from relcalc.generating_pair import (adjoint_from_m, build_generating_pair, laplacian, leakage_ratio,
                                     lower_bound_check, order_reduction, singularity_position_check,
                                     far_bump)
from relcalc.geometry import TorusEmbedding

EMB = TorusEmbedding(2, 1, 16)


@pytest.fixture(scope="module")
def pair():
    return build_generating_pair(EMB)


def plane_wave(emb, k):
    return np.exp(1j * emb.grid("M") @ np.asarray(k, dtype=float))


def test_laplacian_kills_constants():
    np.testing.assert_allclose(laplacian(EMB) @ np.ones(EMB.m_size), 0, atol=1e-12)


def test_laplacian_eigenfunction():
    f = plane_wave(EMB, (3, -2))
    np.testing.assert_allclose(laplacian(EMB) @ f, 13 * f, atol=1e-10)


def test_order_reduction():
    f = plane_wave(EMB, (1, 2))
    np.testing.assert_allclose(order_reduction(EMB, "M", 0.0), np.eye(EMB.m_size), atol=1e-12)
    np.testing.assert_allclose(order_reduction(EMB, "M", -2.0) @ f, f / 6, atol=1e-12)
    np.testing.assert_allclose(order_reduction(EMB, "M", 1.0) @ order_reduction(EMB, "M", -1.0),
                               np.eye(EMB.m_size), atol=1e-11)


def test_identity(pair):
    assert pair.identity_residual() <= 1e-8


def test_adjoint(pair):
    assert pair.adjoint_residual() <= 1e-12


def test_s_commutes_with_gram(pair):
    gram = (pair.C.conj().T * EMB.h ** EMB.nu) @ pair.C
    comm = pair.S @ gram - gram @ pair.S
    assert np.linalg.norm(comm) <= 1e-10 * np.linalg.norm(gram)


def test_lower_bound(pair):
    assert lower_bound_check(pair)["holds"]


def test_singularity_position(pair):
    rep = singularity_position_check(pair)
    assert rep["passed"]
    assert rep["far_high_share"] < rep["near_high_share"]


def test_far_leakage_is_not_small(pair):
    # documented: jstar is not microlocalized to a 1e-6 leakage level
    assert 0.01 < leakage_ratio(pair, far_bump(EMB)) < 1.0


def test_codimension_two():
    p = build_generating_pair(TorusEmbedding(3, 1, 8))
    assert p.identity_residual() <= 1e-8
    assert p.adjoint_residual() <= 1e-12


def test_surface_in_three_torus():
    p = build_generating_pair(TorusEmbedding(3, 2, 8))
    assert p.identity_residual() <= 1e-8


def test_rank_deficient_restriction_rejected(monkeypatch):
    import relcalc.generating_pair as gp
    from relcalc.errors import ConstructionError

    def broken(emb):
        r = np.zeros((emb.y_size, emb.m_size))
        r[:-1, emb.slice_indices()[:-1]] = np.eye(emb.y_size - 1)
        return r

    monkeypatch.setattr(gp, "restriction_matrix", broken)
    with pytest.raises(ConstructionError):
        gp.build_generating_pair(TorusEmbedding(2, 1, 8))
