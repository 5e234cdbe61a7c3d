"""Microlocalized restriction/extension pair built by order reduction.

Starting from naive slice sampling ``r``, the operator

    B = lambda_Y^(2 - nu/2)  r  lambda_M^(-2)

is bounded on L^2 with a bounded right inverse.  Normalizing the
minimal-norm right inverse ``C`` gives

    S = (C^dagger C)^(-1/2),    j^* = S C^dagger,    j_* = C S,

so that ``j^* j_* = Id`` on the Y-grid and ``j_*`` is the L^2 adjoint of
``j^*``.  All adjoints are taken with the quadrature weights of the grids.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError
from .geometry import TorusEmbedding, wrap
from .quantizer import fourier_multiplier, restriction_matrix

#: eigenvalues below this fraction of the largest count as zero
EIG_TOL = 1e-12


def laplacian(emb: TorusEmbedding, space: str = "M") -> np.ndarray:
    """Matrix of the (positive) Laplacian, the Fourier multiplier ``|xi|^2``."""
    return fourier_multiplier(emb, space, lambda k2: k2)


def order_reduction(emb: TorusEmbedding, space: str, s: float) -> np.ndarray:
    """Matrix of the Bessel multiplier ``(1 + |xi|^2)^(s/2)`` on the given grid."""
    return fourier_multiplier(emb, space, lambda k2: (1.0 + k2) ** (s / 2))


def adjoint_from_m(emb: TorusEmbedding, A: np.ndarray) -> np.ndarray:
    """L^2 adjoint (Y to M) of an M-to-Y matrix."""
    return A.conj().T / emb.h ** emb.nu


def adjoint_from_y(emb: TorusEmbedding, A: np.ndarray) -> np.ndarray:
    """L^2 adjoint (M to Y) of a Y-to-M matrix."""
    return A.conj().T * emb.h ** emb.nu


@dataclass(frozen=True)
class GeneratingPair:
    """The pair ``(jstar, jlower)`` with the intermediates of its construction."""

    emb: TorusEmbedding
    jstar: np.ndarray
    jlower: np.ndarray
    B: np.ndarray
    C: np.ndarray
    S: np.ndarray
    gram_eigs: np.ndarray

    def identity_residual(self) -> float:
        """``|jstar jlower - I|_F / |I|_F``."""
        eye = np.eye(self.emb.y_size)
        return float(np.linalg.norm(self.jstar @ self.jlower - eye) / np.linalg.norm(eye))

    def adjoint_residual(self) -> float:
        """Largest entry of ``jlower - jstar^dagger``."""
        return float(np.max(np.abs(self.jlower - adjoint_from_m(self.emb, self.jstar))))


def build_generating_pair(emb: TorusEmbedding) -> GeneratingPair:
    """Construct ``(jstar, jlower)`` on the grid of ``emb``.

    Raises
    ------
    ConstructionError
        If ``B`` is rank deficient or ``C^dagger C`` has a non-positive
        eigenvalue (relative threshold ``EIG_TOL``).
    """
    nu = emb.nu
    r = restriction_matrix(emb)
    Bop = order_reduction(emb, "Y", 2.0 - nu / 2) @ r @ order_reduction(emb, "M", -2.0)
    Badj = adjoint_from_m(emb, Bop)
    gram = Bop @ Badj
    gram = 0.5 * (gram + gram.conj().T)
    w, V = np.linalg.eigh(gram)
    if w[0] <= EIG_TOL * w[-1]:
        raise ConstructionError(f"B is rank deficient: smallest eigenvalue of B B^dagger is {w[0]:.3e}")
    C = Badj @ (V / w) @ V.conj().T
    CtC = adjoint_from_y(emb, C) @ C
    CtC = 0.5 * (CtC + CtC.conj().T)
    mu, U = np.linalg.eigh(CtC)
    if mu[0] <= EIG_TOL * mu[-1]:
        raise ConstructionError(f"C^dagger C is not positive definite: eigenvalue {mu[0]:.3e}")
    S = (U / np.sqrt(mu)) @ U.conj().T
    jstar = S @ adjoint_from_y(emb, C)
    jlower = C @ S
    return GeneratingPair(emb, jstar, jlower, Bop, C, S, mu)


def lower_bound_check(pair: GeneratingPair) -> dict:
    """Compare ``min |Cv|/|v|`` with ``1/|B|`` (weighted L^2 norms)."""
    emb = pair.emb
    scale = np.sqrt(emb.weight("M") / emb.weight("Y"))
    c_min = float(np.sqrt(pair.gram_eigs[0]))
    b_norm = float(np.linalg.norm(pair.B, 2) / scale)
    return {"min_gain": c_min, "inverse_norm_B": 1.0 / b_norm,
            "holds": bool(c_min >= (1.0 / b_norm) * (1 - 1e-10))}


def far_bump(emb: TorusEmbedding, width: float = 0.35, centre: float = np.pi) -> np.ndarray:
    """Smooth grid function concentrated around ``x'' = centre``, far from Y."""
    x = emb.grid("M")
    xn = wrap(x[:, emb.d:] - centre)
    tang = np.cos(x[:, :emb.d]).sum(axis=1) + 2.0
    return tang * np.exp(-np.sum(xn ** 2, axis=1) / (2 * width ** 2))


def leakage_ratio(pair: GeneratingPair, f: np.ndarray) -> float:
    """``|jstar f|_Y / |f|_M`` for a grid function ``f`` on M."""
    emb = pair.emb
    out = pair.jstar @ f
    return float(np.sqrt(emb.weight("Y")) * np.linalg.norm(out)
                 / (np.sqrt(emb.weight("M")) * np.linalg.norm(f)))


def smoothing_gain(pair: GeneratingPair, f: np.ndarray, fraction: float = 0.5) -> dict:
    """High-frequency content of ``jstar f`` compared with naive sampling.

    Returns the share of spectral energy above ``fraction * N/2`` for both
    outputs; ``jstar`` must not create more high-frequency content than the
    restriction it replaces.
    """
    emb = pair.emb
    r = restriction_matrix(emb)

    def high_share(v):
        spec = np.abs(np.fft.fftn(v.reshape((emb.N,) * emb.d))) ** 2
        k = np.abs(np.fft.fftfreq(emb.N, 1.0 / emb.N))
        mesh = np.meshgrid(*([k] * emb.d), indexing="ij")
        high = np.max(np.stack(mesh), axis=0) > fraction * emb.N / 2
        total = spec.sum()
        return float(spec[high].sum() / total) if total > 0 else 0.0

    return {"jstar": high_share(pair.jstar @ f), "restriction": high_share(r @ f)}


def singularity_test_functions(emb: TorusEmbedding):
    """Two grid functions with jumps: one along a curve far from Y, one crossing Y."""
    x = emb.grid("M")
    x1, x2 = x[:, 0], x[:, emb.d]
    far = (np.abs(wrap(x2 - np.pi - 0.4 * np.sin(x1))) < np.pi / 4).astype(float)
    near = (np.abs(wrap(x1 - np.pi)) < np.pi / 2) * np.exp(-wrap(x2) ** 2)
    return far, near


def singularity_position_check(pair: GeneratingPair, fraction: float = 0.5,
                               ratio: float = 1e-3) -> dict:
    """jstar keeps singularities where the restriction sees them.

    A jump far from Y must leave ``jstar f`` smooth (negligible energy in
    the upper frequency band), while a jump crossing Y must stay visible.
    Passes when the far share is below ``ratio`` times the near share.
    """
    far, near = singularity_test_functions(pair.emb)
    s_far = smoothing_gain(pair, far, fraction)["jstar"]
    s_near = smoothing_gain(pair, near, fraction)["jstar"]
    return {"far_high_share": s_far, "near_high_share": s_near,
            "far_leakage": leakage_ratio(pair, far),
            "passed": bool(s_far <= ratio * s_near)}
