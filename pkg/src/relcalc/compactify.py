"""Radial compactification of fibers and blow-up weights of the b and g classes.

The interior chart is ``eta = xi / <xi>`` (open unit ball); near infinity
the boundary chart is ``(rho, phi) = (1/|xi|, xi/|xi|)``.  The boundary
defining function equals ``1/|xi|`` for ``|xi| >= 1`` and is smoothly
continued to the constant 2 on ``|xi| <= 1/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import FitError
from .geometry import smooth_step
from .symbols import B, G, MultiOrder, Partial, Psi, Symbol, as_order


@dataclass(frozen=True)
class CompactifiedPoint:
    """Image of fiber points in the closed ball.

    ``eta`` is the interior chart; ``rho`` and ``phi`` the boundary chart,
    meaningful where ``boundary`` is True (``|xi| >= 1``).
    """

    eta: np.ndarray
    rho: np.ndarray
    phi: np.ndarray
    boundary: np.ndarray


def boundary_defining(r):
    """``rho(r)``: 2 for ``r <= 1/2``, ``1/r`` for ``r >= 1``, monotone between."""
    r = np.asarray(r, dtype=float)
    s = smooth_step(2.0 * r - 1.0)
    # the step vanishes for r <= 1/2, so clamping avoids 0 * inf near r = 0
    inv = 1.0 / np.maximum(r, 0.5)
    return (1.0 - s) * 2.0 + s * inv


def radial_compactify(xi) -> CompactifiedPoint:
    """Compactify fiber vectors (last axis = components)."""
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(xi, axis=-1)
    eta = xi / np.sqrt(1.0 + r ** 2)[..., None]
    safe = np.where(r > 0, r, 1.0)[..., None]
    phi = np.where(r[..., None] > 0, xi / safe, 0.0)
    return CompactifiedPoint(eta, boundary_defining(r), phi, r >= 1.0)


def decompactify(pt: CompactifiedPoint) -> np.ndarray:
    """Inverse of ``radial_compactify``; uses the boundary chart where valid."""
    eta = np.asarray(pt.eta)
    interior = eta / np.sqrt(np.maximum(1.0 - np.sum(eta ** 2, axis=-1), 1e-300))[..., None]
    rho = np.where(pt.boundary, pt.rho, 1.0)
    outer = pt.phi / rho[..., None]
    return np.where(pt.boundary[..., None], outer, interior)


def interior_inverse(eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    return eta / np.sqrt(1.0 - np.sum(eta ** 2, axis=-1))[..., None]


# ------------------------------------------------------------ weights

@dataclass
class WeightBounds:
    m: float
    c1: float
    c2: float
    passed: bool


def check_weight_equivalence(m: float, samples, tol: float = 1e-12) -> WeightBounds:
    """Empirical constants with ``c1 <= rho^m (1 + |xi|)^m <= c2`` for ``|xi| >= 1``."""
    xi = np.atleast_2d(np.asarray(samples, dtype=float))
    r = np.linalg.norm(xi, axis=-1)
    if np.any(r < 1.0):
        raise ValueError("samples must satisfy |xi| >= 1")
    rho = boundary_defining(r)
    vals = rho ** m * (1.0 + r) ** m
    c1, c2 = float(vals.min()), float(vals.max())
    ok = 0 < c1 <= c2 < np.inf and c2 / c1 <= 2.0 ** abs(m) + tol
    return WeightBounds(m, c1, c2, bool(ok))


# ------------------------------------------------------- b-derivatives

@dataclass
class BDerivativeReport:
    sups: dict
    constant: float
    passed: bool


def _sphere_point(angles, dim):
    """Point on S^(dim-1) from dim-1 hyperspherical angles (last axis)."""
    if dim == 1:
        return np.ones(angles.shape[:-1] + (1,))
    out = np.ones(angles.shape[:-1] + (dim,))
    sin_prod = np.ones(angles.shape[:-1])
    for j in range(dim - 1):
        out[..., j] = sin_prod * np.cos(angles[..., j])
        sin_prod = sin_prod * np.sin(angles[..., j])
    out[..., dim - 1] = sin_prod
    return out


def b_derivative_check(sym: Symbol, m: Optional[float] = None, dim: int = 1, r_max: float = 1e3,
                       count: int = 400, h: float = 1e-3, constant: float = 4.0,
                       seed: int = 0) -> BDerivativeReport:
    """Sup of ``(rho d_rho)^a d_phi^b [rho^m a(xi(rho, phi))]`` for ``a + b <= 2``.

    Evaluated by central differences in ``t = log rho`` and in the angles
    of the boundary chart, at base point 0, over radii log-uniform in
    ``[1, r_max]``.  ``dim`` is the fiber dimension.
    """
    if sym.cls not in (Psi, Partial):
        raise ValueError("b-derivative check applies to Psi and Partial symbols")
    m = sym.order.m if m is None else m
    rng = np.random.default_rng(seed)
    D = dim
    t = -rng.uniform(0.0, np.log(r_max), size=count)
    ang = rng.uniform(0.3, np.pi - 0.3, size=(count, max(D - 1, 0)))
    if D > 1:
        ang[:, -1] = rng.uniform(0, 2 * np.pi, size=count)

    def F(tt, aa):
        rho = np.exp(tt)
        xi = _sphere_point(aa, D) / rho[..., None]
        base = np.zeros(xi.shape[:-1] + (D,))
        return rho ** m * np.asarray(sym(base, xi))

    sups = {}
    sups[(0, 0)] = float(np.max(np.abs(F(t, ang))))
    sups[(1, 0)] = float(np.max(np.abs((F(t + h, ang) - F(t - h, ang)) / (2 * h))))
    sups[(2, 0)] = float(np.max(np.abs((F(t + h, ang) - 2 * F(t, ang) + F(t - h, ang)) / h ** 2)))
    for j in range(D - 1):
        e = np.zeros(D - 1)
        e[j] = h
        d1 = (F(t, ang + e) - F(t, ang - e)) / (2 * h)
        d2 = (F(t, ang + e) - 2 * F(t, ang) + F(t, ang - e)) / h ** 2
        mixed = (F(t + h, ang + e) - F(t + h, ang - e) - F(t - h, ang + e) + F(t - h, ang - e)) / (4 * h * h)
        sups[(0, 1, j)] = float(np.max(np.abs(d1)))
        sups[(0, 2, j)] = float(np.max(np.abs(d2)))
        sups[(1, 1, j)] = float(np.max(np.abs(mixed)))
    passed = all(np.isfinite(v) and v <= constant for v in sups.values())
    return BDerivativeReport(sups, constant, bool(passed))


# ---------------------------------------------------------- blow-up fits

def rho_tangential(p):
    """Structural boundary defining function ``1/(1 + |p'|)``."""
    return 1.0 / (1.0 + np.linalg.norm(p, axis=-1))


def _rho_ff_family():
    """Candidate front-face defining functions ``(name, f(p, tau))``."""
    fam = {}
    for sign in (-1, 1):
        for s in (-2.0, -1.0, -0.5):
            name = f"rho^{sign:+d} (|p|^2+|tau|^2)^{s:g}"
            fam[name] = (lambda p, tau, sign=sign, s=s:
                         rho_tangential(p) ** sign
                         * (np.sum(p ** 2, -1) + np.sum(tau ** 2, -1)) ** s)
    fam["(|p|+|tau|)^-1"] = lambda p, tau: 1.0 / (np.linalg.norm(p, axis=-1) + np.linalg.norm(tau, axis=-1))
    return fam


#: the front-face function as stated in the reference formulas
LITERAL_CANDIDATE = "rho^-1 (|p|^2+|tau|^2)^-2"


def sample_blowup_points(count: int = 2000, dp: int = 1, dt: int = 1, lo: float = 30.0,
                         hi: float = 1e3, gap: tuple = (2.0, 3.0), seed: int = 0):
    """Fiber points split between the regimes ``|p| >> |tau|`` and ``|tau| >> |p|``.

    The dominant component has magnitude log-uniform in ``[lo, hi]``; the
    other is smaller by a factor ``10^u`` with ``u`` uniform in ``gap``.
    """
    rng = np.random.default_rng(seed)

    def vec(mag, dim):
        v = rng.normal(size=(len(mag), dim))
        return v / np.linalg.norm(v, axis=1, keepdims=True) * mag[:, None]

    big = np.exp(rng.uniform(np.log(lo), np.log(hi), size=count))
    small = big * 10.0 ** -rng.uniform(*gap, size=count)
    half = count // 2
    p = vec(np.concatenate([big[:half], small[half:]]), dp)
    tau = vec(np.concatenate([small[:half], big[half:]]), dt)
    return p, tau


def _fit(logw, cols):
    A = np.column_stack(cols + [np.ones_like(logw)])
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise FitError("log-weights are collinear on the samples")
    coef, *_ = np.linalg.lstsq(A, logw, rcond=None)
    res = logw - A @ coef
    return coef, float(np.sqrt(np.mean(res ** 2)))


def _pattern_residual(logw, lr, lf, a, b):
    """RMS residual with exponents fixed, only a constant factor fitted."""
    res = logw - a * lr - b * lf
    res = res - res.mean()
    return float(np.sqrt(np.mean(res ** 2)))


def fit_pair(k: float, l: float, p, tau, tol: float = 0.05) -> dict:
    """Fit ``(1+|p|)^k (1+|p|+|tau|)^l ~ rho^a rho_ff^b`` for every candidate."""
    logw = k * np.log1p(np.linalg.norm(p, axis=-1)) + l * np.log(
        1.0 + np.linalg.norm(p, axis=-1) + np.linalg.norm(tau, axis=-1))
    lr = np.log(rho_tangential(p))
    pattern = (l - k, -l)
    out = {}
    for name, f in _rho_ff_family().items():
        lf = np.log(f(p, tau))
        try:
            coef, res = _fit(logw, [lr, lf])
            fitted = (float(coef[0]), float(coef[1]))
        except FitError:
            fitted, res = (float("nan"), float("nan")), float("nan")
        pres = _pattern_residual(logw, lr, lf, *pattern)
        out[name] = {"fitted": fitted, "residual": res, "pattern_residual": pres,
                     "attains_pattern": bool(pres <= tol)}
    best = min(out, key=lambda n: out[n]["pattern_residual"])
    return {"k": k, "l": l, "pattern": pattern, "candidates": out, "best": best,
            "best_residual": out[best]["pattern_residual"],
            "literal_residual": out[LITERAL_CANDIDATE]["pattern_residual"],
            "attained": out[best]["attains_pattern"]}


def blowup_weight_fit(cls, order, samples=None, tol: float = 0.05, seed: int = 0) -> dict:
    """Exponent fits of the b or g class weight against blow-up weights.

    For class B the fiber pair is ``(p', tau') = (xi', eta'')``.  For class
    G the two normal fibers are blown up separately: the pair
    ``(xi', xi'')`` sees B-type orders ``(k + l, m)`` and the pair
    ``(xi', eta'')`` sees ``(k + m, l)``.
    """
    order = as_order(cls, order)
    if samples is None:
        samples = sample_blowup_points(seed=seed)
    p, tau = samples
    if order.cls is B:
        return {"class": "B", "fits": {"(xi', eta'')": fit_pair(order.k, order.l, p, tau, tol)}}
    if order.cls is G:
        return {"class": "G", "fits": {
            "(xi', xi'')": fit_pair(order.k + order.l, order.m, p, tau, tol),
            "(xi', eta'')": fit_pair(order.k + order.m, order.l, p, tau, tol),
        }}
    raise ValueError("blow-up fits apply to classes B and G")
