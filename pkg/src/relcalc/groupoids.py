"""Sampled Lie groupoids: pair, b-, cusp and cotangent (CDW) groupoids.

Arrows and units are stored as rows of float arrays.  Every groupoid uses
the composition convention ``m(g1, g2) = g1 o g2``, defined when
``s(g1) = r(g2)``, so that for the pair groupoid
``(x, z) o (z, y) = (x, y)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

#: lambda range of boundary isotropy arrows (log-uniform)
LOG_LAMBDA = 4.0


def _close(a, b, tol):
    """Row-wise max relative deviation."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return np.max(np.abs(a - b) / scale, axis=-1)


@dataclass
class SampledGroupoid:
    """Structure maps of a groupoid together with samplers.

    Parameters
    ----------
    sample_units : callable ``(rng, k) -> (k, unit_dim)``
    arrows_from : callable ``(rng, units) -> arrows`` with ``r(arrows) = units``
    s, r : callables ``arrows -> units``
    u : callable ``units -> arrows``
    i : callable ``arrows -> arrows``
    m : callable ``(g1, g2) -> g1 o g2`` for composable rows
    constraint : optional callable ``arrows -> residual`` (zero on valid arrows)
    """

    name: str
    sample_units: Callable
    arrows_from: Callable
    s: Callable
    r: Callable
    u: Callable
    i: Callable
    m: Callable
    constraint: Optional[Callable] = None
    tol: float = 1e-12
    notes: list = field(default_factory=list)

    def sample_arrows(self, rng, k):
        return self.arrows_from(rng, self.sample_units(rng, k))

    def composable(self, g1, g2, tol: Optional[float] = None):
        tol = self.tol if tol is None else tol
        return _close(self.s(g1), self.r(g2), 0) <= tol

    def multiply(self, g1, g2):
        """``g1 o g2``; raises ValueError on non-composable rows."""
        g1, g2 = np.atleast_2d(g1), np.atleast_2d(g2)
        if not np.all(self.composable(g1, g2)):
            raise ValueError("arrows are not composable")
        return self.m(g1, g2)


# ------------------------------------------------------------------ pair

def pair_groupoid(points: np.ndarray) -> SampledGroupoid:
    """Pair groupoid ``P x P`` on a finite point set (rows of ``points``)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) == 0:
        raise ValueError("need a nonempty point set")
    dim = points.shape[1]

    def sample_units(rng, k):
        return points[rng.integers(0, len(points), k)]

    def arrows_from(rng, units):
        return np.hstack([units, sample_units(rng, len(units))])

    return SampledGroupoid(
        "pair",
        sample_units,
        arrows_from,
        s=lambda g: g[:, dim:],
        r=lambda g: g[:, :dim],
        u=lambda x: np.hstack([x, x]),
        i=lambda g: np.hstack([g[:, dim:], g[:, :dim]]),
        m=lambda g1, g2: np.hstack([g1[:, :dim], g2[:, dim:]]),
    )


# ------------------------------------------------------------- b and cusp

def _identity_bdf(k):
    return [lambda t: t] * k


def _sample_corner_points(rng, count, k, boundary_prob=0.3, low=0.05):
    x = rng.uniform(low, 1.0, size=(count, k))
    x[rng.random((count, k)) < boundary_prob] = 0.0
    return x


def _same_stratum(rng, units, low=0.05):
    """Points with the zero pattern of ``units`` (same boundary stratum)."""
    z = rng.uniform(low, 1.0, size=units.shape)
    z[units == 0.0] = 0.0
    return z


def b_groupoid(k: int = 1, defining: Optional[Sequence[Callable]] = None,
               corrupt: bool = False, boundary_prob: float = 0.3) -> SampledGroupoid:
    """b-groupoid of ``[0, 1]^k`` with faces ``{x_i = 0}``.

    Arrows are rows ``(x, y, lambda)`` with ``p_i(x) = lambda_i p_i(y)``.
    Over a face (``x_i = y_i = 0``) ``lambda_i`` is free and is sampled
    log-uniformly on ``[e^-4, e^4]``.  ``corrupt`` replaces the product of
    the lambdas by their sum (a negative control).
    """
    p = list(defining) if defining is not None else _identity_bdf(k)

    def pv(x):
        return np.stack([p[j](x[:, j]) for j in range(k)], axis=1)

    def arrows_from(rng, units):
        y = _same_stratum(rng, units)
        px, py = pv(units), pv(y)
        free = np.exp(rng.uniform(-LOG_LAMBDA, LOG_LAMBDA, size=units.shape))
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = np.where(py != 0.0, px / np.where(py != 0, py, 1.0), free)
        return np.hstack([units, y, lam])

    def mult(g1, g2):
        lam = g1[:, 2 * k:] + g2[:, 2 * k:] if corrupt else g1[:, 2 * k:] * g2[:, 2 * k:]
        return np.hstack([g1[:, :k], g2[:, k:2 * k], lam])

    def constraint(g):
        return pv(g[:, :k]) - g[:, 2 * k:] * pv(g[:, k:2 * k])

    return SampledGroupoid(
        "b-corrupted" if corrupt else "b",
        lambda rng, n: _sample_corner_points(rng, n, k, boundary_prob),
        arrows_from,
        s=lambda g: g[:, k:2 * k],
        r=lambda g: g[:, :k],
        u=lambda x: np.hstack([x, x, np.ones_like(x)]),
        i=lambda g: np.hstack([g[:, k:2 * k], g[:, :k], 1.0 / g[:, 2 * k:]]),
        m=mult,
        constraint=constraint,
    )


def cusp_lambda(px, py, n: int):
    """Solution of ``lambda p(x)^n p(y)^n = p(x)^n - p(y)^n`` for interior points."""
    return 1.0 / py ** n - 1.0 / px ** n


def cusp_groupoid(n: int = 2, k: int = 1, defining: Optional[Sequence[Callable]] = None,
                  boundary_prob: float = 0.3) -> SampledGroupoid:
    """Generalized cusp groupoid with constraint
    ``lambda_i p_i(x)^n p_i(y)^n = p_i(x)^n - p_i(y)^n``.

    The constraint makes ``lambda`` additive: ``lambda(x, y) + lambda(y, z)
    = lambda(x, z)``, so arrows multiply by adding lambdas, the unit has
    ``lambda = 0`` and lambda ranges over the reals.
    """
    if n < 2:
        raise ValueError("cusp order n must be >= 2")
    p = list(defining) if defining is not None else _identity_bdf(k)

    def pv(x):
        return np.stack([p[j](x[:, j]) for j in range(k)], axis=1)

    def arrows_from(rng, units):
        y = _same_stratum(rng, units)
        px, py = pv(units), pv(y)
        free = rng.uniform(-np.exp(LOG_LAMBDA), np.exp(LOG_LAMBDA), size=units.shape)
        safe_x = np.where(px != 0, px, 1.0)
        safe_y = np.where(py != 0, py, 1.0)
        lam = np.where((px != 0) & (py != 0), cusp_lambda(safe_x, safe_y, n), free)
        return np.hstack([units, y, lam])

    def constraint(g):
        px, py, lam = pv(g[:, :k]), pv(g[:, k:2 * k]), g[:, 2 * k:]
        return lam * px ** n * py ** n - (px ** n - py ** n)

    return SampledGroupoid(
        f"cusp(n={n})",
        lambda rng, m: _sample_corner_points(rng, m, k, boundary_prob, low=0.2),
        arrows_from,
        s=lambda g: g[:, k:2 * k],
        r=lambda g: g[:, :k],
        u=lambda x: np.hstack([x, x, np.zeros_like(x)]),
        i=lambda g: np.hstack([g[:, k:2 * k], g[:, :k], -g[:, 2 * k:]]),
        m=lambda g1, g2: np.hstack([g1[:, :k], g2[:, k:2 * k], g1[:, 2 * k:] + g2[:, 2 * k:]]),
        constraint=constraint,
        notes=["lambda is additive and real-valued; a multiplicative law does not preserve the constraint"],
    )


# --------------------------------------------------------------- CDW

def cdw_of_pair(dim: int = 1, scale: float = 3.0) -> SampledGroupoid:
    """Cotangent groupoid ``T*(M x M)`` of the pair groupoid on ``M = R^dim``.

    Arrows ``(x, y, xi, eta)``; units ``(x, xi)`` embedded as
    ``(x, x, xi, -xi)``; ``s(x, y, xi, eta) = (y, -eta)``,
    ``r = (x, xi)``; ``(x, z, xi, zeta) o (z, y, -zeta, eta) = (x, y, xi, eta)``;
    inverse ``(y, x, -eta, -xi)``.
    """
    d = dim
    X, Y, XI, ETA = (slice(0, d), slice(d, 2 * d), slice(2 * d, 3 * d), slice(3 * d, 4 * d))

    def sample_units(rng, k):
        return rng.uniform(-scale, scale, size=(k, 2 * d))

    def arrows_from(rng, units):
        other = sample_units(rng, len(units))
        return np.hstack([units[:, :d], other[:, :d], units[:, d:], other[:, d:]])

    return SampledGroupoid(
        "cdw-pair",
        sample_units,
        arrows_from,
        s=lambda g: np.hstack([g[:, Y], -g[:, ETA]]),
        r=lambda g: np.hstack([g[:, X], g[:, XI]]),
        u=lambda v: np.hstack([v[:, :d], v[:, :d], v[:, d:], -v[:, d:]]),
        i=lambda g: np.hstack([g[:, Y], g[:, X], -g[:, ETA], -g[:, XI]]),
        m=lambda g1, g2: np.hstack([g1[:, X], g2[:, Y], g1[:, XI], g2[:, ETA]]),
    )


def cdw_of_b(dim: int = 1, scale: float = 3.0) -> SampledGroupoid:
    """Boundary part of the cotangent groupoid of the b-groupoid.

    Arrows ``(x1, xi1, x2, xi2, lam, theta)`` in
    ``T*(dM x dM) x T*R_+``, with ``theta`` the (trivialized) covector on
    ``R_+``.  Units ``(x, xi, theta)`` embed as ``(x, xi, x, -xi, 1, theta)``;

        s = (x2, -xi2, theta),    r = (x1, xi1, theta),
        (x1, xi1, x2, xi2, lam, theta) o (x2, -xi2, x3, xi3, mu, theta)
            = (x1, xi1, x3, xi3, lam mu, theta),
        inverse (x2, -xi2, x1, -xi1, 1/lam, theta).

    See ``literal_cdw_b_report`` for the formulas exactly as printed.
    """
    d = dim
    X1, P1, X2, P2 = (slice(0, d), slice(d, 2 * d), slice(2 * d, 3 * d), slice(3 * d, 4 * d))
    L, T = 4 * d, 4 * d + 1

    def sample_units(rng, k):
        v = rng.uniform(-scale, scale, size=(k, 2 * d + 1))
        return v

    def arrows_from(rng, units):
        k = len(units)
        other = rng.uniform(-scale, scale, size=(k, 2 * d))
        lam = np.exp(rng.uniform(-LOG_LAMBDA, LOG_LAMBDA, size=(k, 1)))
        return np.hstack([units[:, :d], units[:, d:2 * d], other[:, :d], other[:, d:], lam,
                          units[:, 2 * d:]])

    def col(g, i):
        return g[:, i:i + 1]

    return SampledGroupoid(
        "cdw-b",
        sample_units,
        arrows_from,
        s=lambda g: np.hstack([g[:, X2], -g[:, P2], col(g, T)]),
        r=lambda g: np.hstack([g[:, X1], g[:, P1], col(g, T)]),
        u=lambda v: np.hstack([v[:, :d], v[:, d:2 * d], v[:, :d], -v[:, d:2 * d],
                               np.ones((len(v), 1)), v[:, 2 * d:]]),
        i=lambda g: np.hstack([g[:, X2], -g[:, P2], g[:, X1], -g[:, P1], 1.0 / col(g, L), col(g, T)]),
        m=lambda g1, g2: np.hstack([g1[:, X1], g1[:, P1], g2[:, X2], g2[:, P2],
                                    col(g1, L) * col(g2, L), col(g1, T)]),
    )


def literal_cdw_b_report(trials: int = 1000, seed: int = 0, dim: int = 1) -> dict:
    """Evaluate the printed boundary CDW formulas on random arrows.

    Printed maps, for ``g = (x1, xi1, x2, xi2, l1, l2)``::

        s(g) = (x2, x2, -xi2, xi2, 1, l2)
        r(g) = (x1, x1, xi1, -xi1, l1, 1)
        g o (x2, -xi2, x3, xi3, 1/l1, l3) = (x1, xi1, x3, xi3, 1, l2 l3)
        g^-1 = (x2, xi2, x1, xi1, 1/l1, 1/l2)

    Reports how often the displayed factor pattern is composable under the
    printed s and r, and whether ``g o g^-1`` is even composable.
    """
    rng = np.random.default_rng(seed)
    d = dim
    x1, p1, x2, p2, x3, p3 = (rng.uniform(-3, 3, size=(trials, d)) for _ in range(6))
    l1, l2, l3 = (np.exp(rng.uniform(-LOG_LAMBDA, LOG_LAMBDA, size=(trials, 1))) for _ in range(3))

    def s(x1, p1, x2, p2, a, b):
        return np.hstack([x2, x2, -p2, p2, np.ones_like(a), b])

    def r(x1, p1, x2, p2, a, b):
        return np.hstack([x1, x1, p1, -p1, a, np.ones_like(a)])

    g = (x1, p1, x2, p2, l1, l2)
    h = (x2, -p2, x3, p3, 1.0 / l1, l3)
    pattern_ok = _close(s(*g), r(*h), 0) <= 1e-12
    ginv = (x2, p2, x1, p1, 1.0 / l1, 1.0 / l2)
    inverse_ok = _close(s(*g), r(*ginv), 0) <= 1e-12
    # units as printed are (x, x, xi, -xi, 1, 1/lam); s of a unit must give it back
    unit = (x1, x1, p1, -p1, np.ones_like(l1), 1.0 / l2)
    unit_fixed = _close(s(*unit), np.hstack(unit), 0) <= 1e-12
    return {
        "displayed_pattern_composable_fraction": float(pattern_ok.mean()),
        "inverse_composable_fraction": float(inverse_ok.mean()),
        "unit_fixed_by_source_fraction": float(unit_fixed.mean()),
        "note": ("printed s and r agree on the displayed factors only when lambda_1 = lambda_2 = 1; "
                 "the printed inverse has xi signs that do not chain with the printed source map"),
    }


# --------------------------------------------------------------- axioms

def check_axioms(G: SampledGroupoid, trials: int = 10_000, seed: int = 0,
                 tol: Optional[float] = None) -> dict:
    """Verify the groupoid axioms on random composable triples.

    Returns ``{axiom: {"passed": bool, "max_error": float}}`` plus an
    overall ``"passed"`` flag.  Errors are max relative deviations.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = G.tol if tol is None else tol
    rng = np.random.default_rng(seed)
    a = G.sample_arrows(rng, trials)
    b = G.arrows_from(rng, G.s(a))
    c = G.arrows_from(rng, G.s(b))
    x = G.sample_units(rng, trials)
    ab, bc = G.m(a, b), G.m(b, c)
    checks = {
        "composable_sampling": _close(G.s(a), G.r(b), 0),
        "associativity": _close(G.m(ab, c), G.m(a, bc), 0),
        "left_unit": _close(G.m(G.u(G.r(a)), a), a, 0),
        "right_unit": _close(G.m(a, G.u(G.s(a))), a, 0),
        "right_inverse": _close(G.m(a, G.i(a)), G.u(G.r(a)), 0),
        "left_inverse": _close(G.m(G.i(a), a), G.u(G.s(a)), 0),
        "source_of_product": _close(G.s(ab), G.s(b), 0),
        "range_of_product": _close(G.r(ab), G.r(a), 0),
        "units": np.maximum(_close(G.s(G.u(x)), x, 0), _close(G.r(G.u(x)), x, 0)),
        "inverse_involution": _close(G.i(G.i(a)), a, 0),
    }
    if G.constraint is not None:
        def resid(g):
            return np.max(np.abs(G.constraint(g)), axis=-1)
        checks["constraint_samples"] = resid(np.vstack([a, b, c]))
        checks["constraint_product"] = resid(ab)
        checks["constraint_inverse"] = resid(G.i(a))
    report = {}
    for name, err in checks.items():
        err = float(np.max(err))
        report[name] = {"passed": bool(err <= tol), "max_error": err}
    report["passed"] = all(v["passed"] for v in report.values())
    return report


# --------------------------------------------------------------- bibundle

@dataclass
class Bibundle:
    """``Z = r^-1(Y)`` for a hyperplane ``Y = {x_k = c}`` of the b-groupoid of ``[0, 1]^k``.

    ``p = r`` (onto Y), ``q = s`` (onto M); ``G(M)`` acts on the right by
    composition and ``G(Y)`` on the left through the arrows
    ``((a, c), (b, c), (nu, 1))``.
    """

    GM: SampledGroupoid
    GY: Optional[SampledGroupoid]
    k: int
    c: float

    def sample_z(self, rng, count):
        ypts = self.sample_y(rng, count)
        return self.GM.arrows_from(rng, ypts)

    def sample_y(self, rng, count):
        pts = self.GM.sample_units(rng, count)
        pts[:, -1] = self.c
        return pts

    def p(self, z):
        return self.GM.r(z)

    def q(self, z):
        return self.GM.s(z)

    def right(self, z, g):
        return self.GM.m(z, g)

    def embed_y_arrow(self, h):
        k = self.k
        a, b, nu = h[:, :k - 1], h[:, k - 1:2 * k - 2], h[:, 2 * k - 2:]
        col = np.full((len(h), 1), self.c)
        return np.hstack([a, col, b, col, nu, np.ones((len(h), 1))])

    def left(self, h, z):
        return self.GM.m(self.embed_y_arrow(h), z)

    def y_arrows_to(self, rng, ypts):
        """Arrows of G(Y) whose source is the given point of Y."""
        if self.GY is None:
            return np.hstack([ypts[:, :0], ypts[:, :0], ypts[:, :0]])
        tgt = self.GY.arrows_from(rng, ypts[:, :-1])
        return self.GY.i(tgt)

    @staticmethod
    def witness(z, w, k):
        """``eta = (y, y~, mu/lambda)`` for ``z = (x', y, lambda)``, ``w = (x', y~, mu)``."""
        return np.hstack([z[:, k:2 * k], w[:, k:2 * k], w[:, 2 * k:] / z[:, 2 * k:]])


def bibundle_from_embedding(k: int = 1, c: float = 0.5, count: int = 1000, seed: int = 0,
                            tol: float = 1e-12) -> tuple:
    """Build ``Z = r^-1(Y)`` for ``Y = {x_k = c}`` and verify the bibundle claims.

    Checks (a) commuting actions, (b) freeness of the right action, (c) the
    quotient witness ``eta = (y, y~, mu/lambda)`` with ``z eta = w`` and
    ``eta`` satisfying the b-constraint, (d) surjectivity of ``q`` onto the
    points of M in the saturation of Y (those with ``x_k > 0``), plus
    ``z u = z``.
    """
    if not c > 0:
        raise ValueError("Y must lie in the interior direction x_k = c > 0")
    GM = b_groupoid(k)
    GY = b_groupoid(k - 1) if k > 1 else None
    Z = Bibundle(GM, GY, k, c)
    rng = np.random.default_rng(seed)
    report = {}

    z = Z.sample_z(rng, count)
    g = GM.arrows_from(rng, Z.q(z))
    h = Z.y_arrows_to(rng, Z.p(z)) if k > 1 else None
    if h is not None:
        lhs = Z.right(Z.left(h, z), g)
        rhs = Z.left(h, Z.right(z, g))
        err = float(np.max(_close(lhs, rhs, 0)))
    else:
        err = 0.0
    report["actions_commute"] = {"passed": err <= tol, "max_error": err}

    zu = Z.right(z, GM.u(Z.q(z)))
    err = float(np.max(_close(zu, z, 0)))
    report["right_unit"] = {"passed": err <= tol, "max_error": err}

    # freeness: the unique arrow with z g = z is the witness of (z, z)
    fix = Bibundle.witness(z, z, k)
    err = float(np.max(_close(fix, GM.u(Z.q(z)), 0)))
    err_act = float(np.max(_close(Z.right(z, fix), z, 0)))
    report["free"] = {"passed": max(err, err_act) <= tol, "max_error": max(err, err_act)}

    # witness for pairs with the same image under p
    w = GM.arrows_from(rng, Z.p(z))
    eta = Bibundle.witness(z, w, k)
    err_w = float(np.max(_close(Z.right(z, eta), w, 0)))
    err_c = float(np.max(np.abs(GM.constraint(eta))))
    comp = float(np.max(_close(Z.q(z), GM.r(eta), 0)))
    bad = np.flatnonzero(_close(Z.right(z, eta), w, 0) > tol)
    report["quotient_witness"] = {
        "passed": max(err_w, err_c, comp) <= tol,
        "max_error": max(err_w, err_c, comp),
        "offending": [(z[i].tolist(), w[i].tolist()) for i in bad[:5]],
    }

    # surjectivity of q onto the saturation of Y
    m = GM.sample_units(rng, count)
    inside = m[:, -1] > 0
    pm = m[inside]
    py = pm.copy()
    py[:, -1] = c
    lam = np.where(pm != 0, py / np.where(pm != 0, pm, 1.0), 1.0)
    pre = np.hstack([py, pm, lam])
    err_q = float(np.max(_close(Z.q(pre), pm, 0))) if len(pre) else 0.0
    err_r = float(np.max(np.abs(GM.constraint(pre)))) if len(pre) else 0.0
    report["q_surjective_onto_saturation"] = {
        "passed": max(err_q, err_r) <= tol,
        "max_error": max(err_q, err_r),
        "sampled": int(len(m)),
        "outside_saturation": int((~inside).sum()),
    }
    report["passed"] = all(v["passed"] for v in report.values() if isinstance(v, dict))
    return Z, report
