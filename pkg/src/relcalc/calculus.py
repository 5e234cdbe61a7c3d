"""Block-operator algebra, adjoints, norms and the L^2 boundedness sweep."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .errors import PreconditionError, ShapeError
from .geometry import TorusEmbedding
from .quantizer import BLOCK_SPACES, BlockOperator, extract_symbol, quantize, symbol_table
from .symbols import (B, C, G, MultiOrder, Partial, Psi, Symbol, as_class, make_classical_symbol,
                      order_compose, twisted_product_leading)

# (output block, left block, right block) of the 2x2 product
_TERMS = (
    ("MM", "MM", "MM"), ("MM", "MY", "YM"),
    ("MY", "MM", "MY"), ("MY", "MY", "YY"),
    ("YM", "YM", "MM"), ("YM", "YY", "YM"),
    ("YY", "YM", "MY"), ("YY", "YY", "YY"),
)

#: relative Frobenius threshold for blocks that ought to vanish
NEGLIGIBLE = 1e-8


def compose_blocks(A: BlockOperator, Bop: BlockOperator, kappa: Optional[float] = None) -> BlockOperator:
    """2x2 block product ``A Bop`` with order bookkeeping.

    Orders of each output block are combined from the order tags of the
    factors.  A term whose class pair has no composition rule is expected
    to vanish; it is recorded in ``flags`` if its norm is not negligible.
    """
    if A.emb != Bop.emb:
        raise ShapeError("operators live on different grids")
    emb = A.emb
    kappa = emb.nu if kappa is None else kappa
    mats = {k: np.zeros_like(getattr(A, k)) for k in BLOCK_SPACES}
    meta = {k: [] for k in BLOCK_SPACES}
    flags = list(A.flags) + list(Bop.flags)
    for out, left, right in _TERMS:
        L, R = getattr(A, left), getattr(Bop, right)
        term = L @ R
        mats[out] += term
        for a, b in itertools.product(A.meta.get(left, ()), Bop.meta.get(right, ())):
            res = order_compose(a, b, kappa)
            if res is None:
                size = np.linalg.norm(term)
                scale = np.linalg.norm(L) * np.linalg.norm(R)
                if size > NEGLIGIBLE * max(scale, 1e-300):
                    flags.append(f"{out}: {a} * {b} has no composition rule but norm {size:.3e}")
            elif res not in meta[out]:
                meta[out].append(res)
    return BlockOperator(emb, **mats, meta={k: tuple(v) for k, v in meta.items()}, flags=flags)


_ADJ_BLOCK = {"MM": "MM", "MY": "YM", "YM": "MY", "YY": "YY"}


def adjoint_order(order: MultiOrder) -> MultiOrder:
    """Leading order of the formal adjoint; B and C trade places."""
    cls = order.cls
    if cls in (Psi, Partial):
        return order
    if cls is B:
        return MultiOrder(C, (order.l, order.k))
    if cls is C:
        return MultiOrder(B, (order.k, order.m))
    return MultiOrder(G, (order.l, order.k, order.m))


def adjoint(A: BlockOperator) -> BlockOperator:
    """L^2 adjoint: conjugate-transpose blocks with the grid volume ratio."""
    emb = A.emb
    ratio = emb.h ** emb.nu
    mats = {
        "MM": A.MM.conj().T,
        "YY": A.YY.conj().T,
        "MY": A.YM.conj().T / ratio,
        "YM": A.MY.conj().T * ratio,
    }
    meta = {_ADJ_BLOCK[k]: tuple(adjoint_order(o) for o in v) for k, v in A.meta.items()}
    return BlockOperator(emb, **mats, meta=meta, flags=list(A.flags))


def block_adjoint(mat: np.ndarray, emb: TorusEmbedding, spaces: tuple) -> np.ndarray:
    """L^2 adjoint of a single block mapping ``spaces[1]`` to ``spaces[0]``.

    From ``<A f, g>_out = <f, A* g>_in`` one gets ``A* = A^H w_out / w_in``.
    """
    out, inp = spaces
    return mat.conj().T * (emb.weight(out) / emb.weight(inp))


def operator_norm(A, max_iter: int = 2000, tol: float = 1e-12, weights=None, seed: int = 0,
                  method: str = "power") -> float:
    """L^2 operator norm from the top eigenvalue of ``A^dagger A``.

    Parameters
    ----------
    A : ndarray or BlockOperator
        Matrix acting on grid functions.
    weights : tuple of (out_weights, in_weights), optional
        Quadrature weights (scalars or vectors) of the output and input
        grids; defaults to the block weights for a BlockOperator and to the
        Euclidean inner product for a bare matrix.
    method : {"power", "lanczos"}
        Plain power iteration, or the implicitly restarted Lanczos solver of
        scipy, which is much faster when the top singular values cluster.
    """
    if isinstance(A, BlockOperator):
        w = A.weights()
        weights = (w, w)
        A = A.full()
    A = np.asarray(A)
    if weights is None:
        wo = wi = 1.0
    else:
        wo, wi = (np.asarray(w, dtype=float) for w in weights)
    so, si = np.sqrt(wo), np.sqrt(wi)
    if not np.any(A):
        return 0.0
    if method == "lanczos":
        At = np.reshape(so, (-1, 1)) * A / np.reshape(si, (1, -1))
        op = LinearOperator((A.shape[1],) * 2, matvec=lambda x: At.conj().T @ (At @ x), dtype=complex)
        v0 = np.random.default_rng(seed).normal(size=A.shape[1]).astype(complex)
        top = eigsh(op, k=1, which="LA", tol=tol, maxiter=max_iter, v0=v0,
                    return_eigenvectors=False)
        return float(np.sqrt(max(top[0], 0.0)))
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    v = rng.normal(size=A.shape[1]) + 1j * rng.normal(size=A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        u = so * (A @ (v / si))
        w = (A.conj().T @ (so * u)) / si
        new = float(np.real(np.vdot(v, w)))
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(new - lam) <= tol * abs(new):
            return float(np.sqrt(new))
        lam = new
    warnings.warn("power iteration did not converge; returning best estimate",
                  RuntimeWarning, stacklevel=2)
    return float(np.sqrt(lam))


# ------------------------------------------------------------- L^2 sweep

@dataclass
class NormReport:
    orders: dict
    Ns: list
    norms: list
    ratio: float
    bounded: bool
    forced: bool
    violations: list = field(default_factory=list)

    @property
    def increasing(self) -> bool:
        return all(b > a for a, b in zip(self.norms, self.norms[1:]))


def l2_orders(m_g, k_g, k_c, k_b, nu: int, kappa: Optional[float] = None) -> dict:
    """Derived orders l_g, l_b, m_c of the bounded operator matrix."""
    kappa = nu if kappa is None else kappa
    return {"m_g": m_g, "k_g": k_g, "l_g": -m_g - k_g - kappa,
            "k_b": k_b, "l_b": -k_b - nu / 2, "k_c": k_c, "m_c": -k_c - nu / 2}


def l2_violations(m_g, k_g, k_c, k_b, nu: int) -> list:
    out = []
    if not k_g > 0:
        out.append("k_g > 0")
    if not k_c > 0:
        out.append("k_c > 0")
    if not k_b > 0:
        out.append("k_b > 0")
    if not m_g < -nu / 2:
        out.append("m_g < -nu/2")
    if not m_g + k_g > -nu / 2:
        out.append("m_g + k_g > -nu/2")
    return out


def l2_operator(emb: TorusEmbedding, orders: dict, scale: float = 1.0, cutoff: bool = True) -> BlockOperator:
    """Operator matrix assembled from canonical classical symbols of the given orders."""
    parts = [
        make_classical_symbol(Psi, 0),
        make_classical_symbol(G, (orders["m_g"], orders["k_g"], orders["l_g"])),
        make_classical_symbol(C, (orders["m_c"], orders["k_c"])),
        make_classical_symbol(B, (orders["k_b"], orders["l_b"])),
        make_classical_symbol(Partial, 0),
    ]
    op = BlockOperator.zeros(emb)
    for sym in parts:
        op = op + quantize(sym.scale(scale), emb, cutoff=cutoff)
    return op


def verify_l2_bound(orders: Sequence[float], Ns: Sequence[int], n: int = 2, d: int = 1,
                    kappa: Optional[float] = None, force: bool = False, ratio_tol: float = 1.10,
                    scale: float = 1.0, cutoff: bool = True) -> NormReport:
    """Operator norms of the full operator matrix over a sweep of grid sizes.

    ``orders`` is ``(m_g, k_g, k_c, k_b)``; the remaining orders are derived
    by ``l2_orders``.  Passes when the max/min norm ratio is at most
    ``ratio_tol``.
    """
    m_g, k_g, k_c, k_b = orders
    nu = n - d
    bad = l2_violations(m_g, k_g, k_c, k_b, nu)
    if bad and not force:
        raise PreconditionError("order constraints violated: " + ", ".join(bad))
    full = l2_orders(m_g, k_g, k_c, k_b, nu, kappa)
    norms = []
    for N in Ns:
        emb = TorusEmbedding(n, d, N)
        norms.append(operator_norm(l2_operator(emb, full, scale, cutoff), tol=1e-10,
                                   method="lanczos"))
    lo, hi = min(norms), max(norms)
    ratio = 1.0 if hi == 0.0 else hi / lo if lo > 0 else float("inf")
    return NormReport(full, list(Ns), norms, ratio, bool(ratio <= ratio_tol), bool(bad), bad)


# --------------------------------------------- twisted products vs. operators

def _inner_mask(table_shape, nb, N):
    """Points of the dual lattice with every component inside the inner half."""
    k = np.arange(-N // 2, N // 2)
    inner = np.abs(k) < N // 4
    mask = np.ones(table_shape[nb:], dtype=bool)
    for ax in range(len(table_shape) - nb):
        shape = [1] * (len(table_shape) - nb)
        shape[ax] = N
        mask = mask & inner.reshape(shape)
    return mask


def compare_twisted(a: Symbol, b: Symbol, emb: TorusEmbedding, kappa: Optional[float] = None) -> dict:
    """Extracted symbol of ``Op(a) Op(b)`` against the leading twisted product.

    Both operators are quantized without cutoff; the excess integral is
    truncated at ``R = N/2`` to match the lattice.  Returns the relative
    sup error on the inner half of the dual lattice.
    """
    A = quantize(a, emb)
    Bq = quantize(b, emb)
    prod = compose_blocks(A, Bq, kappa)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        tw = twisted_product_leading(a, b, R=emb.N / 2, nu=emb.nu, kappa=kappa)
    from .quantizer import BLOCK_OF
    block = getattr(prod, BLOCK_OF[tw.cls])
    ext = extract_symbol(block, tw.cls, emb)
    ref = symbol_table(tw, emb, full=True)
    nb = tw.cls.base_dim(emb.n, emb.d)
    mask = _inner_mask(ref.shape, nb, emb.N)
    diff = np.abs(ext - ref)[..., mask]
    err = float(diff.max() / np.abs(ref[..., mask]).max())
    return {"class": tw.cls, "order": tw.order, "rel_sup_error": err,
            "extracted": ext, "twisted": ref}


def predicted_slopes(order: MultiOrder) -> tuple:
    """Decay exponent along each fiber group with the other groups at zero."""
    o, cls = order, order.cls
    if cls in (Psi, Partial):
        return (o.m,)
    if cls is B:
        return (o.k + o.l, o.l)
    if cls is C:
        return (o.m + o.k, o.m)
    return (o.k + o.m + o.l, o.m, o.l)


def measure_slopes(table: np.ndarray, cls, emb: TorusEmbedding, rmin: float = 2.0,
                   rmax: Optional[float] = None) -> tuple:
    """Log-log slopes of ``mean_x |a|`` along the first axis of each fiber group.

    The slope is taken against ``log <r>`` over lattice radii in
    ``[rmin, rmax]`` (default ``N/4``), with every other fiber component 0.
    """
    cls = as_class(cls)
    N = emb.N
    rmax = N / 4 if rmax is None else rmax
    nb = cls.base_dim(emb.n, emb.d)
    mag = np.abs(table).reshape((-1,) + table.shape[nb:]).mean(axis=0)
    centre = N // 2
    slopes = []
    pos = 0
    for gd in cls.group_dims(emb.n, emb.d):
        idx = [centre] * mag.ndim
        r = np.arange(N // 2)
        r = r[(r >= rmin) & (r <= rmax)]
        vals = []
        for ri in r:
            idx[pos] = centre + ri
            vals.append(mag[tuple(idx)])
        x = 0.5 * np.log1p(r.astype(float) ** 2)
        slopes.append(float(np.polyfit(x, np.log(np.asarray(vals)), 1)[0]))
        pos += gd
    return tuple(slopes)
