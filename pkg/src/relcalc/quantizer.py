"""Kohn-Nirenberg quantization of the five symbol classes on the torus grid.

Fiber integrals become sums over the integer dual lattice, so for a symbol
sampled on the lattice the kernel is an exact Fourier series.  Matrix
entries carry the quadrature weight of the input grid, ``K(x, y) h^dim``,
so plain matrix products are compositions of operators and

    <f, g>_M = h^n sum f* g,    <f, g>_Y = h^d sum f* g.

Kernel layout, with T the inverse fiber transform of the symbol table::

    Psi      K(x, y)              = T[x, x - y]
    Partial  K(x', y')            = T[x', x' - y']
    B        K(x', (y', y''))     = T[x', x' - y', -y'']
    C        K((x', x''), y')     = T[x', x' - y', x'']
    G        K((x', x''), (y', y''))  = T[x', x' - y', x'', -y'']
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ResolutionError, ShapeError
from .geometry import TorusEmbedding, cutoff_chi
from .symbols import B, C, G, LagrangianClass, MultiOrder, Partial, Psi, Symbol, as_class

TWO_PI = 2.0 * np.pi

BLOCK_OF = {Psi: "MM", G: "MM", C: "MY", B: "YM", Partial: "YY"}
BLOCK_SPACES = {"MM": ("M", "M"), "MY": ("M", "Y"), "YM": ("Y", "M"), "YY": ("Y", "Y")}
BLOCK_CLASSES = {"MM": (Psi, G), "MY": (C,), "YM": (B,), "YY": (Partial,)}

#: symbols larger than this on the lattice cannot be represented reliably
OVERFLOW = 1e12


@dataclass
class BlockOperator:
    """2x2 operator matrix acting on L^2(M) + L^2(Y) grid functions.

    ``meta`` maps each block name to the tuple of ``MultiOrder`` tags of the
    terms it contains (MM may hold a Psi part and a G part).
    """

    emb: TorusEmbedding
    MM: np.ndarray
    MY: np.ndarray
    YM: np.ndarray
    YY: np.ndarray
    meta: dict = field(default_factory=lambda: {k: () for k in BLOCK_SPACES})
    flags: list = field(default_factory=list)

    def __post_init__(self):
        for name, (out, inp) in BLOCK_SPACES.items():
            shape = (self.emb.size(out), self.emb.size(inp))
            mat = getattr(self, name)
            if mat.shape != shape:
                raise ShapeError(f"block {name} must have shape {shape}, got {mat.shape}")
            for order in self.meta.get(name, ()):
                if order.cls not in BLOCK_CLASSES[name]:
                    raise ShapeError(f"class {order.cls} cannot sit in block {name}")

    @classmethod
    def zeros(cls, emb: TorusEmbedding) -> "BlockOperator":
        mats = {k: np.zeros((emb.size(o), emb.size(i)), dtype=complex)
                for k, (o, i) in BLOCK_SPACES.items()}
        return cls(emb, **mats)

    @classmethod
    def identity(cls, emb: TorusEmbedding) -> "BlockOperator":
        op = cls.zeros(emb)
        op.MM[...] = np.eye(emb.m_size)
        op.YY[...] = np.eye(emb.y_size)
        op.meta = {"MM": (MultiOrder(Psi, 0),), "MY": (), "YM": (),
                   "YY": (MultiOrder(Partial, 0),)}
        return op

    @classmethod
    def single(cls, emb, order: MultiOrder, matrix) -> "BlockOperator":
        op = cls.zeros(emb)
        name = BLOCK_OF[order.cls]
        getattr(op, name)[...] = matrix
        op.meta = dict(op.meta)
        op.meta[name] = (order,)
        op.__post_init__()
        return op

    def block(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        if other.emb != self.emb:
            raise ShapeError("operators live on different grids")
        meta = {k: tuple(dict.fromkeys(self.meta.get(k, ()) + other.meta.get(k, ())))
                for k in BLOCK_SPACES}
        return BlockOperator(self.emb, *(getattr(self, k) + getattr(other, k) for k in BLOCK_SPACES),
                             meta=meta, flags=self.flags + other.flags)

    def scale(self, c: complex) -> "BlockOperator":
        return replace(self, **{k: c * getattr(self, k) for k in BLOCK_SPACES})

    def full(self) -> np.ndarray:
        """The assembled ``(N^n + N^d)``-square matrix."""
        return np.block([[self.MM, self.MY], [self.YM, self.YY]])

    def weights(self) -> np.ndarray:
        e = self.emb
        return np.concatenate([np.full(e.m_size, e.weight("M")), np.full(e.y_size, e.weight("Y"))])


# ------------------------------------------------------------------ layout

def _layout(cls: LagrangianClass, emb: TorusEmbedding):
    """Axis counts: (base, tangential fiber, normal-out, normal-in)."""
    n, d, nu = emb.n, emb.d, emb.nu
    return {
        Psi: (n, n, 0, 0),
        Partial: (d, d, 0, 0),
        B: (d, d, 0, nu),
        C: (d, d, nu, 0),
        G: (d, d, nu, nu),
    }[cls]


def symbol_table(sym: Symbol, emb: TorusEmbedding, full: bool = False) -> np.ndarray:
    """Samples of ``sym`` on base grid x dual lattice.

    Shape ``(N,)*base + (N,)*fiber`` with fiber axes in centered order and
    in the class's group order.  For x-independent symbols the base axes
    have length 1 unless ``full`` is set.
    """
    cls = sym.cls
    nb = cls.base_dim(emb.n, emb.d)
    gdims = cls.group_dims(emb.n, emb.d)
    N = emb.N
    if sym.x_independent:
        base = np.zeros((1,) * nb + (1,) * sum(gdims) + (nb,))
        base_shape = (1,) * nb
    else:
        base = emb.grid("Y" if cls is not Psi else "M").reshape((N,) * nb + (1,) * sum(gdims) + (nb,))
        base_shape = (N,) * nb
    groups = []
    pos = 0
    total = sum(gdims)
    for gd in gdims:
        mesh = np.meshgrid(*([emb.freqs.astype(float)] * gd), indexing="ij")
        g = np.stack(mesh, axis=-1)
        shape = (1,) * nb + (1,) * pos + (N,) * gd + (1,) * (total - pos - gd) + (gd,)
        groups.append(g.reshape(shape))
        pos += gd
    table = np.asarray(sym(base, *groups), dtype=complex)
    table = np.broadcast_to(table, base_shape + (N,) * total)
    if not np.all(np.isfinite(table)) or np.max(np.abs(table), initial=0.0) > OVERFLOW:
        raise ResolutionError(
            f"{cls} symbol of order {sym.order} exceeds {OVERFLOW:g} on the N={N} lattice"
        )
    if full and sym.x_independent:
        table = np.broadcast_to(table, (N,) * nb + (N,) * total)
    return np.array(table)


def _open_indices(N, count, offset, total):
    """Open-mesh index arrays for ``count`` axes starting at ``offset`` of ``total``."""
    out = []
    for i in range(count):
        shape = [1] * total
        shape[offset + i] = N
        out.append(np.arange(N).reshape(shape))
    return out


def _kernel_indices(cls, emb, base_len):
    """Index tuple into T for each (output, input) grid pair, plus displacements."""
    nb, nt, no, ni = _layout(cls, emb)
    N = emb.N
    n_out = nb + no
    n_in = (nt if cls in (Psi, Partial) else emb.d) + ni
    if cls is B:
        n_out, n_in = emb.d, emb.n
    total = n_out + n_in
    out_idx = _open_indices(N, n_out, 0, total)
    in_idx = _open_indices(N, n_in, n_out, total)
    zero = np.zeros((1,) * total, dtype=int)
    base = [(o if base_len > 1 else zero) for o in out_idx[:nb]]
    tang = [(o - i) % N for o, i in zip(out_idx[:nb], in_idx[:nb])]
    normal_out = out_idx[nb:nb + no]
    normal_in = [(-i) % N for i in in_idx[nb:nb + ni]]
    disp = tang
    if cls is G:
        disp = tang + [(o - i) % N for o, i in zip(normal_out, in_idx[nb:])]
    return tuple(base + tang + normal_out + normal_in), disp, n_out, n_in


def _inverse_transform(table, nb):
    axes = tuple(range(nb, table.ndim))
    k = len(axes)
    N = table.shape[-1]
    return np.fft.ifftn(np.fft.ifftshift(table, axes=axes), axes=axes) * (N ** k / TWO_PI ** k)


def _forward_transform(T, nb):
    axes = tuple(range(nb, T.ndim))
    k = len(axes)
    N = T.shape[-1]
    return np.fft.fftshift(np.fft.fftn(T, axes=axes), axes=axes) * (TWO_PI ** k / N ** k)


def quantize_table(table: np.ndarray, cls, emb: TorusEmbedding, cutoff: bool = False) -> np.ndarray:
    """Matrix of the operator with sampled symbol ``table`` (see ``symbol_table``)."""
    cls = as_class(cls)
    nb = cls.base_dim(emb.n, emb.d)
    T = _inverse_transform(table, nb)
    idx, disp, n_out, n_in = _kernel_indices(cls, emb, table.shape[0])
    K = T[idx]
    if cutoff:
        K = K * cutoff_chi(np.stack(np.broadcast_arrays(*disp), axis=-1) * emb.h)
    N = emb.N
    in_space = cls.spaces[1]
    return K.reshape(N ** n_out, N ** n_in) * emb.weight(in_space)


def quantize(sym: Symbol, emb: TorusEmbedding, cutoff: bool = False) -> BlockOperator:
    """Operator matrix of ``sym``, placed in the block its class belongs to.

    ``cutoff`` multiplies the kernel by the radial cutoff in the
    displacement; with ``cutoff=False`` (chi = 1) quantization is exactly
    invertible by ``extract_symbol``.
    """
    mat = quantize_table(symbol_table(sym, emb), sym.cls, emb, cutoff=cutoff)
    return BlockOperator.single(emb, sym.order, mat)


def extract_symbol(block: np.ndarray, cls, emb: TorusEmbedding) -> np.ndarray:
    """Sampled symbol of a block, the inverse of ``quantize`` with chi = 1.

    Returns an array in the ``symbol_table`` layout with full base axes.
    """
    cls = as_class(cls)
    out_space, in_space = cls.spaces
    shape = (emb.size(out_space), emb.size(in_space))
    if block.shape != shape:
        raise ShapeError(f"{cls} block must have shape {shape}, got {block.shape}")
    nb, nt, no, ni = _layout(cls, emb)
    N = emb.N
    K = (block / emb.weight(in_space)).reshape((N,) * (emb._dim(out_space) + emb._dim(in_space)))
    n_out = emb._dim(out_space)
    total_T = nb + nt + no + ni
    t_idx = _open_indices(N, total_T, 0, total_T)
    base = t_idx[:nb]
    tang = t_idx[nb:nb + nt]
    u = t_idx[nb + nt:nb + nt + no]
    w = t_idx[nb + nt + no:]
    out = list(base) + list(u)
    inn = [(b - z) % N for b, z in zip(base, tang)] + [(-x) % N for x in w]
    if cls in (Psi, Partial):
        out = list(base)
    T = K[tuple(out + inn)]
    assert T.ndim == total_T and n_out == len(out)
    return _forward_transform(T, nb)


def restriction_matrix(emb: TorusEmbedding) -> np.ndarray:
    """Slice sampling ``(r f)(x') = f(x', 0)`` as a Y x M matrix."""
    r = np.zeros((emb.y_size, emb.m_size))
    r[np.arange(emb.y_size), emb.slice_indices()] = 1.0
    return r


def fourier_multiplier(emb: TorusEmbedding, space: str, func) -> np.ndarray:
    """Matrix of the x-independent Fourier multiplier ``func(|xi|^2)`` on a grid."""
    dim = emb._dim(space)
    k2 = np.sum(emb.dual(dim) ** 2, axis=1).reshape((emb.N,) * dim)
    table = np.asarray(func(k2), dtype=complex)[None] if dim else None
    table = table.reshape((1,) * dim + (emb.N,) * dim)
    cls = Psi if space == "M" else Partial
    return quantize_table(table, cls, emb)
