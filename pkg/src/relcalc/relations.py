"""Point-cloud models of the five canonical relations and their composition.

A relation point is a pair (source, target) of cotangent points.  The
source is the covector on the operator's output space, the target the one
on its input space, so ``compose_relations(R1, R2)`` models the product
``A1 A2`` of operators.  Cotangent points are stored as flat rows
``(x, xi)``: ``(x', x'', xi', xi'')`` on T*M and ``(x', xi')`` on T*Y.

In these coordinates the five relations are

    Psi      ((x, xi), (x, xi))
    G        ((x', 0, xi', xi''), (x', 0, xi', eta''))
    B        ((x', xi'), (x', 0, xi', eta''))
    C        ((x', 0, xi', xi''), (x', xi'))
    Partial  ((x', xi'), (x', xi'))
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import CompositionError
from .geometry import TorusEmbedding, wrap
from .symbols import B, C, G, LagrangianClass, Partial, Psi, SPACES, as_class

UNKNOWN = "Unknown"

#: order in which tables are printed
CLASS_ORDER = (Partial, Psi, B, C, G)


@dataclass
class RelationSample:
    """Finite sample of a conic relation in ``T*X1 x T*X2``.

    ``label`` is a ``LagrangianClass`` or ``UNKNOWN``; ``signature`` the
    pair of space tags ("M" or "Y") of source and target.
    """

    label: object
    signature: tuple
    src: np.ndarray
    tgt: np.ndarray
    emb: TorusEmbedding
    tol: float = 1e-8

    def __post_init__(self):
        self.src = np.asarray(self.src, dtype=float).reshape(-1, 2 * self.emb._dim(self.signature[0]))
        self.tgt = np.asarray(self.tgt, dtype=float).reshape(-1, 2 * self.emb._dim(self.signature[1]))
        if len(self.src) != len(self.tgt):
            raise ValueError("source and target arrays have different lengths")

    def __len__(self):
        return len(self.src)

    @property
    def points(self):
        return list(zip(self.src, self.tgt))


def _split(points, dim):
    return points[:, :dim], points[:, dim:]


def _random_vectors(rng, count, dim, N):
    """Log-uniform magnitude in [1, N/2], uniform direction."""
    if dim == 0:
        return np.zeros((count, 0))
    v = rng.normal(size=(count, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    mag = np.exp(rng.uniform(0.0, np.log(N / 2), size=count))
    return v * mag[:, None]


def _lattice_points(rng, count, dim, N):
    return 2 * np.pi * rng.integers(0, N, size=(count, dim)) / N


def sample_relation(label, emb: TorusEmbedding, count: int, seed: int = 0) -> RelationSample:
    """Random points of a canonical relation.

    Base points lie on the grid lattice; every fiber group has log-uniform
    magnitude in ``[1, N/2]`` and uniform direction.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    cls = as_class(label)
    rng = np.random.default_rng(seed)
    n, d, nu, N = emb.n, emb.d, emb.nu, emb.N
    if cls is Psi:
        x = _lattice_points(rng, count, n, N)
        xi = _random_vectors(rng, count, n, N)
        p = np.hstack([x, xi])
        return RelationSample(cls, SPACES[cls], p, p.copy(), emb)
    x1 = _lattice_points(rng, count, d, N)
    p1 = _random_vectors(rng, count, d, N)
    zero = np.zeros((count, nu))
    on_y = np.hstack([x1, p1])
    if cls is Partial:
        return RelationSample(cls, SPACES[cls], on_y, on_y.copy(), emb)
    q = _random_vectors(rng, count, nu, N)
    e = _random_vectors(rng, count, nu, N)
    left = np.hstack([x1, zero, p1, q])
    right = np.hstack([x1, zero, p1, e])
    if cls is B:
        return RelationSample(cls, SPACES[cls], on_y, right, emb)
    if cls is C:
        return RelationSample(cls, SPACES[cls], left, on_y, emb)
    return RelationSample(cls, SPACES[cls], left, right, emb)


# ------------------------------------------------------------ parametrization

def _lift(cls, emb, points, rng, side):
    """Points of ``cls`` whose ``side`` ("src" or "tgt") equals the given rows.

    Rows that cannot lie on that side of the relation (x'' != 0 where the
    relation requires the slice) are dropped.  Returns (src, tgt).
    """
    n, d, nu, N = emb.n, emb.d, emb.nu, emb.N
    space = SPACES[cls][0 if side == "src" else 1]
    if points.shape[1] != 2 * emb._dim(space):
        return np.zeros((0, 2 * emb._dim(SPACES[cls][0]))), np.zeros((0, 2 * emb._dim(SPACES[cls][1])))
    if cls in (Psi, Partial):
        return points.copy(), points.copy()
    if space == "M":
        on_slice = np.all(np.abs(wrap(points[:, d:n])) <= 1e-12, axis=1)
        points = points[on_slice]
    k = len(points)
    x1 = points[:, :d]
    p1 = points[:, emb._dim(space):emb._dim(space) + d]
    zero = np.zeros((k, nu))
    free = _random_vectors(rng, k, nu, N)
    on_y = np.hstack([x1, p1])
    fresh = np.hstack([x1, zero, p1, free])
    if cls is B:
        return (on_y, fresh) if side == "src" else (on_y, points.copy())
    if cls is C:
        return (points.copy(), on_y) if side == "src" else (fresh, on_y)
    return (points.copy(), fresh) if side == "src" else (fresh, points.copy())


def _match(tgt, src, tol):
    """Index pairs (i, j) with ``|tgt_i - src_j| < tol`` (positions mod 2 pi)."""
    if len(tgt) == 0 or len(src) == 0:
        return np.zeros((0, 2), dtype=int)
    # positions are reduced to [0, 2 pi) first so equal points coincide
    tree = cKDTree(src)
    pairs = tree.query_ball_point(tgt, r=tol)
    out = [(i, j) for i, js in enumerate(pairs) for j in js]
    return np.array(out, dtype=int).reshape(-1, 2)


def _canon(points, dim):
    out = points.copy()
    out[:, :dim] = np.mod(out[:, :dim], 2 * np.pi)
    out[:, :dim][np.abs(out[:, :dim] - 2 * np.pi) < 1e-12] = 0.0
    return out


def compose_relations(R1: RelationSample, R2: RelationSample, tol: float = 1e-9,
                      condition: bool = True, seed: int = 0) -> RelationSample:
    """Set composition ``R1 o R2 = {(p, r) : (p, q) in R1, (q, r) in R2}``.

    With ``condition`` (and both inputs labelled) each sample is first
    enlarged by lifting the other's middle points, so that exact
    coincidences occur instead of rare near misses.
    """
    if R1.signature[1] != R2.signature[0]:
        raise CompositionError(
            f"target space {R1.signature[1]} of the first relation does not match "
            f"source space {R2.signature[0]} of the second"
        )
    emb = R1.emb
    s1, t1, s2, t2 = R1.src, R1.tgt, R2.src, R2.tgt
    if condition and R1.label != UNKNOWN and R2.label != UNKNOWN:
        rng = np.random.default_rng(seed)
        ls, lt = _lift(R2.label, emb, R1.tgt, rng, "src")
        bs, bt = _lift(R1.label, emb, R2.src, rng, "tgt")
        s1, t1 = np.vstack([s1, bs]), np.vstack([t1, bt])
        s2, t2 = np.vstack([s2, ls]), np.vstack([t2, lt])
    mid = emb._dim(R1.signature[1])
    pairs = _match(_canon(t1, mid), _canon(s2, mid), tol)
    if len(pairs) == 0:
        warnings.warn("relation composition is empty", RuntimeWarning, stacklevel=2)
    src = s1[pairs[:, 0]] if len(pairs) else np.zeros((0, s1.shape[1]))
    tgt = t2[pairs[:, 1]] if len(pairs) else np.zeros((0, t2.shape[1]))
    return RelationSample(UNKNOWN, (R1.signature[0], R2.signature[1]), src, tgt, emb, R1.tol)


# ------------------------------------------------------------- classification

def _member(cls, emb, src, tgt, tol):
    """Boolean mask: which points satisfy the defining equations of ``cls``."""
    n, d = emb.n, emb.d
    if (src.shape[1], tgt.shape[1]) != tuple(2 * emb._dim(s) for s in SPACES[cls]):
        return np.zeros(len(src), dtype=bool)

    def close(a, b, periodic=False):
        diff = wrap(a - b) if periodic else a - b
        return np.all(np.abs(diff) <= tol, axis=1)

    if cls in (Psi, Partial):
        dim = n if cls is Psi else d
        return close(src[:, :dim], tgt[:, :dim], True) & close(src[:, dim:], tgt[:, dim:])

    def on_m(p):
        return p[:, :d], p[:, d:n], p[:, n:n + d]

    def on_y(p):
        return p[:, :d], None, p[:, d:]

    xs, xs2, ps = on_m(src) if SPACES[cls][0] == "M" else on_y(src)
    xt, xt2, pt = on_m(tgt) if SPACES[cls][1] == "M" else on_y(tgt)
    ok = close(xs, xt, True) & close(ps, pt)
    for x2 in (xs2, xt2):
        if x2 is not None:
            ok &= close(x2, np.zeros_like(x2), True)
    return ok


def classify_relation(R: RelationSample, emb: Optional[TorusEmbedding] = None, tol: Optional[float] = None):
    """The unique canonical class containing every point of ``R``, else ``UNKNOWN``."""
    emb = emb or R.emb
    tol = R.tol if tol is None else tol
    if len(R) == 0:
        return UNKNOWN
    hits = [c for c in LagrangianClass if np.all(_member(c, emb, R.src, R.tgt, tol))]
    return hits[0] if len(hits) == 1 else UNKNOWN


def check_admissibility(R: RelationSample, tol: float = 1e-12) -> dict:
    """No sampled point may carry a vanishing covector on either factor."""
    ds = R.emb._dim(R.signature[0])
    dt = R.emb._dim(R.signature[1])
    zs = np.linalg.norm(R.src[:, ds:], axis=1) <= tol
    zt = np.linalg.norm(R.tgt[:, dt:], axis=1) <= tol
    return {"admissible": bool(not zs.any() and not zt.any()),
            "zero_source": int(zs.sum()), "zero_target": int(zt.sum())}


_TRANSPOSE = {B: C, C: B, Psi: Psi, G: G, Partial: Partial}


def transpose_relation(R: RelationSample) -> RelationSample:
    """Swap source and target of every point (B and C trade places)."""
    label = _TRANSPOSE[R.label] if R.label != UNKNOWN else UNKNOWN
    return RelationSample(label, R.signature[::-1], R.tgt.copy(), R.src.copy(), R.emb, R.tol)


# ----------------------------------------------------------------- tables

def derived_table(emb: TorusEmbedding, count: int = 1000, seed: int = 0,
                  tol: float = 1e-9) -> dict:
    """Classified composition of every ordered pair of canonical relations.

    Returns ``{(left, right): class, UNKNOWN or None}``; None marks pairs whose
    spaces do not chain.
    """
    samples = {c: sample_relation(c, emb, count, seed=seed * 101 + i)
               for i, c in enumerate(CLASS_ORDER)}
    table = {}
    for k, (a, b) in enumerate(itertools.product(CLASS_ORDER, repeat=2)):
        Ra, Rb = samples[a], samples[b]
        if Ra.signature[1] != Rb.signature[0]:
            table[(a, b)] = None
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            comp = compose_relations(Ra, Rb, tol, seed=seed * 1009 + k)
        table[(a, b)] = classify_relation(comp, emb) if len(comp) else None
    return table


# rows as printed: (row label, [entries for columns Partial, Psi, B, C, G]);
# "-" means no composition
PRINTED_TABLE = [
    ("Partial", ["Partial", "-", "B", "-", "-"]),
    ("Psi", ["-", "Psi", "-", "C", "G"]),
    ("G", ["-", "B", "-", "Partial", "B"]),
    ("C", ["G", "-", "G", "-", "-"]),
    ("G", ["-", "G", "-", "C", "G"]),
]


def table_discrepancies(derived: dict) -> list:
    """Compare the printed composition table with a derived one.

    Each printed row is matched against the derived row of its label; a
    row whose label does not fit its entries is reported together with the
    label that does.
    """
    out = []
    derived_rows = {c: [_name(derived.get((c, col))) for col in CLASS_ORDER] for c in CLASS_ORDER}
    for idx, (label, entries) in enumerate(PRINTED_TABLE):
        row = derived_rows[as_class(label)]
        if row != entries:
            best = max(CLASS_ORDER, key=lambda c: sum(a == b for a, b in zip(derived_rows[c], entries)))
            if str(best) != label:
                out.append({"row": idx + 1, "kind": "row label", "printed": label,
                            "derived": str(best)})
                row = derived_rows[best]
            for col, p, dv in zip(CLASS_ORDER, entries, row):
                if p != dv:
                    out.append({"row": idx + 1, "kind": "entry", "left": str(best),
                                "right": str(col), "printed": p, "derived": dv})
    return out


def _name(value):
    if value is None:
        return "-"
    return str(value)


def cleanness_proxy(R1: RelationSample, R2: RelationSample, tol: float = 1e-9, seed: int = 0) -> dict:
    """Match-count stability when the tolerance is halved (same resampling)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        full = len(compose_relations(R1, R2, tol, seed=seed))
        half = len(compose_relations(R1, R2, tol / 2, seed=seed))
    change = abs(full - half) / max(full, 1)
    return {"matches": full, "matches_half_tol": half, "relative_change": change,
            "clean": bool(full > 0 and change < 0.05)}
