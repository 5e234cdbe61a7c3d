"""Verification suites run by the command line driver.

Each suite takes a resolved configuration dictionary and returns a list
of ``Check`` records.  Checks carry a short statement of the claim they
test in ``paper_ref``; ``status`` is "pass", "fail" or "info" (measured
and reported, not asserted).
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .calculus import (adjoint, compare_twisted, compose_blocks, measure_slopes, predicted_slopes,
                       verify_l2_bound)
from .compactify import (LITERAL_CANDIDATE, b_derivative_check, blowup_weight_fit,
                         check_weight_equivalence, decompactify, radial_compactify)
from .generating_pair import (adjoint_from_m, adjoint_from_y, build_generating_pair, leakage_ratio,
                              lower_bound_check, singularity_position_check, far_bump)
from .geometry import TorusEmbedding
from .groupoids import (b_groupoid, bibundle_from_embedding, cdw_of_b, cdw_of_pair, check_axioms,
                        cusp_groupoid, cusp_lambda, literal_cdw_b_report, pair_groupoid)
from .quantizer import BLOCK_OF, BlockOperator, extract_symbol, quantize, restriction_matrix, symbol_table
from .relations import (CLASS_ORDER, check_admissibility, classify_relation, cleanness_proxy,
                        compose_relations, derived_table, sample_relation, table_discrepancies,
                        transpose_relation)
from .symbols import (B, C, G, LagrangianClass, MultiOrder, ORDER_TABLE, Partial, Psi, Symbol,
                      check_symbol_estimates, make_classical_symbol, order_compose,
                      sample_phase_points, table_discrepancies as order_discrepancies,
                      twisted_product_leading)


@dataclass
class Check:
    name: str
    paper_ref: str
    status: str
    measured: Any
    expected: Any = None
    tolerance: Any = None

    def as_dict(self) -> dict:
        return {k: jsonable(v) for k, v in asdict(self).items()}


@dataclass
class SuiteResult:
    checks: list
    tables: dict = field(default_factory=dict)


def jsonable(value):
    """Plain JSON types; floats rounded to 12 significant digits."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12g}")
    if isinstance(value, (complex, np.complexfloating)):
        return [jsonable(value.real), jsonable(value.imag)]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (LagrangianClass, MultiOrder)):
        return repr(value) if isinstance(value, MultiOrder) else str(value)
    if value is None or isinstance(value, str):
        return value
    return str(value)


def _check(name, ref, ok, measured, expected=None, tolerance=None) -> Check:
    return Check(name, ref, "pass" if ok else "fail", measured, expected, tolerance)


def _info(name, ref, measured, expected=None) -> Check:
    return Check(name, ref, "info", measured, expected, None)


def _grids(cfg, cap=None):
    Ns = cfg["geometry"]["N"]
    Ns = [Ns] if isinstance(Ns, int) else list(Ns)
    if cap is None:
        return Ns
    small = [N for N in Ns if N <= cap]
    return small or [min(Ns)]


def _emb(cfg, N):
    g = cfg["geometry"]
    return TorusEmbedding(g["n"], g["d"], N)


def _kappa(cfg, emb):
    k = cfg["orders"]["kappa"]
    return emb.nu if k is None else k


def _rel(a, b):
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


# ------------------------------------------------------------ relations

def relations_suite(cfg) -> SuiteResult:
    emb = _emb(cfg, min(_grids(cfg)))
    seed, count = cfg["sampling"]["seed"], cfg["sampling"]["count"]
    t1 = derived_table(emb, count=count, seed=seed)
    t2 = derived_table(emb, count=count, seed=seed + 1)

    def named(t):
        return {f"{a} o {b}": ("-" if v is None else str(v)) for (a, b), v in t.items()}

    checks = [
        _check("relations.table_stable", "composition table of the five canonical relations",
               named(t1) == named(t2), named(t1), "identical under two seeds"),
    ]
    expected = {(C, B): G, (B, C): Partial, (Partial, B): B, (Psi, C): C, (Psi, G): G, (G, G): G,
                (Psi, Psi): Psi}
    for (a, b), want in expected.items():
        checks.append(_check(f"relations.entry.{a}_o_{b}", f"{a} after {b} composes to {want}",
                             t1[(a, b)] is want, str(t1[(a, b)]), str(want)))
    chain_ok = all((t1[(a, b)] is None) == (a.spaces[1] != b.spaces[0]) for a, b in t1)
    checks.append(_check("relations.non_chaining_empty", "pairs whose spaces do not chain",
                         chain_ok, sum(v is None for v in t1.values()), "exactly the non-chaining pairs"))
    checks.append(_info("relations.printed_table_discrepancies",
                        "printed composition table against the derived one", table_discrepancies(t1)))
    for cls in CLASS_ORDER:
        R = sample_relation(cls, emb, count, seed=seed)
        adm = check_admissibility(R)
        checks.append(_check(f"relations.admissible.{cls}", "no zero covector on either factor",
                             adm["admissible"], adm, {"admissible": True}))
        checks.append(_check(f"relations.classify.{cls}", "sampled relation classifies as itself",
                             classify_relation(R) is cls, str(classify_relation(R)), str(cls)))
    Rb = sample_relation(B, emb, count, seed=seed)
    Rt = transpose_relation(Rb)
    tt = transpose_relation(Rt)
    invol = bool(np.array_equal(tt.src, Rb.src) and np.array_equal(tt.tgt, Rb.tgt))
    checks.append(_check("relations.transpose", "transpose of the boundary relation is the coboundary one",
                         classify_relation(Rt) is C and invol,
                         {"class": str(classify_relation(Rt)), "involution": invol}, {"class": "C"}))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        n_tr = len(compose_relations(Rb, Rt, seed=seed))
    checks.append(_check("relations.convolvable_with_transpose",
                         "boundary relation composes with its transpose", n_tr > 0, n_tr, "> 0"))
    for a, b in ((C, B), (B, C), (G, G)):
        cp = cleanness_proxy(sample_relation(a, emb, count, seed=seed),
                             sample_relation(b, emb, count, seed=seed + 7), seed=seed)
        checks.append(_check(f"relations.clean.{a}_o_{b}", "clean composition (match-count stability)",
                             cp["clean"], cp, "relative change < 0.05"))
    rows = [{"left": str(a), "right": str(b), "composition": "-" if v is None else str(v)}
            for (a, b), v in t1.items()]
    return SuiteResult(checks, {"relations_table": rows})


# ------------------------------------------------------------- symbols

_ESTIMATE_ORDERS = {Psi: (-1.0,), Partial: (-1.0,), B: (1.0, -2.0), C: (-2.0, 1.0), G: (-0.75, 1.0, -1.25)}


def _base_profile(x):
    return 1.0 + 0.3 * np.cos(np.sum(x, axis=-1))


def _phase_profile(theta):
    return 1.0 + 0.2 * np.cos(np.sum(theta, axis=-1))


def symbols_suite(cfg) -> SuiteResult:
    g, tol = cfg["geometry"], cfg["tolerances"]
    seed = cfg["sampling"]["seed"]
    const = tol["estimate_constant"]
    checks = []
    for cls, order in _ESTIMATE_ORDERS.items():
        sym = make_classical_symbol(cls, order, _base_profile, _phase_profile)
        pts = sample_phase_points(cls, g["n"], g["d"], 200, 1e3, seed=seed)
        rep = check_symbol_estimates(sym, 2, pts, constant=const)
        checks.append(_check(f"symbols.estimates.{cls}", "canonical symbols satisfy the class estimates",
                             rep.passed, rep.max_sup, f"<= {const}", const))
    growth = Symbol(Psi, 0, lambda base, xi: np.exp(np.linalg.norm(xi, axis=-1)), x_independent=True)
    pts = sample_phase_points(Psi, g["n"], g["d"], 200, 50.0, seed=seed)
    rep = check_symbol_estimates(growth, 2, pts, constant=const)
    checks.append(_check("symbols.estimates.exponential_rejected", "exponential growth is not a symbol",
                         not rep.passed, rep.max_sup, f"> {const}", const))

    rng = np.random.default_rng(seed)
    bad = bad_lit = total = 0
    for a, b, c in itertools.product(LagrangianClass, repeat=3):
        for _ in range(20):
            A, Bo, Co = (MultiOrder(x, rng.uniform(-3, 3, len(x.order_names))) for x in (a, b, c))
            for literal in (False, True):
                ab = order_compose(A, Bo, literal=literal)
                bc = order_compose(Bo, Co, literal=literal)
                if ab is None or bc is None:
                    continue
                left, right = order_compose(ab, Co, literal=literal), order_compose(A, bc, literal=literal)
                if left is None or right is None:
                    continue
                same = left.cls is right.cls and np.allclose(left.values, right.values, atol=1e-12)
                if literal:
                    bad_lit += not same
                else:
                    total += 1
                    bad += not same
    checks.append(_check("symbols.order_associativity", "order arithmetic is associative",
                         bad == 0 and total > 0, {"triples": total, "failures": bad}, {"failures": 0}))
    checks.append(_info("symbols.order_associativity_printed_table",
                        "associativity failures of the table exactly as printed", bad_lit))
    checks.append(_info("symbols.order_table_corrections", "printed order table against the one used",
                        order_discrepancies()))

    kappa = cfg["orders"]["kappa"]
    nu = g["n"] - g["d"]
    kappa = nu if kappa is None else kappa
    cb = order_compose(MultiOrder(C, (0.5, 1.5)), MultiOrder(B, (2.0, -1.0)), kappa)
    bc = order_compose(MultiOrder(B, (1.0, -2.0)), MultiOrder(C, (-2.0, 1.0)), kappa)
    pb = order_compose(MultiOrder(Psi, 1.0), MultiOrder(B, (1.0, 1.0)), kappa)
    ok = (cb == MultiOrder(G, (0.5, 3.5, -1.0)) and bc == MultiOrder(Partial, -2.0 + kappa) and pb is None)
    checks.append(_check("symbols.order_examples", "C*B, B*C and Psi*B order rules", ok,
                         [repr(cb), repr(bc), repr(pb)],
                         ["G(m=0.5, k=3.5, l=-1)", f"Partial(m={-2 + kappa:g})", "None"]))

    b = make_classical_symbol(B, (0.0, -2.0))
    c = make_classical_symbol(C, (-2.0, 0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        prod = twisted_product_leading(b, c, R=200.0, nu=1)
    val = complex(prod(np.zeros((1, 1)), np.zeros((1, 1)))[0])
    checks.append(_check("symbols.twisted_excess_example",
                         "excess integral of B(0,-2) * C(-2,0) at zero frequency", abs(val - 0.25) <= 1e-6,
                         val.real, 0.25, 1e-6))

    a1 = make_classical_symbol(C, (-1.0, 0.5), _base_profile)
    a2 = make_classical_symbol(C, (-1.5, 0.0), None, _phase_profile)
    bb = make_classical_symbol(B, (0.5, -1.0))
    pts = sample_phase_points(G, g["n"], g["d"], 100, 100.0, seed=seed)
    lhs = twisted_product_leading(a1 + a2, bb)(*pts)
    rhs = twisted_product_leading(a1, bb)(*pts) + twisted_product_leading(a2, bb)(*pts)
    err = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))
    checks.append(_check("symbols.twisted_linearity", "twisted product is linear", err <= 1e-12,
                         err, 0.0, 1e-12))
    return SuiteResult(checks)


# ------------------------------------------------------------ quantize

def _test_symbol(cls, order):
    if cls is Psi:
        def base(x):
            return 1.0 + 0.3 * np.cos(x[..., 0]) + 0.2 * np.sin(x[..., 1])
    else:
        base = _base_profile
    return make_classical_symbol(cls, order, base, _phase_profile)


def quantize_suite(cfg) -> SuiteResult:
    tol = cfg["tolerances"]
    emb = _emb(cfg, min(_grids(cfg)))
    checks = []
    for cls, order in _ESTIMATE_ORDERS.items():
        sym = _test_symbol(cls, order)
        block = getattr(quantize(sym, emb), BLOCK_OF[cls])
        err = _rel(extract_symbol(block, cls, emb), symbol_table(sym, emb, full=True))
        checks.append(_check(f"quantize.roundtrip.{cls}", "symbol extraction inverts quantization",
                             err <= tol["roundtrip"], err, 0.0, tol["roundtrip"]))

    one_b = Symbol(B, (0, 0), lambda base, p, e: np.ones(np.broadcast(p[..., 0], e[..., 0]).shape),
                   x_independent=True)
    Rq = quantize(one_b, emb).YM
    err = float(np.max(np.abs(Rq - restriction_matrix(emb))))
    checks.append(_check("quantize.restriction", "b = 1 quantizes to slice sampling",
                         err <= tol["restriction"], err, 0.0, tol["restriction"]))

    one_c = Symbol(C, (0, 0), lambda base, p, q: np.ones(np.broadcast(p[..., 0], q[..., 0]).shape),
                   x_independent=True)
    err = float(np.max(np.abs(adjoint(quantize(one_b, emb)).MY - quantize(one_c, emb).MY)))
    checks.append(_check("quantize.coboundary_is_adjoint", "c = 1 is the adjoint of b = 1",
                         err <= tol["restriction"], err, 0.0, tol["restriction"]))

    one = make_classical_symbol(Psi, 0)
    err = float(np.max(np.abs(quantize(one, emb).MM - np.eye(emb.m_size))))
    checks.append(_check("quantize.identity", "a = 1 quantizes to the identity",
                         err <= tol["restriction"], err, 0.0, tol["restriction"]))

    if emb.d == 1:
        N = emb.N
        deriv = Symbol(Partial, 1, lambda base, xi: 1j * xi[..., 0], x_independent=True)
        D = quantize(deriv, emb).YY
        k = np.fft.fftfreq(N, 1.0 / N)
        oracle = np.fft.ifft(1j * k[:, None] * np.fft.fft(np.eye(N), axis=0), axis=0)
        err = float(np.max(np.abs(D - oracle)) / np.max(np.abs(oracle)))
        checks.append(_check("quantize.spectral_derivative", "i xi quantizes to the spectral derivative",
                             err <= tol["roundtrip"], err, 0.0, tol["roundtrip"]))

    herm = quantize(make_classical_symbol(Psi, -1.0), emb).MM
    err = float(np.max(np.abs(herm - herm.conj().T)))
    checks.append(_check("quantize.hermitian", "real even x-independent symbol gives a Hermitian matrix",
                         err <= 1e-12, err, 0.0, 1e-12))

    a = _test_symbol(G, (-1.0, 0.5, -1.0))
    bsym = make_classical_symbol(G, (-2.0, 1.0, 0.0))
    err = _rel(quantize(a + bsym, emb).MM, quantize(a, emb).MM + quantize(bsym, emb).MM)
    checks.append(_check("quantize.linearity", "quantization is linear", err <= 1e-13, err, 0.0, 1e-13))

    norms = []
    for N in (16, 32, 64):
        e = TorusEmbedding(2, 1, N)
        sym = make_classical_symbol(Partial, -1.0)
        norms.append(float(np.linalg.norm(quantize(sym, e, cutoff=True).YY - quantize(sym, e).YY, 2)))
    change = abs(norms[2] - norms[1]) / norms[2]
    checks.append(_check("quantize.cutoff_difference_converges",
                         "cutoff changes the operator by a fixed smoothing remainder",
                         change <= 0.01, {"N": [16, 32, 64], "norm": norms, "relative_change": change},
                         "relative change 32 to 64 <= 0.01", 0.01))
    return SuiteResult(checks)


# ------------------------------------------------------------- compose

def random_classical(cls, rng, lo=-2.5, hi=-1.5):
    """Classical x-independent symbol with random orders and direction profile."""
    order = tuple(rng.uniform(lo, hi, len(cls.order_names)))
    w = rng.normal(size=6)
    amp = 0.2

    def profile(theta, w=w):
        return 1.0 + amp * np.cos(theta @ w[:theta.shape[-1]])

    return make_classical_symbol(cls, order, phase_profile=profile)


def random_operator(emb, rng, lo=-2.0, hi=-1.0, cutoff=False):
    """Sum of quantized symbols of all five classes with random orders."""
    op = BlockOperator.zeros(emb)
    for cls in LagrangianClass:
        order = tuple(rng.uniform(lo, hi, len(cls.order_names)))
        base_shift = rng.uniform(0, 2 * np.pi)
        sym = make_classical_symbol(cls, order, lambda x, s=base_shift: 1.0 + 0.3 * np.cos(x[..., 0] + s))
        op = op + quantize(sym.scale(complex(*rng.normal(size=2))), emb, cutoff)
    return op


def compose_suite(cfg) -> SuiteResult:
    tol = cfg["tolerances"]
    seed, pairs = cfg["sampling"]["seed"], cfg["sampling"]["pairs"]
    emb = _emb(cfg, max(_grids(cfg, cap=32)))
    kappa = _kappa(cfg, emb)
    rng = np.random.default_rng(seed)
    checks = []
    for (lc, rc) in sorted(ORDER_TABLE, key=lambda p: (str(p[0]), str(p[1]))):
        errs, slope_errs = [], []
        for _ in range(pairs):
            res = compare_twisted(random_classical(lc, rng), random_classical(rc, rng), emb, kappa)
            errs.append(res["rel_sup_error"])
            ms = measure_slopes(res["extracted"], res["class"], emb)
            slope_errs.append(max(abs(x - y) for x, y in zip(ms, predicted_slopes(res["order"]))))
        name = f"{lc}_{rc}"
        checks.append(_check(f"compose.twisted.{name}", f"symbol of {lc} after {rc} is the twisted product",
                             max(errs) <= tol["twisted"], max(errs), 0.0, tol["twisted"]))
        checks.append(_check(f"compose.slopes.{name}", f"decay exponents of {lc} after {rc}",
                             max(slope_errs) <= tol["slope"], max(slope_errs), 0.0, tol["slope"]))

    small = _emb(cfg, min(_grids(cfg)))
    arng = np.random.default_rng(seed + 1)
    assoc, anti = [], []
    for _ in range(20):
        A, Bq, Cq = (random_operator(small, arng) for _ in range(3))
        lhs = compose_blocks(compose_blocks(A, Bq), Cq).full()
        rhs = compose_blocks(A, compose_blocks(Bq, Cq)).full()
        assoc.append(_rel(lhs, rhs))
        anti.append(_rel(adjoint(compose_blocks(A, Bq)).full(), compose_blocks(adjoint(Bq), adjoint(A)).full()))
    checks.append(_check("compose.associativity", "block composition is associative",
                         max(assoc) <= tol["associativity"], max(assoc), 0.0, tol["associativity"]))
    checks.append(_check("compose.adjoint_antihomomorphism", "adjoint reverses products",
                         max(anti) <= tol["antihomomorphism"], max(anti), 0.0, tol["antihomomorphism"]))

    A = random_operator(small, arng)
    err = _rel(adjoint(adjoint(A)).full(), A.full())
    checks.append(_check("compose.adjoint_involution", "adjoint is an involution (to rounding)",
                         err <= 1e-15, err, 0.0, 1e-15))
    ident = compose_blocks(BlockOperator.identity(small), A)
    err = float(np.max(np.abs(ident.full() - A.full())))
    checks.append(_check("compose.identity", "identity blocks act trivially", err <= 1e-15, err, 0.0, 1e-15))

    bq = quantize(make_classical_symbol(B, (1.0, -2.0)), small)
    cq = quantize(make_classical_symbol(C, (-2.0, 1.0)), small)
    bc = compose_blocks(bq, cq, kappa)
    cb = compose_blocks(cq, bq, kappa)
    got = {"B o C": [repr(o) for o in bc.meta["YY"]], "C o B": [repr(o) for o in cb.meta["MM"]]}
    want = {"B o C": [repr(MultiOrder(Partial, -2.0 + kappa))], "C o B": [repr(MultiOrder(G, (-2.0, 2.0, -2.0)))]}
    checks.append(_check("compose.block_tags", "boundary-coboundary products land in the right blocks",
                         got == want and not bc.flags and not cb.flags, got, want))

    table = derived_table(small, count=200, seed=seed)
    mismatch = [f"{a} o {b}" for (a, b) in ORDER_TABLE if table[(a, b)] is not order_compose(
        MultiOrder(a, [0.0] * len(a.order_names)), MultiOrder(b, [0.0] * len(b.order_names))).cls]
    checks.append(_check("compose.relation_consistency", "operator class agrees with relation composition",
                         not mismatch, mismatch, []))
    return SuiteResult(checks)


# --------------------------------------------------------------- norms

def norms_suite(cfg, force: bool = False) -> SuiteResult:
    g, o, tol = cfg["geometry"], cfg["orders"], cfg["tolerances"]
    Ns = _grids(cfg)
    orders = (o["m_g"], o["k_g"], o["k_c"], o["k_b"])
    rep = verify_l2_bound(orders, Ns, g["n"], g["d"], o["kappa"], force=force, ratio_tol=tol["norm_ratio"])
    checks = [_check("norms.bounded", "operator matrix is bounded on L2 uniformly in the grid",
                     rep.bounded, {"N": rep.Ns, "norm": rep.norms, "ratio": rep.ratio},
                     f"max/min <= {tol['norm_ratio']}", tol["norm_ratio"])]
    if rep.forced:
        checks.append(_info("norms.forced_orders", "configured orders violate the constraints", rep.violations))
    forced_orders = (-0.25,) + orders[1:]
    frep = verify_l2_bound(forced_orders, Ns, g["n"], g["d"], o["kappa"], force=True,
                           ratio_tol=tol["norm_ratio"])
    checks.append(_check("norms.violation_grows", "m_g above -nu/2 makes the norm grow with N",
                         frep.increasing, {"N": frep.Ns, "norm": frep.norms, "ratio": frep.ratio},
                         "strictly increasing"))
    tables = {"norms": [{"N": N, "norm": v} for N, v in zip(rep.Ns, rep.norms)],
              "norms_forced": [{"N": N, "norm": v} for N, v in zip(frep.Ns, frep.norms)]}
    return SuiteResult(checks, tables)


# ------------------------------------------------------------- genpair

def genpair_suite(cfg) -> SuiteResult:
    tol = cfg["tolerances"]
    checks = []
    for N in _grids(cfg, cap=32):
        emb = _emb(cfg, N)
        pair = build_generating_pair(emb)
        ident = pair.identity_residual()
        adj = float(np.linalg.norm(pair.jlower - adjoint_from_m(emb, pair.jstar)))
        checks.append(_check(f"genpair.N{N:03d}.identity", "jstar jlower is the identity",
                             ident <= tol["identity"], ident, 0.0, tol["identity"]))
        checks.append(_check(f"genpair.N{N:03d}.adjoint", "jlower is the adjoint of jstar",
                             adj <= tol["adjoint"], adj, 0.0, tol["adjoint"]))
        CtC = adjoint_from_y(emb, pair.C) @ pair.C
        comm = float(np.linalg.norm(pair.S @ CtC - CtC @ pair.S) / np.linalg.norm(CtC))
        checks.append(_check(f"genpair.N{N:03d}.S_commutes", "S is a function of C*C",
                             comm <= 1e-10, comm, 0.0, 1e-10))
        lb = lower_bound_check(pair)
        checks.append(_check(f"genpair.N{N:03d}.lower_bound", "|Cv| >= |v| / |B|", lb["holds"], lb,
                             {"holds": True}))
        sp = singularity_position_check(pair)
        checks.append(_check(f"genpair.N{N:03d}.singularity_position",
                             "jstar smooths jumps away from Y and keeps jumps crossing Y", sp["passed"], sp,
                             "far high-frequency share <= 1e-3 x near share", 1e-3))
        checks.append(_info(f"genpair.N{N:03d}.far_leakage", "norm of jstar on a bump far from Y",
                            leakage_ratio(pair, far_bump(emb))))
    return SuiteResult(checks)


# ----------------------------------------------------------- groupoids

def groupoids_suite(cfg) -> SuiteResult:
    tol = cfg["tolerances"]["axioms"]
    trials, count, seed = (cfg["sampling"][k] for k in ("trials", "count", "seed"))
    rng = np.random.default_rng(seed)
    groupoids = {
        "pair": pair_groupoid(rng.uniform(0, 1, size=(50, 2))),
        "b_k1": b_groupoid(1),
        "b_k3": b_groupoid(3),
        "cusp_n2": cusp_groupoid(2),
        "cusp_n3_k2": cusp_groupoid(3, k=2),
        "cdw_pair_dim1": cdw_of_pair(1),
        "cdw_pair_dim2": cdw_of_pair(2),
        "cdw_b_dim1": cdw_of_b(1),
        "cdw_b_dim2": cdw_of_b(2),
    }
    checks = []
    for name, G_ in groupoids.items():
        rep = check_axioms(G_, trials=trials, seed=seed, tol=tol)
        worst = max(v["max_error"] for k, v in rep.items() if k != "passed")
        checks.append(_check(f"groupoids.axioms.{name}", "groupoid axioms on random composable triples",
                             rep["passed"], worst, 0.0, tol))
    rep = check_axioms(b_groupoid(1, corrupt=True), trials=trials, seed=seed, tol=tol)
    ok = rep["associativity"]["passed"] and not rep["constraint_product"]["passed"]
    checks.append(_check("groupoids.corrupted_b_rejected", "adding lambdas breaks the b-constraint", ok,
                         {k: v["passed"] for k, v in rep.items() if k != "passed"},
                         {"associativity": True, "constraint_product": False}))

    cdw = cdw_of_pair(1)
    prod = cdw.multiply(np.array([[0.1, 0.5, 1.0, 2.0]]), np.array([[0.5, 0.9, -2.0, 3.0]]))[0]
    checks.append(_check("groupoids.cdw_pair_example", "cotangent pair groupoid composition formula",
                         np.allclose(prod, [0.1, 0.9, 1.0, 3.0], rtol=0, atol=1e-15), prod.tolist(),
                         [0.1, 0.9, 1.0, 3.0], 1e-15))
    g = np.array([[0.3, 0.7, -1.5, 2.5]])
    inv = cdw.i(g)
    unit_err = float(np.max(np.abs(cdw.m(g, inv) - cdw.u(cdw.r(g)))))
    checks.append(_check("groupoids.cdw_pair_inverse", "inverse (y, x, -eta, -xi) composes to a unit",
                         np.allclose(inv, [[0.7, 0.3, -2.5, 1.5]]) and unit_err == 0.0,
                         {"inverse": inv[0].tolist(), "unit_error": unit_err}, [0.7, 0.3, -2.5, 1.5]))

    bg = b_groupoid(1)
    a1 = np.array([[0.5, 0.25, 2.0]])
    a2 = np.array([[0.25, 0.75, 1.0 / 3.0]])
    ab = bg.multiply(a1, a2)[0]
    checks.append(_check("groupoids.b_example", "b-groupoid arrows (0.5, 0.25, 2) o (0.25, 0.75, 1/3)",
                         np.allclose(ab, [0.5, 0.75, 2.0 / 3.0]) and abs(bg.constraint(ab[None])[0, 0]) < 1e-15,
                         ab.tolist(), [0.5, 0.75, 2.0 / 3.0], 1e-15))
    lam = float(cusp_lambda(0.5, 1.0 / 3.0, 2))
    checks.append(_check("groupoids.cusp_example", "cusp constraint at x = 1/2, y = 1/3, n = 2",
                         abs(lam - 5.0) <= 1e-12, lam, 5.0, 1e-12))
    checks.append(_info("groupoids.cdw_b_printed_formulas", "boundary cotangent formulas as printed",
                        literal_cdw_b_report(trials=min(trials, 1000), seed=seed)))

    for k, c in ((1, 0.5), (1, 1e-3), (2, 0.5), (3, 0.5)):
        _, rep = bibundle_from_embedding(k=k, c=c, count=count, seed=seed, tol=tol)
        summary = {key: v["passed"] for key, v in rep.items() if isinstance(v, dict)}
        checks.append(_check(f"groupoids.bibundle.k{k}_c{c:g}", "Z = r^-1(Y) is a bibundle with Z/G = Y",
                             rep["passed"], summary, {key: True for key in summary}, tol))
    return SuiteResult(checks)


# -------------------------------------------------------------- blowup

def blowup_suite(cfg) -> SuiteResult:
    tol = cfg["tolerances"]
    seed = cfg["sampling"]["seed"]
    rng = np.random.default_rng(seed)
    checks = []
    xi = rng.normal(size=(10_000, 2)) * np.exp(rng.uniform(-3, 7, size=(10_000, 1)))
    back = decompactify(radial_compactify(xi))
    err = float(np.max(np.abs(back - xi) / np.maximum(1.0, np.abs(xi))))
    checks.append(_check("blowup.compactify_roundtrip", "radial compactification is invertible",
                         err <= 1e-12, err, 0.0, 1e-12))

    samples = rng.normal(size=(2000, 2))
    samples *= (np.exp(rng.uniform(0, np.log(1e3), size=2000)) / np.linalg.norm(samples, axis=1))[:, None]
    for m in (-2, -1, 0, 1, 2):
        wb = check_weight_equivalence(m, samples)
        lo, hi = min(1.0, 2.0 ** m), max(1.0, 2.0 ** m)
        ok = wb.passed and lo - 1e-12 <= wb.c1 and wb.c2 <= hi + 1e-12
        checks.append(_check(f"blowup.weight_equivalence.m{m:+d}", "rho^m is equivalent to (1+|xi|)^m",
                             ok, [wb.c1, wb.c2], [lo, hi], 1e-12))

    bconst = tol["b_constant"]
    for m in (-2, -1, 0, 1, 2):
        sym = make_classical_symbol(Psi, m)
        near = b_derivative_check(sym, dim=2, r_max=10.0, constant=bconst, seed=seed)
        far = b_derivative_check(sym, dim=2, r_max=1e3, constant=bconst, seed=seed)
        grow = max(far.sups.values()) / max(max(near.sups.values()), 1e-300)
        stable = max(far.sups.values()) <= 1.1 * max(max(near.sups.values()), 1e-12)
        checks.append(_check(f"blowup.b_derivatives.m{m:+d}", "b-derivatives of canonical symbols are bounded",
                             far.passed and stable, {"sup": max(far.sups.values()), "growth_10_to_1e3": grow},
                             f"<= {bconst}", bconst))
    osc = Symbol(Psi, 0, lambda base, xi: np.sin(np.linalg.norm(xi, axis=-1)), x_independent=True)
    rep = b_derivative_check(osc, dim=2, constant=bconst, seed=seed)
    checks.append(_check("blowup.b_derivatives.oscillating_rejected", "sin|xi| is not classical of order 0",
                         not rep.passed, max(rep.sups.values()), f"> {bconst}", bconst))

    worst, worst_literal = 0.0, float("inf")
    for k, l in itertools.product((-2, -1, 0, 1), repeat=2):
        fit = blowup_weight_fit(B, (k, l), seed=seed, tol=tol["blowup"])["fits"]["(xi', eta'')"]
        worst = max(worst, fit["best_residual"])
        if l != 0:
            worst_literal = min(worst_literal, fit["literal_residual"])
    checks.append(_check("blowup.fit_b", "b weights are rho^(l-k) rho_ff^(-l) for some front-face function",
                         worst <= tol["blowup"], worst, 0.0, tol["blowup"]))
    fit = blowup_weight_fit(B, (1, -2), seed=seed, tol=tol["blowup"])["fits"]["(xi', eta'')"]
    checks.append(_info("blowup.fit_b_example", "best candidate and printed candidate for (k, l) = (1, -2)",
                        {"best": fit["best"], "best_residual": fit["best_residual"],
                         "printed": LITERAL_CANDIDATE, "printed_residual": fit["literal_residual"]}))
    checks.append(_check("blowup.printed_candidate_rejected", "printed front-face function misses the pattern",
                         worst_literal > 0.5, worst_literal, "> 0.5", 0.5))
    gw = 0.0
    for order in ((-0.75, 1.0, -1.25), (-1.0, 0.0, -1.0), (0.0, 1.0, 0.0)):
        fits = blowup_weight_fit(G, order, seed=seed, tol=tol["blowup"])["fits"]
        gw = max(gw, *(f["best_residual"] for f in fits.values()))
    checks.append(_check("blowup.fit_g", "g weights per normal fiber pair", gw <= tol["blowup"], gw, 0.0,
                         tol["blowup"]))
    return SuiteResult(checks)


SUITES = {
    "relations": relations_suite,
    "symbols": symbols_suite,
    "quantize": quantize_suite,
    "compose": compose_suite,
    "norms": norms_suite,
    "genpair": genpair_suite,
    "groupoids": groupoids_suite,
    "blowup": blowup_suite,
}
