"""Quantize symbols, multiply the operators, and read the product symbol back.

The product of a coboundary operator (class C) with a boundary operator
(class B) is a singular Green operator.  Its symbol, extracted from the
matrix product, is compared with the leading twisted product, and the
decay exponents along each fiber group are compared with the order rule.
"""
import numpy as np

from relcalc import TorusEmbedding
from relcalc.calculus import compare_twisted, measure_slopes, predicted_slopes
from relcalc.quantizer import extract_symbol, quantize, restriction_matrix
from relcalc.suites import random_classical
from relcalc.symbols import B, C, make_classical_symbol

emb = TorusEmbedding(2, 1, 32)

# b = 1 quantizes to plain sampling on the slice
R = quantize(make_classical_symbol(B, (0, 0)), emb).YM
print("b = 1 gives the restriction matrix:", np.array_equal(R, restriction_matrix(emb)))

# round trip for a smooth x-dependent symbol
sym = make_classical_symbol(C, (-2, 1), base_profile=lambda x: 1 + 0.3 * np.cos(x[..., 0]))
back = extract_symbol(quantize(sym, emb).MY, C, emb)
print(f"largest symbol value recovered: {np.abs(back).max():.6f}")

rng = np.random.default_rng(3)
c, b = random_classical(C, rng), random_classical(B, rng)
res = compare_twisted(c, b, emb)
print(f"\n{c.order} after {b.order} -> {res['order']}")
print(f"relative sup error against the twisted product: {res['rel_sup_error']:.4f}")
print("measured decay exponents :", np.round(measure_slopes(res["extracted"], res["class"], emb), 3))
print("predicted decay exponents:", np.round(predicted_slopes(res["order"]), 3))
