"""Uniform L^2 bounds for the operator matrix, and an exact restriction/extension pair.

With admissible orders the norm of the full 2x2 operator matrix settles as
the grid is refined; pushing m_g past -nu/2 makes it grow.  The second
half builds the pair (j^*, j_*) and checks j^* j_* = I and j_* = (j^*)^*.
"""
from relcalc import TorusEmbedding
from relcalc.calculus import verify_l2_bound
from relcalc.generating_pair import build_generating_pair, singularity_position_check

Ns = [16, 32, 64]
ok = verify_l2_bound((-0.75, 1, 1, 1), Ns)
bad = verify_l2_bound((-0.25, 1, 1, 1), Ns, force=True)
print("N        admissible   m_g = -0.25")
for N, a, b in zip(Ns, ok.norms, bad.norms):
    print(f"{N:<8} {a:10.4f}   {b:10.4f}")
print(f"max/min ratio {ok.ratio:.4f} vs {bad.ratio:.4f} (violated: {', '.join(bad.violations)})")

for N in (16, 32):
    pair = build_generating_pair(TorusEmbedding(2, 1, N))
    sing = singularity_position_check(pair)
    print(f"\nN = {N}: |j* j_* - I| = {pair.identity_residual():.2e}, "
          f"|j_* - (j*)^*| = {pair.adjoint_residual():.2e}")
    print(f"  high-frequency share of j* f: far jump {sing['far_high_share']:.1e}, "
          f"jump across Y {sing['near_high_share']:.1e}")
