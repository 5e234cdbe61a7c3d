"""Which operator classes compose into which, at the level of relations and of orders.

Samples the five canonical relations on a 16-point torus grid, composes
every chaining pair as point clouds, and prints the resulting table next
to the order rule used by the symbol calculus.
"""
import warnings

from relcalc import TorusEmbedding
from relcalc.relations import CLASS_ORDER, derived_table, table_discrepancies
from relcalc.symbols import MultiOrder, order_compose, table_discrepancies as order_discrepancies

emb = TorusEmbedding(2, 1, 16)
table = derived_table(emb, count=1000, seed=0)

print("composition of relations (row after column)")
print("         " + "".join(f"{str(c):>9}" for c in CLASS_ORDER))
for a in CLASS_ORDER:
    cells = [str(table[(a, b)]) if table[(a, b)] is not None else "-" for b in CLASS_ORDER]
    print(f"{str(a):>9}" + "".join(f"{c:>9}" for c in cells))

print("\nwhere the printed reference table disagrees:")
for d in table_discrepancies(table):
    print("  ", d)

# order bookkeeping for the two products that build the boundary calculus
cb = order_compose(MultiOrder("C", (-2, 1)), MultiOrder("B", (1, -2)), kappa=emb.nu)
bc = order_compose(MultiOrder("B", (1, -2)), MultiOrder("C", (-2, 1)), kappa=emb.nu)
print(f"\nC(-2, 1) after B(1, -2) has order {cb}")
print(f"B(1, -2) after C(-2, 1) has order {bc}")

print("\norder rules that differ from the printed table:")
for d in order_discrepancies(emb.nu):
    print("  ", d)
