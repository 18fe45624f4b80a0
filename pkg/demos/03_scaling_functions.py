"""Scaling filters and cascade evaluation.

The two filters behind the regression sieves: the indicator (haar) filter
and the length-4 filter with a vanishing linear moment (d4).  The cascade
tabulates the scaling function exactly on a dyadic grid from the
refinement-matrix eigenproblem.
"""

import numpy as np

import wavesieve as ws
from wavesieve.wavelets import (mother_tensor_coeffs,
                                partition_of_unity_residual,
                                refinement_residual, shifted_inner)

for name in ("haar", "d4"):
    f = ws.filter_by_name(name)
    print(f"{name}: h = {np.round(f.h, 6)}")
    print(f"      g = {np.round(f.g, 6)}")
    print(f"      sum h - sqrt(2) = {f.h.sum() - np.sqrt(2.0):.2e}, "
          f"shift-2 inner product = {shifted_inner(f.h, f.h, 1):.2e}")

d4 = ws.d4_filter()
table = ws.cascade(d4, resolution=10)
step = 1 << 10
print("\nd4 cascade at the integers:",
      [round(float(table.values[k * step]), 10) for k in range(4)])
print("expected interior values: ((1+sqrt3)/2, (1-sqrt3)/2) =",
      (round((1 + np.sqrt(3)) / 2, 10), round((1 - np.sqrt(3)) / 2, 10)))
print("partition of unity residual:", partition_of_unity_residual(table))
print("two-scale refinement residual:", refinement_residual(table))

ws.phi_table_to_csv(table, "d4_phi.csv")
print("d4 scaling function written to d4_phi.csv (plot x vs phi)")

# tensor coefficients for two-dimensional design functions
coeffs = mother_tensor_coeffs(d4, 2)
print("\ntensor coefficient families:", sorted(coeffs))
print("sum of the scaling family (equals the dilation determinant 4):",
      round(float(coeffs[(0, 0)].sum()), 12))

# design functions at a level: scaled, translated tensor products
sieve = ws.sieve_for_box(d4, d=2, j=2)
print(f"\nlevel-2 sieve on the unit square: {sieve.size} translations "
      f"(covering family would hold {4 ** 2})")
x = (0.4, 0.6)
vals = [ws.phi_eval(sieve, table, g, x) for g in sieve.K]
print("design functions active at", x, ":", int(np.sum(np.abs(vals) > 1e-12)))
