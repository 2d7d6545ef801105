"""
Central-difference stencils for the second derivative
=====================================================

Weights for a p-point stencil come out of an exact rational solve, so the
integer formulas can be printed without any rounding.
"""

import numpy as np

from powerseries_nlse.stencil import second_derivative, stencil_weights

# The integer form: (denominator, centre weight, [C_1, ..., C_h])
for p in (3, 5, 7, 9):
    t = stencil_weights(p)
    print(f"p={p:2d}  f'' ~ ({t.integer_center} f_0 + sum C_j (f_j + f_-j)) / ({t.denominator} dx^2)"
          f"   C = {t.integer_weights}")

# Apply them to sin(x) and watch the error fall as dx**(p-1)
print("\nmax |D2 sin - (-sin)| on [0, 2 pi]")
print("   n      p=3        p=5        p=9")
for n in (41, 81, 161):
    x = np.linspace(0, 2 * np.pi, n)
    dx = x[1] - x[0]
    row = []
    for p in (3, 5, 9):
        t = stencil_weights(p)
        h = t.half_width
        row.append(np.abs(second_derivative(np.sin(x), t, dx) + np.sin(x[h:-h])).max())
    print(f"{n:4d}  " + "  ".join(f"{e:.2e}" for e in row))
