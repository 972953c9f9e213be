"""How the four guiding functions score the same mistakes.

Run with ``python3 demos/01_losses.py``.
"""
import numpy as np

from curricula.bitdata import bitmatrix_from_rows
from curricula.loss import Curriculum, error_summary, get_loss

# Three targets, four examples. Column 0 is the easy target.
y = bitmatrix_from_rows([[0, 1, 1],
                         [1, 0, 1],
                         [1, 1, 0],
                         [0, 0, 0]])

# Network A gets the hard target wrong twice; network B gets the easy one wrong twice.
pred_a = bitmatrix_from_rows([[0, 1, 0],
                              [1, 0, 0],
                              [1, 1, 0],
                              [0, 0, 0]])
pred_b = bitmatrix_from_rows([[1, 1, 1],
                              [0, 0, 1],
                              [1, 1, 0],
                              [0, 0, 0]])

print("loss     A      B")
for name in ("l1", "lw", "llh", "lgh"):
    f = get_loss(name)
    a = f(error_summary(y, pred_a))
    b = f(error_summary(y, pred_b))
    print(f"{name:5s} {a:.3f}  {b:.3f}")

# L1 cannot tell them apart. The hierarchical losses all prefer A, and lgh
# most strongly: once target 0 has any error, every later target counts as wrong.

# Reversing the curriculum flips the preference.
rev = Curriculum([2, 1, 0])
print("\nwith the order reversed:")
for name in ("l1", "lgh"):
    f = get_loss(name)
    print(f"{name:5s} {f(error_summary(y, pred_a, rev)):.3f}  {f(error_summary(y, pred_b, rev)):.3f}")

# Per-target mean errors are the ingredients of lgh.
es = error_summary(y, pred_b)
print("\nper-target error of B:", es.per_target_error)
print("error matrix of B:\n", np.array(es.error_matrix.to_rows()))
