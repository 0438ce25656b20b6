"""
Cyclic vectors and closure
==========================

Starting from a single seed vector, powers of T give a Hessenberg form on
the closure, and alternating T with T* gives a staircase whose bandwidth
stays within a factor of two.  When the seed vector is not cyclic the
closure is a proper invariant block and the rest is padded with fresh
seeds.
"""

import numpy as np

from blocktrid import (
    joint_cyclic_staircase,
    krylov_hessenberg,
    pattern_text,
    reducing_closure,
)

rng = np.random.default_rng(5)
T = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
v = rng.standard_normal(7) + 1j * rng.standard_normal(7)

form = krylov_hessenberg(T, v)
closure = form.extras["closure_dim"] or form.dim
print(f"Hessenberg from a generic seed: closure {closure} of dim {form.dim}")
print(pattern_text(form.matrix, form.pattern))
print()

form = joint_cyclic_staircase(T, v)
print(f"joint staircase: {len(form.report.pattern_violations)} violations")
print(pattern_text(form.matrix, form.pattern))
print()

# an eigenvector seed stops the one-sided walk immediately, but closing
# under both T and T* can still grow past it
S = np.zeros((4, 4), dtype=complex)
S[:2, :2] = [[2.0, 1.0], [0.0, 2.0]]
S[2:, 2:] = [[5.0, 0.0], [0.0, 7.0]]
e1 = np.zeros(4, dtype=complex)
e1[0] = 1.0
form = krylov_hessenberg(S, e1)
print(f"eigenvector seed: one-sided closure {form.extras['closure_dim']} "
      f"of dim 4, the rest padded with fresh seeds")
basis = reducing_closure(S, e1)
print(f"two-sided closure spans {basis.shape[1]} directions; "
      f"S maps them into themselves: "
      f"{np.linalg.norm(S @ basis - basis @ (basis.conj().T @ S @ basis)):.1e}")
