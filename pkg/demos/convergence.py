"""
Convergence of the natural power method
=======================================

The test matrix has eigenvalues 1, -1 and alpha. Its two dominant
eigenvalues tie in modulus, so a rank-2 frame converges to their plane while a
rank-1 frame cannot pick one of them.
"""

import numpy as np

from natpower import a_alpha, npm_step, subspace_distance, projected_matrix
from natpower.experiments import initial_frame, plane_projector
from natpower.npm import fit_rate

# Distance of the rank-2 frame to the dominant plane, for the four alphas.
# The decay ratio per step equals alpha; alpha = 0 lands in one step.
for alpha in (0.0, 0.2, 0.5, 0.9):
    A, P = a_alpha(alpha), plane_projector(alpha)
    U = initial_frame(alpha)
    d = []
    for _ in range(60):
        U = npm_step(A, U)
        d.append(subspace_distance(U, P))
    try:
        rate = f"{fit_rate(d):.4f}"
    except ValueError:
        rate = "n/a"
    print(f"alpha={alpha:<4} d[1]={d[0]:.2e} d[20]={d[19]:.2e} d[60]={d[59]:.2e} fitted ratio {rate}")

# %%
# A rank-1 frame lies in the plane in the limit, but its scalar compression
# depends on the start. From the standard start it goes to 0; shrinking the
# weight on the first eigenvector makes it hover around -1 without settling.
A = a_alpha(0.5)
for w in (1.0, 0.1):
    U = initial_frame(0.5, r=1, weight1=w)
    vals = []
    for _ in range(300):
        U = npm_step(A, U)
        vals.append(projected_matrix(A, U)[0, 0])
    tail = np.array(vals[-50:])
    print(f"weight {w}: last value {vals[-1]: .4f}, tail range {np.ptp(tail):.3f}")
