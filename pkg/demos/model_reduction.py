"""
Two-sided model reduction
=========================

Right and left dominant frames of a system matrix give two reduced
realizations. They are similar to each other, so their transfer functions
agree, and the finite-horizon Gramians compress exactly.
"""

import numpy as np

from natpower import LtiSystem, a_alpha, dual_subspaces, reduced_models
from natpower.ltv import B_PLANT, C_PLANT
from natpower.mor import gramian_projection_residual, unit_circle_points

sys = LtiSystem(a_alpha(0.5), B_PLANT, C_PLANT)
duals = dual_subspaces(sys.A, 2, seed=0)
print("sigma_min(V^T U) =", duals.cross_gram_sigma_min)

u_side, v_side = reduced_models(sys, duals)
print("U-side Ar eigenvalues:", np.round(np.linalg.eigvals(u_side.Ar), 10))
print("V-side Ar eigenvalues:", np.round(np.linalg.eigvals(v_side.Ar), 10))

# %%
# Transfer functions on the circle |z| = 2.
gap = max(abs(u_side.transfer(z) - v_side.transfer(z)).max() for z in unit_circle_points())
print(f"largest transfer-function mismatch: {gap:.2e}")

obs, reach = gramian_projection_residual(sys, duals.Ur, duals.Vr)
print(f"Gramian residuals: observability {obs:.2e}, reachability {reach:.2e}")
