"""
Beyond projectors: the brute-force evolution
============================================

The closed forms rely on A^2 = A. For any other Hermitian operator the
coupling splits the pointer into one copy per eigenvalue, and the exact
results come from the spectral evolution. This script checks that the two
routes agree on projectors, then uses the oracle for a Pauli operator.
"""

import warnings

import numpy as np

from pointerlab import (MOMENTUM, POSITION, PointerGrid, SystemOperator, SystemState,
                        evolve_joint, gaussian_pointer, interaction_apply, observable_mean,
                        oracle_ps_moments, weak_ps_mean, WeakRegimeWarning)
from pointerlab.verify import random_instances

# %%
# Closed form and oracle on random projectors
# -------------------------------------------

worst = 0.0
for ins in random_instances(50, seed=3):
    a = interaction_apply(ins.psi, ins.phi, ins.projector, ins.gamma).amplitudes
    b = evolve_joint(ins.psi, ins.phi, ins.projector, ins.gamma).amplitudes
    worst = max(worst, np.max(np.abs(a - b)))
print(f"50 random projector instances: max elementwise difference {worst:.2e}")

# %%
# A Pauli-x measurement
# ---------------------
# sigma_x has eigenvalues +1 and -1, so a strong coupling leaves two
# pointer copies at +gamma and -gamma. Starting from ``|0>`` they carry
# equal weight and the mean stays at zero; momentum is conserved as for
# projectors. The first-order mean is shown alongside; beyond gamma = 0.1
# sigma the library would warn that the coupling is not weak.

warnings.simplefilter("ignore", WeakRegimeWarning)

grid = PointerGrid.centered(1.0)
phi = gaussian_pointer(grid, 0.0, 1.0)
sx = SystemOperator([[0, 1], [1, 0]])
psi = SystemState.from_vector([1, 0])
for g in (0.01, 1.0, 4.0):
    joint = evolve_joint(psi, phi, sx, g)
    rep = oracle_ps_moments(joint, POSITION)
    print(f"gamma = {g:5.2f}: <q> = {rep.mean_q:+.2e}, var q = {rep.var_q:8.4f}, "
          f"<p> drift = {rep.mean_p - observable_mean(phi, MOMENTUM):+.1e}, "
          f"weak <q> = {weak_ps_mean(POSITION, psi, sx, phi, g):+.1e}")
