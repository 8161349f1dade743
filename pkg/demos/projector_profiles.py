"""
Pointer profiles after a projector measurement
==============================================

A qubit prepared in ``|+>`` is measured with the projector onto ``|0>``.
With pre-selection alone the pointer ends up in a mixture of an unshifted
and a shifted packet: the profile is a weighted pair of humps with no
interference between them. Adding a post-selection changes that, because
the post-selected pointer is a coherent superposition of both packets.
"""

import numpy as np

from pointerlab import (POSITION, MOMENTUM, PointerGrid, SystemState, evolve_joint,
                        gaussian_pointer, make_projector, pps_context, pps_mean, pps_profile,
                        ps_mean, ps_profile, translate)

grid = PointerGrid.centered(1.0)
phi = gaussian_pointer(grid, 0.0, 1.0)
a = make_projector([[1, 0]])
psi = SystemState.from_vector([1, 1])

# %%
# Pre-selected system, strong coupling
# ------------------------------------
# At gamma = 6 sigma the two humps are fully resolved. Each carries weight
# one half, and the profile equals the weighted sum exactly.

gamma = 6.0
profile = ps_profile(psi, phi, a, gamma)
humps = 0.5 * phi.density + 0.5 * translate(phi, gamma).density
print(f"max |profile - weighted humps| = {np.max(np.abs(profile - humps)):.2e}")
print(f"weight left of q = 3: {np.sum(profile[grid.q < 3]) * grid.dq:.4f}")
print(f"<q> = {ps_mean(POSITION, psi, phi, a, gamma):.6f}  (gamma <A> = {gamma * 0.5})")
print(f"<p> = {ps_mean(MOMENTUM, psi, phi, a, gamma):.2e}  (unchanged by the measurement)")

# The brute-force evolution gives the same marginal.
oracle = evolve_joint(psi, phi, a, gamma).marginal()
print(f"max |closed form - oracle| = {np.max(np.abs(profile - oracle)):.2e}")

# %%
# Post-selection brings in interference
# -------------------------------------
# Post-selecting on ``(|0> + i|1>)/sqrt2`` gives the weak value (1+i)/2.
# For a real pointer the cross term happens to vanish pointwise, since
# A_w (1 - A_w*) = i/2 is purely imaginary. A chirped pointer has a complex
# overlap between the packets and shows the interference clearly.

post = SystemState.from_vector([1, 1j])
ctx = pps_context(psi, post, a)
print(f"\nA_w = {complex(ctx.a_w):.3f},  chi = {ctx.chi:.4f} rad")

for label, pointer in (("real Gaussian", phi),
                       ("chirped Gaussian", gaussian_pointer(grid, 0.0, 1.0, chirp=0.4))):
    g = 1.0
    prof = pps_profile(ctx, a, pointer, g)
    plain = 0.5 * pointer.density + 0.5 * translate(pointer, g).density
    print(f"{label:17s}: max interference contribution {np.max(np.abs(prof - plain)):.3e}, "
          f"<q> = {pps_mean(POSITION, ctx, a, pointer, g):+.5f}, "
          f"<p> = {pps_mean(MOMENTUM, ctx, a, pointer, g):+.5f}")

# %%
# Reading the coupling strength
# -----------------------------
# Post-selecting on ``|0>`` makes the weak value exactly 1, and the mean
# pointer position then reads off gamma directly at any coupling.

ctx_one = pps_context(psi, SystemState.from_vector([1, 0]), a)
for g in (0.1, 0.5, 2.0):
    print(f"gamma = {g:3.1f}: <q> = {pps_mean(POSITION, ctx_one, a, phi, g):.12f}")
