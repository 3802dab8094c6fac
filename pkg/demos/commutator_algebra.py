"""Operator algebra on the position-velocity grid.

Two independent canonical pairs act on the same state: (x, p) and (v, a),
each closing to i*hbar, while x and v commute exactly (both are diagonal).
The integrated versions of the same statements are the Weyl exchange
relations between translations and phase multiplications.
"""

import numpy as np

from confqm import (
    ObservableTag,
    gaussian_packet,
    commutator_residual,
    make_grid,
    weyl_residual,
)

grid = make_grid(-8.0, 8.0, 128, -8.0, 8.0, 128)
wf = gaussian_packet(grid, x0=0.5, v0=-1.0, sigma_x=0.45, sigma_v=0.5, p0=1.2)
scale = float(np.max(np.abs(wf.amps)))

print("commutators applied to an interior Gaussian (residual / max|psi|):")
pairs = [
    (ObservableTag.POSITION, ObservableTag.MOMENTUM),
    (ObservableTag.VELOCITY, ObservableTag.ACCELERATUM),
    (ObservableTag.POSITION, ObservableTag.VELOCITY),
    (ObservableTag.MOMENTUM, ObservableTag.ACCELERATUM),
]
for tag_a, tag_b in pairs:
    field, expected = commutator_residual(tag_a, tag_b, wf)
    resid = float(np.max(np.abs(field.amps - expected * wf.amps))) / scale
    label = f"[{tag_a.value}, {tag_b.value}]"
    print(f"  {label:30s} = {expected + 0!s:8s} residual {resid:.3e}")

# the (x, v) residual field is not merely small -- it is identically zero,
# because both operators multiply pointwise
field, _ = commutator_residual(ObservableTag.POSITION, ObservableTag.VELOCITY, wf)
print(f"  [position, velocity] field max: {float(np.max(np.abs(field.amps)))}")

print()
print("Weyl exchange relations (residual / max|psi|):")
print(f"  T(0.3) M(0.7)  vs phase * M T:  {weyl_residual('xp', wf, 0.3, 0.7) / scale:.3e}")
print(f"  B(0.25) N(0.6) vs phase * N B:  {weyl_residual('va', wf, 0.25, 0.6) / scale:.3e}")
