"""Second-order convergence of the split transport step.

The Strang composition (half x-shear, full v-kick, half x-shear) carries
a local error of order dt^3, hence a global error of order dt^2.  Against
the characteristics oracle -- backward RK4 flow plus Fourier resampling
of the initial state, with no splitting error at all -- halving dt must
cut the L2 gap by a factor of four.  The harmonic force is the
interesting case: it is the simplest force the splitting does not solve
exactly.
"""

import numpy as np

from confqm import (
    EvolveSpec,
    ForceField,
    WaveFunction2D,
    evolve_characteristics,
    evolve_config_space,
    gaussian_packet,
    make_grid,
    norm,
)

grid = make_grid(-8.0, 8.0, 256, -8.0, 8.0, 256)
force = ForceField.harmonic(omega=1.0)
wf0 = gaussian_packet(grid, x0=1.0, v0=0.5, sigma_x=0.5, sigma_v=0.5)
t_final = 1.0

print("computing the characteristics reference at t = 1 ...")
ref = evolve_characteristics(wf0, force, t_final)

print(f"{'dt':>10} {'steps':>7} {'L2 error':>12} {'ratio':>8}")
prev = None
for n_steps in (125, 250, 500, 1000):
    dt = t_final / n_steps
    final, _ = evolve_config_space(
        wf0, force, EvolveSpec(dt=dt, n_steps=n_steps, record_every=n_steps)
    )
    err = norm(WaveFunction2D(grid, final.amps - ref.amps, final.constants))
    ratio = "" if prev is None else f"{prev / err:8.3f}"
    print(f"{dt:10.2e} {n_steps:7d} {err:12.3e} {ratio:>8}")
    prev = err

print()
print("each halving of dt divides the error by ~4: global order dt^2")
print("(the oracle itself carries no dt: its only parameters are the grid")
print(" and the RK4 substep cap, and the packet must stay clear of the")
print(" periodic seam for the pullback to sample true amplitudes)")
