"""
Closed circles in configuration space
=====================================

A Gaussian packet released at (x, v) = (1.5, 0) under a harmonic force
f(x) = -x orbits the origin of the (x, v) plane and returns to its start
after one period 2*pi.  The packet center follows the classical RK4
trajectory to solver accuracy the whole way around.
"""

import numpy as np

from confqm import (
    ClassicalState,
    EvolveSpec,
    ForceField,
    classical_trajectory,
    evolve_config_space,
    gaussian_packet,
    make_grid,
)

grid = make_grid(-6.0, 6.0, 128, -6.0, 6.0, 128)
force = ForceField.harmonic(omega=1.0)
period = 2.0 * np.pi

# 3140 steps per period, recording 20 waypoints along the circle
spec = EvolveSpec(dt=period / 3140, n_steps=3140, record_every=157)
wf0 = gaussian_packet(grid, x0=1.5, v0=0.0, sigma_x=0.5, sigma_v=0.5)
final, series = evolve_config_space(wf0, force, spec)

# the matching classical orbit, integrated at the solver step and
# subsampled to the record times (RK4 at this dt is effectively exact)
ref = classical_trajectory(ClassicalState(1.5, 0.0), force, spec.dt, spec.n_steps)
ref_x, ref_v = ref.xs[::spec.record_every], ref.vs[::spec.record_every]

print("harmonic orbit of a packet started at (1.5, 0), one period")
print(f"{'t':>8} {'<x>':>12} {'<v>':>12} {'x_rk4':>12} {'v_rk4':>12}")
for k in range(0, 21, 5):
    r = series.records[k]
    print(f"{r.t:8.3f} {r.mean_x:12.6f} {r.mean_v:12.6f} {ref_x[k]:12.6f} {ref_v[k]:12.6f}")

dev_x = max(abs(r.mean_x - x) for r, x in zip(series.records, ref_x))
dev_v = max(abs(r.mean_v - v) for r, v in zip(series.records, ref_v))
last = series.records[-1]
print()
print(f"max |<x> - x_rk4| over the period: {dev_x:.3e}")
print(f"max |<v> - v_rk4| over the period: {dev_v:.3e}")
print(f"return gap after 2*pi: ({abs(last.mean_x - 1.5):.3e}, {abs(last.mean_v):.3e})")
print(f"norm drift: {max(abs(r.norm - 1.0) for r in series.records):.3e}")
