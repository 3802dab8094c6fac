"""Free fall tells the two momentum notions apart.

Under a uniform force the canonical momentum -i*hbar*d/dx generates
position translations, and nothing in the transport equation couples to
it: <p> is frozen.  The kinematic momentum m<v>, by contrast, ramps at
the classical rate g per unit mass.  In single-pair wave mechanics the
two are the same object; here they disagree in the plainest possible
scenario.
"""

from confqm import EvolveSpec, ForceField, evolve_config_space, gaussian_packet, make_grid

g = 4.0
force = ForceField.uniform(g=g)
grid = make_grid(-6.0, 6.0, 128, -6.0, 6.0, 128)
wf0 = gaussian_packet(grid, x0=-1.0, v0=0.0, sigma_x=0.5, sigma_v=0.5, p0=0.5)

spec = EvolveSpec(dt=2e-3, n_steps=300, record_every=30)
_, series = evolve_config_space(wf0, force, spec)

print(f"uniform force g = {g}, packet dropped from rest with carrier p0 = 0.5")
print(f"{'t':>6} {'<p>':>12} {'<v>':>12} {'g*t':>12}")
for r in series.records:
    print(f"{r.t:6.2f} {r.mean_p:12.8f} {r.mean_v:12.8f} {g * r.t:12.8f}")

recs = series.records
p_drift = max(abs(r.mean_p - recs[0].mean_p) for r in recs)
v_dev = max(abs(r.mean_v - g * r.t) for r in recs)
print()
print(f"<p> drift over the run:        {p_drift:.3e}  (translation symmetry is exact)")
print(f"max |<v> - g t|:               {v_dev:.3e}  (Newton holds for the center)")
