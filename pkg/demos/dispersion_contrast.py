"""Why free packets do not disperse here.

In single-pair wave mechanics a free Gaussian spreads because momentum
uncertainty feeds position spread through hbar:

    std_x(t)^2 = std_x(0)^2 + (hbar t / (2 m std_x(0)))^2

In the position-velocity picture the free evolution is a pure shear
x -> x + v t, so the position width grows only through the velocity
width the state already has:

    std_x(t)^2 = std_x(0)^2 + (std_v(0) t)^2

and a state with tiny std_v barely spreads regardless of hbar.  The
bundled comparison scenario runs both pictures on matched initial data.
"""

from confqm import load_config, run_dispersion_comparison

config = load_config("dispersion-comparison")
series_cfg, series_bqm, report = run_dispersion_comparison(config)

pkt = config.packets[0]
print(f"matched free packets: sigma_x = {pkt.sigma_x}, sigma_v = {pkt.sigma_v} "
      f"({report['sigma_v_cells']:.2f} grid cells)")
print()
print(f"{'t':>6} {'std_x (shear)':>15} {'std_x (hbar)':>15}")
for rc, rb in zip(series_cfg.records, series_bqm.records):
    print(f"{rc.t:6.2f} {rc.std_x:15.8f} {rb.std_x:15.8f}")

print()
print(f"final widths: transport {report['std_x_config_final']:.6f} vs "
      f"wave mechanics {report['std_x_bqm_final']:.6f}")
print(f"shear law residual:     {report['max_shear_law_dev']:.3e} "
      f"(ok at 1e-4: {report['shear_law_ok']})")
print(f"spreading law residual: {report['max_spreading_law_dev']:.3e} "
      f"(ok at 1e-4: {report['spreading_law_ok']})")
