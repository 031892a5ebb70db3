"""
QMC quasi-interpolation of a single spherical harmonic on spiral points:
error versus N for kernels of order 2, 4 and 6, with fitted log-log slopes.
"""
from sphqi.experiments import ExperimentConfig, RhoRule, run_convergence

grid = (1024, 2048, 4096, 8192, 16384)

for kernel in ("gaussian", "wendland"):
    for m in (2, 4, 6):
        cfg = ExperimentConfig(kernel=kernel, order=m, n_grid=grid, target=("harmonic", 6, 4),
                               rho_rule=RhoRule(exponent=-0.25))
        res = run_convergence(cfg)
        errs = "  ".join(f"{r.l2:.2e}" for r in res.reports)
        print(f"{kernel:9s} m={m}  L2: {errs}   slope {res.slope_l2:+.3f}")
