"""
Noisy Franke data: QMC quasi-interpolation keeps improving with N while
filtered hyperinterpolation levels off once the noise dominates.
"""
from sphqi.experiments import ExperimentConfig, RhoRule, run_noise_compare

cfg = ExperimentConfig(experiment="noise-compare", kernel="wendland", target="franke",
                       n_grid=(1024, 2048, 4096, 8192, 16384), noise_levels=(0.1,),
                       rho_rule=RhoRule(exponent=-0.25))
res = run_noise_compare(cfg)

for method, rows in res.items():
    print(f"{method:6s}", "  ".join(f"N={r.n}: {r.l2:.3e}" for r in rows))
