"""
Multilevel residual correction against single-level QI on Franke's
function, clean and with additive Gaussian noise. Uses the shipped
configs/table_multilevel.json (about half a minute on one core).
"""
from pathlib import Path

from sphqi.experiments import load_config, run_multilevel_compare

cfg = load_config(Path(__file__).parents[1] / "configs" / "table_multilevel.json")
rows = run_multilevel_compare(cfg)

for sigma in sorted({r.sigma for r in rows}):
    print(f"sigma = {sigma}")
    print("  level      N    rho_SL   L2_SL      rho_ML   L2_ML")
    single = [r for r in rows if r.sigma == sigma and r.scheme == "single"]
    multi = [r for r in rows if r.sigma == sigma and r.scheme == "multilevel"]
    for s, m in zip(single, multi):
        print(f"  {s.level:5d} {s.n:6d}   {s.rho:.4f}  {s.l2:.3e}   {m.rho:.4f}  {m.l2:.3e}")
