"""
Coupled equations: dark-bright pair
===================================

Component 1 is dark, component 2 bright.  The nonlinearity couples them
through (g_k1 |psi1|^2 + g_k2 |psi2|^2) psi_k; edges follow the exact pair.
"""

from powerseries_nlse.analytic import DarkBright
from powerseries_nlse.engine import Grid, SolverConfig, evolve_coupled, initial_state
from powerseries_nlse.metrics import error_report

g = dict(g10=0.5, g11=-1.0, g12=0.5, g20=0.5, g21=-0.5, g22=1.0)
grid = Grid(100.0, 1000)
spec = DarkBright(A0=1.0, **g)

print("t = 2    dark        bright")
for p in (3, 9, 23):
    cfg = SolverConfig(grid=grid, s=4, p=p, dt=5e-4, n_t=4000, boundary_spec=spec, **g)
    out = evolve_coupled(initial_state(spec, grid), cfg)
    e = [error_report(f, spec, grid, component=k).error_max for k, f in enumerate(out)]
    print(f"p={p:2d}  {e[0]:.2e}   {e[1]:.2e}")
