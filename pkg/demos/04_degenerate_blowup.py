"""Degenerate diffusion u_t = (x^2 u_x)_x + u^2 on (0, 1) from u0 = 5 (1 - x).

The data criteria say blow-up, two closed-form estimates bound the blow-up
time, and the finite-volume solver shows when the sup norm actually runs off.
"""

from meanvalue import Domain1D, InitialData, ProblemSpec, SolveConfig, solve
from meanvalue.analysis import energy_monitor, evaluate_wang_criteria, predict_blowup
from meanvalue.foundation import l2_norm, sample_initial_data, unit_grid

d, p = 2.0, 2.0
u0 = InitialData.preset("amp_ramp", 5.0)
print(evaluate_wang_criteria(sample_initial_data(u0, unit_grid(400), "mixed"), d, p).to_text())

spec = ProblemSpec(Domain1D(0.0, 1.0), 1.0, None, u0, "weighted_mixed", (d, p))
traj = solve(spec, SolveConfig(t_end=1.0, n=400))
for pred in predict_blowup(l2_norm(traj.frames[0][1]), degenerate=(d, p)):
    print(f"{pred.method:>16}: t' = {pred.t_prime:.4f}")
print(f"{'solver':>16}: {traj.outcome} at t = {traj.t_stop:.4f} (sup = {traj.blowup.sup_norm:.2e})")

energy = energy_monitor(traj, degenerate=(d, p))
print(f"\nE(0) = {energy.E_deg[0]:.5f} (exact -25/12 = {-25 / 12:.5f}); upward jumps: {energy.violations['E_deg']}")
