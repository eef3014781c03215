"""Energy criterion and blow-up for u_t = u_xx + 2 u^5.

With f(s) = -2 s^4 and sandwich constants c1 = 0, c2 = 2, r = 4 the
criterion compares ||u0_x||^2 against |u0|_6^6. We locate the critical
amplitude of A sin(pi x), then run just above and below it.
"""

import math

from meanvalue import Domain1D, InitialData, Potential, ProblemSpec, SolveConfig, solve
from meanvalue.analysis import SandwichBounds, energy_monitor, evaluate_blowup_criterion
from meanvalue.foundation import bisect_root, sample_initial_data, unit_grid

bounds = SandwichBounds(c1=0.0, c2=2.0, r=4.0)
f = Potential.polynomial([0, 0, 0, 0, -2.0])
grid = unit_grid(2000)


def margin(A):
    u0 = sample_initial_data(InitialData.preset("amp_sin", A), grid)
    return evaluate_blowup_criterion(u0, 1.0, bounds, f, (0.0, 4.0))["blowup_criterion"].margin


A_star = bisect_root(margin, 1.0, 3.0, tol=1e-10)
print(f"criterion flips at A = {A_star:.8f}  (closed form (8 pi^2/5)^(1/4) = {(8 * math.pi**2 / 5) ** 0.25:.8f})")

for A in (1.0, 2.5):
    u0 = sample_initial_data(InitialData.preset("amp_sin", A), grid)
    print(f"\nA = {A}:")
    print(evaluate_blowup_criterion(u0, 1.0, bounds, f, (0.0, 4.0)).to_text())
    traj = solve(ProblemSpec(Domain1D(0.0, 1.0), 1.0, f, InitialData.preset("amp_sin", A)),
                 SolveConfig(t_end=0.05, n=200))
    print(f"run: {traj.outcome} at t = {traj.t_stop:.5f}")

lower = solve(ProblemSpec(Domain1D(0.0, 1.0), 1.0, bounds.lower_envelope(), InitialData.preset("amp_sin", 2.5)),
              SolveConfig(t_end=0.05, n=200))
energy = energy_monitor(lower, bounds=bounds)
print(f"\nwith the lower envelope f = -3 s^4: E(0) = {energy.script_E[0]:.3f}, "
      f"E(end) = {energy.script_E[-1]:.3e}, upward jumps = {energy.violations['script_E']}")
