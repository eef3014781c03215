"""Mean-value points along a Chafee-Infante run and the decay envelopes they give.

For u_t = u_xx - (u^2 - pi^2) u with small data the weighted mean
m(t) = <f(u), u^2>/||u||^2 is realised at a point xi(t) where f(u(xi)) = m.
Integrating m gives an envelope that bounds ||u(t)|| along the whole run.
"""

import math

import numpy as np

from meanvalue import Domain1D, InitialData, Potential, ProblemSpec, SolveConfig, solve
from meanvalue.analysis import verify_trajectory
from meanvalue.mvt import path_over_trajectory

spec = ProblemSpec(Domain1D(0.0, 1.0), 1.0, Potential.chafee_infante(math.pi**2),
                   InitialData.preset("amp_sin", 0.5))
traj = solve(spec, SolveConfig(t_end=1.0, n=1000, dt_max=1e-3))
path = path_over_trajectory(traj, "xi")
rep = verify_trajectory(traj, path, lambda1=math.pi**2)

print(f"{len(traj.frames)} frames, outcome {traj.outcome}")
print(f"{'t':>6} {'m(t)':>10} {'xi(t)':>8} {'||u||':>10} {'general':>10} {'sharp':>10}")
for k in np.linspace(0, len(traj.frames) - 1, 8).astype(int):
    print(f"{path.times[k]:6.3f} {path.m[k]:10.5f} {path.xi[k]:8.5f} {rep.l2[k]:10.6f} "
          f"{rep.envelope_general[k]:10.6f} {rep.envelope_sharp[k]:10.6f}")

print(f"\nmax |f(u(xi)) - m| over the run: {np.max(np.abs(path.residual)):.1e}")
print(f"largest jump of xi between frames: {path.max_jump:.2e}")
print(f"worst envelope excess: {rep.worst_violation}")
print(f"energy identity residual (max over frames): {rep.max_energy_residual:.2e}")
