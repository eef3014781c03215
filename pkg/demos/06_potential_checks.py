"""Decay criteria on three reference potentials.

Chafee-Infante sits exactly on the inf bound. The piecewise potential's
running average dips below -1 on (0, 15]. The singular potential's average
tends to 1/(p - 1) as s approaches 1.
"""

import math

from meanvalue import Domain1D, InitialData, Potential, ProblemSpec, potential_avg
from meanvalue.analysis import evaluate_decay_criteria

u0 = InitialData.preset("amp_sin", 0.5)

ci = ProblemSpec(Domain1D(0.0, 1.0), 1.0, Potential.chafee_infante(math.pi**2), u0)
print("Chafee-Infante, lambda1 = pi^2")
print(evaluate_decay_criteria(ci, (-10.0, 10.0), math.pi**2).to_text())

f2 = ProblemSpec(Domain1D(0.0, 1.0), 1.0, Potential.piecewise_f2(), u0)
print("\npiecewise potential, lambda1 = 1")
print(evaluate_decay_criteria(f2, (0.0, 15.0), 1.0).to_text())
for s in (2.0, 3.0, 10.0, 15.0, 16.0, 50.0):
    print(f"  average on (0, {s:g}) = {potential_avg(Potential.piecewise_f2(), s):+.5f}")

f3 = Potential.singular_f3(0.5)
print("\nsingular potential p = 0.5: averages approach 1/(p-1) = -2")
for s in (0.5, 0.9, 0.99, 0.9999, 1.0):
    print(f"  average on (0, {s:g}) = {potential_avg(f3, s):+.6f}")
