"""Overshoot seed of hyperbolic Poschl-Teller composed with Poschl-Teller (2, 2).

Prints the seed data, a few kernel values and the verification report.
Run with ``python3 demos/hpt_overshoot.py``.
"""
import numpy as np

from potcompose import compose, full_report, make_potential, overshoot_state, seed_bracket

spec = make_potential("hyperbolic_pt", g=1.0, h=2.5)
print(f"{spec}: overshoot degrees {seed_bracket(spec, 'overshoot').describe()}")
seed = overshoot_state(spec, 2)
print(f"seed v=2: energy {seed.energy:.12g}, ground {spec.ground_energy:.12g}")

comp = compose(seed, make_potential("poschl_teller", g=2.0, h=2.0))
x = np.array([0.05, 0.5, 1.0, 2.0, 5.0])
print("x       psi0           chi0           V_C")
for xi, p, c, v in zip(x, comp.kernel.psi(x), comp.kernel.chi(x), comp.V_C(x)):
    print(f"{xi:<7g} {p:<14.8g} {c:<14.8g} {v:.8g}")

report = full_report(comp, modes=[0, 1, 2, 3])
print(report.text())
