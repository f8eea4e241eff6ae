"""Guarding against a misspecified death curve with a maximin design.

Run with ``python demos/robust_design.py`` (about ten seconds). The nominal
Weibull parameters are only known to lie in a box; the maximin design keeps
the worst-case efficiency over that box as high as possible.
"""
from toxdesign import ParamBox, locally_optimal, maximin_design, min_efficiency, uniform_design
from toxdesign.tables import prenatal_scenario

box = ParamBox(a2=(0.08, 0.18), b2=(0.21, 0.33), gamma2=(2.6, 4.0))
base = prenatal_scenario((0.13, 0.27, 3.3))

result = maximin_design(box, base)
print(f"maximin design {result.design}")
print(f"worst-case efficiency over {len(result.scenarios)} grid scenarios: {result.min_eff:.3f}")

local = locally_optimal(base).design
for label, design in (("locally optimal at the box centre", local), ("uniform 5-point", uniform_design(5))):
    print(f"{label} {design}: worst case {min_efficiency(design, result.scenarios, result.optima):.3f}")

worst = result.efficiencies.argmin()
print(f"the binding scenario is {result.scenarios[worst].theta2}")
