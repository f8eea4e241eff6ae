"""Locally optimal design for the dose giving 5% extra prenatal-death risk.

Run with ``python demos/local_design.py``. The script finds the design,
checks it against the equivalence theorem, compares it with the uniform
five-point design and turns it into an allocation of 30 litters.
"""
import numpy as np

from toxdesign import (
    DoseResponseModel,
    Endpoint,
    ImplantSpec,
    Scenario,
    criterion_value,
    locally_optimal,
    round_design,
    sensitivity_curve,
    uniform_design,
)

scenario = Scenario(
    theta2=DoseResponseModel.weibull(0.13, 0.27, 3.33),
    endpoint=Endpoint.PRENATAL_DEATH,
    alpha=0.05,
    implants=ImplantSpec.constant(10),
)
print(f"ED_0.05 = {scenario.ed:.4f}")

result = locally_optimal(scenario)
print(f"optimal design {result.design}, criterion {result.value:.5g}")
print(f"largest sensitivity {result.certificate.max_sensitivity:.6f} at d = {result.certificate.argmax_dose:.3f}")

uniform = uniform_design(5)
print(f"efficiency of {uniform}: {result.value / criterion_value(uniform, scenario):.3f}")

# the sensitivity touches 1 exactly at the support points
doses, psi = sensitivity_curve(result.design, scenario, 11)
for d, p in zip(doses, psi):
    print(f"  d = {d:.1f}  psi = {p:.4f}")

print("30 litters:")
exact = round_design(result.design, 30)
for d, count in zip(exact.doses, exact.counts):
    print(f"  {count:2d} litters at d = {d:.3f}")
