"""
Sorting semigroups by their dynamics
====================================

Built-in groups and a few model semigroups, classified from orbits alone.
"""

import numpy as np

from koenigs import parse
from koenigs.dynamics import classify, divergence_rate
from koenigs.semigroups import HyperbolicGroup, ModelSemigroup, ParabolicGroup, RotationGroup

# the hyperbolic group with spectral value lam moves at rate lam / 2
for lam in (0.5, 1.0, 2.0, np.pi):
    c = divergence_rate(HyperbolicGroup(lam), horizon=50).value
    print(f"lambda = {lam:.4f}   2c = {2 * c:.12f}")

# rotations and parabolic groups do not escape at a linear rate
print("rotation  ", divergence_rate(RotationGroup(0.7), horizon=1e3).value)
print("parabolic ", divergence_rate(ParabolicGroup(1), horizon=1e3).value)

families = {
    "strip": "(i/pi)*log((1+z)/(1-z)) + 1/2",
    "half-plane": "(1+z)/(1-z)",
    "plane": "i*((1+z)/(1-z))^2",
}
for name, text in families.items():
    rep = classify(ModelSemigroup(parse(text)))
    print(f"{name:>10}: {rep.type:<24} model {rep.model.label():<18} DW point {rep.denjoy_wolff.point:.6f}")
