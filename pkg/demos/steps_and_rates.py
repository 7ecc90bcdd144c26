"""
Hyperbolic steps against the divergence rate
============================================

s_u / u drifts to the divergence rate. On hyperbolic groups it is already
there; on the parabolic group the gap decays like log(u) / u.
"""

import math

from koenigs import parse
from koenigs.dynamics import hyperbolic_step, step_rate_consistency
from koenigs.hyperbolic import FULL_PLANE
from koenigs.semigroups import HyperbolicGroup, ModelSemigroup, ParabolicGroup

for name, S in [("hyperbolic lam=2", HyperbolicGroup(2.0)), ("parabolic", ParabolicGroup(1))]:
    rep = step_rate_consistency(S)
    print(name, "rate", round(rep.rate, 6))
    for u, q in zip(rep.orders, rep.quotients):
        print(f"   u = {u:>4.0f}   s_u/u = {q:.6f}")

# closed form on the parabolic group
print("asinh(20) / 40 =", math.asinh(20) / 40)

# zero hyperbolic step: every order vanishes
plane = ModelSemigroup(parse("i*((1+z)/(1-z))^2"), FULL_PLANE)
for u in (0.5, 1, 2, 5):
    print(f"plane model s_{u} = {hyperbolic_step(plane, 0, u, horizon=1e6).value:.3e}")
