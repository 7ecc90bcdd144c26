"""
From a Koenigs function to its generator and back
=================================================

G = i / h' is the infinitesimal generator. Flowing G with an ODE solver
should reproduce the model semigroup.
"""

from pathlib import Path

import numpy as np

from koenigs import parse
from koenigs.generators import berkson_porta_residual, generator_from_koenigs
from koenigs.grid import GridSpec
from koenigs.models import KoenigsFunction
from koenigs.render import re_p_signs, write
from koenigs.semigroups import GeneratorSemigroup

K = KoenigsFunction.build(parse("(1+z)/(1-z) + i*log((1+z)/(1-z))"))
D = generator_from_koenigs(K)

rep = berkson_porta_residual(D, GridSpec(64, 128, 0.995))
print("Berkson-Porta residual", rep.residual, " min Re p", rep.min_re_p)

model = K.semigroup()
flow = GeneratorSemigroup(D.G, K.dw_point)
t = np.linspace(0, 3, 16)
for z in (0, 0.5j, -0.4 + 0.3j):
    gap = np.max(np.abs(model.orbit(z, t).z - flow.orbit(z, t).z))
    print(f"z = {z}: sup gap {gap:.2e}")

out = Path("demo_out")
out.mkdir(exist_ok=True)
print(write(out / "re_p_signs.svg", re_p_signs(D.p)))
