"""
Koenigs functions and their canonical models
============================================

Build a few Koenigs functions, check the starlike criterion and look at the
normalized model they land in.
"""

from koenigs import parse
from koenigs.models import KoenigsFunction, starlike_check

examples = [
    "(i/pi)*log((1+z)/(1-z)) + 0.8",
    "3*(1+z)/(1-z) + 2*i",
    "(1+z)/(1-z) + i*log((1+z)/(1-z))",
    "i*((1+z)/(1-z))^2",
]

for text in examples:
    K = KoenigsFunction.build(parse(text))
    s = K.starlike
    print(text)
    print(f"   model {K.model.label()}, DW point {K.dw_point:.6f}, spectral value {K.spectral_value:.6f}")
    print(f"   min q = {s.min_q:.3e}, equality case: {s.equality}")

# z^2 is not univalent and the criterion says so
print("z^2: min q =", starlike_check(parse("z^2"), 1).min_q)

# the model identity h(phi_t z) = h(z) + it on one orbit
K = KoenigsFunction.build(parse(examples[0]))
S = K.semigroup()
z = 0.3 - 0.2j
for t in (0.0, 0.5, 1.0, 2.0):
    print(t, K.h(S.evaluate(t, z)) - K.h(z))
