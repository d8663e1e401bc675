# Lower bounds on transfer performance, and the two lemma checks.
import math

import numpy as np

from xfermse import (ComplexitySpec, complexity_term, lab_mse, lemma1_check,
                     lemma2_check, theorem1_lower_bound)

spec = ComplexitySpec(d=1, d_t=1, M=1, H=1, L=1, delta=4 * math.exp(-2), n=10_000)
print("C =", complexity_term(spec), " (16*(sqrt2+2) =", 16 * (math.sqrt(2) + 2), ")")

rng = np.random.default_rng(1)
z = rng.standard_normal((10_000, 1))
y = 0.8 * z + 0.3 * rng.standard_normal((10_000, 1))
s = lab_mse(z, y, 0.1)
print("score:", s.value, " bound:", theorem1_lower_bound(s, spec))

# the constant term dominates until n is very large
for n in (10**4, 10**6, 10**8, 10**10):
    sp = ComplexitySpec(1, 1, 1, 1, 1, spec.delta, n)
    print(f"n=1e{int(math.log10(n))}: C/sqrt(n)={complexity_term(sp) / math.sqrt(n):.5f}")

# dummy labels that are an affine map of the features never beat the features
F = rng.standard_normal((200, 6))
Z = F @ rng.standard_normal((6, 2)) + 1.0
Y = F @ rng.standard_normal((6, 1)) + rng.standard_normal((200, 1))
r = lemma1_check(F, Z, Y, 1.0)
print("lemma 1: gap", r.gap, "holds", r.holds)

Ys = F @ rng.standard_normal((6, 3)) + 0.2 * rng.standard_normal((200, 3))
r = lemma2_check(Ys, Y, F, 1.0)
print("lemma 2: score", r.shared_score, "<= rhs", r.rhs, "holds", r.holds)
