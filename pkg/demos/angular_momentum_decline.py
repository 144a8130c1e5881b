"""Field angular momentum of a charge-pole pair as the photon gains mass.

For mu = 0 the electromagnetic field of the pair carries J_z = q g along
the line joining them no matter how far apart they sit; that separation
independence is what lets half-integer quantization work. Screening breaks
it: J_z = q g f(mu d) with f falling from 1 like a Yukawa tail, so the
angular-momentum route to quantization quietly dies at separations beyond
1/mu while the holonomy route (see the lattice demo) survives.
"""

import numpy as np

from polelab.angmom import PairConfig, field_angular_momentum

q, g = 1.0, 0.5

print("massless: J_z at several separations")
for d in (0.5, 1.0, 2.0, 4.0):
    J = field_angular_momentum(PairConfig(q=q, g=g, mu=0.0, d=d))
    print(f"  d = {d:4.1f}: J_z = {J.value:.12f}  (err {J.error:.1e})")

print("\nmu = 1: the same quadrature, now with a screened E field")
values = {}
for d in (0.5, 1.0, 2.0, 4.0, 8.0):
    J = field_angular_momentum(PairConfig(q=q, g=g, mu=1.0, d=d))
    values[d] = J.value
    print(f"  d = {d:4.1f}: J_z = {J.value:.12f}")

# J/(q g) depends on mu and d only through x = mu d, and the decline
# follows 2 (1 - (1 + x) e^{-x}) / x^2
print(f"\n{'x = mu d':>9} {'J/(q g)':>14} {'2(1-(1+x)e^-x)/x^2':>20}")
for x in (0.5, 1.0, 2.0, 4.0, 8.0):
    ratio = values[x] / (q * g)     # mu = 1, so d doubles as x
    closed = 2.0 * (1.0 - (1.0 + x) * np.exp(-x)) / x**2
    print(f"{x:9.2f} {ratio:14.10f} {closed:20.10f}")
