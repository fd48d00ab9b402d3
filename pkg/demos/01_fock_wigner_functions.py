"""Fock-state Wigner functions: normalization, orthogonality and where they go negative."""
import numpy as np

from wignersteer import PhaseGrid, find_negative_fock, fock_wigner, integrate, min_value, pair, sample_field

grid = PhaseGrid(8.0, 256, 2)
fields = [sample_field(lambda x, n=n: fock_wigner(n, x), grid) for n in range(4)]

for n, w in enumerate(fields):
    print(f"|{n}>: integral {integrate(w):.8f}, purity {pair(w, w):.8f}, min {min_value(w)[0]:+.5f}")

gram = np.array([[pair(a, b) for b in fields] for a in fields])
print("overlap matrix 4 pi int W_n W_m:")
print(np.round(gram, 10))

# every phase-space point is negative for some Fock state
for r2 in (0.0, 3.0, 10.0, 50.0):
    x = np.array([np.sqrt(r2), 0.0])
    m = find_negative_fock(x, 80)
    print(f"|x|^2 = {r2:5.1f}: first negative Fock level m = {m}, W_m(x) = {fock_wigner(m, x):+.3e}")
