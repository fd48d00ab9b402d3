"""A separable Fock-pair mixture whose conditional Wigner function is unphysical everywhere."""
import numpy as np

from wignersteer import FockMixtureState, WitnessFamily, certify_unphysical, conditional_wigner, reid_product

state = FockMixtureState.thermal(1.0)
print(f"thermal weights p_n = 2^-(n+1), cutoff {state.cutoff}, tail {state.tail_mass:.1e}")

cond = conditional_wigner(state, np.zeros(2))
print("signed conditional weights at x_A = 0:", np.round(cond.weights[:5], 6))

fock_only = WitnessFamily(number_axes=False, squeezed=False)
axis = np.linspace(-4, 4, 9)
print("\nFock level m of the certificate on a 9 x 9 grid of x_A:")
for p in axis[::-1]:
    row = [certify_unphysical(state, np.array([q, p]), fock_only) for q in axis]
    print(" ".join(f"{c.witness.m:3d}" if c else "  -" for c in row))

prod, flag = reid_product(state)
print(f"\nReid product {prod:.6f}, steering flag {flag}: no homodyne steering")
