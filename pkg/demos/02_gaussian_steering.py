"""Two-mode squeezed vacuum: the conditional covariance, the Heisenberg test and the number witness."""
import numpy as np

from wignersteer import (
    attenuate,
    certify_unphysical,
    conditional_gaussian,
    gaussian_steerable,
    make_tmsv,
    optimal_number_witness,
    reid_product,
    schur_complement,
)

for r in (0.0, 0.25, 0.5, 1.0):
    state = make_tmsv(r)
    v_cond = schur_complement(state)
    flag, defect = gaussian_steerable(state)
    _, value = optimal_number_witness(v_cond)
    print(f"r={r:4.2f}  V_B|A = {v_cond[0, 0]:.6f} I  defect {defect:+.5f}  witness {value:+.5f}  steerable {flag}")

state = make_tmsv(0.5)
cond = conditional_gaussian(state, np.array([2.0, 0.0]))
print("conditional mean at x_A = (2, 0):", np.round(cond.mean, 5))

cert = certify_unphysical(state, np.array([2.0, 0.0]))
print(f"certificate: {cert.witness.label()} at the conditional mean, value {cert.value:.5f}")

print("\nloss on Alice, r = 0.7")
for eta in np.linspace(0.3, 0.7, 5):
    lossy = attenuate(make_tmsv(0.7), eta, party="alice")
    prod, reid = reid_product(lossy)
    print(f"eta={eta:.2f}  steerable {gaussian_steerable(lossy)[0]!s:5}  Reid product {prod:.4f}  Reid flag {reid}")
