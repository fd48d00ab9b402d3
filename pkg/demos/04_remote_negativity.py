"""Heralding Alice on a photon count at Bob: Bayes rule for Wigner functions."""
import numpy as np

from wignersteer import (
    FockMixtureState,
    PhaseGrid,
    fock_projector,
    make_product,
    make_tmsv,
    negativity_summary,
    remote_conditioned_state,
)

h = 16.0 / 64
grid = PhaseGrid(8.0, 64, 2, (h / 2, h / 2))  # half-cell shift puts the origin on a node

for name, state in [("Fock mixture t=1", FockMixtureState.thermal(1.0)),
                    ("TMSV r=0.5", make_tmsv(0.5)),
                    ("product, thermal Bob", make_product(np.eye(2), 2 * np.eye(2)))]:
    res = remote_conditioned_state(state, fock_projector(1), grid_a=grid)
    s = negativity_summary(res.field)
    print(f"{name:22s} P(1) = {res.success_probability:.6f}  min W_A|1 = {s['min_value']:+.6f}"
          f"  negative volume {s['negative_volume']:.5f}")

print(f"reference: -1/(2 pi) = {-1 / (2 * np.pi):+.6f}, single-photon negative volume {2 * np.exp(-0.5) - 1:.5f}")
