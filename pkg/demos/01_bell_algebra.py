"""Bell states, Pauli encodings and the entanglement-swapping table."""

import numpy as np

from qdialogue.bellalg import SWAP_TABLE, BellClass, PauliCode, pauli_action
from qdialogue.qsim import apply_single, identify_bell, prepare_bell
from qdialogue.verify import swap_outcome_distribution, verify_all

# %% The four Bell states, as amplitude vectors over |00>, |01>, |10>, |11>
for cls in BellClass:
    print(f"{cls.symbol:5s}", np.round(prepare_bell(cls).amplitudes.real, 3))

# %% A Pauli on one half moves a Bell state to another one.
# The symbolic rule and the simulated state agree.
for op in PauliCode:
    simulated = identify_bell(apply_single(op, 0, prepare_bell(BellClass.PSI_MINUS)))
    print(f"{op.symbol:3s} on Psi-:  rule -> {pauli_action(BellClass.PSI_MINUS, op)}, simulated -> {simulated}")

# %% Swapping two pairs: every joint outcome sits in one collection
dist = swap_outcome_distribution(BellClass.PHI_MINUS, BellClass.PSI_PLUS)
print("\nPhi- x Psi+ ->", SWAP_TABLE[BellClass.PHI_MINUS, BellClass.PSI_PLUS])
for (ma, mb), p in sorted(dist.items(), key=lambda kv: (kv[0][0].index, kv[0][1].index)):
    if p > 1e-12:
        print(f"  {ma} {mb}: {p:.3f}")

# %% Full table check against the amplitude oracle
print()
print(verify_all().render())
