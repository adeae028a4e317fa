"""What the public collection announcement reveals about the secrets."""

from qdialogue.analysis import leakage_audit

audit = leakage_audit()
print(f"cases enumerated:        {len(audit.joint)} (total probability {audit.total_probability})")
print(f"H(uA, uB):               {audit.prior_entropy:.3f} bits")
print(f"H(uA, uB | C):           {audit.conditional_entropy:.3f} bits")
print(f"claimed H(uA, uB | C):   {audit.claimed_conditional_entropy:.3f} bits")
print(f"I(uA, uB ; C):           {audit.mutual_information:.3f} bits")
print(f"H(uA | C) = H(uB | C):   {audit.conditional_entropy_alice:.3f} bits")

# %% Each announced collection is consistent with only 4 of the 16 secret pairs
for coll, n in audit.consistent_pairs_per_collection.items():
    print(f"  {coll}: {n} consistent (uA, uB) pairs")
for a in audit.assumptions:
    print("assumes:", a)
