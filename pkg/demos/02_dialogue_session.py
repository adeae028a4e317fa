"""One attack-free dialogue session, group by group."""

from qdialogue.analysis import cabello_efficiency
from qdialogue.protocol import SessionConfig, run_session

config = SessionConfig(groups=4, seed=7, alice_bits="01101100", bob_bits="11000110")
t = run_session(config)

print("status:", t.status)
for c in t.checks:
    print(f"check {c.check_id}: {c.mismatches}/{c.samples_tested} mismatches -> {c.verdict}")

# %% Each group: shared initial class, both encodings, the public collection
print("\ngroup  initial  alice  bob  announced")
for g in t.groups:
    print(f"{g.index:5d}  {str(g.initial_class):7s}  {g.alice_op.bit_string():5s}  {g.bob_op.bit_string():3s}  {g.announced}")

# %% Both sides recover the partner's message
print("\nAlice reads:", t.decoded["at_alice"], "(Bob sent", config.bob_bits + ")")
print("Bob reads:  ", t.decoded["at_bob"], "(Alice sent", config.alice_bits + ")")

eff = cabello_efficiency(t)
print(f"\nefficiency: {eff.b_s} / ({eff.q_t} + {eff.b_t}) = {eff.eta_exact} = {eff.eta:.3f}")
