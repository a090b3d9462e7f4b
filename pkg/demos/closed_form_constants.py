"""
Asymptotic precision constants for the four qubit noise models
===============================================================

For each model we solve the channel-extension SDP numerically and compare
the constant ``c`` in ``delta_phi_N >= c / sqrt(N)`` with its closed form.
Where the classical-simulation bound applies it is printed alongside.
"""

import numpy as np

from qmetro import MODELS, ModelSpec, build, ce_sdp_bound, cs_bound, reference_bound

etas = np.round(np.arange(0.1, 1.0, 0.1), 1)

# %%
# Channel-extension constants, numerical versus closed form.
print(f"{'model':>22} " + " ".join(f"{e:>8.1f}" for e in etas))
for name in MODELS:
    consts = [ce_sdp_bound(build(ModelSpec(name, e))).bound_const for e in etas]
    print(f"{name:>22} " + " ".join(f"{c:8.4f}" for c in consts))
    worst = max(abs(c - reference_bound(ModelSpec(name, e), "ce")) for c, e in zip(consts, etas))
    print(f"{'':>22} max deviation from closed form {worst:.1e}")

# %%
# The classical simulation only applies to phi-nonextremal channels.  It is
# never tighter than the channel extension, and for depolarizing noise it is
# strictly weaker.
for name in MODELS:
    cs = [cs_bound(build(ModelSpec(name, e))) for e in etas]
    if not cs[0].applicable:
        print(f"{name:>22}  classical simulation: not applicable ({cs[0].classification.value})")
        continue
    print(f"{name:>22}  " + " ".join(f"{r.bound_const:8.4f}" for r in cs))
