"""
Bounds for a user-supplied channel
==================================

Any phase-encoded channel can be analysed, not only the built-in models.
Here a random qutrit-to-qubit noise map follows the rotation ``exp(i G phi)``,
and the result is round-tripped through the JSON document format.
"""

import json

import numpy as np

from qmetro import ce_sdp_bound, cs_bound, phase_encode, validate
from qmetro.channel import channel_from_dict, channel_to_dict, random_kraus

rng = np.random.default_rng(1)
K = random_kraus(3, 2, 6, rng)  # full Kraus rank, so phi-nonextremal
G = np.diag([1.0, 0.0, -1.0])
ch = phase_encode(K, G, phi0=0.4)
print(validate(ch).to_dict())

doc = json.dumps(channel_to_dict(ch))
ch2 = channel_from_dict(json.loads(doc))

cs, ce = cs_bound(ch2), ce_sdp_bound(ch2)
print(f"classification  {cs.classification.value}")
print(f"CS constant     {cs.bound_const:.6f}")
print(f"CE constant     {ce.bound_const:.6f}   ({ce.solver_status}, {ce.iterations} Newton steps)")
