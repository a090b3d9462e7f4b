"""
Limits on squeezing-enhanced interferometry with optical loss
=============================================================

An interferometer whose arms each transmit a fraction eta of the light can
beat the independent-photon limit only by the factor ``sqrt(1 - eta)``.  With
eta = 0.62 this gives about 0.62.  A squeezed-light detector operating at that
loss level reported 0.67, which is consistent because the bound cannot be beaten.
"""

import math

from qmetro import ModelSpec, build, ce_sdp_bound, enhancement_factor, optimize_input

eta = 0.62
ch = build(ModelSpec("lossy_interferometer", eta))
ce = ce_sdp_bound(ch)
f1 = optimize_input(ch, 1, restarts=8).best_qfi  # best single photon

print(f"single-photon QFI      {f1:.6f}  (eta = {eta})")
print(f"bound constant         {ce.bound_const:.6f}")
print(f"enhancement factor     {enhancement_factor(ce.bound_const, f1):.6f}")
print(f"sqrt(1 - eta)          {math.sqrt(1 - eta):.6f}")
print(f"optimal rotation h     diag {ce.h_opt.diagonal().real.round(4)}")
