"""
Upper bound versus achievable QFI for a few probes
==================================================

The input optimiser finds good N-probe states by alternating between the
symmetric logarithmic derivative and the top eigenvector of the
Heisenberg-picture operator.  Its QFI must sit below ``4 N min ||alpha||``.
Where the classical-simulation bound applies, the QFI must also sit below
``N F_cl``.
"""

from qmetro import MODELS, ModelSpec, build, ce_sdp_bound, cs_bound, optimize_input

eta = 0.8
for name in MODELS:
    ch = build(ModelSpec(name, eta))
    ce = ce_sdp_bound(ch)
    cs = cs_bound(ch)
    for n in (1, 2, 3):
        res = optimize_input(ch, n, restarts=8, seed=0)
        line = f"{name:>22} N={n}  oracle {res.best_qfi:8.4f}  <= CE {ce.qfi_bound(n):8.4f}"
        if cs.applicable:
            line += f"  <= CS {n * cs.f_cl:8.4f}"
        print(line)

# %%
# Without noise nothing stops Heisenberg scaling, and the oracle finds F = N^2.
ch = build(ModelSpec("dephasing", 1.0, unitary_limit=True))
print("noiseless:", [round(optimize_input(ch, n, restarts=4).best_qfi, 6) for n in (1, 2, 3)],
      " CE feasible:", ce_sdp_bound(ch).feasible)
