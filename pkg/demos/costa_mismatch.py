"""Costa precoding when the transmitter gets the state gain wrong.

The encoder believes the interference is k*c*S. At k = 1 every state law
reaches the interference-free capacity; away from it a Gaussian state loses
the most.
"""

import numpy as np

from wffd import ChannelParams, awgn_capacity, costa_mismatch_rate, gaussian_mismatch_loss, make_pam

params = ChannelParams(P=10.0, c=5.0)
states = {"2-PAM": make_pam(2), "4-PAM": make_pam(4), "6-PAM": make_pam(6), "Gaussian": "gaussian"}

print(f"capacity 1/2 log2(1 + P) = {awgn_capacity(params.P):.4f} bits")
print(f"{'k':>5}" + "".join(f"{name:>10}" for name in states))
for k in np.linspace(0.0, 2.0, 9):
    row = [costa_mismatch_rate(params, k, st).rate for st in states.values()]
    print(f"{k:5.2f}" + "".join(f"{r:10.4f}" for r in row))

# the Gaussian curve has a closed form: capacity minus the mismatch loss
k = 0.5
print("\nGaussian state at k = 0.5")
print("  numeric    ", costa_mismatch_rate(params, k).rate)
print("  closed form", awgn_capacity(10.0) - gaussian_mismatch_loss(10.0, 5.0, k))

# the same quantity by sampling, with its batch-means standard error
mc = costa_mismatch_rate(params, k, make_pam(2), method="monte_carlo", mc_budget=200_000, seed=1)
print(f"  2-PAM Monte Carlo {mc.rate:.4f} +- {mc.numeric_error:.4f} "
      f"(quadrature {costa_mismatch_rate(params, k, make_pam(2)).rate:.4f})")
