"""State amplification: decode the state together with the message.

The inner bound I(Y;X,S) - H(S) is evaluated for a Gaussian input. Adding 4
bits (no receiver fading knowledge) or 6 bits (receiver knows A) gives the
outer-bound template, which only applies when the separation check passes.
"""

import math

from wffd import (ChannelParams, DiscretePmf, UniformInterval, awgn_capacity, constant_fading,
                  make_pam, outer_bound, state_amplification_rate)

# without fading: more state points cost more rate at every state power
P = 100.0
print(f"P = {P:g}, A = 1, capacity {awgn_capacity(P):.3f}")
print(f"{'c^2':>6}{'2-PAM':>9}{'4-PAM':>9}{'6-PAM':>9}")
for c2 in (100.0, 250.0, 400.0, 700.0, 1000.0):
    params = ChannelParams(P, math.sqrt(c2))
    rates = [state_amplification_rate(params, make_pam(m), constant_fading()).rate for m in (2, 4, 6)]
    print(f"{c2:6.0f}" + "".join(f"{r:9.4f}" for r in rates))

# with fading the receiver's knowledge of A matters
params = ChannelParams(20.0, 3.0)
for fading in (DiscretePmf([0.5, 1.5], [0.5, 0.5]), UniformInterval(2.0, math.sqrt(3.0))):
    print(f"\n{type(fading).__name__} fading, P = 20, c = 3")
    for mode in ("NCSI", "RCSI"):
        ob = outer_bound(params, make_pam(2), fading, mode)
        print(f"  {mode}: inner {ob.details['inner_rate']:.4f}, outer {ob.rate:.4f}, "
              f"condition gap {ob.details['min_gap']:.3f} -> valid {ob.details['valid']}")

# quadrature and Monte Carlo give the same number
fad = DiscretePmf([0.5, 1.5], [0.5, 0.5])
q = state_amplification_rate(params, make_pam(4), fad, "NCSI")
mc = state_amplification_rate(params, make_pam(4), fad, "NCSI", method="monte_carlo", seed=3)
print(f"\n4-PAM NCSI: quadrature {q.rate:.4f}, Monte Carlo {mc.rate:.4f} +- {mc.numeric_error:.4f}")
