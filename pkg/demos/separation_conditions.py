"""When can the state be decoded exactly?

With integer inputs and noise folded into [-1/4, 1/4], every value
x + c*a*s must sit more than 1/2 away from the values of every other state.
The checkers return the smallest distance and the tuple that attains it.
"""

import math

from wffd import (ChannelParams, DiscretePmf, UniformInterval, constant_fading, make_pam,
                  ncsi_min_gap, pam_region_gap, rcsi_min_gap)

for params, fading in [
    (ChannelParams(4.0, 20.0), constant_fading()),
    (ChannelParams(4.0, 0.2), constant_fading()),
    (ChannelParams(9.0, 5.0), DiscretePmf([1.0, 2.0], [0.5, 0.5])),
    (ChannelParams(4.0, 1.0), UniformInterval(10.0, math.sqrt(3.0))),
]:
    print(f"P={params.P:g} c={params.c:g} {type(fading).__name__}")
    for rep in (ncsi_min_gap(params, make_pam(2), fading), rcsi_min_gap(params, make_pam(2), fading)):
        w = rep.witness
        print(f"  {rep.mode}: gap {rep.min_gap:.4f} satisfied={rep.satisfied} "
              f"at i={w.i}, a={w.a:.3f}, a~={w.a_tilde:.3f}")

# under uniform fading each (input, state) pair maps to an interval of outputs
res = pam_region_gap(ChannelParams(4.0, 0.025), 2, 10.0)
print(f"\nregions for c=0.025, mu_A=10: gap {res.gap:.4f}, ordered {res.ordered}, "
      f"closed form {res.closed_form:.4f}")
res = pam_region_gap(ChannelParams(4.0, 20.0), 2, 1.0)
print(f"regions for c=20, mu_A=1: gap {res.gap:.4f} (they overlap)")
