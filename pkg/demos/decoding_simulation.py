"""Symbol-by-symbol joint decoding of (x, s).

If the separation check passes and the noise is the folded residual, no
decoding error can occur at all. A Gaussian-noise run and a weak-state run
show the other side.
"""

import numpy as np

from wffd import ChannelParams, Constellation, SimConfig, constant_fading, make_pam, rcsi_min_gap, run_decoding_sim

x = Constellation.uniform(np.arange(-2.0, 3.0))
state = make_pam(2)

for c, noise in ((20.0, "residual"), (20.0, "gaussian"), (0.2, "gaussian")):
    params = ChannelParams(4.0, c)
    rep = rcsi_min_gap(params, state, constant_fading())
    res = run_decoding_sim(SimConfig(100_000, seed=1, noise_mode=noise, mode="RCSI"),
                           params, x, state, constant_fading())
    lo, hi = res.wilson("state")
    print(f"c={c:5g} {noise:9s} gap {rep.min_gap:6.2f}: joint {res.joint_error_rate:.5f}, "
          f"state {res.state_error_rate:.5f} [{lo:.5f}, {hi:.5f}], input {res.input_error_rate:.5f}")
