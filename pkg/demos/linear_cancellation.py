"""Does a linear use of the state help when A is unknown to the transmitter?

X = sqrt(P)(alpha*G - sqrt(1 - alpha^2) K(S)) spends part of the power on a
known function of the state. With A ~ N(0, 1) the sweep below keeps alpha = 1
(plain Gaussian signalling) at every power on the grid.
"""

from wffd import ChannelParams, GaussianInput, GaussianLaw, LinearCancel, awgn_capacity, make_pam, no_csit_rate

fading = GaussianLaw(0.0, 1.0)
for P in (10.0, 40.0, 70.0):
    params = ChannelParams(P, 2.0)
    plain = no_csit_rate(params, make_pam(2), fading, GaussianInput())
    lin = no_csit_rate(params, make_pam(2), fading, LinearCancel())
    print(f"P={P:g}: capacity {awgn_capacity(P):.4f}, plain {plain.rate:.4f} +- {plain.numeric_error:.1e}, "
          f"linear {lin.rate:.4f} at alpha={lin.details['alpha']:g}")
    print("   sweep:", ", ".join(f"{a:.1f}:{r:.3f}" for a, r, _ in lin.details["sweep"]))
