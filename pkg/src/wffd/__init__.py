"""Rates, bounds and separation checks for writing on fast fading dirt.

The channel is ``Y = X + c*A*S + Z`` with a discrete state S known to the
transmitter, i.i.d. fading A that the transmitter does not see, and unit
Gaussian noise Z.
"""

from .channel import (ChannelParams, Constellation, DiscretePmf, FadingModel, GaussianLaw,
                      UniformInterval, constant_fading, make_pam, residual_noise, sample_block,
                      standardize)
from .errors import ConvergenceError, InvalidInputError, UnsupportedModelError
from .gap import (appendix_table, entropy_bound_terms, gap_breakdown, integer_restriction_gap,
                  quantized_noise_entropy, rho_z)
from .geometry import (ConditionReport, Interval, min_region_gap, ncsi_min_gap, pam_region_gap,
                       pam_uniform_regions, rcsi_min_gap)
from .numerics import (GaussianMixture, IntegrationConfig, discrete_entropy, mixture_entropy,
                       std_normal_cdf)
from .rates import (CostaPrecoding, CsiMode, DiscreteInput, GaussianInput, LinearCancel,
                    RateResult, awgn_capacity, costa_mismatch_rate, gaussian_mismatch_loss,
                    identity_residual, no_csit_rate, outer_bound, state_amplification_rate)
from .sim import SimConfig, SimResult, run_decoding_sim

__version__ = "0.1.0"
