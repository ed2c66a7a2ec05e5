"""Degrees of freedom of the cognitive PIMAC: a P2P link sharing the
medium with a two-user MAC, with and without cognitive transmitters."""

from .channel import (ChannelRealization, CognitionCase, NoiseModel, RotationDecomposition,
                      decompose, from_real_vec, receive, receive_real, sample_channel,
                      to_real_vec)
from .dof import DofEstimate, estimate_dof
from .errors import (ConfigError, CpimacError, DegenerateChannel, InsufficientGrid,
                     LinearDependence, PoorFit, ZeroInterferenceDirection)
from .precoding import (EffectiveChannels, PrecoderSet, design_ian_precoders,
                        effective_channels, verify_alignment, verify_neutralization,
                        zero_forcing_direction)
from .rates import (RatePoint, Scheme, UpperBoundParams, rate_ian, rate_joint_decoding,
                    rate_tdm, shannon, upper_bound)

__version__ = "0.1.0"
