"""Link-level simulation and numerics for frequency-mixing reflecting surfaces.

A surface module whose reflection gain swings as a unit cosine acts as a
frequency mixer: every reflected path reappears at the carrier plus/minus
the mixing frequency, while the direct path stays put. The subpackages cover
the waveform-level verification of that frequency split, the statistics of
the shifted multipath channels, deterministic single-ray geometry, one-pilot
channel estimation, and achievable-rate evaluation, plus a CLI that runs the
reference experiments and writes CSV artifacts.
"""

__version__ = "0.1.0"

from .errors import ConfigurationError, PreconditionError
from .estimation import (EstimationReport, Observation, branch_nmse, ls_estimate,
                         make_observation, mmse_coefficients, mmse_estimate, nmse)
from .geometry import (PathlossModel, SceneGeometry, assemble_two_path_channels,
                       classical_two_path_gain, los_component)
from .multipath import (ChannelSet, FrequencyPlan, PathSet, StackLayout,
                        complex_normal, condition_number_db, delay_phasor_mean,
                        draw_channel_set, draw_path_set, draw_stacked_channels,
                        evaluate_at_shift, pair_correlation,
                        reflected_correlation_matrix, uniform_delay_moments)
from .rate import (RateCurve, RatePoint, expected_stacked_energy, mimo_baseline,
                   rate_curve, rate_mc, rate_mc_with_estimates, rate_upper_bound)
from .waveform import (BasebandWaveform, LinkScene, PassbandWaveform, Reflector,
                       SignalGrid, SinglePathLink, Tone, ToneSum, extract_tones,
                       frm_reflect, iq_demod_lowpass, lowpass_taps,
                       propagate_single_path, simulate_link, upconvert)

__all__ = [name for name in dir() if not name.startswith("_")]
