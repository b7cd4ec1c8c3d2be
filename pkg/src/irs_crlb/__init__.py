"""CRLB-driven transmit and reflective beamforming for IRS-enabled NLoS DoA sensing."""

from .estimation import (
    CrlbReport,
    FisherInfo,
    crlb_report,
    crlb_theta,
    crlb_theta_closed_form,
    crlb_theta_reflective_form,
    fisher_information,
    identifiability,
)
from .evaluator import MleResult, MsePoint, mle_estimate, monte_carlo_mse
from .optimizer import (
    SCHEMES,
    DesignOptions,
    JointDesign,
    design_reflective_only,
    design_schemes,
    design_snr_max,
    design_transmit_only,
    minimize_crlb,
)
from .scenario import ChannelRealization, Scenario, generate_channel, load_scenario, path_loss
from .sensing import cascaded_response, simulate_echo, steering_vector, synthesize_waveform

__version__ = "0.1.0"
