"""Gain optimization and simulation for amplify-and-forward relay networks.

Two-hop networks with correlated relay noise (closed-form optimal gains
and several reduced-information schemes), multi-source two-hop networks,
and three-hop networks solved by alternating two-hop optimizations.
"""

from .channel import InterferenceEnv, RngStream, interference_covariance, iid_equivalent_covariance
from .errors import (
    ConfigError,
    DimensionMismatch,
    InfeasibleGain,
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    RelaySimError,
    SingularK,
    SweepPointFailed,
    ZeroChannel,
    ZeroGain,
)
from .experiments import SweepSpec, SweepVariable, run_sweep, verify_ordering
from .threehop import StageGains, ThreeHopNetwork, optimize, optimize_multistart, reciprocal, snr3
from .twohop import (
    MultiSourceTwoHopNetwork,
    Scheme,
    SchemeEval,
    TwoHopNetwork,
    evaluate_scheme,
    optimal_gain_multisource,
    optimal_gain_s11,
    rate_bits,
    relay_power,
    snr_of_gain,
)

__version__ = "0.1.0"
