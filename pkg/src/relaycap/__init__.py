"""Capacity bounds, relay placement and quasi-concavity certificates for
Gaussian multicast relay channels."""

from .errors import (
    ConfigError,
    InvalidInputError,
    RelayCapError,
    SingularityError,
    UnsupportedTopologyError,
)
from .geometry import ChannelParams, NodeLayout, SnrVector, channel_gain, distance, snr, snr_vector
from .optimize import Bound, OptResult, SearchBox, maximize_rho, optimize_relay, sweep_grid
from .qcverify import CertResult
from .rates import (
    CovMatrix2,
    RateMode,
    RateReport,
    capacity,
    rate_2h,
    rate_cs,
    rate_cs_cov,
    rate_df,
    rate_dt,
    rate_qf,
    rate_rdf,
)

__version__ = "0.1.0"
