"""Flex-grid entanglement distribution: planning, simulation, estimation."""

from .allocator import (
    AllocationPlan,
    GridPolicy,
    Objective,
    alphabetical_fixed,
    balance_score,
    enumerate_fixed,
    feasibility,
    make_groups,
    optimize_flex,
)
from .hardware import (
    Detector,
    DwdmModel,
    LossRow,
    WssModel,
    crossover_users,
    dwdm_best_loss,
    dwdm_filter_count,
    dwdm_worst_loss,
    fully_connected_capacity,
    loss_table,
)
from .network import Allocation, Link, NetworkModel, User, make_link
from .ratemodel import (
    RateReport,
    accidental_rate,
    coincidence_rate,
    predict_report,
    singles_rate,
)
from .scenario import Scenario, load_scenario, save_scenario
from .session import SessionStore
from .spectrum import (
    BiphotonSpectrum,
    Channel,
    SpectralSlice,
    carve_grid,
    channel_flux,
    spectral_density,
    validate_grid,
)
from .timetags import TimetagStream, count_coincidences, simulate_timetags
from .tomography import (
    ChannelNoiseModel,
    CountsRecord,
    PosteriorSummary,
    SamplerConfig,
    bayes_estimate,
    link_fidelity_scan,
    synth_counts,
    werner_state,
)

__version__ = "0.1.0"
