"""Link-level simulator for a downlink massive MIMO-NOMA cell with near-field
and far-field users."""

from .beamforming import BeamSet, Scheme, cognitive_beams, noma_beams, random_beams
from .clustering import ClusterAssignment, hybrid_cluster
from .config import ConfigError, ScenarioConfig, load_config
from .geometry import ArrayConfig, ChannelVector, FieldClass, UserProfile
from .power import FgConfig, PowerVector, brute_force_optimal, equal_allocate, fg_allocate
from .scheduling import LinkState, Policy, SinrReport
from .simulation import CampaignStats, TrialResult, run_campaign, run_trial, sweep

__version__ = "0.1.0"
