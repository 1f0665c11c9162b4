"""Simulation library for reflecting-surface-aided mmWave MIMO links.

Channel synthesis, cascade (effective) channel handling, reflection-vector
and hybrid-transceiver design driven by the cascade alone, rate and error
metrics, and a Monte-Carlo sweep harness with CSV/JSON outputs.
"""

from .beamforming import (
    HybridBeamformers,
    PowerAllocation,
    fully_digital,
    project_hybrid,
    r_max,
    relaxed_beamformers,
    water_filling,
)
from .channels import (
    ArrayGeometries,
    ChannelTriple,
    LOS_PATH_LOSS,
    LinkChannel,
    NLOS_PATH_LOSS,
    PathLossParams,
    PathParameters,
    ScenarioConfig,
    SystemDims,
    UpaGeometry,
    general_upa_vector,
    link_from_paths,
    sample_channel_triple,
    sample_link_channel,
    sample_path_loss,
    squarest_geometry,
    steering_vector,
)
from .effective import (
    EffectiveChannel,
    ReflectionVector,
    build_effective,
    gram_sum,
    total_channel,
)
from .evaluation import (
    EvaluationInput,
    nmse,
    perturb_matrix_to_nmse,
    perturb_to_nmse,
    spectral_efficiency,
)
from .experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    Method,
    SweepAxis,
    SweepResult,
    TrialRecord,
    dbm_to_watts,
    load_config,
    resolve_point,
    run_sweep,
    run_trial,
    summarize,
)
from .reflection import (
    asymptotic_reflection,
    canonical_phase,
    project_reflection,
    random_reflection,
    relaxed_reflection,
)

__all__ = [
    "ArrayGeometries", "CSV_COLUMNS", "ChannelTriple", "EffectiveChannel",
    "EvaluationInput", "ExperimentConfig", "HybridBeamformers", "LOS_PATH_LOSS",
    "LinkChannel", "Method", "NLOS_PATH_LOSS", "PathLossParams",
    "PathParameters", "PowerAllocation", "ReflectionVector", "ScenarioConfig",
    "SweepAxis", "SweepResult", "SystemDims", "TrialRecord", "UpaGeometry",
    "asymptotic_reflection", "build_effective", "canonical_phase",
    "dbm_to_watts", "fully_digital", "general_upa_vector", "gram_sum",
    "link_from_paths", "load_config", "nmse", "perturb_matrix_to_nmse",
    "perturb_to_nmse", "project_hybrid", "project_reflection", "r_max",
    "random_reflection", "relaxed_beamformers", "relaxed_reflection",
    "resolve_point", "run_sweep", "run_trial", "sample_channel_triple",
    "sample_link_channel", "sample_path_loss", "spectral_efficiency",
    "squarest_geometry", "steering_vector", "summarize", "total_channel",
    "water_filling",
]
