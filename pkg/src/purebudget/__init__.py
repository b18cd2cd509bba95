"""Minimum raw-copy budgets for entanglement purification over multi-hop paths."""

from .werner import (
    boundary_w0,
    entangled,
    fidelity_from_werner,
    raw_werner,
    werner_from_fidelity,
)
from .protocols import (
    ProtocolRegistry,
    PurificationMap,
    RationalMap,
    RegistryError,
    apply_map,
    bbpssw_map,
    bbpssw_step,
    load_registry,
)
from .schedule import (
    CopyDistribution,
    ScheduleConfig,
    ScheduleTrace,
    all_in_success,
    blocks,
    dp_step,
    evolve_trace,
    survivor_distribution,
)
from .mc import TrialSpec, simulate_success
from .search import (
    SearchResult,
    SearchSpace,
    fixed_target,
    fixed_target_budget,
    min_copy_search,
    tie_break,
)
from .sweep import GridSpec, SweepPoint, SweepSummary, export, run_sweep

__version__ = "0.1.0"

__all__ = [
    "boundary_w0",
    "entangled",
    "fidelity_from_werner",
    "raw_werner",
    "werner_from_fidelity",
    "ProtocolRegistry",
    "PurificationMap",
    "RationalMap",
    "RegistryError",
    "apply_map",
    "bbpssw_map",
    "bbpssw_step",
    "load_registry",
    "CopyDistribution",
    "ScheduleConfig",
    "ScheduleTrace",
    "all_in_success",
    "blocks",
    "dp_step",
    "evolve_trace",
    "survivor_distribution",
    "TrialSpec",
    "simulate_success",
    "SearchResult",
    "SearchSpace",
    "fixed_target",
    "fixed_target_budget",
    "min_copy_search",
    "tie_break",
    "GridSpec",
    "SweepPoint",
    "SweepSummary",
    "export",
    "run_sweep",
]
