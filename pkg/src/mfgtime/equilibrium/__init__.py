from mfgtime.equilibrium.compaction import compact_bundle
from mfgtime.equilibrium.damping import DampingFactory, FictitiousPlay, PicardDamping
from mfgtime.equilibrium.iteration import (
    IterationState,
    best_response,
    fixed_point_iterate,
    initial_bundle,
    solve_all
)
from mfgtime.equilibrium.residuals import EquilibriumResidual, equilibrium_residual
from mfgtime.equilibrium.support import count_support_violations, support_table

__all__ = [
    "IterationState",
    "initial_bundle",
    "best_response",
    "fixed_point_iterate",
    "solve_all",
    "equilibrium_residual",
    "EquilibriumResidual",
    "compact_bundle",
    "DampingFactory",
    "FictitiousPlay",
    "PicardDamping",
    "support_table",
    "count_support_violations",
]
