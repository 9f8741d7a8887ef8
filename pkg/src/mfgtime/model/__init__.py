from mfgtime.model.bounds import lipschitz_bounds, origin_distance, phi_support_profile, psi_T_bounds
from mfgtime.model.grid import SpaceTimeGrid
from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.model.samplers import SamplerFactory
from mfgtime.model.targets import Ball, Box, PointCloud, TargetPrimitiveFactory, TargetSet, target_distance
from mfgtime.model.trajectories import PolylineTrajectory, TrajectoryBundle

__all__ = [
    "EmpiricalMeasure",
    "PolylineTrajectory",
    "TrajectoryBundle",
    "Ball",
    "Box",
    "PointCloud",
    "TargetPrimitiveFactory",
    "TargetSet",
    "target_distance",
    "SpaceTimeGrid",
    "SamplerFactory",
    "psi_T_bounds",
    "phi_support_profile",
    "lipschitz_bounds",
    "origin_distance",
]
