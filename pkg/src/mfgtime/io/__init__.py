from mfgtime.io.exports import (
    bundle_frame,
    density_frame,
    measure_flow_frame,
    read_bundles_csv,
    read_value_field_binary,
    write_bundles_csv,
    write_csv,
    write_iteration_log,
    write_plan_csv,
    write_trajectories_csv,
    write_value_field_binary,
    write_value_field_csv
)
from mfgtime.io.manifest import MANIFEST_NAME, RunManifest

__all__ = [
    "RunManifest",
    "MANIFEST_NAME",
    "write_csv",
    "write_value_field_csv",
    "write_value_field_binary",
    "read_value_field_binary",
    "bundle_frame",
    "write_bundles_csv",
    "write_trajectories_csv",
    "read_bundles_csv",
    "measure_flow_frame",
    "density_frame",
    "write_plan_csv",
    "write_iteration_log",
]
