import numpy as np

from mfgtime.core.constants import DEFAULT_COMPACTION_TOL
from mfgtime.model.trajectories import TrajectoryBundle
from mfgtime.transport.trajectory_metric import paths_metric


def compact_bundle(bundle: TrajectoryBundle, tol=DEFAULT_COMPACTION_TOL) -> TrajectoryBundle:
    """
    Merges bundle members that lie within `tol` of each other in the path
    metric, summing their weights.

    Greedy in bundle order: the first unmerged member becomes the
    representative and absorbs every later member close to it. Only
    members starting from the same point are merged, so the initial
    measure is unchanged.
    """
    if len(bundle) <= 1:
        return bundle
    paths = bundle.paths
    starts = paths[:, 0, :]
    _, first_index, labels = np.unique(starts, axis=0, return_index=True, return_inverse=True)
    labels = labels.reshape(-1)

    keep = []
    weights = []
    for group in np.argsort(first_index, kind="stable"):
        remaining = np.flatnonzero(labels == group)
        while remaining.size:
            representative = remaining[0]
            close = paths_metric(paths[remaining], paths[representative], bundle.dt) <= tol
            close[0] = True
            keep.append(representative)
            weights.append(bundle.weights[remaining[close]].sum())
            remaining = remaining[~close]

    if len(keep) == len(bundle):
        return bundle
    order = np.argsort(keep, kind="stable")
    keep = np.asarray(keep)[order]
    weights = np.asarray(weights)[order]
    return TrajectoryBundle.from_arrays(paths[keep], weights, bundle.dt, bundle.t0s[keep],
                                        bundle.exit_times[keep], normalize=True)
