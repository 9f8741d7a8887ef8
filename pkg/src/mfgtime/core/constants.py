import math

# Tolerances shared by the value types
WEIGHT_SUM_TOL = 1e-12
MARGINAL_TOL = 1e-10
ADMISSIBILITY_TOL = 1e-9
SUPPORT_BOUND_TOL = 1e-10

# Solver defaults
DEFAULT_DIRECTIONS = 64
DEFAULT_PROBE_FACTOR = 1.0  # h' = factor * dt
DEFAULT_CLUSTER_ANGLE = math.pi / 4
DEFAULT_STATIONARY_TOL_FACTOR = 1e-6  # stop when max change < factor * dt
DEFAULT_MAX_SWEEPS = 2000
DEFAULT_SIGMA_FACTOR = 2.0  # sigma = factor * h when not given
DEFAULT_HORIZON_FACTOR = 1.5  # t_max = factor * T(psi(R0)) when not given

# Equilibrium defaults
DEFAULT_DAMPING_MODE = "fictitious"
DEFAULT_MAX_ITERS = 60
DEFAULT_TOL = 1e-3
DEFAULT_COMPACTION_TOL = 1e-4

# Scenario defaults
DEFAULT_SEED = 0
DEFAULT_WASSERSTEIN_ORDER = 1.0
DEFAULT_SPEED_MODEL = "exponential"

# Diagnostics defaults
DEFAULT_ANGLE_TOL_DEG = 10.0
DEFAULT_PASS_FRACTION = 0.95
DEFAULT_SUPPORT_RADII = 20
DEFAULT_TEST_BUMPS = 10
DEFAULT_WEAK_RESIDUAL_SAFETY = 4.0
EQUILIBRIUM_RESIDUAL_FRACTION = 0.05
