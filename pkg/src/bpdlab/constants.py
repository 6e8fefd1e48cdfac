"""Central tolerances and default experiment parameters.

All hard numeric thresholds used across the package live here so that a
report can always be traced back to one set of constants.
"""

# Tolerance ladder.
TOL_ORACLE = 1e-12       # brute-force oracle comparisons, N <= 64
TOL_IDENTITY = 1e-10     # algebraic identities (duality, reconstruction)
TOL_PATHS = 1e-9         # fast vs direct evaluation paths
TOL_ROUNDTRIP = 1e-12    # transform round trips
TOL_PARTITION = 1e-14    # partition-of-unity sums
TOL_SUPPORT = 1e-10      # relative magnitude counted as "outside support"

# Slope-fit tolerances (log2 units).
SLOPE_TOL = 0.2          # dyadic decay fits over j or k
SLOPE_TOL_KERNEL = 0.15  # weighted kernel norm fits

# Sentinel slope for identically vanishing piece families.
SLOPE_VANISHED = float("-inf")

# Default grid and experiment parameters.
DEFAULT_N = 256
DEFAULT_L = 40.0
DEFAULT_DIM = 1
DEFAULT_RHO = 0.5
DEFAULT_SEED = 42

# Frequency-side experiments need unit frequency spacing so that dyadic
# annuli up to 2^(j+1) = N/2 fit on the lattice (j <= 6 at N = 256).
OCTAVE_L = 6.283185307179586  # 2*pi, gives dxi = 1

# Grid size caps (memory: direct operator evaluation is O(N^(3n))).
MAX_N_1D = 512
MAX_N_2D = 64
