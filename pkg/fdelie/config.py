# fdelie/config.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Shared constants. Modules with their own tunables import their defaults from here.

# ==============================================================================
#  CONFIGURATION
# ==============================================================================

RANDOM_SEED = 42

# Numeric oracles
FD_EPSILON        = 1e-5    # central-difference step for functional derivatives
FD_BATCH          = 16      # unit perturbations evaluated per pass
JET_FD_STEP       = 1e-2    # step of the 8th-order stencils used for jets of solutions
FLOW_TOLERANCE    = 1e-10   # RK4 step doubling stops below this change
FLOW_START_STEPS  = 8
FLOW_MAX_DOUBLINGS = 14
TRANSPORT_SAMPLES = 100
TRANSPORT_BASELINE_TOLERANCE = 1e-8
SWEEP_SIZES       = (32, 64, 128, 256)
SWEEP_SAMPLES     = 8
N_JOBS            = 1       # joblib workers; -1 uses every core

# Symbolic engine
CLASS_INDICES = ("x", "xp", "xpp", "xppp")
FREE_INDICES  = ("x", "xp", "xpp", "xppp", "x0", "x1", "x2", "x3")
MAX_BOUND_PERMUTATIONS = 5  # above this many bound indices, first-appearance order is used
MAX_JET_ORDER = 2

# Files
REPORT_DIR    = "reports"
FIXTURE_DIR   = "fixtures"
REPORT_SCHEMA = 1
