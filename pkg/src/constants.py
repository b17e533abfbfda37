"""Application-wide constants.

Contains numeric constants used across the analyzer to avoid magic numbers
and keep the exact and stochastic engines consistent.
"""

# Sweeps
DEFAULT_N_MIN = 1  # First N of a sweep
DEFAULT_N_MAX = 20  # Last N of a sweep
TABLE_N_VALUES = (5, 10, 15, 20)  # N values printed in the published tables
DEFAULT_MAX_CONCURRENT = 4  # Parallel N evaluations in a sweep

# Monte Carlo
DEFAULT_TRIALS = 100_000  # Trials per estimate
DEFAULT_SEED = 42  # Seed when none is given
DEFAULT_CHUNK_SIZE = 65_536  # Trials per vectorized batch
MAX_SEED = 2**64 - 1  # Seeds are 64-bit unsigned
STANDARD_ERROR_BAND = 3.0  # Agreement band for exact-vs-simulated checks

# Levenberg-Marquardt
LM_INITIAL_DAMPING = 1e-3  # Starting lambda
LM_DAMPING_FACTOR = 10.0  # Lambda multiplier on rejection, divisor on acceptance
LM_MAX_ITERATIONS = 200  # Hard iteration cap
LM_TOLERANCE = 1e-10  # Relative parameter change at convergence
LM_MAX_DAMPING = 1e16  # Lambda at which the search gives up
MIN_FIT_POINTS = 3  # Fewer points leave the two-parameter fit underdetermined

# Reachability
ITERATIVE_TOLERANCE = 1e-12  # Absolute change per Jacobi sweep at convergence
ITERATIVE_MAX_SWEEPS = 1_000_000  # Hard sweep cap for cyclic chains

# PRISM export
PRISM_SIGNIFICANT_DIGITS = 12  # Digits for probability literals
PRISM_MODEL_EXTENSION = ".pm"
PRISM_PROPERTIES_EXTENSION = ".props"
EMPTY_CHANNEL = 4  # Channel value meaning "no qubit in transit"

# CSV sweep format
SWEEP_CSV_HEADER = ("N", "rounds", "p_exact", "p_mc", "mc_stderr")

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
