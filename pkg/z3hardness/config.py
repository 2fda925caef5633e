# Tolerance for identities summed over whole spectra or outcome spaces
TOLERANCE = 1e-9

# Tolerance for six-outcome column expectations and the arithmetized predicate
POINT_TOLERANCE = 1e-12

# Largest arity for dense function tables and spectra (3**12 entries)
MAX_ARITY = 12

# Largest assignment space searched by the brute-force optimum
MAX_ASSIGNMENTS = 3**12

# Largest enumerated test outcome space (3**K * 6**L at K=3, d=2 fits)
MAX_OUTCOMES = 1_500_000

# Largest L for the psi-restricted triple sum of the appendix checks
MAX_TRIPLE_SUM_L = 4

# Largest g arity (L = dK) the Long Code reduction will enumerate per edge
MAX_LONGCODE_L = 6

# Defaults for the verification suites
DEFAULT_SEED = 0
DEFAULT_TRIALS = 50
DEFAULT_K = 2
DEFAULT_D = 2

# Environment variables read at the edge (CLI / Verifier)
OUTPUT_DIR_ENV = "Z3HARDNESS_OUTPUT_DIR"
LOG_LEVEL_ENV = "Z3HARDNESS_LOG_LEVEL"

# CLI exit codes
EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_CONTRACT = 4
EXIT_INTERNAL = 5

SUITES = ("gadgets", "tests", "fourier", "appendix", "csp", "pipeline")
