import math
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Truncation and numerical tolerances
TRUNCATION_TOLERANCE = float(os.getenv("LASERLAB_TRUNCATION_TOLERANCE", "1e-10"))
MAX_TRUNCATION_LOSS = float(os.getenv("LASERLAB_MAX_TRUNCATION_LOSS", "1e-6"))  # hard limit inside experiments
HERMITIAN_TOLERANCE = 1e-12
EIGENVALUE_FLOOR = -1e-10
UNITARY_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-12
NORMALIZATION_TOLERANCE = 1e-12

# Dense representation limits
MAX_DENSE_PACKETS = 2
MAX_DENSE_SIDE = int(os.getenv("LASERLAB_MAX_DENSE_SIDE", "400"))  # D^2 for two-mode operators

# Phase grids
PHASE_GRID_POINTS = int(os.getenv("LASERLAB_PHASE_GRID_POINTS", "256"))
MIN_PHASE_GRID_POINTS = 8

# Molmer interference
MOLMER_SETTING_OFFSETS = [0.0, math.pi / 2]  # reference offset of each interference arm
MOLMER_CHECKPOINTS = {3: 0.5, 10: 0.9}  # detections -> minimum median resultant length

# Statistical tests
TEST_LEVEL = 0.01
PREDICTIVE_SAMPLES = int(os.getenv("LASERLAB_PREDICTIVE_SAMPLES", "200"))
PHASE_LOCK_PASS_RATE = 0.95

# Distillation
DISTILLATION_FRACTION = 0.9  # of the pure two-mode squeezed value

# Teleportation
HOMODYNE_GRID_POINTS = int(os.getenv("LASERLAB_HOMODYNE_GRID_POINTS", "161"))
TELEPORT_PHASE_BINS = 8
TELEPORT_FIDELITY_TOLERANCE = 0.01
TELEPORT_OFFSET_DEGRADATION = 0.1
NO_SIGNALLING_DISTANCE = 0.02

# Identity and cross-checks
IDENTITY_DISTANCE = 1e-10
BEAM_CORRELATION_DISTANCE = 0.1
CROSS_FORMALISM_BITS = 0.02
SEPARABILITY_TOLERANCE = 1e-10

# Reports
SCHEMA_VERSION = "1.0"
CONVENTIONS = {
    "vacuum_variance": "1/2",
    "quadratures": "x=(a+a^dag)/sqrt(2), p=(a-a^dag)/(i sqrt(2))",
    "beamsplitter": "(a,b) -> ((a+b)/sqrt(2), (b-a)/sqrt(2))",
    "two_mode_squeezing_phase": "(exp(2i phi) tanh r)^n |n,n> / cosh r",
    "logarithm_base": 2,
}

# Run ledger (disabled when unset)
RUN_LEDGER_URL = os.getenv("LASERLAB_LEDGER_URL")

# Per-experiment defaults
EXPERIMENT_DEFAULTS = {
    "identity-check": {"mags": "0.5,1,2", "dim": 0, "grid_points": 0},
    "molmer": {"mag_a": 1.0, "mag_b": 1.0, "packets": 20, "trials": 1000,
               "grid_points": PHASE_GRID_POINTS, "phase_model": "mixture", "fixed_delta": 0.0},
    "phase-lock": {"mag": 2.0, "packets": 20, "trials": 500, "grid_points": PHASE_GRID_POINTS,
                   "predictive_samples": PREDICTIVE_SAMPLES, "lock": "sharp"},
    "separability": {"squeeze": 0.4, "dim": 14, "grid_points": 0},
    "distill": {"squeeze": 0.3, "lo_mag": 2.0, "n_lo": 8, "dim": 12, "trials": 200,
                "grid_points": PHASE_GRID_POINTS},
    "teleport": {"squeeze": math.log(4) / 2, "input_disp": "1", "input_photons": 0,
                 "mode": "shared-reference", "offset": 0.0, "trials": 10000, "dim": 16,
                 "grid_points": 64, "phase_model": "mixture", "gain": 1.0},
}

# Sub-second presets for CI
SMOKE_PRESETS = {
    "identity-check": {"mags": "1"},
    "molmer": {"trials": 50, "packets": 10},
    "phase-lock": {"trials": 60, "packets": 8, "predictive_samples": 199},
    "separability": {"squeeze": 0.4, "dim": 10},
    "distill": {"trials": 5, "n_lo": 4, "dim": 8},
    "teleport": {"trials": 200, "dim": 16, "grid_points": 16},
}
