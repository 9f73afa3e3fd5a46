"""
Configuration for the bispectral operator toolkit
"""

import os
from dotenv import load_dotenv

load_dotenv()

# Truncation defaults (precision unset means "derive from operator data")
PRECISION = int(os.getenv("BISPECTRAL_PREC")) if os.getenv("BISPECTRAL_PREC") else None
DEPTH = int(os.getenv("BISPECTRAL_DEPTH", "16"))

# Search bounds
THETA_MAX_DEG = int(os.getenv("THETA_MAX_DEG", "8"))
THETA_MAX_M = int(os.getenv("THETA_MAX_M", "6"))
RANK_BOUND = int(os.getenv("RANK_BOUND", "8"))
PROBE_BOUND = int(os.getenv("PROBE_BOUND", "4"))
MAX_STEPS = int(os.getenv("MAX_STEPS")) if os.getenv("MAX_STEPS") else None

# Fail instead of downgrading to series-verified certificates
REQUIRE_EXACT = os.getenv("REQUIRE_EXACT", "False").lower() == "true"

# Worker processes for multi-file runs
JOBS = int(os.getenv("JOBS", "1"))

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")
LOG_FORMAT = os.getenv("LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s")


def default_precision(order, span=0):
    """Series precision T = 4·N·(1 + span) + 16."""
    if PRECISION is not None:
        return PRECISION
    return 4 * order * (1 + span) + 16


def default_max_steps(order, span):
    if MAX_STEPS is not None:
        return MAX_STEPS
    return order * (span + order)
