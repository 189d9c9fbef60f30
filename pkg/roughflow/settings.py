"""
Runtime settings.

Values come from the environment (optionally a ``.env`` file in the working
directory) and are read once at import time.
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Numerics
TOLERANCE = float(os.getenv("ROUGHFLOW_TOLERANCE", "1e-12"))
PVAR_EXACT_LIMIT = int(os.getenv("ROUGHFLOW_PVAR_EXACT_LIMIT", "20000"))
EXPLOSION_BOUND = float(os.getenv("ROUGHFLOW_EXPLOSION_BOUND", "1e8"))

# Execution
THREADS = int(os.getenv("ROUGHFLOW_THREADS", "1"))
BLOCK_SIZE = int(os.getenv("ROUGHFLOW_BLOCK_SIZE", "256"))

# Logging
LOG_LEVEL = os.getenv("ROUGHFLOW_LOG_LEVEL", "WARNING").upper()
LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(name)s: %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
