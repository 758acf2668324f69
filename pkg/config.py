import logging
import os
import sys

from dotenv import load_dotenv

load_dotenv()

# ── Paths ────────────────────────────────────────────
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
FIXTURES_PATH = os.path.join(BASE_DIR, "tests", "fixtures", "oracle_regressions.json")

# ── Logging ──────────────────────────────────────────
LOG_LEVEL = os.getenv("RODL_LOG_LEVEL", "WARNING").upper()

# ── Oracle budgets ───────────────────────────────────
ORACLE_MAX_SUBSET = int(os.getenv("RODL_ORACLE_MAX_SUBSET", "16"))       # vertices
ORACLE_MAX_PARTITION = int(os.getenv("RODL_ORACLE_MAX_PARTITION", "14"))  # vertices
ORACLE_TIME_CAP = float(os.getenv("RODL_ORACLE_TIME_CAP", "600"))        # seconds

# ── Copy counting ────────────────────────────────────
COUNT_CAP = int(os.getenv("RODL_COUNT_CAP", "2500"))     # max |G| for 4-vertex patterns
PATTERN_MAX = int(os.getenv("RODL_PATTERN_MAX", "8"))    # max |H|
THREADS = int(os.getenv("RODL_THREADS", "1"))

# ── Partition pipeline constants ─────────────────────
PRETTIFY_Q = 16            # parts below eps^-Q vertices are dissolved
PARTITION_CONSTANT = 480   # final bound is PARTITION_CONSTANT * eps^-4

# ── Reports ──────────────────────────────────────────
REPORT_SCHEMA = "rodl-run/1"


def setup_logging(level: str | None = None) -> None:
    """Send tagged log lines ("[Extract] ...") to stderr; stdout stays clean for records."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(name)s] %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(level or LOG_LEVEL)
