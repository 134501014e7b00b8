import os
from pathlib import Path

# Keep fine-grid reference profiles inside the repo so repeated test runs
# reuse them; the directory is disposable.
os.environ.setdefault("TENOM_CACHE_DIR", str(Path(__file__).resolve().parent.parent / ".cache"))
