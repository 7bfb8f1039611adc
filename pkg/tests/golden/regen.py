"""Rewrite expected.txt from the current implementation (review the diff before committing)."""

import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
from test_acceptance import GOLDEN, _run_corpus  # noqa: E402

with tempfile.TemporaryDirectory() as tmp:
    (GOLDEN / "expected.txt").write_bytes(_run_corpus(Path(tmp)))
