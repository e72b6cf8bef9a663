"""Run the acceptance suite and print one line per criterion.

    python scripts/run_acceptance.py
"""
import pathlib
import sys

import pytest

root = pathlib.Path(__file__).resolve().parents[1]
sys.exit(pytest.main([str(root / "tests" / "test_acceptance.py"), "-q", "-p", "no:cacheprovider"]))
