import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from xiaudit.catalog import parse_zero_table, read_zero_table

ROOT = Path(__file__).resolve().parents[1]
ZEROS_100K = ROOT / "data" / "zeros_100k.txt"

# first thirty ordinates, 12 decimals
FIRST_30 = """
14.134725141735 21.022039638772 25.010857580146 30.424876125860 32.935061587739
37.586178158826 40.918719012147 43.327073280915 48.005150881167 49.773832477672
52.970321477714 56.446247697063 59.347044002602 60.831778524610 65.112544048082
67.079810529494 69.546401711174 72.067157674482 75.704690699084 77.144840068875
79.337375020249 82.910380854086 84.735492980517 87.425274613125 88.809111207634
92.491899270558 94.651344040520 95.870634228245 98.831194218194 101.317851005731
""".split()

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def first30():
    return parse_zero_table("\n".join(FIRST_30))


@pytest.fixture(scope="session")
def zeros_path():
    if not ZEROS_100K.exists():
        pytest.fail(f"zero table missing: run scripts/make_zero_table.py 100000 {ZEROS_100K}")
    return ZEROS_100K


@pytest.fixture(scope="session")
def first1000(zeros_path):
    return read_zero_table(zeros_path, max_zeros=1000)


@pytest.fixture(scope="session")
def full_catalog(zeros_path):
    return read_zero_table(zeros_path)
