import sys
import textwrap
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from pscopf import enumerate_contingencies, parse_case, synthetic_model_from_case

DATA_DIR = Path(__file__).resolve().parents[1] / "data"

# 3-bus ring, equal reactances, slack at b3
CASE3_TEXT = textwrap.dedent("""\
    base_mva 100

    [bus]
    b1
    b2
    b3 slack

    [line]
    b1 b2 0.1 140
    b2 b3 0.1 140
    b1 b3 0.1 140

    [gen]
    b1 10.0 0 150
    b3 20.0 0 200

    [load]
    b2 120

    [infeed]
    b1 30
    b2 20
""")


@pytest.fixture
def case3():
    return parse_case(CASE3_TEXT)


@pytest.fixture
def cset3(case3):
    return enumerate_contingencies(case3)


@pytest.fixture
def model3(case3):
    return synthetic_model_from_case(case3)


@pytest.fixture(scope="session")
def case118():
    return parse_case((DATA_DIR / "case118.case").read_text())


@pytest.fixture(scope="session")
def cset118(case118):
    return enumerate_contingencies(case118)
