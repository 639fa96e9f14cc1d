import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import pytest

from ppa.poly import PolyExpr


@pytest.fixture
def xyz():
    return PolyExpr.gens(("x1", "x2", "x3"))


def frac(a, b=1):
    return Fraction(a, b)
