"""Loose consistency note: q-analogues approach their classical values as q -> 1.

This is a sanity cross-link, not a verification gate: the identities are
checked rigorously at fixed rational q elsewhere; here q = 1 - 2^-7 and a
10% relative tolerance confirm the deformations sit on top of the right
classical series.
"""

import math
from fractions import Fraction as F

import pytest

from hyperq.corpus import get_identity
from hyperq.functions import pi_constant
from hyperq.series import sum_infinite

Q_NEAR_ONE = F(127, 128)
PREC = math.ceil(15 * math.log2(10)) + 32


def _relative_gap(value, target) -> float:
    return abs(float(value.to_fraction() - target.to_fraction())) / abs(float(target.to_fraction()))


@pytest.mark.parametrize("rid,classical", [
    ("QA1", lambda p: 4 / pi_constant(p)),                       # -> 4/pi
    ("T3a", lambda p: pi_constant(p) / 2),                        # -> pi/2
])
def test_degeneration_note(rid, classical):
    rec = get_identity(rid)
    value, _, _ = sum_infinite(rec.lhs, {"q": Q_NEAR_ONE}, PREC)
    assert _relative_gap(value, classical(PREC)) < 0.1
