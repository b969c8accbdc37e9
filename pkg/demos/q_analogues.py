"""The q-analogues: verify them at several bases and watch them degenerate to
their classical limits as q -> 1.

Run:  python demos/q_analogues.py
"""

import math
from fractions import Fraction as F

from hyperq import get_identity, pi_constant, sum_infinite
from hyperq.verify import VerifyOptions, verify_identity


def verify_at_bases():
    options = VerifyOptions(digits=30, work_digits=40,
                            q_values=(F(1, 3), F(1, 2), F(7, 10)))
    print("q-analogues at q in {1/3, 1/2, 7/10}, residual tolerance 1e-30:")
    for rid in ("T3a", "T3b", "T3c", "T4", "T5", "T6", "QA1", "QS1"):
        print(" ", verify_identity(rid, options).text_line())
    print()


def degeneration():
    prec = math.ceil(15 * math.log2(10)) + 32
    q = F(127, 128)
    print(f"loose q -> 1 check at q = {q} (not a verification gate):")
    for rid, describe, classical in (
            ("QA1", "q-analogue of the 4/pi series", 4 / pi_constant(prec)),
            ("T3a", "q-analogue of sum k!/(2k+1)!!", pi_constant(prec) / 2)):
        value, _, _ = sum_infinite(get_identity(rid).lhs, {"q": q}, prec)
        rel = abs(float(value.to_fraction() / classical.to_fraction()) - 1)
        print(f"  {rid}: {describe}")
        print(f"       value {value.to_decimal(10)} vs classical "
              f"{classical.to_decimal(10)}  (relative gap {rel:.3%})")


if __name__ == "__main__":
    verify_at_bases()
    degeneration()
