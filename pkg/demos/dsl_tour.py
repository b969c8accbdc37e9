"""The identity DSL: write a series as text, evaluate it exactly or to any
digit count, and see how the harness notices when a formula is wrong.

Run:  python demos/dsl_tour.py
"""

import math
import random
from fractions import Fraction as F

from hyperq import parse_series_spec, parse_closed_form, render, sum_infinite, sum_terminating
from hyperq.corpus import get_identity
from hyperq.series import evaluate_closed
from hyperq.verify import VerifyOptions, perturb_rhs, verify_identity


def exact_sums():
    print("terminating sums evaluate exactly over rationals:")
    spec = parse_series_spec("sum k=0..n : qint(2*k+1)*q^k")
    for n in (0, 2, 5):
        print(f"  sum_(k=0..{n}) [2k+1] q^k at q=1/2  =",
              sum_terminating(spec, {"q": F(1, 2), "n": n}))
    print()


def numeric_sums():
    print("infinite sums come with a geometric tail bound:")
    spec = parse_series_spec("sum k=0..inf : (3*k+2)*poch(1,k)^3/(poch(3/2,k)^3*4^k)")
    prec = math.ceil(40 * math.log2(10)) + 48
    value, tail, terms = sum_infinite(spec, {}, prec)
    print("  value      ", value.to_decimal(35))
    print("  pi^2/4     ", evaluate_closed(parse_closed_form("pi^2/4"), {}, prec).to_decimal(35))
    print(f"  {terms} terms, tail bound {tail.bound.to_decimal(3)}")
    print()


def round_trip():
    rec = get_identity("T6")
    text = render(rec.lhs)
    print("corpus entries are plain text in the same language; the sixth")
    print("q-analogue's left side renders to", len(text), "characters and")
    print("re-parses to the identical tree:", parse_series_spec(text) == rec.lhs)
    print()


def discriminating_power():
    print("bump one integer in a right-hand side and the record flips to fail:")
    rng = random.Random(5)
    mutated = perturb_rhs(get_identity("R3"), rng)
    print("  original:", render(get_identity("R3").rhs))
    print("  mutated: ", render(mutated.rhs))
    report = verify_identity(mutated, VerifyOptions(digits=25))
    print(" ", report.text_line())


if __name__ == "__main__":
    exact_sums()
    numeric_sums()
    round_trip()
    discriminating_power()
