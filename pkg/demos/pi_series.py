"""Tour of the classical pi series: evaluate each one to 40 digits and watch
the residual against its closed form vanish.

Run:  python demos/pi_series.py
"""

from fractions import Fraction

from hyperq import get_identity, sum_infinite, evaluate_closed, VerifyOptions, verify_identity

DIGITS = 40
PREC = VerifyOptions(digits=DIGITS).work_prec

SHOWCASE = [
    ("R1", "Ramanujan:    sum (6k+1) (1/2)_k^3 / (k!^3 4^k)"),
    ("R3", "Ramanujan:    sum (42k+5) (1/2)_k^3 / (k!^3 64^k)"),
    ("W1", "classical:    sum k! / (2k+1)!!"),
    ("H1", "order-2 H:    sum k!/(2k+1)!! * H_k^(2)"),
    ("T1", "conjecture:   sum (3k+2) (1)_k^3/((3/2)_k^3 4^k) {H_(2k+1)^(2) - 5/4 H_k^(2)}"),
    ("T2", "conjecture:   sum (42k+5) (1/2)_k^3/(k!^3 64^k) {H_(2k)^(2) - 25/92 H_k^(2)}"),
]


def main():
    print(f"evaluating at {DIGITS} digits (working precision {PREC} bits)\n")
    for rid, blurb in SHOWCASE:
        rec = get_identity(rid)
        value, tail, terms = sum_infinite(rec.lhs, {}, PREC)
        target = evaluate_closed(rec.rhs, {}, PREC)
        residual = abs(value.to_fraction() - target.to_fraction())
        print(blurb)
        print(f"  series  = {value.to_decimal(DIGITS)}")
        print(f"  target  = {target.to_decimal(DIGITS)}")
        print(f"  residual < 1e-{DIGITS}: {residual < Fraction(1, 10 ** DIGITS)}"
              f"   ({terms} terms, tail bound {tail.bound.to_decimal(3)})\n")

    print("the same checks through the verification harness:")
    for rid, _ in SHOWCASE:
        print(" ", verify_identity(rid, VerifyOptions(digits=DIGITS)).text_line())


if __name__ == "__main__":
    main()
