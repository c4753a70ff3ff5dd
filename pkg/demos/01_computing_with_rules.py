"""Declare naturals, define addition by rewriting, and let conversion do the arithmetic."""

from lampi import check_string, parse_closed_term, print_term, snf, whnf

THEORY = """
nat : Type.
0 : nat.
S : nat -> nat.

def plus : nat -> nat -> nat.
[n] plus 0 n --> n
[n1, n2] plus (S n1) n2 --> S (plus n1 n2).

def two := S (S 0).
#CONV plus two two, S (S (S (S 0))).
"""

report = check_string(THEORY, "naturals")
print("Checking the theory:")
for outcome in report.outcomes:
    print("  " + outcome.line())

sig = report.signature
term = parse_closed_term("plus two (S 0)", sig.__contains__)
print("\nA term and its reductions:")
print("  term:                ", print_term(term))
print("  weak head normal form:", print_term(whnf(sig, term)))
print("  strong normal form:  ", print_term(snf(sig, term)))
