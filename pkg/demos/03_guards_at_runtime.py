"""Guards are not verified when a rule is declared; they are checked every time
the rule fires, and a failed check is an error rather than a silent rewrite."""

from lampi import GuardViolation, parse_closed_term, print_term, snf, whnf
from lampi.checker import Checker
from lampi.corpus import corpus_root

sig = Checker().check_file(str(corpus_root() / "universes/lift.dk")).signature
for rule in sig.rules_for("pi"):
    print("Guarded rule:", rule)


def term(text):
    return parse_closed_term(text, sig.__contains__)


good = term("pi (S 0) (lift 0 c) (x => lift 0 (d x))")
print("\nMatching instance:", print_term(good))
print("  rewrites to     ", print_term(snf(sig, whnf(sig, good))))

bad = term("pi (S 0) (lift 0 c) (x => lift (S 0) (d x))")
print("\nMismatched instance:", print_term(bad))
try:
    whnf(sig, bad)
except GuardViolation as e:
    print("  raises", e)
