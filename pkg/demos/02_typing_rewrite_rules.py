"""Rules whose left side is ill-typed can still be safe: the checker solves the
typing constraints of the left side and types the right side under that solution."""

from lampi import check_string

VECTORS = """
nat : Type.
0 : nat.
S : nat -> nat.
A : Type.
vector : nat -> Type.
Nil : vector 0.
Cons : n : nat -> A -> vector n -> vector (S n).
def tail : n : nat -> vector (S n) -> vector n.
"""

print("1. A linear tail rule: its left side only typechecks when n and m coincide.")
report = check_string(VECTORS + "[n, m, a, l] tail n (Cons m a l) --> l.\n")
(rule,) = report.signature.rules_for("tail")
print("   accepted:", rule)
print("   typing substitution:",
      {v: str(t) for v, t in sorted(rule.mgts.items())})

print("\n2. Left sides must be higher-order patterns.")
CALCULUS = """
Real : Type.
sin : Real -> Real.
def D : (Real -> Real) -> Real -> Real.
"""
for rule_text in ["[f] D (x => sin (f x)) --> D f.",
                  "[f] D (x => f (sin x)) --> D f.",
                  "[y] D ((x => sin x) y) --> D sin."]:
    report = check_string(CALCULUS + rule_text + "\n")
    verdict = "accepted" if not report.errors else report.errors[0].line()
    print(f"   {rule_text:40} {verdict}")

print("\n3. A constraint between two computations needs a guard.")
GUARDED = VECTORS + "def f : nat -> nat.\nC : n : nat -> vector (f n).\n" \
    "def get : n : nat -> vector (f n) -> nat.\n"
for rule_text in ["[n, m] get n (C m) --> n.", "[n] get n (C {n}) --> n."]:
    report = check_string(GUARDED + rule_text + "\n")
    verdict = "accepted" if not report.errors else report.errors[0].line()
    print(f"   {rule_text:30} {verdict}")
