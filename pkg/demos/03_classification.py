"""Equation-of-motion types from the exact determinant polynomial."""
from qubitfield.classify import (
    ANSATZ_OPERATOR,
    EomSpec,
    classify,
    determinant_polynomial,
    equivalent_type1_reduction,
    factorize,
    lagrangian_operator_crosscheck,
)
from qubitfield.operators import embed_triple
from qubitfield.superops import extract_structure_constants

sc = extract_structure_constants(embed_triple(4), seed=0)
poly = determinant_polynomial(sc)  # exact integers, Bareiss + interpolation
fact = factorize(poly)
for line in fact.report()["factors"]:
    print("factor:", line)
print("quadratic differs from the printed one on:", fact.quadratic_diff)

for lam in [(1, 0, 0, 0, 0, 0), (1, 1, 0, 0, 0, 0), ANSATZ_OPERATOR]:
    v = classify(EomSpec(lam), fact)
    print(lam, "->", v.type, "(printed factors give", v.printed_type + ")")

# an invertible operator is a plain wave equation in disguise
print(equivalent_type1_reduction(EomSpec((0, 1, 0, 0, 0, 0), mu=2.0), sc))

rows = lagrangian_operator_crosscheck(fact)
print("Lagrangian operators agreeing with their labels:", sum(r["agree"] for r in rows), "/", len(rows))
