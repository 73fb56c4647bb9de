"""The six Omega maps, their action on the triple, and their composition table."""
import numpy as np

from qubitfield.operators import embed_triple, random_unitary
from qubitfield.superops import (
    associativity_violations,
    extract_structure_constants,
    monoid_inverse,
    omega_apply,
    omega_matrix,
    omega_on_qtriple_table,
)

rng = np.random.default_rng(1)
t = embed_triple(4).conjugate(random_unitary(4, rng))

# each map sends the triple to a multiple of itself
print("Omega^a q = e_a q with e =", omega_on_qtriple_table(t))

# compositions close on the span with integer coefficients
sc = extract_structure_constants(embed_triple(4), seed=0)
print("composition table matches the printed one:", f"{sum(sc.table_match.values())}/36")
print("reading:", sc.convention)
print("associativity violations:", associativity_violations(sc.c))
print("Omega^2 o Omega^2 =", sc.c[2, 2])

# not every element has an inverse
print("inverse of Omega^1:", monoid_inverse([0, 1, 0, 0, 0, 0], sc))
print("inverse of Omega^0 + Omega^1:", monoid_inverse([1, 1, 0, 0, 0, 0], sc))

# at N = 2 Omega^1 is -1 on the triple, +3 only on the identity triple
t2 = embed_triple(2)
ident = np.broadcast_to(np.eye(2), (3, 2, 2))
print("N=2, Omega^1 q / q:", omega_on_qtriple_table(t2)[1])
print("N=2, Omega^1 on identity triple:", omega_apply(1, t2, ident)[0, 0, 0].real)
print("N=2, ||Omega^1 - 3 Omega^0||:", np.linalg.norm(omega_matrix(1, t2) - 3 * omega_matrix(0, t2), 2))
