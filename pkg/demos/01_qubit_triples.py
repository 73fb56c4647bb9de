"""Qubit triples: the Pauli algebra, product frames, and reduced states."""
import numpy as np

from qubitfield import diagnostics as diag
from qubitfield.operators import embed_triple, partial_trace_rest, random_unitary, verify_triple

rng = np.random.default_rng(0)

# sigma_j (x) 1 on C^2 (x) C^(N/2) is the simplest triple
t = embed_triple(4)
print("embedded triple residual:", verify_triple(t).residual)

# any unitary conjugate is still a triple, just in a rotated frame
u = random_unitary(4, rng)
moved = t.conjugate(u)
print("conjugated triple residual:", verify_triple(moved).residual)

# the frame undoes the rotation: q_j -> sigma_j (x) 1
print("back in the product frame:", np.allclose(moved.to_frame(moved[2]), t[2]))

# scaling a triple breaks the algebra, and the residual says by how much
print("1% scaled triple residual:", verify_triple(t.q * 1.01).residual)

# a product state looks pure to the triple, a Bell state looks maximally mixed
rho = diag.product_state(moved, (0.0, 0.6, 0.8))
print("product Bloch vector:", diag.bloch_vector(rho, moved).round(12))
print("Bell Bloch vector:", diag.bloch_vector(diag.bell_state(moved), moved).round(12))

# the local density reproduces every expectation in span{1, q_j}
local = diag.local_density(rho, moved)
print("local density consistency:", local.consistency)
print("qubit marginal:\n", partial_trace_rest(moved, rho).round(3))
