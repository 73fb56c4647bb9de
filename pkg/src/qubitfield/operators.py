"""Dense operator toolkit: Pauli matrices, qubit triples, product frames.

Conventions used throughout the package:

* epsilon_{123} = +1, internal indices are raised and lowered with the
  identity metric, so ``q^j == q_j``.
* Triples are stored as complex arrays of shape ``(..., 3, N, N)``; leading
  axes (lattice sites) broadcast through every routine that accepts them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.stats import unitary_group

DEFAULT_TOL = 1e-10

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)


def _levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for (i, j, k), sign in {
        (0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
        (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1,
    }.items():
        eps[i, j, k] = sign
    return eps


EPS = _levi_civita()


class NonHermitianError(ValueError):
    """An operator that must be Hermitian is not."""


class AlgebraCheck(NamedTuple):
    residual: float
    passed: bool


def pauli(j: int) -> np.ndarray:
    """Return sigma_j for j in {1, 2, 3}."""
    if j not in (1, 2, 3):
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {j!r}")
    return SIGMA[j - 1].copy()


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def _check_same_shape(a, b):
    if np.shape(a)[-2:] != np.shape(b)[-2:]:
        raise ValueError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def commutator(a, b) -> np.ndarray:
    _check_same_shape(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    _check_same_shape(a, b)
    return a @ b + b @ a


def dagger(a) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def random_hermitian(n: int, rng: np.random.Generator, size=()) -> np.ndarray:
    """Gaussian Hermitian matrices (GUE-like, unit-scale entries)."""
    shape = (size,) if isinstance(size, int) else tuple(size)
    x =rng.normal(size=shape + (n, n)) + 1j * rng.normal(size=shape + (n, n))
    return (x + dagger(x)) / 2


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random n x n unitary."""
    return unitary_group.rvs(n, random_state=rng)


def embed_triple(n: int) -> "QubitTriple":
    """The standard triple ``sigma_j (x) I_{n/2}``."""
    if n < 2 or n % 2:
        raise ValueError(f"triple dimension must be an even integer >= 2, got {n!r}")
    return QubitTriple(np.stack([np.kron(s, np.eye(n // 2)) for s in SIGMA]))


def triple_residual(q) -> np.ndarray:
    """Per-site max over (j, k) of ``||q_j q_k - delta_jk 1 - i eps_jkl q_l||_2``.

    ``q`` has shape ``(..., 3, N, N)``; the result has shape ``(...)``.
    """
    q = np.asarray(q)
    n = q.shape[-1]
    prod = np.einsum("...jab,...kbc->...jkac", q, q)
    target = np.einsum("jk,ab->jkab", np.eye(3), np.eye(n)) + 1j * np.einsum(
        "jkl,...lab->...jkab", EPS, q
    )
    norms = np.linalg.norm(prod - target, ord=2, axis=(-2, -1))
    return norms.max(axis=(-2, -1))


@dataclass(frozen=True, eq=False)
class QubitTriple:
    """Three N x N Hermitian operators obeying the Pauli algebra at one event."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=complex)
        if q.ndim != 3 or q.shape[0] != 3 or q.shape[1] != q.shape[2]:
            raise ValueError(f"triple must have shape (3, N, N), got {q.shape}")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def dim(self) -> int:
        return self.q.shape[-1]

    def __getitem__(self, j: int) -> np.ndarray:
        return self.q[j]

    def conjugate(self, u) -> "QubitTriple":
        """The triple ``u^dagger q_j u``."""
        u = np.asarray(u)
        return QubitTriple(dagger(u) @ self.q @ u)

    @cached_property
    def frame(self) -> np.ndarray:
        """Unitary V with ``V^dagger q_j V == sigma_j (x) I``.

        Columns are an orthonormal basis E of the +1 eigenspace of q_3
        followed by q_1 E.
        """
        n = self.dim
        w, v = np.linalg.eigh(self.q[2])
        plus = v[:, w > 0]
        if plus.shape[1] != n // 2:
            raise ValueError("q_3 does not have a balanced +/-1 spectrum")
        return np.hstack([plus, self.q[0] @ plus])

    def to_frame(self, a) -> np.ndarray:
        """Express an operator in the product frame of this triple."""
        v = self.frame
        return dagger(v) @ np.asarray(a) @ v

    def from_frame(self, a) -> np.ndarray:
        v = self.frame
        return v @ np.asarray(a) @ dagger(v)


def verify_triple(t: QubitTriple | np.ndarray, tol: float = DEFAULT_TOL) -> AlgebraCheck:
    """Check the Pauli algebra; raises NonHermitianError before testing it."""
    q = t.q if isinstance(t, QubitTriple) else np.asarray(t)
    for j in range(3):
        if not is_hermitian(q[j], tol):
            raise NonHermitianError(f"q_{j + 1} is not Hermitian")
    r = float(triple_residual(q))
    return AlgebraCheck(r, r <= tol)


@dataclass(frozen=True)
class ProductDecomposition:
    """``A = I (x) a0 + sigma_j (x) a[j]`` in a triple's product frame."""

    a0: np.ndarray
    a: np.ndarray

    def reconstruct(self) -> np.ndarray:
        out = np.kron(IDENTITY2, self.a0)
        for j in range(3):
            out = out + np.kron(SIGMA[j], self.a[j])
        return out


def _qubit_trace(a: np.ndarray) -> np.ndarray:
    """Trace over the leading 2-dim factor of a (2m x 2m) matrix."""
    m = a.shape[-1] // 2
    return np.einsum("arab->rb", a.reshape(2, m, 2, m))


def decompose(t: QubitTriple, a) -> ProductDecomposition:
    a = np.asarray(a)
    _check_same_shape(a, t.q[0])
    af = t.to_frame(a)
    a0 = _qubit_trace(af) / 2
    aj = np.stack([_qubit_trace(np.kron(s, np.eye(t.dim // 2)) @ af) / 2 for s in SIGMA])
    return ProductDecomposition(a0, aj)


def partial_trace_rest(t: QubitTriple, a) -> np.ndarray:
    """Trace out the (N/2)-dim cofactor of the triple's product frame.

    Returns the 2 x 2 matrix m with ``Tr(A (sigma_a (x) I)) == Tr(m sigma_a)``
    for sigma_a in {I, sigma_1, sigma_2, sigma_3}.
    """
    a = np.asarray(a)
    _check_same_shape(a, t.q[0])
    m = np.trace(a) * IDENTITY2
    for j in range(3):
        m = m + np.trace(a @ t.q[j]) * SIGMA[j]
    return m / 2
