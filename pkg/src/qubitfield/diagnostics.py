"""Global density operators seen through a local qubit triple.

Local density, the product-state witness D, and stationarity tests.  Every
routine accepts a single triple ``(3, N, N)`` or a field of them
``(..., 3, N, N)``; the density operator is one global ``(N, N)`` matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import EPS, SIGMA, NonHermitianError, QubitTriple, dagger, is_hermitian

DEFAULT_WITNESS_THRESHOLD = 1e-8


class EntangledStateError(ValueError):
    """The witness does not vanish where a product state is required."""


def _q(t) -> np.ndarray:
    return t.q if isinstance(t, QubitTriple) else np.asarray(t)


def check_density(rho, tol: float = 1e-12) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, tol):
        raise NonHermitianError("density operator is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise ValueError(f"density operator has trace {np.trace(rho).real:.6g}")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density operator is not positive semidefinite")
    return rho


# --- states -------------------------------------------------------------------

def maximally_mixed(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex) / n


def bloch_state(bloch) -> np.ndarray:
    m = np.asarray(bloch, dtype=float)
    if m.shape != (3,) or np.linalg.norm(m) > 1 + 1e-12:
        raise ValueError("Bloch vector must have three entries and length <= 1")
    return 0.5 * (np.eye(2) + np.einsum("j,jab->ab", m, SIGMA))


def product_state(t: QubitTriple, bloch, rest=None) -> np.ndarray:
    """``rho_qubit(bloch) (x) rest`` in the product frame of ``t``."""
    half = t.dim // 2
    rest = np.eye(half) / half if rest is None else np.asarray(rest)
    return t.from_frame(np.kron(bloch_state(bloch), rest))


def bell_state(t: QubitTriple) -> np.ndarray:
    """Maximally entangled pure state between the qubit and one level pair of the rest."""
    half = t.dim // 2
    if half < 2:
        raise ValueError("no cofactor to entangle with at N = 2")
    psi = np.zeros(t.dim, dtype=complex)
    psi[0] = psi[half + 1] = 1 / np.sqrt(2)  # |0>|0> + |1>|1>
    return t.from_frame(np.outer(psi, psi.conj()))


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = g @ dagger(g)
    return rho / np.trace(rho)


def random_product_state(t: QubitTriple, rng: np.random.Generator) -> np.ndarray:
    return t.from_frame(np.kron(random_density(2, rng), random_density(t.dim // 2, rng)))


def random_pure_state(n: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


# --- expectation values and local state --------------------------------------------

def expectation(rho, a, tol: float = 1e-12) -> float:
    """``Tr(A rho)`` for Hermitian A; the imaginary part must vanish."""
    a = np.asarray(a)
    if not is_hermitian(a, 1e-10):
        raise NonHermitianError("observable is not Hermitian")
    val = np.trace(a @ np.asarray(rho))
    scale = max(1.0, float(np.linalg.norm(a)))
    if abs(val.imag) > tol * scale:
        raise ValueError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def bloch_vector(rho, t) -> np.ndarray:
    """``<q_j>`` per site, shape ``(..., 3)``."""
    return np.einsum("...jab,ba->...j", _q(t), np.asarray(rho)).real


@dataclass(frozen=True, eq=False)
class LocalDensity:
    rho_local: np.ndarray
    bloch: np.ndarray
    consistency: float  # worst mismatch of normalized local vs global expectations


def local_density(rho, t) -> LocalDensity:
    """``(1 + <q_j> q_j) / 2`` with its expectation-value consistency measured."""
    q = _q(t)
    m = bloch_vector(rho, q)
    n = q.shape[-1]
    eye = np.eye(n)
    rl = 0.5 * (eye + np.einsum("...j,...jab->...ab", m, q))
    norm = np.trace(rl, axis1=-2, axis2=-1).real
    basis = [np.broadcast_to(eye, q.shape[:-3] + (n, n))] + [q[..., j, :, :] for j in range(3)]
    worst = 0.0
    for obs in basis:
        local = np.trace(obs @ rl, axis1=-2, axis2=-1) / norm
        glob = np.trace(obs @ np.asarray(rho), axis1=-2, axis2=-1)
        worst = max(worst, float(np.max(np.abs(local - glob))))
    return LocalDensity(rl, m, worst)


def _witness(rho, q, m) -> np.ndarray:
    sandwich = np.einsum("...jab,bc,...jcd->...ad", q, rho, q)
    anti = q @ rho + rho @ q
    twisted = 1j * np.einsum("jkl,...lab,bc,...kcd->...jad", EPS, q, rho, q)
    return 3 * rho - sandwich - np.einsum("...j,...jab->...ab", m, anti + twisted)


def entanglement_witness(rho, t) -> tuple[np.ndarray, np.ndarray]:
    """``D = 3 rho - q_j rho q_j - ({q_j, rho} + i eps_jkl q_l rho q_k) Tr(rho q_j)``.

    Vanishes exactly when rho factorizes across the triple's product split.
    Returns ``(D, ||D||_F)``.
    """
    q = _q(t)
    rho = np.asarray(rho)
    d = _witness(rho, q, bloch_vector(rho, q))
    return d, np.linalg.norm(d, axis=(-2, -1))


def commutator_expectations(rho, h, t) -> np.ndarray:
    """``<[H, q_j]>`` per site; purely imaginary for Hermitian H."""
    q = _q(t)
    h = np.asarray(h)[..., None, :, :]
    comm = h @ q - q @ h
    return np.einsum("...jab,ba->...j", comm, np.asarray(rho))


def stationarity_check(rho, h_t, h_x, t, n) -> np.ndarray:
    """``max_j |n^mu <[H_mu, q_j]>|`` for direction ``n = (n_t, n_x)``."""
    nt, nx = n
    vals = nt * commutator_expectations(rho, h_t, t) + nx * commutator_expectations(rho, h_x, t)
    return np.abs(vals).max(axis=-1)


def witness_derivative_identity(
    rho,
    q_field,
    h_field,
    site: tuple[int, int],
    direction: str,
    spacing: float,
    threshold: float = DEFAULT_WITNESS_THRESHOLD,
    hold_weights: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of ``Tr(q_m d_mu D) = 4i <[H_mu, q_m]>`` at a product-state site.

    ``q_field`` is indexed ``[t, x]`` on the full lattice; ``h_field`` is the
    matching ``H_mu`` at the site.  ``d_mu D`` is a central difference along
    ``direction`` ('t' or 'x', x periodic).

    With ``hold_weights`` the scalar weights ``Tr(rho q_j)`` stay at their
    value at the site and only the operator entries of D are differenced.
    The total derivative is available with ``hold_weights=False``; its left
    side tends to zero at second order, since ``Tr(q_m D) = 0`` for every rho
    and D itself vanishes at the site.
    """
    ti, xi = site
    q_field = np.asarray(q_field)
    rho = np.asarray(rho)
    q = q_field[ti, xi]
    _, norm = entanglement_witness(rho, q)
    if norm > threshold:
        raise EntangledStateError(f"witness norm {norm:.3e} exceeds {threshold:.1e} at site {site}")
    if direction == "t":
        if not 0 < ti < q_field.shape[0] - 1:
            raise ValueError("time derivative needs an interior slice")
        plus, minus = q_field[ti + 1, xi], q_field[ti - 1, xi]
    elif direction == "x":
        nx = q_field.shape[1]
        plus, minus = q_field[ti, (xi + 1) % nx], q_field[ti, (xi - 1) % nx]
    else:
        raise ValueError("direction must be 't' or 'x'")
    if hold_weights:
        m = bloch_vector(rho, q)
        d_plus, d_minus = _witness(rho, plus, m), _witness(rho, minus, m)
    else:
        d_plus, d_minus = entanglement_witness(rho, plus)[0], entanglement_witness(rho, minus)[0]
    dd = (d_plus - d_minus) / (2 * spacing)
    lhs = np.einsum("jab,ba->j", q, dd)
    rhs = 4j * commutator_expectations(rho, h_field, q)
    return lhs, rhs
