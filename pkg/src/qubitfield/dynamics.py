"""Leapfrog evolution of ``(box + mu) q_j = 0`` and conserved-charge monitoring."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (
    Gradients,
    Lattice,
    ScalarField,
    analytic_gradients,
    ansatz_triple,
    space_derivative,
    time_derivative,
)
from .operators import EPS, dagger, is_hermitian, triple_residual
from .superops import omega_apply


def _laplacian_x(q, dx):
    return (np.roll(q, -1, axis=0) - 2 * q + np.roll(q, 1, axis=0)) / dx**2


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Slices ``q[n]`` at times ``t0 + n dt``; shape ``(steps + 2, nx, 3, N, N)``."""

    q: np.ndarray
    dt: float
    dx: float
    mu: float
    t0: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.q))

    @property
    def dq_t(self) -> np.ndarray:
        """Centered time derivative on slices 1..len-2."""
        return (self.q[2:] - self.q[:-2]) / (2 * self.dt)

    def algebra_drift(self) -> np.ndarray:
        """Worst Pauli-algebra residual per slice."""
        return triple_residual(self.q).max(axis=-1)


def evolve_type1(lat: Lattice, initial, mu: float, steps: int) -> Trajectory:
    """Leapfrog ``q^{n+1} = 2 q^n - q^{n-1} + dt^2 (d_xx q^n - mu q^n)``.

    ``initial`` is a pair of slices ``(q(t0), q(t0 + dt))`` of shape
    ``(nx, 3, N, N)``.  The update is a real linear combination, so Hermitian
    slices stay Hermitian.
    """
    q_prev, q_curr = (np.asarray(s, dtype=complex) for s in initial)
    if q_prev.shape != q_curr.shape or q_prev.shape[0] != lat.nx:
        raise ValueError("initial slices must both have shape (nx, 3, N, N)")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if not (is_hermitian(q_prev) and is_hermitian(q_curr)):
        raise ValueError("initial slices must be Hermitian")
    out = np.empty((steps + 2,) + q_prev.shape, dtype=complex)
    out[0], out[1] = q_prev, q_curr
    dt2 = lat.dt**2
    for n in range(1, steps + 1):
        out[n + 1] = 2 * out[n] - out[n - 1] + dt2 * (_laplacian_x(out[n], lat.dx) - mu * out[n])
    return Trajectory(out, lat.dt, lat.dx, mu)


def reverse(lat: Lattice, traj: Trajectory) -> Trajectory:
    """Run the same scheme backwards from the last two slices."""
    steps = len(traj.q) - 2
    return evolve_type1(lat, (traj.q[-1], traj.q[-2]), traj.mu, steps)


def energy_charge(q_slice, dq_slice, dx: float) -> np.ndarray:
    """``(i/8) sum_x dx (q_j dq_j - dq_j q_j)`` over a constant-t slice."""
    q = np.asarray(q_slice)
    dq = np.asarray(dq_slice)
    integrand = np.einsum("xjab,xjbc->ac", q, dq) - np.einsum("xjab,xjbc->ac", dq, q)
    return 0.125j * dx * integrand


def charge_series(traj: Trajectory) -> np.ndarray:
    """Energy charge on each slice that has a centered time derivative."""
    dq = traj.dq_t
    if not len(dq):
        n = traj.q.shape[-1]
        return np.empty((0, n, n), dtype=complex)
    return np.stack([energy_charge(traj.q[n + 1], dq[n], traj.dx) for n in range(len(dq))])


@dataclass(frozen=True)
class Type7Charge:
    omega2: np.ndarray  # (3, N, N)
    omega5: np.ndarray
    difference: float


def type7_charge(q_slice, dq_slice, dx: float) -> Type7Charge:
    """Slice integrals of ``Omega^2 d_t q_j`` and ``Omega^5 d_t q_j`` (maps taken at each site)."""
    q = np.asarray(q_slice)
    dq = np.asarray(dq_slice)
    c2 = dx * omega_apply(2, q, dq).sum(axis=0)
    c5 = dx * omega_apply(5, q, dq).sum(axis=0)
    return Type7Charge(c2, c5, float(np.linalg.norm(c2 - c5)))


def ansatz_initial_data(lat: Lattice, phi: ScalarField):
    """Exact ansatz slices at t = 0 and t = dt."""
    return ansatz_triple(phi.phi[0]), ansatz_triple(phi.phi[1])


def continuum_charge(phi: ScalarField, slice_index: int = 0) -> np.ndarray:
    """Energy charge of the ansatz using exact time derivatives."""
    g = analytic_gradients(phi)
    return energy_charge(g.q[slice_index], g.dq_t[slice_index], phi.lattice.dx)


@dataclass(frozen=True)
class ChargeRun:
    self_drift: float  # max_n ||E_n - E_first|| / ||E_first||
    continuum_deviation: float  # max_n ||E_n - E_exact|| / ||E_exact||
    hermiticity: float
    charge_norm: float
    steps: int


def charge_run(lat: Lattice, phi: ScalarField, crossings: float = 2.0, mu: float = 0.0) -> ChargeRun:
    """Evolve ansatz initial data for ``crossings`` box-crossing times and track the charge."""
    steps = int(round(crossings * lat.length / lat.dt))
    traj = evolve_type1(lat, ansatz_initial_data(lat, phi), mu, steps)
    charges = charge_series(traj)
    exact = continuum_charge(phi)
    ref = np.linalg.norm(exact)
    first = charges[0]
    drift = np.linalg.norm(charges - first, axis=(-2, -1)).max() / np.linalg.norm(first)
    dev = np.linalg.norm(charges - exact, axis=(-2, -1)).max() / ref
    herm = float(np.max(np.abs(traj.q - dagger(traj.q))))
    return ChargeRun(float(drift), float(dev), herm, float(ref), steps)


def divergence_identity_check(lat: Lattice, grads: Gradients) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of the two divergence identities, FD divergence of exact currents.

    ``grads`` holds exact q, d_mu q and box q on every slice.  Returns per-site
    norms on interior slices of

    * ``d^mu (d_mu q_j q_j) - (box q_j q_j - q_j box q_j) / 2``
    * ``d^mu (eps_jkl q_j d_mu q_k q_l)``
    """
    q, qt, qx, box = grads.q, grads.dq_t, grads.dq_x, grads.box
    cur_t = np.einsum("...jab,...jbc->...ac", qt, q)
    cur_x = np.einsum("...jab,...jbc->...ac", qx, q)
    div = time_derivative(lat, cur_t) - space_derivative(lat, cur_x)[1:-1]
    target = 0.5 * (
        np.einsum("...jab,...jbc->...ac", box, q) - np.einsum("...jab,...jbc->...ac", q, box)
    )[1:-1]
    first = np.linalg.norm(div - target, axis=(-2, -1))

    def eps_current(d):
        return np.einsum("jkl,...jab,...kbc,...lcd->...ad", EPS, q, d, q)

    div2 = time_derivative(lat, eps_current(qt)) - space_derivative(lat, eps_current(qx))[1:-1]
    second = np.linalg.norm(div2, axis=(-2, -1))
    return first, second
