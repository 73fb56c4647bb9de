"""Flat 1+1 lattice fields: harmonic scalars, the swap-power ansatz, gauge and
Hamiltonian fields, and residuals of the field identities.

Signature is (+, -): ``box = d_t^2 - d_x^2`` and ``a_mu b^mu = a_t b_t - a_x b_x``.
Fields are arrays indexed ``[t, x, ...]``; x is periodic.  Finite-difference
results that need time neighbours live on the interior slices ``1..nt-2`` and
are returned with ``nt - 2`` leading entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import EPS, IDENTITY2, SIGMA, dagger, triple_residual
from .superops import SINGLET_PROJECTOR, omega_combination, project_commutant, swap_power


class CFLError(ValueError):
    pass


@dataclass(frozen=True)
class Lattice:
    nt: int
    nx: int
    dt: float
    dx: float

    def __post_init__(self):
        if self.nt < 4 or self.nx < 4:
            raise ValueError(f"lattice needs nt, nx >= 4, got {self.nt} x {self.nx}")
        if self.dt <= 0 or self.dx <= 0:
            raise ValueError("spacings must be positive")
        if self.dt > self.dx * (1 + 1e-12):
            raise CFLError(f"dt/dx = {self.dt / self.dx:.3g} exceeds 1")

    @property
    def length(self) -> float:
        return self.nx * self.dx

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.nt) * self.dt

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    def refine(self) -> "Lattice":
        """Halve both spacings over the same time span; coarse site (n, i) is fine (2n, 2i)."""
        return Lattice(2 * self.nt - 1, 2 * self.nx, self.dt / 2, self.dx / 2)


# --- scalar fields ----------------------------------------------------------

@dataclass(frozen=True)
class Mode:
    """``amplitude * cos(wavenumber * (x - direction * t) + phase)``; direction +1 moves right."""

    amplitude: float
    wavenumber: float
    direction: int = 1
    phase: float = 0.0

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")


@dataclass(frozen=True, eq=False)
class ScalarField:
    lattice: Lattice
    phi: np.ndarray
    dphi_t: np.ndarray | None = None
    dphi_x: np.ndarray | None = None
    box: np.ndarray | None = None
    modes: tuple = ()
    slope_x: float = 0.0
    slope_t: float = 0.0

    @property
    def analytic(self) -> bool:
        return self.dphi_t is not None

    @property
    def grad_squared(self) -> np.ndarray:
        self._need_analytic()
        return self.dphi_t**2 - self.dphi_x**2

    def _need_analytic(self):
        if not self.analytic:
            raise ValueError("scalar field carries no analytic derivative data")

    def on(self, lattice: Lattice) -> "ScalarField":
        """Resample the same continuum field on another lattice."""
        self._need_analytic()
        return harmonic_scalar(lattice, self.modes, self.slope_x, self.slope_t)


def harmonic_scalar(
    lat: Lattice,
    modes: Sequence[Mode] = (),
    slope_x: float = 0.0,
    slope_t: float = 0.0,
) -> ScalarField:
    """Sampled continuum solution of ``box phi = 0``.

    ``phi = sum of travelling cosines + slope_x * x + slope_t * t``.  The
    swap-power ansatz depends on phi mod 2, so a linear ramp is allowed when
    ``slope_x * L`` is an even integer.
    """
    modes = tuple(m if isinstance(m, Mode) else Mode(*m) for m in modes)
    length = lat.length
    for m in modes:
        winding = m.wavenumber * length / (2 * np.pi)
        if abs(winding - round(winding)) > 1e-9:
            raise ValueError(f"wavenumber {m.wavenumber} is not commensurate with L={length}")
    ramp = slope_x * length / 2
    if abs(ramp - round(ramp)) > 1e-9:
        raise ValueError(f"slope_x * L must be an even integer, got {slope_x * length}")

    t, x = np.meshgrid(lat.t, lat.x, indexing="ij")
    phi = slope_x * x + slope_t * t
    dphi_t = np.full_like(phi, slope_t)
    dphi_x = np.full_like(phi, slope_x)
    for m in modes:
        arg = m.wavenumber * (x - m.direction * t) + m.phase
        phi = phi + m.amplitude * np.cos(arg)
        s = -m.amplitude * m.wavenumber * np.sin(arg)
        dphi_x = dphi_x + s
        dphi_t = dphi_t - m.direction * s
    return ScalarField(lat, phi, dphi_t, dphi_x, np.zeros_like(phi), modes, slope_x, slope_t)


def standing_wave(lat: Lattice, amplitude: float = 0.5, mode_number: int = 1) -> ScalarField:
    """``amplitude * cos(k x) cos(k t)`` built from two counter-propagating modes."""
    k = 2 * np.pi * mode_number / lat.length
    return harmonic_scalar(lat, [Mode(amplitude / 2, k, 1), Mode(amplitude / 2, k, -1)])


# --- finite differences ---------------------------------------------------------

def _need_time(lat: Lattice, f):
    if np.shape(f)[0] != lat.nt or np.shape(f)[1] != lat.nx:
        raise ValueError(f"field shape {np.shape(f)[:2]} does not match lattice {lat.nt}x{lat.nx}")


def time_derivative(lat: Lattice, f) -> np.ndarray:
    """Central difference in t on interior slices."""
    _need_time(lat, f)
    return (f[2:] - f[:-2]) / (2 * lat.dt)


def space_derivative(lat: Lattice, f) -> np.ndarray:
    """Periodic central difference in x on every slice."""
    return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * lat.dx)


def dalembertian(lat: Lattice, f) -> np.ndarray:
    """``d_t^2 f - d_x^2 f`` with second-order central stencils, interior slices only."""
    f = np.asarray(f)
    _need_time(lat, f)
    ftt = (f[2:] - 2 * f[1:-1] + f[:-2]) / lat.dt**2
    fxx = (np.roll(f, -1, axis=1) - 2 * f + np.roll(f, 1, axis=1))[1:-1] / lat.dx**2
    return ftt - fxx


@dataclass(frozen=True, eq=False)
class Gradients:
    """Derivatives of a triple field on interior slices, with q itself there."""

    q: np.ndarray
    dq_t: np.ndarray
    dq_x: np.ndarray
    box: np.ndarray


def fd_gradients(lat: Lattice, q) -> Gradients:
    q = np.asarray(q)
    return Gradients(q[1:-1], time_derivative(lat, q), space_derivative(lat, q)[1:-1], dalembertian(lat, q))


# --- the swap-power ansatz -------------------------------------------------------

_I4_SIGMA = np.stack([np.kron(IDENTITY2, s) for s in SIGMA])  # I (x) sigma_j
_SIGMA_I4 = np.stack([np.kron(s, IDENTITY2) for s in SIGMA])  # sigma_j (x) I
_EPS_SS = np.einsum("jkl,kab,lcd->jacbd", EPS, SIGMA, SIGMA).reshape(3, 4, 4)  # eps_jkl s_k (x) s_l
_DIFF = _I4_SIGMA - _SIGMA_I4


def _trig(phi):
    phi = np.asarray(phi, dtype=float)[..., None, None, None]
    return np.cos(np.pi * phi), np.sin(np.pi * phi)


def ansatz_triple(phi) -> np.ndarray:
    """Closed-form ``W^{-phi} (sigma_j (x) I) W^{phi}``; shape ``phi.shape + (3, 4, 4)``."""
    c, s = _trig(phi)
    return 0.5 * ((1 - c) * _I4_SIGMA + (1 + c) * _SIGMA_I4 - s * _EPS_SS)


def ansatz_phi_derivatives(phi) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of the ansatz triple with respect to phi."""
    c, s = _trig(phi)
    first = 0.5 * np.pi * (s * _DIFF - c * _EPS_SS)
    second = 0.5 * np.pi**2 * (c * _DIFF + s * _EPS_SS)
    return first, second


@dataclass(frozen=True, eq=False)
class LatticeQubitField:
    lattice: Lattice
    q: np.ndarray

    @property
    def dim(self) -> int:
        return self.q.shape[-1]

    def algebra_residuals(self) -> np.ndarray:
        return triple_residual(self.q)


def ansatz_field(lat: Lattice, phi: ScalarField) -> LatticeQubitField:
    return LatticeQubitField(lat, ansatz_triple(phi.phi))


def analytic_gradients(phi: ScalarField) -> Gradients:
    """Exact derivatives of the ansatz field on all slices (chain rule through phi)."""
    phi._need_analytic()
    first, _ = ansatz_phi_derivatives(phi.phi)
    dt = phi.dphi_t[..., None, None, None] * first
    dx = phi.dphi_x[..., None, None, None] * first
    return Gradients(ansatz_triple(phi.phi), dt, dx, analytic_box_ansatz(phi))


def analytic_box_ansatz(phi: ScalarField) -> np.ndarray:
    """Closed-form box of the ansatz: a term in box(phi) plus a term in grad(phi)^2."""
    phi._need_analytic()
    c, s = _trig(phi.phi)
    box_phi = phi.box[..., None, None, None]
    grad2 = phi.grad_squared[..., None, None, None]
    return (
        0.5 * np.pi * (s * _DIFF - c * _EPS_SS) * box_phi
        + 0.5 * np.pi**2 * (c * _DIFF + s * _EPS_SS) * grad2
    )


# --- gauge potential and Hamiltonian field ------------------------------------

@dataclass(frozen=True, eq=False)
class GaugeField:
    u: np.ndarray
    j_t: np.ndarray
    j_x: np.ndarray


def gauge_potential(lat: Lattice, phi: ScalarField) -> GaugeField:
    """``U = W^phi`` per site and ``J_mu = -i dU^dagger/dmu U = -pi d_mu(phi) P_-``."""
    phi._need_analytic()
    u = swap_power(phi.phi)
    j_t = -np.pi * phi.dphi_t[..., None, None] * SINGLET_PROJECTOR
    j_x = -np.pi * phi.dphi_x[..., None, None] * SINGLET_PROJECTOR
    return GaugeField(u, j_t, j_x)


def _comm(a, b):
    return a @ b - b @ a


def _max_norm(a) -> float:
    return float(np.max(np.linalg.norm(a, axis=(-2, -1)), initial=0.0))


def gauge_identity_residuals(lat: Lattice, phi: ScalarField) -> dict[str, float]:
    """Residuals of the unitary-relatedness identities for the ansatz.

    * ``unitarity``: ``max ||U^dagger U - 1||``
    * ``reconstruction``: ``q_j`` vs ``U^dagger (sigma_j (x) I) U``
    * ``generator_t``, ``generator_x``: FD ``d_mu q_j`` vs ``i [J_mu, q_j]``
    * ``curl``: ``[J_t, J_x] - i (d_x J_t - d_t J_x)`` (FD derivatives)
    """
    g = gauge_potential(lat, phi)
    q = ansatz_triple(phi.phi)
    u = g.u[..., None, :, :]
    rebuilt = dagger(u) @ _SIGMA_I4 @ u
    grads = fd_gradients(lat, q)
    jt = g.j_t[1:-1, :, None]
    jx = g.j_x[1:-1, :, None]
    lhs_curl = _comm(g.j_t, g.j_x)[1:-1]
    rhs_curl = 1j * (space_derivative(lat, g.j_t)[1:-1] - time_derivative(lat, g.j_x))
    return {
        "unitarity": _max_norm(dagger(g.u) @ g.u - np.eye(4)),
        "reconstruction": _max_norm(rebuilt - q),
        "generator_t": _max_norm(grads.dq_t - 1j * _comm(jt, grads.q)),
        "generator_x": _max_norm(grads.dq_x - 1j * _comm(jx, grads.q)),
        "curl": _max_norm(lhs_curl - rhs_curl),
    }


@dataclass(frozen=True, eq=False)
class HamiltonianField:
    """``H_mu`` on the slices of the gradients it was built from."""

    h_t: np.ndarray
    h_x: np.ndarray
    asymmetry: float = 0.0


def hamiltonian_from_gradients(grads: Gradients) -> HamiltonianField:
    """``H_mu = -(i/4) d_mu q_j q_j``, symmetrized; the removed anti-Hermitian norm is kept."""
    raw_t = -0.25j * np.einsum("...jab,...jbc->...ac", grads.dq_t, grads.q)
    raw_x = -0.25j * np.einsum("...jab,...jbc->...ac", grads.dq_x, grads.q)
    asym = max(_max_norm(raw_t - dagger(raw_t)), _max_norm(raw_x - dagger(raw_x)))
    return HamiltonianField(
        (raw_t + dagger(raw_t)) / 2,
        (raw_x + dagger(raw_x)) / 2,
        asym,
    )


def hamiltonian_field(lat: Lattice, field_: LatticeQubitField) -> HamiltonianField:
    """Central-difference Hamiltonian field on interior slices."""
    return hamiltonian_from_gradients(fd_gradients(lat, field_.q))


def hamiltonian_identity_residuals(grads: Gradients, ham: HamiltonianField) -> dict[str, float]:
    """``d_mu q_j - i [H_mu, q_j]`` and the commutant part of ``H_mu``."""
    return {
        "generator_t": _max_norm(grads.dq_t - 1j * _comm(ham.h_t[..., None, :, :], grads.q)),
        "generator_x": _max_norm(grads.dq_x - 1j * _comm(ham.h_x[..., None, :, :], grads.q)),
        "commutant_t": _max_norm(project_commutant(grads.q, ham.h_t)),
        "commutant_x": _max_norm(project_commutant(grads.q, ham.h_x)),
    }


# --- equation-of-motion and identity residuals --------------------------------

def eom_residual(q, box, lam, mu: float = 0.0) -> np.ndarray:
    """Frobenius norms of ``lam_a Omega^a box q_j + mu q_j`` per site and component."""
    r = omega_combination(lam, q, box) + mu * np.asarray(q)
    return np.linalg.norm(r, axis=(-2, -1))


def best_mass_residual(q, box) -> tuple[float, float]:
    """Minimize ``||box q + mu q||`` over mu (least squares over the whole field)."""
    q = np.asarray(q)
    box = np.asarray(box)
    mu = -float(np.real(np.vdot(q, box)) / np.real(np.vdot(q, q)))
    res = np.linalg.norm(box + mu * q) / np.sqrt(q[..., 0, 0, 0].size)
    return mu, float(res)


def first_derivative_identity_residual(grads: Gradients) -> np.ndarray:
    """Per-site max over (j, k) of the first-derivative elimination identity.

    ``d q_j . d q_k - (i eps_jkl box q_l - box q_j q_k - q_j box q_k) / 2``
    """
    q, b = grads.q, grads.box
    lhs = np.einsum("...jab,...kbc->...jkac", grads.dq_t, grads.dq_t) - np.einsum(
        "...jab,...kbc->...jkac", grads.dq_x, grads.dq_x
    )
    rhs = 0.5 * (
        1j * np.einsum("jkl,...lab->...jkab", EPS, b)
        - np.einsum("...jab,...kbc->...jkac", b, q)
        - np.einsum("...jab,...kbc->...jkac", q, b)
    )
    return np.linalg.norm(lhs - rhs, axis=(-2, -1)).max(axis=(-2, -1))


ANSATZ_LAMBDA = (0, 0, 1, 0, 0, 1)


def general_ansatz_lambda(l1: float, l2: float) -> tuple:
    """Coefficients of ``l1 (2 - Omega^3 - Omega^4) + l2 (Omega^2 + Omega^5)``."""
    return (2 * l1, 0, l2, -l1, -l1, l2)


@dataclass(frozen=True)
class ExplicitFormComparison:
    explicit_norm: np.ndarray
    omega_norm: np.ndarray
    constant: complex
    mismatch: float
    antisymmetrization: str = "unit weight: [k j] -> (k j) - (j k)"


def explicit_form(q, box) -> np.ndarray:
    """``{q_k, [q_k, B_j] - [q_j, B_k]}`` summed over k."""
    q = np.asarray(q)
    b = np.asarray(box)
    qk_bj = np.einsum("...kab,...jbc->...kjac", q, b)
    bj_qk = np.einsum("...jab,...kbc->...kjac", b, q)
    comm_kj = qk_bj - bj_qk  # [q_k, B_j]
    comm_jk = np.swapaxes(comm_kj, -3, -4)  # [q_j, B_k] at index (k, j)
    inner = comm_kj - comm_jk
    outer = np.einsum("...kab,...kjbc->...jac", q, inner) + np.einsum("...kjab,...kbc->...jac", inner, q)
    return outer


def explicit_form_equivalence(q, box) -> ExplicitFormComparison:
    """Compare the explicit anticommutator form with ``(Omega^2 + Omega^5) box q_j``.

    The proportionality constant is fitted over the whole field; ``mismatch``
    is the relative residual after removing it.
    """
    e = explicit_form(q, box)
    o = omega_combination(ANSATZ_LAMBDA, q, box)
    oo = np.vdot(o, o)
    const = np.vdot(o, e) / oo if abs(oo) > 0 else 0j
    scale = max(np.linalg.norm(e), 1e-300)
    mismatch = float(np.linalg.norm(e - const * o) / scale) if np.linalg.norm(e) > 0 else 0.0
    return ExplicitFormComparison(
        np.linalg.norm(e, axis=(-2, -1)).max(axis=-1),
        np.linalg.norm(o, axis=(-2, -1)).max(axis=-1),
        complex(const),
        mismatch,
    )


EXPLICIT_FORM_CONSTANT = -1j  # explicit form == -i (Omega^2 + Omega^5) B with unit-weight antisymmetrization
