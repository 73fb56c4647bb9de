import numpy as np
import pytest

from qubitfield.lattice import (
    ANSATZ_LAMBDA,
    EXPLICIT_FORM_CONSTANT,
    CFLError,
    Lattice,
    Mode,
    analytic_box_ansatz,
    analytic_gradients,
    ansatz_field,
    ansatz_phi_derivatives,
    ansatz_triple,
    best_mass_residual,
    dalembertian,
    eom_residual,
    explicit_form,
    explicit_form_equivalence,
    fd_gradients,
    first_derivative_identity_residual,
    gauge_identity_residuals,
    general_ansatz_lambda,
    hamiltonian_field,
    hamiltonian_from_gradients,
    hamiltonian_identity_residuals,
    harmonic_scalar,
    space_derivative,
    standing_wave,
    time_derivative,
)
from qubitfield.operators import SIGMA, random_hermitian
from qubitfield.superops import omega_apply, omega_combination, swap_conjugate


def lattice(n):
    return Lattice(n, n, 0.5 / n, 1.0 / n)


def orders(errors):
    e = np.asarray(errors)
    return np.log2(e[:-1] / e[1:])


SIZES = (32, 64, 128)


def test_lattice_validation():
    with pytest.raises(CFLError):
        Lattice(8, 8, 0.2, 0.1)
    with pytest.raises(ValueError):
        Lattice(3, 8, 0.01, 0.1)
    lat = Lattice(5, 8, 0.05, 0.1)
    assert lat.length == pytest.approx(0.8)
    assert lat.refine() == Lattice(9, 16, 0.025, 0.05)
    assert lat.refine().t[-1] == pytest.approx(lat.t[-1])


def test_scalar_checks_commensurability():
    lat = lattice(16)
    with pytest.raises(ValueError):
        harmonic_scalar(lat, [Mode(1.0, 3.0, 1)])
    with pytest.raises(ValueError):
        harmonic_scalar(lat, slope_x=1.0)
    with pytest.raises(ValueError):
        Mode(1.0, 2 * np.pi, 0)


def test_standing_wave_closed_form():
    lat = lattice(16)
    phi = standing_wave(lat, amplitude=0.5)
    t, x = np.meshgrid(lat.t, lat.x, indexing="ij")
    assert np.allclose(phi.phi, 0.5 * np.cos(2 * np.pi * x) * np.cos(2 * np.pi * t))
    assert np.allclose(phi.box, 0)


def test_scalar_derivatives_match_finite_differences():
    errs = []
    for n in SIZES:
        lat = lattice(n)
        # no ramp: phi itself (not just phi mod 2) must be periodic for the x stencil
        phi = harmonic_scalar(lat, [Mode(0.3, 2 * np.pi, 1), Mode(0.2, 4 * np.pi, -1, 0.7)], slope_t=1.5)
        errs.append(
            max(
                np.abs(time_derivative(lat, phi.phi) - phi.dphi_t[1:-1]).max(),
                np.abs(space_derivative(lat, phi.phi) - phi.dphi_x).max(),
                np.abs(dalembertian(lat, phi.phi)).max(),
            )
        )
    assert orders(errs) == pytest.approx([2, 2], abs=0.1)


def test_fd_needs_time_neighbours():
    with pytest.raises(ValueError):
        time_derivative(lattice(8), np.zeros((2, 8)))


def test_ansatz_is_swap_conjugate():
    phis = np.linspace(-1.5, 2.5, 11)
    base = np.stack([np.kron(s, np.eye(2)) for s in SIGMA])
    expected = np.stack([swap_conjugate(p, base) for p in phis])
    assert np.allclose(ansatz_triple(phis), expected, atol=1e-14)


def test_ansatz_phi_derivatives():
    phi, h = 0.37, 1e-5
    first, second = ansatz_phi_derivatives(phi)
    fd1 = (ansatz_triple(phi + h) - ansatz_triple(phi - h)) / (2 * h)
    fd2 = (ansatz_triple(phi + h) - 2 * ansatz_triple(phi) + ansatz_triple(phi - h)) / h**2
    assert np.allclose(first, fd1, atol=1e-8)
    assert np.allclose(second, fd2, atol=1e-4)


def test_ansatz_field_is_in_the_algebra():
    f = ansatz_field(lattice(64), standing_wave(lattice(64)))
    assert f.algebra_residuals().max() <= 1e-12
    assert f.dim == 4


def test_analytic_box_matches_finite_differences():
    errs = []
    for n in SIZES:
        lat = lattice(n)
        phi = standing_wave(lat)
        errs.append(np.abs(dalembertian(lat, ansatz_triple(phi.phi)) - analytic_box_ansatz(phi)[1:-1]).max())
    assert orders(errs) == pytest.approx([2, 2], abs=0.1)


def test_ansatz_solves_its_equation_exactly():
    g = analytic_gradients(standing_wave(lattice(64)))
    assert eom_residual(g.q, g.box, ANSATZ_LAMBDA).max() <= 1e-10


def test_ansatz_equation_with_finite_differences_converges():
    errs = []
    for n in SIZES:
        lat = lattice(n)
        g = fd_gradients(lat, ansatz_triple(standing_wave(lat).phi))
        errs.append(eom_residual(g.q, g.box, ANSATZ_LAMBDA).max())
    assert orders(errs) == pytest.approx([2, 2], abs=0.1)


def test_two_parameter_family(rng):
    g = analytic_gradients(standing_wave(lattice(32)))
    for l1, l2 in rng.normal(size=(3, 2)):
        assert eom_residual(g.q, g.box, general_ansatz_lambda(l1, l2)).max() <= 1e-10


def test_type1_no_go_on_standing_wave():
    fits = [best_mass_residual(g.q, g.box) for g in (analytic_gradients(standing_wave(lattice(n))) for n in SIZES)]
    residuals = [r for _, r in fits]
    # bounded well away from zero and not shrinking under refinement
    assert min(residuals) > 100
    assert np.ptp(residuals) / np.mean(residuals) < 0.05


def test_null_wave_evades_the_no_go():
    # a single travelling mode has grad(phi)^2 = 0, so box q = 0 exactly
    lat = lattice(32)
    g = analytic_gradients(harmonic_scalar(lat, [Mode(0.4, 2 * np.pi, 1)]))
    assert np.allclose(harmonic_scalar(lat, [Mode(0.4, 2 * np.pi, 1)]).grad_squared, 0, atol=1e-12)
    assert np.abs(g.box).max() <= 1e-10


def test_gauge_identities():
    res = [gauge_identity_residuals(lattice(n), standing_wave(lattice(n))) for n in SIZES]
    for r in res:
        assert r["unitarity"] <= 1e-12 and r["reconstruction"] <= 1e-12
    for key in ("generator_t", "generator_x", "curl"):
        assert orders([r[key] for r in res]) == pytest.approx([2, 2], abs=0.15), key


def test_hamiltonian_identities():
    res = []
    for n in SIZES:
        lat = lattice(n)
        f = ansatz_field(lat, standing_wave(lat))
        g = fd_gradients(lat, f.q)
        res.append(hamiltonian_identity_residuals(g, hamiltonian_field(lat, f)))
    for key in ("generator_t", "generator_x"):
        assert orders([r[key] for r in res]) == pytest.approx([2, 2], abs=0.15), key
    assert max(r["commutant_t"] for r in res) <= 1e-12


def test_hamiltonian_is_exact_with_analytic_gradients():
    g = analytic_gradients(standing_wave(lattice(32)))
    h = hamiltonian_from_gradients(g)
    r = hamiltonian_identity_residuals(g, h)
    assert max(r.values()) <= 1e-12
    assert h.asymmetry <= 1e-12


def test_first_derivative_identity():
    assert first_derivative_identity_residual(analytic_gradients(standing_wave(lattice(32)))).max() <= 1e-10
    errs = []
    for n in SIZES:
        lat = lattice(n)
        errs.append(first_derivative_identity_residual(fd_gradients(lat, ansatz_triple(standing_wave(lat).phi))).max())
    assert orders(errs) == pytest.approx([2, 2], abs=0.15)


def test_explicit_form_equals_omega_form_for_any_operand(rng):
    g = analytic_gradients(standing_wave(lattice(16)))
    b = random_hermitian(4, rng, size=g.q.shape[:-2])
    cmp = explicit_form_equivalence(g.q, b)
    assert cmp.constant == pytest.approx(EXPLICIT_FORM_CONSTANT, abs=1e-12)
    assert cmp.mismatch <= 1e-12
    assert np.allclose(explicit_form(g.q, b), -1j * omega_combination(ANSATZ_LAMBDA, g.q, b), atol=1e-12)


def test_omega2_and_omega5_agree_on_derivatives():
    g = analytic_gradients(standing_wave(lattice(16)))
    for d in (g.dq_t, g.dq_x):
        assert np.allclose(omega_apply(2, g.q, d), omega_apply(5, g.q, d), atol=1e-12)
