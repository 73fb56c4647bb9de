"""The six-element super-operator basis acting on operator triples.

For a triple q the basis maps A_j -> (Omega^a A)_j are

    0: A_j
    1: q_k A_j q_k
    2: eps_jkl (q_k A_l + A_l q_k)
    3: i eps_jkl (q_k A_l - A_l q_k)
    4: q_k A_k q_j + q_j A_k q_k
    5: i (q_k A_k q_j - q_j A_k q_k)

Two realizations are kept: sandwich products over stacked arrays (fast,
broadcast over lattice sites) and explicit (3N^2 x 3N^2) matrices over
row-major vectorized triples (used for composition and expansion).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import EPS, SIGMA, QubitTriple, random_hermitian

N_BASIS = 6

# Coefficients of q_j in Omega^a q_j for a valid triple of dimension >= 4.
EIGEN_ON_TRIPLE = (1, -1, 0, -4, 6, 0)


def _q(t) -> np.ndarray:
    return t.q if isinstance(t, QubitTriple) else np.asarray(t)


def project_commutant(t, a) -> np.ndarray:
    """Projector onto operators commuting with every q_j: (A + q_j A q_j)/4."""
    q = _q(t)
    a = np.asarray(a)
    if a.shape[-2:] != q.shape[-2:]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {q.shape}")
    return (a + np.einsum("...kab,...bc,...kcd->...ad", q, a, q)) / 4


def omega_apply(alpha: int, t, a) -> np.ndarray:
    """Apply basis map ``alpha`` to the triple ``a`` (shape ``(..., 3, N, N)``)."""
    q = _q(t)
    a = np.asarray(a)
    if a.shape[-3:] != q.shape[-3:]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {q.shape}")
    if alpha == 0:
        return a.copy()
    if alpha == 1:
        return np.einsum("...kab,...jbc,...kcd->...jad", q, a, q)
    if alpha in (2, 3):
        qa = np.einsum("jkl,...kab,...lbc->...jac", EPS, q, a)
        aq = np.einsum("jkl,...lab,...kbc->...jac", EPS, a, q)
        return qa + aq if alpha == 2 else 1j * (qa - aq)
    if alpha in (4, 5):
        s = np.einsum("...kab,...kbc->...ac", q, a)
        left = s[..., None, :, :] @ q
        s2 = np.einsum("...kab,...kbc->...ac", a, q)
        right = q @ s2[..., None, :, :]
        return left + right if alpha == 4 else 1j * (left - right)
    raise ValueError(f"basis index must be in 0..5, got {alpha!r}")


def omega_combination(lam, t, a) -> np.ndarray:
    """Apply ``sum_a lam[a] Omega^a`` to the triple ``a``."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (N_BASIS,):
        raise ValueError("expected six coefficients")
    out = np.zeros(np.broadcast_shapes(np.shape(a), _q(t).shape), dtype=complex)
    for alpha, coeff in enumerate(lam):
        if coeff != 0:
            out = out + coeff * omega_apply(alpha, t, a)
    return out


def omega_matrix(alpha: int, t) -> np.ndarray:
    """Explicit matrix of basis map ``alpha`` on row-major vectorized triples.

    Uses vec(X A Y) = kron(X, Y^T) vec(A); block (j, l) maps A_l into
    output component j.
    """
    q = _q(t)
    if q.ndim != 3:
        raise ValueError("omega_matrix takes a single triple")
    if alpha not in range(N_BASIS):
        raise ValueError(f"basis index must be in 0..5, got {alpha!r}")
    n = q.shape[-1]
    eye = np.eye(n)

    def sandwich(x, y):
        return np.kron(x, y.T)

    blocks = [[np.zeros((n * n, n * n), dtype=complex) for _ in range(3)] for _ in range(3)]
    for j in range(3):
        for l in range(3):
            if alpha == 0 and j == l:
                blocks[j][l] = np.eye(n * n, dtype=complex)
            elif alpha == 1 and j == l:
                blocks[j][l] = sum(sandwich(q[k], q[k]) for k in range(3))
            elif alpha == 2:
                blocks[j][l] = sum(
                    EPS[j, k, l] * (sandwich(q[k], eye) + sandwich(eye, q[k])) for k in range(3)
                )
            elif alpha == 3:
                blocks[j][l] = sum(
                    1j * EPS[j, k, l] * (sandwich(q[k], eye) - sandwich(eye, q[k]))
                    for k in range(3)
                )
            elif alpha == 4:
                blocks[j][l] = sandwich(q[l], q[j]) + sandwich(q[j], q[l])
            elif alpha == 5:
                blocks[j][l] = 1j * (sandwich(q[l], q[j]) - sandwich(q[j], q[l]))
    return np.block(blocks)


def vectorize_triple(a) -> np.ndarray:
    return np.asarray(a).reshape(*np.shape(a)[:-3], -1)


def omega_on_qtriple_table(t, tol: float = 1e-10) -> tuple:
    """Coefficient c_a with ``Omega^a q_j == c_a q_j``, or None when not proportional."""
    q = _q(t)
    out = []
    for alpha in range(N_BASIS):
        image = omega_apply(alpha, q, q)
        coeff = np.vdot(q, image) / np.vdot(q, q)
        if np.max(np.abs(image - coeff * q)) > tol or abs(coeff.imag) > tol:
            out.append(None)
        else:
            out.append(float(coeff.real))
    return tuple(out)


# Published composition table, keyed (row, column) -> coefficient vector.
def _row(*pairs) -> tuple:
    v = [0] * N_BASIS
    for coeff, idx in pairs:
        v[idx] += coeff
    return tuple(v)


PRINTED_COMPOSITION_TABLE: dict[tuple[int, int], tuple] = {
    **{(0, a): _row((1, a)) for a in range(N_BASIS)},
    **{(b, 0): _row((1, b)) for b in range(N_BASIS)},
    (1, 1): _row((3, 0), (2, 1)),
    (1, 2): _row((1, 2), (-2, 5)),
    (1, 3): _row((-1, 3)),
    (1, 4): _row((2, 0), (2, 1), (-1, 4)),
    (1, 5): _row((-2, 2), (1, 5)),
    (2, 1): _row((1, 2), (2, 5)),
    (2, 2): _row((-4, 0), (-2, 1), (1, 3), (1, 4)),
    (2, 3): _row((-1, 2), (1, 5)),
    (2, 4): _row((-1, 2), (3, 5)),
    (2, 5): _row((-2, 1), (-1, 3), (-1, 4)),
    (3, 1): _row((-1, 3)),
    (3, 2): _row((-1, 2), (-1, 5)),
    (3, 3): _row((4, 0), (-2, 1), (-1, 3), (1, 4)),
    (3, 4): _row((2, 1), (1, 3), (-3, 4)),
    (3, 5): _row((-1, 2), (-1, 5)),
    (4, 1): _row((2, 0), (2, 1), (-1, 4)),
    (4, 2): _row((-1, 2), (-3, 5)),
    (4, 3): _row((2, 1), (1, 3), (-3, 4)),
    (4, 4): _row((8, 0), (-2, 1), (-5, 3), (1, 4)),
    (4, 5): _row((-3, 2), (-1, 5)),
    (5, 1): _row((2, 2), (1, 5)),
    (5, 2): _row((2, 1), (1, 3), (1, 4)),
    (5, 3): _row((1, 2), (-1, 5)),
    (5, 4): _row((3, 2), (-1, 5)),
    (5, 5): _row((4, 0), (2, 1), (-1, 3), (-1, 4)),
}

# Readings of a table cell (row r, column k) as a composition.
COLUMN_AFTER_ROW = "column-after-row"  # cell(r, k) = Omega^k o Omega^r
ROW_AFTER_COLUMN = "row-after-column"  # cell(r, k) = Omega^r o Omega^k


class StructureConstantError(RuntimeError):
    pass


class BasisDegeneracyError(StructureConstantError):
    """The six basis maps are linearly dependent at this dimension."""


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """``c[a, b, g]``: ``Omega^a o Omega^b = sum_g c[a, b, g] Omega^g`` (b applied first)."""

    c: np.ndarray
    convention: str = COLUMN_AFTER_ROW
    table_match: dict = field(default_factory=dict)
    max_residual: float = 0.0
    max_rounding: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.c)
        if c.shape != (N_BASIS,) * 3:
            raise ValueError("structure constants must have shape (6, 6, 6)")
        c = c.astype(np.int64)
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    def product(self, lam, mu) -> np.ndarray:
        """Coefficients of (lam . Omega) o (mu . Omega)."""
        return np.einsum("a,b,abg->g", lam, mu, self.c)

    def left_matrix(self, lam) -> np.ndarray:
        """``M[b, g] = lam_a c[a, b, g]``."""
        return np.einsum("a,abg->bg", lam, self.c)

    def report(self) -> dict:
        return {
            "constants": self.c.tolist(),
            "order_convention": self.convention,
            "table_match": {f"{r},{k}": ok for (r, k), ok in sorted(self.table_match.items())},
            "table_agreement": f"{sum(self.table_match.values())}/{len(self.table_match)}",
            "expansion_residual": self.max_residual,
            "max_distance_to_integer": self.max_rounding,
        }


def _expand_all(q: np.ndarray, rng: np.random.Generator, n_samples: int):
    n = q.shape[-1]
    mats = [omega_matrix(a, q) for a in range(N_BASIS)]
    samples = random_hermitian(n, rng, size=(n_samples, 3))
    x = vectorize_triple(samples).T  # (3N^2, n_samples)
    basis = np.stack([(m @ x).ravel() for m in mats], axis=1)
    basis_real = np.vstack([basis.real, basis.imag])
    sv = np.linalg.svd(basis_real, compute_uv=False)
    if sv[-1] <= 1e-9 * sv[0]:
        raise BasisDegeneracyError(
            f"basis maps are dependent at N={n} (singular values {sv.round(12).tolist()})"
        )
    coeffs = np.empty((N_BASIS, N_BASIS, N_BASIS))
    max_res = 0.0
    for a in range(N_BASIS):
        for b in range(N_BASIS):
            target = (mats[a] @ (mats[b] @ x)).ravel()
            target_real = np.concatenate([target.real, target.imag])
            sol, *_ = np.linalg.lstsq(basis_real, target_real, rcond=None)
            res = np.linalg.norm(basis_real @ sol - target_real) / max(
                1.0, np.linalg.norm(target_real)
            )
            max_res = max(max_res, float(res))
            coeffs[a, b] = sol
    return coeffs, max_res


def detect_table_convention(c: np.ndarray) -> tuple[str, dict]:
    """Compare both readings of the published table against ``c``."""
    readings = {
        COLUMN_AFTER_ROW: lambda r, k: c[k, r],
        ROW_AFTER_COLUMN: lambda r, k: c[r, k],
    }
    results = {}
    for name, read in readings.items():
        results[name] = {
            cell: bool(np.array_equal(read(*cell), np.array(printed)))
            for cell, printed in PRINTED_COMPOSITION_TABLE.items()
        }
    best = max(results, key=lambda name: (sum(results[name].values()), name == COLUMN_AFTER_ROW))
    return best, results[best]


def extract_structure_constants(
    t,
    seed: int = 0,
    n_samples: int = 40,
    residual_tol: float = 1e-9,
    integer_tol: float = 1e-6,
) -> StructureConstants:
    """Expand every pairwise composition of the basis maps in the basis itself."""
    q = _q(t)
    coeffs, max_res = _expand_all(q, np.random.default_rng(seed), n_samples)
    if max_res > residual_tol:
        raise StructureConstantError(f"composition not in the span (residual {max_res:.3e})")
    rounded = np.rint(coeffs)
    max_round = float(np.max(np.abs(coeffs - rounded)))
    if max_round > integer_tol:
        raise StructureConstantError(f"non-integer structure constant (off by {max_round:.3e})")
    c = rounded.astype(np.int64)
    convention, match = detect_table_convention(c)
    return StructureConstants(c, convention, match, max_res, max_round)


def associativity_violations(c) -> list[tuple[int, int, int, int]]:
    """Index tuples where (Oa Ob) Og != Oa (Ob Og), in exact integer arithmetic."""
    c = np.asarray(c, dtype=object)
    lhs = np.einsum("abd,dge->abge", c, c)
    rhs = np.einsum("bgd,ade->abge", c, c)
    bad = np.argwhere(lhs != rhs)
    return sorted({tuple(int(i) for i in idx) for idx in bad})


@dataclass(frozen=True)
class Singular:
    """Non-invertible monoid element; ``rank`` of lam_a c[a, b, g]."""

    rank: int


def monoid_inverse(lam, sc: StructureConstants, tol: float = 1e-10):
    """Solve ``lam_a inv_b c[a, b, g] = delta_g0``; returns the inverse or Singular."""
    lam = np.asarray(lam, dtype=float)
    m = sc.left_matrix(lam)
    scale = max(1.0, float(np.max(np.abs(m))))
    rank = int(np.linalg.matrix_rank(m, tol=tol * scale))
    if rank < N_BASIS:
        return Singular(rank)
    unit = np.zeros(N_BASIS)
    unit[0] = 1.0
    return np.linalg.solve(m.T, unit)


# --- swap super-operator ---------------------------------------------------

_SS = sum(np.kron(s, s) for s in SIGMA)
SWAP = (np.eye(4) + _SS) / 2
SINGLET_PROJECTOR = (np.eye(4) - _SS) / 4  # the swap's (-1)-eigenprojector


def swap_power(phi) -> np.ndarray:
    """``W^phi = ((3 + e^{i pi phi}) I + (1 - e^{i pi phi}) sigma_j (x) sigma_j) / 4``.

    Broadcasts over an array of exponents, returning shape ``phi.shape + (4, 4)``.
    """
    e = np.exp(1j * np.pi * np.asarray(phi, dtype=float))[..., None, None]
    return ((3 + e) * np.eye(4) + (1 - e) * _SS) / 4


def swap_conjugate(phi, a) -> np.ndarray:
    """The map ``A -> W^{-phi} A W^{phi}``."""
    return swap_power(-np.asarray(phi)) @ np.asarray(a) @ swap_power(phi)
