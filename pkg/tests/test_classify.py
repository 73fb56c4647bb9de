import numpy as np
import pytest

from qubitfield.classify import (
    ANSATZ_OPERATOR,
    LAGRANGIAN_ROWS,
    NAMES,
    PUBLISHED_LINEAR,
    PUBLISHED_QUADRATIC,
    EomSpec,
    NotReducible,
    classify,
    equivalent_type1_reduction,
    lagrangian_operator_crosscheck,
)
from qubitfield.polynomial import Poly

L = [Poly.variable(6, k) for k in range(6)]

# Quadratic factor as recovered by the determinant oracle
ORACLE_QUADRATIC = (
    -L[0] ** 2 - 2 * L[0] * L[1] + 2 * L[0] * L[3] + 2 * L[0] * L[4] + 3 * L[1] ** 2
    + 6 * L[1] * L[3] + 14 * L[1] * L[4] - 8 * L[2] ** 2 + 4 * L[3] * L[4] + 8 * L[4] ** 2 + 8 * L[5] ** 2
)


def test_polynomial_matches_numeric_determinant(det_poly, sc4):
    rng = np.random.default_rng(5)
    for lam in rng.integers(-5, 6, size=(200, 6)):
        exact = int(round(np.linalg.det(sc4.left_matrix(lam).astype(float))))
        assert det_poly(tuple(int(v) for v in lam)) == exact


def test_polynomial_shape(det_poly):
    assert det_poly.is_homogeneous() and det_poly.degree() == 6
    assert det_poly((1, 0, 0, 0, 0, 0)) == 1


def test_factorization(det_poly, fact):
    assert fact.published_linear_divides == (True, True)
    assert fact.multiplicities == (1, 1, 2)
    assert fact.constant == 1
    assert fact.f1 * fact.f2 * fact.f3 * fact.f3 == det_poly
    assert fact.f3 == ORACLE_QUADRATIC


def test_factorization_against_sympy(det_poly):
    sympy = pytest.importorskip("sympy")
    syms = sympy.symbols(" ".join(NAMES))
    expr = sympy.Poly(
        {e: int(c) for e, c in det_poly.terms.items()}, *syms
    ).as_expr()
    factors = sympy.factor_list(expr)[1]
    degrees = sorted((sympy.Poly(f, *syms).total_degree(), k) for f, k in factors)
    assert degrees == [(1, 1), (1, 1), (2, 2)]


def test_quadratic_differs_from_printed_in_two_terms(fact):
    diff = fact.quadratic_diff
    assert diff == {
        "l3^2": {"oracle": "0", "published": "8"},
        "l5^2": {"oracle": "8", "published": "0"},
    }
    assert PUBLISHED_QUADRATIC - fact.f3 == 8 * L[3] ** 2 - 8 * L[5] ** 2


def test_linear_factors_are_the_published_ones(fact):
    assert (fact.f1, fact.f2) == PUBLISHED_LINEAR


@pytest.mark.parametrize(
    "lam, expected",
    [
        ((1, 0, 0, 0, 0, 0), "I"),
        ((0, 1, 0, 0, 0, 0), "I"),
        ((1, 1, 0, 0, 0, 0), "VIII"),
        ((-2, 0, 0, 1, 0, 0), "II"),  # L1 = 0, L2 = -6, f3 = -4 - 4 = -8
        ((4, 0, 0, 0, 0, 0), "I"),
    ],
)
def test_simple_classifications(fact, lam, expected):
    assert classify(EomSpec(lam), fact).type == expected


def test_point_on_first_factor_only(fact):
    on_l1 = (2, 0, 0, -1, 0, 0)  # L1 = 0, L2 = 6, f3 = -4 - 4 = -8
    verdict = classify(EomSpec(on_l1), fact)
    assert verdict.factor_values[0] == pytest.approx(0)
    assert verdict.type == "II"


def test_ansatz_operator_conflict(fact):
    verdict = classify(EomSpec(ANSATZ_OPERATOR), fact)
    assert verdict.type == "VIII"
    assert verdict.printed_type == "VII"
    assert verdict.conflict
    assert verdict.printed_factor_values == (0.0, 0.0, -8.0)
    assert verdict.to_json()["printed_verdict"] == "VII"


def test_massive_flag(fact):
    assert not classify(EomSpec((1, 0, 0, 0, 0, 0), mu=2.0), fact).massless


def test_classification_is_scale_invariant(fact):
    for lam in [(0, 0, 1, 0, 0, 1), (14, 0, 0, -1, 1, 0), (-10, 0, 0, -1, 1, 0)]:
        base = classify(EomSpec(lam), fact).type
        assert classify(EomSpec(tuple(1e4 * v for v in lam)), fact).type == base
        assert classify(EomSpec(tuple(1e-4 * v for v in lam)), fact).type == base


def test_lagrangian_rows_all_agree_with_oracle(fact):
    rows = lagrangian_operator_crosscheck(fact)
    assert len(rows) == len(LAGRANGIAN_ROWS) == 13
    assert all(r["agree"] for r in rows), [r for r in rows if not r["agree"]]


def test_printed_polynomial_misclassifies_five_rows(fact):
    # Along these rows l5 = 0, so the printed quadratic exceeds the oracle by 8 l3^2 = 8.
    rows = lagrangian_operator_crosscheck(fact)
    bad = [(tuple(r["lambda"]), r["printed_polynomial_type"]) for r in rows if not r["printed_polynomial_agrees"]]
    assert bad == [
        ((2, 0, 0, -1, -1, 0), "VII"),
        ((-2, 0, 0, -1, 1, 0), "I"),
        ((2, 0, 0, -1, 1, 0), "II"),
        ((-6, 0, 0, -1, -1, 0), "I"),
        ((2, 0, 0, -1, -1, 0), "VII"),
    ]


@pytest.mark.parametrize("lam", [(0, 0, 0, 0, 0, 0), (1, 2, 3), (np.nan, 0, 0, 0, 0, 1), (np.inf, 0, 0, 0, 0, 0)])
def test_spec_validation(lam):
    with pytest.raises(ValueError):
        EomSpec(lam)


def test_reduction_to_type1(sc4):
    out = equivalent_type1_reduction(EomSpec((0, 1, 0, 0, 0, 0), mu=2.0), sc4)
    assert out.lam == (1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    # Omega^1 acts as -1 on the triple: -box q + 2 q = 0
    assert out.mu == pytest.approx(-2.0)
    assert equivalent_type1_reduction(EomSpec(ANSATZ_OPERATOR), sc4) == NotReducible(2)


def test_reduction_has_no_negative_zero(sc4):
    out = equivalent_type1_reduction(EomSpec((14, 0, 0, -1, 1, 0)), sc4)
    assert np.copysign(1.0, out.mu) == 1.0


def test_report_is_serializable(fact):
    import json

    rep = fact.report()
    json.dumps(rep)
    assert rep["factors"][0] == "l0 - l1 + 2*l3"
