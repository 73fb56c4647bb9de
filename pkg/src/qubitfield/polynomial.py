"""Exact multivariate polynomials over the rationals.

Only what the determinant analysis needs: arithmetic, exact division,
perfect-square roots, and interpolation of a homogeneous polynomial from
its values on an integer grid.  Monomials are ordered lexicographically
with variable 0 most significant.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np


class InterpolationError(RuntimeError):
    pass


class NotASquareError(ArithmeticError):
    pass


def _normalize(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


class Poly:
    """Sparse polynomial ``{exponent tuple: coefficient}`` in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] | None = None):
        self.nvars = nvars
        self.terms: dict[tuple, object] = {}
        for exp, c in (terms or {}).items():
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} does not have {nvars} entries")
            if c != 0:
                self.terms[tuple(exp)] = _normalize(c)

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Poly":
        n = len(coeffs)
        return cls(n, {tuple(int(i == k) for i in range(n)): c for k, c in enumerate(coeffs)})

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, k: int) -> "Poly":
        return cls(nvars, {tuple(int(i == k) for i in range(nvars)): 1})

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[tuple, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.nvars, other)
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # inspection -------------------------------------------------------
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading(self) -> tuple[tuple, object]:
        exp = max(self.terms)
        return exp, self.terms[exp]

    def coefficient(self, exp: tuple):
        return self.terms.get(tuple(exp), 0)

    def __call__(self, point: Sequence):
        """Evaluate exactly for int/Fraction points, or numerically for floats/arrays."""
        total = 0
        for exp, c in self.terms.items():
            term = c
            for x, k in zip(point, exp):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def evaluate_float(self, points) -> np.ndarray:
        """Vectorized float evaluation over the last axis of ``points``."""
        points = np.asarray(points, dtype=float)
        exps = np.array(list(self.terms), dtype=float).reshape(-1, self.nvars)
        coeffs = np.array([float(c) for c in self.terms.values()])
        mono = np.prod(points[..., None, :] ** exps, axis=-1)
        return mono @ coeffs

    # division and roots -----------------------------------------------
    def divmod(self, divisor: "Poly") -> tuple["Poly", "Poly"]:
        """Multivariate division by a single polynomial (lex order)."""
        divisor = self._coerce(divisor)
        if not divisor:
            raise ZeroDivisionError("polynomial division by zero")
        lead_e, lead_c = divisor.leading()
        quotient: dict[tuple, object] = {}
        remainder: dict[tuple, object] = {}
        p = Poly(self.nvars, self.terms)
        while p:
            e, c = p.leading()
            if all(a >= b for a, b in zip(e, lead_e)):
                qe = tuple(a - b for a, b in zip(e, lead_e))
                qc = Fraction(c) / Fraction(lead_c)
                quotient[qe] = quotient.get(qe, 0) + qc
                p = p - Poly(self.nvars, {qe: qc}) * divisor
            else:
                remainder[e] = remainder.get(e, 0) + c
                p = p - Poly(self.nvars, {e: c})
        return Poly(self.nvars, quotient), Poly(self.nvars, remainder)

    def sqrt(self) -> "Poly":
        """Exact square root with positive leading coefficient."""
        if not self:
            return Poly(self.nvars)
        e, c = self.leading()
        c = Fraction(c)
        if c < 0 or any(k % 2 for k in e):
            raise NotASquareError("leading term is not a square")
        num, den = isqrt(c.numerator), isqrt(c.denominator)
        if num * num != c.numerator or den * den != c.denominator:
            raise NotASquareError("leading coefficient is not a rational square")
        lead = Poly(self.nvars, {tuple(k // 2 for k in e): Fraction(num, den)})
        root = lead
        two_lead = lead * 2
        residual = self - root * root
        for _ in range(len(self.terms) * max(1, self.degree()) + 1):
            if not residual:
                return root
            re_, rc = residual.leading()
            le, lc = two_lead.leading()
            if not all(a >= b for a, b in zip(re_, le)):
                raise NotASquareError("residual term not divisible by the root's leading term")
            term = Poly(self.nvars, {tuple(a - b for a, b in zip(re_, le)): Fraction(rc) / lc})
            if max(term.terms) >= max(lead.terms):
                raise NotASquareError("square-root iteration did not descend")
            root = root + term
            residual = self - root * root
        raise NotASquareError("square-root iteration did not terminate")

    # presentation -------------------------------------------------------
    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"l{i}" for i in range(self.nvars)]
        if not self:
            return "0"
        parts = []
        for exp in sorted(self.terms, reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, exp) if k
            )
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            body = mono if (mag == 1 and mono) else (f"{mag}*{mono}" if mono else f"{mag}")
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __repr__(self):
        return f"Poly({self.format()})"

    def to_json(self) -> dict:
        return {" ".join(map(str, e)): str(c) for e, c in sorted(self.terms.items(), reverse=True)}


def bareiss_det(matrix: Iterable[Iterable[int]]) -> int:
    """Fraction-free exact determinant of an integer matrix."""
    m = [list(map(int, row)) for row in matrix]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1] if n else 1


def _exact_inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def interpolate_homogeneous(
    func: Callable[[tuple], int],
    nvars: int,
    degree: int,
    nodes: Sequence[int] | None = None,
) -> Poly:
    """Recover an integer homogeneous polynomial from exact point values.

    The polynomial is dehomogenized at x_0 = 1 and interpolated on the
    tensor grid ``nodes^(nvars-1)`` with exact integer arithmetic.  Any
    recovered monomial of total degree above ``degree`` means the samples
    are inconsistent with the assumed form.
    """
    nodes = list(nodes if nodes is not None else range(-(degree // 2), degree - degree // 2 + 1))
    if len(nodes) < degree + 1:
        raise ValueError("need at least degree + 1 nodes per axis")
    npts = len(nodes)
    vander = [[x**p for p in range(npts)] for x in nodes]
    inv = _exact_inverse(vander)
    scale = 1
    for row in inv:
        for v in row:
            scale = scale * v.denominator // np.gcd(scale, v.denominator)
    inv_int = np.array([[int(v * scale) for v in row] for row in inv], dtype=object)

    free = nvars - 1
    values = np.empty((npts,) * free, dtype=object)
    for idx in itertools.product(range(npts), repeat=free):
        values[idx] = int(func((1,) + tuple(nodes[i] for i in idx)))

    coeffs = values
    for axis in range(free):
        coeffs = np.moveaxis(np.tensordot(inv_int, np.moveaxis(coeffs, axis, 0), axes=(1, 0)), 0, axis)

    denom = scale**free
    terms = {}
    for idx in itertools.product(range(npts), repeat=free):
        num = coeffs[idx]
        if num == 0:
            continue
        if sum(idx) > degree:
            raise InterpolationError(f"unexpected monomial with exponents {idx}")
        c = Fraction(num, denom)
        if c.denominator != 1:
            raise InterpolationError(f"non-integer coefficient {c} at exponents {idx}")
        terms[(degree - sum(idx),) + idx] = c.numerator
    return Poly(nvars, terms)
