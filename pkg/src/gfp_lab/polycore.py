"""Exact univariate polynomials over the rationals.

Coefficients are stored low-to-high as :class:`fractions.Fraction`; every
arithmetic operation is exact. Floating point enters only through the
``eval_*`` helpers.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Polynomial",
    "ZERO_DEGREE",
    "as_fraction",
    "poly_add",
    "poly_mul",
    "poly_derivative",
    "poly_eval_real",
    "poly_eval_complex",
    "poly_eval_compensated",
    "poly_eval_exact",
    "X",
    "ONE",
    "ZERO",
]

#: Degree of the zero polynomial. Compares below every integer degree.
ZERO_DEGREE = -math.inf

Coefficient = Union[int, Fraction, str]


def as_fraction(value: Coefficient | float) -> Fraction:
    """Coerce ints, Fractions, decimal/"p/q" strings and floats (exactly)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite coefficient {value!r}")
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


class Polynomial:
    """Immutable polynomial with rational coefficients.

    ``Polynomial([1, 0, 3, 0, 1])`` is ``x**4 + 3*x**2 + 1``.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Coefficient] = ()):
        c = [as_fraction(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self._coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def constant(cls, value: Coefficient) -> "Polynomial":
        return cls([value])

    @classmethod
    def monomial(cls, power: int, coeff: Coefficient = 1) -> "Polynomial":
        if power < 0:
            raise ValueError("negative power")
        return cls([0] * power + [coeff])

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> float | int:
        return len(self._coeffs) - 1 if self._coeffs else ZERO_DEGREE

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_constant(self) -> bool:
        return len(self._coeffs) <= 1

    def leading(self) -> Fraction:
        return self._coeffs[-1] if self._coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self._coeffs[k] if 0 <= k < len(self._coeffs) else Fraction(0)

    def is_odd(self) -> bool:
        """Only odd powers present (the zero polynomial counts as odd)."""
        return all(a == 0 for a in self._coeffs[0::2])

    def is_even(self) -> bool:
        return all(a == 0 for a in self._coeffs[1::2])

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-a for a in self._coeffs)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return poly_add(self, -other)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return poly_add(other, -self)

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = as_fraction(scalar)
        if s == 0:
            raise ZeroDivisionError("polynomial divided by zero")
        return Polynomial(a / s for a in self._coeffs)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative exponent")
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = _lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __call__(self, x):
        """Evaluate exactly for rationals, in floating point otherwise."""
        if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
            acc = Fraction(0)
            for a in reversed(self._coeffs):
                acc = acc * x + a
            return acc
        if isinstance(x, complex):
            return poly_eval_complex(self, x)
        if isinstance(x, np.ndarray):
            return poly_eval_real(self, x)
        return poly_eval_real(self, float(x))

    def derivative(self) -> "Polynomial":
        return poly_derivative(self)

    def antiderivative(self) -> "Polynomial":
        return Polynomial([0] + [a / (k + 1) for k, a in enumerate(self._coeffs)])

    def compose(self, inner: "Polynomial") -> "Polynomial":
        acc = ZERO
        for a in reversed(self._coeffs):
            acc = acc * inner + Polynomial([a])
        return acc

    def reflect(self) -> "Polynomial":
        """p(-x)."""
        return Polynomial(a if k % 2 == 0 else -a for k, a in enumerate(self._coeffs))

    def to_float_array(self) -> np.ndarray:
        return np.array([float(a) for a in self._coeffs], dtype=float)

    def to_strings(self) -> list[str]:
        """Textual form used by JSON/CLI: low-to-high rational strings."""
        return [str(a) for a in self._coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[Coefficient]) -> "Polynomial":
        return cls(items)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_strings()!r})"

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for k in range(len(self._coeffs) - 1, -1, -1):
            a = self._coeffs[k]
            if a == 0:
                continue
            mag = abs(a)
            sign = "-" if a < 0 else "+"
            if k == 0:
                body = str(mag)
            else:
                head = "" if mag == 1 else f"{mag}*"
                body = head + ("x" if k == 1 else f"x^{k}")
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _lift(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Polynomial([value])
    return NotImplemented


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    ca, cb = a.coeffs, b.coeffs
    if len(ca) < len(cb):
        ca, cb = cb, ca
    out = list(ca)
    for k, v in enumerate(cb):
        out[k] += v
    return Polynomial(out)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    ca, cb = a.coeffs, b.coeffs
    if not ca or not cb:
        return ZERO
    out = [Fraction(0)] * (len(ca) + len(cb) - 1)
    for i, u in enumerate(ca):
        if u == 0:
            continue
        for j, v in enumerate(cb):
            out[i + j] += u * v
    return Polynomial(out)


def poly_derivative(p: Polynomial) -> Polynomial:
    return Polynomial(k * a for k, a in enumerate(p.coeffs) if k > 0)


def poly_eval_real(p: Polynomial, x):
    """Horner in double precision; ``x`` may be a float or a numpy array."""
    c = p.to_float_array()
    acc = np.zeros_like(np.asarray(x, dtype=float)) if isinstance(x, np.ndarray) else 0.0
    for a in c[::-1]:
        acc = acc * x + a
    return acc


def poly_eval_complex(p: Polynomial, z: complex) -> complex:
    z = complex(z)
    acc = 0j
    for a in reversed(p.coeffs):
        acc = acc * z + float(a)
    return acc


# error-free transformations (Knuth TwoSum, Dekker TwoProduct) ------------------
_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float) -> tuple[float, float]:
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a: float) -> tuple[float, float]:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a: float, b: float) -> tuple[float, float]:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def poly_eval_compensated(p: Polynomial, z: complex | float) -> complex:
    """Compensated Horner scheme in complex arithmetic.

    The rounding error of every multiply-add is captured exactly and
    propagated through a second Horner recurrence, so the result is about as
    accurate as if computed in twice the working precision. Used for
    residuals near roots, where plain Horner loses most digits.
    """
    zr, zi = float(complex(z).real), float(complex(z).imag)
    sr = si = 0.0
    cr = ci = 0.0
    for a in reversed(p.coeffs):
        af = float(a)
        # (sr + i si) * (zr + i zi)
        p1, e1 = _two_prod(sr, zr)
        p2, e2 = _two_prod(si, -zi)
        p3, e3 = _two_prod(sr, zi)
        p4, e4 = _two_prod(si, zr)
        re, e5 = _two_sum(p1, p2)
        im, e6 = _two_sum(p3, p4)
        re, e7 = _two_sum(re, af)
        # coefficient rounding itself (a is rational)
        e8 = float(a - Fraction(af)) if af != a else 0.0
        # propagate the correction term through the same recurrence
        cr, ci = cr * zr - ci * zi + (e1 + e2 + e5 + e7 + e8), cr * zi + ci * zr + (e3 + e4 + e6)
        sr, si = re, im
    return complex(sr + cr, si + ci)


def poly_eval_exact(p: Polynomial, z: complex | float) -> complex:
    """Evaluate in exact Gaussian-rational arithmetic at the float point ``z``.

    The only rounding is the final conversion; this is the reference against
    which the compensated scheme is tested.
    """
    z = complex(z)
    xr, xi = Fraction(z.real), Fraction(z.imag)
    ar = ai = Fraction(0)
    for a in reversed(p.coeffs):
        ar, ai = ar * xr - ai * xi + a, ar * xi + ai * xr
    return complex(float(ar), float(ai))


ZERO = Polynomial()
ONE = Polynomial([1])
X = Polynomial([0, 1])
