"""Reference computations that share no code with gfp_lab.

* classical closed forms from sympy (Chebyshev T/U, Fibonacci polynomials)
* exact rational matrix powers with sympy
* root sets with numpy.roots (plain companion eigenvalues, no polishing)
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy as sp

X = sp.Symbol("x")


def _sym(poly_coeffs):
    return sum(sp.Rational(c.numerator, c.denominator) * X ** k for k, c in enumerate(poly_coeffs))


def closed_form_term(kind: str, d_coeffs, g0: Fraction, n: int, p0: Fraction = None):
    """n-th term of a family with constant ``g`` from classical polynomials.

    ``g = -G``: ``F_n = G^((n-1)/2) U_{n-1}(u)``, ``L_n = p0 G^(n/2) T_n(u)``
    with ``u = d / (2 sqrt G)``.
    ``g = +G``: ``F_n = G^((n-1)/2) f_n(y)`` with ``y = d / sqrt G`` and
    ``f_n`` the Fibonacci polynomials; ``L_n = (p0/2) G^(n/2) (f_{n+1} + f_{n-1})(y)``.
    Returns low-to-high Fractions.
    """
    d = _sym(d_coeffs)
    g = sp.Rational(g0.numerator, g0.denominator)
    big = abs(g)
    rt = sp.sqrt(big)
    if g < 0:
        u = d / (2 * rt)
        if kind == "fibonacci":
            expr = big ** sp.Rational(n - 1, 2) * sp.chebyshevu(n - 1, u)
        else:
            expr = sp.Rational(p0.numerator, p0.denominator) * big ** sp.Rational(n, 2) * sp.chebyshevt(n, u)
    else:
        y = d / rt
        if kind == "fibonacci":
            expr = big ** sp.Rational(n - 1, 2) * sp.fibonacci(n, y)
        else:
            def fib(m):
                # f_0 = 0, f_{-1} = 1
                return {0: 0, -1: 1}.get(m) if m <= 0 else sp.fibonacci(m, y)

            luc = fib(n + 1) + fib(n - 1)
            expr = sp.Rational(p0.numerator, p0.denominator) / 2 * big ** sp.Rational(n, 2) * luc
    poly = sp.Poly(sp.expand(expr), X)
    out = [Fraction(int(sp.fraction(c)[0]), int(sp.fraction(c)[1])) for c in poly.all_coeffs()[::-1]]
    while out and out[-1] == 0:
        out.pop()
    return out


def exact_matrix_power_entry(p0, r0, p, r, q, size: int, n: int, i: int, j: int) -> Fraction:
    m = sp.zeros(size, size)
    rat = lambda v: sp.Rational(Fraction(v).numerator, Fraction(v).denominator)  # noqa: E731
    for k in range(size):
        m[k, k] = rat(r0 if k == 0 else r)
        if k + 1 < size:
            m[k, k + 1] = rat(p0 if k == 0 else p)
        if k > 0:
            m[k, k - 1] = rat(q)
    v = (m ** n)[i, j]
    return Fraction(int(v.p), int(v.q))


def numpy_roots(coeffs_low_to_high) -> list[complex]:
    c = [float(a) for a in coeffs_low_to_high][::-1]
    return [complex(z) for z in np.roots(c)]
