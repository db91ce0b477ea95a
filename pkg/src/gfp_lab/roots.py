"""Roots of GFP terms by transfer from the classical Fibonacci/Lucas lattices.

Classical Fibonacci ``F_n`` (d = x, g = 1) vanishes at ``2i cos(j pi/n)`` and
classical Lucas ``L_n`` at ``2i cos((2j+1) pi/(2n))``. A point ``r`` with
``d(r)/sqrt(g(r))`` equal to a lattice value is a root of the general term.
The square-root branch is never chosen explicitly: we solve the squared
equation ``d(r)^2 - lam^2 g(r) = 0`` and keep candidates whose residual on the
actual term is small.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateG, NoRootsFound, ZeroPolynomial
from .gfp import GfpFamily, GfpKind, term
from .polycore import Polynomial, poly_eval_compensated

__all__ = [
    "LatticeKind",
    "RootLattice",
    "RootSet",
    "classical_fibonacci_roots",
    "classical_lucas_roots",
    "gfp_roots",
    "all_roots_companion",
    "match_root_sets",
    "sort_roots",
]

DEDUP_TOL = 1e-9


class LatticeKind(enum.Enum):
    FIBONACCI = "fibonacci"
    LUCAS = "lucas"


@dataclass(frozen=True)
class RootLattice:
    n: int
    values: tuple[complex, ...]
    kind: LatticeKind


@dataclass(frozen=True)
class RootSet:
    family: GfpFamily
    n: int
    roots: tuple[complex, ...]
    residuals: tuple[float, ...]

    def as_records(self) -> list[dict]:
        return [
            {"re": z.real, "im": z.imag, "residual": r}
            for z, r in zip(self.roots, self.residuals)
        ]


def classical_fibonacci_roots(n: int) -> RootLattice:
    if n < 2:
        raise ValueError("F_n has roots only for n >= 2")
    # cos(j pi/n) = sin((n - 2j) pi/(2n)): exact zero at the centre, exact +- pairs
    vals = tuple(complex(0.0, 2.0 * math.sin((n - 2 * j) * math.pi / (2 * n))) for j in range(1, n))
    return RootLattice(n, vals, LatticeKind.FIBONACCI)


def classical_lucas_roots(n: int) -> RootLattice:
    if n < 1:
        raise ValueError("L_n has roots only for n >= 1")
    vals = tuple(
        complex(0.0, 2.0 * math.sin((n - 2 * j - 1) * math.pi / (2 * n))) for j in range(n)
    )
    return RootLattice(n, vals, LatticeKind.LUCAS)


def sort_roots(roots: Sequence[complex]) -> list[complex]:
    # rounding keeps the order stable under last-bit noise
    return sorted(roots, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def _companion_eigs(c: np.ndarray) -> np.ndarray:
    """Roots of the polynomial with low-to-high float coefficients ``c``."""
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    deg = len(c) - 1
    if deg < 1:
        return np.empty(0, dtype=complex)
    # LAPACK geev balances the matrix before the QR iteration
    comp = np.zeros((deg, deg))
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(comp).astype(complex)


def _newton_polish(p: Polynomial, dp: Polynomial, z: complex, steps: int = 3) -> complex:
    best, best_res = z, abs(poly_eval_compensated(p, z))
    for _ in range(steps):
        der = poly_eval_compensated(dp, best)
        if der == 0:
            break
        cand = best - poly_eval_compensated(p, best) / der
        res = abs(poly_eval_compensated(p, cand))
        if not res < best_res:
            break
        best, best_res = cand, res
    return best


def all_roots_companion(p: Polynomial) -> list[complex]:
    """All complex roots: companion-matrix eigenvalues plus Newton polishing."""
    if p.is_zero():
        raise ZeroPolynomial("the zero polynomial has no finite root set")
    if p.degree < 1:
        return []
    dp = p.derivative()
    raw = _companion_eigs(p.to_float_array())
    return sort_roots(_newton_polish(p, dp, complex(z)) for z in raw)


def _dedupe(roots: list[complex], tol: float = DEDUP_TOL) -> list[complex]:
    kept: list[complex] = []
    for z in roots:
        if all(abs(z - w) > tol for w in kept):
            kept.append(z)
    return kept


def gfp_roots(f: GfpFamily, n: int, residual_tolerance: float = 1e-8) -> RootSet:
    """Roots of ``G_n`` obtained from the classical lattice.

    For every lattice value ``lam`` the polynomial ``d^2 - lam^2 g`` is solved
    (``lam^2 = -4 cos^2`` is real). Candidates with ``g(r) = 0`` are dropped and
    the rest are kept if ``|G_n(r)| <= residual_tolerance``.
    """
    if f.kind is GfpKind.FIBONACCI:
        if n < 2:
            raise NoRootsFound(f"Fibonacci-type term of index {n} has no roots")
        lattice = classical_fibonacci_roots(n)
    else:
        if n < 1:
            raise NoRootsFound("Lucas-type term of index 0 is a nonzero constant")
        lattice = classical_lucas_roots(n)
    target = term(f, n)
    d2 = f.d * f.d
    found: list[complex] = []
    nonzero_g = False
    for lam in lattice.values:
        # lam^2 is real; the float is converted exactly
        eq = d2 - f.g * Fraction((lam * lam).real)
        deq = eq.derivative()
        for z in _companion_eigs(eq.to_float_array()):
            z = _newton_polish(eq, deq, complex(z))
            scale = sum(abs(float(c)) * abs(z) ** k for k, c in enumerate(f.g.coeffs))
            if abs(poly_eval_compensated(f.g, z)) <= 1e-14 * scale:
                continue
            nonzero_g = True
            if abs(poly_eval_compensated(target, z)) <= residual_tolerance:
                found.append(z)
    if not nonzero_g:
        raise DegenerateG("g vanishes at every candidate root")
    roots = sort_roots(_dedupe(found))
    residuals = tuple(abs(poly_eval_compensated(target, z)) for z in roots)
    return RootSet(f, n, tuple(roots), residuals)


def match_root_sets(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest pairwise distance under the optimal one-to-one matching.

    Returns ``inf`` when the sets have different sizes.
    """
    if len(a) != len(b):
        return math.inf
    if not a:
        return 0.0
    cost = np.abs(np.subtract.outer(np.asarray(a), np.asarray(b)))
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
