"""Orthogonality of GFP families.

For ``g = -G`` with ``G > 0`` and ``d`` monotone, the substitution
``u = d(x) / (2 sqrt(G))`` turns Fibonacci-type terms into scaled Chebyshev
polynomials of the second kind and Lucas-type terms into scaled first-kind
ones. The induced weights on ``[s1, s2]`` (where ``d = -2 sqrt(G)`` resp.
``+2 sqrt(G)``) are::

    Fibonacci type:  sqrt(4G - d(x)^2) |d'(x)|
    Lucas type:      |d'(x)| / sqrt(4G - d(x)^2)

Inner products are computed in the ``u`` variable with Gauss-Chebyshev rules,
which are exact for polynomial integrands when ``d`` is linear.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate, optimize

from .errors import HypothesisViolated, NonMonotoneD, NoRealSupport, PositiveG
from .gfp import GfpFamily, GfpKind, generate, term
from .polycore import ONE, Polynomial
from .roots import all_roots_companion

__all__ = [
    "DensityKind",
    "WeightSpec",
    "GramMatrix",
    "Verdict",
    "OrthoVerdict",
    "ComplementSplit",
    "build_weight",
    "inner_product",
    "adaptive_inner_product",
    "gauss_chebyshev",
    "term_indices",
    "gram",
    "classify",
    "parity_product_is_odd",
    "parity_vanish_check",
    "complement_split",
    "chebyshev_substitution_value",
]


class DensityKind(enum.Enum):
    FIBONACCI = "fibonacci_weight"
    LUCAS = "lucas_weight"


@dataclass(frozen=True)
class WeightSpec:
    """Weight certifying orthogonality of a family with ``g = -big_g``.

    ``s1``/``s2`` solve ``d(s) = -2 sqrt(G)`` / ``d(s) = +2 sqrt(G)``;
    ``support`` is the same interval sorted ascending. ``normalization`` is
    the reciprocal of the total mass of the raw density.
    """

    family: GfpFamily
    big_g: Fraction
    s1: float
    s2: float
    density_kind: DensityKind
    normalization: float
    # d(x) = c x^t + h with t odd, when d has that shape
    monomial: Optional[tuple[Fraction, int, Fraction]] = field(default=None, repr=False)

    @property
    def support(self) -> tuple[float, float]:
        return (min(self.s1, self.s2), max(self.s1, self.s2))

    @property
    def sqrt_g(self) -> float:
        return math.sqrt(self.big_g)

    @property
    def is_linear(self) -> bool:
        return self.family.d.degree == 1

    def density(self, x):
        x = np.asarray(x, dtype=float)
        d = self.family.d(x)
        dp = np.abs(self.family.d.derivative()(x))
        gap = np.clip(4.0 * float(self.big_g) - d * d, 0.0, None)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        if self.density_kind is DensityKind.FIBONACCI:
            out = np.sqrt(gap) * dp
        else:
            with np.errstate(divide="ignore"):
                out = dp / np.sqrt(gap)
        return np.where(inside, out, 0.0)

    def x_of_u(self, u):
        """Inverse of ``u = d(x) / (2 sqrt(G))`` on the support."""
        u = np.asarray(u, dtype=float)
        target = 2.0 * self.sqrt_g * u
        if self.monomial is not None:
            c, t, h = self.monomial
            y = (target - float(h)) / float(c)
            return np.sign(y) * np.abs(y) ** (1.0 / t)
        lo, hi = self.support
        d = self.family.d
        flat = np.atleast_1d(target)
        out = np.array([
            optimize.brentq(lambda x, v=v: float(d(x)) - v, lo, hi, xtol=1e-15, rtol=1e-15)
            for v in flat
        ])
        return out.reshape(np.shape(target))


@dataclass(frozen=True)
class GramMatrix:
    family: GfpFamily
    indices: tuple[int, ...]
    entries: np.ndarray
    quadrature_error_estimate: float

    @property
    def size(self) -> int:
        return len(self.indices)

    def max_offdiag(self) -> float:
        off = self.entries - np.diag(np.diag(self.entries))
        return float(np.abs(off).max()) if self.size > 1 else 0.0

    def max_offdiag_relative(self) -> float:
        """Off-diagonal entries scaled to correlations."""
        s = np.sqrt(np.abs(np.diag(self.entries)))
        corr = self.entries / np.outer(s, s)
        off = corr - np.diag(np.diag(corr))
        return float(np.abs(off).max()) if self.size > 1 else 0.0


class Verdict(enum.Enum):
    ORTHOGONAL = "Orthogonal"
    NOT_ORTHOGONAL = "NotOrthogonal"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class OrthoVerdict:
    family: GfpFamily
    verdict: Verdict
    criterion: str
    reason: str
    max_offdiag: Optional[float] = None
    weight: Optional[WeightSpec] = None
    gram: Optional[GramMatrix] = None


@dataclass(frozen=True)
class ComplementSplit:
    even_indices: tuple[int, ...]
    odd_indices: tuple[int, ...]
    even_basis: tuple[Polynomial, ...]
    odd_basis: tuple[Polynomial, ...]
    cross_gram: tuple[tuple[Fraction, ...], ...]
    even_gram: tuple[tuple[Fraction, ...], ...]
    odd_gram: tuple[tuple[Fraction, ...], ...]

    def cross_is_zero(self) -> bool:
        return all(v == 0 for row in self.cross_gram for v in row)


# weights --------------------------------------------------------------------

def _monomial_shape(d: Polynomial) -> Optional[tuple[Fraction, int, Fraction]]:
    """``(c, t, h)`` if ``d = c x^t + h`` with odd ``t``."""
    t = int(d.degree)
    if t < 1 or t % 2 == 0:
        return None
    if any(d.coeff(k) != 0 for k in range(1, t)):
        return None
    return d.leading(), t, d.coeff(0)


def _real_roots(p: Polynomial) -> list[float]:
    if p.degree < 1:
        return []
    return sorted(z.real for z in all_roots_companion(p) if abs(z.imag) <= 1e-10 * max(1.0, abs(z)))


def build_weight(f: GfpFamily, density_kind: Optional[DensityKind] = None) -> WeightSpec:
    """Chebyshev-substitution weight for a family with negative constant ``g``."""
    if not f.g.is_constant():
        raise PositiveG(f"g(x) = {f.g} is not constant; no Chebyshev-substitution weight")
    g0 = f.g.coeff(0)
    if g0 > 0:
        raise PositiveG(f"g = {g0} > 0: d linear with positive g admits no orthogonality measure")
    big_g = -g0
    if density_kind is None:
        density_kind = DensityKind.FIBONACCI if f.kind is GfpKind.FIBONACCI else DensityKind.LUCAS
    rg = math.sqrt(big_g)
    shape = _monomial_shape(f.d)
    if shape is not None:
        c, t, h = shape

        def root(v):
            y = (v - float(h)) / float(c)
            return math.copysign(abs(y) ** (1.0 / t), y)

        s1, s2 = root(-2.0 * rg), root(2.0 * rg)
    else:
        s1, s2 = _general_support(f.d, rg)
    lo, hi = min(s1, s2), max(s1, s2)
    crit = [r for r in _real_roots(f.d.derivative()) if lo < r < hi]
    # an odd-power inflection (x^3 at 0) keeps d monotone
    if shape is None and crit:
        raise NonMonotoneD(f"d'(x) vanishes inside [{lo}, {hi}] at {crit}")
    w = WeightSpec(f, big_g, s1, s2, density_kind, 1.0, shape)
    mass = inner_product(ONE, ONE, w)
    return WeightSpec(f, big_g, s1, s2, density_kind, 1.0 / mass, shape)


def _general_support(d: Polynomial, rg: float) -> tuple[float, float]:
    two = Fraction(2 * rg)
    lows = _real_roots(d + two)
    highs = _real_roots(d - two)
    if not lows or not highs:
        raise NoRealSupport("d(s) = -+2 sqrt(G) has no real solution pair")
    dp = d.derivative()
    crit = _real_roots(dp)
    best = None
    for a in lows:
        for b in highs:
            lo, hi = min(a, b), max(a, b)
            if any(lo < r < hi for r in crit):
                continue
            if best is None or hi - lo < abs(best[1] - best[0]):
                best = (a, b)
    if best is None:
        raise NonMonotoneD("d'(x) changes sign between every candidate pair of endpoints")
    return best


# quadrature -------------------------------------------------------------------

def gauss_chebyshev(n_nodes: int, kind: DensityKind) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [-1, 1] for ``sqrt(1-u^2)`` (second kind) or ``1/sqrt(1-u^2)``."""
    if kind is DensityKind.LUCAS:
        k = np.arange(1, n_nodes + 1)
        return np.cos((2 * k - 1) * np.pi / (2 * n_nodes)), np.full(n_nodes, np.pi / n_nodes)
    k = np.arange(1, n_nodes + 1)
    theta = k * np.pi / (n_nodes + 1)
    return np.cos(theta), np.pi / (n_nodes + 1) * np.sin(theta) ** 2


def _jacobian(w: WeightSpec) -> float:
    # dx-measure to u-measure factor: Fibonacci 4G, Lucas 1
    return 4.0 * float(w.big_g) if w.density_kind is DensityKind.FIBONACCI else 1.0


def _node_count(total_degree: int) -> int:
    return max(1, math.ceil(total_degree / 2)) + 4


def _integrate_u(fn, w: WeightSpec, total_degree: int, n_nodes: Optional[int] = None) -> float:
    """``int fn(x) * density dx``; ``fn`` is vectorized in x.

    Linear ``d``: Gauss-Chebyshev rule in ``u`` (exact for polynomial ``fn``).
    Otherwise ``x(u)`` has a root-type kink, so the integral is done directly
    in ``x`` with an adaptive rule.
    """
    if w.is_linear:
        n = n_nodes or _node_count(total_degree)
        u, wt = gauss_chebyshev(n, w.density_kind)
        return _jacobian(w) * float(np.dot(wt, fn(w.x_of_u(u))))
    return _qaws_x(lambda x: float(fn(x)), w)


def _qaws_x(fn, w: WeightSpec) -> float:
    """Adaptive Gauss-Kronrod in ``x`` against the raw density.

    The endpoint behaviour is factored out as an algebraic weight
    ``((x-lo)(hi-x))^(+-1/2)`` handled by QUADPACK's QAWS rule.
    """
    lo, hi = w.support
    d, dp = w.family.d, w.family.d.derivative()
    g4 = 4.0 * float(w.big_g)
    eps = 1e-9 * (hi - lo)

    def ratio(x):
        # (x-lo)(hi-x) / (4G - d^2) is smooth and positive on the open support;
        # QAWS may sample the endpoints, where only the limit is meaningful
        x = min(max(x, lo + eps), hi - eps)
        return (x - lo) * (hi - x) / max(g4 - float(d(x)) ** 2, 1e-300)

    if w.density_kind is DensityKind.FIBONACCI:
        def integrand(x):
            return fn(x) * abs(float(dp(x))) / math.sqrt(ratio(x))
        alg = (0.5, 0.5)
    else:
        def integrand(x):
            return fn(x) * abs(float(dp(x))) * math.sqrt(ratio(x))
        alg = (-0.5, -0.5)
    with warnings.catch_warnings():
        # QUADPACK flags roundoff once it is at the 1e-13 level; result is kept
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(integrand, lo, hi, weight="alg", wvar=alg, epsabs=0,
                                epsrel=1e-11, limit=200)
    return val


def _product_fn(p: Polynomial, q: Polynomial):
    # float coefficients converted once; the adaptive rule calls this many times
    pc, qc = p.to_float_array(), q.to_float_array()
    return lambda x: P.polyval(x, pc) * P.polyval(x, qc)


def inner_product(p: Polynomial, q: Polynomial, w: WeightSpec, n_nodes: Optional[int] = None,
                  normalized: bool = False) -> float:
    """``int p q density dx`` over the support (raw density unless ``normalized``)."""
    deg = max(int(p.degree), 0) + max(int(q.degree), 0)
    val = _integrate_u(_product_fn(p, q), w, deg, n_nodes)
    return val * w.normalization if normalized else val


def adaptive_inner_product(p: Polynomial, q: Polynomial, w: WeightSpec) -> float:
    """Independent check of :func:`inner_product`: adaptive quadrature in ``x``."""
    return _qaws_x(_product_fn(p, q), w)


def term_indices(f: GfpFamily, n_max: int) -> tuple[int, ...]:
    start = 1 if f.kind is GfpKind.FIBONACCI else 0
    return tuple(range(start, n_max + 1))


def _terms_at(f: GfpFamily, n_max: int, x: np.ndarray) -> np.ndarray:
    """Rows ``G_0..G_n_max`` evaluated at ``x`` by the float recurrence."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    g0, g1 = f.initial_terms()
    out[0] = g0(x) if not g0.is_zero() else 0.0
    if n_max >= 1:
        out[1] = g1(x)
    dv, gv = f.d(x), f.g(x)
    for n in range(2, n_max + 1):
        out[n] = dv * out[n - 1] + gv * out[n - 2]
    return out


def gram(f: GfpFamily, w: WeightSpec, n_max: int, n_nodes: Optional[int] = None) -> GramMatrix:
    """Pairwise inner products of the family's terms under ``w``.

    Fibonacci type uses terms ``1..n_max``; Lucas type ``0..n_max``. The error
    estimate is the largest change when the node count is doubled.
    """
    idx = term_indices(f, n_max)
    deg = 2 * n_max * max(int(f.d.degree), 1)
    if w.is_linear:
        n = n_nodes or _node_count(deg)

        def assemble(nodes):
            u, wt = gauss_chebyshev(nodes, w.density_kind)
            vals = _terms_at(f, n_max, w.x_of_u(u))[list(idx)]
            return _jacobian(w) * (vals * wt) @ vals.T

        entries = assemble(n)
        err = float(np.abs(assemble(2 * n) - entries).max())
    else:
        terms = generate(f, n_max).terms
        entries = np.zeros((len(idx), len(idx)))
        for a, i in enumerate(idx):
            for b in range(a, len(idx)):
                entries[a, b] = entries[b, a] = inner_product(terms[i], terms[idx[b]], w)
        err = float("nan")
    entries = 0.5 * (entries + entries.T)
    return GramMatrix(f, idx, entries, err)


def chebyshev_substitution_value(f: GfpFamily, n: int, x, big_g: Optional[Fraction] = None):
    """Value of ``G_n(x)`` through the classical Chebyshev polynomials.

    Fibonacci type: ``G^((n-1)/2) U_{n-1}(u)``; Lucas type: ``p0 G^(n/2) T_n(u)``
    with ``u = d(x) / (2 sqrt(G))`` and ``g = -G``.
    """
    from scipy.special import eval_chebyt, eval_chebyu

    if big_g is None:
        big_g = -f.g.coeff(0)
    rg = math.sqrt(big_g)
    u = f.d(np.asarray(x, dtype=float)) / (2 * rg)
    if f.kind is GfpKind.FIBONACCI:
        if n == 0:
            return np.zeros_like(u)
        return rg ** (n - 1) * eval_chebyu(n - 1, u)
    return float(f.p0) * rg ** n * eval_chebyt(n, u)


# classification ---------------------------------------------------------------

def classify(f: GfpFamily, n_max: int = 10, tol: float = 1e-8) -> OrthoVerdict:
    """Orthogonal / NotOrthogonal / Undecided.

    * ``d`` linear and ``g`` a positive constant: not orthogonal for any
      measure (the prime-index terms have only non-real roots).
    * ``g`` a positive constant, ``d`` odd: same-parity terms have a strictly
      positive inner product on every symmetric interval (witness reported).
    * ``g`` a negative constant with a valid weight whose Gram off-diagonals
      (as correlations) are within ``tol``: orthogonal.
    """
    if not f.g.is_constant():
        return OrthoVerdict(f, Verdict.UNDECIDED, "none", f"g(x) = {f.g} is not constant")
    g0 = f.g.coeff(0)
    if g0 > 0:
        if f.d.degree == 1:
            return OrthoVerdict(
                f, Verdict.NOT_ORTHOGONAL, "linear_d_positive_g",
                "d linear and g a positive constant: prime-index terms have no real roots, "
                "so any two of them have a nonzero inner product under every positive measure",
            )
        if f.d.is_odd():
            split = complement_split(f, max(n_max, 4))
            witness = split.odd_gram[0][1] if len(split.odd_indices) > 1 else split.even_gram[0][1]
            return OrthoVerdict(
                f, Verdict.NOT_ORTHOGONAL, "same_parity_positive",
                f"same-parity inner product on [-1, 1] is {float(witness):.17g} > 0",
            )
        return OrthoVerdict(f, Verdict.UNDECIDED, "none", "positive g with non-odd, nonlinear d")
    try:
        w = build_weight(f)
    except (PositiveG, NoRealSupport, NonMonotoneD) as exc:
        return OrthoVerdict(f, Verdict.UNDECIDED, "none", str(exc))
    gm = gram(f, w, n_max)
    rel = gm.max_offdiag_relative()
    if rel <= tol:
        return OrthoVerdict(
            f, Verdict.ORTHOGONAL, "chebyshev_substitution",
            f"Gram matrix up to n={n_max} is diagonal within {tol:g}",
            gm.max_offdiag(), w, gm,
        )
    return OrthoVerdict(
        f, Verdict.UNDECIDED, "chebyshev_substitution",
        f"largest off-diagonal correlation {rel:.3g} exceeds {tol:g}", gm.max_offdiag(), w, gm,
    )


# parity structure ---------------------------------------------------------------

def _require_odd_even(f: GfpFamily) -> None:
    if not f.d.is_odd():
        raise HypothesisViolated(f"d(x) = {f.d} is not odd")
    if not f.g.is_even():
        raise HypothesisViolated(f"g(x) = {f.g} is not even")


def parity_product_is_odd(f: GfpFamily, n: int, m: int) -> bool:
    """Exact check that ``G_n G_m`` has only odd powers."""
    _require_odd_even(f)
    return (term(f, n) * term(f, m)).is_odd()


def _symmetric_integral(p: Polynomial, a: Fraction) -> Fraction:
    # only even powers survive on [-a, a]
    return sum((2 * c * a ** (k + 1) / (k + 1) for k, c in enumerate(p.coeffs) if k % 2 == 0),
               Fraction(0))


def parity_vanish_check(f: GfpFamily, a, n: int, m: int) -> float:
    """``int_{-a}^{a} G_n G_m dx`` computed exactly, returned as a float.

    Zero whenever ``n`` and ``m`` have different parity; strictly positive
    for same parity when all coefficients are nonnegative (Fibonacci, Pell).
    """
    _require_odd_even(f)
    a = Fraction(a)
    if a <= 0:
        raise ValueError("a must be positive")
    return float(_symmetric_integral(term(f, n) * term(f, m), a))


def complement_split(f: GfpFamily, n_max: int, weight: Polynomial = ONE,
                     a=1) -> ComplementSplit:
    """Split terms by index parity and compute exact Gram blocks.

    ``weight`` must be an even polynomial, nonnegative on ``[-a, a]``.
    """
    _require_odd_even(f)
    if not weight.is_even():
        raise HypothesisViolated("the weight must be an even function")
    a = Fraction(a)
    terms = generate(f, n_max).terms
    idx = term_indices(f, n_max)
    ev = tuple(i for i in idx if i % 2 == 0)
    od = tuple(i for i in idx if i % 2 == 1)

    def ip(i, j):
        return _symmetric_integral(terms[i] * terms[j] * weight, a)

    return ComplementSplit(
        ev, od,
        tuple(terms[i] for i in ev), tuple(terms[i] for i in od),
        tuple(tuple(ip(i, j) for j in od) for i in ev),
        tuple(tuple(ip(i, j) for j in ev) for i in ev),
        tuple(tuple(ip(i, j) for j in od) for i in od),
    )
