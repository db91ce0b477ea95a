"""Generalized Fibonacci polynomial families.

A family is fixed by ``d(x)``, ``g(x)`` and the initial terms::

    Fibonacci type:  G0 = 0,  G1 = 1
    Lucas type:      G0 = p0, G1 = p1(x),   d = alpha * p1,  alpha = 2 / p0

and ``G_n = d G_{n-1} + g G_{n-2}``. Terms can be produced three ways: by the
recurrence, by the closed binomial sums and (numerically) by the Binet form.
"""
from __future__ import annotations

import cmath
import enum
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping, Optional

from .errors import DegenerateDiscriminant, HypothesisViolated, WrongKind
from .polycore import ONE, ZERO, Polynomial, as_fraction

__all__ = [
    "GfpKind",
    "GfpFamily",
    "GfpSequence",
    "BinetParts",
    "registry_table1",
    "registry",
    "lookup",
    "conjugate_of",
    "generate",
    "term",
    "expand_fibonacci_type",
    "expand_lucas_type",
    "expand",
    "binet_parts",
    "binet_eval",
    "parity_reflect_check",
    "reflection_sign",
    "family_from_json",
    "family_to_json",
    "resolve_family",
]


class GfpKind(enum.Enum):
    FIBONACCI = "fibonacci"
    LUCAS = "lucas"


_VALID_P0 = {Fraction(1), Fraction(-1), Fraction(2), Fraction(-2)}


@dataclass(frozen=True)
class GfpFamily:
    kind: GfpKind
    d: Polynomial
    g: Polynomial
    p0: Optional[Fraction] = None
    p1: Optional[Polynomial] = None
    name: Optional[str] = field(default=None, compare=False)
    # Jacobsthal-style rows have deg d < deg g; allowed only for generation.
    allow_low_degree_d: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        if self.d.is_zero() or self.g.is_zero():
            raise HypothesisViolated("d(x) and g(x) must be nonzero")
        if not self.allow_low_degree_d and not self.d.degree > self.g.degree:
            raise HypothesisViolated(
                f"deg d = {self.d.degree} must exceed deg g = {self.g.degree}"
            )
        if self.kind is GfpKind.FIBONACCI:
            if self.p0 is not None or self.p1 is not None:
                raise HypothesisViolated("Fibonacci-type families have fixed initial terms 0, 1")
            return
        if self.p0 is None or self.p1 is None:
            raise HypothesisViolated("Lucas-type families need p0 and p1")
        p0 = as_fraction(self.p0)
        object.__setattr__(self, "p0", p0)
        if p0 not in _VALID_P0:
            raise HypothesisViolated(f"p0 must be one of +-1, +-2, got {p0}")
        if self.d != self.p1 * self.alpha:
            raise HypothesisViolated(f"d must equal alpha*p1 with alpha = 2/p0 = {self.alpha}")

    @property
    def alpha(self) -> Optional[Fraction]:
        if self.kind is GfpKind.FIBONACCI:
            return None
        return Fraction(2) / self.p0

    @property
    def g_is_constant(self) -> bool:
        return self.g.is_constant()

    def initial_terms(self) -> tuple[Polynomial, Polynomial]:
        if self.kind is GfpKind.FIBONACCI:
            return ZERO, ONE
        return Polynomial([self.p0]), self.p1

    def label(self) -> str:
        return self.name or f"{self.kind.value}(d={self.d}, g={self.g})"


@dataclass(frozen=True)
class GfpSequence:
    family: GfpFamily
    terms: tuple[Polynomial, ...]

    def __getitem__(self, n: int) -> Polynomial:
        return self.terms[n]

    def __len__(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class BinetParts:
    """Binet roots ``a``, ``b`` of ``t^2 - d t - g`` at one point."""

    x0: complex
    a_val: complex
    b_val: complex
    disc: complex


# registry -------------------------------------------------------------------

def _fib(name, d, g):
    return GfpFamily(GfpKind.FIBONACCI, Polynomial(d), Polynomial(g), name=name)


def _luc(name, p0, p1, d, g, **kw):
    return GfpFamily(
        GfpKind.LUCAS, Polynomial(d), Polynomial(g), Fraction(p0), Polynomial(p1), name=name, **kw
    )


_TABLE1 = (
    _fib("Fibonacci", [0, 1], [1]),
    _luc("Lucas", 2, [0, 1], [0, 1], [1]),
    _fib("Pell", [0, 2], [1]),
    _luc("Pell-Lucas", 2, [0, 2], [0, 2], [1]),
    _luc("Pell-Lucas-prime", 1, [0, 1], [0, 2], [1]),
    _fib("Fermat", [0, 3], [-2]),
    _luc("Fermat-Lucas", 2, [0, 3], [0, 3], [-2]),
    _fib("Chebyshev second kind", [0, 2], [-1]),
    _luc("Chebyshev first kind", 1, [0, 1], [0, 2], [-1]),
    _fib("Morgan-Voyce B", [2, 1], [-1]),
    _luc("Morgan-Voyce C", 2, [2, 1], [2, 1], [-1]),
    _fib("Vieta", [0, 1], [-1]),
    _luc("Vieta-Lucas", 2, [0, 1], [0, 1], [-1]),
)

# Outside the standard thirteen: g = 2x is not of lower degree than d = 1.
_EXTRA = (
    GfpFamily(GfpKind.FIBONACCI, Polynomial([1]), Polynomial([0, 2]), name="Jacobsthal",
              allow_low_degree_d=True),
    _luc("Jacobsthal-Lucas", 2, [1], [1], [0, 2], allow_low_degree_d=True),
)

# Lucas-type partner -> Fibonacci-type partner.
_CONJUGATES = {
    "Lucas": "Fibonacci",
    "Pell-Lucas-prime": "Pell",
    "Pell-Lucas": "Pell",
    "Fermat-Lucas": "Fermat",
    "Chebyshev first kind": "Chebyshev second kind",
    "Jacobsthal-Lucas": "Jacobsthal",
    "Morgan-Voyce C": "Morgan-Voyce B",
    "Vieta-Lucas": "Vieta",
}
_FIB_TO_LUCAS = {fib: luc for luc, fib in _CONJUGATES.items() if luc != "Pell-Lucas"}

_ALIASES = {
    "chebyshev2": "Chebyshev second kind",
    "chebyshevu": "Chebyshev second kind",
    "chebyshev1": "Chebyshev first kind",
    "chebyshevt": "Chebyshev first kind",
    "morganvoyce": "Morgan-Voyce B",
    "morganvoyceb": "Morgan-Voyce B",
    "morganvoycec": "Morgan-Voyce C",
    "pelllucasprime": "Pell-Lucas-prime",
}


def _key(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


_BY_KEY = {_key(f.name): f for f in _TABLE1 + _EXTRA}
_BY_KEY.update({k: _BY_KEY[_key(v)] for k, v in _ALIASES.items()})


def registry_table1() -> list[GfpFamily]:
    """The thirteen standard named families, in canonical order."""
    return list(_TABLE1)


def registry() -> list[GfpFamily]:
    """The thirteen standard families plus the Jacobsthal pair."""
    return list(_TABLE1 + _EXTRA)


def lookup(name: str) -> GfpFamily:
    try:
        return _BY_KEY[_key(name)]
    except KeyError:
        known = ", ".join(f.name for f in _TABLE1 + _EXTRA)
        raise KeyError(f"unknown family {name!r}; known: {known}") from None


def conjugate_of(f: GfpFamily) -> GfpFamily:
    """Partner family with the same ``d`` and ``g`` and the opposite kind.

    Registry families map to their registered partner. Otherwise a Fibonacci-type
    family gets the Lucas partner with ``p0 = 2`` (so ``p1 = d``).
    """
    if f.name is not None and _key(f.name) in _BY_KEY and _BY_KEY[_key(f.name)] == f:
        if f.name in _CONJUGATES:
            return lookup(_CONJUGATES[f.name])
        if f.name in _FIB_TO_LUCAS:
            return lookup(_FIB_TO_LUCAS[f.name])
    if f.kind is GfpKind.LUCAS:
        return GfpFamily(GfpKind.FIBONACCI, f.d, f.g, allow_low_degree_d=f.allow_low_degree_d)
    return GfpFamily(GfpKind.LUCAS, f.d, f.g, Fraction(2), f.d,
                     allow_low_degree_d=f.allow_low_degree_d)


# generation ---------------------------------------------------------------

@lru_cache(maxsize=256)
def _terms(f: GfpFamily, n_max: int) -> tuple[Polynomial, ...]:
    if n_max <= 1:
        return f.initial_terms()[: n_max + 1]
    prev = _terms(f, n_max - 1)
    return prev + (f.d * prev[-1] + f.g * prev[-2],)


def generate(f: GfpFamily, n_max: int) -> GfpSequence:
    """Exact terms ``0..n_max`` by the three-term recurrence."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    # build iteratively so deep n_max does not recurse through the cache
    for k in range(2, n_max, 64):
        _terms(f, k)
    return GfpSequence(f, _terms(f, n_max))


def term(f: GfpFamily, n: int) -> Polynomial:
    if n < 0:
        raise ValueError("negative index")
    return generate(f, max(n, 1)).terms[n]


def expand_fibonacci_type(f: GfpFamily, n: int) -> Polynomial:
    """``sum_i C(n-i-1, i) d^(n-2i-1) g^i`` for ``n >= 1``."""
    if f.kind is not GfpKind.FIBONACCI:
        raise WrongKind("binomial Fibonacci expansion needs a Fibonacci-type family")
    if n < 1:
        raise ValueError("expansion is defined for n >= 1")
    total = ZERO
    for i in range((n - 1) // 2 + 1):
        total = total + (f.d ** (n - 2 * i - 1)) * (f.g ** i) * math.comb(n - i - 1, i)
    return total


def expand_lucas_type(f: GfpFamily, n: int) -> Polynomial:
    """``(1/alpha) sum_i n/(n-i) C(n-i, i) d^(n-2i) g^i`` for ``n >= 1``."""
    if f.kind is not GfpKind.LUCAS:
        raise WrongKind("binomial Lucas expansion needs a Lucas-type family")
    if n < 1:
        raise ValueError("expansion is defined for n >= 1")
    total = ZERO
    for i in range(n // 2 + 1):
        c = Fraction(n, n - i) * math.comb(n - i, i)
        total = total + (f.d ** (n - 2 * i)) * (f.g ** i) * c
    return total / f.alpha


def expand(f: GfpFamily, n: int) -> Polynomial:
    if f.kind is GfpKind.FIBONACCI:
        return expand_fibonacci_type(f, n)
    return expand_lucas_type(f, n)


# Binet ----------------------------------------------------------------------

def binet_parts(f: GfpFamily, x0: complex) -> BinetParts:
    x0 = complex(x0)
    dv = f.d(x0)
    gv = f.g(x0)
    disc = dv * dv + 4 * gv
    root = cmath.sqrt(disc)
    return BinetParts(x0, (dv + root) / 2, (dv - root) / 2, disc)


def binet_eval(f: GfpFamily, n: int, x0: complex) -> complex:
    """Closed-form value of the ``n``-th term at ``x0``.

    The principal square root is used; both Binet forms are symmetric in
    ``a`` and ``b`` so the branch does not matter.
    """
    parts = binet_parts(f, x0)
    if abs(parts.disc) < 1e-14:
        raise DegenerateDiscriminant(f"d^2 + 4g vanishes at x0 = {x0}")
    a, b = parts.a_val, parts.b_val
    if f.kind is GfpKind.FIBONACCI:
        return (a ** n - b ** n) / (a - b)
    return (a ** n + b ** n) / float(f.alpha)


# parity ---------------------------------------------------------------------

def _check_odd_even(f: GfpFamily) -> None:
    if not f.d.is_odd():
        raise HypothesisViolated(f"d(x) = {f.d} is not an odd polynomial")
    if not f.g.is_even():
        raise HypothesisViolated(f"g(x) = {f.g} is not an even polynomial")


def reflection_sign(f: GfpFamily, n: int) -> Optional[int]:
    """``s`` with ``G_n(-x) = s G_n(x)``, or ``None`` if neither sign works."""
    t = term(f, n)
    r = t.reflect()
    if r == t:
        return 1
    if r == -t:
        return -1
    return None


def parity_reflect_check(f: GfpFamily, n: int, exponent: Optional[int] = None) -> bool:
    """Exact check of ``G_n(-x) = (-1)**e G_n(x)`` for odd ``d`` and even ``g``.

    By default ``e = n + 1`` for Fibonacci type and ``e = n`` for Lucas type
    (``L_0 = p0`` is a nonzero constant, so it cannot be odd). Pass
    ``exponent`` to test any other sign convention.
    """
    _check_odd_even(f)
    if f.kind is GfpKind.LUCAS and n < 1 and exponent is None:
        raise ValueError("Lucas-type reflection check is defined for n >= 1")
    if exponent is None:
        exponent = n + 1 if f.kind is GfpKind.FIBONACCI else n
    t = term(f, n)
    return t.reflect() == (t if exponent % 2 == 0 else -t)


# JSON ---------------------------------------------------------------------

def family_to_json(f: GfpFamily) -> dict[str, Any]:
    out: dict[str, Any] = {"kind": f.kind.value, "d": f.d.to_strings(), "g": f.g.to_strings()}
    if f.kind is GfpKind.LUCAS:
        out["p0"] = str(f.p0)
        out["p1"] = f.p1.to_strings()
    if f.name:
        out["name"] = f.name
    return out


def family_from_json(spec: Mapping[str, Any] | str) -> GfpFamily:
    if isinstance(spec, str):
        spec = json.loads(spec)
    kind = GfpKind(str(spec["kind"]).lower())
    d = Polynomial(spec["d"])
    g = Polynomial(spec["g"])
    name = spec.get("name")
    # only registry rows may break the degree condition
    low = False
    if name is not None and _key(name) in _BY_KEY:
        low = _BY_KEY[_key(name)].allow_low_degree_d
    if kind is GfpKind.FIBONACCI:
        return GfpFamily(kind, d, g, name=name, allow_low_degree_d=low)
    p0 = as_fraction(spec.get("p0", "2"))
    p1 = Polynomial(spec["p1"]) if "p1" in spec else d / (Fraction(2) / p0)
    return GfpFamily(kind, d, g, p0, p1, name=name, allow_low_degree_d=low)


def resolve_family(text: str) -> GfpFamily:
    """Registry name or inline JSON spec."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return family_from_json(stripped)
    return lookup(stripped)
