"""Birth-and-death chains induced by Lucas-type GFPs.

Discrete time: ``d(x) = c x + h``, ``g = -(c - 1 + h)`` with ``h <= 0`` and
``c > 1 - h > 0`` gives a random walk on {0, 1, ...} with

    row 0:  hold -h/c, up 2/c   (leak to -1: (c - 2 + h)/c)
    row n:  down (c-1+h)/c, hold -h/c, up 1/c

Continuous time: ``d(x) = c x + (k+4)/4``, ``g = -k/4`` with ``c < 0 < k``
gives birth rates ``-2/c, -1/c, -1/c, ...``, death rates ``-k/(4c)`` and
diagonal ``(4+k)/(4c)``.

All rates are exact rationals; conversion to float happens only when a
numeric matrix is requested.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import GeneratorAxiomViolation, HypothesisViolated
from .gfp import GfpFamily, GfpKind
from .polycore import Polynomial, as_fraction

__all__ = [
    "DiscreteChain",
    "ContinuousGenerator",
    "PotentialCoefficients",
    "ChainKind",
    "Ergodicity",
    "ErgodicityVerdict",
    "IsRandomWalkSequence",
    "NotRandomWalkSequence",
    "walk_from_lucas",
    "generator_from_lucas",
    "potential_coefficients",
    "ergodicity",
    "rw_polynomial_test",
    "walk_recurrence_coefficients",
]


@dataclass(frozen=True)
class DiscreteChain:
    """Level-independent nearest-neighbour walk with its own first row."""

    p0: Fraction
    r0: Fraction
    p: Fraction
    r: Fraction
    q: Fraction
    c: Optional[Fraction] = None
    h: Optional[Fraction] = None

    def __post_init__(self):
        for name in ("p0", "r0", "p", "r", "q"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not (self.p0 > 0 and self.p > 0 and self.q > 0):
            raise HypothesisViolated("up and down probabilities must be positive")
        if self.r < 0 or self.r0 < 0:
            raise HypothesisViolated("holding probabilities must be nonnegative")
        if self.p + self.r + self.q != 1:
            raise HypothesisViolated("interior rows must sum to 1")
        if self.p0 + self.r0 > 1:
            raise HypothesisViolated("p_0 + r_0 <= 1 fails")

    @property
    def q0(self) -> Fraction:
        """Probability of leaking from state 0 to the absorbing state -1."""
        return 1 - self.p0 - self.r0

    @property
    def is_stochastic(self) -> bool:
        return self.q0 == 0

    def up(self, n: int) -> Fraction:
        return self.p0 if n == 0 else self.p

    def hold(self, n: int) -> Fraction:
        return self.r0 if n == 0 else self.r

    def down(self, n: int) -> Fraction:
        return self.q0 if n == 0 else self.q

    def matrix_exact(self, size: int) -> list[list[Fraction]]:
        m = [[Fraction(0)] * size for _ in range(size)]
        for i in range(size):
            m[i][i] = self.hold(i)
            if i + 1 < size:
                m[i][i + 1] = self.up(i)
            if i > 0:
                m[i][i - 1] = self.down(i)
        return m

    def matrix(self, size: int) -> np.ndarray:
        """Float ``size x size`` truncation (the last row loses its up-mass)."""
        m = np.zeros((size, size))
        idx = np.arange(size)
        m[idx, idx] = float(self.r)
        m[idx[:-1], idx[:-1] + 1] = float(self.p)
        m[idx[1:], idx[1:] - 1] = float(self.q)
        m[0, 0] = float(self.r0)
        if size > 1:
            m[0, 1] = float(self.p0)
        return m

    def lucas_family(self) -> GfpFamily:
        """Lucas-type family (``p0 = 2``) whose terms are twice the walk polynomials.

        Requires the first row to be the Lucas-shaped one: ``r_0 = r`` and
        ``p_0 = 2p``.
        """
        if self.r0 != self.r or self.p0 != 2 * self.p:
            raise HypothesisViolated("first row is not of the Lucas shape (r_0 = r, p_0 = 2p)")
        d = Polynomial([-self.r / self.p, 1 / self.p])
        return GfpFamily(GfpKind.LUCAS, d, Polynomial([-self.q / self.p]), Fraction(2), d)


@dataclass(frozen=True)
class ContinuousGenerator:
    lam0: Fraction
    lam: Fraction
    mu0: Fraction
    mu: Fraction
    c: Optional[Fraction] = None
    k: Optional[Fraction] = None

    def __post_init__(self):
        for name in ("lam0", "lam", "mu0", "mu"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not (self.lam0 > 0 and self.lam > 0):
            raise GeneratorAxiomViolation("birth rates must be positive")
        if self.mu < 0:
            raise GeneratorAxiomViolation("death rates must be nonnegative")
        if self.mu0 < 0:
            raise GeneratorAxiomViolation(
                f"row 0 sums to {-self.mu0} > 0, which no generator allows"
            )

    @property
    def beta0(self) -> Fraction:
        return -(self.lam0 + self.mu0)

    @property
    def beta(self) -> Fraction:
        return -(self.lam + self.mu)

    @property
    def is_conservative(self) -> bool:
        return self.mu0 == 0

    def birth(self, n: int) -> Fraction:
        return self.lam0 if n == 0 else self.lam

    def death(self, n: int) -> Fraction:
        return self.mu0 if n == 0 else self.mu

    def diagonal(self, n: int) -> Fraction:
        return self.beta0 if n == 0 else self.beta

    def matrix_exact(self, size: int) -> list[list[Fraction]]:
        m = [[Fraction(0)] * size for _ in range(size)]
        for i in range(size):
            m[i][i] = self.diagonal(i)
            if i + 1 < size:
                m[i][i + 1] = self.birth(i)
            if i > 0:
                m[i][i - 1] = self.death(i)
        return m

    def matrix(self, size: int) -> np.ndarray:
        m = np.zeros((size, size))
        idx = np.arange(size)
        m[idx, idx] = float(self.beta)
        m[idx[:-1], idx[:-1] + 1] = float(self.lam)
        m[idx[1:], idx[1:] - 1] = float(self.mu)
        m[0, 0] = float(self.beta0)
        if size > 1:
            m[0, 1] = float(self.lam0)
        return m

    def lucas_family(self) -> GfpFamily:
        """Lucas-type family (``p0 = 2``) with ``d = c x + (k+4)/4``, ``g = -k/4``.

        Derived from the rates: ``-x Q_j = mu Q_{j-1} + beta Q_j + lam Q_{j+1}``
        gives ``d = -(x + beta)/lam`` and ``g = -mu/lam``.
        """
        if self.beta0 != self.beta or self.lam0 != 2 * self.lam:
            raise HypothesisViolated("row 0 is not of the Lucas shape (beta_0 = beta, lam_0 = 2 lam)")
        d = Polynomial([-self.beta / self.lam, -1 / self.lam])
        return GfpFamily(GfpKind.LUCAS, d, Polynomial([-self.mu / self.lam]), Fraction(2), d)


Chain = Union[DiscreteChain, ContinuousGenerator]


def walk_from_lucas(c, h) -> DiscreteChain:
    c, h = as_fraction(c), as_fraction(h)
    if h > 0:
        raise HypothesisViolated(f"h <= 0 fails (h = {h})")
    if not 1 - h > 0:
        raise HypothesisViolated(f"1 - h > 0 fails (h = {h})")
    if not c > 1 - h:
        raise HypothesisViolated(f"c > 1 - h fails (c = {c}, 1 - h = {1 - h})")
    big_g = c - 1 + h
    if 2 / c - h / c > 1:
        # only possible for non-integer c, h with 0 < c - 1 + h < 1
        raise HypothesisViolated(f"p_0 + r_0 <= 1 fails (p_0 + r_0 = {(2 - h) / c})")
    return DiscreteChain(p0=2 / c, r0=-h / c, p=1 / c, r=-h / c, q=big_g / c, c=c, h=h)


def generator_from_lucas(c, k) -> ContinuousGenerator:
    c, k = as_fraction(c), as_fraction(k)
    if not c < 0:
        raise HypothesisViolated(f"c < 0 fails (c = {c})")
    if not k > 0:
        raise HypothesisViolated(f"k > 0 fails (k = {k})")
    lam0 = -2 / c
    lam = -1 / c
    mu = -k / (4 * c)
    # the printed row 0 is ((4+k)/(4c), -2/c); its deficit is the leak mu_0
    mu0 = (4 - k) / (4 * c)
    if mu0 < 0:
        raise GeneratorAxiomViolation(
            f"k = {k} < 4 makes row 0 sum to {(k - 4) / (4 * c)} > 0"
        )
    return ContinuousGenerator(lam0=lam0, lam=lam, mu0=mu0, mu=mu, c=c, k=k)


# potential coefficients ---------------------------------------------------------

@dataclass(frozen=True)
class PotentialCoefficients:
    pi: tuple[Fraction, ...]
    ratio: Fraction
    converges: bool
    limit: Optional[Fraction]

    @property
    def sum_partial(self) -> Fraction:
        return sum(self.pi, Fraction(0))


def _rates(chain: Chain) -> tuple[Fraction, Fraction, Fraction]:
    """(first-step up, interior up, interior down)."""
    if isinstance(chain, DiscreteChain):
        return chain.p0, chain.p, chain.q
    return chain.lam0, chain.lam, chain.mu


def potential_coefficients(chain: Chain, n_max: int = 20) -> PotentialCoefficients:
    """``pi_0 = 1``, ``pi_j = up_0 ... up_{j-1} / (down_1 ... down_j)``.

    The chains here are level-independent past state 0, so the tail is
    geometric with ratio ``up/down`` and the series is summed in closed form.
    """
    up0, up, down = _rates(chain)
    pis = [Fraction(1)]
    for j in range(1, n_max + 1):
        pis.append(pis[-1] * (up0 if j == 1 else up) / down)
    ratio = up / down
    if ratio < 1:
        limit = 1 + (up0 / down) / (1 - ratio)
        return PotentialCoefficients(tuple(pis), ratio, True, limit)
    return PotentialCoefficients(tuple(pis), ratio, False, None)


class ChainKind(enum.Enum):
    REFLECTING_DISCRETE = "ReflectingDiscrete"
    ABSORBING_DISCRETE = "AbsorbingDiscrete"
    CONTINUOUS = "Continuous"


class Ergodicity(enum.Enum):
    ERGODIC = "Ergodic"
    NOT_ERGODIC = "NotErgodic"


@dataclass(frozen=True)
class ErgodicityVerdict:
    chain_kind: ChainKind
    verdict: Ergodicity
    series_value: Optional[Fraction]  # None means divergent
    ratio: Fraction
    # the narrower sufficient window quoted for these families
    # (c - 1 + h > 2 discrete absorbing, k > 8 continuous); None if n/a
    sufficient_window: Optional[bool]


def ergodicity(chain: Chain, n_max: int = 20) -> ErgodicityVerdict:
    """Ergodic iff the potential-coefficient series converges."""
    pc = potential_coefficients(chain, n_max)
    window: Optional[bool] = None
    if isinstance(chain, DiscreteChain):
        kind = ChainKind.REFLECTING_DISCRETE if chain.is_stochastic else ChainKind.ABSORBING_DISCRETE
        if kind is ChainKind.ABSORBING_DISCRETE and chain.c is not None:
            window = chain.c - 1 + chain.h > 2
    else:
        kind = ChainKind.CONTINUOUS
        if chain.k is not None:
            window = chain.k > 8
    verdict = Ergodicity.ERGODIC if pc.converges else Ergodicity.NOT_ERGODIC
    return ErgodicityVerdict(kind, verdict, pc.limit, pc.ratio, window)


# random-walk polynomial criterion --------------------------------------------------

@dataclass(frozen=True)
class IsRandomWalkSequence:
    """Decomposition ``alpha_n = r_n``, ``beta_{n+1} = p_n q_{n+1}``.

    For level-independent input each tuple has a single entry valid for all n.
    ``q[0]`` is the leak ``1 - p_0 - r_0`` in the sequence case.
    """

    p: tuple
    q: tuple
    r: tuple


@dataclass(frozen=True)
class NotRandomWalkSequence:
    reason: str


def _exact_sqrt(x: Fraction):
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return math.sqrt(x)


def _coerce(v):
    return v if isinstance(v, float) else as_fraction(v)


def rw_polynomial_test(alpha, beta, p0=None):
    """Decide whether monic recurrence coefficients come from a random walk.

    ``alpha``/``beta`` are either scalars (level-independent case: solve
    ``p q = beta``, ``p + q = 1 - alpha``; the smaller root is reported as
    ``p``) or sequences ``alpha_0..alpha_N`` and ``beta_1..beta_N``. In the
    sequence case ``p_0`` defaults to ``1 - alpha_0`` (reflecting at 0) and the
    remaining probabilities follow from ``q_{n+1} = beta_{n+1}/p_n``,
    ``p_{n+1} = 1 - r_{n+1} - q_{n+1}``.
    """
    if not isinstance(alpha, (list, tuple)):
        a, b = _coerce(alpha), _coerce(beta)
        if a < 0:
            return NotRandomWalkSequence("alpha_n >= 0 fails")
        if not a < 1:
            return NotRandomWalkSequence("alpha_n < 1 fails")
        if not b > 0:
            return NotRandomWalkSequence("beta_{n+1} > 0 fails (Favard positivity)")
        disc = (1 - a) ** 2 - 4 * b
        if disc < 0:
            return NotRandomWalkSequence("(1 - alpha)^2 >= 4 beta fails")
        root = _exact_sqrt(disc) if isinstance(disc, Fraction) else math.sqrt(disc)
        p = ((1 - a) - root) / 2
        q = ((1 - a) + root) / 2
        return IsRandomWalkSequence((p,), (q,), (a,))

    alphas = [_coerce(v) for v in alpha]
    betas = [_coerce(v) for v in beta]
    if len(betas) != len(alphas) - 1:
        raise ValueError("need alpha_0..alpha_N and beta_1..beta_N")
    for n, a in enumerate(alphas):
        if a < 0:
            return NotRandomWalkSequence(f"alpha_n >= 0 fails at n = {n}")
    for n, b in enumerate(betas, start=1):
        if not b > 0:
            return NotRandomWalkSequence(f"beta_n > 0 fails at n = {n} (Favard positivity)")
    p = [(1 - alphas[0]) if p0 is None else _coerce(p0)]
    if not p[0] > 0:
        return NotRandomWalkSequence("p_0 > 0 fails")
    if p[0] + alphas[0] > 1:
        return NotRandomWalkSequence("p_0 + r_0 <= 1 fails")
    q = [1 - p[0] - alphas[0]]
    for n in range(1, len(alphas)):
        qn = betas[n - 1] / p[n - 1]
        pn = 1 - alphas[n] - qn
        if not pn > 0:
            return NotRandomWalkSequence(f"p_n > 0 fails at n = {n}")
        q.append(qn)
        p.append(pn)
    return IsRandomWalkSequence(tuple(p), tuple(q), tuple(alphas))


def walk_recurrence_coefficients(chain: DiscreteChain, n_max: int) -> tuple[list, list]:
    """Monic recurrence ``(alpha_0..alpha_N, beta_1..beta_N)`` of the walk polynomials."""
    alphas = [chain.hold(n) for n in range(n_max + 1)]
    betas = [chain.up(n) * chain.down(n + 1) for n in range(n_max)]
    return alphas, betas
