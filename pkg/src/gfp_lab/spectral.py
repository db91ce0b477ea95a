"""Karlin-McGregor representation of the GFP-induced chains.

The walk polynomials are half the Lucas-type terms (``p0 = 2``) of the
underlying family, so the spectral measure is the Lucas weight normalized to
unit mass: the arcsine law in ``u = d(x) / (2 sqrt(G))``. Transition
probabilities are integrals against it, done with Gauss-Chebyshev rules in
``u``.

Three oracles are provided for checking: dense powers of a truncated
transition matrix, the exponential of a truncated generator, and Monte Carlo.
"""
from __future__ import annotations

import enum
import functools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np
from scipy.linalg import expm

from .errors import HypothesisViolated, SupportViolation, TruncationTooSmall
from .markov import ContinuousGenerator, DiscreteChain, potential_coefficients
from .ortho import DensityKind, WeightSpec, build_weight, gauss_chebyshev
from .polycore import ONE, X, Polynomial

__all__ = [
    "Method",
    "WalkPolynomials",
    "SpectralMeasure",
    "TransitionResult",
    "EmpiricalDistribution",
    "walk_polys",
    "spectral_measure",
    "km_discrete",
    "km_continuous",
    "power_oracle",
    "expm_oracle",
    "mc_simulate",
    "thread_count",
]

Chain = Union[DiscreteChain, ContinuousGenerator]

DISCRETE_TRUNCATION = 200
CONTINUOUS_TRUNCATION = 300
MC_CHUNK = 1 << 16


class Method(enum.Enum):
    KARLIN_MCGREGOR = "KarlinMcGregor"
    MATRIX_POWER = "MatrixPower"
    MATRIX_EXPONENTIAL = "MatrixExponential"
    MONTE_CARLO = "MonteCarlo"


@dataclass(frozen=True)
class WalkPolynomials:
    chain: Chain
    Q: tuple[Polynomial, ...]

    @property
    def n_max(self) -> int:
        return len(self.Q) - 1

    def __getitem__(self, j: int) -> Polynomial:
        return self.Q[j]


def walk_polys(chain: Chain, n_max: int) -> WalkPolynomials:
    """Exact ``Q_0..Q_n_max``.

    Discrete: ``x Q_j = q_j Q_{j-1} + r_j Q_j + p_j Q_{j+1}``.
    Continuous: ``-x Q_j = mu_j Q_{j-1} + beta_j Q_j + lam_j Q_{j+1}``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    discrete = isinstance(chain, DiscreteChain)
    var = X if discrete else -X
    if discrete:
        up, hold, down = chain.up, chain.hold, chain.down
    else:
        up, hold, down = chain.birth, chain.diagonal, chain.death
    qs = [ONE, (var - hold(0)) / up(0)]
    for j in range(1, n_max):
        nxt = (var - hold(j)) * qs[j] - down(j) * qs[j - 1]
        qs.append(nxt / up(j))
    return WalkPolynomials(chain, tuple(qs))


@dataclass(frozen=True)
class SpectralMeasure:
    chain: Chain
    weight: WeightSpec
    support: tuple[float, float]

    @property
    def total_mass(self) -> float:
        return self.integrate(lambda x: np.ones_like(x), 0)

    def nodes(self, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
        """Points in ``x`` and probability weights of an ``n_nodes`` Gauss rule."""
        u, wt = gauss_chebyshev(n_nodes, DensityKind.LUCAS)
        return self.weight.x_of_u(u), wt * self.weight.normalization

    def integrate(self, fn, degree: int, n_nodes: Optional[int] = None) -> float:
        """``int fn dmu``; exact for polynomial ``fn`` of the given degree."""
        n = n_nodes or math.ceil(degree / 2) + 8
        x, wt = self.nodes(n)
        return float(np.dot(wt, fn(x)))

    def moment(self, k: int) -> float:
        return self.integrate(lambda x: x ** k, k)


@functools.lru_cache(maxsize=64)
def spectral_measure(chain: Chain) -> SpectralMeasure:
    w = build_weight(chain.lucas_family(), DensityKind.LUCAS)
    lo, hi = w.support
    slack = 1e-12
    if isinstance(chain, DiscreteChain):
        if lo < -1 - slack or hi > 1 + slack:
            raise SupportViolation(f"support [{lo}, {hi}] is not inside [-1, 1]")
    elif lo < -slack:
        raise SupportViolation(f"support [{lo}, {hi}] reaches below 0")
    return SpectralMeasure(chain, w, (lo, hi))


@dataclass(frozen=True)
class TransitionResult:
    i: int
    j: int
    horizon: float
    value: float
    method: Method
    error_bar: Optional[float] = None

    def as_record(self) -> dict:
        rec = {"i": self.i, "j": self.j, "horizon": self.horizon, "value": self.value,
               "method": self.method.value}
        if self.error_bar is not None:
            rec["error_bar"] = self.error_bar
        return rec


def _q_values(chain: Chain, jmax: int, x: np.ndarray) -> np.ndarray:
    """``Q_0..Q_jmax`` at ``x`` by the float recurrence."""
    discrete = isinstance(chain, DiscreteChain)
    var = x if discrete else -x
    if discrete:
        up, hold, down = chain.up, chain.hold, chain.down
    else:
        up, hold, down = chain.birth, chain.diagonal, chain.death
    out = np.empty((jmax + 1,) + x.shape)
    out[0] = 1.0
    if jmax >= 1:
        out[1] = (var - float(hold(0))) / float(up(0))
    for j in range(1, jmax):
        out[j + 1] = ((var - float(hold(j))) * out[j] - float(down(j)) * out[j - 1]) / float(up(j))
    return out


def _pi(chain: Chain, j: int) -> float:
    return float(potential_coefficients(chain, j).pi[j])


def km_discrete(chain: DiscreteChain, i: int, j: int, n: int) -> TransitionResult:
    """``P_ij(n) = pi_j int x^n Q_i Q_j dmu``; the integrand is a polynomial."""
    if min(i, j, n) < 0:
        raise ValueError("states and steps must be nonnegative")
    mu = spectral_measure(chain)
    x, wt = mu.nodes(math.ceil((n + i + j) / 2) + 8)
    q = _q_values(chain, max(i, j), x)
    val = _pi(chain, j) * float(np.dot(wt, x ** n * q[i] * q[j]))
    return TransitionResult(i, j, n, val, Method.KARLIN_MCGREGOR)


def km_continuous(gen: ContinuousGenerator, i: int, j: int, t: float,
                  tol: float = 1e-13) -> TransitionResult:
    """``P_ij(t) = pi_j int exp(-x t) Q_i Q_j dmu``.

    The exponential factor is entire, so the Gauss rule converges
    geometrically; the node count is doubled until two rules agree.
    """
    if min(i, j) < 0 or t < 0:
        raise ValueError("states and time must be nonnegative")
    mu = spectral_measure(gen)
    pij = _pi(gen, j)

    def rule(n_nodes):
        x, wt = mu.nodes(n_nodes)
        q = _q_values(gen, max(i, j), x)
        return pij * float(np.dot(wt, np.exp(-x * t) * q[i] * q[j]))

    n_nodes = max(32, math.ceil((i + j) / 2) + 8)
    prev = rule(n_nodes)
    for _ in range(8):
        n_nodes *= 2
        cur = rule(n_nodes)
        if abs(cur - prev) <= tol:
            return TransitionResult(i, j, t, cur, Method.KARLIN_MCGREGOR)
        prev = cur
    return TransitionResult(i, j, t, cur, Method.KARLIN_MCGREGOR, abs(cur - prev))


# oracles ----------------------------------------------------------------------

def power_oracle(chain: DiscreteChain, size: int, n: int, max_state: int = 0) -> np.ndarray:
    """``P^n`` of the ``size x size`` truncation.

    Entries with both indices at most ``max_state`` are exact only if no path
    of length ``n`` reaches the cut, i.e. ``size > max_state + n``.
    """
    if size <= max_state + n:
        raise TruncationTooSmall(f"size {size} <= max_state + n = {max_state + n}")
    return np.linalg.matrix_power(chain.matrix(size), n)


def expm_oracle(gen: ContinuousGenerator, t: float, size: int = CONTINUOUS_TRUNCATION) -> np.ndarray:
    """``exp(t Q)`` of the ``size x size`` truncated generator (Pade scaling and squaring)."""
    return expm(t * gen.matrix(size))


# Monte Carlo ----------------------------------------------------------------------

ABSORBED = -1


@dataclass(frozen=True)
class EmpiricalDistribution:
    initial: int
    steps: int
    trials: int
    seed: int
    counts: dict  # state -> count; ABSORBED for the phantom state -1

    def frequency(self, state: int) -> float:
        return self.counts.get(state, 0) / self.trials

    def stderr(self, state: int) -> float:
        f = self.frequency(state)
        return math.sqrt(f * (1.0 - f) / self.trials)

    def result(self, j: int) -> TransitionResult:
        return TransitionResult(self.initial, j, self.steps, self.frequency(j),
                                Method.MONTE_CARLO, self.stderr(j))

    def rows(self) -> list[tuple[int, int, float, float]]:
        return [(s, self.counts[s], self.frequency(s), self.stderr(s)) for s in sorted(self.counts)]


def thread_count() -> int:
    """Worker cap from ``GFP_LAB_THREADS`` (default: CPU count)."""
    raw = os.environ.get("GFP_LAB_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_chunk(chain: DiscreteChain, i: int, n: int, size: int, seed_seq) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed_seq))
    up = np.array([float(chain.p0), float(chain.p)])
    stay = np.array([float(chain.p0 + chain.r0), float(chain.p + chain.r)])
    state = np.full(size, i, dtype=np.int64)
    for _ in range(n):
        alive = state >= 0
        u = rng.random(size)
        row = np.minimum(state, 1)
        step = np.where(u < up[row], 1, np.where(u < stay[row], 0, -1))
        state = np.where(alive, state + step, state)
    return state


def mc_simulate(chain: DiscreteChain, i: int, n: int, trials: int, seed: int,
                threads: Optional[int] = None) -> EmpiricalDistribution:
    """Simulate ``trials`` independent walks of ``n`` steps from state ``i``.

    Trials are split into fixed-size chunks, each with its own Philox stream
    spawned from ``seed``; the chunk layout and the integer tallies do not
    depend on the number of worker threads, so results are reproducible.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n_chunks = -(-trials // MC_CHUNK)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(MC_CHUNK, trials - k * MC_CHUNK) for k in range(n_chunks)]
    workers = min(threads or thread_count(), n_chunks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        finals = list(pool.map(lambda a: _run_chunk(chain, i, n, *a), zip(sizes, seqs)))
    states, counts = np.unique(np.concatenate(finals), return_counts=True)
    tally = {int(s): int(c) for s, c in zip(states, counts)}
    return EmpiricalDistribution(i, n, trials, seed, tally)
