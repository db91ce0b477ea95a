import math
from fractions import Fraction as F

import numpy as np
import pytest

from gfp_lab import gfp, spectral
from gfp_lab.errors import SupportViolation, TruncationTooSmall
from gfp_lab.markov import generator_from_lucas, potential_coefficients, walk_from_lucas
from gfp_lab.polycore import ONE, X, Polynomial
from gfp_lab.spectral import (
    Method, expm_oracle, km_continuous, km_discrete, mc_simulate, power_oracle, spectral_measure, walk_polys,
)

from oracles import exact_matrix_power_entry

SIXTEEN = walk_from_lucas(16, -14)
CHEB = walk_from_lucas(2, 0)
GEN = generator_from_lucas(-2, 4)

# exact (P^n)_00 of the c=16, h=-14 walk, computed with sympy rationals
P00_4 = F(20387, 32768)
P00_10 = F(107931212557, 274877906944)


def test_frozen_values_reproduce():
    args = (SIXTEEN.p0, SIXTEEN.r0, SIXTEEN.p, SIXTEEN.r, SIXTEEN.q)
    assert exact_matrix_power_entry(*args, 8, 4, 0, 0) == P00_4


def test_walk_polys_chebyshev():
    w = walk_polys(CHEB, 6)
    assert w[0] == ONE
    assert w[1] == X
    assert w[2] == Polynomial([-1, 0, 2])
    # the walk polynomials are the first-kind Chebyshev family
    t = gfp.lookup("Chebyshev first kind")
    assert all(w[j] == gfp.term(t, j) for j in range(7))


def test_walk_polys_stochastic_value_at_one():
    w = walk_polys(SIXTEEN, 10)
    assert all(w[j](1) == 1 for j in range(11))
    assert isinstance(w[10](1), F)


@pytest.mark.parametrize("chain", [SIXTEEN, CHEB, walk_from_lucas(3, 0), walk_from_lucas(8, -3)])
def test_walk_polys_recurrence_and_lucas_terms(chain):
    w = walk_polys(chain, 10)
    for j in range(1, 10):
        lhs = X * w[j]
        rhs = chain.down(j) * w[j - 1] + chain.hold(j) * w[j] + chain.up(j) * w[j + 1]
        assert lhs == rhs
    assert X * w[0] == chain.hold(0) * w[0] + chain.up(0) * w[1]
    f = chain.lucas_family()
    assert all(w[j] == gfp.term(f, j) / 2 for j in range(1, 11))


def test_walk_polys_continuous_recurrence():
    g = generator_from_lucas(-1, 8)
    w = walk_polys(g, 8)
    for j in range(1, 8):
        assert -X * w[j] == g.death(j) * w[j - 1] + g.diagonal(j) * w[j] + g.birth(j) * w[j + 1]
    assert w[1] == (-X - g.beta0) / g.lam0
    with pytest.raises(ValueError):
        walk_polys(g, 0)


def test_measure_chebyshev():
    mu = spectral_measure(CHEB)
    assert mu.support == pytest.approx((-1.0, 1.0), abs=1e-15)
    assert mu.total_mass == pytest.approx(1.0, abs=1e-12)
    assert mu.moment(2) == pytest.approx(0.5, abs=1e-14)
    xs = np.linspace(-0.95, 0.95, 9)
    dens = mu.weight.density(xs) * mu.weight.normalization
    assert np.allclose(dens, 1 / (math.pi * np.sqrt(1 - xs ** 2)), rtol=1e-12)


def test_measure_sixteen_support():
    mu = spectral_measure(SIXTEEN)
    assert mu.support == pytest.approx((12 / 16, 1.0), abs=1e-15)
    assert abs(mu.total_mass - 1) < 1e-10


def test_measure_support_formula():
    for c, h in [(5, 0), (8, -3), (F(9, 2), -1), (30, -7)]:
        c, h = F(c), F(h)
        rg = math.sqrt(c - 1 + h)
        lo, hi = spectral_measure(walk_from_lucas(c, h)).support
        assert lo == pytest.approx(float((-2 * rg - h) / c), abs=1e-14)
        assert hi == pytest.approx(float((2 * rg - h) / c), abs=1e-14)
        assert -1 <= lo < hi <= 1


def test_measure_continuous_nonnegative():
    for c, k in [(-1, 8), (-2, 4), (-3, 5), (-1, 16)]:
        mu = spectral_measure(generator_from_lucas(c, k))
        lo, hi = mu.support
        expect_lo = -(math.sqrt(k) - 2) ** 2 / (4 * c)
        assert lo == pytest.approx(expect_lo, abs=1e-13) and lo >= -1e-15
        assert abs(mu.total_mass - 1) < 1e-10


def test_support_violation():
    ch = walk_from_lucas(2, 0)
    # bypass validation to obtain a chain whose measure leaves [-1, 1]
    bad = walk_from_lucas(2, 0)
    object.__setattr__(bad, "r", F(1))
    object.__setattr__(bad, "r0", F(1))
    assert bad != ch
    with pytest.raises(SupportViolation):
        spectral_measure(bad)


def test_km_identity_and_one_step():
    for chain in (SIXTEEN, CHEB, walk_from_lucas(3, 0)):
        for i in range(6):
            for j in range(6):
                assert abs(km_discrete(chain, i, j, 0).value - (i == j)) < 1e-9
        assert abs(km_discrete(chain, 0, 1, 1).value - float(chain.p0)) < 1e-9


def test_km_frozen_exact_values():
    assert abs(km_discrete(SIXTEEN, 0, 0, 4).value - float(P00_4)) < 1e-12
    assert abs(km_discrete(SIXTEEN, 0, 0, 10).value - float(P00_10)) < 1e-12
    r = km_discrete(SIXTEEN, 0, 0, 4)
    assert r.method is Method.KARLIN_MCGREGOR and r.error_bar is None


@pytest.mark.parametrize("chain", [SIXTEEN, walk_from_lucas(3, 0), walk_from_lucas(8, -3)])
def test_km_against_exact_matrix_power(chain):
    args = (chain.p0, chain.r0, chain.p, chain.r, chain.q)
    for i, j, n in [(0, 0, 6), (2, 3, 5), (4, 1, 7)]:
        exact = exact_matrix_power_entry(*args, 16, n, i, j)
        assert abs(km_discrete(chain, i, j, n).value - float(exact)) < 1e-12


def test_km_values_are_probabilities():
    for i in range(5):
        for j in range(5):
            for n in range(0, 12, 3):
                v = km_discrete(walk_from_lucas(3, 0), i, j, n).value
                assert -1e-9 <= v <= 1 + 1e-9


@pytest.mark.parametrize("chain", [SIXTEEN, CHEB, walk_from_lucas(8, -3)])
def test_orthonormality_scaling(chain):
    mu = spectral_measure(chain)
    w = walk_polys(chain, 10)
    pis = potential_coefficients(chain, 10).pi
    for j in range(11):
        # exact evaluation at each node; expanded-coefficient Horner cancels badly for c = 16
        val = mu.integrate(lambda x, q=w[j]: np.array([float(q(F(v))) ** 2 for v in x]), 2 * j)
        assert abs(val - 1 / float(pis[j])) < 1e-9 * max(1.0, 1 / float(pis[j]))


def test_chapman_kolmogorov():
    chain = SIXTEEN
    m, n, K = 4, 5, 40
    for i in range(3):
        for j in range(3):
            lhs = km_discrete(chain, i, j, m + n).value
            rhs = sum(km_discrete(chain, i, k, m).value * km_discrete(chain, k, j, n).value for k in range(K))
            assert abs(lhs - rhs) < 1e-7


def test_continuous_identity_and_expm():
    for i in range(4):
        for j in range(4):
            assert abs(km_continuous(GEN, i, j, 0.0).value - (i == j)) < 1e-8
    e = expm_oracle(GEN, 0.5)
    assert abs(km_continuous(GEN, 0, 0, 0.5).value - e[0, 0]) < 1e-6


def test_continuous_row_sum_conservative():
    total = sum(km_continuous(GEN, 0, j, 1.0).value for j in range(60))
    assert abs(total - 1) < 1e-6


def test_continuous_leaky_generator_matches_expm():
    g = generator_from_lucas(-1, 8)
    e = expm_oracle(g, 0.7)
    for i in range(5):
        for j in range(5):
            assert abs(km_continuous(g, i, j, 0.7).value - e[i, j]) < 1e-9


def test_semigroup():
    s, t, K = 0.3, 0.6, 60
    ps = np.array([[km_continuous(GEN, i, k, s).value for k in range(K)] for i in range(6)])
    pt = np.array([[km_continuous(GEN, k, j, t).value for j in range(6)] for k in range(K)])
    pst = np.array([[km_continuous(GEN, i, j, s + t).value for j in range(6)] for i in range(6)])
    assert np.abs(ps @ pt - pst).max() < 1e-5


def test_generator_derivative_central():
    h = 1e-4
    size = 6
    a = np.array([[km_continuous(GEN, i, j, 2 * h).value for j in range(size)] for i in range(size)])
    b = np.eye(size)
    central = (a - b) / (2 * h)
    mid = np.array([[km_continuous(GEN, i, j, h).value for j in range(size)] for i in range(size)])
    # central difference at t = h against P'(h) = Q P(h)
    assert np.abs(central - GEN.matrix(size) @ mid).max() < 1e-4


def test_power_oracle_basics():
    m = power_oracle(SIXTEEN, 50, 1)
    assert np.array_equal(m, SIXTEEN.matrix(50))
    p = power_oracle(SIXTEEN, 60, 10, 10)
    assert np.allclose(p[:40].sum(axis=1), 1.0, atol=1e-14)
    big = power_oracle(SIXTEEN, 120, 10, 10)
    assert np.abs(big[:11, :11] - p[:11, :11]).max() < 1e-14
    with pytest.raises(TruncationTooSmall):
        power_oracle(SIXTEEN, 20, 10, 10)


def test_mc_deterministic_step():
    emp = mc_simulate(CHEB, 0, 1, 5000, seed=1)
    assert emp.frequency(1) == 1.0 and emp.stderr(1) == 0.0


def test_mc_reproducible_and_thread_independent():
    a = mc_simulate(SIXTEEN, 0, 10, 200_000, seed=42, threads=1)
    b = mc_simulate(SIXTEEN, 0, 10, 200_000, seed=42, threads=4)
    c = mc_simulate(SIXTEEN, 0, 10, 200_000, seed=43, threads=4)
    assert a.counts == b.counts
    assert a.counts != c.counts
    assert sum(a.counts.values()) == 200_000


def test_mc_absorbed_mass():
    chain = walk_from_lucas(3, 0)
    emp = mc_simulate(chain, 0, 5, 200_000, seed=7)
    p5 = power_oracle(chain, 40, 5)
    expect = 1 - p5[0].sum()
    assert abs(emp.frequency(spectral.ABSORBED) - expect) <= 4 * emp.stderr(spectral.ABSORBED)


def test_mc_matches_km_sixteen():
    emp = mc_simulate(SIXTEEN, 0, 10, 200_000, seed=5)
    for j in range(4):
        km = km_discrete(SIXTEEN, 0, j, 10).value
        assert abs(emp.frequency(j) - km) <= 4 * emp.stderr(j)
    r = emp.result(0)
    assert r.method is Method.MONTE_CARLO and r.error_bar > 0


def test_mc_trials_validated():
    with pytest.raises(ValueError):
        mc_simulate(SIXTEEN, 0, 3, 0, seed=1)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("GFP_LAB_THREADS", "3")
    assert spectral.thread_count() == 3
    monkeypatch.setenv("GFP_LAB_THREADS", "junk")
    assert spectral.thread_count() >= 1
