"""Shared reference implementations for the test suite.

Everything in here is written independently of the package internals:
plain-Python enumeration, factorial-form pmfs, and direct series sums.
Tests compare package outputs against these slower reference routes.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from scwlink.codes import Codebook, Codeword, SymbolSet, WeightVector


def ref_enumerate_indices(counts: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All distinct arrangements of the level multiset, sorted."""
    pool = []
    for level, count in enumerate(counts):
        pool.extend([level] * count)
    return sorted(set(itertools.permutations(pool)))


_LOG_FACT = [0.0]


def _log_factorial(k: int) -> float:
    while len(_LOG_FACT) <= k:
        _LOG_FACT.append(_LOG_FACT[-1] + math.log(len(_LOG_FACT)))
    return _LOG_FACT[k]


def ref_poisson_pmf(k: int, lam: float) -> float:
    if k < 0:
        return 0.0
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(-lam + k * math.log(lam) - _log_factorial(k))


def ref_log_likelihood(values: list[float], obs, c_s: float, c_n: float) -> float:
    """Log of prod_k Poisson(obs[k]; values[k] c_s + c_n), plain loop."""
    total = 0.0
    for v, r in zip(values, obs):
        mu = v * c_s + c_n
        r = int(r)
        if mu == 0.0:
            if r != 0:
                return -math.inf
            continue
        total += r * math.log(mu) - mu - math.lgamma(r + 1.0)
    return total


def ref_bessel_i(order: int, z: float, terms: int = 120) -> float:
    """Power series sum_m (z/2)^(2m+order) / (m! (m+order)!)."""
    half = z / 2.0
    total = 0.0
    for m in range(terms):
        log_term = (2 * m + order) * math.log(half) if half > 0 else -math.inf
        log_term -= math.lgamma(m + 1.0) + math.lgamma(m + order + 1.0)
        total += math.exp(log_term)
    if z == 0.0:
        return 1.0 if order == 0 else 0.0
    return total


def ref_skellam_pmf(x: int, lam1: float, lam2: float, terms: int = 400) -> float:
    """P(N2 - N1 = x) by direct bivariate truncated sum."""
    total = 0.0
    for n1 in range(terms):
        n2 = n1 + x
        if n2 < 0:
            continue
        total += ref_poisson_pmf(n1, lam1) * ref_poisson_pmf(n2, lam2)
    return total


def ref_entropy(probabilities, base: float) -> float:
    total = 0.0
    for p in probabilities:
        p = float(p)
        if p > 0.0:
            total -= p * math.log(p)
    return total / math.log(base)


def make_full_book(counts: tuple[int, ...], n_levels: int | None = None) -> Codebook:
    from scwlink.codes import enumerate_full_scw

    n_levels = n_levels if n_levels is not None else len(counts)
    return enumerate_full_scw(SymbolSet.uniform(n_levels), WeightVector(counts))


def book_from_indices(
    counts: tuple[int, ...], rows: list[tuple[int, ...]], kind: str = "partial"
) -> Codebook:
    symbol_set = SymbolSet.uniform(len(counts))
    codewords = tuple(Codeword(tuple(r), symbol_set) for r in rows)
    return Codebook(symbol_set, WeightVector(counts), codewords, kind=kind)


def draw_channel_instance(rng: np.random.Generator, values, c_lo=0.3, c_hi=60.0):
    """Random CSI pair (log-uniform) plus one Poisson observation."""
    c_s = math.exp(rng.uniform(math.log(c_lo), math.log(c_hi)))
    c_n = math.exp(rng.uniform(math.log(0.2), math.log(20.0)))
    word = rng.permutation(np.asarray(values))
    obs = rng.poisson(word * c_s + c_n)
    return c_s, c_n, obs.astype(np.int64)


def exact_fraction_weight(counts: tuple[int, ...], n_levels: int) -> Fraction:
    levels = [Fraction(i, n_levels - 1) for i in range(n_levels)]
    return sum((c * lv for c, lv in zip(counts, levels)), Fraction(0))
