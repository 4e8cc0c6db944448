"""Analytical error-probability bounds for SCW codebooks.

Three families, all on the Poisson channel ``r[k] ~ Poisson(s[k] c_s + c_n)``:

* Chernoff union bound.  For a codeword pair (s, t) the pairwise error
  probability is bounded by ``exp(g(u))`` for every u > 0, with

      g(u) = sum_k lam[k] (exp(w[k] u) - 1),
      lam[k] = s[k] c_s + c_n,
      w[k]   = log((1 + t[k] c_s/c_n) / (1 + s[k] c_s/c_n)).

  g is convex and positions with s[k] = t[k] contribute nothing, so pairs
  are grouped by the multiset of differing level pairs and u is either fixed
  or minimized per group by golden section on (0, 10].

* Skellam union bound (binary codebooks).  The pairwise metric difference is
  a difference of two Poisson sums, so the pairwise error probability is
  exactly ``0.5 f(0) + sum_{x>=1} f(x)`` where f is the Skellam pmf with
  ``lam1 = d (c_s + c_n) / 2`` and ``lam2 = d c_n / 2`` for Hamming
  distance d.  Grouping is by distance.

* Order-statistic bounds (full binary codebooks).  An error is certain when
  the smallest signal-slot count X falls below the largest noise-slot count
  Y and impossible when it exceeds it, hence ``P(X < Y) <= CER <= P(X <= Y)``.
  X is an exact minimum of ``weight`` iid Poissons; for Y both the exact
  discrete maximum pmf and its continuous-analogue form are available.

Values are clamped to [0, 1]; the raw value is reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special as sp

from .channel import CsiPair
from .codes import Codebook
from .errors import CodebookError, CsiError, ParameterError

#: series cutoff for pairwise Skellam sums, relative to the running total
SKELLAM_TERM_CUTOFF = 1e-15
#: tail mass cutoff for order-statistic sums
ORDERSTAT_TAIL_CUTOFF = 1e-12
#: golden-section search interval and relative tolerance for Chernoff u
CHERNOFF_U_RANGE = (1e-9, 10.0)
CHERNOFF_U_RTOL = 1e-6


def poisson_pmf(x: int, lam: float) -> float:
    """P(N = x) for N ~ Poisson(lam); log-gamma form, exact at lam = 0."""
    if lam < 0:
        raise ParameterError(f"Poisson mean must be non-negative, got {lam}")
    if x != int(x):
        raise ParameterError(f"Poisson pmf argument must be an integer, got {x}")
    x = int(x)
    if x < 0:
        return 0.0
    if lam == 0.0:
        return 1.0 if x == 0 else 0.0
    return math.exp(x * math.log(lam) - lam - math.lgamma(x + 1.0))


def poisson_cdf(x: float, lam: float) -> float:
    """P(N <= x); regularized upper incomplete gamma Q(floor(x) + 1, lam)."""
    if lam < 0:
        raise ParameterError(f"Poisson mean must be non-negative, got {lam}")
    if x < 0:
        return 0.0
    return float(sp.gammaincc(math.floor(x) + 1.0, lam))


def bessel_i(order: int, z: float, scaled: bool = False) -> float:
    """Modified Bessel function of the first kind at integer order.

    ``scaled=True`` returns ``exp(-z) I_order(z)``, which stays finite for
    large arguments.  An unscaled evaluation that overflows raises
    OverflowError instead of returning inf.
    """
    if order != int(order):
        raise ParameterError(f"order must be an integer, got {order}")
    if z < 0:
        raise ParameterError(f"argument must be non-negative, got {z}")
    fn = sp.ive if scaled else sp.iv
    value = float(fn(int(order), z))
    if not scaled and math.isinf(value):
        raise OverflowError(
            f"I_{int(order)}({z}) overflows double precision; use scaled=True"
        )
    return value


def skellam_pmf(x: int, lam1: float, lam2: float) -> float:
    """P(N2 - N1 = x) for independent N1 ~ Poisson(lam1), N2 ~ Poisson(lam2).

    Mean is ``lam2 - lam1``.  Evaluated in log space through the scaled
    Bessel function; ``lam2 = 0`` degenerates to a negated Poisson.
    """
    if x != int(x):
        raise ParameterError(f"Skellam pmf argument must be an integer, got {x}")
    x = int(x)
    if lam1 <= 0:
        raise ParameterError(f"lam1 must be positive, got {lam1}")
    if lam2 < 0:
        raise ParameterError(f"lam2 must be non-negative, got {lam2}")
    if lam2 == 0.0:
        return poisson_pmf(-x, lam1)
    s = math.sqrt(lam1 * lam2)
    scaled = bessel_i(x, 2.0 * s, scaled=True)
    if scaled == 0.0:
        return 0.0
    log_pmf = (
        math.log(scaled)
        + 2.0 * s
        - lam1
        - lam2
        + 0.5 * x * (math.log(lam2) - math.log(lam1))
    )
    return math.exp(log_pmf)


@dataclass(frozen=True)
class BoundResult:
    """A bound value with its unclamped counterpart and evaluation detail."""

    kind: str
    value: float
    unclamped: float
    t_used: float | None = None
    details: dict = field(default_factory=dict, compare=False)


def _pair_exponent_terms(
    s_levels: Sequence[int],
    t_levels: Sequence[int],
    level_values: np.ndarray,
    csi: CsiPair,
) -> tuple[tuple[float, float], ...]:
    """(lam, w) per differing position for the pairwise Chernoff exponent."""
    ratio = csi.c_s / csi.c_n
    out = []
    for a, b in zip(s_levels, t_levels):
        if a == b:
            continue
        lam = level_values[a] * csi.c_s + csi.c_n
        w = math.log1p(level_values[b] * ratio) - math.log1p(level_values[a] * ratio)
        out.append((lam, w))
    return tuple(out)


def _chernoff_exponent(terms: Sequence[tuple[float, float]], u: float) -> float:
    return sum(lam * math.expm1(w * u) for lam, w in terms)


def _golden_minimize(fn, lo: float, hi: float, rtol: float) -> float:
    """Golden-section minimizer for a convex scalar function on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > rtol * max(abs(a), abs(b), 1e-12):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _pair_classes(codebook: Codebook, csi: CsiPair):
    """Group ordered codeword pairs by their multiset of differing levels.

    Full codebooks are symmetric under position permutations, so one
    reference codeword represents all rows; partial books walk every
    ordered pair.  Returns (classes, normalizer) where classes maps the
    class key to (count, exponent terms) and the bound is
    ``sum count * exp(g) / normalizer``.
    """
    indices = codebook.index_matrix()
    levels = codebook.symbol_set.as_floats()
    classes: dict[tuple, list] = {}

    def add_pair(row_s, row_t):
        diff = [(int(a), int(b)) for a, b in zip(row_s, row_t) if a != b]
        key = tuple(sorted(diff))
        entry = classes.get(key)
        if entry is None:
            terms = _pair_exponent_terms(
                [a for a, _ in diff], [b for _, b in diff], levels, csi
            )
            classes[key] = [1, terms]
        else:
            entry[0] += 1

    if codebook.kind == "full":
        ref = indices[0]
        for j in range(1, codebook.size):
            add_pair(ref, indices[j])
        normalizer = 1
    else:
        for i in range(codebook.size):
            for j in range(codebook.size):
                if i != j:
                    add_pair(indices[i], indices[j])
        normalizer = codebook.size
    return classes, normalizer


def chernoff_union_bound(
    codebook: Codebook, csi: CsiPair, t: float | str = "optimize"
) -> BoundResult:
    """Union bound over pairwise Chernoff terms.

    ``t`` is either a positive exponent shared by every pair or the string
    ``"optimize"``, in which case each pair class is minimized separately
    (each pairwise bound holds for every positive exponent, so per-class
    minima still sum to a valid bound).
    """
    if codebook.size < 2:
        raise CodebookError("union bound needs at least two codewords")
    if csi.c_n == 0:
        raise CsiError("Chernoff exponent needs c_n > 0")
    optimize = isinstance(t, str)
    if optimize:
        if t != "optimize":
            raise ParameterError(f"t must be a positive real or 'optimize': {t!r}")
    elif not t > 0:
        raise ParameterError(f"Chernoff exponent must be positive, got {t}")

    classes, normalizer = _pair_classes(codebook, csi)
    total = 0.0
    per_class_t = {}
    for key, (count, terms) in classes.items():
        if optimize:
            u = _golden_minimize(
                lambda x: _chernoff_exponent(terms, x),
                CHERNOFF_U_RANGE[0], CHERNOFF_U_RANGE[1], CHERNOFF_U_RTOL,
            )
        else:
            u = float(t)
        per_class_t[key] = u
        total += count * math.exp(_chernoff_exponent(terms, u))
    total /= normalizer
    return BoundResult(
        kind="chernoff_union",
        value=min(1.0, total),
        unclamped=total,
        t_used=None if optimize else float(t),
        details={"n_classes": len(classes), "per_class_t": per_class_t},
    )


def _skellam_pair_term(distance: int, csi: CsiPair) -> float:
    """Exact pairwise error probability at a given even Hamming distance."""
    half = distance // 2
    lam1 = half * (csi.c_s + csi.c_n)
    lam2 = half * csi.c_n
    total = 0.5 * skellam_pmf(0, lam1, lam2)
    x = 1
    cap = int(lam1 + lam2 + 40.0 * math.sqrt(lam1 + lam2) + 100.0)
    while x <= cap:
        term = skellam_pmf(x, lam1, lam2)
        total += term
        if term < SKELLAM_TERM_CUTOFF * total:
            break
        x += 1
    return total


def skellam_union_bound(codebook: Codebook, csi: CsiPair) -> BoundResult:
    """Union bound for binary codebooks with exact pairwise terms.

    Ordered pairs are grouped by Hamming distance (always even for
    constant-weight codewords); a two-codeword book reduces to the exact
    pairwise error probability.
    """
    if not codebook.is_binary:
        raise CodebookError("Skellam bound requires a binary codebook")
    if codebook.size < 2:
        raise CodebookError("union bound needs at least two codewords")
    ones = codebook.index_matrix().astype(np.int64)
    weight = int(ones[0].sum())
    overlap = ones @ ones.T
    dist = 2 * (weight - overlap)
    m = codebook.size
    counts: dict[int, int] = {}
    iu = np.triu_indices(m, k=1)
    for d in dist[iu].tolist():
        counts[d] = counts.get(d, 0) + 2  # ordered pairs
    if any(d % 2 for d in counts):
        raise CodebookError("pairwise Hamming distances must be even")
    total = 0.0
    for d, count in sorted(counts.items()):
        total += count * _skellam_pair_term(d, csi)
    total /= m
    return BoundResult(
        kind="skellam_union",
        value=min(1.0, total),
        unclamped=total,
        details={"distance_counts": counts},
    )


def _min_signal_cdf(x: float, weight: int, csi: CsiPair) -> float:
    """CDF of the smallest of ``weight`` iid Poisson(c_s + c_n) counts."""
    tail = 1.0 - poisson_cdf(x, csi.c_s + csi.c_n)
    return 1.0 - tail**weight


def orderstat_bounds(
    length: int, weight: int, csi: CsiPair, variant: str = "exact"
) -> tuple[float, float]:
    """Error-probability sandwich for the full binary code of one weight.

    Returns ``(P(X < Y), P(X <= Y))`` where X is the minimum count over the
    ``weight`` signal slots and Y the maximum over the remaining noise
    slots.  ``variant`` selects the pmf used for Y: ``"exact"`` differences
    the discrete maximum CDF; ``"continuous"`` uses the density-style form
    ``n f F^(n-1)``, kept for comparison even though it is not a proper pmf
    on integers.
    """
    if variant not in ("exact", "continuous"):
        raise ParameterError(f"variant must be 'exact' or 'continuous': {variant!r}")
    if not 0 < weight < length:
        raise ParameterError(
            f"weight must satisfy 0 < weight < length, got {weight}/{length}"
        )
    n_noise = length - weight
    lower = 0.0
    upper = 0.0
    y = 0
    prev_noise_cdf = 0.0
    while True:
        noise_cdf = poisson_cdf(y, csi.c_n)
        if variant == "exact":
            f_y = noise_cdf**n_noise - prev_noise_cdf**n_noise
        else:
            f_y = (
                n_noise
                * poisson_pmf(y, csi.c_n)
                * noise_cdf ** (n_noise - 1)
            )
        if f_y > 0.0:
            lower += f_y * _min_signal_cdf(y - 1, weight, csi)
            upper += f_y * _min_signal_cdf(y, weight, csi)
        prev_noise_cdf = noise_cdf
        if n_noise * (1.0 - noise_cdf) < ORDERSTAT_TAIL_CUTOFF:
            break
        y += 1
    return lower, upper


def ber_from_cer(cer: float, model: str, mu: float | None = None) -> float:
    """Map a codeword error rate to a bit error rate.

    ``binary_ppm``: every codeword error flips the single information bit
    (mu = 1).  ``random_large_k``: random mappings at large block size give
    mu = 1/2.  ``measured``: caller supplies mu from a simulation.
    """
    if not 0.0 <= cer <= 1.0:
        raise ParameterError(f"CER must lie in [0, 1], got {cer}")
    if model == "binary_ppm":
        factor = 1.0
    elif model == "random_large_k":
        factor = 0.5
    elif model == "measured":
        if mu is None or not 0.0 < mu <= 1.0:
            raise ParameterError(
                f"measured model needs mu in (0, 1], got {mu}"
            )
        factor = mu
    else:
        raise ParameterError(
            "model must be 'binary_ppm', 'random_large_k' or 'measured', "
            f"got {model!r}"
        )
    return min(1.0, factor * cer)
