"""Special functions and analytical error-probability bounds."""

import math

import numpy as np
import pytest

from conftest import (
    book_from_indices,
    make_full_book,
    ref_bessel_i,
    ref_poisson_pmf,
    ref_skellam_pmf,
)
from scwlink.bounds import (
    ber_from_cer,
    bessel_i,
    chernoff_union_bound,
    orderstat_bounds,
    poisson_cdf,
    poisson_pmf,
    skellam_pmf,
    skellam_union_bound,
)
from scwlink.channel import CsiPair, csi_for_sinr_db
from scwlink.errors import CodebookError, CsiError, ParameterError

CSI_10DB = csi_for_sinr_db(10.0, 4.9)


# ------------------------------------------------------ special functions

def test_poisson_pmf_against_factorial_form():
    for lam in [0.3, 1.0, 4.9, 20.0]:
        for k in range(0, 40):
            assert poisson_pmf(k, lam) == pytest.approx(
                ref_poisson_pmf(k, lam), rel=1e-12
            )
    assert poisson_pmf(5, 4.9) == pytest.approx(0.17528961726321135, rel=1e-13)
    assert poisson_pmf(-1, 2.0) == 0.0
    assert poisson_pmf(0, 0.0) == 1.0
    assert poisson_pmf(3, 0.0) == 0.0
    with pytest.raises(ParameterError):
        poisson_pmf(2, -1.0)
    with pytest.raises(ParameterError):
        poisson_pmf(2.5, 1.0)


def test_poisson_cdf_is_cumulative_pmf():
    for lam in [0.5, 4.9, 12.0]:
        total = 0.0
        for k in range(0, 30):
            total += ref_poisson_pmf(k, lam)
            assert poisson_cdf(k, lam) == pytest.approx(total, rel=1e-12)
    # non-integer arguments floor
    assert poisson_cdf(3.7, 4.9) == poisson_cdf(3, 4.9)
    assert poisson_cdf(-0.5, 4.9) == 0.0
    assert poisson_cdf(5, 4.9) == pytest.approx(0.633501485491007, rel=1e-12)


def test_bessel_i_against_power_series():
    for order in range(0, 6):
        for z in [0.0, 0.1, 1.0, 5.0, 20.0]:
            assert bessel_i(order, z) == pytest.approx(
                ref_bessel_i(order, z), rel=1e-10, abs=1e-300
            )
    assert bessel_i(1, 1.0) == pytest.approx(0.565159103992485, rel=1e-12)


def test_bessel_i_scaling_and_overflow():
    with pytest.raises(OverflowError):
        bessel_i(0, 800.0)
    scaled = bessel_i(0, 800.0, scaled=True)
    assert 0.0 < scaled < 1.0
    # scaled value equals exp(-z) I(z) where both are representable
    assert bessel_i(2, 10.0, scaled=True) == pytest.approx(
        math.exp(-10.0) * bessel_i(2, 10.0), rel=1e-12
    )
    with pytest.raises(ParameterError):
        bessel_i(1, -1.0)


def test_skellam_pmf_against_bivariate_sum():
    for lam1, lam2 in [(3.0, 1.0), (0.5, 2.0), (9.25, 2.45)]:
        for x in range(-8, 9):
            assert skellam_pmf(x, lam1, lam2) == pytest.approx(
                ref_skellam_pmf(x, lam1, lam2), rel=1e-10, abs=1e-300
            )


def test_skellam_pmf_normalization_and_mean():
    lam1, lam2 = 4.0, 2.5
    xs = range(-60, 80)
    total = sum(skellam_pmf(x, lam1, lam2) for x in xs)
    mean = sum(x * skellam_pmf(x, lam1, lam2) for x in xs)
    assert total == pytest.approx(1.0, abs=1e-12)
    assert mean == pytest.approx(lam2 - lam1, abs=1e-9)


def test_skellam_pmf_degenerate_second_rate():
    # with lam2 = 0 the difference is a negated first component
    assert skellam_pmf(-3, 2.5, 0.0) == pytest.approx(
        ref_poisson_pmf(3, 2.5), rel=1e-12
    )
    assert skellam_pmf(1, 2.5, 0.0) == 0.0
    with pytest.raises(ParameterError):
        skellam_pmf(0, 0.0, 1.0)
    with pytest.raises(ParameterError):
        skellam_pmf(0, 1.0, -0.1)


# ------------------------------------------------------------- Chernoff

def ref_pair_exponent(s, t, csi, u):
    """exp(g(u)) for one ordered codeword pair, direct transcription."""
    ratio = csi.c_s / csi.c_n
    g = 0.0
    for sv, tv in zip(s, t):
        if sv == tv:
            continue
        lam = sv * csi.c_s + csi.c_n
        w = math.log((1.0 + tv * ratio) / (1.0 + sv * ratio))
        g += lam * (math.expm1(w * u))
    return math.exp(g)


def test_chernoff_two_codeword_book_matches_direct_formula():
    book = book_from_indices((1, 1), [(0, 1), (1, 0)])
    csi = CsiPair(12.0, 3.0)
    res = chernoff_union_bound(book, csi, t=0.5)
    s = book.codewords[0].as_floats().tolist()
    t = book.codewords[1].as_floats().tolist()
    # both orderings, averaged over the two equally likely messages
    expected = 0.5 * (
        ref_pair_exponent(s, t, csi, 0.5) + ref_pair_exponent(t, s, csi, 0.5)
    )
    assert res.value == pytest.approx(expected, rel=1e-12)
    assert res.t_used == 0.5


def test_chernoff_full_book_matches_all_pairs_union():
    book = make_full_book((2, 2, 1))
    csi = CsiPair(9.0, 2.0)
    res = chernoff_union_bound(book, csi, t=0.4)
    vals = book.value_matrix()
    total = 0.0
    for i in range(book.size):
        for j in range(book.size):
            if i != j:
                total += ref_pair_exponent(
                    vals[i].tolist(), vals[j].tolist(), csi, 0.4
                )
    assert res.unclamped == pytest.approx(total / book.size, rel=1e-10)


def test_chernoff_optimized_no_worse_than_fixed():
    book = make_full_book((3, 3))
    opt = chernoff_union_bound(book, CSI_10DB)
    assert opt.t_used is None
    for t in [0.2, 0.5, 0.8, 2.0]:
        fixed = chernoff_union_bound(book, CSI_10DB, t=t)
        assert opt.unclamped <= fixed.unclamped * (1 + 1e-9)
    # symmetric binary pairs optimize near the midpoint
    for t_star in opt.details["per_class_t"].values():
        assert t_star == pytest.approx(0.5, abs=1e-3)


def test_chernoff_clamps_at_one():
    book = make_full_book((5, 5))
    res = chernoff_union_bound(book, CsiPair(0.5, 4.9), t=0.5)
    assert res.value == 1.0
    assert res.unclamped > 1.0


def test_chernoff_decreases_with_sinr():
    book = make_full_book((3, 3))
    vals = [
        chernoff_union_bound(book, csi_for_sinr_db(db, 4.9)).unclamped
        for db in [0, 4, 8, 12, 16]
    ]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_chernoff_input_validation():
    book = make_full_book((3, 3))
    with pytest.raises(CsiError):
        chernoff_union_bound(book, CsiPair(5.0, 0.0))
    single = book_from_indices((1, 1), [(0, 1)])
    with pytest.raises(CodebookError):
        chernoff_union_bound(single, CSI_10DB)
    with pytest.raises(ParameterError):
        chernoff_union_bound(book, CSI_10DB, t=-1.0)


# -------------------------------------------------------------- Skellam

def ref_skellam_pair_term(d: int, csi: CsiPair) -> float:
    lam1 = d * (csi.c_s + csi.c_n) / 2.0
    lam2 = d * csi.c_n / 2.0
    total = 0.5 * ref_skellam_pmf(0, lam1, lam2, terms=800)
    for x in range(1, 400):
        total += ref_skellam_pmf(x, lam1, lam2, terms=800)
    return total


def test_skellam_union_matches_all_pairs_reference():
    book = make_full_book((2, 2))
    csi = CsiPair(8.0, 2.0)
    res = skellam_union_bound(book, csi)
    idx = book.index_matrix()
    total = 0.0
    for i in range(book.size):
        for j in range(book.size):
            if i != j:
                d = int(np.sum(idx[i] != idx[j]))
                total += ref_skellam_pair_term(d, csi)
    assert res.value == pytest.approx(total / book.size, rel=1e-9)


def test_skellam_union_rejects_non_binary():
    with pytest.raises(CodebookError):
        skellam_union_bound(make_full_book((2, 2, 2)), CSI_10DB)


def test_skellam_below_chernoff_at_high_sinr():
    book = make_full_book((5, 5))
    sk = skellam_union_bound(book, CSI_10DB)
    ch = chernoff_union_bound(book, CSI_10DB, t=0.5)
    assert sk.value <= ch.value
    assert sk.value == pytest.approx(0.043401768125180054, rel=1e-10)
    assert ch.value == pytest.approx(0.33632599049081474, rel=1e-10)


# ------------------------------------------------------ order statistics

def ref_orderstat_k2(csi: CsiPair, strict: bool) -> float:
    """P(X < Y) or P(X <= Y) for one signal slot and one noise slot."""
    mu_s = csi.c_s + csi.c_n
    mu_n = csi.c_n
    total = 0.0
    for x in range(0, 200):
        px = ref_poisson_pmf(x, mu_s)
        start = x + 1 if strict else x
        tail = 1.0 - sum(ref_poisson_pmf(y, mu_n) for y in range(0, start))
        total += px * tail
    return total


def test_orderstat_exact_on_two_slot_code():
    csi = CsiPair(6.0, 2.0)
    lo, hi = orderstat_bounds(2, 1, csi)
    assert lo == pytest.approx(ref_orderstat_k2(csi, strict=True), rel=1e-10)
    assert hi == pytest.approx(ref_orderstat_k2(csi, strict=False), rel=1e-10)


def test_orderstat_frozen_values_at_10db():
    lo, hi = orderstat_bounds(10, 5, CSI_10DB)
    assert lo == pytest.approx(0.021429609255301466, rel=1e-10)
    assert hi == pytest.approx(0.0414275048663523, rel=1e-10)
    lo_c, hi_c = orderstat_bounds(10, 5, CSI_10DB, variant="continuous")
    assert lo_c == pytest.approx(0.022545222530155513, rel=1e-10)
    assert hi_c == pytest.approx(0.044168947840672955, rel=1e-10)


def test_orderstat_sane_across_grid():
    for db in [0, 4, 8, 12, 16]:
        csi = csi_for_sinr_db(float(db), 4.9)
        lo, hi = orderstat_bounds(10, 5, csi)
        assert 0.0 <= lo <= hi <= 1.0
        # the continuous-analogue form is not normalized on integer
        # support, so it may exceed one at low SINR; only order is kept
        lo_c, hi_c = orderstat_bounds(10, 5, csi, variant="continuous")
        assert 0.0 <= lo_c <= hi_c


def test_orderstat_decreases_with_sinr():
    uppers = [
        orderstat_bounds(10, 5, csi_for_sinr_db(float(db), 4.9))[1]
        for db in [0, 4, 8, 12, 16]
    ]
    assert all(b < a for a, b in zip(uppers, uppers[1:]))


def test_orderstat_validation():
    with pytest.raises(ParameterError):
        orderstat_bounds(10, 0, CSI_10DB)
    with pytest.raises(ParameterError):
        orderstat_bounds(10, 10, CSI_10DB)
    with pytest.raises(ParameterError):
        orderstat_bounds(10, 5, CSI_10DB, variant="fast")


# ------------------------------------------------------------ CER to BER

def test_ber_from_cer_models():
    assert ber_from_cer(0.04, "binary_ppm") == pytest.approx(0.04)
    assert ber_from_cer(0.04, "random_large_k") == pytest.approx(0.02)
    assert ber_from_cer(0.04, "measured", mu=0.47) == pytest.approx(0.0188)
    with pytest.raises(ParameterError):
        ber_from_cer(0.04, "measured")
    with pytest.raises(ParameterError):
        ber_from_cer(0.04, "measured", mu=1.5)
    with pytest.raises(ParameterError):
        ber_from_cer(0.04, "something")
    with pytest.raises(ParameterError):
        ber_from_cer(-0.01, "binary_ppm")
