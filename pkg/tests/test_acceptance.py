"""Acceptance suite: thirteen numbered criteria, one test (and one
pass/fail line under ``pytest -v``) per criterion.

Heavy Monte Carlo runs share module-scoped fixtures.  Every statistical
assertion uses Wilson intervals at z = 1.96.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import gammaln

from conftest import make_full_book
from scwlink.bounds import (
    chernoff_union_bound,
    orderstat_bounds,
    skellam_union_bound,
)
from scwlink.channel import (
    ChannelParams,
    CsiPair,
    CsiPrior,
    csi_for_sinr_db,
    csi_from_params,
    sinr_db,
)
from scwlink.codes import (
    SymbolSet,
    WeightVector,
    average_release,
    binary_rate_bounds,
    code_rate,
    code_rate_asymptote,
    codebook_size,
    enumerate_full_scw,
    info_rate,
    min_euclidean_distance,
    random_partial_codebook,
)
from scwlink.detectors import (
    binary_cw_detect,
    coherent_ml_detect,
    csi_free_detect,
    noncoherent_ml_detect,
)
from scwlink.sim import binomial_interval, run_sweep, sweep_csv_text, write_sweep
from scwlink.streams import substream

SINR_GRID_DB = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0]
NOISE_MEAN = 4.9
ACC_SEED = 1309


def _report(n: int, message: str) -> None:
    print(f"criterion {n:02d}: {message}")


# ---------------------------------------------------------------------------
# shared Monte Carlo data


@pytest.fixture(scope="module")
def binary_k10_sweep():
    """Full binary length-10 weight-5 code swept over the SINR grid."""
    doc = {
        "code": {"levels": ["0", "1"], "weights": [5, 5]},
        "channel": {
            "type": "sinr_grid",
            "sinr_db": SINR_GRID_DB,
            "c_n": NOISE_MEAN,
        },
        "detector": "csi_free",
        "master_seed": ACC_SEED,
        "trials": 120_000,
        "max_errors": None,
        "ci": "wilson",
    }
    t0 = time.perf_counter()
    res = run_sweep(doc)
    print(f"shared length-10 sweep: {time.perf_counter() - t0:.1f}s")
    return res


# ---------------------------------------------------------------------------
# 1-2: pinned detection examples


def test_criterion_01_known_ternary_assignment():
    t0 = time.perf_counter()
    got = csi_free_detect(
        WeightVector((2, 3, 1)),
        SymbolSet.uniform(3),
        [12, 4, 8, 6, 15, 10],
    )
    elapsed = time.perf_counter() - t0
    assert got.as_floats().tolist() == [0.5, 0, 0.5, 0, 1, 0.5]
    assert elapsed < 0.05
    _report(1, f"assignment exact, {elapsed * 1e6:.0f} us")


def test_criterion_02_known_binary_tie_set():
    book = make_full_book((3, 3))
    res = coherent_ml_detect(
        book, [12, 4, 8, 6, 15, 8], csi_for_sinr_db(10.0, NOISE_MEAN)
    )
    tied = {book.codewords[i].indices for i in res.tie_indices}
    assert tied == {(1, 0, 0, 0, 1, 1), (1, 0, 1, 0, 1, 0)}
    _report(2, f"tie set exact, {res.tie_count} codewords")


# ---------------------------------------------------------------------------
# 3: assignment detection attains the enumerated likelihood maximum


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _likelihood_matrix(level_sums, log_mu_rows, mean_sums, obs_const):
    """(N, M) exact log-likelihoods from per-level observation sums."""
    ll = np.zeros(level_sums[0].shape)
    for lvl, sums in enumerate(level_sums):
        ll += sums * log_mu_rows[:, lvl][:, None]
    return ll - mean_sums[:, None] - obs_const[:, None]


def test_criterion_03_assignment_matches_exact_likelihood_argmax():
    t0 = time.perf_counter()
    n_instances = 1000
    n_configs = 0
    checked_free = checked_mix = 0
    for n_levels in (2, 3):
        symbol_set = SymbolSet.uniform(n_levels)
        values = np.array(symbol_set.as_floats())
        for k in range(2, 9):
            for counts in _compositions(k, n_levels):
                if codebook_size(WeightVector(counts)) < 2:
                    continue
                n_configs += 1
                book = enumerate_full_scw(symbol_set, WeightVector(counts))
                idx = book.index_matrix().astype(np.int64)
                lookup = {cw.indices: j for j, cw in enumerate(book.codewords)}
                indicators = [
                    (idx == lvl).astype(np.float64) for lvl in range(n_levels)
                ]
                rng = substream(ACC_SEED, 3, n_levels, k, *counts)

                c_s = np.exp(rng.uniform(math.log(0.5), math.log(60.0), n_instances))
                c_n = np.exp(rng.uniform(math.log(0.2), math.log(20.0), n_instances))
                truth = rng.integers(0, book.size, n_instances)
                mu = values[idx[truth]] * c_s[:, None] + c_n[:, None]
                obs = rng.poisson(mu).astype(np.int64)

                obs_f = obs.astype(np.float64)
                level_sums = [obs_f @ ind.T for ind in indicators]  # (N, M)
                log_mu = np.log(values[None, :] * c_s[:, None] + c_n[:, None])
                mean_sums = (
                    np.array(counts)
                    * (values[None, :] * c_s[:, None] + c_n[:, None])
                ).sum(axis=1)
                obs_const = gammaln(obs_f + 1.0).sum(axis=1)
                ll = _likelihood_matrix(level_sums, log_mu, mean_sums, obs_const)
                ll_max = ll.max(axis=1)

                for i in range(n_instances):
                    free = csi_free_detect(
                        book.weights, symbol_set, obs[i]
                    )
                    j = lookup[free.indices]
                    assert ll[i, j] >= ll_max[i] - 1e-9
                checked_free += n_instances

                # five random two-atom mixtures per configuration
                for p in range(5):
                    a_cs = np.exp(rng.uniform(math.log(0.5), math.log(60.0), 2))
                    a_cn = np.exp(rng.uniform(math.log(0.2), math.log(20.0), 2))
                    w0 = float(rng.uniform(0.15, 0.85))
                    prior = CsiPrior(
                        (CsiPair(a_cs[0], a_cn[0]), CsiPair(a_cs[1], a_cn[1])),
                        (w0, 1.0 - w0),
                    )
                    atom_ll = []
                    for a in range(2):
                        lm = np.log(values * a_cs[a] + a_cn[a])
                        ms = float(
                            (np.array(counts) * (values * a_cs[a] + a_cn[a])).sum()
                        )
                        part = np.zeros_like(ll)
                        for lvl in range(n_levels):
                            part += level_sums[lvl] * lm[lvl]
                        atom_ll.append(part - ms - obs_const[:, None])
                    mix = np.logaddexp(
                        math.log(w0) + atom_ll[0],
                        math.log(1.0 - w0) + atom_ll[1],
                    )
                    mix_max = mix.max(axis=1)
                    for i in range(n_instances):
                        res = noncoherent_ml_detect(book, obs[i], prior)
                        j = lookup[res.codeword.indices]
                        # optimal for the mixture and inside the common set
                        assert mix[i, j] >= mix_max[i] - 1e-9
                        assert ll[i, j] >= ll_max[i] - 1e-9
                    checked_mix += n_instances
    elapsed = time.perf_counter() - t0
    _report(
        3,
        f"{n_configs} configurations, {checked_free} assignment and "
        f"{checked_mix} mixture decisions optimal, {elapsed:.0f}s",
    )


# ---------------------------------------------------------------------------
# 4: integer correlation equals coherent detection on binary subsets


def test_criterion_04_correlation_matches_coherent_argmax_set():
    t0 = time.perf_counter()
    full = make_full_book((5, 5))
    n_instances = 1000
    for seed in range(20):
        book = random_partial_codebook(full, Fraction(1, 2), seed=seed)
        rows = book.value_matrix()
        rng = substream(ACC_SEED, 4, seed)
        for _ in range(n_instances):
            c_s = 10.0 ** float(rng.uniform(-3.0, 3.0))
            c_n = 10.0 ** float(rng.uniform(-3.0, 3.0))
            csi = CsiPair(c_s, c_n)
            truth = int(rng.integers(0, book.size))
            obs = rng.poisson(rows[truth] * c_s + c_n).astype(np.int64)
            corr = binary_cw_detect(book, obs)
            coh = coherent_ml_detect(book, obs, csi)
            assert set(corr.tie_indices) == set(coh.tie_indices)
    _report(
        4,
        f"20 subsets x {n_instances} instances, argmax sets identical, "
        f"{time.perf_counter() - t0:.0f}s",
    )


# ---------------------------------------------------------------------------
# 5: rate formulas against exact big-integer arithmetic


def test_criterion_05_rate_formulas_and_bounds():
    t0 = time.perf_counter()
    n_checked = 0
    for n_levels in (2, 3, 4):
        for k in range(2, 21):
            for counts in _compositions(k, n_levels):
                wv = WeightVector(counts)
                m = codebook_size(wv)
                exact = math.log(m) / (k * math.log(n_levels))
                assert code_rate(wv) == pytest.approx(
                    exact, rel=1e-12, abs=1e-12
                )
                assert info_rate(wv) == pytest.approx(
                    math.log2(m) / k, rel=1e-12, abs=1e-12
                )
                n_checked += 1

    for k in range(2, 65):
        for w in range(1, k):
            lo, hi = binary_rate_bounds(k, w)
            exact = math.log2(math.comb(k, w)) / k
            assert lo <= exact <= hi

    # balanced and fixed-ratio codes climb toward the entropy ceiling
    for denom in (2, 3, 4):
        seq = []
        for k in range(denom, 65, denom):
            w = k // denom
            seq.append(code_rate(WeightVector((k - w, w))))
        asym = code_rate_asymptote(
            [Fraction(denom - 1, denom), Fraction(1, denom)], 2
        )
        assert all(b > a for a, b in zip(seq, seq[1:]))
        assert all(r < asym for r in seq)
    for n_levels in (2, 3, 4):
        seq = [
            code_rate(WeightVector.balanced(n_levels * m, n_levels))
            for m in range(1, 17)
        ]
        assert all(b > a for a, b in zip(seq, seq[1:]))
        assert all(r < 1.0 for r in seq)
    _report(
        5,
        f"{n_checked} weight vectors at 1e-12, sandwich and monotone "
        f"approach hold, {time.perf_counter() - t0:.0f}s",
    )


# ---------------------------------------------------------------------------
# 6-7: analytical bounds against shared Monte Carlo data


def test_criterion_06_orderstat_sandwich_covers_mc(binary_k10_sweep):
    rows = []
    for p in binary_k10_sweep.points:
        csi = CsiPair(p.c_s, p.c_n)
        lo, hi = orderstat_bounds(10, 5, csi)
        lo_c, hi_c = orderstat_bounds(10, 5, csi, variant="continuous")
        assert p.trials >= 100_000
        # the 95% interval of the estimate must meet [lo, hi]
        assert p.cer_ci_low <= hi and p.cer_ci_high >= lo, (
            p.sinr_db, p.cer, lo, hi
        )
        rows.append(
            f"{p.sinr_db:4.1f} dB: cer={p.cer:.5f} in [{lo:.5f}, {hi:.5f}]"
            f" (continuous [{lo_c:.5f}, {hi_c:.5f}])"
        )
    _report(6, "sandwich holds at every point\n  " + "\n  ".join(rows))


def test_criterion_07_union_bounds_dominate_mc(binary_k10_sweep):
    t0 = time.perf_counter()
    ternary = SymbolSet.uniform(3)
    vectors = [(2, 2, 2), (3, 2, 1), (1, 2, 3), (3, 0, 3), (5, 0, 1)]
    n_points = 0
    for counts in vectors:
        book = enumerate_full_scw(ternary, WeightVector(counts))
        doc = {
            "code": {"levels": ["0", "1/2", "1"], "weights": list(counts)},
            "channel": {
                "type": "sinr_grid",
                "sinr_db": SINR_GRID_DB,
                "c_n": NOISE_MEAN,
            },
            "detector": "csi_free",
            "master_seed": ACC_SEED + 7,
            "trials": 12_000,
            "max_errors": None,
            "ci": "wilson",
        }
        res = run_sweep(doc)
        for p in res.points:
            bound = chernoff_union_bound(
                book, CsiPair(p.c_s, p.c_n), t=0.5
            ).value
            assert bound >= p.cer_ci_low, (counts, p.sinr_db, p.cer, bound)
            n_points += 1

    # binary code: the distance-difference bound sits between the
    # exponential bound and the estimate at high SINR
    book10 = make_full_book((5, 5))
    for p in binary_k10_sweep.points:
        if p.sinr_db < 10.0:
            continue
        csi = CsiPair(p.c_s, p.c_n)
        sk = skellam_union_bound(book10, csi).value
        ch = chernoff_union_bound(book10, csi, t=0.5).value
        assert sk >= p.cer_ci_low, (p.sinr_db, p.cer, sk)
        assert sk <= ch
        n_points += 1
    _report(
        7,
        f"{n_points} points dominated, {time.perf_counter() - t0:.0f}s",
    )


# ---------------------------------------------------------------------------
# 8-9: closed-form calibration values


def test_criterion_08_default_channel_calibration():
    csi = csi_from_params(ChannelParams(), c_n=NOISE_MEAN)
    db = sinr_db(csi)
    assert 4.75 <= csi.c_s <= 5.05
    assert 3.7 <= db <= 4.1
    _report(8, f"c_s={csi.c_s:.4f}, sinr={db:.3f} dB")


def test_criterion_09_energy_and_distance_closed_forms():
    for n_levels in (2, 3, 4, 6):
        wv = WeightVector.balanced(12, n_levels)
        got = average_release(wv, SymbolSet.uniform(n_levels), 10_000)
        assert got == Fraction(5000)
    for n_levels in (2, 3):
        book = make_full_book(
            tuple([6 // n_levels] * n_levels)
        )
        assert min_euclidean_distance(book) == math.sqrt(2) / (n_levels - 1)
    _report(9, "release exactly half, distances exact")


# ---------------------------------------------------------------------------
# 10: rate / error / energy orderings across code weights


def test_criterion_10_weight_tradeoff_orderings():
    t0 = time.perf_counter()
    for k in (24, 32):
        results = []
        for w in (k // 2, k // 4, 2, 1):
            doc = {
                "code": {"levels": ["0", "1"], "weights": [k - w, w]},
                "channel": {
                    "type": "sinr_grid",
                    "sinr_db": [10.0],
                    "c_n": NOISE_MEAN,
                },
                "detector": "csi_free",
                "master_seed": ACC_SEED + 10,
                "trials": 20_000,
                "max_errors": None,
                "ci": "wilson",
            }
            p = run_sweep(doc).points[0]
            results.append(
                (
                    w,
                    info_rate(WeightVector((k - w, w))),
                    p.cer,
                    p.cer_ci_low,
                    p.cer_ci_high,
                    Fraction(w, k),
                )
            )
        for (w_a, rate_a, cer_a, lo_a, _, en_a), (
            w_b,
            rate_b,
            cer_b,
            _,
            hi_b,
            en_b,
        ) in zip(results, results[1:]):
            assert rate_a > rate_b, (k, w_a, w_b)
            assert en_a > en_b, (k, w_a, w_b)
            # error rates separated at the 95% level
            assert lo_a > hi_b, (k, w_a, w_b, cer_a, cer_b)
        chain = " > ".join(f"w={w}:{cer:.4f}" for w, _, cer, _, _, _ in results)
        print(f"  K={k}: {chain}")
    _report(10, f"all three chains hold, {time.perf_counter() - t0:.0f}s")


# ---------------------------------------------------------------------------
# 11: bit errors per codeword error under a random mapping


def test_criterion_11_bit_to_codeword_error_ratio():
    t0 = time.perf_counter()
    doc = {
        "code": {
            "levels": ["0", "1"],
            "weights": [5, 5],
            "kind": "partial",
            "target_info_rate": "1/2",
            "codebook_seed": 77,
        },
        "channel": {
            "type": "sinr_grid",
            "sinr_db": [10.0],
            "c_n": NOISE_MEAN,
        },
        "detector": "binary_cw",
        "mapping_seed": 9,
        "master_seed": ACC_SEED + 11,
        "trials": 2_400_000,
        "max_errors": 10_500,
        "batch_size": 100_000,
        "ci": "wilson",
    }
    p = run_sweep(doc).points[0]
    assert p.errors >= 10_000
    mu = (p.bit_errors / p.bits) / (p.errors / p.trials)
    assert 0.4 <= mu <= 0.6
    _report(
        11,
        f"mu={mu:.4f} over {p.errors} codeword errors, "
        f"{time.perf_counter() - t0:.0f}s",
    )


# ---------------------------------------------------------------------------
# 12: mixture-prior decisions equal assignment decisions on full codes


def test_criterion_12_csi_free_matches_mixture_ml_under_priors():
    t0 = time.perf_counter()
    n_checked = 0
    for counts, n_levels in [((3, 3), 2), ((2, 3, 1), 3)]:
        symbol_set = SymbolSet.uniform(n_levels)
        book = enumerate_full_scw(symbol_set, WeightVector(counts))
        vals = book.value_matrix()
        rng = substream(ACC_SEED, 12, n_levels)
        for p in range(3):
            scale = float(rng.uniform(5.0, 25.0))
            prior = CsiPrior(
                (
                    CsiPair(0.6 * scale, NOISE_MEAN),
                    CsiPair(1.4 * scale, NOISE_MEAN),
                ),
                (0.5, 0.5),
            )
            for _ in range(300):
                truth = int(rng.integers(0, book.size))
                atom = prior.atoms[int(rng.integers(0, 2))]
                obs = rng.poisson(
                    vals[truth] * atom.c_s + atom.c_n
                ).astype(np.int64)
                free = csi_free_detect(book.weights, symbol_set, obs)
                non = noncoherent_ml_detect(book, obs, prior)
                assert free.indices == non.codeword.indices
                n_checked += 1
    _report(
        12,
        f"{n_checked} decisions identical under two-atom mixtures, "
        f"{time.perf_counter() - t0:.0f}s",
    )


# ---------------------------------------------------------------------------
# 13: byte-identical delimited output


def test_criterion_13_byte_identical_sweeps(tmp_path):
    doc = {
        "code": {"levels": ["0", "1"], "weights": [4, 4]},
        "channel": {
            "type": "sinr_grid",
            "sinr_db": [4.0, 8.0, 12.0],
            "c_n": NOISE_MEAN,
        },
        "detector": "csi_free",
        "master_seed": ACC_SEED + 13,
        "trials": 20_480,
        "max_errors": None,
    }
    first = run_sweep(doc, workers=1)
    second = run_sweep(doc, workers=1)
    forked = run_sweep(doc, workers=2)
    texts = {sweep_csv_text(r) for r in (first, second, forked)}
    assert len(texts) == 1
    digests = set()
    for tag, res in (("a", first), ("b", second), ("c", forked)):
        digests.add(
            write_sweep(res, tmp_path / f"{tag}.csv", tmp_path / f"{tag}.json")
        )
    assert len(digests) == 1
    files = {
        (tmp_path / f"{tag}.csv").read_bytes() for tag in ("a", "b", "c")
    }
    assert len(files) == 1
    _report(13, f"sha256 {digests.pop()[:16]}… identical across reruns and workers")
