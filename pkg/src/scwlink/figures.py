"""Named figure recipes: parameter grids, Monte Carlo runs, bound overlays.

Each recipe produces a tidy table (one row per curve point) and, when an
output directory is given, writes ``<name>.csv``, a JSON sidecar with the
resolved parameters and content hash, and a rendered ``<name>.png``.

Recipes with Monte Carlo content carry a pinned default seed so a bare
``run_figure_recipe(name)`` is reproducible; pass ``seed`` to resample.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction

from .bounds import chernoff_union_bound, orderstat_bounds, skellam_union_bound
from .channel import CsiPair, c_s_for_sinr, csi_for_sinr_db
from .codes import (
    SymbolSet,
    WeightVector,
    average_release,
    binary_rate_bounds,
    code_rate,
    code_rate_asymptote,
    enumerate_full_scw,
    info_rate,
    random_partial_codebook,
)
from .errors import ParameterError
from .sim import parse_sweep_config, rows_csv_text, run_sweep

SINR_GRID_DB = tuple(float(v) for v in range(0, 17, 2))
NOISE_MEAN = 4.9

DEFAULT_SEEDS = {
    "fig6": 6001,
    "fig7": 7001,
    "fig8": 8001,
    "fig9": 9001,
    "fig10-analog": 10001,
}


@dataclass
class FigureResult:
    name: str
    header: tuple[str, ...]
    rows: list[dict]
    meta: dict
    csv_path: str | None = None
    sidecar_path: str | None = None
    png_path: str | None = None
    csv_sha256: str | None = None


def _mc_points(
    code: dict,
    detector: str,
    master_seed: int,
    trials: int,
    max_errors: int | None,
    workers: int,
    channel: dict | None = None,
    mapping_seed: int | None = None,
):
    doc = {
        "code": code,
        "channel": channel
        or {"type": "sinr_grid", "sinr_db": list(SINR_GRID_DB), "c_n": NOISE_MEAN},
        "detector": detector,
        "master_seed": master_seed,
        "trials": trials,
        "max_errors": max_errors,
        "mapping_seed": mapping_seed,
    }
    return run_sweep(parse_sweep_config(doc), workers=workers).points


def _point_cells(p) -> dict:
    return {
        "sinr_db": p.sinr_db,
        "c_s": p.c_s,
        "c_n": p.c_n,
        "trials": p.trials,
        "errors": p.errors,
        "cer": p.cer,
        "cer_ci_low": p.cer_ci_low,
        "cer_ci_high": p.cer_ci_high,
    }


# --------------------------------------------------------------------------
# rate-only recipes


def _fig2(seed, workers, trials, max_errors):
    """Code rate against block length for L = 4 and L = 8 families."""
    families = [
        ("L4_balanced", 4, (Fraction(1, 4),) * 4, 4),
        ("L4_unbalanced", 4,
         (Fraction(4, 8), Fraction(2, 8), Fraction(1, 8), Fraction(1, 8)), 8),
        ("L8_balanced", 8, (Fraction(1, 8),) * 8, 8),
        ("L8_unbalanced", 8,
         tuple(Fraction(n, 16) for n in (4, 3, 2, 2, 2, 1, 1, 1)), 16),
    ]
    rows = []
    for label, n_levels, rho, step in families:
        asymptote = code_rate_asymptote(rho, n_levels)
        for k in range(step, 129, step):
            weights = WeightVector(tuple(int(r * k) for r in rho))
            rows.append({
                "family": label,
                "n_levels": n_levels,
                "length": k,
                "code_rate": code_rate(weights),
                "asymptote": asymptote,
            })
    header = ("family", "n_levels", "length", "code_rate", "asymptote")
    return header, rows, {"families": [f[0] for f in families]}


def _fig3(seed, workers, trials, max_errors):
    """Binary code rate against length with its closed-form sandwich."""
    rows = []
    for num, den in ((1, 2), (1, 3), (1, 4)):
        rho = Fraction(num, den)
        asymptote = code_rate_asymptote((rho, 1 - rho), 2)
        for k in range(den, 65, den):
            w = int(rho * k)
            lower, upper = binary_rate_bounds(k, w)
            rows.append({
                "rho": str(rho),
                "length": k,
                "weight": w,
                "code_rate": code_rate(WeightVector((k - w, w))),
                "lower_bound": lower,
                "upper_bound": upper,
                "asymptote": asymptote,
            })
    header = ("rho", "length", "weight", "code_rate", "lower_bound",
              "upper_bound", "asymptote")
    return header, rows, {"rho": ["1/2", "1/3", "1/4"]}


def _rate_vs_levels(metric):
    rows = []
    for k in (12, 24, 48):
        for n_levels in range(2, k + 1):
            if k % n_levels:
                continue
            weights = WeightVector.balanced(k, n_levels)
            rows.append({
                "length": k,
                "n_levels": n_levels,
                "rate": metric(weights),
            })
    return ("length", "n_levels", "rate"), rows


def _fig4(seed, workers, trials, max_errors):
    """Code rate of balanced codes against the symbol-set size."""
    header, rows = _rate_vs_levels(code_rate)
    return header, rows, {"lengths": [12, 24, 48]}


def _fig5(seed, workers, trials, max_errors):
    """Information rate of balanced codes against the symbol-set size."""
    header, rows = _rate_vs_levels(info_rate)
    return header, rows, {"lengths": [12, 24, 48]}


# --------------------------------------------------------------------------
# Monte Carlo recipes


def _fig6(seed, workers, trials, max_errors):
    """CER of five ternary length-6 codes with the fixed-exponent bound."""
    trials = trials or 100_000
    max_errors = 200 if max_errors is None else max_errors
    weight_vectors = [(2, 2, 2), (3, 2, 1), (1, 2, 3), (3, 0, 3), (5, 0, 1)]
    levels = ["0", "1/2", "1"]
    symbol_set = SymbolSet.from_strings(levels)
    rows = []
    for curve, counts in enumerate(weight_vectors):
        code = {"levels": levels, "weights": list(counts)}
        points = _mc_points(
            code, "csi_free", seed * 100 + curve, trials, max_errors, workers
        )
        book = enumerate_full_scw(symbol_set, WeightVector(counts))
        for p in points:
            bound = chernoff_union_bound(
                book, CsiPair(c_s=p.c_s, c_n=p.c_n), t=0.5
            )
            rows.append({
                "weights": ",".join(str(c) for c in counts),
                **_point_cells(p),
                "chernoff": bound.value,
                "chernoff_unclamped": bound.unclamped,
            })
    header = ("weights", "sinr_db", "c_s", "c_n", "trials", "errors", "cer",
              "cer_ci_low", "cer_ci_high", "chernoff", "chernoff_unclamped")
    return header, rows, {"weight_vectors": weight_vectors}


def _fig7(seed, workers, trials, max_errors):
    """CER of balanced length-12 codes for L in {2, 3, 4, 6}."""
    trials = trials or 100_000
    max_errors = 200 if max_errors is None else max_errors
    rows = []
    for curve, n_levels in enumerate((2, 3, 4, 6)):
        symbol_set = SymbolSet.uniform(n_levels)
        code = {
            "levels": [str(v) for v in symbol_set.levels],
            "weights": [12 // n_levels] * n_levels,
        }
        points = _mc_points(
            code, "csi_free", seed * 100 + curve, trials, max_errors, workers
        )
        for p in points:
            rows.append({"n_levels": n_levels, **_point_cells(p)})
    header = ("n_levels", "sinr_db", "c_s", "c_n", "trials", "errors", "cer",
              "cer_ci_low", "cer_ci_high")
    return header, rows, {"length": 12, "n_levels": [2, 3, 4, 6]}


def _fig8(seed, workers, trials, max_errors):
    """Binary length-10: full and rate-1/2 partial codes with all bounds."""
    trials = trials or 100_000
    max_errors = 200 if max_errors is None else max_errors
    levels = ["0", "1"]
    symbol_set = SymbolSet.from_strings(levels)
    weights = WeightVector((5, 5))
    full = enumerate_full_scw(symbol_set, weights)
    partial_seed = seed * 100 + 42
    partial = random_partial_codebook(full, Fraction(1, 2), partial_seed)

    curves = [
        ("full", {"levels": levels, "weights": [5, 5]}, "csi_free", full),
        ("partial_r12",
         {"levels": levels, "weights": [5, 5], "kind": "partial",
          "target_info_rate": "1/2", "codebook_seed": partial_seed},
         "binary_cw", partial),
    ]
    rows = []
    for curve_i, (label, code, detector, book) in enumerate(curves):
        points = _mc_points(
            code, detector, seed * 100 + curve_i, trials, max_errors, workers
        )
        for p in points:
            csi = CsiPair(c_s=p.c_s, c_n=p.c_n)
            chern = chernoff_union_bound(book, csi, t=0.5)
            skell = skellam_union_bound(book, csi)
            row = {
                "curve": label,
                **_point_cells(p),
                "chernoff": chern.value,
                "chernoff_unclamped": chern.unclamped,
                "skellam": skell.value,
                "skellam_unclamped": skell.unclamped,
            }
            if label == "full":
                lo_e, hi_e = orderstat_bounds(10, 5, csi, variant="exact")
                lo_c, hi_c = orderstat_bounds(10, 5, csi, variant="continuous")
                row.update({
                    "orderstat_lower": lo_e,
                    "orderstat_upper": hi_e,
                    "orderstat_cont_lower": lo_c,
                    "orderstat_cont_upper": hi_c,
                })
            rows.append(row)
    header = ("curve", "sinr_db", "c_s", "c_n", "trials", "errors", "cer",
              "cer_ci_low", "cer_ci_high", "chernoff", "chernoff_unclamped",
              "skellam", "skellam_unclamped", "orderstat_lower",
              "orderstat_upper", "orderstat_cont_lower", "orderstat_cont_upper")
    return header, rows, {"length": 10, "partial_seed": partial_seed}


FIG9_CONFIGS = ("half", "quarter", "two", "one")


def _fig9_weight(config: str, length: int) -> int:
    if config == "half":
        return length // 2
    if config == "quarter":
        return length // 4
    if config == "two":
        return 2
    return 1


def _fig9(seed, workers, trials, max_errors):
    """Rate, energy, and 10 dB CER of binary codes against length."""
    trials = trials or 100_000
    max_errors = 500 if max_errors is None else max_errors
    levels = ["0", "1"]
    symbol_set = SymbolSet.from_strings(levels)
    rows = []
    for curve_i, config in enumerate(FIG9_CONFIGS):
        for k in range(8, 33, 4):
            w = _fig9_weight(config, k)
            weights = WeightVector((k - w, w))
            code = {"levels": levels, "weights": [k - w, w]}
            points = _mc_points(
                code, "csi_free", seed * 1000 + curve_i * 10 + k,
                trials, max_errors, workers,
                channel={"type": "sinr_grid", "sinr_db": [10.0], "c_n": NOISE_MEAN},
            )
            p = points[0]
            rows.append({
                "config": config,
                "length": k,
                "weight": w,
                "info_rate": info_rate(weights),
                "release_fraction": float(average_release(weights, symbol_set, 1)),
                **_point_cells(p),
            })
    header = ("config", "length", "weight", "info_rate", "release_fraction",
              "sinr_db", "c_s", "c_n", "trials", "errors", "cer",
              "cer_ci_low", "cer_ci_high")
    return header, rows, {"configs": list(FIG9_CONFIGS), "sinr_db": 10.0}


def _fig10_analog(seed, workers, trials, max_errors):
    """BER of rate-1/2 partial binary codes under a two-atom CSI prior.

    The three detectors coincide decision-for-decision on binary codes, so
    their curves overlay; the recipe exists to exhibit exactly that under
    channel-state uncertainty.
    """
    trials = trials or 200_000
    max_errors = 300 if max_errors is None else max_errors
    nominal = c_s_for_sinr(10.0, NOISE_MEAN)
    atoms = [
        {"c_s": 0.6 * nominal, "c_n": NOISE_MEAN, "weight": 0.5},
        {"c_s": 1.4 * nominal, "c_n": NOISE_MEAN, "weight": 0.5},
    ]
    rows = []
    for curve_i, detector in enumerate(("binary_cw", "restricted_ml", "noncoherent")):
        for k in (6, 8, 10, 12):
            code = {
                "levels": ["0", "1"],
                "weights": [k // 2, k // 2],
                "kind": "partial",
                "target_info_rate": "1/2",
                "codebook_seed": 300 + k,
            }
            points = _mc_points(
                code, detector, seed * 1000 + curve_i * 100 + k,
                trials, max_errors, workers,
                channel={"type": "prior", "atoms": atoms},
                mapping_seed=400 + k,
            )
            p = points[0]
            rows.append({
                "detector": detector,
                "length": k,
                "n_codewords": 2 ** (k // 2),
                "trials": p.trials,
                "errors": p.errors,
                "cer": p.cer,
                "cer_ci_low": p.cer_ci_low,
                "cer_ci_high": p.cer_ci_high,
                "bits": p.bits,
                "bit_errors": p.bit_errors,
                "ber": p.ber,
                "ber_ci_low": p.ber_ci_low,
                "ber_ci_high": p.ber_ci_high,
            })
    header = ("detector", "length", "n_codewords", "trials", "errors", "cer",
              "cer_ci_low", "cer_ci_high", "bits", "bit_errors", "ber",
              "ber_ci_low", "ber_ci_high")
    meta = {"atoms": atoms, "lengths": [6, 8, 10, 12], "target_info_rate": "1/2"}
    return header, rows, meta


RECIPES = {
    "fig2": _fig2,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
    "fig8": _fig8,
    "fig9": _fig9,
    "fig10-analog": _fig10_analog,
}


def run_figure_recipe(
    name: str,
    out_dir: str | None = None,
    seed: int | None = None,
    workers: int = 1,
    trials: int | None = None,
    max_errors: int | None = None,
    render: bool = True,
) -> FigureResult:
    """Build a named figure dataset; optionally write CSV, sidecar, and PNG."""
    if name not in RECIPES:
        raise ParameterError(
            f"unknown figure recipe {name!r}; choose from {sorted(RECIPES)}"
        )
    if seed is None:
        seed = DEFAULT_SEEDS.get(name, 0)
    header, rows, meta = RECIPES[name](seed, workers, trials, max_errors)
    result = FigureResult(name=name, header=header, rows=rows, meta=meta)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        stem = name
        csv_path = os.path.join(out_dir, f"{stem}.csv")
        text = rows_csv_text(header, rows)
        with open(csv_path, "wb") as fh:
            fh.write(text.encode())
        digest = hashlib.sha256(text.encode()).hexdigest()
        sidecar_path = os.path.join(out_dir, f"{stem}.config.json")
        with open(sidecar_path, "w") as fh:
            json.dump(
                {
                    "name": name,
                    "seed": seed,
                    "trials": trials,
                    "max_errors": max_errors,
                    "meta": meta,
                    "csv_sha256": digest,
                },
                fh, indent=2,
            )
            fh.write("\n")
        result.csv_path = csv_path
        result.sidecar_path = sidecar_path
        result.csv_sha256 = digest
        if render:
            from .plots import render_figure  # deferred: pulls in matplotlib

            result.png_path = render_figure(result, os.path.join(out_dir, f"{stem}.png"))
    return result
