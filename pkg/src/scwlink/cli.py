"""Command line interface.

Subcommands: codebook, rate, bounds, detect, channel, simulate, figure.
Every successful run echoes its resolved configuration as one JSON line on
stderr.  Domain errors exit 1 with a machine-readable JSON report on
stderr; usage errors exit 2 (argparse).  Rational values on the command
line may be written as ``p/q``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import figures, sim
from .bounds import chernoff_union_bound, orderstat_bounds, skellam_union_bound
from .channel import (
    ChannelParams,
    CsiPair,
    CsiPrior,
    cir_expected_count,
    csi_for_sinr_db,
    n_tx_for_sinr,
    sinr_db,
    sir_db,
)
from .codes import (
    Codebook,
    SymbolSet,
    WeightVector,
    as_fraction,
    binary_rate_bounds,
    code_rate,
    code_rate_asymptote,
    codebook_size,
    enumerate_full_scw,
    info_rate,
    random_partial_codebook,
)
from .detectors import (
    binary_cw_detect,
    coherent_ml_detect,
    csi_free_detect,
    detect_partial_scw,
    noncoherent_ml_detect,
)
from .errors import ConfigError, CsiError, ParameterError, ScwError
from .streams import substream


def _echo_config(doc: dict) -> None:
    print(json.dumps({"resolved_config": doc}, default=str), file=sys.stderr)


def _parse_weights(text: str) -> WeightVector:
    try:
        counts = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise ParameterError(f"cannot parse weights {text!r}") from exc
    return WeightVector(counts)


def _parse_levels(text: str) -> SymbolSet:
    return SymbolSet.from_strings(text.split(","))


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise ParameterError(f"cannot parse integer list {text!r}") from exc


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ParameterError(f"cannot parse numeric list {text!r}") from exc


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must contain a JSON object")
    return doc


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _symbol_values(codeword) -> list:
    return [
        int(v) if v.denominator == 1 else float(v) for v in codeword.symbols
    ]


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_codebook(args) -> int:
    symbol_set = _parse_levels(args.levels)
    weights = _parse_weights(args.weights)
    book = enumerate_full_scw(symbol_set, weights, cap=args.cap)
    resolved = {
        "levels": args.levels, "weights": args.weights,
        "partial_rate": args.partial_rate, "seed": args.seed, "cap": args.cap,
        "out": args.out,
    }
    if args.partial_rate is not None:
        if args.seed is None:
            raise ParameterError("--partial-rate requires an explicit --seed")
        book = random_partial_codebook(book, as_fraction(args.partial_rate), args.seed)
    _echo_config(resolved)
    text = book.to_json(indent=2) + "\n"
    _write_text(args.out, text)
    return 0


def _cmd_rate(args) -> int:
    weights = _parse_weights(args.weights)
    if args.levels is not None:
        symbol_set = _parse_levels(args.levels)
        if symbol_set.n_levels != weights.n_levels:
            raise ParameterError(
                f"{weights.n_levels} weights for {symbol_set.n_levels} levels"
            )
    _echo_config({"weights": args.weights, "levels": args.levels})
    if args.json:
        doc = {
            "code_rate": code_rate(weights),
            "info_rate": info_rate(weights),
            "codebook_size": str(codebook_size(weights)),
            "asymptote": code_rate_asymptote(weights.fractions, weights.n_levels),
        }
        if weights.n_levels == 2:
            lo, hi = binary_rate_bounds(weights.length, weights.counts[1])
            doc["binary_lower_bound"] = lo
            doc["binary_upper_bound"] = hi
        print(json.dumps(doc))
    else:
        print(f"{code_rate(weights):.6f}")
    return 0


def _build_book_from_args(args) -> Codebook:
    if getattr(args, "codebook", None):
        return Codebook.from_json(open(args.codebook).read())
    if args.levels is None or args.weights is None:
        raise ParameterError("need either --codebook or both --levels and --weights")
    symbol_set = _parse_levels(args.levels)
    weights = _parse_weights(args.weights)
    book = enumerate_full_scw(symbol_set, weights)
    if getattr(args, "partial_rate", None) is not None:
        if args.codebook_seed is None:
            raise ParameterError("--partial-rate requires --codebook-seed")
        book = random_partial_codebook(
            book, as_fraction(args.partial_rate), args.codebook_seed
        )
    return book


def _cmd_bounds(args) -> int:
    book = _build_book_from_args(args)
    sinr_grid = _parse_floats(args.sinr_db)
    kinds = args.kinds.split(",") if args.kinds else None
    if kinds is None:
        kinds = ["chernoff"]
        if book.is_binary:
            kinds.append("skellam")
            if book.kind == "full":
                kinds.append("orderstat")
    for kind in kinds:
        if kind not in ("chernoff", "skellam", "orderstat"):
            raise ParameterError(f"unknown bound kind {kind!r}")
    t = args.t if args.t == "optimize" else float(as_fraction(args.t))
    resolved = {
        "levels": args.levels, "weights": args.weights,
        "partial_rate": args.partial_rate, "codebook_seed": args.codebook_seed,
        "c_n": args.c_n, "sinr_db": sinr_grid, "kinds": kinds, "t": args.t,
        "orderstat_variant": args.orderstat_variant, "out": args.out,
    }
    _echo_config(resolved)

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(("sinr_db", "bound_kind", "value", "unclamped", "t_used"))

    def emit(s, kind, value, unclamped, t_used):
        writer.writerow([
            repr(float(s)), kind, repr(float(value)), repr(float(unclamped)),
            "" if t_used is None else repr(float(t_used)),
        ])

    for s in sinr_grid:
        csi = csi_for_sinr_db(s, args.c_n)
        for kind in kinds:
            if kind == "chernoff":
                res = chernoff_union_bound(book, csi, t)
                emit(s, "chernoff_union", res.value, res.unclamped, res.t_used)
            elif kind == "skellam":
                res = skellam_union_bound(book, csi)
                emit(s, "skellam_union", res.value, res.unclamped, None)
            else:
                if book.kind != "full" or not book.is_binary:
                    raise ParameterError(
                        "orderstat bounds apply to full binary codebooks only"
                    )
                variants = (
                    ("exact", "continuous")
                    if args.orderstat_variant == "both"
                    else (args.orderstat_variant,)
                )
                for variant in variants:
                    lo, hi = orderstat_bounds(
                        book.length, book.weights.counts[1], csi, variant
                    )
                    tag = "" if variant == "exact" else "_continuous"
                    emit(s, f"orderstat_lower{tag}", min(1.0, lo), lo, None)
                    emit(s, f"orderstat_upper{tag}", min(1.0, hi), hi, None)
    _write_text(args.out, buf.getvalue())
    return 0


DETECT_MODES = (
    "csi_free", "coherent", "noncoherent", "binary_cw",
    "declare_error", "restricted_ml",
)


def _detect_from_config(path: str, args) -> None:
    doc = _read_json(path)
    allowed = {
        "codebook", "levels", "weights", "observation", "mode", "csi",
        "prior", "seed",
    }
    unknown = doc.keys() - allowed
    if unknown:
        raise ConfigError(f"detect config has unknown keys: {sorted(unknown)}")
    if "observation" not in doc:
        raise ConfigError("detect config needs an 'observation' array")
    args.obs = ",".join(str(int(v)) for v in doc["observation"])
    if "codebook" in doc:
        args.codebook = doc["codebook"]
    if "levels" in doc:
        args.levels = ",".join(str(v) for v in doc["levels"])
    if "weights" in doc:
        args.weights = ",".join(str(int(v)) for v in doc["weights"])
    args.mode = doc.get("mode", args.mode)
    if "csi" in doc:
        csi = doc["csi"]
        args.c_s = float(csi["c_s"])
        args.c_n = float(csi["c_n"])
    if "prior" in doc:
        args.atoms = ";".join(
            f"{a['c_s']},{a['c_n']},{a['weight']}" for a in doc["prior"]["atoms"]
        )
    if "seed" in doc:
        args.seed = int(doc["seed"])


def _parse_atoms(text: str) -> CsiPrior:
    atoms = []
    weights = []
    for chunk in text.split(";"):
        parts = _parse_floats(chunk)
        if len(parts) != 3:
            raise ParameterError(
                f"prior atoms are 'c_s,c_n,weight' triples, got {chunk!r}"
            )
        atoms.append(CsiPair(c_s=parts[0], c_n=parts[1]))
        weights.append(parts[2])
    return CsiPrior(atoms=tuple(atoms), weights=tuple(weights))


def _cmd_detect(args) -> int:
    if args.config:
        _detect_from_config(args.config, args)
    if args.mode not in DETECT_MODES:
        raise ParameterError(f"mode must be one of {DETECT_MODES}, got {args.mode!r}")
    if args.obs is None:
        raise ParameterError("detect needs --obs counts or a --config file")
    obs = _parse_ints(args.obs)
    tie_rng = None if args.seed is None else substream(args.seed, 9)
    csi = None
    if args.c_s is not None or args.c_n is not None:
        if args.c_s is None or args.c_n is None:
            raise ParameterError("CSI needs both --c-s and --c-n")
        csi = CsiPair(c_s=args.c_s, c_n=args.c_n)

    resolved = {
        "mode": args.mode, "observation": obs, "seed": args.seed,
        "codebook": args.codebook, "levels": args.levels, "weights": args.weights,
        "csi": None if csi is None else {"c_s": csi.c_s, "c_n": csi.c_n},
        "atoms": args.atoms,
    }
    _echo_config(resolved)

    result = None
    if args.mode == "csi_free":
        if args.codebook:
            book = Codebook.from_json(open(args.codebook).read())
            symbol_set, weights = book.symbol_set, book.weights
        else:
            if args.levels is None or args.weights is None:
                raise ParameterError("csi_free needs --levels and --weights")
            symbol_set = _parse_levels(args.levels)
            weights = _parse_weights(args.weights)
        codeword = csi_free_detect(weights, symbol_set, obs, tie_rng)
        payload = {
            "codeword": _symbol_values(codeword),
            "indices": list(codeword.indices),
            "tie_count": None,
            "out_of_book": False,
            "metric": None,
        }
    else:
        book = _build_book_from_args(args)
        if args.mode == "coherent":
            if csi is None:
                raise CsiError("coherent detection needs --c-s and --c-n")
            result = coherent_ml_detect(book, obs, csi, tie_rng)
        elif args.mode == "noncoherent":
            if not args.atoms:
                raise CsiError("noncoherent detection needs --atoms")
            result = noncoherent_ml_detect(book, obs, _parse_atoms(args.atoms), tie_rng)
        elif args.mode == "binary_cw":
            result = binary_cw_detect(book, obs, tie_rng)
        else:
            result = detect_partial_scw(book, obs, args.mode, csi, tie_rng)
        payload = {
            "codeword": _symbol_values(result.codeword),
            "indices": list(result.codeword.indices),
            "tie_count": result.tie_count,
            "out_of_book": result.out_of_book,
            "metric": result.metric,
        }
    if args.json:
        print(json.dumps(payload))
    else:
        print(json.dumps(payload["codeword"], separators=(",", ":")))
    return 0


def _cmd_channel(args) -> int:
    if args.config:
        params = ChannelParams.from_json_dict(_read_json(args.config))
    else:
        params = ChannelParams()
    csi = CsiPair(
        c_s=cir_expected_count(params, params.t_sample_s), c_n=args.c_n
    )
    resolved = {"params": params.as_dict(), "c_n": args.c_n,
                "target_sinr_db": args.target_sinr_db}
    _echo_config(resolved)
    doc = {
        "c_s": csi.c_s,
        "c_n": csi.c_n,
        "sir_db": sir_db(csi) if csi.c_n > 0 else None,
        "sinr_db": sinr_db(csi),
    }
    if args.target_sinr_db is not None:
        doc["n_tx_for_target"] = n_tx_for_sinr(
            10.0 ** (args.target_sinr_db / 10.0), args.c_n, params
        )
    if args.json:
        print(json.dumps(doc))
    else:
        for key, value in doc.items():
            print(f"{key} = {value}")
    return 0


def _cmd_simulate(args) -> int:
    doc = _read_json(args.config)
    cfg = sim.parse_sweep_config(doc)
    result = sim.run_sweep(cfg, workers=args.workers)
    _echo_config(result.config)
    sidecar = args.sidecar or (args.out + ".config.json")
    digest = sim.write_sweep(result, args.out, sidecar)
    print(json.dumps({
        "csv": args.out, "sidecar": sidecar, "csv_sha256": digest,
        "points": len(result.points),
    }))
    return 0


def _cmd_figure(args) -> int:
    result = figures.run_figure_recipe(
        args.name,
        out_dir=args.out_dir,
        seed=args.seed,
        workers=args.workers,
        trials=args.trials,
        max_errors=args.max_errors,
        render=not args.no_plot,
    )
    _echo_config({
        "name": args.name, "out_dir": args.out_dir, "seed": args.seed,
        "trials": args.trials, "max_errors": args.max_errors,
        "render": not args.no_plot,
    })
    print(json.dumps({
        "csv": result.csv_path, "png": result.png_path,
        "csv_sha256": result.csv_sha256, "rows": len(result.rows),
    }))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scwlink",
        description="SCW codebooks, detection, bounds, and Monte Carlo "
                    "for Poisson molecular channels",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("codebook", help="enumerate or sample a codebook")
    p.add_argument("--levels", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--partial-rate", dest="partial_rate")
    p.add_argument("--seed", type=int)
    p.add_argument("--cap", type=int, default=10_000_000)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_codebook)

    p = subs.add_parser("rate", help="code and information rates")
    p.add_argument("--weights", required=True)
    p.add_argument("--levels")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_rate)

    p = subs.add_parser("bounds", help="error-probability bounds to CSV")
    p.add_argument("--levels")
    p.add_argument("--weights")
    p.add_argument("--codebook")
    p.add_argument("--partial-rate", dest="partial_rate")
    p.add_argument("--codebook-seed", dest="codebook_seed", type=int)
    p.add_argument("--c-n", dest="c_n", type=float, required=True)
    p.add_argument("--sinr-db", dest="sinr_db", required=True)
    p.add_argument("--kinds")
    p.add_argument("--t", default="0.5")
    p.add_argument("--orderstat-variant", dest="orderstat_variant",
                   choices=("exact", "continuous", "both"), default="both")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_bounds)

    p = subs.add_parser("detect", help="detect one observation")
    p.add_argument("--config")
    p.add_argument("--codebook")
    p.add_argument("--levels")
    p.add_argument("--weights")
    p.add_argument("--obs")
    p.add_argument("--mode", default="csi_free")
    p.add_argument("--c-s", dest="c_s", type=float)
    p.add_argument("--c-n", dest="c_n", type=float)
    p.add_argument("--atoms")
    p.add_argument("--seed", type=int)
    p.add_argument("--partial-rate", dest="partial_rate")
    p.add_argument("--codebook-seed", dest="codebook_seed", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_detect)

    p = subs.add_parser("channel", help="evaluate the physical channel")
    p.add_argument("--defaults", action="store_true")
    p.add_argument("--config")
    p.add_argument("--c-n", dest="c_n", type=float, default=4.9)
    p.add_argument("--target-sinr-db", dest="target_sinr_db", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_channel)

    p = subs.add_parser("simulate", help="run a Monte Carlo sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=_cmd_simulate)

    p = subs.add_parser("figure", help="build a named figure dataset")
    p.add_argument("--name", required=True)
    p.add_argument("--out-dir", dest="out_dir", default="figures")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trials", type=int)
    p.add_argument("--max-errors", dest="max_errors", type=int)
    p.add_argument("--no-plot", dest="no_plot", action="store_true")
    p.set_defaults(fn=_cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScwError as exc:
        print(
            json.dumps({"error": exc.code, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    except OSError as exc:
        print(
            json.dumps({"error": "io_error", "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
