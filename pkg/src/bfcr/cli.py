"""Command-line front end: bracing precomputation, trend and detection runs.

Commands emit machine-readable output (CSV for series-shaped results, JSON
for reports) and use exit code 0 for completed runs and 2 for input or
configuration errors. Anomaly presence is encoded in the report, never in
the exit code. Option precedence: command-line flag, then config file
(--config or the BFCR_CONFIG environment variable), then built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .anomaly import (
    DetectionConfig,
    GuardParams,
    VolParams,
    detect_edge_first,
    detect_edge_last,
    detect_internal,
    truncate_volatility,
)
from .bracing import (
    BracingSet,
    FcParams,
    brace_extend,
    build_bracing_set,
    load_bracing_set,
    save_bracing_set,
)
from .errors import BfcrError, InvalidParams, TooFewPoints
from .series import parse_csv
from .spectral import FilterSpec
from .trend import TrendConfig, bfcr_trend

ENV_CONFIG = "BFCR_CONFIG"

# Config-file keys and their parsers. Unknown keys are rejected.
_CONFIG_KEYS = {
    "fc.d": int,
    "fc.z": int,
    "fc.c_fc": int,
    "fc.e": int,
    "fc.n_over": int,
    "filter.cutoff_fraction": float,
    "filter.power": int,
    "detect.k_sigma": float,
    "detect.sided": str,
    "detect.min_points": int,
    "guards.min_pct_change": float,
    "guards.cov_window": int,
    "guards.cov_threshold": float,
    "vol.ratio_low": float,
    "vol.ratio_high": float,
    "vol.trim_fraction": float,
    "vol.min_remaining_fraction": float,
}


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep:
                raise InvalidParams(f"{path}:{line_no}: expected key=value, got {line!r}")
            if key not in _CONFIG_KEYS:
                raise InvalidParams(f"{path}:{line_no}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_KEYS[key](value.strip())
            except ValueError:
                raise InvalidParams(f"{path}:{line_no}: bad value for {key}: {value.strip()!r}")
    return values


class _Resolver:
    """Merge flag values, config-file values, and defaults."""

    def __init__(self, args):
        self.args = args
        path = args.config if getattr(args, "config", None) else os.environ.get(ENV_CONFIG)
        self.file_values = _load_config_file(path) if path else {}

    def get(self, flag_name: str, config_key: str, default):
        flag = getattr(self.args, flag_name, None)
        if flag is not None:
            return flag
        if config_key in self.file_values:
            return self.file_values[config_key]
        return default

    def fc_params(self) -> FcParams:
        return FcParams(
            d=self.get("d", "fc.d", 12),
            z=self.get("z", "fc.z", 12),
            c_fc=self.get("c_fc", "fc.c_fc", 27),
            e=self.get("e", "fc.e", 0),
            n_over=self.get("n_over", "fc.n_over", 20),
        )

    def trend_config(self) -> TrendConfig:
        return TrendConfig(
            fc=self.fc_params(),
            filter=FilterSpec(
                cutoff_fraction=self.get("cutoff_fraction", "filter.cutoff_fraction", 0.2),
                power=self.get("power", "filter.power", 4),
            ),
        )

    def detection_config(self, screen_internal: bool, guards_on: bool) -> DetectionConfig:
        guard_params = self.guard_params() if guards_on else None
        return DetectionConfig(
            k_sigma=self.get("k_sigma", "detect.k_sigma", 2.0),
            sided=self.get("sided", "detect.sided", None),
            min_points=self.get("min_points", "detect.min_points", 6),
            screen_internal=screen_internal,
            guards=guard_params,
        )

    def guard_params(self) -> GuardParams:
        return GuardParams(
            min_pct_change=self.get("min_pct_change", "guards.min_pct_change", 0.10),
            cov_window=self.get("cov_window", "guards.cov_window", 4),
            cov_threshold=self.get("cov_threshold", "guards.cov_threshold", 0.2),
        )

    def vol_params(self) -> VolParams:
        return VolParams(
            ratio_low=self.get("ratio_low", "vol.ratio_low", 0.75),
            ratio_high=self.get("ratio_high", "vol.ratio_high", 1.25),
            trim_fraction=self.get("trim_fraction", "vol.trim_fraction", 0.20),
            min_remaining_fraction=self.get(
                "min_remaining_fraction", "vol.min_remaining_fraction", 0.50),
        )


def _read_series(args) -> np.ndarray:
    with open(args.input, "r", encoding="utf-8") as fh:
        text = fh.read()
    column = args.column
    if column is not None:
        try:
            column = int(column)
        except ValueError:
            pass
    return parse_csv(text, column=column)


def _get_bracing(args, resolver: _Resolver) -> BracingSet:
    if getattr(args, "bracing", None):
        return load_bracing_set(args.bracing)
    return build_bracing_set(resolver.fc_params())


def _write_text(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _stats_dict(stats):
    if stats is None:
        return None
    return {"mu": stats.mu, "sigma": stats.sigma, "n": stats.n}


def _cmd_gen_bracing(args) -> int:
    resolver = _Resolver(args)
    bracing = build_bracing_set(resolver.fc_params())
    save_bracing_set(bracing, args.output)
    return 0


def _cmd_trend(args) -> int:
    resolver = _Resolver(args)
    x = _read_series(args)
    bracing = _get_bracing(args, resolver)
    config = resolver.trend_config()
    trend = bfcr_trend(x, config, bracing)
    lines = ["index,value,trend"]
    for i, (value, fit) in enumerate(zip(x, trend), start=1):
        lines.append(f"{i},{float(value)!r},{float(fit)!r}")
    _write_text(args, "\n".join(lines) + "\n")
    return 0


def _cmd_detect(args) -> int:
    resolver = _Resolver(args)
    x = _read_series(args)
    bracing = _get_bracing(args, resolver)
    trend_config = resolver.trend_config()
    detect_config = resolver.detection_config(screen_internal=False, guards_on=False)

    kept_from = 1
    iterations = 0
    truncated = bool(args.truncate_volatility)
    target = x
    if truncated:
        result = truncate_volatility(x, resolver.vol_params(), trend_config, bracing)
        target = result.values
        iterations = result.iterations
        kept_from = len(x) - len(target) + 1

    report = detect_internal(target, detect_config, trend_config, bracing)
    flags = [
        {
            "index": flag.index + kept_from - 1,
            "deviation": flag.deviation,
            "score": flag.score,
        }
        for flag in report.flagged
    ]
    payload = {
        "mode": "internal",
        "flags": flags,
        "stats": _stats_dict(report.stats),
        "mitigations": {
            "volatility_truncation": {
                "applied": truncated,
                "iterations": iterations,
                "kept_from_index": kept_from,
            }
        },
    }
    _write_text(args, json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_detect_edge(args) -> int:
    resolver = _Resolver(args)
    x = _read_series(args)
    bracing = _get_bracing(args, resolver)
    trend_config = resolver.trend_config()
    detect_config = resolver.detection_config(
        screen_internal=bool(args.screen_internal),
        guards_on=bool(args.guards),
    )
    detect = detect_edge_first if args.which == "first" else detect_edge_last
    report = detect(x, detect_config, trend_config, bracing)
    screening = report.mitigations.screening
    payload = {
        "mode": "edge",
        "which": args.which,
        "verdict": report.verdict,
        "reason": report.reason,
        "sample_s": report.edge_sample,
        "stats": _stats_dict(report.stats),
        "excluded_internal": list(screening.excluded) if screening else [],
    }
    _write_text(args, json.dumps(payload, indent=2) + "\n")
    return 0


def _cmd_plotdata(args) -> int:
    resolver = _Resolver(args)
    x = _read_series(args)
    bracing = _get_bracing(args, resolver)
    trend_config = resolver.trend_config()
    trend = bfcr_trend(x, trend_config, bracing)
    extended = brace_extend(x, bracing)
    detect_config = resolver.detection_config(screen_internal=False, guards_on=False)
    try:
        report = detect_internal(x, detect_config, trend_config, bracing)
        flagged = report.flagged
    except TooFewPoints:
        # Short series still get their plot segments, just no flag rows.
        flagged = ()

    n = len(x)
    d = bracing.params.d
    c_fc = bracing.params.c_fc
    rows = ["segment,index,value"]

    def emit(segment, indices, values):
        for i, v in zip(indices, values):
            rows.append(f"{segment},{i},{float(v)!r}")

    emit("data", range(1, n + 1), x)
    emit("trend", range(1, n + 1), trend)
    emit("brace_left", range(1 - d, 1), extended.values[:d])
    emit("brace_right", range(n + 1, n + d + 1), extended.values[d + n:d + n + d])
    emit("continuation", range(n + d + 1, n + d + c_fc + 1), extended.values[2 * d + n:])
    emit("flagged", (f.index for f in flagged), (x[f.index - 1] for f in flagged))
    _write_text(args, "\n".join(rows) + "\n")
    return 0


def _add_common(parser, with_input=True):
    if with_input:
        parser.add_argument("input", help="input CSV file")
        parser.add_argument("--column", default=None,
                            help="column selector: 0-based position or header name")
        parser.add_argument("--bracing", default=None,
                            help="path to a precomputed bracing-set file")
    parser.add_argument("--config", default=None,
                        help=f"config file (default: ${ENV_CONFIG} if set)")
    parser.add_argument("--output", default=None, help="output file (default: stdout)")


def _add_fc_flags(parser):
    parser.add_argument("--d", type=int, default=None, help="brace length in points")
    parser.add_argument("--z", type=int, default=None, help="zero-matching point count")
    parser.add_argument("--c-fc", dest="c_fc", type=int, default=None,
                        help="continuation length in points")
    parser.add_argument("--e", type=int, default=None, help="extra bridge points")
    parser.add_argument("--n-over", dest="n_over", type=int, default=None,
                        help="continuation solve oversampling factor")


def _add_filter_flags(parser):
    parser.add_argument("--cutoff-fraction", dest="cutoff_fraction", type=float,
                        default=None, help="retained fraction of the Nyquist band")
    parser.add_argument("--power", type=int, default=None,
                        help="exponent on each Lanczos factor")


def _add_detect_flags(parser):
    parser.add_argument("--k-sigma", dest="k_sigma", type=float, default=None,
                        help="flag threshold in standard deviations")
    parser.add_argument("--sided", choices=["two-sided", "one-sided-above"],
                        default=None, help="sidedness of the threshold test")
    parser.add_argument("--min-points", dest="min_points", type=int, default=None,
                        help="minimum series length for detection")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bfcr",
        description="Spectral trend extraction and anomaly detection for 1-D series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-bracing", help="precompute and save a bracing set")
    p.add_argument("--output", required=True, help="destination file")
    p.add_argument("--config", default=None)
    _add_fc_flags(p)
    p.set_defaults(func=_cmd_gen_bracing)

    p = sub.add_parser("trend", help="write index,value,trend CSV")
    _add_common(p)
    _add_fc_flags(p)
    _add_filter_flags(p)
    p.set_defaults(func=_cmd_trend)

    p = sub.add_parser("detect", help="internal anomaly report (JSON)")
    _add_common(p)
    _add_fc_flags(p)
    _add_filter_flags(p)
    _add_detect_flags(p)
    p.add_argument("--truncate-volatility", action="store_true",
                   help="trim old-regime data before detecting")
    p.add_argument("--ratio-low", dest="ratio_low", type=float, default=None)
    p.add_argument("--ratio-high", dest="ratio_high", type=float, default=None)
    p.add_argument("--trim-fraction", dest="trim_fraction", type=float, default=None)
    p.add_argument("--min-remaining-fraction", dest="min_remaining_fraction",
                   type=float, default=None)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("detect-edge", help="edge anomaly report (JSON)")
    _add_common(p)
    _add_fc_flags(p)
    _add_filter_flags(p)
    _add_detect_flags(p)
    which = p.add_mutually_exclusive_group()
    which.add_argument("--last", dest="which", action="store_const", const="last",
                       help="test the last point (default)")
    which.add_argument("--first", dest="which", action="store_const", const="first",
                       help="test the first point")
    p.add_argument("--screen-internal", action="store_true",
                   help="drop internal outliers from the population statistics")
    p.add_argument("--guards", action="store_true",
                   help="skip detection on low-noise edges")
    p.add_argument("--min-pct-change", dest="min_pct_change", type=float, default=None)
    p.add_argument("--cov-window", dest="cov_window", type=int, default=None)
    p.add_argument("--cov-threshold", dest="cov_threshold", type=float, default=None)
    p.set_defaults(func=_cmd_detect_edge, which="last")

    p = sub.add_parser("plotdata", help="long-form CSV of all plot segments")
    _add_common(p)
    _add_fc_flags(p)
    _add_filter_flags(p)
    _add_detect_flags(p)
    p.set_defaults(func=_cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BfcrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
