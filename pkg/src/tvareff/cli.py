"""Command-line driver: descriptive stats, efficiency pipeline, self-checks.

Three subcommands share one configuration surface. ``stats`` reports
summary statistics and unit-root tests per asset, ``efficiency`` runs
the full pipeline (returns, lag selection, time-varying fit, bootstrap
bands, flags) and writes one series file plus one summary file per
asset, ``validate`` runs the estimator self-check battery. Every output
file embeds the resolved configuration and seed, contains no
timestamps, and is written atomically, so a re-run with identical
inputs reproduces it byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .efficiency import bootstrap_bands, classify, efficiency_degree
from .exceptions import (
    ConfigError,
    DataError,
    NumericalError,
    ValidationError,
)
from .series import descriptive_stats, load_prices, log_returns
from .synthetic import DgpSpec, simulate
from .tvar import MODE_FEASIBLE_GLS, MODE_FIXED, TvarConfig, fit_tvar
from .unitroot import FAMILY_AR_LEVEL, SPEC_CONSTANT_TREND, adf_test, bic_lag_select
from .validation import run_validation

__all__ = ["RunConfig", "cmd_stats", "cmd_efficiency", "cmd_validate", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4
EXIT_VALIDATION = 5

FORMAT_CSV = "csv"
FORMAT_JSON = "json"

_DEFAULTS = {
    "date_column": "date",
    "price_column": "close",
    "q": "auto",
    "max_lag": None,
    "n_boot": 10000,
    "level": 0.99,
    "seed": 0,
    "fixed_lambda": None,
    "n_jobs": 1,
    "output_dir": ".",
    "format": FORMAT_CSV,
    "export_coefficients": False,
}

_SYNTH_LIST_FIELDS = ("coefficients", "initial_coefficients", "state_sd")


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings for one CLI invocation.

    `inputs` holds one mapping per asset: either ``{"asset_id", "path"}``
    for a price CSV or ``{"asset_id", "synthetic": {...}}`` describing a
    simulated series, so experiment scripts are reproducible from the
    config file alone. `q` is an AR order or ``"auto"`` for BIC
    selection. `fixed_lambda` switches the fit from feasible GLS to a
    fixed smoothing ratio.
    """

    inputs: tuple[dict, ...]
    date_column: str = "date"
    price_column: str = "close"
    q: int | str = "auto"
    max_lag: int | None = None
    n_boot: int = 10000
    level: float = 0.99
    seed: int = 0
    fixed_lambda: float | None = None
    n_jobs: int = 1
    output_dir: str = "."
    format: str = FORMAT_CSV
    export_coefficients: bool = False

    def __post_init__(self) -> None:
        if self.format not in (FORMAT_CSV, FORMAT_JSON):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.q != "auto":
            if not isinstance(self.q, int) or self.q < 1:
                raise ConfigError(f"q must be 'auto' or an integer >= 1, got {self.q!r}")
        if self.max_lag is not None and self.max_lag < 1:
            raise ConfigError(f"max_lag must be >= 1, got {self.max_lag}")
        if self.n_boot < 100:
            raise ConfigError(f"n_boot must be >= 100, got {self.n_boot}")
        if not 0.0 < self.level < 1.0:
            raise ConfigError(f"level must be inside (0, 1), got {self.level!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.fixed_lambda is not None and not self.fixed_lambda > 0:
            raise ConfigError(f"fixed_lambda must be > 0, got {self.fixed_lambda}")
        if self.n_jobs < 1:
            raise ConfigError(f"n_jobs must be >= 1, got {self.n_jobs}")

    def to_dict(self) -> dict:
        return {
            "inputs": [dict(entry) for entry in self.inputs],
            "date_column": self.date_column,
            "price_column": self.price_column,
            "q": self.q,
            "max_lag": self.max_lag,
            "n_boot": self.n_boot,
            "level": self.level,
            "seed": self.seed,
            "fixed_lambda": self.fixed_lambda,
            "n_jobs": self.n_jobs,
            "output_dir": self.output_dir,
            "format": self.format,
            "export_coefficients": self.export_coefficients,
        }

    def tvar_config(self, q: int) -> TvarConfig:
        if self.fixed_lambda is not None:
            return TvarConfig(
                q=q, variance_ratio_mode=MODE_FIXED, fixed_lambda=self.fixed_lambda
            )
        return TvarConfig(q=q, variance_ratio_mode=MODE_FEASIBLE_GLS)


def _normalize_input(entry) -> dict:
    if isinstance(entry, str):
        name, sep, path = entry.partition("=")
        if sep and os.sep not in name and name:
            return {"asset_id": name, "path": path}
        return {"asset_id": Path(entry).stem, "path": entry}
    if not isinstance(entry, dict):
        raise ConfigError(f"input entry must be a string or object, got {entry!r}")
    has_path = "path" in entry
    has_synth = "synthetic" in entry
    if has_path == has_synth:
        raise ConfigError(
            "each input needs exactly one of 'path' or 'synthetic': "
            f"{json.dumps(entry, sort_keys=True)}"
        )
    unknown = set(entry) - {"asset_id", "path", "synthetic"}
    if unknown:
        raise ConfigError(f"unknown input keys: {sorted(unknown)}")
    out = dict(entry)
    if has_path:
        out.setdefault("asset_id", Path(str(entry["path"])).stem)
    return out


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(data) - set(_DEFAULTS) - {"inputs"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _build_run_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_DEFAULTS)
    merged["inputs"] = []
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))
    for field in _DEFAULTS:
        value = getattr(args, field, None)
        if value is not None:
            merged[field] = value
    if getattr(args, "paths", None):
        merged["inputs"] = list(args.paths)
    if not isinstance(merged["inputs"], list):
        raise ConfigError("'inputs' must be a list")
    inputs = tuple(_normalize_input(e) for e in merged["inputs"])
    if merged["q"] != "auto":
        try:
            merged["q"] = int(merged["q"])
        except (TypeError, ValueError):
            raise ConfigError(f"q must be 'auto' or an integer, got {merged['q']!r}")
    return RunConfig(inputs=inputs, **{k: merged[k] for k in _DEFAULTS})


def _load_returns(entry: dict, config: RunConfig):
    if "synthetic" in entry:
        params = entry["synthetic"]
        if not isinstance(params, dict):
            raise ConfigError("'synthetic' must be an object of DgpSpec fields")
        kwargs = dict(params)
        for key in _SYNTH_LIST_FIELDS:
            if kwargs.get(key) is not None:
                kwargs[key] = tuple(kwargs[key])
        if kwargs.get("coef_path") is not None:
            kwargs["coef_path"] = np.asarray(kwargs["coef_path"], dtype=np.float64)
        try:
            spec = DgpSpec(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"bad synthetic input: {exc}") from exc
        r, _ = simulate(spec)
        asset_id = entry.get("asset_id") or r.asset_id
        return asset_id, r
    path = str(entry["path"])
    if not os.path.exists(path):
        raise DataError(f"input file does not exist: {path}")
    prices = load_prices(
        path,
        date_column=config.date_column,
        price_column=config.price_column,
        asset_id=entry.get("asset_id"),
    )
    return prices.asset_id, log_returns(prices)


def _require_inputs(config: RunConfig) -> None:
    if not config.inputs:
        raise ConfigError("no input series given (positional paths or config 'inputs')")


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if not np.isfinite(value) else repr(float(value))
    return str(value)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        mode="w",
        encoding="utf-8",
        newline="",
        dir=path.parent,
        prefix=f".{path.name}.",
        delete=False,
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        os.unlink(handle.name)
        raise


def _config_comment(config: RunConfig) -> str:
    return "# config: " + json.dumps(
        _json_safe(config.to_dict()), sort_keys=True, separators=(",", ":")
    )


def _render_csv_table(config: RunConfig, columns, rows) -> str:
    buf = io.StringIO()
    buf.write(_config_comment(config) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _write_table(path: Path, config: RunConfig, columns, rows) -> None:
    """Rows are dicts keyed by column name; format follows the config."""
    if config.format == FORMAT_JSON:
        payload = {
            "config": _json_safe(config.to_dict()),
            "rows": [_json_safe({c: row.get(c) for c in columns}) for row in rows],
        }
        _atomic_write(path, json.dumps(payload, indent=2) + "\n")
        return
    _atomic_write(path, _render_csv_table(config, columns, rows))


def _write_summary(path: Path, config: RunConfig, summary: dict) -> None:
    if config.format == FORMAT_JSON:
        payload = {"config": _json_safe(config.to_dict()), "summary": _json_safe(summary)}
        _atomic_write(path, json.dumps(payload, indent=2) + "\n")
        return
    buf = io.StringIO()
    buf.write(_config_comment(config) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in summary.items():
        if isinstance(value, (list, tuple, np.ndarray)):
            value = ";".join(_csv_cell(_json_safe(v)) for v in value)
        writer.writerow([key, _csv_cell(_json_safe(value))])
    _atomic_write(path, buf.getvalue())


_STATS_COLUMNS = (
    "asset_id",
    "n_obs",
    "mean",
    "sd",
    "min",
    "max",
    "adf_stat",
    "adf_lag",
    "adf_reject_1pct",
    "ar_order",
    "note",
)

_INSUFFICIENT = "insufficient observations"


def cmd_stats(config: RunConfig) -> list[dict]:
    """Per-asset descriptive statistics and unit-root tests.

    A series too short for the unit-root regressions still gets its
    stats row, with the test fields empty and a note saying why.
    """
    _require_inputs(config)
    rows = []
    for entry in config.inputs:
        asset_id, r = _load_returns(entry, config)
        stats = descriptive_stats(r)
        row = {
            "asset_id": asset_id,
            "n_obs": stats.n_obs,
            "mean": stats.mean,
            "sd": stats.sd,
            "min": stats.min,
            "max": stats.max,
            "adf_stat": None,
            "adf_lag": None,
            "adf_reject_1pct": None,
            "ar_order": None,
            "note": "",
        }
        notes = []
        try:
            adf = adf_test(r, max_lag=config.max_lag, spec=SPEC_CONSTANT_TREND)
            row["adf_stat"] = adf.statistic
            row["adf_lag"] = adf.lag
            row["adf_reject_1pct"] = adf.reject_unit_root_1pct
        except DataError:
            notes.append(f"ADF: {_INSUFFICIENT}")
        try:
            row["ar_order"] = bic_lag_select(
                r, max_lag=config.max_lag, model_family=FAMILY_AR_LEVEL
            )
        except DataError:
            notes.append(f"AR order: {_INSUFFICIENT}")
        row["note"] = "; ".join(notes)
        rows.append(row)
    out = Path(config.output_dir) / f"stats.{config.format}"
    _write_table(out, config, _STATS_COLUMNS, rows)
    for row in rows:
        adf_text = (
            f"ADF={row['adf_stat']:.4f} (lag {row['adf_lag']})"
            if row["adf_stat"] is not None
            else f"ADF: {_INSUFFICIENT}"
        )
        ar_text = (
            f"AR order={row['ar_order']}" if row["ar_order"] is not None else "AR order: n/a"
        )
        print(
            f"{row['asset_id']}: n={row['n_obs']} mean={row['mean']:.6f} "
            f"sd={row['sd']:.6f} min={row['min']:.6f} max={row['max']:.6f} "
            f"{adf_text} {ar_text}"
        )
    print(f"wrote {out}")
    return rows


_SERIES_COLUMNS = ("date", "zeta", "lower", "upper", "inefficient")


# Order search bound when --max-lag is not given. The unit-root test keeps
# its sample-size schedule; an AR order beyond 12 is never wanted here.
_ORDER_MAX_LAG = 12


def _resolve_order(r, config: RunConfig) -> tuple[int, str]:
    if config.q != "auto":
        return int(config.q), "fixed"
    max_lag = _ORDER_MAX_LAG if config.max_lag is None else config.max_lag
    order = bic_lag_select(r, max_lag=max_lag, model_family=FAMILY_AR_LEVEL)
    return order, "auto"


def cmd_efficiency(config: RunConfig) -> list[dict]:
    """Full pipeline per asset; writes a series file and a summary file.

    The series file has one row per estimable period (the first q return
    dates only feed lags) with the degree, both band edges, and the
    flag. The summary carries the resolved order, fit diagnostics, and
    the band settings next to the embedded config, which is sufficient
    to reproduce the run.
    """
    _require_inputs(config)
    out_dir = Path(config.output_dir)
    summaries = []
    for entry in config.inputs:
        asset_id, r = _load_returns(entry, config)
        order, order_mode = _resolve_order(r, config)
        tv_config = config.tvar_config(order)
        fit = fit_tvar(r, tv_config, compute_cov=config.export_coefficients)
        path = efficiency_degree(fit)
        bands = bootstrap_bands(
            r,
            tv_config,
            n_boot=config.n_boot,
            level=config.level,
            seed=config.seed,
            n_jobs=config.n_jobs,
        )
        verdict = classify(path, bands)
        safe_id = asset_id.replace(os.sep, "_")
        series_path = out_dir / f"{safe_id}_efficiency.{config.format}"
        rows = [
            {
                "date": d.isoformat(),
                "zeta": float(z),
                "lower": float(lo),
                "upper": float(up),
                "inefficient": bool(flag),
            }
            for d, z, lo, up, flag in zip(
                verdict.dates,
                verdict.zeta,
                verdict.lower,
                verdict.upper,
                verdict.inefficient_flags,
            )
        ]
        _write_table(series_path, config, _SERIES_COLUMNS, rows)
        summary = {
            "asset_id": asset_id,
            "n_obs": r.values.size,
            "t_eff": fit.t_eff,
            "q": order,
            "q_selection": order_mode,
            "mean_zeta": verdict.mean_zeta,
            "sd_zeta": verdict.sd_zeta,
            "flagged_fraction": verdict.flagged_fraction,
            "n_capped": int(path.capped_flags.sum()),
            "level": config.level,
            "n_boot": config.n_boot,
            "seed": config.seed,
            "n_redrawn": bands.n_redrawn,
            "sigma_u2": fit.sigma_u2,
            "sigma_v2": [float(v) for v in fit.sigma_v2],
            "lambda_used": [float(v) for v in fit.lambda_used],
            "converged": fit.converged,
            "n_iter": fit.n_iter,
        }
        summary_path = out_dir / f"{safe_id}_summary.{config.format}"
        _write_summary(summary_path, config, summary)
        written = [str(series_path), str(summary_path)]
        if config.export_coefficients:
            coef_path = out_dir / f"{safe_id}_coefficients.csv"
            _write_coefficients(coef_path, config, fit)
            written.append(str(coef_path))
        summaries.append(summary)
        print(
            f"{asset_id}: q={order} ({order_mode}) mean zeta={verdict.mean_zeta:.4f} "
            f"sd={verdict.sd_zeta:.4f} flagged={verdict.flagged_fraction:.1%} "
            f"seed={config.seed}"
        )
        for name in written:
            print(f"wrote {name}")
    return summaries


def _write_coefficients(path: Path, config: RunConfig, fit) -> None:
    q = fit.coef_paths.shape[1] - 1
    columns = (
        ["date"]
        + [f"a{j}" for j in range(q + 1)]
        + [f"se{j}" for j in range(q + 1)]
    )
    se = np.sqrt(np.maximum(np.diagonal(fit.coef_cov, axis1=1, axis2=2), 0.0))
    rows = []
    for i, d in enumerate(fit.dates):
        row = {"date": d.isoformat()}
        for j in range(q + 1):
            row[f"a{j}"] = float(fit.coef_paths[i, j])
            row[f"se{j}"] = float(se[i, j])
        rows.append(row)
    # Coefficient export is CSV regardless of the report format; the
    # embedded config still records the run as resolved.
    _atomic_write(path, _render_csv_table(config, columns, rows))


def cmd_validate(config: RunConfig, include_bootstrap: bool = True) -> bool:
    """Run the self-check battery; any failed check fails the command."""
    report = run_validation(include_bootstrap=include_bootstrap)
    rows = [
        {"name": c.name, "passed": c.passed, "detail": c.detail}
        for c in report.checks
    ]
    out = Path(config.output_dir) / f"validation.{config.format}"
    _write_table(out, config, ("name", "passed", "detail"), rows)
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
    print(f"wrote {out}")
    if not report.all_passed:
        failed = ", ".join(c.name for c in report.checks if not c.passed)
        raise ValidationError(f"self-checks failed: {failed}")
    return True


def _int_or_auto(text: str):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or an integer, got {text!r}")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--output-dir", dest="output_dir", help="directory for output files")
    common.add_argument(
        "--format", choices=[FORMAT_CSV, FORMAT_JSON], help="output file format"
    )
    series = argparse.ArgumentParser(add_help=False)
    series.add_argument(
        "paths",
        nargs="*",
        help="input price CSVs, either PATH or NAME=PATH (overrides config inputs)",
    )
    series.add_argument("--date-column", dest="date_column", help="date column name")
    series.add_argument("--price-column", dest="price_column", help="price column name")
    series.add_argument("--max-lag", dest="max_lag", type=int, help="lag-search ceiling")
    series.add_argument("--seed", type=int, help="root seed for all randomness")

    parser = argparse.ArgumentParser(
        prog="tvareff",
        description="Time-varying market-efficiency measurement for return series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser(
        "stats",
        parents=[common, series],
        help="descriptive statistics and unit-root tests per asset",
    )

    eff = sub.add_parser(
        "efficiency",
        parents=[common, series],
        help="fit the model and write efficiency series with bootstrap bands",
    )
    eff.add_argument(
        "--q", type=_int_or_auto, help="AR order, or 'auto' to select by BIC"
    )
    eff.add_argument("--n-boot", dest="n_boot", type=int, help="bootstrap replications")
    eff.add_argument("--level", type=float, help="band coverage in (0, 1)")
    eff.add_argument(
        "--fixed-lambda",
        dest="fixed_lambda",
        type=float,
        help="fixed smoothing ratio instead of feasible GLS",
    )
    eff.add_argument("--n-jobs", dest="n_jobs", type=int, help="bootstrap worker processes")
    eff.add_argument(
        "--export-coefficients",
        dest="export_coefficients",
        action="store_true",
        default=None,
        help="also write per-period coefficients and standard errors as CSV",
    )

    val = sub.add_parser("validate", parents=[common], help="run estimator self-checks")
    val.add_argument(
        "--fast",
        action="store_true",
        help="skip the bootstrap false-positive check for a sub-second run",
    )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _build_run_config(args)
        if args.command == "stats":
            cmd_stats(config)
        elif args.command == "efficiency":
            cmd_efficiency(config)
        else:
            cmd_validate(config, include_bootstrap=not args.fast)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
