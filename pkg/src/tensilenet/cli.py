"""Command-line front end: search, train, validate, recall, report.

Configuration is a flat key=value file; every key can be overridden by the
same-named command-line flag, and flags win. Exit codes: 0 success, 1 I/O
error, 2 invalid input/config, 3 snapshot incompatibility.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import experiment, fixture_path, network, svgplot, trainer
from .data import DataError, Dataset, augment_reversed, fit_scaler, group_means, parse_csv
from .network import SnapshotError
from .trainer import LmConfig

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_SNAPSHOT = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    train_csv: str = str(fixture_path("table1_reconstructed.csv"))
    validation_csv: str = str(fixture_path("table2_validation.csv"))
    recall_csv: str = str(fixture_path("table3_recall_inputs.csv"))
    paper_sim_csv: str = ""
    out_dir: str = "out"
    model: str = ""  # default: <out_dir>/model.snapshot
    hidden: int = 0  # 0: use hidden_range
    hidden_lo: int = 10
    hidden_hi: int = 25
    restarts: int = 3
    seed: int = 0
    max_epochs: int = 1000
    emit_plot: bool = False

    @property
    def model_path(self) -> Path:
        return Path(self.model) if self.model else Path(self.out_dir) / "model.snapshot"

    def lm_config(self) -> LmConfig:
        return LmConfig(seed=self.seed, restarts=self.restarts, max_epochs=self.max_epochs)


_INT_KEYS = {"hidden", "hidden_lo", "hidden_hi", "restarts", "seed", "max_epochs"}


def _apply_key(cfg: RunConfig, key: str, value: str) -> None:
    names = {f.name for f in fields(RunConfig)}
    if key not in names:
        raise ConfigError(f"unknown config key {key!r}")
    if key in _INT_KEYS:
        try:
            setattr(cfg, key, int(value))
        except ValueError:
            raise ConfigError(f"config key {key!r}: not an integer: {value!r}") from None
    elif key == "emit_plot":
        if value not in ("0", "1", "true", "false"):
            raise ConfigError(f"config key emit_plot: expected 0/1/true/false, got {value!r}")
        cfg.emit_plot = value in ("1", "true")
    else:
        setattr(cfg, key, value)


def load_config_file(cfg: RunConfig, path: str) -> None:
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        _apply_key(cfg, key.strip(), value.strip())


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        load_config_file(cfg, args.config)
    flag_map = {
        "train_csv": args.train_csv,
        "validation_csv": args.validation_csv,
        "recall_csv": args.recall_csv,
        "paper_sim_csv": args.paper_sim_csv,
        "out_dir": args.out_dir,
        "model": args.model,
        "restarts": args.restarts,
        "seed": args.seed,
        "max_epochs": args.max_epochs,
    }
    for key, value in flag_map.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.hidden is not None:
        cfg.hidden = args.hidden
    if args.hidden_range is not None:
        try:
            lo, hi = (int(v) for v in args.hidden_range.split(","))
        except ValueError:
            raise ConfigError(f"--hidden-range expects 'a,b', got {args.hidden_range!r}") from None
        cfg.hidden_lo, cfg.hidden_hi = lo, hi
    if args.emit_plot:
        cfg.emit_plot = True
    if cfg.hidden < 0 or cfg.restarts < 1 or cfg.max_epochs < 1:
        raise ConfigError("hidden must be >= 0, restarts and max_epochs >= 1")
    if cfg.hidden == 0 and not (1 <= cfg.hidden_lo <= cfg.hidden_hi):
        raise ConfigError(f"invalid hidden range [{cfg.hidden_lo}, {cfg.hidden_hi}]")
    return cfg


def _read_text(path) -> str:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    return p.read_text(encoding="utf-8")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _load_training(cfg: RunConfig):
    ds = parse_csv(_read_text(cfg.train_csv))
    if len(ds) == 0:
        raise DataError(f"empty dataset: {cfg.train_csv}")
    augmented = augment_reversed(ds)
    scaler = fit_scaler(augmented)
    x = scaler.scale_x(augmented.inputs())
    y = scaler.scale_y(augmented.outputs())
    return augmented, scaler, x, y


def _load_paper_sim(path: str) -> np.ndarray:
    header = "layout,angle_deg,sigma_sim_mpa,eps_sim_pct"
    rows = []
    seen_header = False
    for lineno, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not seen_header:
            if line != header:
                raise DataError(f"line {lineno}: expected header {header!r}")
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise DataError(f"line {lineno}: expected 4 columns, got {len(parts)}")
        try:
            rows.append((float(parts[2]), float(parts[3])))
        except ValueError:
            raise DataError(f"line {lineno}: malformed number") from None
    if not seen_header:
        raise DataError(f"empty file: {path}")
    return np.array(rows, dtype=float).reshape(-1, 2)


def cmd_search(cfg: RunConfig) -> int:
    _, scaler, x, y = _load_training(cfg)
    h_range = (cfg.hidden, cfg.hidden) if cfg.hidden else (cfg.hidden_lo, cfg.hidden_hi)
    result, params = experiment.hidden_size_search(cfg.lm_config(), h_range, x, y, scaler)
    out = Path(cfg.out_dir)
    _write_text(out / "scan.csv", result.to_csv())
    out.mkdir(parents=True, exist_ok=True)
    network.save_snapshot(cfg.model_path, params, scaler)
    print(f"selected h={result.selected_h} train_mse={result.selected_mse:.6f}")
    return EXIT_OK


def cmd_train(cfg: RunConfig) -> int:
    _, scaler, x, y = _load_training(cfg)
    h = cfg.hidden or 15
    params, summary = trainer.train_best(cfg.lm_config(), h, x, y, scaler)
    cfg.model_path.parent.mkdir(parents=True, exist_ok=True)
    network.save_snapshot(cfg.model_path, params, scaler)
    lines = ["seed,train_mse,epochs,converged_reason"]
    lines += [f"{r.seed},{r.train_mse!r},{r.epochs},{r.converged_reason}" for r in summary]
    _write_text(Path(cfg.out_dir) / "train_summary.csv", "\n".join(lines) + "\n")
    best = min(r.train_mse for r in summary)
    print(f"trained h={h} train_mse={best:.6f}")
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    ds = parse_csv(_read_text(cfg.validation_csv))
    if len(ds) == 0:
        raise DataError(f"empty dataset: {cfg.validation_csv}")
    if cfg.paper_sim_csv:
        sim = _load_paper_sim(cfg.paper_sim_csv)
        rows = experiment.validation_report_from_sim(ds, sim)
        v_mse = experiment.mse_pairs(ds.outputs(), sim)
    else:
        params, scaler = network.load_snapshot(cfg.model_path)
        rows = experiment.validation_report(params, scaler, ds)
        v_mse = experiment.mse(params, scaler, ds)
    _write_text(Path(cfg.out_dir) / "validation_report.csv",
                experiment.validation_rows_to_csv(rows))
    print(f"validation_mse={v_mse:.6f}")
    if cfg.emit_plot:
        _emit_fit_outputs(cfg, rows)
    return EXIT_OK


def cmd_recall(cfg: RunConfig) -> int:
    inputs_ds = parse_csv(_read_text(cfg.recall_csv))
    if len(inputs_ds) == 0:
        raise DataError(f"empty dataset: {cfg.recall_csv}")
    params, scaler = network.load_snapshot(cfg.model_path)
    train_ds = parse_csv(_read_text(cfg.train_csv))
    means = group_means(augment_reversed(train_ds))
    inputs = [(s.layout_code, s.angle_deg) for s in inputs_ds]
    rows = experiment.recall(params, scaler, inputs)
    lines = ["no,layout,angle_deg,sigma_sim,eps_sim,group"]
    lines += [
        f"{i},{r.layout_code},{r.angle_deg!r},{r.sigma_sim!r},{r.eps_sim!r},{r.group}"
        for i, r in enumerate(rows, start=1)
    ]
    _write_text(Path(cfg.out_dir) / "recall_report.csv", "\n".join(lines) + "\n")
    # group analysis needs the full fixture input set; skip it for ad-hoc inputs
    present = {(r.layout_code, r.angle_deg) for r in rows}
    if all((l, float(a)) in present for l, a in experiment.RECALL_FIXTURE_INPUTS):
        report = experiment.group_analysis(rows, means)
        _write_text(Path(cfg.out_dir) / "group_report.csv", report.to_csv())
    print(f"recall rows={len(rows)}")
    return EXIT_OK


def _parse_validation_report(text: str) -> list[experiment.ValidationRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError("empty validation report")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 12:
            raise DataError(f"bad validation report row: {ln!r}")
        vals = [float(v) for v in parts[2:]]
        rows.append(experiment.ValidationRow(int(vals[0]), *vals[1:]))
    return rows


def _emit_fit_outputs(cfg: RunConfig, rows) -> None:
    out = Path(cfg.out_dir)
    lines = ["index,actual,simulated,channel"]
    for i, r in enumerate(rows, start=1):
        lines.append(f"{i},{r.sigma_actual!r},{r.sigma_sim!r},sigma")
        lines.append(f"{i},{r.eps_actual!r},{r.eps_sim!r},eps")
    _write_text(out / "fit_data.csv", "\n".join(lines) + "\n")
    idx = list(range(1, len(rows) + 1))
    _write_text(out / "fit_sigma.svg", svgplot.render_fit_plot(
        idx, [r.sigma_actual for r in rows], [r.sigma_sim for r in rows],
        "Tensile strength: actual vs simulated", "sigma_M [MPa]"))
    _write_text(out / "fit_eps.svg", svgplot.render_fit_plot(
        idx, [r.eps_actual for r in rows], [r.eps_sim for r in rows],
        "Elongation at break: actual vs simulated", "eps_M [%]"))


def cmd_report(cfg: RunConfig) -> int:
    report_path = Path(cfg.out_dir) / "validation_report.csv"
    rows = _parse_validation_report(_read_text(report_path))
    if not rows:
        raise DataError(f"empty report: {report_path}")
    _emit_fit_outputs(cfg, rows)
    print(f"report points={2 * len(rows)}")
    return EXIT_OK


COMMANDS = {
    "search": cmd_search,
    "train": cmd_train,
    "validate": cmd_validate,
    "recall": cmd_recall,
    "report": cmd_report,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensilenet",
        description="Train and evaluate a 2-h-2 perceptron tensile-property "
                    "surrogate with Levenberg-Marquardt.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--train-csv", dest="train_csv", default=None)
        p.add_argument("--validation-csv", dest="validation_csv", default=None)
        p.add_argument("--recall-csv", dest="recall_csv", default=None)
        p.add_argument("--paper-sim-csv", dest="paper_sim_csv", default=None)
        p.add_argument("--out-dir", dest="out_dir", default=None)
        p.add_argument("--model", default=None)
        p.add_argument("--hidden", type=int, default=None)
        p.add_argument("--hidden-range", dest="hidden_range", default=None)
        p.add_argument("--restarts", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--max-epochs", dest="max_epochs", type=int, default=None)
        p.add_argument("--emit-plot", dest="emit_plot", action="store_true")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except SnapshotError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SNAPSHOT
    except (ConfigError, DataError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
