"""``hqdetect`` command line: generate data, sweep hybrid models, run the gated pipeline.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .classical.forest import RfConfig
from .classical.metrics import confusion_matrix, metrics_from_cm, roc_auc
from .classical.mlp import MlpConfig
from .errors import (
    ConfigError,
    DataError,
    HQDetectError,
    InvalidSpec,
    ModelLoadError,
    NumericalError,
)
from .hybrid import HybridConfig, HybridModel, QuantumEncoder, canonical_kind, extract_features, train_hybrid
from .pipeline import (
    STAGES,
    PipelineConfig,
    assemble_pipeline,
    classify_views,
    composite_objective,
    interpretability_cost,
    layer_latencies,
    measure_latency,
    stage_counts,
    write_outcomes,
)
from .quantum.estimators import resource_counts
from .serialize import load_model, save_model
from .telemetry import (
    CLASS_NAMES,
    LAYER_VIEWS,
    N_CLASSES,
    GeneratorSpec,
    TelemetryDataset,
    generate_dataset,
    layer_labels,
    load_csv,
    write_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _opt_int(v: str):
    return None if v.strip().lower() in ("", "none") else int(v)


def _str_list(v: str) -> tuple:
    return tuple(s.strip() for s in v.split(",") if s.strip())


def _int_list(v: str) -> tuple:
    return tuple(int(s) for s in _str_list(v))


# key -> (parser, default). Every key is documented in README.md.
CONFIG_KEYS = {
    "source": (str, "generate"),
    "data": (str, ""),
    "csv_schema": (str, "full"),
    "n": (int, 3000),
    "seed": (int, 42),
    "delta": (float, 0.3),
    "sigma": (float, 0.08),
    "rho": (float, 0.05),
    "binary_unauthorized": (_bool, True),
    "layers": (_int_list, (3,)),
    "encodings": (_str_list, ("none",)),
    "compositions": (_str_list, ("serial",)),
    "heads": (_str_list, ("rf",)),
    "split": (float, 0.7),
    "split_seed": (_opt_int, None),
    "circuit_seed": (int, 0),
    "rf_trees": (int, 100),
    "rf_depth": (int, 12),
    "mlp_hidden": (_int_list, (32, 16)),
    "mlp_epochs": (int, 200),
    "mlp_lr": (float, 0.1),
    "mlp_batch": (int, 32),
    "train_pqc": (_bool, False),
    "plots": (_bool, True),
    "out": (str, "runs"),
    "l1_model": (str, ""),
    "l2_model": (str, ""),
    "l3_model": (str, ""),
    "model_version": (str, "1"),
    "tau1": (float, 0.5),
    "tau2": (float, 0.5),
    "max_delay": (int, 100),
    "l2_delay": (int, 0),
    "lambda1": (float, 1.0),
    "lambda2": (float, 1.0),
    "lambda3": (float, 1.0),
    "lambda4": (float, 0.1),
}


@dataclass
class Config:
    values: dict = field(default_factory=lambda: {k: d for k, (_, d) in CONFIG_KEYS.items()})
    lines: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def set(self, key, raw: str, line=None):
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", line=line, field=key)
        parser = CONFIG_KEYS[key][0]
        try:
            self.values[key] = parser(raw) if isinstance(raw, str) else raw
        except ValueError as exc:
            raise ConfigError(f"bad value {raw!r}: {exc}", line=line, field=key) from None
        self.lines[key] = line

    def fail(self, key, message):
        raise ConfigError(message, line=self.lines.get(key), field=key)


def parse_config_text(text: str, cfg: Config | None = None) -> Config:
    """Flat ``key = value`` lines; ``#`` starts a comment; each key at most once."""
    cfg = cfg or Config()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}", line=lineno, field=key)
        seen.add(key)
        cfg.set(key, value, lineno)
    return cfg


def load_config(path) -> Config:
    if path is None:
        return Config()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text)


def apply_overrides(cfg: Config, args) -> Config:
    pairs = {
        "out": getattr(args, "out", None), "seed": getattr(args, "seed", None), "n": getattr(args, "n", None),
        "layers": getattr(args, "layer", None), "encodings": getattr(args, "encoding", None),
        "heads": getattr(args, "head", None), "compositions": getattr(args, "composition", None),
        "split": getattr(args, "split", None),
    }
    for key, v in pairs.items():
        if v is not None:
            cfg.set(key, str(v), line=None)
    return cfg


def validate(cfg: Config) -> None:
    if not 0.0 < cfg["split"] < 1.0:
        cfg.fail("split", "split fraction must lie strictly between 0 and 1")
    if not cfg["layers"]:
        cfg.fail("layers", "need at least one layer target")
    for layer in cfg["layers"]:
        if layer not in (1, 2, 3):
            cfg.fail("layers", f"layer {layer} is not 1, 2 or 3")
    try:
        cfg.values["encodings"] = tuple(canonical_kind(k) for k in cfg["encodings"])
    except HQDetectError as exc:
        cfg.fail("encodings", str(exc))
    for key, allowed in (("compositions", ("serial", "parallel")), ("heads", ("rf", "mlp"))):
        vals = tuple(v.lower() for v in cfg[key])
        bad = [v for v in vals if v not in allowed]
        if bad or not vals:
            cfg.fail(key, f"choose from {', '.join(allowed)}")
        cfg.values[key] = vals
    if cfg["source"] not in ("generate", "csv"):
        cfg.fail("source", "source must be 'generate' or 'csv'")
    if cfg["source"] == "csv" and not cfg["data"]:
        cfg.fail("data", "source = csv needs a data path")
    for key in ("rf_trees", "rf_depth", "mlp_epochs", "mlp_batch"):
        if cfg[key] < 1:
            cfg.fail(key, "must be at least 1")
    for key in ("lambda1", "lambda2", "lambda3", "lambda4"):
        if cfg[key] < 0:
            cfg.fail(key, "weights must be nonnegative")


def thread_count() -> int:
    raw = os.environ.get("HQDETECT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"HQDETECT_THREADS={raw!r} is not an integer") from None
    if n < 1:
        raise ConfigError("HQDETECT_THREADS must be at least 1")
    return n


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

def generator_spec(cfg: Config) -> GeneratorSpec:
    return GeneratorSpec(n_samples=cfg["n"], seed=cfg["seed"], delta=cfg["delta"], sigma=cfg["sigma"],
                         rho=cfg["rho"], binary_unauthorized=cfg["binary_unauthorized"])


def dataset_identity(cfg: Config) -> dict:
    if cfg["source"] == "csv":
        digest = hashlib.sha256(Path(cfg["data"]).read_bytes()).hexdigest()
        return {"source": "csv", "csv_schema": cfg["csv_schema"], "sha256": digest}
    return {"source": "generate", **{k: cfg[k] for k in ("n", "seed", "delta", "sigma", "rho",
                                                          "binary_unauthorized")}}


def load_dataset(cfg: Config) -> TelemetryDataset:
    if cfg["source"] == "csv":
        try:
            return load_csv(cfg["data"], cfg["csv_schema"])
        except FileNotFoundError:
            raise DataError(f"data file {cfg['data']} not found") from None
    return generate_dataset(generator_spec(cfg))


def split_indices(n: int, frac: float, seed: int):
    perm = np.random.default_rng(seed).permutation(n)
    n_train = int(round(frac * n))
    if n_train < 1 or n_train >= n:
        raise DataError(f"split {frac} of {n} records leaves an empty train or test set")
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


# ---------------------------------------------------------------------------
# train-eval sweep
# ---------------------------------------------------------------------------

_SCHEMAS = {}


def schema(name: str) -> dict:
    if name not in _SCHEMAS:
        text = resources.files("hqdetect").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
        _SCHEMAS[name] = json.loads(text)
    return _SCHEMAS[name]


def run_id_for(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write_confusion_csv(counts, path, names):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["true\\pred"] + list(names))
        for name, row in zip(names, counts):
            w.writerow([name] + [int(v) for v in row])


def hybrid_config(cfg: Config, encoding, composition, head, k) -> HybridConfig:
    return HybridConfig(
        encoding=encoding, composition=composition, head=head,
        rf=RfConfig(tree_count=cfg["rf_trees"], max_depth=cfg["rf_depth"], seed=cfg["seed"]),
        mlp=MlpConfig(hidden=cfg["mlp_hidden"], learning_rate=cfg["mlp_lr"], epochs=cfg["mlp_epochs"],
                      batch_size=cfg["mlp_batch"], seed=cfg["seed"]),
        train_pqc=cfg["train_pqc"], seed=cfg["circuit_seed"], n_classes=k)


def run_cell(cfg: Config, ds: TelemetryDataset, split, cell, out_root: Path) -> dict:
    layer, encoding, composition, head = cell
    train, test = split
    k = layer_labels(layer)
    X, y = ds.view(layer), ds.labels(layer)
    hcfg = hybrid_config(cfg, encoding, composition, head, k)
    resolved = {
        "dataset": dataset_identity(cfg), "split": cfg["split"],
        "split_seed": cfg["split_seed"] if cfg["split_seed"] is not None else cfg["seed"],
        "layer": layer, "encoding": encoding, "composition": composition, "head": head,
        "circuit_seed": cfg["circuit_seed"], "train_pqc": cfg["train_pqc"],
        "head_config": ({"tree_count": cfg["rf_trees"], "max_depth": cfg["rf_depth"], "seed": cfg["seed"]}
                        if head == "rf" else
                        {"hidden": list(cfg["mlp_hidden"]), "learning_rate": cfg["mlp_lr"],
                         "epochs": cfg["mlp_epochs"], "batch_size": cfg["mlp_batch"], "seed": cfg["seed"]}),
        "version": __version__,
    }
    rid = run_id_for(resolved)
    run_dir = out_root / f"L{layer}_{encoding}_{composition}_{head}"
    run_dir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    model = train_hybrid(X[train], y[train], hcfg)
    train_seconds = time.perf_counter() - t0
    proba = model.predict_proba(X[test])
    pred = np.argmax(proba, axis=1)
    cm = confusion_matrix(y[test], pred, k)
    report = metrics_from_cm(cm)
    auc = None
    if k == 2 and 0 < int(y[test].sum()) < len(test):
        auc = roc_auc(proba[:, 1], y[test])
    interp = interpretability_cost(model)
    loss = 1.0 - report.accuracy
    metrics = {
        "schema_version": 1, "run_id": rid, "config": resolved, "layer": layer, "encoding": encoding,
        "composition": composition, "head": head, "n_train": int(len(train)), "n_test": int(len(test)),
        "n_classes": k, "head_input_width": model.head_input_width, "metrics": report.to_dict(),
        "confusion_matrix": cm.tolist(), "auc": auc,
        "objective": {"loss": loss, "interpretability": interp},
    }
    jsonschema.validate(metrics, schema("metrics"))
    (run_dir / "metrics.json").write_text(_dump(metrics), encoding="utf-8")
    names = CLASS_NAMES if k == N_CLASSES else ("Normal", "Attack")
    _write_confusion_csv(cm.counts, run_dir / "confusion.csv", names)
    save_model(model, run_dir / "model.json")

    latency = measure_latency(lambda: model.predict_proba(X[test]))
    lam = cfg[f"lambda{layer}"]
    timing = {"run_id": rid, "train_seconds": train_seconds, "inference_seconds_median_of_5": latency,
              "objective_total": loss + lam * latency + cfg["lambda4"] * interp}
    (run_dir / "timing.json").write_text(_dump(timing), encoding="utf-8")

    if cfg["plots"]:
        from . import plotting

        label = f"L{layer} {encoding} {composition} {head}"
        plotting.plot_confusion(cm.counts, run_dir / "confusion.png", names, title=label)
        if auc is not None:
            plotting.plot_roc(proba[:, 1], y[test], run_dir / "roc.png", auc, title=label)
    return {"run_id": rid, "dir": run_dir.name, "layer": layer, "encoding": encoding,
            "composition": composition, "head": head, "accuracy": report.accuracy,
            "macro_f1": report.macro_f1, "weighted_f1": report.weighted_f1, "auc": auc}


SUMMARY_FIELDS = ("run_id", "dir", "layer", "encoding", "composition", "head", "accuracy", "macro_f1",
                  "weighted_f1", "auc")


def _fmt(v):
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else str(v)


def cmd_train_eval(cfg: Config, stdout=sys.stdout) -> int:
    validate(cfg)
    ds = load_dataset(cfg)
    if len(ds) == 0:
        raise DataError("dataset is empty")
    split_seed = cfg["split_seed"] if cfg["split_seed"] is not None else cfg["seed"]
    split = split_indices(len(ds), cfg["split"], split_seed)
    out_root = Path(cfg["out"])
    out_root.mkdir(parents=True, exist_ok=True)
    cells = [(layer, e, c, h) for layer in cfg["layers"] for e in cfg["encodings"]
             for c in cfg["compositions"] for h in cfg["heads"]]
    workers = min(thread_count(), len(cells))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda cell: run_cell(cfg, ds, split, cell, out_root), cells))
    else:
        rows = [run_cell(cfg, ds, split, cell, out_root) for cell in cells]
    # merge in sweep order regardless of completion order
    with open(out_root / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for r in rows:
            w.writerow([_fmt(r[f]) for f in SUMMARY_FIELDS])
    if cfg["plots"]:
        from . import plotting

        bars = [{"label": r["dir"], "accuracy": r["accuracy"]} for r in rows]
        plotting.plot_metric_bars(bars, out_root / "summary.png", "accuracy", "held-out accuracy")
    stdout.write((out_root / "summary.csv").read_text(encoding="utf-8"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def cmd_pipeline(cfg: Config, stdout=sys.stdout) -> int:
    validate(cfg)
    for key in ("l1_model", "l2_model", "l3_model"):
        if not cfg[key]:
            cfg.fail(key, "pipeline needs a trained model file for every layer")
    heads = [load_model(cfg[key]) for key in ("l1_model", "l2_model", "l3_model")]
    pcfg = PipelineConfig(tau1=cfg["tau1"], tau2=cfg["tau2"], max_l1_to_l2_delay=cfg["max_delay"],
                          lambdas=(cfg["lambda1"], cfg["lambda2"], cfg["lambda3"]), lambda_interp=cfg["lambda4"])
    try:
        pipe = assemble_pipeline(*heads, pcfg, model_version=cfg["model_version"])
    except NumericalError as exc:
        raise ModelLoadError(f"models do not fit the layer views: {exc}") from None
    ds = load_dataset(cfg)
    records = [ds.record(i) for i in range(len(ds))]
    ticks = [r.timestamp + cfg["l2_delay"] for r in records]
    outcomes = classify_views(pipe, records, ticks)

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    outcome_schema = schema("outcome")
    for o in outcomes:
        jsonschema.validate(o.to_dict(), outcome_schema)
    write_outcomes(outcomes, out / "outcomes.jsonl")
    counts = stage_counts(outcomes)
    final = np.array([o.final_label for o in outcomes], dtype=int)
    cm = confusion_matrix(ds.attack_class, final, N_CLASSES)
    summary = {"schema_version": 1, "model_version": cfg["model_version"], "records": len(outcomes),
               "stage_counts": counts, "stale": sum(o.stale for o in outcomes),
               "confusion_matrix": cm.tolist(),
               "metrics": metrics_from_cm(cm).to_dict() if len(outcomes) else None}
    (out / "summary.json").write_text(_dump(summary), encoding="utf-8")
    _write_confusion_csv(cm.counts, out / "confusion.csv", CLASS_NAMES)
    if len(ds):
        lat = layer_latencies(pipe, ds)
        errors = [float(np.mean(heads[i].predict(ds.view(i + 1)) != ds.labels(i + 1))) for i in range(3)]
        obj = composite_objective(errors, lat, heads[2], pcfg)
        (out / "timing.json").write_text(_dump({"latencies_median_of_5": list(lat),
                                                "objective": obj.to_dict()}), encoding="utf-8")
    if cfg["plots"]:
        from . import plotting

        plotting.plot_confusion(cm.counts, out / "confusion.png", CLASS_NAMES, "final label vs attack class")
        plotting.plot_stage_counts(counts, out / "stages.png")
    stdout.write("stage,count\n" + "".join(f"{s},{counts[s]}\n" for s in STAGES) + f"total,{len(outcomes)}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# small commands
# ---------------------------------------------------------------------------

def cmd_generate(cfg: Config, out_path, stdout=sys.stdout) -> int:
    ds = generate_dataset(generator_spec(cfg))
    write_csv(ds, out_path)
    stdout.write(f"samples,{len(ds)}\n")
    for name, c in zip(CLASS_NAMES, ds.class_counts()):
        stdout.write(f"{name},{c}\n")
    return EXIT_OK


def cmd_export_latent(cfg: Config, model_path, layer: int, encoding: str, out_path, stdout=sys.stdout) -> int:
    if model_path:
        model = load_model(model_path)
        if not isinstance(model, HybridModel):
            raise ModelLoadError(f"{model_path} is not a hybrid model")
        encoder = model.encoder
    else:
        encoder = QuantumEncoder.build(canonical_kind(encoding), len(layer_view_names(layer)), cfg["circuit_seed"])
    ds = load_dataset(cfg)
    X = ds.view(layer)
    if encoder.config.feature_dim != X.shape[1]:
        raise ConfigError(f"encoder takes {encoder.config.feature_dim} features but layer {layer} has {X.shape[1]}",
                          field="layer")
    Z = extract_features(encoder, X) if len(X) else np.zeros((0, encoder.width))
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"z_{i + 1}" for i in range(encoder.width)] + ["attack_class"])
        for z, label in zip(Z, ds.attack_class):
            w.writerow([repr(float(v)) for v in z] + [int(label)])
    stdout.write(f"rows,{len(X)}\ncolumns,{encoder.width}\n")
    return EXIT_OK


def layer_view_names(layer: int):
    if layer not in LAYER_VIEWS:
        raise ConfigError(f"layer {layer} is not 1, 2 or 3", field="layer")
    return LAYER_VIEWS[layer]


def _int_list_arg(text: str) -> tuple:
    try:
        return _int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_resources(n_proj: int, m_list, d_list, stdout=sys.stdout) -> int:
    est = resource_counts(n_proj, m_list, d_list)
    ratio = "" if est.ratio is None else repr(est.ratio)
    stdout.write(f"n_copies,{est.n_copies}\nn_tomography,{est.n_tomography}\nratio,{ratio}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hqdetect", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"hqdetect {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sweep=False):
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--out", help="output path (file or directory)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--n", type=int, help="number of generated samples")
        if sweep:
            sp.add_argument("--layer", help="layer target(s), e.g. 3 or 1,2,3")
            sp.add_argument("--encoding", help="encoding kind(s), comma-separated")
            sp.add_argument("--head", help="rf, mlp or both")
            sp.add_argument("--composition", help="serial, parallel or both")
            sp.add_argument("--split", type=float, help="train fraction in (0, 1)")

    g = sub.add_parser("gen", help="write a generated telemetry CSV")
    common(g)
    for flag in ("--delta", "--sigma", "--rho"):
        g.add_argument(flag, type=float)

    common(sub.add_parser("train-eval", help="train and evaluate a sweep of hybrid models"), sweep=True)
    common(sub.add_parser("pipeline", help="run the gated three-layer pipeline"))

    e = sub.add_parser("export-latent", help="write extracted features z for a dataset")
    common(e)
    e.add_argument("--model", help="hybrid model file from train-eval")
    e.add_argument("--layer", type=int, default=3)
    e.add_argument("--encoding", default="none", help="used when --model is not given")
    e.add_argument("--data", help="CSV dataset (default: generate)")

    r = sub.add_parser("resources", help="copies per training round vs tomography")
    r.add_argument("--n-proj", type=int, default=1)
    r.add_argument("--m-list", type=_int_list_arg, default=())
    r.add_argument("--d-list", type=_int_list_arg, default=())
    return p


def _dispatch(args, stdout) -> int:
    if args.command == "resources":
        return cmd_resources(args.n_proj, args.m_list, args.d_list, stdout)
    cfg = load_config(args.config)
    if args.command == "gen":
        for key in ("delta", "sigma", "rho"):
            if getattr(args, key) is not None:
                cfg.set(key, str(getattr(args, key)))
        if args.seed is not None:
            cfg.set("seed", str(args.seed))
        if args.n is not None:
            cfg.set("n", str(args.n))
        out = args.out or "telemetry.csv"
        return cmd_generate(cfg, out, stdout)
    if args.command == "export-latent":
        if args.seed is not None:
            cfg.set("seed", str(args.seed))
        if args.n is not None:
            cfg.set("n", str(args.n))
        if args.data:
            cfg.set("source", "csv")
            cfg.set("data", args.data)
        if not args.out:
            raise ConfigError("export-latent needs --out", field="out")
        return cmd_export_latent(cfg, args.model, args.layer, args.encoding, args.out, stdout)
    apply_overrides(cfg, args)
    if args.command == "train-eval":
        return cmd_train_eval(cfg, stdout)
    return cmd_pipeline(cfg, stdout)


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args, stdout)
    except ConfigError as exc:
        print(f"hqdetect: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"hqdetect: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        kind = "overflow" if isinstance(exc, OverflowError) else "numerical error"
        print(f"hqdetect: {kind}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidSpec, HQDetectError) as exc:
        print(f"hqdetect: invalid settings: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
