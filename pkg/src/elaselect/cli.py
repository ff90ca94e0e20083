"""Command-line entry point: sample, features, select, validate, report."""
from __future__ import annotations

import argparse
import glob
import json
import logging
import os
import re
import sys
import time

import numpy as np

from . import dataset as dsmod
from . import report as rep
from .config import ConfigError, ExperimentConfig, load_config, parse_int_list, to_ini
from .features import FEATURE_NAMES, FeatureError
from .pipeline import compute_dataset, generate_samples, load_samples, save_samples
from .validation import enumerate_minimal_portfolios, invariance_report, run_validation

EXIT_OK, EXIT_GATE, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3

log = logging.getLogger("elaselect")


class DataError(RuntimeError):
    """Missing or malformed upstream artifact."""


# ---------------------------------------------------------------------------
# paths


def _p(cfg: ExperimentConfig, *parts) -> str:
    return os.path.join(cfg.out_dir, *parts)


def samples_dir(cfg, d, n):
    return _p(cfg, "samples", f"d{d}_n{n}")


def features_path(cfg, d, n):
    return _p(cfg, "features", f"features_d{d}_n{n}.csv")


def portfolio_path(cfg, d, n, clf):
    return _p(cfg, "select", f"portfolio_d{d}_n{n}_{clf}.json")


def validation_path(cfg, d, n, clf, protocol):
    return _p(cfg, "validate", f"validation_d{d}_n{n}_{clf}_{protocol}.json")


def _groups(cfg):
    for d in cfg.dimensions:
        for m in cfg.samples_per_dim:
            yield d, m, m * d


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _sidecar(cfg, verb: str) -> None:
    # timestamps live only here so every other artifact stays byte-stable
    os.makedirs(cfg.out_dir, exist_ok=True)
    with open(_p(cfg, "run.log"), "a", encoding="utf-8") as fh:
        fh.write(f"{time.strftime('%Y-%m-%dT%H:%M:%S')} {verb} config_hash={cfg.hash()}\n")
    _write(_p(cfg, "config.ini"), f"# config_hash={cfg.hash()}\n" + to_ini(cfg))


def load_features(cfg, d, n) -> dsmod.FeatureDataset:
    path = features_path(cfg, d, n)
    if not os.path.exists(path):
        raise DataError(f"{path} not found; run `elaselect features` with the same config first")
    ds = dsmod.load(path)
    want = set(cfg.instances)
    have = set(np.unique(ds.instances).tolist())
    if not want <= have:
        raise DataError(f"{path} lacks instance(s) {sorted(want - have)}")
    rows = np.isin(ds.instances, list(want)) & np.isin(ds.labels, list(cfg.functions))
    return ds.subset(np.flatnonzero(rows))


# ---------------------------------------------------------------------------
# verbs


def cmd_sample(cfg: ExperimentConfig) -> int:
    for d, m, n in _groups(cfg):
        s = generate_samples(cfg, d, n)
        save_samples(s, samples_dir(cfg, d, n))
        log.info("wrote %d samples for d=%d n=%d", s.meta.shape[0], d, n)
    return EXIT_OK


def cmd_features(cfg: ExperimentConfig, samples: str | None = None) -> int:
    for d, m, n in _groups(cfg):
        ss = None
        if samples is not None:
            path = os.path.join(samples, f"d{d}_n{n}") if not os.path.exists(
                os.path.join(samples, "meta.npy")) else samples
            ss = load_samples(path)
        ds = compute_dataset(cfg, d, n, samples=ss,
                             progress=lambda k, t: log.debug("d=%d n=%d %d/%d", d, n, k, t))
        dsmod.save(ds, features_path(cfg, d, n),
                   comments=[f"config_hash={cfg.hash()}", f"dimension={d}", f"sample_size={n}"])
        log.info("wrote %s (%d rows)", features_path(cfg, d, n), len(ds))
    return EXIT_OK


def _report_dict(r) -> dict:
    return {
        "protocol": r.protocol, "classifier": r.classifier, "subset": list(r.subset),
        "accuracies": r.accuracies, "correct": r.correct, "totals": r.totals,
        "passed": r.passed, "complete": r.complete,
        "min": r.min_accuracy, "median": r.median_accuracy, "mean": r.mean_accuracy,
    }


def _confusion_csv(r, h: str) -> str:
    cls = [str(int(c)) for c in r.classes]
    lines = [f"# config_hash={h}", "true\\pred," + ",".join(cls)]
    for c, row in zip(cls, r.confusion):
        lines.append(c + "," + ",".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def cmd_select(cfg: ExperimentConfig) -> int:
    code = EXIT_OK
    h = cfg.hash()
    for d, m, n in _groups(cfg):
        ds = dsmod.normalize(load_features(cfg, d, n))
        for clf in cfg.classifiers:
            lines = [f"# config_hash={h}", "subset,run,correct,total,accuracy"]

            def on_subset(subset, r):
                for k, (c, t) in enumerate(zip(r.correct, r.totals)):
                    lines.append(f"{'+'.join(subset)},{k},{c},{t},{c / t!r}")

            res = enumerate_minimal_portfolios(ds, clf, cfg.master_seed, cfg.runs, cfg.protocol,
                                               on_subset=on_subset)
            summary = {
                "config_hash": h, "dimension": d, "sample_size": n, "samples_per_dim": m,
                "classifier": clf, "protocol": cfg.protocol, "size": res.size,
                "subsets": [list(s) for s in res.subsets], "evaluated": res.evaluated,
                "best": list(res.best) if res.best else None,
                "reports": [_report_dict(r) for r in res.reports.values()],
            }
            _write(portfolio_path(cfg, d, n, clf), _json(summary))
            _write(portfolio_path(cfg, d, n, clf).replace(".json", "_runs.csv"),
                   "\n".join(lines) + "\n")
            for s, r in res.reports.items():
                _write(_p(cfg, "select", f"confusion_d{d}_n{n}_{clf}_{'+'.join(s)}.csv"),
                       _confusion_csv(r, h))
            if res.found:
                log.info("d=%d n=%d %s: minimal size %d, %d subset(s)", d, n, clf, res.size,
                         len(res.subsets))
            else:
                log.warning("d=%d n=%d %s: no subset passes the gate (best %s)", d, n, clf,
                            res.best)
                code = EXIT_GATE
    return code


def cmd_validate(cfg: ExperimentConfig, subset=FEATURE_NAMES) -> int:
    h = cfg.hash()
    for d, m, n in _groups(cfg):
        raw = load_features(cfg, d, n)
        ds = raw if cfg.train_only_norm else dsmod.normalize(raw)
        for clf in cfg.classifiers:
            try:
                r = run_validation(ds, subset, clf, cfg.protocol, cfg.runs, cfg.master_seed,
                                   train_only_norm=cfg.train_only_norm, K=cfg.knn_k)
            except ValueError as exc:
                raise DataError(str(exc)) from None
            out = dict(_report_dict(r), config_hash=h, dimension=d, sample_size=n)
            path = validation_path(cfg, d, n, clf, cfg.protocol)
            _write(path, _json(out))
            _write(path.replace(".json", "_confusion.csv"), _confusion_csv(r, h))
            log.info("d=%d n=%d %s %s: median accuracy %.4f (min %.4f)", d, n, clf,
                     cfg.protocol, r.median_accuracy, r.min_accuracy)
        if np.unique(raw.instances).size > 1:
            inv = invariance_report(raw, cfg.theta)
            _write(_p(cfg, "validate", f"invariance_d{d}_n{n}.json"), _json({
                "config_hash": h, "theta": cfg.theta, "invariant": inv.invariant,
                "max_spread": inv.max_spread}))
    return EXIT_OK


def cmd_report(cfg: ExperimentConfig) -> int:
    h = cfg.hash()
    header = f"# config_hash={h}\n"
    for clf in cfg.classifiers:
        sizes, entries = {}, []
        for d, m, n in _groups(cfg):
            path = portfolio_path(cfg, d, n, clf)
            if not os.path.exists(path):
                continue
            with open(path, encoding="utf-8") as fh:
                s = json.load(fh)
            sizes[(d, m)] = s["size"]
            entries.append((d, m, [tuple(x) for x in s["subsets"]]))
        if entries:
            _write(_p(cfg, "report", f"table_sizes_{clf}.txt"),
                   header + rep.size_table(sizes, cfg.dimensions, cfg.samples_per_dim))
            _write(_p(cfg, "report", f"table_portfolios_{clf}.txt"),
                   header + rep.portfolio_table(entries))
    found = False
    for d, m, n in _groups(cfg):
        if not os.path.exists(features_path(cfg, d, n)):
            continue
        found = True
        ds = load_features(cfg, d, n)
        for f in FEATURE_NAMES:
            svg = rep.feature_boxplot(ds, f)
            _write(_p(cfg, "report", f"box_{f}_d{d}_n{n}.svg"), f"<!-- config_hash={h} -->\n" + svg)
    acc_groups = []
    for path in sorted(glob.glob(_p(cfg, "validate", "validation_*.json"))):
        with open(path, encoding="utf-8") as fh:
            v = json.load(fh)
        label = re.sub(r"^validation_|\.json$", "", os.path.basename(path))
        acc_groups.append((label, v["accuracies"]))
    if acc_groups:
        _write(_p(cfg, "report", "box_accuracy.svg"),
               f"<!-- config_hash={h} -->\n" + rep.accuracy_boxplot(acc_groups))
    if not found and not acc_groups:
        raise DataError(f"nothing to report under {cfg.out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elaselect", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI experiment configuration")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--dim", help="dimensions, e.g. 5,10")
    common.add_argument("--samples-per-dim", help="sample-size multipliers, e.g. 250,650")
    common.add_argument("--reps", type=int, help="repetitions per function and instance")
    common.add_argument("--instances", help="instance ids, e.g. 1-5")
    common.add_argument("--functions", help="function ids (default 1-24)")
    common.add_argument("--classifier", choices=("mj", "dt", "knn"))
    common.add_argument("--protocol", choices=("subsample", "multi", "loio"))
    common.add_argument("--runs", type=int, help="validation runs")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("sample", parents=[common], help="write Sobol' samples")
    f = sub.add_parser("features", parents=[common], help="compute feature datasets")
    f.add_argument("--samples", help="ingest samples from this directory")
    sub.add_parser("select", parents=[common], help="search minimal feature portfolios")
    v = sub.add_parser("validate", parents=[common], help="validate one feature subset")
    v.add_argument("--subset", help="comma-separated feature names (default: all ten)")
    sub.add_parser("report", parents=[common], help="tables and box plots")
    return p


def config_from_args(a) -> ExperimentConfig:
    cfg = load_config(a.config) if a.config else ExperimentConfig()
    kw = {}
    if a.seed is not None:
        kw["master_seed"] = a.seed
    if a.dim:
        kw["dimensions"] = parse_int_list(a.dim, "--dim")
    if a.samples_per_dim:
        kw["samples_per_dim"] = parse_int_list(a.samples_per_dim, "--samples-per-dim")
    if a.reps is not None:
        kw["repetitions"] = a.reps
    if a.instances:
        kw["instances"] = parse_int_list(a.instances, "--instances")
    if a.functions:
        kw["functions"] = parse_int_list(a.functions, "--functions")
    if a.classifier:
        kw["classifiers"] = (a.classifier,)
    if a.protocol:
        kw["protocol"] = a.protocol
    if a.runs is not None:
        kw["runs"] = a.runs
    if a.workers is not None:
        kw["workers"] = a.workers
    if a.out:
        kw["out_dir"] = a.out
    return cfg.replace(**kw) if kw else cfg


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if a.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = config_from_args(a)
        subset = FEATURE_NAMES
        if getattr(a, "subset", None):
            subset = tuple(s.strip() for s in a.subset.split(","))
            bad = [s for s in subset if s not in FEATURE_NAMES]
            if bad:
                raise ConfigError(f"--subset: unknown feature(s) {bad}; "
                                  f"choose from {', '.join(FEATURE_NAMES)}")
    except (ConfigError, OSError) as exc:
        print(f"elaselect: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _sidecar(cfg, a.verb)
        if a.verb == "sample":
            return cmd_sample(cfg)
        if a.verb == "features":
            return cmd_features(cfg, a.samples)
        if a.verb == "select":
            return cmd_select(cfg)
        if a.verb == "validate":
            return cmd_validate(cfg, subset)
        return cmd_report(cfg)
    except (DataError, dsmod.DatasetFormatError, FeatureError, FileNotFoundError) as exc:
        print(f"elaselect: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
