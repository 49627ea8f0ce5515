"""Command-line experiment drivers.

Every command writes its table (CSV or JSON) to ``--out`` and the fully
resolved experiment spec to ``<out>.spec.json``; ``okeca rerun`` replays a
spec file and reproduces the output byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bandwidth, data
from .classify import fit_map, overall_accuracy
from .kde import DensityEstimate, data_bounds, pdf_grid
from .keca import KECA, METHODS, OKECA, EntropyModel, cumulative_ip, fit_keca, transform
from .kernel import KernelModel
from .rotation import AscentConfig, fit_okeca

logger = logging.getLogger("okeca")

RULE_LABELS = {
    bandwidth.MEAN_DIST: "d1",
    bandwidth.MEDIAN15: "d2",
    bandwidth.SILVERMAN: "Silv",
    bandwidth.ML: "ML",
    bandwidth.CLASS_CV: "class",
}

# name -> (file, label column, dropped columns, N_train, N_test)
UCI_DATASETS = {
    "ionosphere": ("ionosphere.csv", -1, (), 60, 172),
    "letter": ("letter.csv", 0, (), 780, 3874),
    "pendigits": ("pendigits.csv", -1, (), 450, 3498),
    "pima-indians": ("pima-indians.csv", -1, (), 180, 330),
    "vowel": ("vowel.csv", -1, (), 100, 330),
    "wdbc": ("wdbc.csv", 1, (0,), 60, 344),
}
UCI_HINT = (
    "download it from https://archive.ics.uci.edu/ and save it as a CSV "
    "(label column as listed in the README) in --data-dir"
)

# (train per class, test per class) defaults for builtin datasets, per command
BUILTIN_SIZES = {
    "entropy-curve": {"ring": (80, 0), "moons": (10, 0), "pinwheel": (15, 0)},
    "pdf-grid": {"ring": (80, 0), "moons": (10, 0), "pinwheel": (15, 0)},
    "classify": {"moons": (20, 500), "pinwheel": (45, 500)},
}


class CellError(RuntimeError):
    pass


# ---------------------------------------------------------------- parsing helpers


def parse_components(text):
    """``"all"``, ``"1-10"``, ``"1,2,5"`` or a mix; ``None`` stands for all."""
    if text is None or str(text).lower() == "all":
        return [None]
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if part.lower() == "all":
            out.append(None)
        elif "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_floats(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


def parse_grid(text):
    """Comma list of values, or ``lo:hi:num`` for a log-spaced grid."""
    if text is None:
        return None
    if ":" in str(text):
        lo, hi, num = str(text).split(":")
        return np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(num))
    return np.array(parse_floats(text))


def parse_rules(text):
    return [bandwidth.resolve_rule(r.strip()) for r in str(text).split(",") if r.strip()]


def parse_methods(text):
    if text.lower() == "both":
        return list(METHODS)
    return [m.strip().upper() for m in text.split(",")]


def clip_components(components, n):
    """Component list capped at ``n``; ``None`` becomes ``n``; duplicates dropped."""
    seen = []
    for r in components:
        r = n if r is None else min(int(r), n)
        if r not in seen:
            seen.append(r)
    return seen


# ---------------------------------------------------------------- datasets


def builtin_dataset(args, n_per_class, seed):
    name = args.dataset
    if name == "ring":
        return data.gen_ring(n_per_class, args.inner_radius, args.outer_radius, seed)
    if name == "moons":
        return data.gen_two_moons(n_per_class, args.noise, seed)
    if name == "pinwheel":
        return data.gen_pinwheel(n_per_class, args.classes, args.twist, seed)
    raise ValueError(f"unknown dataset {name!r}")


def load_source(args):
    if args.csv:
        return data.load_csv(args.csv, args.label_column)
    return None


def unsupervised_data(args, command):
    """Training samples for commands that need no split."""
    ds = load_source(args)
    if ds is not None:
        return ds
    n = args.n_train or BUILTIN_SIZES[command][args.dataset][0]
    return builtin_dataset(args, n, args.seed)


def labeled_split(args, command):
    ds = load_source(args)
    if ds is None:
        n_tr, n_te = BUILTIN_SIZES[command].get(args.dataset, (20, 500))
        n_tr = args.n_train or n_tr
        n_te = args.n_test if args.n_test is not None else n_te
        ds = builtin_dataset(args, n_tr + n_te, args.seed)
    else:
        if not ds.labeled:
            raise ValueError("classification needs --label-column")
        if not args.n_train or args.n_test is None:
            raise ValueError("CSV input needs --n-train and --n-test (per class)")
        n_tr, n_te = args.n_train, args.n_test
    return data.split(ds, n_tr, n_te, args.seed)


# ---------------------------------------------------------------- sigma + models


def config(args):
    return AscentConfig(seed=args.seed)


def sigmas_for(args, X, y=None, method=KECA, rules=None):
    """Ordered (label, sigma) pairs; an explicit ``--sigma`` overrides the rules."""
    if args.sigma is not None:
        return [("fixed", float(args.sigma))]
    out = []
    for rule in rules if rules is not None else parse_rules(args.sigma_rule):
        s = bandwidth.select_sigma(rule, X, y, grid=parse_grid(getattr(args, "sigma_grid", None)),
                                   method=method, seed=args.seed, cfg=config(args))
        out.append((RULE_LABELS[rule], s))
    return out


def fit_method(method, X, sigma, args):
    return fit_okeca(X, sigma, config(args)) if method == OKECA else fit_keca(X, sigma)


# ---------------------------------------------------------------- commands
# each returns (rows, resolved) where rows is a list of dicts with stable key order


def cmd_entropy_curve(args, failures):
    ds = unsupervised_data(args, "entropy-curve")
    rows, resolved = [], {}
    sigma_pairs = sigmas_for(args, ds.X)
    caps = parse_components(args.components)
    cap = ds.n if None in caps else min(max(caps), ds.n)
    for label, sigma in sigma_pairs:
        resolved[label] = sigma
        for method in parse_methods(args.method):
            try:
                model = fit_method(method, ds.X, sigma, args)
            except Exception as exc:  # noqa: BLE001 - reported per cell
                failures.append(f"{method}/{label}: {exc}")
                continue
            total = model.total_ip
            for nc in range(1, cap + 1):
                rows.append({
                    "method": method, "sigma_rule": label, "sigma": sigma, "N_c": nc,
                    "cumulative_ip": cumulative_ip(model, nc), "total_ip": total,
                })
    return rows, {"sigma": resolved, "n": ds.n}


def cmd_pdf_grid(args, failures):
    ds = unsupervised_data(args, "pdf-grid")
    if ds.d != 2:
        raise ValueError(f"pdf-grid needs 2-D data, got d={ds.d}")
    bounds = tuple(parse_floats(args.bounds)) if args.bounds else data_bounds(ds.X)
    out_dir = Path(args.out) if args.out not in (None, "-") else None
    grid_dir = out_dir.with_suffix("") if out_dir is not None else None
    if grid_dir is not None:
        grid_dir.mkdir(parents=True, exist_ok=True)
    rows, resolved = [], {}
    for label, sigma in sigmas_for(args, ds.X):
        resolved[label] = sigma
        ref = pdf_grid(KernelModel(sigma, ds.X, normalized=True), bounds, args.resolution)
        _emit_grid(grid_dir, f"{label}_parzen", ref, args.format)
        for method in parse_methods(args.method):
            try:
                model = fit_method(method, ds.X, sigma, args)
            except Exception as exc:  # noqa: BLE001
                failures.append(f"{method}/{label}: {exc}")
                continue
            for r in clip_components(parse_components(args.components), ds.n):
                grid = pdf_grid(DensityEstimate(model, r), bounds, args.resolution)
                _emit_grid(grid_dir, f"{label}_{method}_r{r}", grid, args.format)
                rows.append({
                    "method": method, "sigma_rule": label, "sigma": sigma, "r": r,
                    "mae_vs_parzen": float(np.mean(np.abs(grid.values - ref.values))),
                })
    return rows, {"sigma": resolved, "bounds": list(map(float, bounds))}


def _emit_grid(directory, stem, grid, fmt):
    if directory is None:
        return
    if fmt == "json":
        (directory / f"{stem}.json").write_text(json.dumps(grid.to_dict()))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "pdf"])
        w.writerows([[repr(float(v)) for v in row] for row in grid.rows()])
        (directory / f"{stem}.csv").write_text(buf.getvalue())


def _classification_rows(train, test, args, rules, failures, extra=None):
    rows, resolved = [], {}
    comps = parse_components(args.components)
    for method in parse_methods(args.method):
        try:
            pairs = sigmas_for(args, train.X, train.y, method, rules)
        except Exception as exc:  # noqa: BLE001
            failures.append(f"{method}: sigma selection failed: {exc}")
            continue
        for label, sigma in pairs:
            resolved[f"{method}/{label}"] = sigma
            for r in comps:
                cell = f"{method}/{label}/r={'all' if r is None else r}"
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        clf = fit_map(train.X, train.y, sigma, method, r, config(args))
                    oa = overall_accuracy(clf.predict(test.X), test.y)
                except Exception as exc:  # noqa: BLE001
                    failures.append(f"{cell}: {exc}")
                    continue
                row = dict(extra or {})
                row.update({"method": method, "sigma_rule": label, "sigma": sigma,
                            "r": "all" if r is None else r, "OA": oa})
                rows.append(row)
    return rows, resolved


def cmd_classify(args, failures):
    train, test = labeled_split(args, "classify")
    rules = None if args.sigma_rule else list(RULE_LABELS)
    rows, resolved = _classification_rows(train, test, args, rules, failures)
    return rows, {"sigma": resolved, "n_train": train.n, "n_test": test.n}


def cmd_noise_sweep(args, failures):
    n_tr = args.n_train or 25
    n_te = args.n_test if args.n_test is not None else 250
    base = data.gen_two_moons(n_tr + n_te, 0.0, args.seed)
    train0, test0 = data.split(base, n_tr, n_te, args.seed)
    rows, resolved = [], {}
    rules = parse_rules(args.sigma_rule or "ml")
    for i, sn in enumerate(parse_floats(args.noise_levels)):
        train = data.add_gaussian_noise(train0, sn, args.seed + 1 + 2 * i)
        test = data.add_gaussian_noise(test0, sn, args.seed + 2 + 2 * i)
        cells, res = _classification_rows(train, test, args, rules, failures, {"sigma_n": sn})
        rows.extend(cells)
        resolved[repr(sn)] = res
    return rows, {"sigma": resolved}


def cmd_uci(args, failures):
    data_dir = Path(args.data_dir)
    names = [n.strip() for n in args.datasets.split(",")] if args.datasets else list(UCI_DATASETS)
    rows, resolved = [], {}
    for name in names:
        if name not in UCI_DATASETS:
            raise ValueError(f"unknown UCI dataset {name!r}; choose from {sorted(UCI_DATASETS)}")
        fname, label_col, drop, n_train, n_test = UCI_DATASETS[name]
        path = data_dir / fname
        if not path.exists():
            raise FileNotFoundError(f"{path} not found; {UCI_HINT}")
        ds = data.load_csv(path, label_col, drop)
        k = ds.n_classes
        train, test = data.split(
            ds, data.balanced_counts(n_train, k), data.balanced_counts(n_test, k), args.seed
        )
        cells, res = _classification_rows(
            train, test, args, [bandwidth.ML], failures, {"dataset": name}
        )
        resolved[name] = res
        rows.extend(cells)
        for method in parse_methods(args.method):
            oas = [c["OA"] for c in cells if c["method"] == method and c["r"] != "all"]
            if oas:
                rows.append({"dataset": name, "method": method, "sigma_rule": "ML",
                             "sigma": res.get(f"{method}/ML"), "r": "mean", "OA": float(np.mean(oas))})
    return rows, {"sigma": resolved}


def cmd_bandwidth(args, failures):
    ds = unsupervised_data(args, "entropy-curve") if not args.csv else load_source(args)
    rules = parse_rules(args.sigma_rule) if args.sigma_rule else list(bandwidth.UNSUPERVISED_RULES)
    if ds.labeled and not args.sigma_rule:
        rules.append(bandwidth.CLASS_CV)
    rows = []
    for rule in rules:
        try:
            s = bandwidth.select_sigma(rule, ds.X, ds.y, grid=parse_grid(args.sigma_grid),
                                       seed=args.seed, cfg=config(args))
        except Exception as exc:  # noqa: BLE001
            failures.append(f"{rule}: {exc}")
            continue
        rows.append({"sigma_rule": RULE_LABELS[rule], "sigma": s})
    return rows, {"n": ds.n, "d": ds.d}


def cmd_fit(args, failures):
    ds = unsupervised_data(args, "entropy-curve")
    method = parse_methods(args.method)[0]
    (label, sigma), = sigmas_for(args, ds.X, rules=None if args.sigma is not None
                                 else parse_rules(args.sigma_rule or "ml")[:1])
    model = fit_method(method, ds.X, sigma, args)
    return model.to_dict(), {"sigma": {label: sigma}}


def cmd_transform(args, failures):
    model = EntropyModel.from_json(Path(args.model).read_text())
    query = data.load_csv(args.input, args.label_column)
    r = clip_components(parse_components(args.components), model.n)[0]
    Z = transform(model, query.X, r)
    return [{f"c{j + 1}": float(v) for j, v in enumerate(row)} for row in Z], {"r": r}


COMMANDS = {
    "entropy-curve": cmd_entropy_curve,
    "pdf-grid": cmd_pdf_grid,
    "classify": cmd_classify,
    "noise-sweep": cmd_noise_sweep,
    "uci": cmd_uci,
    "bandwidth": cmd_bandwidth,
    "fit": cmd_fit,
    "transform": cmd_transform,
}


# ---------------------------------------------------------------- output


def render(rows, fmt):
    if isinstance(rows, dict):
        return json.dumps(rows) + "\n"
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    if not rows:
        return ""
    header = list(rows[0])
    for row in rows[1:]:
        header.extend(k for k in row if k not in header)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(k, "")) for k in header])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def spec_path(out):
    return Path(str(out) + ".spec.json")


def execute(params, out=None):
    """Run one command from a parameter dict; returns (exit code, rendered output)."""
    args = argparse.Namespace(**params)
    if out is not None:
        args.out = out
    failures = []
    rows, resolved = COMMANDS[args.command](args, failures)
    text = render(rows, args.format)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
        spec = {"params": {k: v for k, v in params.items() if k != "out"}, "resolved": resolved}
        spec_path(args.out).write_text(json.dumps(spec, indent=1, sort_keys=True) + "\n")
    for f in failures:
        print(f"failed cell: {f}", file=sys.stderr)
    return (1 if failures else 0), text


def _common_flags():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--sigma-rule", default=None,
                        help="comma list of ml, silv, d1, d2, class")
    common.add_argument("--sigma", type=float, default=None, help="explicit length-scale")
    common.add_argument("--sigma-grid", default=None,
                        help="grid for ml/class rules: comma list or lo:hi:num (log-spaced)")
    common.add_argument("--method", default="both", help="KECA, OKECA or both")
    common.add_argument("--components", default=None, help="e.g. 1-10, 1,3,5 or all")
    return common


def _source_flags():
    src = argparse.ArgumentParser(add_help=False)
    src.add_argument("--dataset", choices=("ring", "moons", "pinwheel"), default=None)
    src.add_argument("--csv", default=None, help="CSV file instead of a builtin dataset")
    src.add_argument("--label-column", type=int, default=None)
    src.add_argument("--n-train", type=int, default=None, help="samples (per class) for training")
    src.add_argument("--n-test", type=int, default=None, help="test samples per class")
    src.add_argument("--noise", type=float, default=0.05, help="two-moons jitter std")
    src.add_argument("--classes", type=int, default=3, help="pinwheel arms")
    src.add_argument("--twist", type=float, default=0.3)
    src.add_argument("--inner-radius", type=float, default=0.8)
    src.add_argument("--outer-radius", type=float, default=1.2)
    return src


def build_parser():
    # parent parsers are rebuilt per subcommand: set_defaults mutates shared actions
    def common():
        return _common_flags()

    def src():
        return _source_flags()

    parser = argparse.ArgumentParser(prog="okeca", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy-curve", parents=[common(), src()], help="cumulative information potential")
    p.set_defaults(dataset="ring", sigma_rule="ml,silv,d1,d2", components="all")

    p = sub.add_parser("pdf-grid", parents=[common(), src()], help="density grids on 2-D data")
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--bounds", default=None, help="xmin,xmax,ymin,ymax")
    p.set_defaults(dataset="ring", sigma_rule="ml", components="1-5")

    p = sub.add_parser("classify", parents=[common(), src()], help="MAP classification accuracy")
    p.set_defaults(dataset="moons", components="1-10")

    p = sub.add_parser("noise-sweep", parents=[common()], help="two-moons accuracy under added noise")
    p.add_argument("--noise-levels", default="0.001,0.051,0.091")
    p.add_argument("--n-train", type=int, default=None, help="per class, default 25")
    p.add_argument("--n-test", type=int, default=None, help="per class, default 250")
    p.set_defaults(components="1-10")

    p = sub.add_parser("uci", parents=[common()], help="UCI benchmark with sigma_ML")
    p.add_argument("--data-dir", default="data/uci")
    p.add_argument("--datasets", default=None, help=f"comma list from {', '.join(UCI_DATASETS)}")
    p.set_defaults(components="1-10")

    p = sub.add_parser("bandwidth", parents=[common(), src()], help="print every sigma rule")
    p.set_defaults(dataset="ring")

    p = sub.add_parser("fit", parents=[common(), src()], help="fit and save a model as JSON")
    p.set_defaults(dataset="ring", method="OKECA", format="json")

    p = sub.add_parser("transform", parents=[common()], help="project CSV rows with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--label-column", type=int, default=None)
    p.set_defaults(components="2")

    p = sub.add_parser("rerun", help="replay an emitted .spec.json file")
    p.add_argument("spec")
    p.add_argument("--out", default=None, help="override the output path")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if args.command == "rerun":
            spec = json.loads(Path(args.spec).read_text())
            params = dict(spec["params"])
            out = args.out or str(args.spec)[: -len(".spec.json")]
            code, _ = execute(params, out)
        else:
            params = {k: v for k, v in vars(args).items() if k != "verbose"}
            code, _ = execute(params)
    except (ValueError, FileNotFoundError) as exc:
        print(f"okeca {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
