"""Command-line interface: fit, simulate, periodogram, montecarlo, dpss.

All numeric output is UTF-8 text with 17 significant digits.  Input series
are CSV files with a header: a single column is read as a real series, and
columns named ``u`` and ``v`` as the complex series u + i*v.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .estimation import FitConfig, fit
from .harness import ExperimentSpec, ingest_velocity_csv, run_experiment, semiparametric_sideband_fit, write_rows_csv
from .likelihoods import LikelihoodSpec
from .models import MaternDampingModel, MaternModel, MaternParams, WhiteNoiseModel
from .simulate import plan_simulation, simulate_complex_proper, simulate_gaussian
from .spectral import TimeSeries, periodogram, tapered_periodogram
from .tapers import dpss_taper

__all__ = ["main"]


def _fmt(v):
    return f"{float(v):.17g}"


def _read_series(path, delta) -> TimeSeries:
    with open(path, newline="", encoding="utf-8") as fh:
        header = [c.strip().lower() for c in next(csv.reader(fh))]
    if "u" in header and "v" in header:
        return ingest_velocity_csv(path, delta)
    values = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for rownum, rec in enumerate(reader, start=1):
            if not rec or all(not c.strip() for c in rec):
                continue
            try:
                values.append(float(rec[0]))
            except ValueError:
                raise SystemExit(f"{path}: non-numeric data row {rownum}: {rec!r}")
    if len(values) < 2:
        raise SystemExit(f"{path}: need at least 2 samples")
    return TimeSeries(np.asarray(values), delta)


def _build_model(name, args):
    if name == "matern":
        return MaternModel(MaternParams(args.amplitude, args.damping, args.slope))
    raise SystemExit(f"unknown model {name!r}")


def _model_from_json(obj):
    name = obj.get("name", "matern")
    if name == "matern":
        return MaternModel(MaternParams(obj["amplitude"], obj["damping"], obj["slope"]))
    if name == "matern_damping":
        return MaternDampingModel(
            obj["damping"],
            amplitude_ratio=obj.get("amplitude_ratio", 1.7725),
            slope=obj.get("slope", 1.5),
        )
    if name == "white_noise":
        return WhiteNoiseModel(obj.get("variance", 1.0))
    raise SystemExit(f"unknown model name {name!r} in experiment spec")


def _estimator_from_json(obj, n):
    variant = {"exact": "exact_ml", "exact_ml": "exact_ml", "whittle": "whittle",
               "debiased": "debiased_whittle", "debiased_whittle": "debiased_whittle"}.get(obj.get("likelihood"))
    if variant is None:
        raise SystemExit(f"estimator {obj.get('id')!r}: unknown likelihood {obj.get('likelihood')!r}")
    difference = int(obj.get("difference", 0))
    taper = None
    taper_kind = obj.get("taper", "none")
    if taper_kind == "dpss":
        taper = dpss_taper(n - difference, float(obj.get("nw", 4.0)))
    elif taper_kind not in ("none", None):
        raise SystemExit(f"estimator {obj.get('id')!r}: unknown taper {taper_kind!r}")
    spec = LikelihoodSpec(variant=variant, taper=taper, difference_order=difference)
    return obj.get("id", variant), FitConfig(spec=spec)


def _cmd_fit(args):
    x = _read_series(args.input, args.delta)
    model = _build_model(args.model, args)
    difference = args.difference
    taper = dpss_taper(x.n - difference, args.nw) if args.taper == "dpss" else None
    variant = {"exact": "exact_ml", "whittle": "whittle", "debiased": "debiased_whittle"}[args.likelihood]
    spec = LikelihoodSpec(variant=variant, taper=taper, difference_order=difference)
    config = FitConfig(spec=spec, seed=args.seed)
    if args.side != "none":
        result = semiparametric_sideband_fit(x, model, config, args.side)
    else:
        result = fit(x, model, config)
    payload = result.to_json_dict(model_name=model.name)
    text = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_simulate(args):
    model = _build_model(args.model, args)
    acv = model.autocovariance(model.theta, args.delta, args.n - 1)
    plan = plan_simulation(acv, args.n, seed=args.seed)
    draws = simulate_complex_proper(plan, args.replicates) if args.complex else simulate_gaussian(plan, args.replicates)
    if args.separate_files:
        stem = args.out[:-4] if args.out.endswith(".csv") else args.out
        for r, x in enumerate(draws):
            _write_series_csv(f"{stem}_{r:04d}.csv", [x], args.complex)
    else:
        _write_series_csv(args.out, draws, args.complex)


def _write_series_csv(path, draws, is_complex):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if is_complex:
            writer.writerow([h for r in range(len(draws)) for h in (f"u{r}", f"v{r}")] if len(draws) > 1 else ["u", "v"])
            for t in range(draws[0].n):
                row = []
                for x in draws:
                    row.extend([_fmt(x.values[t].real), _fmt(x.values[t].imag)])
                writer.writerow(row)
        else:
            writer.writerow([f"x{r}" for r in range(len(draws))] if len(draws) > 1 else ["x"])
            for t in range(draws[0].n):
                writer.writerow([_fmt(x.values[t]) for x in draws])


def _cmd_periodogram(args):
    x = _read_series(args.input, args.delta)
    if args.taper == "dpss":
        est = tapered_periodogram(x, dpss_taper(x.n, args.nw))
    else:
        est = periodogram(x)
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    writer = csv.writer(out)
    writer.writerow(["omega", "value"])
    for w, v in zip(est.grid.frequencies, est.values):
        writer.writerow([_fmt(w), _fmt(v)])
    if args.out:
        out.close()


def _cmd_montecarlo(args):
    with open(args.spec, encoding="utf-8") as fh:
        obj = json.load(fh)
    for key in ("model", "n", "replicates", "estimators"):
        if key not in obj:
            raise SystemExit(f"experiment spec is missing required key {key!r}")
    n = int(obj["n"])
    spec = ExperimentSpec(
        model=_model_from_json(obj["model"]),
        n=n,
        replicates=int(obj["replicates"]),
        estimators=[_estimator_from_json(e, n) for e in obj["estimators"]],
        delta=float(obj.get("delta", 1.0)),
        alpha_sweep=obj.get("alpha_sweep"),
        seed=int(obj.get("seed", 0)),
        output_path=args.out,
    )
    rows = run_experiment(spec, n_jobs=args.jobs)
    if not args.out:
        write_rows_csv(rows, "/dev/stdout")


def _cmd_dpss(args):
    taper = dpss_taper(args.n, args.nw)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    for w in taper.weights:
        out.write(_fmt(w) + "\n")
    if args.out:
        out.close()


def main(argv=None):
    parser = argparse.ArgumentParser(prog="whittlefit", description="Parametric spectral estimation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to a series by a chosen likelihood")
    p.add_argument("--input", required=True, help="CSV with a header: one column, or columns u,v for complex")
    p.add_argument("--delta", type=float, required=True, help="sampling interval")
    p.add_argument("--model", default="matern", choices=["matern"])
    p.add_argument("--likelihood", default="debiased", choices=["exact", "whittle", "debiased"])
    p.add_argument("--taper", default="none", choices=["none", "dpss"])
    p.add_argument("--nw", type=float, default=4.0, help="DPSS time-bandwidth product")
    p.add_argument("--difference", type=int, default=0, choices=[0, 1, 2])
    p.add_argument("--side", default="none", choices=["none", "positive", "negative"],
                   help="restrict to one rotational side of a complex series' spectrum")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--damping", type=float, default=0.1)
    p.add_argument("--slope", type=float, default=1.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write fit JSON here instead of stdout")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="draw exact Gaussian replicates of a model")
    p.add_argument("--model", default="matern", choices=["matern"])
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--damping", type=float, default=0.2)
    p.add_argument("--slope", type=float, default=1.5)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--complex", action="store_true", help="draw proper complex series")
    p.add_argument("--separate-files", action="store_true", help="one file per replicate")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("periodogram", help="periodogram of a series as omega,value CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--taper", default="none", choices=["none", "dpss"])
    p.add_argument("--nw", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_periodogram)

    p = sub.add_parser("montecarlo", help="run a JSON-specified simulation study")
    p.add_argument("--spec", required=True, help="experiment spec JSON (see README)")
    p.add_argument("--out", help="aggregate table CSV")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (-1 = all cores)")
    p.set_defaults(func=_cmd_montecarlo)

    p = sub.add_parser("dpss", help="zeroth-order DPSS taper weights, one per line")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nw", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_dpss)

    args = parser.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
