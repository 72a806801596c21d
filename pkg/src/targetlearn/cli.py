"""Command-line front end wiring the pipeline.

Subcommands: simulate, fit-nuisance, score, ate, learn, evaluate,
crossval, transfer, sorted-effects, blp-test, match, report.  Every
output file embeds the resolved-config hash and the seed; identical
(config, seed, inputs) produce byte-identical numeric payloads
regardless of --threads.

Exit codes: 0 success, 2 input/validation error, 3 numerical failure.
With --json-errors diagnostics go to stderr as machine-readable JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import simulate as sim
from .dataset import IngestConfig, load_csv, save_csv
from .evaluation import (ValueReport, cross_validate, evaluate, report_table,
                         transfer_evaluate)
from .exceptions import NumericalError, ValidationError
from .heterogeneity import blp_test, sorted_effects
from .learners import (ConstantPolicy, ExactPolicyTree, GreedyPolicyTree,
                       WeightedLogitPolicy, rule_from_dict, rule_to_dict)
from .matching import (caliper_match, standardized_difference,
                       transfer_with_radius_sweep)
from .nuisance import (NuisanceSpec, fit_outcome_means, fit_propensity_logit,
                       fit_propensity_population)
from .scores import (build_scores, estimate_ate_aipw, estimate_ate_ols,
                     load_scores_csv, save_scores_csv)

_EXCLUDED_FROM_HASH = {"out", "truth_out", "schema_out", "spec_out", "csv", "plot",
                       "json_errors", "threads", "func", "config"}


def _config_hash(args: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(args).items())
               if k not in _EXCLUDED_FROM_HASH and not callable(v)}
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _stamp(args) -> str:
    return f"config_hash={_config_hash(args)} seed={getattr(args, 'seed', 0)}"


def _write_json(path, args, payload: dict) -> None:
    doc = {"config_hash": _config_hash(args), "seed": getattr(args, "seed", 0)}
    doc.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _ingest(args) -> IngestConfig:
    return IngestConfig(treatment_coding=getattr(args, "coding", "pm1"),
                        cost=getattr(args, "cost", 0.0) or 0.0)


def _nuisance_spec(args) -> NuisanceSpec:
    table = None
    if getattr(args, "population", None):
        with open(args.population, "r", encoding="utf-8") as fh:
            entries = json.load(fh)
        table = {tuple(int(c) for c in e["cell"]): float(e["p"]) for e in entries}
    return NuisanceSpec(
        design=getattr(args, "design", "main"),
        propensity="population" if table is not None else "logit",
        population_table=table,
        crossfit_k=getattr(args, "crossfit", None),
        crossfit_seed=getattr(args, "seed", 0),
    )


def _build_learner(args):
    name = args.learner
    if name == "exact-tree":
        return ExactPolicyTree(depth=args.depth)
    if name == "greedy-tree":
        depth = "cv" if args.depth == 0 else args.depth
        return GreedyPolicyTree(depth=depth, min_leaf_size=args.min_leaf,
                                seed=getattr(args, "seed", 0))
    if name == "weighted-logit":
        return WeightedLogitPolicy(spec=args.logit_spec)
    if name == "constant":
        return ConstantPolicy()
    raise ValidationError(f"unknown learner {name!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_simulate(args) -> int:
    if args.spec in sim.NAMED_SPECS:
        spec = sim.named_spec(args.spec)
    else:
        with open(args.spec, "r", encoding="utf-8") as fh:
            spec = sim.DgpSpec.from_json(fh.read())
    dataset, truth = sim.generate(spec, args.n, args.seed)
    save_csv(dataset, args.out, header_comment=_stamp(args))
    truth_path = args.truth_out or _sibling(args.out, ".truth.csv")
    sim.save_truth_csv(dataset, truth, truth_path, header_comment=_stamp(args))
    if args.spec_out:
        with open(args.spec_out, "w", encoding="utf-8") as fh:
            fh.write(spec.to_json())
    if args.schema_out:
        with open(args.schema_out, "w", encoding="utf-8") as fh:
            fh.write(dataset.schema.to_json())
    print(f"simulate: wrote {dataset.n} units to {args.out} "
          f"(truth: {truth_path}; optimal share {truth.optimal_share:.3f})")
    return 0


def _sibling(path: str, suffix: str) -> str:
    return (path[:-4] if path.endswith(".csv") else path) + suffix


def _cmd_fit_nuisance(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    if args.population:
        with open(args.population, "r", encoding="utf-8") as fh:
            entries = json.load(fh)
        table = {tuple(int(c) for c in e["cell"]): float(e["p"]) for e in entries}
        prop = fit_propensity_population(dataset, table)
    else:
        prop = fit_propensity_logit(dataset, args.design)
    outm = fit_outcome_means(dataset, args.design, args.outcome)
    _write_json(args.out, args, {
        "propensity": json.loads(prop.to_json()),
        "outcome_means": json.loads(outm.to_json()),
    })
    print(f"fit-nuisance: wrote {args.out} (design={args.design}, outcome={args.outcome})")
    return 0


def _cmd_score(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    scores = build_scores(dataset, _nuisance_spec(args), outcome=args.outcome,
                          cost=args.cost)
    save_scores_csv(scores, dataset.ids, args.out, header_comment=_stamp(args))
    est, se = estimate_ate_aipw(scores)
    print(f"score: wrote {scores.n} rows to {args.out}; "
          f"mean score {est:.4f} (se {se:.4f}), net of cost {est - scores.cost:.4f}")
    if args.schema_out:
        with open(args.schema_out, "w", encoding="utf-8") as fh:
            fh.write(dataset.schema.to_json())
    return 0


def _feature_selection(args, dataset):
    if not getattr(args, "features", None):
        return np.arange(dataset.x.shape[1]), dataset.schema.feature_names
    names = tuple(f.strip() for f in args.features.split(","))
    return dataset.feature_index(names), names


def _scores_for(args, dataset):
    if getattr(args, "scores", None):
        return load_scores_csv(args.scores, ids=dataset.ids, outcome=args.outcome)
    return build_scores(dataset, _nuisance_spec(args), outcome=args.outcome,
                        cost=args.cost)


def _cmd_learn(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    scores = _scores_for(args, dataset)
    learner = _build_learner(args)
    cols, names = _feature_selection(args, dataset)
    learner.fit(dataset.x[:, cols], scores.net_reward, feature_names=names)
    payload = {"rule": rule_to_dict(learner), "learner": args.learner,
               "report": {"objective": learner.report_.objective,
                          "candidates_examined": learner.report_.candidates_examined,
                          "elapsed_seconds": learner.report_.elapsed_seconds,
                          "notes": learner.report_.notes}}
    _write_json(args.out, args, payload)
    share = float(np.mean(learner.predict(dataset.x[:, cols]) == 1))
    print(f"learn: {args.learner} objective {learner.report_.objective:.4f}, "
          f"in-sample share treated {share:.3f}; wrote {args.out}")
    return 0


def _load_rule(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return rule_from_dict(doc["rule"] if "rule" in doc else doc)


def _cmd_evaluate(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    rule = _load_rule(args.rule)
    if args.scores:
        scores = load_scores_csv(args.scores, ids=dataset.ids, outcome=args.outcome)
        names = getattr(rule, "feature_names", None) or dataset.schema.feature_names
        actions = rule.predict(dataset.x[:, dataset.feature_index(names)])
        report = evaluate(scores, actions, cost=args.cost, label="evaluate",
                          outcome=args.outcome)
    else:
        report = transfer_evaluate(rule, dataset, outcome=args.outcome,
                                   cost=args.cost, nuisance=_nuisance_spec(args),
                                   label="evaluate")
    _write_json(args.out, args, {"report": report.to_dict()})
    print(report_table([report], title=f"evaluate: {args.data}"))
    return 0


def _cmd_crossval(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    learner = _build_learner(args)
    features = ([f.strip() for f in args.features.split(",")]
                if args.features else None)
    report = cross_validate(
        dataset, learner, outcome=args.outcome, k=args.k, seed=args.seed,
        cost=args.cost, nuisance=_nuisance_spec(args), threads=args.threads,
        label=f"{args.learner} (k={args.k})", features=features,
    )
    _write_json(args.out, args, {"report": report.to_dict()})
    print(report_table([report], title=f"crossval: {args.data}"))
    return 0


def _cmd_transfer(args) -> int:
    dataset_b = load_csv(args.data, _ingest(args))
    rule = _load_rule(args.rule)
    if args.radii:
        if not args.train:
            raise ValidationError("--radii requires --train (the reference sample)")
        dataset_a = load_csv(args.train, _ingest(args))
        radii = [math.inf if r.lower() in ("inf", "infinity") else float(r)
                 for r in args.radii.split(",")]
        entries = transfer_with_radius_sweep(
            rule, dataset_a, dataset_b, radii, outcome=args.outcome,
            cost=args.cost, nuisance=_nuisance_spec(args),
        )
        payload = {"sweep": [
            {"radius": e.radius, "n_matched": e.n_matched, "empty": e.empty,
             "report": e.report.to_dict() if e.report else None}
            for e in entries
        ]}
        _write_json(args.out, args, payload)
        if args.csv:
            _write_sweep_csv(args.csv, entries, _stamp(args))
        if args.plot:
            _plot_sweep(args.plot, entries, _stamp(args))
        reports = [e.report for e in entries if e.report]
        print(report_table(reports, title="transfer (caliper sweep)"))
    else:
        report = transfer_evaluate(rule, dataset_b, outcome=args.outcome,
                                   cost=args.cost, nuisance=_nuisance_spec(args),
                                   label="transfer (full sample)")
        _write_json(args.out, args, {"report": report.to_dict()})
        print(report_table([report], title=f"transfer: {args.data}"))
    return 0


def _write_sweep_csv(path, entries, stamp) -> None:
    import csv as _csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {stamp}\n")
        writer = _csv.writer(fh)
        writer.writerow(["radius", "n_matched",
                         "gain_vs_all_treat", "se_all", "gain_vs_no_treat", "se_none"])
        for e in entries:
            if e.report is None:
                writer.writerow([e.radius, e.n_matched, "", "", "", ""])
                continue
            writer.writerow([
                e.radius, e.n_matched,
                repr(e.report.gain_vs_all_treat.estimate), repr(e.report.gain_vs_all_treat.se),
                repr(e.report.gain_vs_no_treat.estimate), repr(e.report.gain_vs_no_treat.se),
            ])


def _plot_sweep(path, entries, stamp) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    finite = [e for e in entries if e.report is not None]
    xs = list(range(len(finite)))
    labels = ["inf" if math.isinf(e.radius) else f"{e.radius:g}" for e in finite]
    fig, ax = plt.subplots(figsize=(7, 4))
    for key, marker, label in (("gain_vs_no_treat", "o", "vs no-treat"),
                               ("gain_vs_all_treat", "s", "vs all-treat")):
        est = [getattr(e.report, key).estimate for e in finite]
        se = [getattr(e.report, key).se for e in finite]
        ax.errorbar(xs, est, yerr=[1.645 * s for s in se], marker=marker,
                    capsize=3, label=label)
    ax.axhline(0.0, color="grey", lw=0.8)
    ax.set_xticks(xs, labels)
    ax.set_xlabel("caliper radius")
    ax.set_ylabel("gain")
    ax.set_title(f"rule transfer by caliper radius ({stamp})", fontsize=8)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _cmd_sorted_effects(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    lo, hi = (int(v) for v in args.grid.split(":"))
    curve = sorted_effects(dataset, outcome=args.outcome,
                           grid=range(lo, hi + 1), reps=args.reps, seed=args.seed)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {_stamp(args)}\n")
        import csv as _csv
        writer = _csv.writer(fh)
        for row in curve.to_csv_rows():
            writer.writerow(row)
    if args.plot:
        _plot_curve(args.plot, curve, args.cost or 0.0, _stamp(args))
    print(f"sorted-effects: wrote {args.out}; "
          f"effects at P5 {curve.estimate[0]:.3f}, P95 {curve.estimate[-1]:.3f}, "
          f"sup-t critical value {curve.critical_value:.3f}")
    return 0


def _plot_curve(path, curve, cost, stamp) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(curve.grid, curve.estimate, color="black", label="sorted effects")
    ax.plot(curve.grid, curve.lower, color="black", ls="--", lw=0.8,
            label="uniform 95% band")
    ax.plot(curve.grid, curve.upper, color="black", ls="--", lw=0.8)
    ax.axhline(cost, color="red", lw=1.0, label=f"cost ({cost:g})")
    ax.set_xlabel("percentile of the effect size")
    ax.set_ylabel("effect")
    ax.set_title(f"sorted effects ({stamp})", fontsize=8)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _cmd_blp_test(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    report = blp_test(dataset, outcome=args.outcome, k=args.k, seed=args.seed)
    _write_json(args.out, args, {"report": report.to_dict()})
    print(f"blp-test: average effect {report.average_effect:.4f} "
          f"(se {report.average_effect_se:.4f}, one-sided p {report.average_effect_p:.4f})")
    if report.loading_defined:
        print(f"blp-test: heterogeneity loading {report.loading:.4f} "
              f"(se {report.loading_se:.4f}, one-sided p {report.loading_p:.4f})")
    else:
        print("blp-test: heterogeneity loading undefined (degenerate proxy)")
    return 0


def _cmd_match(args) -> int:
    sample_a = load_csv(args.a, _ingest(args))
    sample_b = load_csv(args.b, _ingest(args))
    radius = math.inf if args.radius.lower() in ("inf", "infinity") else float(args.radius)
    result = caliper_match(sample_a, sample_b, radius=radius, seed=args.seed)
    result.save_csv(sample_a, sample_b, args.out, header_comment=_stamp(args))
    matched_b = result.matched_b_indices
    print(f"match: {len(result.pairs)} pairs within radius {args.radius} "
          f"({result.unmatched_a} A units unmatched); wrote {args.out}")
    if matched_b.size:
        matched = sample_b.subset(matched_b)
        print(f"{'feature':>12}  {'full std.diff':>13}  {'matched std.diff':>16}")
        for f in sample_a.schema.feature_names:
            full = standardized_difference(sample_a, sample_b, f)
            after = standardized_difference(sample_a, matched, f)
            print(f"{f:>12}  {full:13.2f}  {after:16.2f}")
    return 0


def _cmd_report(args) -> int:
    reports = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        obj = doc.get("report", doc)
        reports.append(ValueReport.from_dict(obj))
    print(report_table(reports, title=args.title))
    return 0


def _cmd_ate(args) -> int:
    dataset = load_csv(args.data, _ingest(args))
    scores = build_scores(dataset, _nuisance_spec(args), outcome=args.outcome,
                          cost=args.cost)
    aipw, aipw_se = estimate_ate_aipw(scores)
    rows = [("OLS (no controls)", *estimate_ate_ols(dataset, None, args.outcome)),
            ("OLS (strata controls)", *estimate_ate_ols(dataset, args.design, args.outcome)),
            ("AIPW", aipw, aipw_se)]
    payload = {"estimates": [
        {"estimator": name, "ate": est, "se": se, "ate_net_of_cost": est - scores.cost}
        for name, est, se in rows
    ]}
    _write_json(args.out, args, payload)
    print(f"{'estimator':>22}  {'ATE':>8}  {'(se)':>8}  {'net of cost':>11}")
    for name, est, se in rows:
        print(f"{name:>22}  {est:8.3f}  ({se:.3f})  {est - scores.cost:11.3f}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_common_data_args(p, with_cost=True):
    p.add_argument("--data", required=True, help="dataset CSV")
    p.add_argument("--outcome", default="y", help="outcome column (default y)")
    p.add_argument("--coding", default="pm1", choices=("pm1", "01"),
                   help="treatment coding in the file")
    if with_cost:
        p.add_argument("--cost", type=float, default=1.16,
                       help="treatment cost per treated unit (default 1.16)")


def _add_nuisance_args(p):
    p.add_argument("--design", default="main", choices=("main", "saturated"),
                   help="stratum design for nuisance models")
    p.add_argument("--population", default=None,
                   help="JSON file with per-cell assignment probabilities")
    p.add_argument("--crossfit", type=int, default=None,
                   help="cross-fit nuisances with this many folds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="targetlearn",
        description="Learn and evaluate profit-maximizing treatment-targeting rules",
    )
    parser.add_argument("--config", default=None,
                        help="JSON file of defaults; explicit flags override")
    parser.add_argument("--json-errors", action="store_true", dest="json_errors",
                        help="emit machine-readable errors on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a synthetic campaign with ground truth")
    p.add_argument("--spec", required=True,
                   help=f"named spec ({', '.join(sorted(sim.NAMED_SPECS))}) or JSON file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out", dest="truth_out", default=None)
    p.add_argument("--spec-out", dest="spec_out", default=None)
    p.add_argument("--schema-out", dest="schema_out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit-nuisance", help="fit and export nuisance models")
    _add_common_data_args(p, with_cost=False)
    p.add_argument("--design", default="main", choices=("main", "saturated"))
    p.add_argument("--population", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_nuisance)

    p = sub.add_parser("score", help="compute and export per-unit scores")
    _add_common_data_args(p)
    _add_nuisance_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--schema-out", dest="schema_out", default=None)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("ate", help="average-effect comparison (OLS vs doubly robust)")
    _add_common_data_args(p)
    _add_nuisance_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ate)

    p = sub.add_parser("learn", help="fit a targeting rule on the full sample")
    _add_common_data_args(p)
    _add_nuisance_args(p)
    p.add_argument("--learner", default="exact-tree",
                   choices=("exact-tree", "greedy-tree", "weighted-logit", "constant"))
    p.add_argument("--depth", type=int, default=2,
                   help="tree depth (greedy-tree: 0 selects depth by cross-validation)")
    p.add_argument("--min-leaf", dest="min_leaf", type=int, default=10)
    p.add_argument("--logit-spec", dest="logit_spec", default="baseline",
                   choices=("baseline", "flexible"))
    p.add_argument("--features", default=None,
                   help="comma-separated feature subset for the rule")
    p.add_argument("--scores", default=None,
                   help="precomputed score CSV (from `score`) instead of refitting")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("evaluate", help="evaluate a saved rule in-sample")
    _add_common_data_args(p)
    _add_nuisance_args(p)
    p.add_argument("--rule", required=True, help="rule JSON from `learn`")
    p.add_argument("--scores", default=None,
                   help="precomputed score CSV (from `score`) instead of refitting")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("crossval", help="K-fold out-of-sample evaluation")
    _add_common_data_args(p)
    _add_nuisance_args(p)
    p.add_argument("--learner", default="exact-tree",
                   choices=("exact-tree", "greedy-tree", "weighted-logit", "constant"))
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--min-leaf", dest="min_leaf", type=int, default=10)
    p.add_argument("--logit-spec", dest="logit_spec", default="baseline",
                   choices=("baseline", "flexible"))
    p.add_argument("--features", default=None,
                   help="comma-separated feature subset for the rule")
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser("transfer", help="evaluate a frozen rule on a new sample")
    _add_common_data_args(p)
    _add_nuisance_args(p)
    p.add_argument("--rule", required=True)
    p.add_argument("--train", default=None,
                   help="reference sample CSV (required with --radii)")
    p.add_argument("--radii", default=None,
                   help="comma-separated caliper radii, e.g. 0.05,0.1,inf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", default=None, help="sweep CSV for plotting")
    p.add_argument("--plot", default=None, help="sweep figure (svg/pdf)")
    p.set_defaults(func=_cmd_transfer)

    p = sub.add_parser("sorted-effects", help="sorted effect percentiles with a uniform band")
    _add_common_data_args(p)
    p.add_argument("--grid", default="5:95")
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=_cmd_sorted_effects)

    p = sub.add_parser("blp-test", help="best-linear-predictor heterogeneity test")
    _add_common_data_args(p, with_cost=False)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_blp_test)

    p = sub.add_parser("match", help="caliper membership matching with balance diagnostics")
    p.add_argument("--a", required=True, help="reference sample CSV")
    p.add_argument("--b", required=True, help="sample to match CSV")
    p.add_argument("--coding", default="pm1", choices=("pm1", "01"))
    p.add_argument("--radius", default="0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("report", help="render saved reports as one comparison table")
    p.add_argument("--title", default="")
    p.add_argument("inputs", nargs="+", help="report JSON files")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # config-file values fill in anything not given explicitly on the line
        with open(args.config, "r", encoding="utf-8") as fh:
            defaults = json.load(fh)
        for key, value in defaults.items():
            flag = "--" + key.replace("_", "-")
            if flag not in argv and hasattr(args, key):
                setattr(args, key, value)
    try:
        return args.func(args)
    except ValidationError as err:
        _emit_error(args, "validation", err)
        return 2
    except NumericalError as err:
        _emit_error(args, "numerical", err)
        return 3
    except FileNotFoundError as err:
        _emit_error(args, "validation", err)
        return 2


def _emit_error(args, kind: str, err: Exception) -> None:
    if getattr(args, "json_errors", False):
        print(json.dumps({"error": {"type": kind, "message": str(err)}}),
              file=sys.stderr)
    else:
        print(f"targetlearn: {kind} error: {err}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
