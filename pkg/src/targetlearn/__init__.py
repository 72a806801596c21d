"""targetlearn: profit-maximizing treatment targeting from experiments.

Learn who to treat from randomized-experiment data: build doubly robust
per-unit scores, search exactly over depth-bounded policy trees (plus
greedy-tree and weighted-logit alternatives), and evaluate any rule
out-of-sample against the all-treat, no-treat, and random benchmarks.
Includes heterogeneity diagnostics (sorted effects, best-linear-predictor
test), caliper matching for rule transfer across samples, and a synthetic
campaign generator with analytic ground truth.
"""

from .dataset import Dataset, IngestConfig, Schema, load_csv, save_csv, split_folds
from .evaluation import (EstimateWithSE, ValueReport, cross_validate, evaluate,
                         report_table, significance_stars, transfer_evaluate)
from .exceptions import NumericalError, TargetLearnError, ValidationError
from .heterogeneity import (BlpTestReport, SortedEffectsCurve, blp_test,
                            extreme_group_summary, sorted_effects)
from .learners import (ConstantPolicy, ExactPolicyTree, GreedyPolicyTree,
                       LearnerReport, WeightedLogitPolicy, brute_force_oracle,
                       rule_from_dict, rule_to_dict)
from .matching import (MatchResult, caliper_match, standardized_difference,
                       transfer_with_radius_sweep)
from .nuisance import (CrossFitResult, NuisanceSpec, OutcomeModel,
                       PropensityModel, StratumDesign, cross_fit,
                       fit_nuisances, fit_outcome_means, fit_propensity_logit,
                       fit_propensity_population)
from .scores import (ScoreSet, build_scores, compute_aipw, estimate_ate_aipw,
                     estimate_ate_ols, load_scores_csv, save_scores_csv)
from .simulate import (DgpSpec, DgpTruth, FeatureSpec, NoiseSpec, Surface, Term,
                       cold_analog_spec, constant_effect_spec, generate,
                       linear_cate_spec, named_spec, paper_analog_spec,
                       true_value, two_group_spec)
from .tree import PolicyTree, TreeNode

__version__ = "0.1.0"

__all__ = [
    "Dataset", "IngestConfig", "Schema", "load_csv", "save_csv", "split_folds",
    "EstimateWithSE", "ValueReport", "cross_validate", "evaluate",
    "report_table", "significance_stars", "transfer_evaluate",
    "NumericalError", "TargetLearnError", "ValidationError",
    "BlpTestReport", "SortedEffectsCurve", "blp_test", "extreme_group_summary",
    "sorted_effects",
    "ConstantPolicy", "ExactPolicyTree", "GreedyPolicyTree", "LearnerReport",
    "WeightedLogitPolicy", "brute_force_oracle", "rule_from_dict", "rule_to_dict",
    "MatchResult", "caliper_match", "standardized_difference",
    "transfer_with_radius_sweep",
    "CrossFitResult", "NuisanceSpec", "OutcomeModel", "PropensityModel",
    "StratumDesign", "cross_fit", "fit_nuisances", "fit_outcome_means",
    "fit_propensity_logit", "fit_propensity_population",
    "ScoreSet", "build_scores", "compute_aipw", "estimate_ate_aipw",
    "estimate_ate_ols", "load_scores_csv", "save_scores_csv",
    "DgpSpec", "DgpTruth", "FeatureSpec", "NoiseSpec", "Surface", "Term",
    "cold_analog_spec", "constant_effect_spec", "generate", "linear_cate_spec",
    "named_spec", "paper_analog_spec", "true_value", "two_group_spec",
    "PolicyTree", "TreeNode",
    "__version__",
]
