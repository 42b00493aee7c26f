"""Qualitative-interaction testing for two sub-populations.

Statistics, supremum p-values, effect-ratio summaries, local asymptotic
power, and a seeded Monte Carlo harness for deciding whether an association
differs between two groups in sign (crossover) or in presence, rather than
merely in magnitude.
"""

from qualint.inference import (
    EstimatePair,
    KappaMaxResult,
    LocalAlternative,
    SubgroupEstimate,
    TestResult,
    gail_simon_test,
    kappa_max,
    omnibus_local_power,
    omnibus_null_tail,
    omnibus_region_contains_alternative,
    omnibus_statistic,
    omnibus_test,
    pn_region_contains_alternative,
    rd_local_power,
    rd_null_nu,
    rd_null_quantile,
    rd_null_tail,
    rd_power_approx,
    rd_statistic,
    rd_test,
)
from qualint.estimators import EstimationError, Sample2D, ols_slope, pearson
from qualint.simulation import (
    EmpiricalTail,
    SimulationConfig,
    StudyResult,
    generate_dataset,
    mc_null_oracle,
    run_kappa_max_study,
    run_rejection_study,
)

__all__ = [
    "EmpiricalTail",
    "EstimatePair",
    "EstimationError",
    "KappaMaxResult",
    "LocalAlternative",
    "Sample2D",
    "SimulationConfig",
    "StudyResult",
    "SubgroupEstimate",
    "TestResult",
    "gail_simon_test",
    "generate_dataset",
    "kappa_max",
    "mc_null_oracle",
    "ols_slope",
    "omnibus_local_power",
    "omnibus_null_tail",
    "omnibus_region_contains_alternative",
    "omnibus_statistic",
    "omnibus_test",
    "pearson",
    "pn_region_contains_alternative",
    "rd_local_power",
    "rd_null_nu",
    "rd_null_quantile",
    "rd_null_tail",
    "rd_power_approx",
    "rd_statistic",
    "rd_test",
    "run_kappa_max_study",
    "run_rejection_study",
]

__version__ = "0.1.0"
