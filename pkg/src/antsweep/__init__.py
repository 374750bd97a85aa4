"""Parameter sweeps for ant-system TSP solvers.

The package samples ACO parameter tuples with a Saltelli/Sobol design, runs
each through a map/combine/reduce ant-system engine on a TSPLIB instance,
fits distributions to the best-tour-length samples, and bootstraps the
probability of reaching a target optimum.
"""

from .aco import AcoParams, PheromoneTable, RunRecord
from .bootstrap import BootstrapConfig, BootstrapResult, bootstrap_probability
from .fitstats import FittedDistribution, fit_mle, rank_families, success_probability
from .pipeline import EEEConfig, run_all
from .sampling import ParameterSpace, ParameterTuple, default_space, saltelli_sample, sobol_points
from .tsp import DistanceMatrix, Instance, parse_tsplib, parse_tsplib_file, tour_length

__version__ = "0.1.0"

__all__ = [
    "AcoParams",
    "BootstrapConfig",
    "BootstrapResult",
    "DistanceMatrix",
    "EEEConfig",
    "FittedDistribution",
    "Instance",
    "ParameterSpace",
    "ParameterTuple",
    "PheromoneTable",
    "RunRecord",
    "bootstrap_probability",
    "default_space",
    "fit_mle",
    "parse_tsplib",
    "parse_tsplib_file",
    "rank_families",
    "run_all",
    "saltelli_sample",
    "sobol_points",
    "success_probability",
    "tour_length",
    "__version__",
]
