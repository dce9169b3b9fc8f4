"""Bayesian-network structure scoring and learning from complete data.

Discrete networks are scored with Dirichlet priors derived from a single
joint table (BDe); Gaussian networks with a normal-Wishart prior (BGe).
"""

from .dag import (
    Arc,
    Dag,
    covered_reversal_sequence,
    independence_equivalent,
    is_covered,
    skeleton,
    topological_order,
    v_structures,
)
from .discrete import DirichletJointPrior, DiscreteDataset, log_score_bde, log_score_bde_ratio
from .elicitation import (
    DiscretePriorNetwork,
    GaussianPriorNetwork,
    discrete_prior_from_network,
    gaussian_prior_from_network,
)
from .gaussian import GaussianDataset, NormalWishartPrior, log_score_bge, posterior_update
from .kernels import BACKEND
from .search import SearchConfig, StructurePrior, enumerate_dags, group_by_equivalence, hill_climb, log_posterior

__version__ = "0.1.0"
