"""Discrete Bayesian networks with latent roots: empirical networks, likelihood
ceilings, global-optimality certificates and deterministic canonical forms."""

from .canonical import (
    AuxEncoding,
    CanonicalNet,
    CanonicalSizeError,
    aux_prior,
    canonical_log_likelihood,
    canonicalize,
    decode_u,
    verify_reconstruction,
)
from .em import EmConfig, EmTrace, em_fit, em_step
from .empirical import (
    EmpiricalNet,
    empirical_log_joint,
    empirical_structure,
    fit_empirical,
    lambda_star,
    multinomial_log_likelihood,
)
from .graph import c_components, descendants, empirical_parents, topological_order
from .inference import (
    conditional_manifest,
    joint_prob,
    manifest_distribution,
    marginal_manifest,
    posterior_latents,
)
from .likelihood import (
    Certificate,
    Tolerances,
    certify_global_optimum,
    compatibility_report,
    log_likelihood,
)
from .model import (
    Cpt,
    DeterministicCpt,
    Network,
    Variable,
    WeightedDataset,
    make_network,
    total_weight,
    validate_network,
)

__version__ = "0.1.0"
