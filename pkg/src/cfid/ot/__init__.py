"""Exact discrete optimal transport and the four conditional Wasserstein programs."""
from ._backend import BACKEND
from .oracle import (
    CouplingPlan,
    DiscreteJoint,
    chain_slacks,
    cwd_discrete,
    cwd_terms,
    mwd_coupling,
    mwd_discrete,
    quantile_w2_1d,
    random_instance,
    rwd3_couplings,
    rwd3_discrete,
    rwd_coupling,
    rwd_discrete,
    shuffled_pairing_instance,
    solve_ot,
)

__all__ = [
    "BACKEND",
    "CouplingPlan",
    "DiscreteJoint",
    "chain_slacks",
    "cwd_discrete",
    "cwd_terms",
    "mwd_coupling",
    "mwd_discrete",
    "quantile_w2_1d",
    "random_instance",
    "rwd3_couplings",
    "rwd3_discrete",
    "rwd_coupling",
    "rwd_discrete",
    "shuffled_pairing_instance",
    "solve_ot",
]
