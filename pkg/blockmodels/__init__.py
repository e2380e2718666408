"""
fastrg Blockmodels Module

Constructors producing FactorModels for the low-rank model families:
- sbm.py: stochastic blockmodel (and Erdos-Renyi as one block)
- dcsbm.py: degree-corrected SBM
- mixed.py: mixed-membership SBM
- overlapping.py: overlapping SBM
- chunglu.py: Chung-Lu
"""

from blockmodels.chunglu import chung_lu_factors
from blockmodels.dcsbm import dcsbm_factors
from blockmodels.mixed import mixed_membership_factors, sample_mixed_memberships
from blockmodels.overlapping import overlapping_factors
from blockmodels.sbm import (
    erdos_renyi_factors,
    memberships_from_sizes,
    sample_memberships,
    sbm_factors,
)

__all__ = [
    "chung_lu_factors",
    "dcsbm_factors",
    "erdos_renyi_factors",
    "memberships_from_sizes",
    "mixed_membership_factors",
    "overlapping_factors",
    "sample_memberships",
    "sample_mixed_memberships",
    "sbm_factors",
]
