from ergowalk.markov.density import DensityField
from ergowalk.markov.operator import MarkovOperator, apply_P, apply_P_star
from ergowalk.markov.profile import (
    EnvironmentProfile,
    constant_profile,
    grid_profile,
    make_profile_from_transfer,
    profile_from_log_phi,
    profile_from_p,
)
from ergowalk.markov.stationary import (
    l2_contraction,
    self_adjointness_defect,
    stationarity_residual,
    stationary_iterate,
    symmetry_defect,
    transfer_density_identity,
)
