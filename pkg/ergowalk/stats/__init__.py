from ergowalk.stats.birkhoff import BirkhoffEnsemble, BirkhoffResult, birkhoff_average, birkhoff_ensemble
from ergowalk.stats.clt import CltReport, clt_experiment, gordin_variance, martingale_part, normalized_sums
from ergowalk.stats.lyapunov import BalanceReport, lyapunov_balance
from ergowalk.stats.sampling import nu_expectation, nu_sampler, sample_nu
from ergowalk.stats.shift import ShiftReport, shift_consistency
