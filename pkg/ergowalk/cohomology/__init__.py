from ergowalk.cohomology.fourier import FourierTransfer, fourier_transfer
from ergowalk.cohomology.functionals import (
    loop_functional,
    loop_sweep,
    random_quadrilaterals,
    segment_functional,
)
from ergowalk.cohomology.livshitz import livshitz_obstruction
from ergowalk.cohomology.observables import (
    CoboundaryObservable,
    ConstantObservable,
    FunctionObservable,
    GridObservable,
    Observable,
    TrigObservable,
    estimate_holder,
)
from ergowalk.cohomology.report import ObstructionReport
from ergowalk.cohomology.transfer import coboundary_residual, transfer_from_paths
