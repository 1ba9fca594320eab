"""Virtual permutations under central measures: samplers, the circle
representation, the rotation flow and the spectrum of its generator."""

from .central_sampler import (
    Fixed,
    FixedAtom,
    LambdaSequence,
    OnCircle,
    PointConfig,
    PoissonDirichlet,
    induced_permutation,
    make_lambda,
    sample_ewens_crp,
    sample_gem,
    sample_positions,
)
from .errors import (
    DegenerateInputError,
    NotEquivalentError,
    PreconditionError,
    ValidationError,
    VirtpermError,
)
from .flow_spectrum import (
    ArcClass,
    asymptotic_length,
    delta_arc,
    distance,
    eval_eigenfunction,
    flow_apply,
    spectrum_U,
)
from .perm_core import (
    CycleDecomposition,
    Permutation,
    conjugate,
    cycle_decomposition,
    ewens_log_pmf,
    power,
    project,
    rescaled_eigenangles,
    same_cycle,
    shift_count,
)
from .point_process import INFINITE, PointProcess
from .rng import Stream

__version__ = "0.1.0"
