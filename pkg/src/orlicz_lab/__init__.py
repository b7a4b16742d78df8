"""Numerical toolkit for Orlicz spaces and the subspaces spanned by independent copies of a function."""

__version__ = "0.1.0"

from .exceptions import (InvariantViolation, NotInSpace, NotRegularizable, OrliczLabError,
                         PreconditionError, RangeError)
from .orlicz_core import (Power, PowerLog, Spliced, Tabulated, conjugate, delta2_constant,
                          evaluate, from_dict, inverse, regularize, to_dict)
from .measure_ops import (DistributionFn, SampledRealFunction, dilate, dilation_function,
                          disjoint_sum, distribution, rearrangement)
from .norms import fundamental_Lm, fundamental_seq, l2_tail, luxemburg_norm, sequence_norm
from .indices import index_at_infinity, index_at_zero
from .span_builder import EquivalenceReport, build_psi, luxem1_check, luxem2_check
from .criteria import strongly_embedded_verdict

__all__ = [name for name in dir() if not name.startswith("_")]
