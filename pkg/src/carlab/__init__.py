"""carlab: a numerical laboratory for Caratheodory vector fields.

Evaluable field descriptors, optimal m/l-bounds, the seminorm topologies
they generate, translation flows and sampled hulls, averaged-step solvers
for measurable-in-time initial value problems, and the linearized
skew-product semiflow with finite-difference verification.
"""

from ._kernels import BACKEND as kernel_backend
from .field import (FieldDescriptor, evaluate, evaluate_many, jacobian_field,
                    translate, wave_shift_family)

__all__ = [
    "FieldDescriptor",
    "evaluate",
    "evaluate_many",
    "jacobian_field",
    "translate",
    "wave_shift_family",
    "kernel_backend",
]

__version__ = "0.1.0"
