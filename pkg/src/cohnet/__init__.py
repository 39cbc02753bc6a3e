"""Coherent theories over finite sets, with dense neural networks on tiny
floating-point formats as the worked application.

The table kernels run in a compiled extension when it is built and fall
back to pure Python otherwise; ``cohnet.kernels.BACKEND`` says which.
"""
from .constructions import (Interpretation, TheoryPushout, hard_code, hard_code_structure,
                            instance_to_structure, precompose, pushout, schema_to_theory,
                            structure_to_instance)
from .finset import FinFunction, FinSet, ProductSet, Subobject, product
from .kernels import BACKEND
from .minifloat import FloatFormat, build_tables
from .nn import (Architecture, ParamAssignment, SpanDataset, apply_constraints,
                 architecture_theory, build_model, float_theory, infer, layer_theory,
                 oracle_dataset, rspan_theory)
from .schema import CategoryPresentation, Instance, builtin, check_functorial, check_natural
from .semantics import SetStructure, check_model, eval_formula, eval_term, find_structure_iso
from .syntax import Signature, Theory

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Architecture", "CategoryPresentation", "FinFunction", "FinSet",
    "FloatFormat", "Instance", "Interpretation", "ParamAssignment", "ProductSet",
    "SetStructure", "Signature", "SpanDataset", "Subobject", "Theory", "TheoryPushout",
    "apply_constraints", "architecture_theory", "build_model", "build_tables", "builtin",
    "check_functorial", "check_model", "check_natural", "eval_formula", "eval_term",
    "find_structure_iso", "float_theory", "hard_code", "hard_code_structure", "infer",
    "instance_to_structure", "layer_theory", "oracle_dataset", "precompose", "product",
    "pushout", "rspan_theory", "schema_to_theory", "structure_to_instance",
]
