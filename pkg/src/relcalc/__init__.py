"""Numerical relative pseudodifferential calculus on flat torus models."""
from .errors import (CompositionError, ConfigError, ConstructionError, DimensionError, FitError,
                     OrderError, PreconditionError, RelcalcError, ResolutionError, ShapeError,
                     SymbolEvaluationError)
from .geometry import GridFunction, TorusEmbedding, cutoff_chi, fiber_fourier, fiber_fourier_inverse, riemann_weyl
from .symbols import (B, C, G, LagrangianClass, MultiOrder, Partial, Psi, Symbol, check_symbol_estimates,
                      make_classical_symbol, order_compose, twisted_product_leading)
from .quantizer import BlockOperator, extract_symbol, quantize, restriction_matrix
from .calculus import adjoint, compose_blocks, operator_norm, verify_l2_bound
from .relations import (RelationSample, check_admissibility, classify_relation, compose_relations,
                        sample_relation, transpose_relation)
from .generating_pair import GeneratingPair, build_generating_pair, laplacian, order_reduction
from .groupoids import (SampledGroupoid, b_groupoid, bibundle_from_embedding, cdw_of_b, cdw_of_pair,
                        check_axioms, cusp_groupoid, pair_groupoid)
from .compactify import (b_derivative_check, blowup_weight_fit, check_weight_equivalence,
                         radial_compactify)

__version__ = "0.1.0"
