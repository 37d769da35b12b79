"""Observer-free time rates of tensor fields in Galilean space-time.

Rigid observers split space-time into time and observer space; material,
Lie (upper/lower convected) and Jaumann derivatives are computed in absolute
form and in any rigid observer's relative form, and checked against
flow-pullback finite differences.
"""
from .spacetime import (EvaluationDomainError, FourCovector, FourVector, Instant,
                        SpaceCovector, SpaceTensor2, SpaceVector, Tensor2, Variance,
                        VarianceError, WorldPoint, antisym_space, embed, euclid_dot,
                        euclid_norm, flat, restrict_covector, sharp, tau_of, time_eval)
from .fields import (CatalogError, Field, FieldKind, FlowResult, IntegrationError,
                     VelocityField, catalog, constant_field, deformation_gradient,
                     derivative, flow, polynomial_field, spacelike_derivative,
                     vorticity, wedge_derivative)
from .observers import (RelForm, RigidObserver, corotating_observer, make_inertial,
                        make_rotating, rel_form, rotating_about)
from .derivatives import (OracleConfig, deformation_lie_check, jaumann_corotating_check,
                          jaumann_derivative, jaumann_rel, lie_derivative,
                          lie_derivative_rel, lie_oracle, lower_convected_rel,
                          lower_convected_tensor_rel, material_derivative, material_rel,
                          mixed_convected_tensor_rel, upper_convected_rel,
                          upper_convected_tensor_rel)

__version__ = "0.1.0"
