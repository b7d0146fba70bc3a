"""Chart-based Riemannian geometry: metrics, curvature, fields, curves."""

from .charts import (
    ChartPoint,
    DomainError,
    EuclideanAtlas,
    SphereAtlas,
    TangentBundleAtlas,
    TangentVector,
    as_point,
)
from .curves import (
    Curve,
    IntegrationError,
    geodesic_residual,
    geodesic_spray,
    h_second_derivative_identity,
    integrate_curve,
    integrate_geodesic,
    jacobi_residual,
)
from .fields import (
    VectorField,
    covariant_killing_form,
    lie_derivative_metric,
    linear_field,
    sphere_linear_field,
)
from .metric import (
    DegenerateMetricError,
    DegeneratePlaneError,
    MetricField,
    ScalarField,
    christoffel,
    christoffel_derivative,
    conformal_sectional_curvature,
    conformally_flat_metric,
    euclidean_metric,
    riemann,
    scalar_jet,
    sectional_curvature,
)
from .spheres import round_sphere, two_class_conformal_sphere, two_class_log_ratio
