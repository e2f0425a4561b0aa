"""Higher-order Voronoi coverage control: order-k partitions of convex
domains, the generalized coverage functional and its gradient, and
gradient-flow sensor dynamics.
"""

from .geometry import (
    KERNEL_IMPLEMENTATION,
    ConvexPolygon,
    DegenerateInputError,
    HalfPlane,
    OrderKCell,
    OrderKPartition,
    SensorConfiguration,
    bisector_halfplane,
    build_partition,
    clip,
    neighbors,
    order_k_cell,
    polygon_area,
    polygon_contains,
    union_cells_of,
)
from .quadrature import (
    CellMoments,
    DensityField,
    QuadratureSpec,
    cell_moments,
    integrate,
    triangulate,
    union_moments,
)
from .coverage import (
    ConfigurationError,
    CostFunction,
    CostRejectedError,
    centroid_gradient,
    evaluate_H,
    evaluate_H_bruteforce,
    gradient,
    max_distance,
    p_norm,
    sum_distance,
    sum_squared_half,
    validate_cost,
)
from .dynamics import (
    AvoidanceSpec,
    ControllerSpec,
    SimulationConfig,
    Trajectory,
    control_term,
    random_initial,
    run,
)
from .radar import RadarParams, bessel_i0, detection_probability, marcum_q1, neg_detection_cost

__version__ = "0.1.0"
