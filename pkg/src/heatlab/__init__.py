"""heatlab: exact heat-kernel jets and small-time asymptotics checks on 1-D models."""

from ._dispatch import CORE
from .jets import Jet, SeriesTruncation
from .manifolds import (
    Circle,
    ClosedSet,
    DirichletInterval,
    ExpOf,
    HyperbolicRadial3,
    Line,
    Manifold1D,
    MidpointMeasure,
    Polynomial,
    TrigPolynomial,
    WeightedCircle,
    WeightedLine,
    christoffel_jet,
    distance,
    distance_via,
    manifold_from_config,
    midpoint_measure,
)
from .calculus import (
    CumulantResult,
    PartitionFamily,
    covariant_jet,
    exp_jet,
    joint_cumulant,
    log_jet,
    measure_change_jet,
    set_partitions,
)
from .kernels import (
    KERNEL_IDS,
    default_backend,
    gauss_kernel_jet,
    hyperbolic3_radial_jet,
    interval_kernel_jet,
    kernel_jet,
    pde_residual,
    spectral_kernel_jet,
    theta_kernel_jet,
    weighted_line_kernel_jet,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
