"""Holomorphic semigroups of the unit disc through their Koenigs functions."""

__version__ = "0.1.0"

from .expressions import EvaluationError, HolomorphicMap  # noqa: E402
from .grid import DEFAULT_GRID, GridSpec  # noqa: E402
from .hyperbolic import (  # noqa: E402
    DISC,
    FULL_PLANE,
    LEFT_HALF_PLANE,
    RIGHT_HALF_PLANE,
    Horocycle,
    ModelDomain,
    cayley,
    cayley_inv,
    horocycle_contains,
    horocycle_min_dist,
    hyp_dist,
    hyp_dist_disc,
    strip_uniformizer,
)
from .inverse import numeric_inverse, univalence_spot_check  # noqa: E402
from .parser import ParseError, parse  # noqa: E402
from .semigroups import (  # noqa: E402
    EllipticContraction,
    GeneratorSemigroup,
    HyperbolicGroup,
    ModelSemigroup,
    ODESettings,
    OrbitSample,
    ParabolicGroup,
    RotationGroup,
    TranslationGroup,
    builtin,
    model_identity_residual,
    semi_conjugation_residual,
    semigroup_law_residual,
)
from .dynamics import (  # noqa: E402
    ClassifySettings,
    classify,
    denjoy_wolff,
    distance_limit_check,
    divergence_rate,
    hyperbolic_step,
    rate_semiconjugation_check,
    step_rate_consistency,
)
from .models import (  # noqa: E402
    KoenigsFunction,
    canonical_normalize,
    dw_from_koenigs,
    koenigs_offset,
    range_bounds,
    starlike_check,
    strip_transfer,
)
from .generators import (  # noqa: E402
    GeneratorData,
    berkson_porta_residual,
    generator_from_koenigs,
    ode_residual,
)
