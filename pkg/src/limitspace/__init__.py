"""Computations on finite limit spaces: convergence structures, constructions,
connectedness, walks and their homotopy, covering atlases, and radius-bounded
universal covers."""

from .core import (
    Carrier,
    LimitSpace,
    PointMap,
    PrincipalFilter,
    RawConvergenceTable,
    close,
    converges,
    continuity_defect,
    discrete_space,
    filter_image,
    filter_meet,
    indiscrete_space,
    is_continuous,
    is_finer,
    is_pretopological,
    is_pseudotopological,
    map_from_names,
    neighborhood,
    space_from_names,
)
from .connectivity import (
    CoverBase,
    LocalCover,
    ball_cover,
    chain_between,
    components,
    is_connected,
    is_cover_base,
    is_local_cover,
    is_locally_connected,
    is_locally_path_connected,
)
from .constructions import (
    FunctionSpace,
    QuotientSpec,
    disjoint_union,
    function_space,
    initial_structure,
    modification_pretop,
    modification_pstop,
    product,
    quotient_limit,
    quotient_pstop,
    subspace,
)
from .paths import (
    HomotopySystem,
    StepPath,
    Walk,
    concat,
    constant_walk,
    homotopic,
    is_valid_path,
    normalize,
    path_components,
    pushforward,
    reverse,
    to_walk,
    walk_from_names,
)
from .covering import (
    CoveringAtlas,
    has_unique_path_lifting,
    lift_homotopy,
    lift_map,
    lift_path,
    search_atlas,
    verify_atlas,
)
from .universal import (
    CoverFragment,
    basepoint_transport,
    build_fragment,
    phi_bar,
    pi1_probe,
    verify_universal,
)

__version__ = "0.1.0"
