"""Complex-valued quasiprobability representations of finite-dimensional
quantum and classical theories, with numerical verification of their
structure: every empirically adequate, linearity-preserving representation
factors through a state map, a complexified process and an effect map."""

from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    cmat_from_json,
    cmat_to_json,
    devectorize,
    hs_inner,
    hs_norm,
    max_abs,
    rank_range,
    vectorize,
)
from .complexify import (
    CoherenceReport,
    PairVector,
    RealSpace,
    RealToComplexMap,
    ComplexifiedSpace,
    complexify_map,
    embed,
    monoidal_coherence,
    unique_extension,
)
from .frames import (
    BornProbe,
    Channel,
    DualPair,
    Frame,
    born_probe,
    canonical_dual,
    compose_channels,
    depolarizing_channel,
    frame_from_linear_map,
    frame_operator,
    identity_channel,
    random_frame,
    reconstruct_operator,
    represent_channel,
    represent_effect,
    represent_state,
    unitary_channel,
)
from .gpt import (
    GptProcess,
    GptSystem,
    channel_to_process,
    identity_resolution,
    make_system,
    random_channel,
    tomographic_decompose,
)
from .kirkwood_dirac import (
    KdBases,
    kd_distribution,
    kd_frame_pair,
    kd_representation,
    preset_bases,
    random_faithful_bases,
)
from .structure import (
    AuditReport,
    ChiPhi,
    Representation,
    audit_representation,
    build_representation,
    build_classical_representation,
    extract_chi,
    extract_chi_phi,
    extract_phi,
    frames_from_chi_phi,
    split_idempotent,
    splitting_isomorphism,
    verify_decomposition,
)

__version__ = "0.1.0"
