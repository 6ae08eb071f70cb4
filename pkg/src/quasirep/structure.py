"""Structure analysis of complex-valued representations.

A :class:`Representation` assigns to each system an index set and a pair of
matrices: a state side mapping coordinates to coefficient vectors and an
effect side mapping coefficients back.  For quantum systems both come from a
frame/dual pair; the classical delta-basis assignment uses identity slots.

The engine extracts, per system,

* ``chi``: the map fixed by the action on spanning states alone,
  ``chi = sum_ij t_ij (state image)_i (complexified effect)_j``,
* ``phi``: the corestricted inverse of ``chi`` composed with the image ``D``
  of the identity process,

and verifies that every represented process factors as
``Gamma(T) = chi_out @ C(T) @ phi_in`` where ``C(T)`` is the complexified
coordinate matrix of ``T``.  Idempotent splittings and their uniqueness up
to a unique intertwiner are handled by :func:`split_idempotent` and
:func:`splitting_isomorphism`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexify import complexify_map
from .errors import (
    DimensionError,
    InjectivityError,
    NonIdempotentError,
    SplittingMismatchError,
)
from .frames import (
    Channel,
    DualPair,
    Frame,
    represent_channel,
    represent_effect,
    represent_state,
)
from .gpt import (
    GptSystem,
    channel_to_process,
    random_channel,
    random_density,
    random_effect,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_cmat,
    devectorize,
    max_abs,
    numerical_rank,
    rank_range,
    vectorize,
)

__all__ = [
    "SystemSlot",
    "Representation",
    "ChiPhi",
    "AuditReport",
    "build_representation",
    "build_classical_representation",
    "extract_chi",
    "extract_phi",
    "effect_sum_phi",
    "extract_chi_phi",
    "split_idempotent",
    "splitting_isomorphism",
    "verify_decomposition",
    "audit_representation",
    "frames_from_chi_phi",
]

# Residual ceilings used by representation validation and audit verdicts.
IDEMPOTENCY_ATOL = 1e-9
SEMIFUNCTORIAL_ATOL = 1e-9
ADEQUACY_ATOL = 1e-10
LINEARITY_ATOL = 1e-9
DISCARD_ATOL = 1e-9
DECOMPOSITION_ATOL = 1e-8


class SystemSlot:
    """Per-system representation data: index labels plus both map matrices."""

    def __init__(self, labels, rep_matrix, recon_matrix, pair: DualPair | None = None):
        self.labels = tuple(labels)
        self.rep = as_cmat(rep_matrix)
        self.recon = as_cmat(recon_matrix)
        if self.rep.shape[0] != len(self.labels) or self.recon.shape[1] != len(self.labels):
            raise DimensionError("matrix sizes do not match the index set")
        if self.rep.shape[1] != self.recon.shape[0]:
            raise DimensionError("state and effect sides act on different spaces")
        self.pair = pair

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def coord_dim(self) -> int:
        """Complex dimension of the system's complexified coordinate space."""
        return self.rep.shape[1]

    @classmethod
    def from_pair(cls, pair: DualPair) -> "SystemSlot":
        rep = pair.frame.vec_matrix.conj()
        recon = pair.dual.vec_matrix.T
        return cls(pair.labels, rep, recon, pair=pair)

    @classmethod
    def classical(cls, n: int) -> "SystemSlot":
        eye = np.eye(n, dtype=complex)
        return cls([str(i) for i in range(n)], eye, eye)

    def id_image(self) -> np.ndarray:
        return self.rep @ self.recon


class Representation:
    """A per-system assignment of slots, applied to channels and processes."""

    def __init__(self, slots: dict[str, SystemSlot], validate: bool = True):
        if not slots:
            raise DimensionError("a representation needs at least one system")
        self.slots = dict(slots)
        if validate:
            for name, slot in self.slots.items():
                d = slot.id_image()
                residual = max_abs(d @ d - d)
                if residual > IDEMPOTENCY_ATOL:
                    raise NonIdempotentError(
                        f"identity image on system {name!r} is not idempotent "
                        f"(residual {residual:.3e})"
                    )

    def slot(self, system: str) -> SystemSlot:
        try:
            return self.slots[system]
        except KeyError:
            raise KeyError(f"representation is not defined on system {system!r}") from None

    def id_image(self, system: str) -> np.ndarray:
        return self.slot(system).id_image()

    def represent_state(self, system: str, x) -> np.ndarray:
        slot = self.slot(system)
        if slot.pair is not None:
            return represent_state(slot.pair, x)
        return slot.rep @ np.asarray(x, dtype=complex)

    def represent_effect(self, system: str, e) -> np.ndarray:
        slot = self.slot(system)
        if slot.pair is not None:
            return represent_effect(slot.pair, e)
        return np.asarray(e, dtype=complex).conj() @ slot.recon

    def apply(self, system_in: str, system_out: str, process) -> np.ndarray:
        """Representation matrix of a process between two systems.

        ``process`` is a :class:`Channel` between quantum slots, or a plain
        matrix read as a superoperator/process matrix on the coordinate
        spaces (the route used for classical systems and linear mixtures).
        """
        slot_in = self.slot(system_in)
        slot_out = self.slot(system_out)
        if isinstance(process, Channel):
            if slot_in.pair is None or slot_out.pair is None:
                raise DimensionError("channels require quantum slots on both ends")
            return represent_channel(slot_out.pair, slot_in.pair, process)
        m = as_cmat(process)
        if m.shape != (slot_out.coord_dim, slot_in.coord_dim):
            raise DimensionError(
                f"process matrix {m.shape} does not map the coordinate spaces "
                f"{slot_in.coord_dim} -> {slot_out.coord_dim}"
            )
        return slot_out.rep @ m @ slot_in.recon


def build_representation(assignment: dict[str, DualPair], validate: bool = True) -> Representation:
    """Representation induced by a frame/dual pair on each system."""
    return Representation(
        {name: SystemSlot.from_pair(pair) for name, pair in assignment.items()},
        validate=validate,
    )


def build_classical_representation(sizes: dict[str, int]) -> Representation:
    """Delta-basis representation of classical systems (identity slots)."""
    return Representation({name: SystemSlot.classical(n) for name, n in sizes.items()})


def _complexified_state_coords(slot: SystemSlot, sys: GptSystem) -> np.ndarray:
    """Columns: spanning states in the slot's complex coordinates."""
    if sys.is_quantum:
        return np.array([vectorize(op) for op in sys.state_ops]).T
    return sys.states.astype(complex).T


def _complexified_effect_rows(sys: GptSystem) -> np.ndarray:
    """Rows: complexified spanning-effect functionals on the coordinates."""
    if sys.is_quantum:
        # Tr(E X) = vec(E.T) . vec(X), complex-linearly extended
        return np.array([vectorize(op.T) for op in sys.effect_ops])
    return sys.effects.astype(complex)


def _state_images(rep: Representation, sys: GptSystem) -> np.ndarray:
    slot = rep.slot(sys.label)
    if sys.is_quantum:
        return np.array([rep.represent_state(sys.label, op) for op in sys.state_ops]).T
    return np.array([slot.rep @ s for s in sys.states.astype(complex)]).T


def extract_chi(rep: Representation, sys: GptSystem) -> np.ndarray:
    """The state map ``chi`` recovered from the action on spanning states.

    ``chi = sum_ij t_ij m_i c_j`` with ``m_i`` the represented states (as
    columns) and ``c_j`` the complexified effect functionals (as rows); by
    the identity resolution it satisfies ``chi @ coords(s) == rep(s)`` for
    every state.
    """
    images = _state_images(rep, sys)              # |Lambda| x n_states
    effect_rows = _complexified_effect_rows(sys)  # n_effects x D
    return images @ sys.t.astype(complex) @ effect_rows


def extract_phi(
    rep: Representation, sys: GptSystem, chi: np.ndarray | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """The effect map ``phi`` fixed by ``chi`` and the identity image.

    Implemented as the Moore-Penrose inverse of ``chi`` (equal to the inverse
    of its surjective corestriction on the range) composed with ``D``.

    Raises:
        InjectivityError: if ``chi`` is rank-deficient, so no corestricted
            inverse exists.
    """
    if chi is None:
        chi = extract_chi(rep, sys)
    slot = rep.slot(sys.label)
    rank, _, pinv = rank_range(chi, tol)
    if rank < slot.coord_dim:
        raise InjectivityError(
            f"state map has rank {rank} < {slot.coord_dim}; not injective"
        )
    return pinv @ slot.id_image()


def effect_sum_phi(rep: Representation, sys: GptSystem) -> np.ndarray:
    """Independent construction of ``phi`` from the action on effects:
    ``phi = sum_ij t_ij v_i xi_j`` with complexified state coordinates ``v_i``
    (columns) and represented effects ``xi_j`` (rows)."""
    coords = _complexified_state_coords(rep.slot(sys.label), sys)
    if sys.is_quantum:
        xi_rows = np.array([rep.represent_effect(sys.label, op) for op in sys.effect_ops])
    else:
        xi_rows = np.array([rep.represent_effect(sys.label, e) for e in sys.effects])
    return coords @ sys.t.astype(complex) @ xi_rows


@dataclass(frozen=True, eq=False)
class ChiPhi:
    """Extracted pair of maps for one system, with its consistency residuals."""

    chi: np.ndarray
    phi: np.ndarray
    hilbert_dim: int
    labels: tuple

    def validate(self, tol: Tolerance = DEFAULT_TOL) -> None:
        d2 = self.chi.shape[1]
        left = max_abs(self.phi @ self.chi - np.eye(d2))
        if left > SEMIFUNCTORIAL_ATOL:
            raise InjectivityError(f"phi is not a left inverse of chi (residual {left:.3e})")
        if numerical_rank(self.chi, tol) != d2:
            raise InjectivityError("chi is not injective")
        d = self.chi @ self.phi
        residual = max_abs(d @ d - d)
        if residual > IDEMPOTENCY_ATOL:
            raise NonIdempotentError(f"chi @ phi is not idempotent (residual {residual:.3e})")


def extract_chi_phi(rep: Representation, sys: GptSystem, tol: Tolerance = DEFAULT_TOL) -> ChiPhi:
    chi = extract_chi(rep, sys)
    phi = extract_phi(rep, sys, chi, tol)
    pair = ChiPhi(chi=chi, phi=phi, hilbert_dim=sys.dim, labels=rep.slot(sys.label).labels)
    pair.validate(tol)
    return pair


def split_idempotent(d_mat, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Factor an idempotent as ``D = iota @ pi`` with ``pi @ iota = I_r``.

    ``iota`` holds an orthonormal basis of the image; since ``D`` acts as the
    identity on its image, ``pi = iota† @ D`` completes the splitting.

    Raises:
        NonIdempotentError: when ``D @ D`` differs from ``D`` beyond tolerance.
    """
    d_mat = as_cmat(d_mat, square=True)
    residual = max_abs(d_mat @ d_mat - d_mat)
    if residual > max(tol.atol, IDEMPOTENCY_ATOL):
        raise NonIdempotentError(f"matrix is not idempotent: residual {residual:.3e}")
    _, basis, _ = rank_range(d_mat, tol)
    iota = basis
    pi = basis.conj().T @ d_mat
    return iota, pi


def splitting_isomorphism(
    s1: tuple[np.ndarray, np.ndarray],
    s2: tuple[np.ndarray, np.ndarray],
    atol: float = SEMIFUNCTORIAL_ATOL,
) -> np.ndarray:
    """The unique intertwiner connecting two splittings of one idempotent.

    For splittings ``D = i1 @ p1 = i2 @ p2`` returns ``xi = p2 @ i1``, which
    satisfies ``i2 @ xi = i1``, ``xi @ p1 = p2`` and ``xi @ (p1 @ i2) = I``.

    Raises:
        SplittingMismatchError: if the two factorizations do not reproduce
            the same idempotent or the intertwining identities fail.
    """
    i1, p1 = as_cmat(s1[0]), as_cmat(s1[1])
    i2, p2 = as_cmat(s2[0]), as_cmat(s2[1])
    if i1.shape[0] != i2.shape[0]:
        raise DimensionError("splittings act on different spaces")
    gap = max_abs(i1 @ p1 - i2 @ p2)
    if gap > atol:
        raise SplittingMismatchError(f"factorizations split different idempotents (gap {gap:.3e})")
    xi = p2 @ i1
    checks = (
        max_abs(i2 @ xi - i1),
        max_abs(xi @ p1 - p2),
        max_abs(xi @ (p1 @ i2) - np.eye(xi.shape[0])),
    )
    worst = max(checks)
    if worst > atol:
        raise SplittingMismatchError(f"intertwining identities fail (residual {worst:.3e})")
    return xi


def _complexified_process(ch: Channel, sys_in: GptSystem, sys_out: GptSystem) -> np.ndarray:
    """``C(T)`` on the slots' complex coordinates, via the real route.

    The channel is first expressed as a real matrix on the systems' real
    coordinates, then promoted entrywise and conjugated back by the
    coordinate isomorphisms.
    """
    t_real = channel_to_process(ch, sys_in, sys_out).matrix
    return sys_out.iso @ complexify_map(t_real) @ sys_in.iso.conj().T


def verify_decomposition(
    rep: Representation,
    sys_in: GptSystem,
    sys_out: GptSystem,
    channels,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Largest residual of ``Gamma(T) = chi_out @ C(T) @ phi_in`` over ``channels``.

    Both sides are computed independently: the left through the frame inner
    products, the right through the extracted maps and the complexified
    real-coordinate matrix of each channel.
    """
    chi_out = extract_chi(rep, sys_out)
    phi_in = extract_phi(rep, sys_in, tol=tol)
    worst = 0.0
    for ch in channels:
        lhs = rep.apply(sys_in.label, sys_out.label, ch)
        rhs = chi_out @ _complexified_process(ch, sys_in, sys_out) @ phi_in
        worst = max(worst, max_abs(lhs - rhs))
    return worst


@dataclass(frozen=True)
class AuditReport:
    """Full property report for a representation; failures are data here."""

    semifunctorial: bool
    semifunctorial_residual: float
    empirically_adequate: bool
    adequacy_residual: float
    linear: bool
    linearity_residual: float
    discard_preserving: bool
    discard_residual: float
    functorial: bool
    decomposition_residual: float
    dim_check: bool
    seed: int
    trials: int

    @property
    def all_core_pass(self) -> bool:
        """The gating properties; discard preservation is reported only."""
        return (
            self.semifunctorial
            and self.empirically_adequate
            and self.linear
            and self.decomposition_residual <= DECOMPOSITION_ATOL
        )

    def to_json(self) -> dict:
        return {
            "semifunctorial": self.semifunctorial,
            "semifunctorial_residual": self.semifunctorial_residual,
            "empirically_adequate": self.empirically_adequate,
            "adequacy_residual": self.adequacy_residual,
            "linear": self.linear,
            "linearity_residual": self.linearity_residual,
            "discard_preserving": self.discard_preserving,
            "discard_residual": self.discard_residual,
            "functorial": self.functorial,
            "decomposition_residual": self.decomposition_residual,
            "dim_check": self.dim_check,
            "seed": self.seed,
            "trials": self.trials,
        }


def _discard_residual(rep: Representation, sys: GptSystem) -> float:
    """Deviation of the represented discard from the summation functional."""
    chi = extract_chi(rep, sys)
    ones = np.ones(rep.slot(sys.label).size, dtype=complex)
    if sys.is_quantum:
        u_row = vectorize(np.eye(sys.dim))  # trace functional on vec coordinates
    else:
        u_row = sys.u.astype(complex)
    return max_abs(ones @ chi - u_row)


def audit_representation(
    rep: Representation,
    systems: list[GptSystem],
    trials: int = 20,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> AuditReport:
    """Sample-based audit of every defining property of a representation.

    Each trial draws its own child generator from ``(seed, index)`` so runs
    are reproducible and trials independent.  Failures never raise; they
    surface as report fields.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    quantum = [s for s in systems if s.is_quantum]

    semif = 0.0
    adequacy = 0.0
    linearity = 0.0
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        for sys_a in quantum:
            for sys_b in quantum:
                for sys_c in quantum:
                    ch1 = random_channel(sys_a.dim, sys_b.dim, seed=int(rng.integers(2**31)))
                    ch2 = random_channel(sys_b.dim, sys_c.dim, seed=int(rng.integers(2**31)))
                    composed = Channel([k2 @ k1 for k2 in ch2.kraus for k1 in ch1.kraus])
                    gamma1 = rep.apply(sys_a.label, sys_b.label, ch1)
                    gamma2 = rep.apply(sys_b.label, sys_c.label, ch2)
                    whole = rep.apply(sys_a.label, sys_c.label, composed)
                    semif = max(semif, max_abs(whole - gamma2 @ gamma1))
        for sys in quantum:
            rho = random_density(sys.dim, rng)
            eff = random_effect(sys.dim, rng)
            mu = rep.represent_state(sys.label, rho)
            xi = rep.represent_effect(sys.label, eff)
            born = complex(xi @ mu)
            adequacy = max(adequacy, abs(born - np.trace(eff @ rho)))
        for sys_a in quantum:
            for sys_b in quantum:
                ch1 = random_channel(sys_a.dim, sys_b.dim, seed=int(rng.integers(2**31)))
                ch2 = random_channel(sys_a.dim, sys_b.dim, seed=int(rng.integers(2**31)))
                g1 = rep.apply(sys_a.label, sys_b.label, ch1)
                g2 = rep.apply(sys_a.label, sys_b.label, ch2)
                # physical mixture first, then an arbitrary real combination
                w = rng.uniform(0, 1)
                mixed = rep.apply(sys_a.label, sys_b.label, w * ch1.superop + (1 - w) * ch2.superop)
                linearity = max(linearity, max_abs(mixed - (w * g1 + (1 - w) * g2)))
                alpha, beta = rng.uniform(-2, 2, 2)
                combo = rep.apply(sys_a.label, sys_b.label, alpha * ch1.superop + beta * ch2.superop)
                linearity = max(linearity, max_abs(combo - (alpha * g1 + beta * g2)))

    discard = max((_discard_residual(rep, s) for s in systems), default=0.0)
    functorial = all(
        max_abs(rep.id_image(s.label) - np.eye(rep.slot(s.label).size)) <= IDEMPOTENCY_ATOL
        for s in systems
    )

    decomposition = 0.0
    dim_ok = True
    try:
        for sys in systems:
            chi = extract_chi(rep, sys)
            dim_ok &= numerical_rank(chi, tol) == rep.slot(sys.label).coord_dim
        rng = np.random.default_rng((seed, trials))
        for sys_a in quantum:
            for sys_b in quantum:
                channels = [
                    random_channel(sys_a.dim, sys_b.dim, seed=int(rng.integers(2**31)))
                    for _ in range(max(1, trials // 4))
                ]
                decomposition = max(
                    decomposition, verify_decomposition(rep, sys_a, sys_b, channels, tol)
                )
    except (InjectivityError, NonIdempotentError):
        dim_ok = False
        decomposition = float("inf")

    semif, adequacy = float(semif), float(adequacy)
    linearity, discard = float(linearity), float(discard)
    return AuditReport(
        semifunctorial=semif <= SEMIFUNCTORIAL_ATOL,
        semifunctorial_residual=semif,
        empirically_adequate=adequacy <= ADEQUACY_ATOL,
        adequacy_residual=adequacy,
        linear=linearity <= LINEARITY_ATOL,
        linearity_residual=linearity,
        discard_preserving=discard <= DISCARD_ATOL,
        discard_residual=discard,
        functorial=bool(functorial),
        decomposition_residual=float(decomposition),
        dim_check=bool(dim_ok),
        seed=seed,
        trials=trials,
    )


def frames_from_chi_phi(cp: ChiPhi, validate: bool = True) -> DualPair:
    """Recover the frame/dual pair underlying an extracted map pair.

    Rows of ``chi`` are the conjugated vectorized frame elements and columns
    of ``phi`` the vectorized dual elements; the rebuilt pair satisfies the
    reconstruction identity and its overlap matrix reproduces ``chi @ phi``.
    """
    d = cp.hilbert_dim
    if cp.chi.shape[1] != d**2:
        raise DimensionError("chi does not act on a d**2-dimensional operator space")
    frame = Frame([devectorize(row.conj(), (d, d)) for row in cp.chi], labels=cp.labels)
    dual = Frame([devectorize(col, (d, d)) for col in cp.phi.T], labels=cp.labels)
    return DualPair(frame, dual, validate=validate)
