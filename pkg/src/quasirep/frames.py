"""Frame representation theory for operator spaces.

A frame is an indexed family ``{F_l}`` of ``d x d`` complex matrices whose
span is the full operator space.  Together with a dual family ``{G_l}`` it
represents

* states by the coefficient vector ``mu_l = Tr(F_l† X)``,
* effects by the covector ``xi_l = Tr(E† G_l)``,
* channels by the matrix ``Gamma[l_out, l_in] = Tr(F_out† E(G_in))``,

and reconstructs any operator as ``X = sum_l mu_l G_l``.  The canonical dual
is obtained by inverting the frame operator ``S(A) = sum_l Tr(A† F_l) F_l``.
Representations of the identity channel are idempotent matrices; they equal
the identity exactly when frame and dual are biorthogonal.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ReconstructionError, SingularFrameError
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_cmat,
    cmat_from_json,
    cmat_to_json,
    devectorize,
    max_abs,
    numerical_rank,
    vectorize,
)

__all__ = [
    "Frame",
    "DualPair",
    "Channel",
    "BornProbe",
    "frame_operator",
    "canonical_dual",
    "represent_state",
    "represent_effect",
    "represent_channel",
    "reconstruct_operator",
    "born_probe",
    "frame_from_linear_map",
    "random_frame",
    "identity_channel",
    "unitary_channel",
    "depolarizing_channel",
    "compose_channels",
    "frame_to_json",
    "frame_from_json",
    "channel_to_json",
    "channel_from_json",
]

# Dual pairs are validated against the reconstruction identity at this
# entrywise threshold (the canonical dual of a mildly conditioned frame sits
# orders of magnitude below it).
RECONSTRUCTION_ATOL = 1e-9


class Frame:
    """An indexed family of ``d x d`` complex matrices.

    Non-spanning families are representable (and reported by
    :meth:`is_spanning`); operations that need a dual reject them.
    """

    def __init__(self, elements, labels=None):
        elements = [as_cmat(e, square=True) for e in elements]
        if not elements:
            raise DimensionError("a frame needs at least one element")
        d = elements[0].shape[0]
        if any(e.shape != (d, d) for e in elements):
            raise DimensionError("all frame elements must share one shape")
        if labels is None:
            labels = [str(i) for i in range(len(elements))]
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(elements):
            raise DimensionError("one label per frame element required")
        self.dim = d
        self.labels = labels
        self.elements = tuple(elements)
        # rows are vec(F_l); Tr(F_l† X) = vec_matrix.conj() @ vec(X)
        self.vec_matrix = np.array([vectorize(e) for e in elements])

    def __len__(self) -> int:
        return len(self.elements)

    def spanning_rank(self, tol: Tolerance = DEFAULT_TOL) -> int:
        return numerical_rank(self.vec_matrix, tol)

    def is_spanning(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.spanning_rank(tol) == self.dim**2


class DualPair:
    """A frame together with a dual family reconstructing every operator.

    The construction checks ``sum_l vec(G_l) vec(F_l)† == identity`` (an exact
    basis check of the reconstruction identity, equivalent by linearity to
    reconstructing every operator).  Pass ``validate=False`` to hold an
    unverified pair, e.g. to audit a deliberately broken dual.
    """

    def __init__(self, frame: Frame, dual: Frame, validate: bool = True):
        if dual.dim != frame.dim:
            raise DimensionError("frame and dual live on different spaces")
        if len(dual) != len(frame):
            raise DimensionError("frame and dual must share the index set")
        self.frame = frame
        self.dual = dual
        self.reconstruction_residual = max_abs(
            self._reconstruction_superop() - np.eye(frame.dim**2)
        )
        if validate and self.reconstruction_residual > RECONSTRUCTION_ATOL:
            raise ReconstructionError(
                f"reconstruction identity fails: residual "
                f"{self.reconstruction_residual:.3e} > {RECONSTRUCTION_ATOL:.1e}"
            )

    @property
    def dim(self) -> int:
        return self.frame.dim

    @property
    def labels(self) -> tuple:
        return self.frame.labels

    def __len__(self) -> int:
        return len(self.frame)

    def _reconstruction_superop(self) -> np.ndarray:
        vg, vf = self.dual.vec_matrix, self.frame.vec_matrix
        return np.einsum("li,lj->ij", vg, vf.conj())

    def gram(self) -> np.ndarray:
        """Overlap matrix ``Tr(F_l† G_l')``; the identity iff biorthogonal."""
        return self.frame.vec_matrix.conj() @ self.dual.vec_matrix.T

    def is_biorthogonal(self, atol: float = RECONSTRUCTION_ATOL) -> bool:
        return max_abs(self.gram() - np.eye(len(self))) <= atol


class Channel:
    """A completely positive trace-nonincreasing map in Kraus form.

    The Kraus list is ground truth; the superoperator matrix acting on
    row-major vectorizations is derived once and cached.
    """

    def __init__(self, kraus, validate: bool = True, tol: Tolerance = DEFAULT_TOL):
        kraus = [as_cmat(k) for k in kraus]
        if not kraus:
            raise DimensionError("a channel needs at least one Kraus operator")
        d_out, d_in = kraus[0].shape
        if any(k.shape != (d_out, d_in) for k in kraus):
            raise DimensionError("all Kraus operators must share one shape")
        self.d_in = d_in
        self.d_out = d_out
        self.kraus = tuple(kraus)
        self.superop = sum(np.kron(k, k.conj()) for k in kraus)
        if validate:
            # trace-nonincreasing: sum K†K bounded by the identity
            gram = sum(k.conj().T @ k for k in kraus)
            excess = np.linalg.eigvalsh(gram - np.eye(d_in)).max()
            if excess > 100 * tol.atol:
                raise ValueError(f"channel increases trace by up to {excess:.3e}")

    def choi(self) -> np.ndarray:
        """Choi matrix ``sum_k vec(K_k) vec(K_k)†``; PSD by construction."""
        vecs = np.array([vectorize(k) for k in self.kraus])
        return np.einsum("ki,kj->ij", vecs, vecs.conj())

    def is_trace_preserving(self, atol: float = 1e-10) -> bool:
        gram = sum(k.conj().T @ k for k in self.kraus)
        return max_abs(gram - np.eye(self.d_in)) <= atol

    def apply(self, x) -> np.ndarray:
        x = as_cmat(x, square=True)
        if x.shape[0] != self.d_in:
            raise DimensionError(f"operator of dim {x.shape[0]} fed to channel with d_in={self.d_in}")
        return devectorize(self.superop @ vectorize(x), (self.d_out, self.d_out))


def identity_channel(d: int) -> Channel:
    return Channel([np.eye(d)])


def unitary_channel(u) -> Channel:
    return Channel([as_cmat(u, square=True)])


def depolarizing_channel(d: int) -> Channel:
    """The fully depolarizing map ``X -> Tr(X) I / d``."""
    kraus = []
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[i, j] = 1 / np.sqrt(d)
            kraus.append(k)
    return Channel(kraus)


def compose_channels(second: Channel, first: Channel) -> Channel:
    """Sequential composition ``second o first`` via Kraus products."""
    if second.d_in != first.d_out:
        raise DimensionError("intermediate dimensions do not match")
    return Channel([k2 @ k1 for k2 in second.kraus for k1 in first.kraus])


def frame_operator(f: Frame) -> np.ndarray:
    """Superoperator matrix of ``S(A) = sum_l Tr(A† F_l) F_l``.

    Always self-adjoint and positive semidefinite; invertible exactly when
    the frame spans.
    """
    v = f.vec_matrix
    return np.einsum("li,lj->ij", v, v.conj())


def canonical_dual(f: Frame, tol: Tolerance = DEFAULT_TOL) -> DualPair:
    """Dual pair with ``G_l = S^{-1}(F_l)``.

    Raises:
        SingularFrameError: if the frame does not span the operator space
            (the frame operator is then singular and no dual exists).
    """
    s = frame_operator(f)
    rank = f.spanning_rank(tol)
    if rank < f.dim**2:
        raise SingularFrameError(
            f"frame spans only {rank} of {f.dim**2} dimensions; no canonical dual"
        )
    dual_vecs = np.linalg.solve(s, f.vec_matrix.T).T
    dual = Frame([devectorize(v) for v in dual_vecs], labels=f.labels)
    return DualPair(f, dual)


def represent_state(pair: DualPair, x) -> np.ndarray:
    """Coefficient vector ``mu_l = Tr(F_l† x)`` over the index set."""
    x = as_cmat(x, square=True)
    if x.shape[0] != pair.dim:
        raise DimensionError(f"operator dim {x.shape[0]} != frame dim {pair.dim}")
    return pair.frame.vec_matrix.conj() @ vectorize(x)


def represent_effect(pair: DualPair, e) -> np.ndarray:
    """Covector ``xi_l = Tr(e† G_l)``; conjugate-linear in ``e``.

    Pairs with state coefficients to reproduce every probability:
    ``sum_l xi_l mu(l|X) = Tr(e† X)`` for all ``X``.  The operator itself is
    rebuilt through the frame with the conjugated coefficients,
    ``e = sum_l conj(xi_l) F_l`` (the adjoint of the reconstruction identity).
    """
    e = as_cmat(e, square=True)
    if e.shape[0] != pair.dim:
        raise DimensionError(f"operator dim {e.shape[0]} != frame dim {pair.dim}")
    return pair.dual.vec_matrix @ vectorize(e).conj()


def represent_channel(pair_out: DualPair, pair_in: DualPair, ch: Channel) -> np.ndarray:
    """Channel matrix ``Gamma[l_out, l_in] = Tr(F_out† E(G_in))``.

    Multiplicative over sequential composition whenever the intermediate
    system keeps a single pair; the image of the identity channel is the
    frame/dual overlap matrix, an idempotent.
    """
    if ch.d_in != pair_in.dim or ch.d_out != pair_out.dim:
        raise DimensionError(
            f"channel {ch.d_in}->{ch.d_out} does not match pairs "
            f"{pair_in.dim}->{pair_out.dim}"
        )
    return pair_out.frame.vec_matrix.conj() @ ch.superop @ pair_in.dual.vec_matrix.T


def reconstruct_operator(pair: DualPair, mu) -> np.ndarray:
    """Rebuild ``sum_l mu_l G_l``; left-inverse of :func:`represent_state`."""
    mu = np.asarray(mu, dtype=complex)
    if mu.shape != (len(pair),):
        raise DimensionError(f"expected {len(pair)} coefficients, got shape {mu.shape}")
    return devectorize(pair.dual.vec_matrix.T @ mu, (pair.dim, pair.dim))


class BornProbe:
    """Both sides of the probability formula for one (state, effect) pair."""

    __slots__ = ("lhs", "rhs", "residual")

    def __init__(self, lhs: complex, rhs: complex):
        self.lhs = lhs
        self.rhs = rhs
        self.residual = abs(lhs - rhs)


def born_probe(pair: DualPair, rho, eff) -> BornProbe:
    """Compare ``sum_l mu(l|rho) xi(eff|l)`` against ``Tr(eff rho)``.

    For a valid dual pair and self-adjoint ``eff`` the two sides agree; a
    mismatched dual shows up as a macroscopic residual on generic inputs.
    """
    mu = represent_state(pair, rho)
    xi = represent_effect(pair, eff)
    lhs = complex(xi @ mu)
    rhs = complex(np.trace(as_cmat(eff) @ as_cmat(rho)))
    return BornProbe(lhs, rhs)


def frame_from_linear_map(m, d: int, tol: Tolerance = DEFAULT_TOL) -> tuple[Frame, bool]:
    """Extract the unique frame realizing a linear map into coefficients.

    Given a matrix ``m`` whose row ``l`` implements a linear functional on
    vectorized operators, returns the family with ``vec(F_l) = row_l†`` so
    that ``Tr(F_l† X) = (m @ vec(X))_l`` for every ``X``, plus a faithfulness
    flag: the map is injective (and the family spans) iff ``m`` has full
    column rank ``d**2``.
    """
    m = as_cmat(m)
    if m.shape[1] != d**2:
        raise DimensionError(f"expected {d**2} columns for dimension {d}, got {m.shape[1]}")
    elements = [devectorize(row.conj(), (d, d)) for row in m]
    faithful = numerical_rank(m, tol) == d**2
    return Frame(elements), faithful


def random_frame(
    d: int, size: int, rng: np.random.Generator, labels=None
) -> Frame:
    """A spanning frame of ``size >= d**2`` Ginibre-random elements."""
    if size < d**2:
        raise DimensionError(f"need at least {d**2} elements to span, got {size}")
    while True:
        elements = [
            (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
            for _ in range(size)
        ]
        frame = Frame(elements, labels=labels)
        if frame.is_spanning():
            return frame


def frame_to_json(frame: Frame, dual: Frame | None = None) -> dict:
    data = {
        "d": frame.dim,
        "labels": list(frame.labels),
        "elements": [cmat_to_json(e) for e in frame.elements],
    }
    if dual is not None:
        data["dual"] = [cmat_to_json(e) for e in dual.elements]
    return data


def frame_from_json(data: dict) -> Frame | DualPair:
    """Parse a frame file; returns a DualPair when a dual family is present.

    A stored dual is taken at face value (not re-validated) so that broken
    pairs can be loaded for auditing.
    """
    try:
        d = int(data["d"])
        labels = [str(x) for x in data["labels"]]
        elements = [cmat_from_json(e) for e in data["elements"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed frame record: {exc}") from exc
    frame = Frame(elements, labels=labels)
    if frame.dim != d:
        raise DimensionError("declared dimension does not match elements")
    if "dual" in data and data["dual"] is not None:
        dual = Frame([cmat_from_json(e) for e in data["dual"]], labels=labels)
        return DualPair(frame, dual, validate=False)
    return frame


def channel_to_json(ch: Channel) -> dict:
    return {
        "d_in": ch.d_in,
        "d_out": ch.d_out,
        "kraus": [cmat_to_json(k) for k in ch.kraus],
    }


def channel_from_json(data: dict) -> Channel:
    try:
        kraus = [cmat_from_json(k) for k in data["kraus"]]
        d_in, d_out = int(data["d_in"]), int(data["d_out"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed channel record: {exc}") from exc
    ch = Channel(kraus)
    if (ch.d_in, ch.d_out) != (d_in, d_out):
        raise DimensionError("declared dimensions do not match Kraus operators")
    return ch
