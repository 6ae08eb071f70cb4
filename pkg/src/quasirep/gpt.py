"""Minimal generalized-probabilistic-theory systems and their tomography.

Two kinds of system are bundled:

* ``quantum`` with Hilbert dimension ``d``: the real space of self-adjoint
  ``d x d`` operators, coordinatized in a fixed orthonormal Hermitian basis;
  the spanning states are the standard tomography family of pure states, the
  effects reuse the same operators as functionals and the deterministic
  effect is the trace.
* ``classical`` with ``n`` outcomes: ``R^n`` with the delta-distribution
  basis, indicator effects and the all-ones deterministic effect.

Each system stores the coefficients ``t`` of a resolution of the identity
``sum_ij t_ij s_i e_j = id``, solved by minimal-norm least squares, and any
process between systems decomposes as a real combination of the same
prepare-and-measure pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, SpanningError
from .frames import Channel
from .linalg import DEFAULT_TOL, Tolerance, as_cmat, haar_unitary, max_abs, vectorize

__all__ = [
    "GptSystem",
    "GptProcess",
    "hermitian_basis",
    "basis_isomorphism",
    "operator_to_coords",
    "coords_to_operator",
    "make_system",
    "identity_resolution",
    "tomographic_decompose",
    "random_channel",
    "channel_to_process",
    "random_density",
    "random_effect",
    "system_to_json",
    "system_from_json",
    "process_to_json",
    "process_from_json",
]

MAX_QUANTUM_DIM = 4


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of the ``d x d`` self-adjoint operators.

    Ordering: diagonal units first, then for each index pair ``j < k`` the
    symmetric and antisymmetric combinations ``(E_jk + E_kj)/sqrt(2)`` and
    ``i(E_kj - E_jk)/sqrt(2)`` (the Pauli X/Y pattern).
    """
    basis = []
    for j in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[j, j] = 1
        basis.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            basis.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[j, k] = -1j / np.sqrt(2)
            asym[k, j] = 1j / np.sqrt(2)
            basis.append(asym)
    return basis


def basis_isomorphism(d: int) -> np.ndarray:
    """Unitary ``d**2 x d**2`` matrix mapping Hermitian-basis coordinates to
    vectorized operators (column ``k`` is ``vec`` of the k-th basis element)."""
    return np.array([vectorize(h) for h in hermitian_basis(d)]).T


def operator_to_coords(x, iso: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Real coordinates of a self-adjoint operator in the fixed basis."""
    z = iso.conj().T @ vectorize(as_cmat(x, square=True))
    if max_abs(z.imag) > atol:
        raise ValueError("operator is not self-adjoint: coordinates are complex")
    return z.real.copy()


def coords_to_operator(z, iso: np.ndarray) -> np.ndarray:
    d2 = iso.shape[0]
    d = int(round(np.sqrt(d2)))
    return (iso @ np.asarray(z, dtype=complex)).reshape(d, d)


def _tomography_states(d: int) -> list[np.ndarray]:
    """The fixed spanning family of d**2 pure states.

    Computational-basis projectors plus, for each pair ``j < k``, the
    projectors onto ``(|j> + |k>)/sqrt(2)`` and ``(|j> + i|k>)/sqrt(2)``.
    """
    states = []
    eye = np.eye(d, dtype=complex)
    for j in range(d):
        states.append(np.outer(eye[j], eye[j].conj()))
    for j in range(d):
        for k in range(j + 1, d):
            plus = (eye[j] + eye[k]) / np.sqrt(2)
            states.append(np.outer(plus, plus.conj()))
            plus_i = (eye[j] + 1j * eye[k]) / np.sqrt(2)
            states.append(np.outer(plus_i, plus_i.conj()))
    return states


class GptSystem:
    """A system of a tomographically-local theory in fixed coordinates.

    Attributes:
        kind: ``"quantum"`` or ``"classical"``.
        dim: Hilbert dimension ``d`` or outcome count ``n``.
        real_dim: dimension of the system's real vector space.
        states: spanning states as rows of a real matrix.
        effects: spanning effects as rows of a real matrix.
        u: deterministic-effect covector.
        t: identity-resolution coefficients.
        state_ops / effect_ops: the operator forms (quantum systems only).
        iso: coordinate isomorphism onto vectorized operators (quantum only).
    """

    def __init__(self, kind: str, dim: int, seed: int = 0, label: str | None = None):
        if dim < 1:
            raise DimensionError("system dimension must be >= 1")
        if kind == "quantum" and dim > MAX_QUANTUM_DIM:
            raise DimensionError(f"quantum systems support d <= {MAX_QUANTUM_DIM}")
        if kind not in ("quantum", "classical"):
            raise ValueError(f"unknown system kind {kind!r}")
        self.kind = kind
        self.dim = dim
        self.seed = seed
        self.label = label if label is not None else f"{kind}-{dim}"
        if kind == "quantum":
            self.real_dim = dim**2
            self.iso = basis_isomorphism(dim)
            self.state_ops = tuple(_tomography_states(dim))
            self.effect_ops = self.state_ops
            self.states = np.array([operator_to_coords(s, self.iso) for s in self.state_ops])
            self.effects = self.states.copy()
            self.u = operator_to_coords(np.eye(dim), self.iso)
        else:
            self.real_dim = dim
            self.iso = None
            self.state_ops = None
            self.effect_ops = None
            self.states = np.eye(dim)
            self.effects = np.eye(dim)
            self.u = np.ones(dim)
        self.t = identity_resolution(self)

    @property
    def is_quantum(self) -> bool:
        return self.kind == "quantum"


@dataclass(frozen=True, eq=False)
class GptProcess:
    """A linear process between two systems, stored in their coordinates."""

    source: GptSystem
    target: GptSystem
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (self.target.real_dim, self.source.real_dim):
            raise DimensionError(
                f"process matrix {m.shape} does not map "
                f"{self.source.real_dim} -> {self.target.real_dim}"
            )
        if not np.all(np.isfinite(m)):
            raise ValueError("process entries must be finite")
        object.__setattr__(self, "matrix", m)

    def is_substochastic(self, atol: float = 1e-12) -> bool:
        """Nonnegative entries with column sums at most one (classical kind)."""
        m = self.matrix
        return bool(np.all(m >= -atol) and np.all(m.sum(axis=0) <= 1 + atol))


def make_system(kind: str, dim: int, seed: int = 0, label: str | None = None) -> GptSystem:
    """Construct a bundled system; see :class:`GptSystem` for the content.

    The spanning families are fixed deterministic constructions; ``seed``
    only rides along in the descriptor for reproducible configs.
    """
    return GptSystem(kind, dim, seed=seed, label=label)


def _prepare_measure_columns(sys_states: np.ndarray, sys_effects: np.ndarray) -> np.ndarray:
    # column (i, j) holds vec(outer(s_i, e_j)) = kron(s_i, e_j)
    cols = [np.kron(s, e) for s in sys_states for e in sys_effects]
    return np.array(cols).T


def identity_resolution(sys: GptSystem, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Coefficients ``t`` with ``sum_ij t_ij s_i e_j = id`` on the system.

    Minimal-norm least-squares solution (unique for spanning bases,
    deterministic for overcomplete families).

    Raises:
        SpanningError: if no solution reaches the residual tolerance.
    """
    return _decompose_matrix(sys.states, sys.effects, np.eye(sys.real_dim), tol)


def tomographic_decompose(proc: GptProcess, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Coefficients ``r`` with ``T = sum_ij r_ij s_i e_j``.

    States are drawn from the target system and effects from the source, so
    the prepare-and-measure pairs have the type of ``T``.
    """
    return _decompose_matrix(proc.target.states, proc.source.effects, proc.matrix, tol)


def _decompose_matrix(states, effects, target, tol: Tolerance) -> np.ndarray:
    design = _prepare_measure_columns(states, effects)
    coeff, *_ = np.linalg.lstsq(design, target.reshape(-1), rcond=None)
    residual = max_abs(design @ coeff - target.reshape(-1))
    if residual > max(tol.atol, 1e-10):
        raise SpanningError(
            f"prepare-measure pairs do not span the target: residual {residual:.3e}"
        )
    return coeff.reshape(len(states), len(effects))


def random_channel(d_in: int, d_out: int, seed: int = 0) -> Channel:
    """Haar-random CPTP channel from a Stinespring isometry.

    The environment has dimension ``d_in * d_out``; the isometry is the first
    ``d_in`` columns of a Haar unitary on the output-plus-environment space,
    so the Kraus operators satisfy ``sum K†K = I`` exactly.
    """
    if not (1 <= d_in <= MAX_QUANTUM_DIM and 1 <= d_out <= MAX_QUANTUM_DIM):
        raise DimensionError(f"channel dimensions must lie in 1..{MAX_QUANTUM_DIM}")
    rng = np.random.default_rng(seed)
    env = d_in * d_out
    isometry = haar_unitary(d_out * env, rng)[:, :d_in]
    kraus = [isometry[e::env, :] for e in range(env)]
    return Channel(kraus)


def channel_to_process(ch: Channel, source: GptSystem, target: GptSystem,
                       atol: float = 1e-10) -> GptProcess:
    """Express a quantum channel in the systems' real coordinates.

    Completely positive maps preserve self-adjointness, so the coordinate
    matrix is real; a residual imaginary part above ``atol`` is an error.
    """
    if not (source.is_quantum and target.is_quantum):
        raise DimensionError("channel_to_process needs quantum systems")
    if ch.d_in != source.dim or ch.d_out != target.dim:
        raise DimensionError("channel dimensions do not match the systems")
    m = target.iso.conj().T @ ch.superop @ source.iso
    if max_abs(m.imag) > atol:
        raise ValueError("channel does not preserve self-adjointness")
    return GptProcess(source, target, m.real.copy())


def random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    """Trace-one positive operator from a normalized Ginibre product."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    """Subnormalized effect ``V† diag(u) V`` with Haar ``V`` and ``u in [0,1]``."""
    v = haar_unitary(d, rng)
    return v.conj().T @ np.diag(rng.uniform(0, 1, d)) @ v


def system_to_json(sys: GptSystem) -> dict:
    return {"kind": sys.kind, "dim": sys.dim, "seed": sys.seed}


def system_from_json(data: dict) -> GptSystem:
    try:
        return make_system(str(data["kind"]), int(data["dim"]), seed=int(data.get("seed", 0)))
    except KeyError as exc:
        raise ValueError(f"malformed system record: {exc}") from exc


def process_to_json(proc: GptProcess) -> dict:
    from .linalg import cmat_to_json

    return {
        "source": system_to_json(proc.source),
        "target": system_to_json(proc.target),
        "matrix": cmat_to_json(proc.matrix),
    }


def process_from_json(data: dict) -> GptProcess:
    from .linalg import cmat_from_json

    try:
        source = system_from_json(data["source"])
        target = system_from_json(data["target"])
        matrix = cmat_from_json(data["matrix"])
    except KeyError as exc:
        raise ValueError(f"malformed process record: {exc}") from exc
    if max_abs(matrix.imag) > 0:
        raise ValueError("process matrices are real")
    return GptProcess(source, target, matrix.real)
