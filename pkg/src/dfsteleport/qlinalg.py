"""Dense complex linear algebra for two-, four- and eight-dimensional quantum states.

States live in the computational product basis ordered binary-ascending with
spin-up mapped to bit 0, so for two qubits the rows/columns are
(up-up, up-down, down-up, down-down).  All structural checks use
``HERMITICITY_TOL`` (1e-12) and spectral checks use ``SPECTRAL_TOL`` (1e-10);
these are comfortable for double precision at the 8x8 sizes handled here.

Values are immutable after construction (the wrapped arrays are frozen), so
everything in this module is safe to share across parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

HERMITICITY_TOL = 1e-12
PSD_TOL = 1e-10
SPECTRAL_TOL = 1e-10
NORM_TOL = 1e-12

SUPPORTED_DIMS = (2, 4, 8)

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class UnsupportedDimensionError(ValueError):
    """Operand or result dimension outside the supported set {2, 4, 8}."""


class ContractViolationError(ValueError):
    """Input violates a documented precondition (non-Hermitian, non-PSD, ...)."""


def _as_complex_matrix(mat: np.ndarray | Iterable) -> np.ndarray:
    m = np.array(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolationError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractViolationError("matrix contains NaN or Inf entries")
    return m


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DensityOp:
    """Hermitian positive-semidefinite operator on 1-3 qubits.

    ``normalized`` marks unit trace; conditional states kept in the
    trace-equals-four-times-probability bookkeeping convention are stored with
    ``normalized=False``.
    """

    mat: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        m = _as_complex_matrix(self.mat)
        if m.shape[0] not in SUPPORTED_DIMS:
            raise UnsupportedDimensionError(
                f"density operator dimension {m.shape[0]} not in {SUPPORTED_DIMS}"
            )
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ContractViolationError("density operator is not Hermitian to 1e-12")
        tr = np.trace(m)
        if abs(tr.imag) > HERMITICITY_TOL * max(1.0, abs(tr.real)):
            raise ContractViolationError("density operator trace is not real")
        if self.normalized and abs(tr.real - 1.0) > 1e-9:
            raise ContractViolationError(f"state flagged normalized has trace {tr.real!r}")
        if np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))) < -PSD_TOL:
            raise ContractViolationError("density operator has eigenvalue below -1e-10")
        object.__setattr__(self, "mat", _freeze(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)


@dataclass(frozen=True)
class PureKet:
    """Normalized state vector in the computational basis."""

    amps: np.ndarray

    def __post_init__(self):
        a = np.array(self.amps, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(a)):
            raise ContractViolationError("ket contains NaN or Inf amplitudes")
        if abs(np.linalg.norm(a) - 1.0) > NORM_TOL:
            raise ContractViolationError("ket is not normalized to 1e-12")
        object.__setattr__(self, "amps", _freeze(a))

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def projector(self, normalized: bool = True) -> DensityOp:
        return DensityOp(np.outer(self.amps, self.amps.conj()), normalized=normalized)


@dataclass(frozen=True)
class BlochAngles:
    """Bloch-sphere angles of a single-qubit pure state.

    The amplitudes are ``alpha = cos(theta/2)`` on spin-up and
    ``beta = sin(theta/2) * exp(i*phi)`` on spin-down.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi):
            raise ContractViolationError(f"theta={self.theta!r} outside [0, pi]")
        if not (0.0 <= self.phi < 2.0 * np.pi):
            raise ContractViolationError(f"phi={self.phi!r} outside [0, 2*pi)")

    @property
    def alpha(self) -> complex:
        return complex(np.cos(self.theta / 2.0))

    @property
    def beta(self) -> complex:
        return complex(np.sin(self.theta / 2.0) * np.exp(1j * self.phi))

    def ket(self) -> PureKet:
        return PureKet(np.array([self.alpha, self.beta]))


def basis_ket(dim: int, index: int) -> PureKet:
    """Computational basis ket; index counts binary with spin-up = 0."""
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return PureKet(amps)


def tensor(a: DensityOp | PureKet, b: DensityOp | PureKet) -> DensityOp | PureKet:
    """Kronecker product of two states of the same kind (left factor varies slowest)."""
    if isinstance(a, DensityOp) and isinstance(b, DensityOp):
        if a.dim * b.dim not in SUPPORTED_DIMS:
            raise UnsupportedDimensionError(
                f"tensor product dimension {a.dim * b.dim} exceeds 8"
            )
        return DensityOp(np.kron(a.mat, b.mat), normalized=a.normalized and b.normalized)
    if isinstance(a, PureKet) and isinstance(b, PureKet):
        return PureKet(np.kron(a.amps, b.amps))
    raise TypeError("tensor operands must both be DensityOp or both PureKet")


def partial_trace(rho: DensityOp, keep: Iterable[int]) -> DensityOp:
    """Reduced state on the qubits in ``keep`` (0 = leftmost tensor factor)."""
    keep_list = sorted(set(int(k) for k in keep))
    n = rho.n_qubits
    if not keep_list:
        raise ValueError("keep set must be nonempty")
    if keep_list[0] < 0 or keep_list[-1] >= n:
        raise ValueError(f"keep={keep_list} outside qubit range 0..{n - 1}")
    traced = [q for q in range(n) if q not in keep_list]
    t = rho.mat.reshape((2,) * (2 * n))
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    d = 2 ** len(keep_list)
    return DensityOp(t.reshape(d, d), normalized=rho.normalized)


def eig_hermitian(m: np.ndarray | DensityOp) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    a = m.mat if isinstance(m, DensityOp) else _as_complex_matrix(m)
    if np.max(np.abs(a - a.conj().T)) > 1e-10:
        raise ContractViolationError("eig_hermitian requires a Hermitian matrix (tol 1e-10)")
    w, v = np.linalg.eigh(a)
    return w, v


def mat_sqrt_psd(m: np.ndarray | DensityOp) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in [-1e-8, 0) are clipped to zero; anything more negative is a
    contract violation.
    """
    a = m.mat if isinstance(m, DensityOp) else _as_complex_matrix(m)
    w, v = eig_hermitian(a)
    if w[0] < -1e-8:
        raise ContractViolationError(f"matrix has negative eigenvalue {w[0]!r}")
    root = v @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return 0.5 * (root + root.conj().T)
