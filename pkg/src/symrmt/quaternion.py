"""Complex quaternions and quaternion-real structure of complex matrices.

Units are represented by 2x2 complex matrices

    1,  e1 = -i sigma_2,  e2 = -i sigma_1,  e3 = +i sigma_3

so that e1^2 = e2^2 = e3^2 = e1 e2 e3 = -1.  A matrix of n x n quaternions is
stored as a 2n x 2n complex matrix whose consecutive 2x2 blocks are the
embedded entries; real quaternions embed as [[z, w], [-w*, z*]].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)

UNITS = (
    np.eye(2, dtype=np.complex128),
    -1j * SIGMA_2,
    -1j * SIGMA_1,
    1j * SIGMA_3,
)

QREAL_TOL = 1e-10


@dataclass(frozen=True)
class Quaternion:
    """q0 + e1 q1 + e2 q2 + e3 q3 with complex coefficients."""

    q0: complex = 0.0
    q1: complex = 0.0
    q2: complex = 0.0
    q3: complex = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        a = np.asarray(arr, dtype=np.complex128)
        return cls(complex(a[0]), complex(a[1]), complex(a[2]), complex(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.q0, self.q1, self.q2, self.q3], dtype=np.complex128)

    @property
    def scalar(self) -> complex:
        return self.q0

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.q3], dtype=np.complex128)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.as_array().imag) <= tol))

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return quat_multiply(self, other)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __neg__(self) -> "Quaternion":
        return Quaternion.from_array(-self.as_array())

    def isclose(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return bool(np.allclose(self.as_array(), other.as_array(), atol=tol, rtol=0.0))


ONE = Quaternion(1.0)
E1 = Quaternion(0.0, 1.0)
E2 = Quaternion(0.0, 0.0, 1.0)
E3 = Quaternion(0.0, 0.0, 0.0, 1.0)


def quat_multiply(a: Quaternion, b: Quaternion) -> Quaternion:
    a0, av = a.q0, a.vector
    b0, bv = b.q0, b.vector
    scalar = a0 * b0 - np.dot(av, bv)
    vec = a0 * bv + b0 * av + np.cross(av, bv)
    return Quaternion(complex(scalar), complex(vec[0]), complex(vec[1]), complex(vec[2]))


def dual(q: Quaternion) -> Quaternion:
    return Quaternion(q.q0, -q.q1, -q.q2, -q.q3)


def conj(q: Quaternion) -> Quaternion:
    c = np.conj(q.as_array())
    return Quaternion.from_array(c)


def herm_conj(q: Quaternion) -> Quaternion:
    return dual(conj(q))


def embed_2x2(q: Quaternion) -> np.ndarray:
    coeffs = q.as_array()
    return sum(c * u for c, u in zip(coeffs, UNITS))


def extract_2x2(m) -> Quaternion:
    m = np.asarray(m, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ContractError(f"extract_2x2 needs a 2x2 matrix, got {m.shape}")
    # tr(1) = 2 and tr(e_k e_k) = -2, the units being trace-orthogonal
    q0 = np.trace(m) / 2.0
    rest = [-np.trace(u @ m) / 2.0 for u in UNITS[1:]]
    return Quaternion(complex(q0), *(complex(r) for r in rest))


def symplectic_unit(n_quat: int) -> np.ndarray:
    """Block diagonal of [[0, 1], [-1, 0]] (that is -e1) repeated ``n_quat`` times."""
    return np.kron(np.eye(n_quat), -UNITS[1])


@dataclass(frozen=True)
class QuaternionMatrix:
    """``n x n`` matrix of complex quaternions, stored as an (n, n, 4) array."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.entries.imag) <= QREAL_TOL))

    @classmethod
    def from_complex(cls, m) -> "QuaternionMatrix":
        m = np.asarray(m, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ContractError("quaternion matrices need an even square complex matrix")
        n = m.shape[0] // 2
        out = np.empty((n, n, 4), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                out[i, j] = extract_2x2(m[2 * i:2 * i + 2, 2 * j:2 * j + 2]).as_array()
        return cls(out)

    def to_complex(self) -> np.ndarray:
        n = self.n
        m = np.zeros((2 * n, 2 * n), dtype=np.complex128)
        for i in range(n):
            for j in range(n):
                m[2 * i:2 * i + 2, 2 * j:2 * j + 2] = embed_2x2(Quaternion.from_array(self.entries[i, j]))
        return m

    def dual(self) -> "QuaternionMatrix":
        """Quaternion dual: transpose the index pattern and dualise each entry."""
        d = np.swapaxes(self.entries, 0, 1).copy()
        d[..., 1:] *= -1
        return QuaternionMatrix(d)


def matrix_dual(m) -> np.ndarray:
    """Quaternion dual of a 2n x 2n complex matrix, computed as -E1 m^T E1.

    Uses the entrywise identity -e1 q^T e1 = dual(q); ``E1`` is the block
    diagonal of e1.  The map is complex-linear.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise ContractError("matrix_dual needs an even square matrix")
    e1 = np.kron(np.eye(m.shape[0] // 2), UNITS[1])
    return -e1 @ m.T @ e1


def quaternion_real_residual(m) -> float:
    """Distance of ``m`` from the quaternion-real form, relative to its size."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError("quaternion-real test needs a square matrix")
    if m.shape[0] % 2:
        raise ContractError("quaternion-real test needs an even dimension")
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return 0.0
    u = m / scale
    z = u[0::2, 0::2]
    w = u[0::2, 1::2]
    r1 = np.abs(u[1::2, 1::2] - z.conj())
    r2 = np.abs(u[1::2, 0::2] + w.conj())
    return float(max(r1.max(), r2.max()))


def is_quaternion_real(m, tol: float = QREAL_TOL) -> bool:
    return quaternion_real_residual(m) <= tol
