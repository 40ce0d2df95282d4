"""Dense complex matrix helpers and real-linear subspace solving.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The space of
``n x n`` complex matrices is treated as a real vector space of dimension
``2 n**2`` with inner product ``<A, B> = Re tr(A^dagger B)``; antilinear maps
such as ``h -> q h^dagger q^-1`` are then ordinary real-linear maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError

RANK_TOL = 1e-9
ORTHO_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a 2-D complex128 array with finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ContractError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ContractError("matrix has non-finite entries")
    return m


def multiply(a, b) -> np.ndarray:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ContractError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def transpose(a) -> np.ndarray:
    return as_matrix(a).T.copy()


def conjugate(a) -> np.ndarray:
    return as_matrix(a).conj()


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real trace inner product ``Re tr(a^dagger b)``."""
    return float(np.real(np.vdot(a, b)))


def norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])) <= tol)


# -- realification ---------------------------------------------------------

def realify(m: np.ndarray) -> np.ndarray:
    """Flatten an ``n x n`` complex matrix to a real vector of length ``2 n**2``."""
    flat = np.asarray(m, dtype=np.complex128).ravel()
    return np.concatenate([flat.real, flat.imag])


def complexify(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`realify`."""
    v = np.asarray(v, dtype=np.float64)
    half = n * n
    return (v[:half] + 1j * v[half:]).reshape(n, n)


def realified_basis(n: int):
    """Yield the standard real basis ``E_ij, i E_ij`` in :func:`realify` order."""
    for unit in (1.0, 1.0j):
        for i in range(n):
            for j in range(n):
                e = np.zeros((n, n), dtype=np.complex128)
                e[i, j] = unit
                yield e


@dataclass(frozen=True)
class RealLinearMap:
    """A real-linear map on ``n x n`` complex matrices.

    ``apply`` takes one matrix and returns an array (any shape); the output
    is flattened and realified when the map is tabulated.
    """

    n: int
    apply: Callable[[np.ndarray], np.ndarray]

    @property
    def dim(self) -> int:
        return 2 * self.n * self.n

    def __call__(self, h: np.ndarray) -> np.ndarray:
        return np.asarray(self.apply(h), dtype=np.complex128)

    def matrix(self) -> np.ndarray:
        """Tabulate the map as a real matrix acting on realified inputs."""
        cols = [realify(self(e)) for e in realified_basis(self.n)]
        return np.stack(cols, axis=1)

    def check_linearity(self, rng: np.random.Generator | None = None,
                        trials: int = 3, tol: float = 1e-12) -> bool:
        rng = rng if rng is not None else np.random.default_rng(12345)
        n = self.n
        for _ in range(trials):
            x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            a, b = rng.standard_normal(2)
            lhs = self(a * x + b * y)
            rhs = a * self(x) + b * self(y)
            scale = max(1.0, np.linalg.norm(rhs), abs(a) * np.linalg.norm(self(x)),
                        abs(b) * np.linalg.norm(self(y)))
            if np.linalg.norm(lhs - rhs) > tol * scale:
                return False
        return True


def stack_maps(maps: Sequence[RealLinearMap]) -> RealLinearMap:
    """Combine maps on the same space into one whose kernel is the intersection."""
    if not maps:
        raise ContractError("need at least one map to stack")
    n = maps[0].n
    if any(m.n != n for m in maps):
        raise ContractError("maps act on different ambient sizes")

    def apply(h):
        return np.concatenate([np.ravel(m(h)) for m in maps])

    return RealLinearMap(n, apply)


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal real basis of a subspace of ``n x n`` complex matrices."""

    ambient_n: int
    vectors: tuple = field(default_factory=tuple)

    @property
    def real_dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def as_array(self) -> np.ndarray:
        """Basis as a ``(real_dim, 2 n**2)`` real array of realified vectors."""
        if not self.vectors:
            return np.zeros((0, 2 * self.ambient_n ** 2))
        return np.stack([realify(v) for v in self.vectors])

    def coefficients(self, h: np.ndarray) -> np.ndarray:
        return self.as_array() @ realify(h)

    def combine(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.real_dim,):
            raise ContractError("coefficient count does not match basis size")
        out = np.zeros((self.ambient_n, self.ambient_n), dtype=np.complex128)
        for c, v in zip(coeffs, self.vectors):
            out += c * v
        return out

    def project(self, h: np.ndarray) -> np.ndarray:
        if not self.vectors:
            return np.zeros((self.ambient_n, self.ambient_n), dtype=np.complex128)
        return self.combine(self.coefficients(h))

    def residual(self, h: np.ndarray) -> float:
        """Norm of the component of ``h`` orthogonal to the subspace."""
        return norm(h - self.project(h))

    def gram(self) -> np.ndarray:
        a = self.as_array()
        return a @ a.T


def kernel_basis(lmap: RealLinearMap, rtol: float = RANK_TOL,
                 check: bool = True) -> SubspaceBasis:
    """Orthonormal basis of ``{h : lmap(h) = 0}``.

    Singular values below ``rtol`` times the largest one count as zero.
    """
    if check and not lmap.check_linearity():
        raise ContractError("map failed the real-linearity probe")
    mat = lmap.matrix()
    n = lmap.n
    if mat.size == 0 or not np.any(mat):
        null = np.eye(lmap.dim)
    else:
        _, s, vt = np.linalg.svd(mat, full_matrices=True)
        rank = int(np.sum(s > rtol * s[0]))
        null = vt[rank:]
    vectors = tuple(complexify(v, n) for v in null)
    return SubspaceBasis(n, vectors)


def orthonormalize(vectors: Sequence[np.ndarray], drop_tol: float = RANK_TOL) -> SubspaceBasis:
    """Modified Gram-Schmidt with one re-orthogonalisation pass.

    Vectors whose residual falls below ``drop_tol`` of their input norm are
    dropped as linearly dependent.
    """
    vectors = [as_matrix(v) for v in vectors]
    if not vectors:
        raise ContractError("orthonormalize needs at least one vector to fix the ambient size")
    n = vectors[0].shape[0]
    if any(v.shape != (n, n) for v in vectors):
        raise ContractError("vectors have different ambient sizes")
    basis: list[np.ndarray] = []
    for v in vectors:
        size = norm(v)
        if size == 0.0:
            continue
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w = w - inner(b, w) * b
        r = norm(w)
        if r < drop_tol * size:
            continue
        basis.append(w / r)
    return SubspaceBasis(n, tuple(basis))


def span_residual(a: SubspaceBasis, b: SubspaceBasis) -> float:
    """Largest residual of a's vectors after projection onto b."""
    if a.real_dim == 0:
        return 0.0
    return max(b.residual(v) for v in a.vectors)


def same_span(a: SubspaceBasis, b: SubspaceBasis, tol: float = RANK_TOL) -> bool:
    return (a.real_dim == b.real_dim and span_residual(a, b) <= tol
            and span_residual(b, a) <= tol)
