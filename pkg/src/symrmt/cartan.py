"""Tangent space P and symmetric subalgebra K of a symmetry spec.

**P** is the joint eigenspace of the involutions with their P-eigenvalues,
**K** the joint fixed set.  When every involution has P-eigenvalue +1 the
two coincide (group type: **P** is itself an algebra).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .linalg import (RANK_TOL, RealLinearMap, SubspaceBasis, kernel_basis, orthonormalize,
                     realified_basis, realify, span_residual, stack_maps)
from .symmetry import EnsembleSpec, Involution, involutions

PAIR_TOL = 1e-9
CLOSURE_TOL = 1e-8


def _eigen_conditions(invs: list[Involution], signs: list[int], n: int) -> RealLinearMap:
    maps = [inv.eigenspace_map(s) for inv, s in zip(invs, signs)]
    if not maps:
        return RealLinearMap(n, lambda h: np.zeros(1, dtype=np.complex128))
    return stack_maps(maps)


def solve_P(spec: EnsembleSpec) -> SubspaceBasis:
    invs = involutions(spec)
    return kernel_basis(_eigen_conditions(invs, [t.p_eigenvalue for t in invs], spec.n),
                        check=False)


def solve_K(spec: EnsembleSpec) -> SubspaceBasis:
    invs = involutions(spec)
    return kernel_basis(_eigen_conditions(invs, [1] * len(invs), spec.n), check=False)


def solve_G(spec: EnsembleSpec) -> SubspaceBasis:
    """The restricted algebra K + P cut out without reference to P or K.

    Fixed set of each involution with P-eigenvalue +1 and of every product of
    two involutions with P-eigenvalue -1.
    """
    invs = involutions(spec)
    n = spec.n
    maps = [t.eigenspace_map(1) for t in invs if t.p_eigenvalue == 1]
    odd = [t for t in invs if t.p_eigenvalue == -1]
    for i in range(len(odd)):
        for j in range(i + 1, len(odd)):
            a, b = odd[i], odd[j]
            maps.append(RealLinearMap(n, lambda h, a=a, b=b: a(b(h)) - h))
    if not maps:
        maps = [RealLinearMap(n, lambda h: np.zeros(1, dtype=np.complex128))]
    return kernel_basis(stack_maps(maps), check=False)


def is_group_type(spec: EnsembleSpec) -> bool:
    """True when every involution fixes P, so that P = K is an algebra."""
    return all(t.p_eigenvalue == 1 for t in involutions(spec))


def project_P(spec: EnsembleSpec, h: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto P: product of (1 + s_i tau_i)/2 over the involutions.

    The involutions commute and are orthogonal for the real trace inner
    product, so the product is the orthogonal projector onto the joint
    eigenspace.
    """
    out = np.asarray(h, dtype=np.complex128)
    for t in involutions(spec):
        out = 0.5 * (out + t.p_eigenvalue * t(out))
    return out


def project_K(spec: EnsembleSpec, h: np.ndarray) -> np.ndarray:
    out = np.asarray(h, dtype=np.complex128)
    for t in involutions(spec):
        out = 0.5 * (out + t(out))
    return out


def _projector_trace(spec: EnsembleSpec, project) -> int:
    total = 0.0
    for e in realified_basis(spec.n):
        total += float(np.real(np.vdot(e, project(spec, e))))
    return int(round(total))


def subspace_dimensions(spec: EnsembleSpec) -> tuple[int, int]:
    """(dim P, dim K) as traces of the projectors; no basis is formed."""
    return _projector_trace(spec, project_P), _projector_trace(spec, project_K)


# -- symmetric pairs --------------------------------------------------------

def _stack(basis: SubspaceBasis) -> np.ndarray:
    n = basis.ambient_n
    if basis.real_dim == 0:
        return np.zeros((0, n, n), dtype=np.complex128)
    return np.stack(basis.vectors)


def _bracket_residual(x: SubspaceBasis, y: SubspaceBasis, target: SubspaceBasis) -> float:
    """Largest norm of the part of [x_i, y_j] outside ``target``."""
    if x.real_dim == 0 or y.real_dim == 0:
        return 0.0
    xs = _stack(x)
    ys = _stack(y)
    n = x.ambient_n
    t = target.as_array()
    worst = 0.0
    # chunk over x to keep memory bounded
    for start in range(0, len(xs), 32):
        xc = xs[start:start + 32]
        br = np.einsum("inm,jmk->ijnk", xc, ys) - np.einsum("jnm,imk->ijnk", ys, xc)
        flat = br.reshape(-1, n * n)
        v = np.concatenate([flat.real, flat.imag], axis=1)
        if t.shape[0]:
            v = v - (v @ t.T) @ t
        worst = max(worst, float(np.max(np.linalg.norm(v, axis=1))))
    return worst


@dataclass(frozen=True)
class SymmetricPair:
    spec: EnsembleSpec
    p_basis: SubspaceBasis
    k_basis: SubspaceBasis
    residuals: tuple
    group_type: bool = False

    @property
    def dims(self) -> tuple[int, int]:
        return self.p_basis.real_dim, self.k_basis.real_dim


@dataclass(frozen=True)
class PairReport:
    kk: float
    kp: float
    pp: float
    orthogonality: float
    direct_sum: float
    group_type: bool
    tol: float = PAIR_TOL

    @property
    def passed(self) -> bool:
        ok = max(self.kk, self.kp, self.pp, self.direct_sum) <= self.tol
        if not self.group_type:
            ok = ok and self.orthogonality <= self.tol
        return ok

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {"KK_in_K": self.kk, "KP_in_P": self.kp, "PP_in_K": self.pp,
                "P_perp_K": self.orthogonality, "direct_sum": self.direct_sum,
                "group_type": self.group_type, "passed": self.passed}


def solve(spec: EnsembleSpec) -> SymmetricPair:
    p = solve_P(spec)
    k = solve_K(spec)
    res = (_bracket_residual(k, k, k), _bracket_residual(k, p, p), _bracket_residual(p, p, k))
    return SymmetricPair(spec, p, k, res, is_group_type(spec))


def verify_symmetric_pair(pair: SymmetricPair, tol: float = PAIR_TOL,
                          check_direct_sum: bool = True) -> PairReport:
    """Bracket relations [K,K] in K, [K,P] in P, [P,P] in K, plus P perpendicular to K.

    For group-type specs P and K coincide, so orthogonality is reported but
    not required.  With ``check_direct_sum`` the span of P and K is compared
    to the independently computed restricted algebra.
    """
    p, k = pair.p_basis, pair.k_basis
    kk = _bracket_residual(k, k, k)
    kp = _bracket_residual(k, p, p)
    pp = _bracket_residual(p, p, k)
    if p.real_dim and k.real_dim:
        ortho = float(np.max(np.abs(p.as_array() @ k.as_array().T)))
    else:
        ortho = 0.0
    direct = 0.0
    if check_direct_sum:
        g = solve_G(pair.spec)
        vecs = list(p.vectors) + list(k.vectors)
        combined = orthonormalize(vecs) if vecs else SubspaceBasis(pair.spec.n, ())
        direct = max(span_residual(combined, g), span_residual(g, combined))
        if combined.real_dim != g.real_dim:
            direct = max(direct, 1.0)
    return PairReport(kk, kp, pp, ortho, direct, pair.group_type, tol)


def swapped(pair: SymmetricPair) -> SymmetricPair:
    """The pair with the roles of P and K exchanged (a negative control)."""
    return SymmetricPair(pair.spec, pair.k_basis, pair.p_basis, pair.residuals[::-1],
                         pair.group_type)


def weyl_dual(basis: SubspaceBasis) -> SubspaceBasis:
    """Multiply every basis vector by i; orthonormality is preserved."""
    return SubspaceBasis(basis.ambient_n, tuple(1j * v for v in basis.vectors))


def is_bracket_closed(basis: SubspaceBasis, tol: float = PAIR_TOL) -> float:
    """Residual of [B, B] outside span(B) + i span(B)."""
    ext = orthonormalize(list(basis.vectors) + [1j * v for v in basis.vectors]) \
        if basis.real_dim else basis
    return _bracket_residual(basis, basis, ext)


# -- structure predicates ---------------------------------------------------

@dataclass(frozen=True)
class StructureReport:
    max_residual: float
    dim: int
    expected_dim: int
    tol: float = 1e-10

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol and self.dim == self.expected_dim

    def __bool__(self) -> bool:
        return self.passed

    def as_dict(self) -> dict:
        return {"max_residual": self.max_residual, "dim": self.dim,
                "expected_dim": self.expected_dim, "passed": self.passed}


def structure_report(basis: SubspaceBasis, predicate, tol: float = 1e-10) -> StructureReport:
    """Check every basis vector against a block predicate and compare dimensions.

    Membership plus equal dimension means the basis spans exactly the set the
    predicate describes.
    """
    worst = 0.0
    for v in basis.vectors:
        worst = max(worst, predicate.residual(v))
    return StructureReport(worst, basis.real_dim, predicate.parameter_count(basis.ambient_n), tol)


# -- Killing form -----------------------------------------------------------

@dataclass(frozen=True)
class KillingForm:
    killing: np.ndarray
    trace: np.ndarray
    structure_constants: np.ndarray


def structure_constants(basis: SubspaceBasis, tol: float = CLOSURE_TOL) -> np.ndarray:
    """C[i, j, k] with [b_i, b_j] = sum_k C[i, j, k] b_k.

    Raises ContractError naming the first pair whose bracket leaves the span.
    """
    d = basis.real_dim
    if d == 0:
        raise ContractError("structure constants need a non-empty basis")
    arr = basis.as_array()
    xs = _stack(basis)
    c = np.zeros((d, d, d))
    for i in range(d):
        br = np.einsum("nm,jmk->jnk", xs[i], xs) - np.einsum("jnm,mk->jnk", xs, xs[i])
        vec = np.stack([realify(b) for b in br])
        coeff = vec @ arr.T
        resid = np.linalg.norm(vec - coeff @ arr, axis=1)
        bad = np.nonzero(resid > tol * max(1.0, float(np.max(np.linalg.norm(vec, axis=1)))))[0]
        if bad.size:
            raise ContractError(
                f"basis is not closed under brackets: [b_{i}, b_{int(bad[0])}] leaves the span "
                f"(residual {resid[bad[0]]:.3e})")
        c[i] = coeff
    return c


def killing_form(basis: SubspaceBasis) -> KillingForm:
    """g_ij = tr(ad_i ad_j) in the given real basis, plus the trace form Re tr(b_i b_j).

    The basis should span a Lie algebra, typically K + P.
    """
    c = structure_constants(basis)
    # (ad_i)_{k j} = C[i, j, k]
    ad = np.transpose(c, (0, 2, 1))
    g = np.einsum("iab,jba->ij", ad, ad)
    xs = _stack(basis)
    trace = np.real(np.einsum("inm,jmn->ij", xs, xs))
    return KillingForm((g + g.T) / 2, (trace + trace.T) / 2, c)


def combined_basis(pair: SymmetricPair) -> SubspaceBasis:
    """Orthonormal basis of K + P (P alone in the group-type case)."""
    if pair.group_type:
        return pair.p_basis
    return SubspaceBasis(pair.spec.n, tuple(pair.k_basis.vectors) + tuple(pair.p_basis.vectors))


__all__ = [
    "RANK_TOL", "SymmetricPair", "PairReport", "StructureReport", "KillingForm",
    "solve_P", "solve_K", "solve_G", "solve", "project_P", "project_K",
    "subspace_dimensions", "is_group_type", "verify_symmetric_pair", "swapped",
    "weyl_dual", "is_bracket_closed", "structure_report", "structure_constants",
    "killing_form", "combined_basis",
]
