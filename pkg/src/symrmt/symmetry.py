"""P/C/Q/K symmetry operators, ensemble specs and their involutions.

A complex matrix ``h`` has

* P-type symmetry if ``h = -p h p^-1``,
* C-type symmetry if ``h = eps_c c h^T c^-1``,
* Q-type symmetry if ``h = q h^dagger q^-1``,
* K-type symmetry if ``h = k h^* k^-1``,

with unitary p, c, q, k of order two.  Each symmetry is turned into a real
Lie-algebra automorphism ``tau`` of gl(N, C) (signs folded in so that tau
preserves brackets):

    tau_P(h) = p h p^-1          P-eigenvalue -1
    tau_C(h) = -c h^T c^-1       P-eigenvalue -eps_c
    tau_Q(h) = -q h^dagger q^-1  P-eigenvalue -1
    tau_K(h) = k h^* k^-1        P-eigenvalue +1

The ensemble subspace is the joint eigenspace with the listed eigenvalues and
the symmetric subalgebra is the joint fixed set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import SymmetryError
from .linalg import RealLinearMap, is_unitary

KINDS = ("P", "C", "Q", "K")
TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SymmetryOp:
    kind: str
    matrix: np.ndarray
    epsilon_c: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SymmetryError(f"unknown symmetry kind {self.kind!r}")
        m = np.array(self.matrix, dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.epsilon_c not in (1, -1):
            raise SymmetryError("epsilon_c must be +1 or -1")
        if self.kind != "C":
            object.__setattr__(self, "epsilon_c", 1)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        eps = f", eps_c={self.epsilon_c:+d}" if self.kind == "C" else ""
        return f"SymmetryOp({self.kind}, n={self.n}{eps})"


@dataclass(frozen=True)
class SignTable:
    eps_cp: int | None = None
    eps_pq: int | None = None
    eps_cq: int | None = None
    k_p_sign: int | None = None
    k_q_sign: int | None = None
    k_c_sign: int | None = None
    c_sym: int | None = None
    k_sym: int | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _sym_sign(m: np.ndarray, tol: float = TOL) -> int | None:
    if np.linalg.norm(m.T - m) <= tol:
        return 1
    if np.linalg.norm(m.T + m) <= tol:
        return -1
    return None


def validate(op: SymmetryOp) -> dict:
    """Check unitarity and the order-two condition of one symmetry operator.

    Returns the sign-table fragment the operator determines (``c_sym`` for
    C-type, ``k_sym`` for K-type, empty otherwise).
    """
    m = op.matrix
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SymmetryError(f"{op.kind} matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise SymmetryError(f"{op.kind} matrix has non-finite entries")
    n = m.shape[0]
    eye = np.eye(n)
    if not is_unitary(m, TOL):
        raise SymmetryError(f"{op.kind} matrix is not unitary")
    if op.kind == "P":
        if np.linalg.norm(m @ m - eye) > TOL:
            raise SymmetryError("p must satisfy p^2 = 1")
        return {}
    if op.kind == "Q":
        if _sym_sign(m) == -1:
            raise SymmetryError(
                "q must satisfy q^-1 q^dagger = +1; an antisymmetric q is excluded")
        if np.linalg.norm(m @ m - eye) > TOL or np.linalg.norm(m - m.conj().T) > TOL:
            raise SymmetryError("q must satisfy q^2 = 1 and q = q^dagger")
        return {}
    sign = _sym_sign(m)
    if sign is None:
        raise SymmetryError(
            f"{op.kind.lower()} must be symmetric or antisymmetric "
            f"({op.kind.lower()} {op.kind.lower()}^* = +-1)")
    return {"c_sym": sign} if op.kind == "C" else {"k_sym": sign}


def _pair_sign(lhs: np.ndarray, rhs: np.ndarray, tol: float = TOL) -> int | None:
    if np.linalg.norm(lhs - rhs) <= tol:
        return 1
    if np.linalg.norm(lhs + rhs) <= tol:
        return -1
    return None


# (name, required kinds, function returning (lhs, rhs) with lhs = sign * rhs)
_PAIR_RULES: tuple[tuple[str, str, str, Callable], ...] = (
    ("eps_cp", "C", "P", lambda c, p: (c, p @ c @ p.T)),
    ("eps_pq", "P", "Q", lambda p, q: (q, p @ q @ p.conj().T)),
    ("eps_cq", "C", "Q", lambda c, q: (q, c @ q.conj() @ c.conj().T)),
    ("k_p_sign", "K", "P", lambda k, p: (p, k @ p.conj() @ k.conj().T)),
    ("k_q_sign", "K", "Q", lambda k, q: (q, k @ q.conj() @ k.conj().T)),
    ("k_c_sign", "K", "C", lambda k, c: (c, k @ c.conj() @ k.T)),
)


@dataclass(frozen=True, eq=False)
class EnsembleSpec:
    """Ambient dimension plus at most one symmetry of each kind.

    Construction validates every operator and the pairwise commutativity
    constraints; the resulting signs are kept in ``signs``.
    """

    n: int
    ops: tuple = ()
    label: str = ""
    signs: SignTable = field(default=None, compare=False)

    def __post_init__(self):
        ops = tuple(sorted(self.ops, key=lambda o: KINDS.index(o.kind)))
        object.__setattr__(self, "ops", ops)
        if not isinstance(self.n, (int, np.integer)) or self.n <= 0 or self.n % 2:
            raise SymmetryError(f"ambient dimension must be a positive even integer, got {self.n}")
        kinds = [o.kind for o in ops]
        if len(set(kinds)) != len(kinds):
            raise SymmetryError("at most one symmetry of each kind is allowed")
        for o in ops:
            if o.n != self.n:
                raise SymmetryError(f"{o.kind} matrix has size {o.n}, spec has n={self.n}")
        object.__setattr__(self, "signs", check_commutativity(self))

    @property
    def kinds(self) -> str:
        return "".join(o.kind for o in self.ops)

    def get(self, kind: str) -> SymmetryOp | None:
        for o in self.ops:
            if o.kind == kind:
                return o
        return None

    @property
    def epsilon_c(self) -> int | None:
        c = self.get("C")
        return None if c is None else c.epsilon_c

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"EnsembleSpec{name}(n={self.n}, ops={list(self.ops)})"


def check_commutativity(spec: EnsembleSpec) -> SignTable:
    """Validate each operator and determine all pairwise commutation signs."""
    fragment: dict = {}
    mats = {}
    for o in spec.ops:
        fragment.update(validate(o))
        mats[o.kind] = o.matrix
    for name, a, b, rule in _PAIR_RULES:
        if a in mats and b in mats:
            lhs, rhs = rule(mats[a], mats[b])
            sign = _pair_sign(lhs, rhs)
            if sign is None:
                raise SymmetryError(
                    f"{a} and {b} symmetries do not commute: no sign satisfies the {name} constraint")
            fragment[name] = sign
    return SignTable(**fragment)


# -- involutions ------------------------------------------------------------

@dataclass(frozen=True)
class Involution:
    """Lie-algebra automorphism tau attached to one symmetry."""

    kind: str
    n: int
    apply: Callable[[np.ndarray], np.ndarray]
    p_eigenvalue: int
    antilinear: bool

    def __call__(self, h: np.ndarray) -> np.ndarray:
        return self.apply(np.asarray(h, dtype=np.complex128))

    def as_map(self) -> RealLinearMap:
        return RealLinearMap(self.n, self.apply)

    def eigenspace_map(self, sign: int) -> RealLinearMap:
        """Map whose kernel is the ``sign`` eigenspace of tau."""
        return RealLinearMap(self.n, lambda h: self.apply(h) - sign * h)


def involution(op: SymmetryOp) -> Involution:
    validate(op)
    m = op.matrix
    minv = m.conj().T
    n = op.n
    if op.kind == "P":
        return Involution("P", n, lambda h: m @ h @ minv, -1, False)
    if op.kind == "C":
        return Involution("C", n, lambda h: -(m @ h.T @ minv), -op.epsilon_c, False)
    if op.kind == "Q":
        return Involution("Q", n, lambda h: -(m @ h.conj().T @ minv), -1, True)
    return Involution("K", n, lambda h: m @ h.conj() @ minv, 1, True)


def involutions(spec: EnsembleSpec) -> list[Involution]:
    return [involution(o) for o in spec.ops]


# -- unitary equivalence ----------------------------------------------------

def transport_op(op: SymmetryOp, u: np.ndarray) -> SymmetryOp:
    m = op.matrix
    if op.kind in ("P", "Q"):
        new = u @ m @ u.conj().T
    else:
        new = u @ m @ u.T
    return SymmetryOp(op.kind, new, op.epsilon_c)


def unitary_transport(spec: EnsembleSpec, u) -> EnsembleSpec:
    """Spec of the ensemble ``u h u^dagger``: p' = u p u^dagger, c' = u c u^T, ..."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (spec.n, spec.n):
        raise SymmetryError(f"transport matrix must be {spec.n}x{spec.n}")
    if not is_unitary(u, TOL):
        raise SymmetryError("transport matrix is not unitary")
    ops = tuple(transport_op(o, u) for o in spec.ops)
    label = f"{spec.label} (transported)" if spec.label else ""
    return EnsembleSpec(spec.n, ops, label)


# -- fingerprints -----------------------------------------------------------

@dataclass(frozen=True)
class Fingerprint:
    """Conjugation-invariant summary of a spec.

    Equal fingerprints are necessary, not sufficient, for unitary equivalence.
    """

    n: int
    kinds: str
    epsilon_c: int | None
    signs: tuple
    p_signature: tuple | None
    q_signature: tuple | None
    dim_p: int
    dim_k: int

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "kinds": self.kinds,
            "epsilon_c": self.epsilon_c,
            "signs": dict(self.signs),
            "p_signature": list(self.p_signature) if self.p_signature else None,
            "q_signature": list(self.q_signature) if self.q_signature else None,
            "dim_P": self.dim_p,
            "dim_K": self.dim_k,
        }


def _signature(m: np.ndarray) -> tuple[int, int]:
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    return int(np.sum(w > 0)), int(np.sum(w < 0))


def fingerprint(spec: EnsembleSpec) -> Fingerprint:
    from .cartan import subspace_dimensions

    p = spec.get("P")
    q = spec.get("Q")
    dim_p, dim_k = subspace_dimensions(spec)
    signs = tuple(sorted((k, v) for k, v in spec.signs.as_dict().items() if v is not None))
    return Fingerprint(
        n=spec.n,
        kinds=spec.kinds,
        epsilon_c=spec.epsilon_c,
        signs=signs,
        p_signature=None if p is None else _signature(p.matrix),
        q_signature=None if q is None else _signature(q.matrix),
        dim_p=dim_p,
        dim_k=dim_k,
    )


# -- named forms and JSON ---------------------------------------------------

def _check_div(n: int, d: int, name: str):
    if n % d:
        raise SymmetryError(f"form {name!r} needs n divisible by {d}, got n={n}")


def _blocks2(n, a, b, c, d):
    h = n // 2
    m = np.zeros((n, n), dtype=np.complex128)
    eye = np.eye(h)
    m[:h, :h] = a * eye
    m[:h, h:] = b * eye
    m[h:, :h] = c * eye
    m[h:, h:] = d * eye
    return m


def form_identity(n):
    return np.eye(n, dtype=np.complex128)


def form_diag_pm(n):
    _check_div(n, 2, "diag_pm")
    return _blocks2(n, 1, 0, 0, -1)


def form_offdiag_sym(n):
    _check_div(n, 2, "offdiag_sym")
    return _blocks2(n, 0, 1, 1, 0)


def form_offdiag_antisym(n):
    _check_div(n, 2, "offdiag_antisym")
    return _blocks2(n, 0, 1, -1, 0)


def form_e1_blocks(n):
    _check_div(n, 2, "e1_blocks")
    return np.kron(np.eye(n // 2), np.array([[0, 1], [-1, 0]], dtype=np.complex128))


def _nested(n, inner, outer, name):
    _check_div(n, 4, name)
    return np.kron(np.asarray(outer, dtype=np.complex128), inner(n // 2))


def form_diag_pm_nested(n):
    return _nested(n, form_diag_pm, np.eye(2), "diag_pm_nested")


def form_offdiag_sym_nested(n):
    return _nested(n, form_offdiag_sym, np.eye(2), "offdiag_sym_nested")


def form_offdiag_antisym_nested(n):
    return _nested(n, form_offdiag_antisym, np.eye(2), "offdiag_antisym_nested")


def form_offdiag_antisym_crossed(n):
    return _nested(n, form_offdiag_antisym, [[0, 1], [1, 0]], "offdiag_antisym_crossed")


NAMED_FORMS: Mapping[str, Callable[[int], np.ndarray]] = {
    "identity": form_identity,
    "diag_pm": form_diag_pm,
    "offdiag_sym": form_offdiag_sym,
    "offdiag_antisym": form_offdiag_antisym,
    "e1_blocks": form_e1_blocks,
    "diag_pm_nested": form_diag_pm_nested,
    "offdiag_sym_nested": form_offdiag_sym_nested,
    "offdiag_antisym_nested": form_offdiag_antisym_nested,
    "offdiag_antisym_crossed": form_offdiag_antisym_crossed,
}


def named_form(name: str, n: int) -> np.ndarray:
    try:
        return NAMED_FORMS[name](n)
    except KeyError:
        raise SymmetryError(f"unknown named form {name!r}") from None


def spec_from_dict(data: Mapping) -> EnsembleSpec:
    """Build a spec from the JSON schema

    ``{"n": int, "symmetries": [{"kind": "P|C|Q|K", "form": name | "matrix":
    [[[re, im], ...], ...], "epsilon": +-1}, ...]}``.
    """
    try:
        n = data["n"]
        entries = data.get("symmetries", [])
    except (KeyError, TypeError, AttributeError) as exc:
        raise SymmetryError(f"malformed spec: {exc}") from None
    if not isinstance(n, int):
        raise SymmetryError("spec field 'n' must be an integer")
    ops = []
    for item in entries:
        if not isinstance(item, Mapping) or "kind" not in item:
            raise SymmetryError("each symmetry needs a 'kind'")
        if "form" in item:
            mat = named_form(item["form"], n)
        elif "matrix" in item:
            try:
                arr = np.asarray(item["matrix"], dtype=np.float64)
            except (TypeError, ValueError):
                raise SymmetryError("matrix must be a nested array of [re, im] pairs") from None
            if arr.ndim != 3 or arr.shape[2] != 2:
                raise SymmetryError("matrix must be a nested array of [re, im] pairs")
            mat = arr[..., 0] + 1j * arr[..., 1]
        else:
            raise SymmetryError("each symmetry needs either 'form' or 'matrix'")
        eps = item.get("epsilon", 1)
        if eps not in (1, -1):
            raise SymmetryError("epsilon must be +1 or -1")
        ops.append(SymmetryOp(item["kind"], mat, eps))
    return EnsembleSpec(n, tuple(ops), data.get("label", ""))


def spec_to_dict(spec: EnsembleSpec) -> dict:
    syms = []
    for o in spec.ops:
        m = o.matrix
        item = {"kind": o.kind,
                "matrix": np.stack([m.real, m.imag], axis=-1).tolist()}
        if o.kind == "C":
            item["epsilon"] = o.epsilon_c
        syms.append(item)
    out = {"n": spec.n, "symmetries": syms}
    if spec.label:
        out["label"] = spec.label
    return out


def load_spec(path) -> EnsembleSpec:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SymmetryError(f"spec file is not valid JSON: {exc}") from None
    return spec_from_dict(data)
