"""Catalog of the tabulated ensembles and their block-structure predicates.

Every entry stores a builder parametric in a half-size ``s``; the ambient
size is ``N = 2 s`` for entries drawn on a 2x2 block grid and ``N = 4 s``
where the table nests blocks or uses quaternion (2x2) sub-blocks inside the
chiral halves.

Structure predicates are written in a tiny language over a ``g x g`` grid of
equal square blocks.  Blocks are named ``a b / c d`` on a 2x2 grid, ``a`` on a
1x1 grid and by their two-digit row/column index (``"02"``) on a 4x4 grid.

    "0 b"            block b vanishes
    "c = -T b"       c equals minus the transpose of b
    "a = +H a"       a is hermitean
    "q a"            a is quaternion real
    "qi b"           b is i times a quaternion-real block

Operators: ``I`` identity, ``T`` transpose, ``C`` complex conjugate, ``H``
conjugate transpose, ``D`` quaternion dual.  Coefficients: ``+ - +i -i``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ContractError
from .linalg import RealLinearMap, kernel_basis
from .quaternion import matrix_dual
from .symmetry import EnsembleSpec, SymmetryOp, named_form

# -- predicate language -----------------------------------------------------

_OPS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "I": lambda m: m,
    "T": lambda m: m.T,
    "C": lambda m: m.conj(),
    "H": lambda m: m.conj().T,
    "D": matrix_dual,
}
_COEFFS = {"+": 1.0, "-": -1.0, "+i": 1j, "-i": -1j}
_NAMES2 = {"a": (0, 0), "b": (0, 1), "c": (1, 0), "d": (1, 1)}


def _block_index(name: str, grid: int) -> tuple[int, int]:
    if grid == 1 and name == "a":
        return (0, 0)
    if grid == 2 and name in _NAMES2:
        return _NAMES2[name]
    if grid == 4 and re.fullmatch(r"[0-3]{2}", name):
        return (int(name[0]), int(name[1]))
    raise ContractError(f"bad block name {name!r} for grid {grid}")


def _qreal_residual_map(m: np.ndarray) -> np.ndarray:
    return np.concatenate([
        (m[1::2, 1::2] - m[0::2, 0::2].conj()).ravel(),
        (m[1::2, 0::2] + m[0::2, 1::2].conj()).ravel(),
    ])


@dataclass(frozen=True)
class Constraint:
    kind: str  # "zero", "rel", "qreal"
    target: tuple
    coeff: complex = 1.0
    op: str = "I"
    source: tuple | None = None
    text: str = ""

    def residual_vector(self, blocks) -> np.ndarray:
        t = blocks(self.target)
        if self.kind == "zero":
            return t.ravel()
        if self.kind == "qreal":
            return _qreal_residual_map(t / self.coeff)
        return (t - self.coeff * _OPS[self.op](blocks(self.source))).ravel()


_REL = re.compile(r"^(\w+)\s*=\s*([+-]i?)\s*([ITCHD])\s+(\w+)$")


def parse_constraint(text: str, grid: int) -> Constraint:
    t = text.strip()
    if t.startswith("0 "):
        return Constraint("zero", _block_index(t[2:].strip(), grid), text=t)
    if t.startswith("q ") or t.startswith("qi "):
        head, name = t.split()
        return Constraint("qreal", _block_index(name, grid),
                          1j if head == "qi" else 1.0, text=t)
    m = _REL.match(t)
    if not m:
        raise ContractError(f"cannot parse constraint {text!r}")
    tgt, coeff, op, src = m.groups()
    return Constraint("rel", _block_index(tgt, grid), _COEFFS[coeff], op,
                      _block_index(src, grid), text=t)


@dataclass(frozen=True)
class BlockPredicate:
    """Block-zero pattern plus intra-block linear relations on a ``grid`` x ``grid`` layout."""

    grid: int
    constraints: tuple = ()

    @classmethod
    def parse(cls, grid: int, *texts: str) -> "BlockPredicate":
        return cls(grid, tuple(parse_constraint(t, grid) for t in texts))

    def _blocks(self, h: np.ndarray):
        n = h.shape[0]
        if n % self.grid:
            raise ContractError(f"size {n} is not divisible by grid {self.grid}")
        b = n // self.grid

        def get(idx):
            i, j = idx
            return h[i * b:(i + 1) * b, j * b:(j + 1) * b]

        return get

    def residual_vector(self, h: np.ndarray) -> np.ndarray:
        if not self.constraints:
            return np.zeros(0, dtype=np.complex128)
        blocks = self._blocks(np.asarray(h, dtype=np.complex128))
        return np.concatenate([c.residual_vector(blocks) for c in self.constraints])

    def residual(self, h: np.ndarray) -> float:
        """Largest violation, relative to the size of ``h``."""
        h = np.asarray(h, dtype=np.complex128)
        r = self.residual_vector(h)
        if r.size == 0:
            return 0.0
        scale = max(np.linalg.norm(h), 1e-300)
        return float(np.max(np.abs(r)) / scale)

    def as_map(self, n: int) -> RealLinearMap:
        return RealLinearMap(n, lambda h: np.concatenate(
            [np.zeros(1, dtype=np.complex128), self.residual_vector(h)]))

    def parameter_count(self, n: int) -> int:
        """Real dimension of the subspace cut out by the predicate at size ``n``."""
        return _parameter_count(self, n)

    def describe(self) -> str:
        return "; ".join(c.text for c in self.constraints) or "(free)"


@lru_cache(maxsize=None)
def _parameter_count(pred: BlockPredicate, n: int) -> int:
    return kernel_basis(pred.as_map(n), check=False).real_dim


# -- entries ----------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    """One table row (or one sign alternative of a row).

    ``id`` is the row label, ``alt`` the sign alternative ("+" = upper,
    "-" = lower, None when the row has none).
    """

    id: str
    alt: str | None
    kinds: str
    build_fn: Callable[[int], EnsembleSpec] = field(repr=False)
    p_predicate: BlockPredicate = field(repr=False)
    k_predicate: BlockPredicate = field(repr=False)
    expected_class: str | None = None
    size_factor: int = 2
    table: str = "main"
    flags: tuple = ()
    note: str = ""

    @property
    def key(self) -> str:
        return self.id if self.alt is None else f"{self.id}({self.alt})"

    def n_for(self, half_size: int) -> int:
        if not isinstance(half_size, (int, np.integer)) or half_size < 1:
            raise ContractError(f"half-size must be a positive integer, got {half_size}")
        return self.size_factor * half_size

    def half_size_for(self, n: int) -> int:
        if n <= 0 or n % self.size_factor:
            raise ContractError(
                f"entry {self.key} needs N divisible by {self.size_factor}, got N={n}")
        return n // self.size_factor

    def build(self, half_size: int) -> EnsembleSpec:
        return self.build_fn(self.n_for(half_size))

    def build_n(self, n: int) -> EnsembleSpec:
        self.half_size_for(n)
        return self.build_fn(n)

    @property
    def epsilon_c(self) -> int | None:
        return self.build(1).epsilon_c if "C" in self.kinds else None


def _spec(label, **ops):
    """Builder from named forms: keys p, c, q, k map to form names; eps is epsilon_c."""
    eps = ops.pop("eps", 1)

    def build(n):
        syms = []
        for kind in "PCQK":
            form = ops.get(kind.lower())
            if form is not None:
                syms.append(SymmetryOp(kind, named_form(form, n), eps if kind == "C" else 1))
        return EnsembleSpec(n, tuple(syms), label)

    return build


def _sg(s: int) -> str:
    return "+" if s > 0 else "-"


def _alt(s: int) -> str:
    return "+" if s > 0 else "-"


def _entries() -> list[CatalogEntry]:
    E = []
    P = BlockPredicate.parse

    def add(id_, alt, kinds, build, p, k, cls=None, factor=2, table="main", flags=(), note=""):
        label = id_ if alt is None else f"{id_}({alt})"
        E.append(CatalogEntry(id_, alt, kinds, build(label), p, k, cls, factor, table,
                              tuple(flags), note))

    def B(**ops):
        return lambda label: _spec(label, **ops)

    chiral_zero_p = ("0 a", "0 d")
    chiral_zero_k = ("0 b", "0 c")

    # no symmetry or a single symmetry
    add("1", None, "", B(), P(1), P(1), "Gin2", note="no symmetry; K coincides with P")
    add("2", None, "P", B(p="diag_pm"), P(2, *chiral_zero_p), P(2, *chiral_zero_k))
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        add("3", _alt(s), "C", B(c="identity", eps=s),
            P(1, f"a = {z}T a"), P(1, "a = -T a"))
        add("4", _alt(s), "C", B(c="offdiag_antisym", eps=s),
            P(2, f"d = {z}T a", f"b = {w}T b", f"c = {w}T c"),
            P(2, "d = -T a", "b = +T b", "c = +T c"))
    add("5", None, "Q", B(q="identity"), P(1, "a = +H a"), P(1, "a = -H a"), "A")
    add("6", None, "Q", B(q="diag_pm"),
        P(2, "a = +H a", "d = +H d", "c = -H b"),
        P(2, "a = -H a", "d = -H d", "c = +H b"))
    add("7", None, "K", B(k="identity"), P(1, "a = +C a"), P(1, "a = +C a"), "Gin1",
        note="group type: K coincides with P")
    add("8", None, "K", B(k="e1_blocks"), P(1, "q a"), P(1, "q a"), "Gin4",
        note="group type: K coincides with P; quaternion real")

    # PC
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        add("9", _alt(s), "PC", B(p="diag_pm", c="identity", eps=s),
            P(2, *chiral_zero_p, f"c = {z}T b"),
            P(2, *chiral_zero_k, "a = -T a", "d = -T d"))
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        zeros_p = [f"0 {i}{j}" for i in range(4) for j in range(4) if (i < 2) == (j < 2)]
        zeros_k = [f"0 {i}{j}" for i in range(4) for j in range(4) if (i < 2) != (j < 2)]
        add("10", _alt(s), "PC", B(p="diag_pm", c="offdiag_antisym_nested", eps=s),
            P(4, *zeros_p, f"20 = {z}T 13", f"21 = {w}T 03", f"30 = {w}T 12", f"31 = {z}T 02"),
            P(4, *zeros_k, "11 = -T 00", "01 = +T 01", "10 = +T 10",
              "33 = -T 22", "23 = +T 23", "32 = +T 32"),
            factor=4)
    for s in (1, -1):
        z = _sg(s)
        add("11", _alt(s), "PC", B(p="diag_pm", c="offdiag_sym", eps=s),
            P(2, *chiral_zero_p, f"b = {z}T b", f"c = {z}T c"),
            P(2, *chiral_zero_k, "d = -T a"),
            note="equivalently c = offdiag_antisym with the opposite epsilon_c")

    # PQ
    for s in (1, -1):
        z = _sg(s)
        add("12", _alt(s), "PQ", B(p="diag_pm", q="diag_pm" if s < 0 else "identity"),
            P(2, *chiral_zero_p, f"c = {z}H b"),
            P(2, *chiral_zero_k, "a = -H a", "d = -H d"),
            "AIII" if s > 0 else None)
    add("13", None, "PQ", B(p="diag_pm", q="offdiag_sym"),
        P(2, *chiral_zero_p, "b = +H b", "c = +H c"),
        P(2, *chiral_zero_k, "d = -H a"))

    # PK
    for s in (1, -1):
        z = _sg(s)
        add("14", _alt(s), "PK", B(p="diag_pm", k="identity" if s > 0 else "diag_pm"),
            P(2, *chiral_zero_p, f"b = {z}C b", f"c = {z}C c"),
            P(2, *chiral_zero_k, "a = +C a", "d = +C d"))
    add("15", None, "PK", B(p="diag_pm", k="e1_blocks"),
        P(2, *chiral_zero_p, "q b", "q c"),
        P(2, *chiral_zero_k, "q a", "q d"), factor=4)
    for s in (1, -1):
        z = _sg(s)
        add("16", _alt(s), "PK", B(p="diag_pm", k="offdiag_sym" if s > 0 else "offdiag_antisym"),
            P(2, *chiral_zero_p, f"c = {z}C b"),
            P(2, *chiral_zero_k, "d = +C a"))

    # QC
    for s in (1, -1):
        z = _sg(s)
        add("17", _alt(s), "QC", B(q="identity", c="identity", eps=s),
            P(1, f"a = {z}C a", f"a = {z}T a"),
            P(1, "a = +C a", "a = -T a"),
            "AI" if s > 0 else "D")
    add("18a", None, "QC", B(q="identity", c="e1_blocks", eps=1),
        P(1, "q a", "a = +H a"), P(1, "q a", "a = -H a"), "AII")
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        add("18b", _alt(s), "QC",
            B(q="identity", c="offdiag_sym" if s > 0 else "offdiag_antisym", eps=-1),
            P(2, "a = +H a", f"c = {w}C b", "d = -C a", f"b = {w}T b"),
            P(2, "a = -H a", "c = -H b", "d = -T a", f"b = {w}T b"),
            "D" if s > 0 else "C")
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        k19 = P(2, "a = +C a", "a = -T a", "b = -C b", "c = +H b", "d = +C d", "d = -T d")
        add("19", _alt(s), "QC", B(q="diag_pm", c="identity", eps=s),
            P(2, f"a = {z}C a", f"a = {z}T a", f"c = {z}T b", f"b = {w}C b",
              f"d = {z}C d", f"d = {z}T d"), k19)
        add("19'", _alt(s), "QC", B(q="diag_pm", c="diag_pm", eps=s),
            P(2, f"a = {z}C a", f"a = {z}T a", f"c = {w}T b", f"b = {z}C b",
              f"d = {z}C d", f"d = {z}T d"),
            P(2, "a = +C a", "a = -T a", "b = +C b", "c = +T b", "d = +C d", "d = -T d"),
            table="equivalent-19")
    add("19+", None, "QC", B(q="offdiag_sym", c="identity", eps=1),
        P(2, "a = +T a", "b = +H b", "c = +C b", "d = +C a"),
        P(2, "a = -T a", "b = -H b", "c = +C b", "d = +C a"), table="equivalent-19")
    add("19-", None, "QC", B(q="offdiag_sym", c="identity", eps=-1),
        P(2, "a = -T a", "b = +H b", "c = -C b", "d = -C a"),
        P(2, "a = -T a", "b = -H b", "c = +C b", "d = +C a"), table="equivalent-19")
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        add("19'" + _alt(s), None, "QC", B(q="offdiag_sym", c="offdiag_sym", eps=s),
            P(2, f"a = {z}C a", f"d = {z}T a", f"b = {z}C b", f"b = {z}T b",
              f"c = {z}C c", f"c = {z}T c"),
            P(2, "a = +C a", "d = -T a", "b = +C b", "b = -T b", "c = +C c", "c = -T c"),
            table="equivalent-19")

    # 20a / 20b: self-dual and anti-self-dual
    k20 = P(2, "q a", "q d", "a = -D a", "d = -D d", "qi b", "c = -D b")
    add("20a", None, "QC", B(q="diag_pm", c="e1_blocks", eps=1),
        P(2, "q a", "q d", "a = +D a", "d = +D d", "qi b", "c = +D b"), k20, factor=4)
    add("20b", None, "QC", B(q="diag_pm", c="e1_blocks", eps=-1),
        P(2, "qi a", "qi d", "a = -D a", "d = -D d", "q b", "c = -D b"), k20, factor=4)

    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        cform = "offdiag_sym" if s > 0 else "offdiag_antisym"
        k21 = P(2, "a = -H a", "d = +C a", f"c = {w}C b", f"b = {w}T b")
        add("21a", _alt(s), "QC", B(q="diag_pm", c=cform, eps=1),
            P(2, "a = +H a", "d = +C a", f"c = {w}C b", f"b = {z}T b"), k21)
        add("21b", _alt(s), "QC", B(q="diag_pm", c=cform, eps=-1),
            P(2, "a = +H a", "d = -C a", f"c = {z}C b", f"b = {w}T b"), k21)
    k21p = P(2, "a = -T a", "b = -H b", "c = -C b", "d = +C a")
    add("21a+", None, "QC", B(q="offdiag_sym", c="diag_pm", eps=1),
        P(2, "a = +T a", "b = +H b", "c = -C b", "d = +C a"), k21p, table="equivalent-21")
    add("21b+", None, "QC", B(q="offdiag_sym", c="diag_pm", eps=-1),
        P(2, "a = -T a", "b = +H b", "c = +C b", "d = -C a"), k21p, table="equivalent-21")
    k21m = P(2, "a = +C a", "d = -T a", "b = -C b", "b = +T b", "c = -C c", "c = +T c")
    add("21a-", None, "QC", B(q="offdiag_sym", c="offdiag_antisym", eps=1),
        P(2, "a = +C a", "d = +T a", "b = -C b", "b = -T b", "c = -C c", "c = -T c"),
        k21m, table="equivalent-21")
    add("21b-", None, "QC", B(q="offdiag_sym", c="offdiag_antisym", eps=-1),
        P(2, "a = -C a", "d = -T a", "b = +C b", "b = +T b", "c = +C c", "c = +T c"),
        k21m, table="equivalent-21")

    # PQC
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        add("22", _alt(s), "PQC", B(p="diag_pm", q="identity", c="identity", eps=s),
            P(2, *chiral_zero_p, f"c = {z}T b", f"b = {z}C b"),
            P(2, *chiral_zero_k, "a = +C a", "a = -T a", "d = +C d", "d = -T d"), "BDI")
        add("23", _alt(s), "PQC", B(p="diag_pm", q="identity", c="e1_blocks", eps=s),
            P(2, *chiral_zero_p, "q b" if s > 0 else "qi b", f"c = {z}D b"),
            P(2, *chiral_zero_k, "q a", "q d", "a = -D a", "d = -D d"),
            "CII" if s > 0 else None, factor=4)
        add("24", _alt(s), "PQC", B(p="diag_pm", q="identity", c="offdiag_sym", eps=s),
            P(2, *chiral_zero_p, f"c = {z}C b", f"b = {z}T b"),
            P(2, *chiral_zero_k, "a = -H a", "d = +C a"), "CI" if s > 0 else "DIII")
        add("25", _alt(s), "PQC", B(p="diag_pm", q="offdiag_sym", c="identity", eps=s),
            P(2, *chiral_zero_p, f"c = {z}C b", "b = +H b"),
            P(2, *chiral_zero_k, "a = -T a", "d = +C a"))

    zeros4_p = [f"0 {i}{j}" for i in range(4) for j in range(4) if (i < 2) == (j < 2)]
    zeros4_k = [f"0 {i}{j}" for i in range(4) for j in range(4) if (i < 2) != (j < 2)]
    for s in (1, -1):
        z, w = _sg(s), _sg(-s)
        add("26", _alt(s), "PQC",
            B(p="diag_pm", q="offdiag_sym", c="offdiag_antisym_nested", eps=s),
            P(4, *zeros4_p, "02 = +H 02", "13 = +H 13", "12 = +H 03",
              f"20 = {z}T 13", f"21 = {w}T 03", f"30 = {w}C 03", f"31 = {z}T 02"),
            P(4, *zeros4_k, "11 = -T 00", "01 = +T 01", "10 = +T 10",
              "22 = -H 00", "23 = -H 10", "32 = -H 01", "33 = -H 11"),
            factor=4)
        add("27", _alt(s), "PQC", B(p="diag_pm", q="offdiag_sym", c="offdiag_sym", eps=s),
            P(2, *chiral_zero_p, f"b = {z}C b", f"b = {z}T b", f"c = {z}C c", f"c = {z}T c"),
            P(2, *chiral_zero_k, "a = +C a", "d = -T a"))
        add("28", _alt(s), "PQC",
            B(p="diag_pm", q="offdiag_sym", c="offdiag_antisym_crossed", eps=s),
            P(4, *zeros4_p, "02 = +H 02", f"03 = {w}T 03", f"12 = {w}C 03", f"13 = {z}C 02",
              "20 = +H 20", f"21 = {w}T 21", f"30 = {w}C 21", f"31 = {z}C 20"),
            P(4, *zeros4_k, "11 = +C 00", "10 = -C 01",
              "22 = -H 00", "23 = -H 10", "32 = -H 01", "33 = -H 11"),
            factor=4)
        add("29", _alt(s), "PQC",
            B(p="diag_pm", q="diag_pm_nested", c="offdiag_sym_nested", eps=s),
            P(4, *zeros4_p, f"12 = {w}C 03", f"13 = {z}C 02",
              "20 = +H 02", f"21 = {z}T 03", "30 = -H 03", f"31 = {z}T 02"),
            P(4, *zeros4_k, "00 = -H 00", "01 = -T 01", "10 = -C 01", "11 = +C 00",
              "22 = -H 22", "23 = -T 23", "32 = -C 23", "33 = +C 22"),
            factor=4, flags=("unverified-against-prior-work",))
        add("30", _alt(s), "PQC",
            B(p="diag_pm", q="diag_pm_nested", c="offdiag_antisym_nested", eps=s),
            P(4, *zeros4_p, f"12 = {z}C 03", f"13 = {z}C 02",
              "20 = +H 02", f"21 = {w}T 03", "30 = -H 03", f"31 = {z}T 02"),
            P(4, *zeros4_k, "00 = -H 00", "01 = +T 01", "10 = +C 01", "11 = +C 00",
              "22 = -H 22", "23 = +T 23", "32 = +C 23", "33 = +C 22"),
            factor=4, flags=("unverified-against-prior-work",))
    return E


@lru_cache(maxsize=1)
def _catalog() -> tuple[CatalogEntry, ...]:
    return tuple(_entries())


def catalog() -> list[CatalogEntry]:
    return list(_catalog())


def get_entry(key: str, alt: str | None = None) -> CatalogEntry:
    """Look up an entry by key (``"24(+)"``) or by id plus sign alternative.

    A bare id of a row that has sign alternatives returns the upper sign.
    """
    key = key.strip()
    m = re.fullmatch(r"(.+)\(([+-])\)", key)
    if m:
        key, alt = m.group(1), m.group(2)
    matches = [e for e in _catalog() if e.id == key]
    if not matches:
        raise ContractError(f"unknown catalog entry {key!r}")
    if alt is None:
        return next((e for e in matches if e.alt in (None, "+")), matches[0])
    for e in matches:
        if e.alt == alt:
            return e
    raise ContractError(f"entry {key!r} has no sign alternative {alt!r}")


def dual_entry(entry: CatalogEntry) -> CatalogEntry | None:
    """The same row with the opposite epsilon_c (duality link), if tabulated."""
    if entry.epsilon_c is None:
        return None
    for e in _catalog():
        if e is entry or e.id != entry.id:
            continue
        if e.epsilon_c == -entry.epsilon_c and e.build(1).signs.c_sym == entry.build(1).signs.c_sym:
            return e
    return None
