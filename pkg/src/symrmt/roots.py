"""Restricted root data, eigenvalue Jacobians, the Cartan class table and observables.

Roots are integer functionals on the coordinates q of the maximal abelian
subalgebra: q_i - q_j and q_i + q_j are ordinary, q_i short, 2 q_i long.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np
from scipy.special import erf, gammainc, gammaln
from scipy.stats import chi2 as chi2_dist

from .errors import ContractError

FAMILIES = ("A", "B", "C", "D", "BC")
ROOT_CLASSES = ("ordinary", "short", "long")
CURVATURES = {"0": 0, "+": 1, "-": -1, 0: 0, 1: 1, -1: -1}


# -- root systems -----------------------------------------------------------

@dataclass(frozen=True)
class RootSystemData:
    """Positive restricted roots with their classes and (m_o, m_l, m_s).

    Type A of rank r lives on r + 1 coordinates; the other families on r.
    """

    family: str
    rank: int
    positive_roots: tuple
    classes: tuple
    multiplicities: tuple = (0, 0, 0)

    @property
    def n_coords(self) -> int:
        return self.rank + 1 if self.family == "A" else self.rank

    @property
    def roots(self) -> np.ndarray:
        if not self.positive_roots:
            return np.zeros((0, self.n_coords), dtype=int)
        return np.array(self.positive_roots, dtype=int)

    def counts(self) -> dict:
        return {c: sum(1 for k in self.classes if k == c) for c in ROOT_CLASSES}

    def root_multiplicities(self) -> np.ndarray:
        m_o, m_l, m_s = self.multiplicities
        table = {"ordinary": m_o, "long": m_l, "short": m_s}
        return np.array([table[c] for c in self.classes], dtype=float)

    @property
    def degree(self) -> int:
        """Homogeneity degree of J0: sum of multiplicities over positive roots."""
        return int(self.root_multiplicities().sum())

    def with_multiplicities(self, m_o: int = 0, m_l: int = 0, m_s: int = 0) -> "RootSystemData":
        mult = tuple(int(m) for m in (m_o, m_l, m_s))
        if any(m < 0 for m in mult):
            raise ContractError(f"multiplicities must be non-negative, got {mult}")
        return RootSystemData(self.family, self.rank, self.positive_roots, self.classes, mult)

    def describe(self) -> list[str]:
        out = []
        for root, cls in zip(self.positive_roots, self.classes):
            terms = []
            for i, c in enumerate(root):
                if c:
                    coef = {1: "+", -1: "-"}.get(c, f"{c:+d}")
                    terms.append(f"{coef}q{i + 1}")
            out.append(("".join(terms)).lstrip("+") + f" [{cls}]")
        return out


def _unit(n: int, i: int, c: int = 1) -> list[int]:
    v = [0] * n
    v[i] = c
    return v


def restricted_positive_roots(family: str, rank: int) -> RootSystemData:
    """Skeleton root data (multiplicities zero) for a family and rank."""
    if family not in FAMILIES:
        raise ContractError(f"unknown root family {family!r}; expected one of {FAMILIES}")
    if not isinstance(rank, (int, np.integer)) or rank < 1:
        raise ContractError(f"rank must be a positive integer, got {rank!r}")
    rank = int(rank)
    roots, classes = [], []
    if family == "A":
        n = rank + 1
        for i in range(n):
            for j in range(i + 1, n):
                v = _unit(n, i)
                v[j] = -1
                roots.append(tuple(v))
                classes.append("ordinary")
    else:
        n = rank
        for i in range(n):
            for j in range(i + 1, n):
                for s in (-1, 1):
                    v = _unit(n, i)
                    v[j] = s
                    roots.append(tuple(v))
                    classes.append("ordinary")
        if family in ("B", "BC"):
            for i in range(n):
                roots.append(tuple(_unit(n, i)))
                classes.append("short")
        if family in ("C", "BC"):
            for i in range(n):
                roots.append(tuple(_unit(n, i, 2)))
                classes.append("long")
    return RootSystemData(family, rank, tuple(roots), tuple(classes))


def expected_root_count(family: str, rank: int) -> int:
    r = rank
    return {"A": r * (r + 1) // 2, "D": r * (r - 1), "B": r * r, "C": r * r,
            "BC": r * (r + 1)}[family]


# -- Jacobians --------------------------------------------------------------

@dataclass(frozen=True)
class JacobianValue:
    value: float
    log_value: float


def _curvature(curvature) -> int:
    key = curvature.strip() if isinstance(curvature, str) else curvature
    if key not in CURVATURES:
        raise ContractError(f"curvature must be one of 0, +, -; got {curvature!r}")
    return CURVATURES[key]


def jacobian(curvature, q: Sequence[float], data: RootSystemData) -> JacobianValue:
    """Eigenvalue Jacobian prod_alpha f(q.alpha)^m_alpha, f = id, sin, sinh for 0, +, -.

    Absolute values are taken so the result is non-negative for odd
    multiplicities; the log is accumulated first, zero gives -inf.
    """
    kappa = _curvature(curvature)
    q = np.asarray(q, dtype=float).ravel()
    if q.size != data.n_coords:
        raise ContractError(
            f"q has {q.size} coordinates but {data.family} rank {data.rank} needs {data.n_coords}")
    mult = data.root_multiplicities()
    keep = mult > 0
    if not np.any(keep):
        return JacobianValue(1.0, 0.0)
    x = data.roots[keep] @ q
    f = {0: np.abs, 1: lambda t: np.abs(np.sin(t)), -1: lambda t: np.abs(np.sinh(t))}[kappa](x)
    with np.errstate(divide="ignore"):
        log_value = float(np.sum(mult[keep] * np.log(f)))
    with np.errstate(over="ignore"):
        value = float(np.exp(log_value))
    return JacobianValue(value, log_value)


def multiplicities_from_beta(beta: int, nu: int = 0) -> tuple[int, int, int]:
    """(m_o, m_l, m_s) = (beta, beta - 1, beta nu)."""
    if beta not in (1, 2, 4):
        raise ContractError(f"Dyson index must be 1, 2 or 4, got {beta!r}")
    if not isinstance(nu, (int, np.integer)) or nu < 0:
        raise ContractError(f"nu must be a non-negative integer, got {nu!r}")
    return beta, beta - 1, beta * int(nu)


# -- Cartan class table -----------------------------------------------------

_FORMULA = re.compile(r"^(\d*)nu$")


def _evaluate(formula: str, nu: int) -> int:
    if formula.isdigit():
        return int(formula)
    m = _FORMULA.match(formula)
    if not m:
        raise ContractError(f"cannot evaluate multiplicity {formula!r}")
    return int(m.group(1) or 1) * nu


@dataclass(frozen=True)
class CartanClassRecord:
    """One row of the Cartan class table; multiplicities may depend on nu."""

    label: str
    root_space: str
    root_family: object
    rank: str
    compact_coset: str
    noncompact_coset: str
    m_o: str
    m_l: str
    m_s: str
    beta: int | None = None
    ensemble_positive: str | None = None
    ensemble_zero: str | None = None
    ensemble_negative: str | None = None

    @property
    def multiplicity_formulas(self) -> tuple[str, str, str]:
        return self.m_o, self.m_l, self.m_s

    @property
    def depends_on_nu(self) -> bool:
        return any("nu" in f for f in self.multiplicity_formulas)

    def multiplicities(self, nu: int = 0) -> tuple[int, int, int]:
        if not isinstance(nu, (int, np.integer)) or nu < 0:
            raise ContractError(f"nu must be a non-negative integer, got {nu!r}")
        return tuple(_evaluate(f, int(nu)) for f in self.multiplicity_formulas)

    def family(self, nu: int = 0) -> str:
        """Restricted root family; for p, q families nu = p - q > 0 selects the first."""
        if isinstance(self.root_family, str):
            return self.root_family
        return self.root_family["p>q" if nu > 0 else "p=q"]

    def root_data(self, rank: int, nu: int = 0) -> RootSystemData:
        return restricted_positive_roots(self.family(nu), rank).with_multiplicities(
            *self.multiplicities(nu))

    def as_record(self) -> dict:
        return {k: getattr(self, k) for k in _RECORD_KEYS}


_RECORD_KEYS = ("label", "root_space", "root_family", "rank", "compact_coset",
                "noncompact_coset", "m_o", "m_l", "m_s", "beta", "ensemble_positive",
                "ensemble_zero", "ensemble_negative")


@dataclass(frozen=True)
class CartanTable:
    version: int
    records: tuple = field(default_factory=tuple)

    def labels(self) -> list[str]:
        return [r.label for r in self.records]


def table0_path():
    return resources.files("symrmt").joinpath("data/table0.json")


def parse_table0(text: str) -> CartanTable:
    data = json.loads(text)
    if data.get("version") != 1:
        raise ContractError(f"unsupported table version {data.get('version')!r}")
    recs = []
    for raw in data["records"]:
        if set(raw) != set(_RECORD_KEYS):
            raise ContractError(f"table record has fields {sorted(raw)}")
        recs.append(CartanClassRecord(**raw))
    return CartanTable(1, tuple(recs))


def dump_table0(table: CartanTable) -> str:
    payload = {"version": table.version, "records": [r.as_record() for r in table.records]}
    return json.dumps(payload, indent=2) + "\n"


@lru_cache(maxsize=1)
def load_table0() -> CartanTable:
    return parse_table0(table0_path().read_text(encoding="utf-8"))


def table0_lookup(label: str) -> CartanClassRecord:
    for r in load_table0().records:
        if r.label == label:
            return r
    raise ContractError(f"unknown Cartan class {label!r}; known: {load_table0().labels()}")


# -- nanotube observables ---------------------------------------------------

@dataclass(frozen=True)
class NanotubeObservables:
    mean_log_dg: float
    xi: float
    var_ratio: float

    def as_dict(self) -> dict:
        return {"mean_log_dg": self.mean_log_dg, "xi": self.xi, "var_ratio": self.var_ratio}


def nanotube_observables(s: float, l: float, gamma: float, m_l: float, m_s: float) -> NanotubeObservables:
    """<ln g> slope, localisation length and variance ratio for a wire of length s.

    With a = m_l + m_s/2: <ln g> = -(2 s / gamma) a, xi = l gamma / a,
    var(ln g) / |<ln g>| = 2 / a.  s is dimensionless, xi carries the units of l.
    """
    for name, v in (("s", s), ("l", l), ("gamma", gamma), ("m_l", m_l), ("m_s", m_s)):
        if not np.isfinite(v):
            raise ContractError(f"{name} must be finite, got {v!r}")
    if gamma <= 0:
        raise ContractError(f"gamma must be positive, got {gamma}")
    if m_l < 0 or m_s < 0:
        raise ContractError("multiplicities must be non-negative")
    a = m_l + m_s / 2.0
    if a <= 0:
        raise ContractError("m_l + m_s/2 must be positive; xi and the variance ratio are undefined")
    return NanotubeObservables(-(2.0 * s / gamma) * a, l * gamma / a, 2.0 / a)


# -- Monte Carlo check of the Jacobian ---------------------------------------

@dataclass(frozen=True)
class JacobianMCReport:
    entry: str
    class_label: str
    beta: int
    n_samples: int
    sigma: float
    edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    ratio: np.ndarray
    chi2: float
    dof: int
    p_value: float
    slope: float
    slope_stderr: float
    slope_range: tuple

    def flat_deviation(self, min_count: int = 500) -> float:
        """Largest |ratio - 1| over bins holding at least ``min_count`` samples."""
        sel = self.counts >= min_count
        return float(np.max(np.abs(self.ratio[sel] - 1.0))) if np.any(sel) else float("nan")

    def as_dict(self) -> dict:
        return {
            "entry": self.entry, "class": self.class_label, "beta": self.beta,
            "n_samples": self.n_samples, "sigma": self.sigma,
            "edges": self.edges.tolist(), "counts": self.counts.tolist(),
            "expected": self.expected.tolist(), "ratio": self.ratio.tolist(),
            "chi2": self.chi2, "dof": self.dof, "p_value": self.p_value,
            "slope": self.slope, "slope_stderr": self.slope_stderr,
            "slope_range": list(self.slope_range),
            "flat_deviation_500": self.flat_deviation(500),
        }


def _gauss_mass(a, b, sigma):
    # integral of exp(-d^2 / (4 sigma^2)) over [a, b]
    s = 2.0 * sigma
    return 0.5 * math.sqrt(math.pi) * s * (erf(b / s) - erf(a / s))


def _power_gauss_mass(a, b, beta, sigma):
    # integral of d^beta exp(-d^2 / (4 sigma^2)) over [a, b]
    s = 2.0 * sigma
    k = (beta + 1) / 2.0
    scale = math.exp(gammaln(k)) * s ** (beta + 1) / 2.0
    return scale * (gammainc(k, (b / s) ** 2) - gammainc(k, (a / s) ** 2))


MC_CHUNK = 8192


def sample_gaps(basis, sigma: float, n_samples: int, seed: int) -> np.ndarray:
    """|lambda_1 - lambda_2| for ``n_samples`` Gaussian 2x2 hermitean samples.

    Chunk c draws from substream (seed, c), so results depend only on the seed.
    """
    from .spectra import substream
    stack = np.stack(basis.vectors)
    out = []
    done, chunk = 0, 0
    while done < n_samples:
        m = min(MC_CHUNK, n_samples - done)
        x = sigma * substream(seed, chunk).standard_normal((m, basis.real_dim))
        h = np.tensordot(x, stack, axes=1)
        h = 0.5 * (h + np.conj(np.swapaxes(h, 1, 2)))
        w = np.linalg.eigvalsh(h)
        out.append(w[:, 1] - w[:, 0])
        done += m
        chunk += 1
    return np.concatenate(out)


def mc_jacobian_check(entry, n_samples: int = 100_000, seed: int = 0, sigma: float = 1.0,
                      n_bins: int = 40, slope_range: tuple = (0.02, 0.75),
                      n_slope_bins: int = 12) -> JacobianMCReport:
    """Monte Carlo test that the level-spacing law at N = 2 is J0 times Gaussians.

    For h = sum x_i B_i on an orthonormal hermitean basis, tr h^2 = sum x_i^2,
    so the eigenvalue density is J0(lambda) exp(-(l1^2 + l2^2) / (2 sigma^2)).
    Integrating out the centre leaves d^beta exp(-d^2 / (4 sigma^2)) for the
    gap d.  The histogram of d is divided by the Gaussian factor and compared
    with J0 = d^m_o of the entry's class.  ``slope_range`` bounds the
    small-gap regime in units of 2 sigma; the slope is a count-weighted
    log-log fit on logarithmic bins there.
    """
    from .cartan import solve_P
    from .linalg import norm
    from .spectra import GaussianSampler
    if n_samples < 1:
        raise ContractError("n_samples must be positive")
    spec = entry.build_n(2)
    basis = solve_P(spec)
    GaussianSampler(basis, sigma, seed)  # validates sigma and non-empty basis
    for b in basis.vectors:
        if norm(b - b.conj().T) > 1e-12:
            raise ContractError(f"entry {entry.key} has non-hermitean P; spectra are not real")
    if entry.expected_class is None:
        raise ContractError(f"entry {entry.key} has no Cartan class to compare with")
    record = table0_lookup(entry.expected_class)
    data = restricted_positive_roots("A", 1).with_multiplicities(*record.multiplicities(0))
    beta = data.multiplicities[0]

    d = sample_gaps(basis, sigma, n_samples, seed)
    s = 2.0 * sigma
    edges = np.linspace(0.0, 3.0 * s, n_bins + 1)
    counts, _ = np.histogram(d, bins=edges)
    total = _power_gauss_mass(0.0, np.inf, beta, sigma)
    pmass = np.array([_power_gauss_mass(a, b, beta, sigma) for a, b in zip(edges[:-1], edges[1:])])
    gmass = np.array([_gauss_mass(a, b, sigma) for a, b in zip(edges[:-1], edges[1:])])
    expected = n_samples * pmass / total
    # remainder after dividing out the Gaussian factor, against the bin average of J0
    remainder = counts / gmass
    model = pmass / gmass
    ratio = remainder / model
    sel = counts > 0
    ratio = ratio / (np.sum(counts[sel] * ratio[sel]) / np.sum(counts[sel]))
    ok = expected >= 5
    chi2 = float(np.sum((counts[ok] - expected[ok]) ** 2 / expected[ok]))
    dof = int(np.sum(ok)) - 1
    p_value = float(chi2_dist.sf(chi2, dof)) if dof > 0 else float("nan")

    lo, hi = slope_range
    ledges = np.geomspace(lo * s, hi * s, n_slope_bins + 1)
    lcounts, _ = np.histogram(d, bins=ledges)
    lg = np.array([_gauss_mass(a, b, sigma) for a, b in zip(ledges[:-1], ledges[1:])])
    use = lcounts > 0
    centers = np.sqrt(ledges[:-1] * ledges[1:])
    xs = np.log(centers[use])
    ys = np.log(lcounts[use] / lg[use])
    wts = lcounts[use].astype(float)
    if xs.size < 2:
        slope, stderr = float("nan"), float("nan")
    else:
        coef, cov = np.polyfit(xs, ys, 1, w=np.sqrt(wts), cov="unscaled")
        slope, stderr = float(coef[0]), float(np.sqrt(cov[0, 0]))

    return JacobianMCReport(entry.key, record.label, beta, n_samples, float(sigma), edges,
                            counts, expected, ratio, chi2, dof, p_value, slope, stderr,
                            tuple(slope_range))


__all__ = [
    "FAMILIES", "ROOT_CLASSES", "RootSystemData", "restricted_positive_roots",
    "expected_root_count", "JacobianValue", "jacobian", "multiplicities_from_beta",
    "CartanClassRecord", "CartanTable", "parse_table0", "dump_table0", "load_table0",
    "table0_path", "table0_lookup", "NanotubeObservables", "nanotube_observables",
    "JacobianMCReport", "sample_gaps", "mc_jacobian_check",
]
