"""Gaussian sampling from P, spectra, spectral-symmetry checks and summaries."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cartan import project_P, solve_P
from .eigen import eigenvalues_general
from .errors import ContractError, NumericalFailure
from .linalg import SubspaceBasis, complexify
from .symmetry import EnsembleSpec

PAIR_TOL = 1e-7
BASIS_ROUTE_MAX_N = 16


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of a run seeded with ``seed``."""
    if seed < 0 or index < 0:
        raise ContractError("seed and sample index must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma < 0:
        raise ContractError(f"sigma must be a finite non-negative number, got {sigma}")
    return sigma


@dataclass(frozen=True)
class GaussianSampler:
    """h = sum_i x_i B_i with independent x_i ~ N(0, sigma^2) on an orthonormal basis."""

    basis: SubspaceBasis
    sigma: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sigma", _check_sigma(self.sigma))
        if self.basis.real_dim == 0:
            raise ContractError("cannot sample from an empty basis")

    @property
    def n(self) -> int:
        return self.basis.ambient_n

    def coefficients(self, index: int) -> np.ndarray:
        return self.sigma * substream(self.seed, index).standard_normal(self.basis.real_dim)

    def sample(self, index: int = 0) -> np.ndarray:
        return np.tensordot(self.coefficients(index), _stacked(self.basis), axes=1)


def _stacked(basis: SubspaceBasis) -> np.ndarray:
    return np.stack(basis.vectors)


@dataclass(frozen=True)
class ProjectedGaussianSampler:
    """Same law as :class:`GaussianSampler` on P, without forming a basis.

    An isotropic Gaussian on the realified ambient space (variance sigma^2
    per real coordinate) is projected orthogonally onto P; the image has
    independent N(0, sigma^2) coordinates on any orthonormal basis of P.
    """

    spec: EnsembleSpec
    sigma: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sigma", _check_sigma(self.sigma))

    @property
    def n(self) -> int:
        return self.spec.n

    def sample(self, index: int = 0) -> np.ndarray:
        n = self.spec.n
        g = self.sigma * substream(self.seed, index).standard_normal(2 * n * n)
        return project_P(self.spec, complexify(g, n))


def sampler_for(spec: EnsembleSpec, sigma: float | None = None, seed: int = 0):
    """Basis sampler for small N, projected sampler otherwise; sigma defaults to 1/sqrt(N)."""
    sigma = 1.0 / np.sqrt(spec.n) if sigma is None else sigma
    if spec.n <= BASIS_ROUTE_MAX_N:
        basis = solve_P(spec)
        if basis.real_dim == 0:
            raise ContractError(f"P is empty for this spec at N={spec.n}; nothing to sample")
        return GaussianSampler(basis, sigma, seed)
    return ProjectedGaussianSampler(spec, sigma, seed)


def sample(sampler, index: int = 0) -> np.ndarray:
    return sampler.sample(index)


# -- spectra ----------------------------------------------------------------

def spectrum(h, check: bool = True) -> np.ndarray:
    """Eigenvalues of ``h`` with trace and determinant consistency checks."""
    h = np.asarray(h, dtype=np.complex128)
    w = eigenvalues_general(h)
    if check and w.size:
        n = h.shape[0]
        hn = float(np.linalg.norm(h))
        if abs(np.sum(w) - np.trace(h)) > 1e-8 * n * max(hn, 1e-300) and hn > 0:
            raise NumericalFailure("eigenvalue sum disagrees with the trace")
        scale = float(np.max(np.abs(w)))
        if scale > 0:
            lhs = np.prod(w / scale)
            rhs = np.linalg.det(h / scale)
            if abs(lhs - rhs) > 1e-6 * n:
                raise NumericalFailure("eigenvalue product disagrees with the determinant")
    return w


def match_multisets(a: np.ndarray, b: np.ndarray, tol: float | None = None) -> float:
    """Largest distance in a pairing of two equal-size multisets.

    Greedy nearest-neighbour pairing first; when its worst distance exceeds
    ``tol`` an optimal assignment (on distances) refines it.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ContractError("multisets differ in size")
    if a.size == 0:
        return 0.0
    dist = np.abs(a[:, None] - b[None, :])
    free = np.ones(b.size, dtype=bool)
    worst = 0.0
    for i in np.argsort(np.min(dist, axis=1)):
        j = int(np.argmin(np.where(free, dist[i], np.inf)))
        free[j] = False
        worst = max(worst, float(dist[i, j]))
    if tol is not None and worst > tol:
        rows, cols = linear_sum_assignment(dist)
        worst = min(worst, float(np.max(dist[rows, cols])))
    return worst


@dataclass(frozen=True)
class SymmetryCheck:
    kind: str
    transform: str
    max_distance: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_distance <= self.tolerance

    def as_dict(self) -> dict:
        return {"kind": self.kind, "transform": self.transform,
                "max_distance": self.max_distance, "tolerance": self.tolerance,
                "passed": self.passed}


def spectral_transforms(spec: EnsembleSpec) -> list[tuple[str, str, callable]]:
    out = []
    for o in spec.ops:
        if o.kind == "P":
            out.append(("P", "-lambda", lambda w: -w))
        elif o.kind == "C":
            eps = o.epsilon_c
            out.append(("C", "+lambda" if eps > 0 else "-lambda", lambda w, e=eps: e * w))
        else:
            out.append((o.kind, "conj(lambda)", np.conj))
    return out


def spectral_symmetry_check(spec: EnsembleSpec, eigenvalues, tol: float = PAIR_TOL) -> list[SymmetryCheck]:
    """Closure of the spectrum under the maps implied by each symmetry.

    Distances are judged against ``tol`` times max(1, max |lambda|).
    """
    w = np.asarray(eigenvalues, dtype=np.complex128)
    if w.size != spec.n:
        raise ContractError(f"expected {spec.n} eigenvalues, got {w.size}")
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    t = tol * scale
    return [SymmetryCheck(kind, name, match_multisets(w, f(w), t), t)
            for kind, name, f in spectral_transforms(spec)]


# -- summaries --------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumSummary:
    n_samples: int
    n_eigenvalues: int
    support: float
    radial_edges: np.ndarray
    radial_counts: np.ndarray
    real_count: int
    real_edges: np.ndarray
    real_counts: np.ndarray
    spacings: np.ndarray

    @property
    def real_fraction(self) -> float:
        return self.real_count / self.n_eigenvalues if self.n_eigenvalues else 0.0

    def nonempty_radial_bins(self) -> list[tuple[float, float, int]]:
        e, c = self.radial_edges, self.radial_counts
        return [(float(e[i]), float(e[i + 1]), int(c[i])) for i in range(len(c)) if c[i]]

    def as_dict(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "n_eigenvalues": self.n_eigenvalues,
            "support": self.support,
            "radial_histogram": {"edges": self.radial_edges.tolist(),
                                 "counts": self.radial_counts.tolist()},
            "real_count": self.real_count,
            "real_fraction": self.real_fraction,
            "real_axis_histogram": {"edges": self.real_edges.tolist(),
                                    "counts": self.real_counts.tolist()},
            "mean_spacing": float(np.mean(self.spacings)) if self.spacings.size else None,
            "n_spacings": int(self.spacings.size),
        }


def _nn_spacings(w: np.ndarray) -> np.ndarray:
    if w.size < 2:
        return np.zeros(0)
    d = np.abs(w[:, None] - w[None, :])
    np.fill_diagonal(d, np.inf)
    return np.min(d, axis=1)


def summarize(spectra: Sequence[np.ndarray], bin_width: float | None = None,
              real_tol: float = 1e-9) -> SpectrumSummary:
    """Radial histogram, real-axis histogram and nearest-neighbour spacings.

    The radial support is the largest modulus seen; the default bin width is
    support / 64.  An eigenvalue counts as real when |Im| <= real_tol * max(1, |lambda|).
    """
    spectra = [np.asarray(w, dtype=np.complex128) for w in spectra]
    if not spectra:
        raise ContractError("summarize needs at least one sample")
    allw = np.concatenate(spectra)
    r = np.abs(allw)
    support = float(np.max(r)) if r.size else 0.0
    if support == 0.0:
        support = 1.0
    width = support / 64 if bin_width is None else float(bin_width)
    if width <= 0:
        raise ContractError("bin width must be positive")
    nbins = max(1, int(np.ceil(support / width - 1e-12)))
    edges = np.arange(nbins + 1) * width
    counts, _ = np.histogram(r, bins=edges)
    real_mask = np.abs(allw.imag) <= real_tol * np.maximum(1.0, r)
    reals = allw.real[real_mask]
    redges = np.linspace(-support, support, 2 * nbins + 1)
    rcounts, _ = np.histogram(reals, bins=redges)
    spacings = np.concatenate([_nn_spacings(w) for w in spectra])
    return SpectrumSummary(len(spectra), int(allw.size), support, edges, counts,
                           int(real_mask.sum()), redges, rcounts, spacings)


@dataclass
class SpectrumReport:
    spec: EnsembleSpec
    eigenvalues: list = field(default_factory=list)
    symmetry_checks: list = field(default_factory=list)
    summary: SpectrumSummary | None = None

    @property
    def all_passed(self) -> bool:
        return all(c.passed for checks in self.symmetry_checks for c in checks)

    def check_totals(self) -> dict:
        totals: dict = {}
        for checks in self.symmetry_checks:
            for c in checks:
                t = totals.setdefault(c.kind, {"transform": c.transform, "passed": 0,
                                               "failed": 0, "max_distance": 0.0})
                t["passed" if c.passed else "failed"] += 1
                t["max_distance"] = max(t["max_distance"], c.max_distance)
        return totals


def _sample_spectrum(args) -> np.ndarray:
    sampler, index = args
    try:
        return spectrum(sampler.sample(index))
    except NumericalFailure as exc:
        raise NumericalFailure(f"sample {index}: {exc}", index=index) from None


def compute_spectra(sampler, n_samples: int, workers: int = 1) -> list[np.ndarray]:
    """Spectra of samples 0 .. n_samples-1, in index order.

    Each sample owns its substream, so the result does not depend on ``workers``.
    """
    jobs = [(sampler, i) for i in range(n_samples)]
    if workers <= 1:
        return [_sample_spectrum(j) for j in jobs]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sample_spectrum, jobs, chunksize=max(1, n_samples // (4 * workers))))


def run_campaign(spec: EnsembleSpec, n_samples: int, sigma: float | None = None,
                 seed: int = 0, tol: float = PAIR_TOL, sampler=None,
                 workers: int = 1) -> SpectrumReport:
    """Draw ``n_samples`` matrices, compute spectra, check symmetries and summarize."""
    if n_samples < 1:
        raise ContractError("n_samples must be at least 1")
    sampler = sampler if sampler is not None else sampler_for(spec, sigma, seed)
    report = SpectrumReport(spec)
    for w in compute_spectra(sampler, n_samples, workers):
        report.eigenvalues.append(w)
        report.symmetry_checks.append(spectral_symmetry_check(spec, w, tol))
    report.summary = summarize(report.eigenvalues)
    return report


# -- output -----------------------------------------------------------------

def write_eigenvalues_csv(path, spectra: Iterable[np.ndarray]) -> int:
    rows = 0
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["sample_index", "re", "im"])
        for i, w in enumerate(spectra):
            for z in np.asarray(w, dtype=np.complex128):
                out.writerow([i, repr(float(z.real)), repr(float(z.imag))])
                rows += 1
    return rows


def read_eigenvalues_csv(path) -> list[np.ndarray]:
    groups: dict[int, list[complex]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            groups.setdefault(int(row["sample_index"]), []).append(
                complex(float(row["re"]), float(row["im"])))
    return [np.array(groups[k]) for k in sorted(groups)]


def write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- reference laws used as sanity oracles -----------------------------------

def semicircle_cdf(x, radius: float = 2.0):
    t = np.clip(np.asarray(x, dtype=float) / radius, -1.0, 1.0)
    return 0.5 + (t * np.sqrt(1 - t * t) + np.arcsin(t)) / np.pi


def disk_radial_cdf(r, radius: float = 1.0):
    t = np.clip(np.asarray(r, dtype=float) / radius, 0.0, 1.0)
    return t * t
