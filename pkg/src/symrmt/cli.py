"""Command-line front end: ``symrmt catalog | verify | sample | classify | jacobian | observables``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numerical failure.  JSON outputs echo the run configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ContractError, NumericalFailure

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

OUTPUT_ENV = "SYMRMT_OUTPUT_DIR"
DEFAULT_SEED = 0
DEFAULT_SAMPLES = 100


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    n: int | None = None
    half_size: int | None = None
    sigma: float | None = None
    seed: int = DEFAULT_SEED
    n_samples: int | None = None
    output_dir: str | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("n", "half_size", "n_samples"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive, got {v}")
        if self.sigma is not None and not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise UsageError(f"--sigma must be a non-negative number, got {self.sigma}")
        if self.seed < 0:
            raise UsageError(f"--seed must be non-negative, got {self.seed}")
        for name, v in self.tolerances.items():
            if not v > 0:
                raise UsageError(f"tolerance {name} must be positive, got {v}")

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None and v != {}}


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=_json_default))


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


def _output_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get(OUTPUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _safe(key: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", key.replace("'", "p").replace("+", "plus")
                  .replace("-", "minus")).strip("_")


# -- catalog ----------------------------------------------------------------

def _entry_row(entry) -> dict:
    spec = entry.build(1)
    signs = {k: v for k, v in spec.signs.as_dict().items() if v is not None}
    return {"id": entry.key, "kinds": entry.kinds, "epsilon_c": spec.epsilon_c,
            "signs": signs, "expected_class": entry.expected_class, "table": entry.table,
            "size_factor": entry.size_factor, "flags": list(entry.flags)}


def _fmt_signs(signs: dict) -> str:
    return " ".join(f"{k}={'+' if v > 0 else '-'}" for k, v in sorted(signs.items())) or "-"


def cmd_catalog(args) -> int:
    from .catalog import catalog
    rows = []
    for e in catalog():
        if args.cls and e.expected_class != args.cls:
            continue
        if args.kinds and set(e.kinds) != set(args.kinds.upper()):
            continue
        rows.append(_entry_row(e))
    if args.json:
        _emit({"config": RunConfig("catalog").as_dict()
               | {"class": args.cls, "kinds": args.kinds}, "entries": rows})
        return EXIT_OK
    print(f"{'id':<8} {'kinds':<6} {'eps_c':<6} {'class':<6} {'table':<12} signs")
    for r in rows:
        eps = "" if r["epsilon_c"] is None else ("+" if r["epsilon_c"] > 0 else "-")
        cls = r["expected_class"] or ""
        flag = "  [" + ", ".join(r["flags"]) + "]" if r["flags"] else ""
        print(f"{r['id']:<8} {r['kinds']:<6} {eps:<6} {cls:<6} {r['table']:<12} "
              f"{_fmt_signs(r['signs'])}{flag}")
    print(f"{len(rows)} entries")
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def _load_spec_arg(path: str):
    from .symmetry import load_spec
    try:
        return load_spec(path)
    except OSError as exc:
        raise UsageError(f"cannot read spec {path!r}: {exc}") from None


def cmd_verify(args) -> int:
    from .cartan import PAIR_TOL, solve, structure_report, verify_symmetric_pair
    from .catalog import get_entry
    from .symmetry import check_commutativity
    tol = args.tol if args.tol is not None else PAIR_TOL
    cfg = RunConfig("verify", args.entry or args.spec, half_size=args.half_size,
                    output_dir=args.out, tolerances={"pair": tol})
    entry = None
    if args.entry:
        entry = get_entry(args.entry)
        spec = entry.build(args.half_size)
    else:
        spec = _load_spec_arg(args.spec)
    signs = check_commutativity(spec)
    pair = solve(spec)
    report = verify_symmetric_pair(pair, tol)
    out = {"config": cfg.as_dict(), "n": spec.n, "kinds": spec.kinds,
           "signs": {k: v for k, v in signs.as_dict().items() if v is not None},
           "dims": {"P": pair.dims[0], "K": pair.dims[1]},
           "symmetric_pair": report.as_dict()}
    passed = report.passed
    if entry is not None:
        sp = structure_report(pair.p_basis, entry.p_predicate)
        sk = structure_report(pair.k_basis, entry.k_predicate)
        out["entry"] = entry.key
        out["expected_class"] = entry.expected_class
        out["flags"] = list(entry.flags)
        out["structure"] = {"P": sp.as_dict(), "K": sk.as_dict()}
        passed = passed and sp.passed and sk.passed
    out["passed"] = bool(passed)
    _emit(out)
    if args.out:
        from .spectra import write_json
        write_json(_output_dir(args.out) / "verify.json", json.loads(json.dumps(out, default=_json_default)))
    return EXIT_OK if passed else EXIT_VERIFY


# -- sample -----------------------------------------------------------------

def cmd_sample(args) -> int:
    from .catalog import get_entry
    from .spectra import run_campaign, sampler_for, write_eigenvalues_csv, write_json
    entry = get_entry(args.entry)
    n = args.n if args.n is not None else entry.n_for(2)
    spec = entry.build_n(n)
    sigma = args.sigma if args.sigma is not None else 1.0 / np.sqrt(n)
    cfg = RunConfig("sample", entry.key, n=n, sigma=sigma, seed=args.seed,
                    n_samples=args.samples, output_dir=str(_output_dir(args.out)),
                    tolerances={"pairing": args.tol})
    outdir = Path(cfg.output_dir)
    sampler = sampler_for(spec, sigma, args.seed)
    report = run_campaign(spec, args.samples, sigma, args.seed, args.tol, sampler,
                          workers=args.workers)
    stem = args.prefix or f"entry{_safe(entry.key)}_n{n}_seed{args.seed}"
    csv_path = outdir / f"{stem}_eigenvalues.csv"
    json_path = outdir / f"{stem}_summary.json"
    rows = write_eigenvalues_csv(csv_path, report.eigenvalues)
    payload = {"config": cfg.as_dict(), "entry": entry.key, "kinds": entry.kinds,
               "expected_class": entry.expected_class, "flags": list(entry.flags),
               "csv": csv_path.name, "csv_rows": rows,
               "symmetry_checks": report.check_totals(),
               "all_checks_passed": report.all_passed,
               "summary": report.summary.as_dict()}
    write_json(json_path, json.loads(json.dumps(payload, default=_json_default)))
    _emit({"csv": str(csv_path), "summary": str(json_path), "csv_rows": rows,
           "symmetry_checks": report.check_totals(), "all_checks_passed": report.all_passed})
    return EXIT_OK if report.all_passed else EXIT_VERIFY


# -- classify ---------------------------------------------------------------

def cmd_classify(args) -> int:
    from .catalog import catalog, dual_entry
    from .symmetry import fingerprint
    spec = _load_spec_arg(args.spec)
    fp = fingerprint(spec)
    matches = []
    for e in catalog():
        if spec.n % e.size_factor or set(e.kinds) != set(spec.kinds):
            continue
        if fingerprint(e.build_n(spec.n)) == fp:
            matches.append(e)
    ids = sorted({e.id for e in matches})
    row_classes = []
    for e in catalog():
        if e.id in ids and e.expected_class and e.expected_class not in row_classes:
            row_classes.append(e.expected_class)
    out = {
        "config": RunConfig("classify", args.spec).as_dict(),
        "fingerprint": fp.as_dict(),
        "matches": [{"id": e.key, "table": e.table, "expected_class": e.expected_class,
                     "flags": list(e.flags),
                     "dual": (dual_entry(e).key if dual_entry(e) else None)}
                    for e in matches],
        "row_classes": " / ".join(row_classes),
        "note": "equal fingerprints are necessary, not sufficient, for unitary equivalence; "
                "the dual field links the entry with opposite epsilon_c, which shares K",
    }
    _emit(out)
    return EXIT_OK


# -- jacobian and observables -----------------------------------------------

def _parse_q(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()], dtype=float)
    except ValueError:
        raise UsageError(f"--q must be a comma-separated list of numbers, got {text!r}") from None


def cmd_jacobian(args) -> int:
    from .roots import jacobian, restricted_positive_roots
    q = _parse_q(args.q)
    if q.size == 0:
        raise UsageError("--q needs at least one coordinate")
    family = args.family
    # type A of rank r acts on r + 1 coordinates; q fixes the rank
    rank = q.size - 1 if family == "A" else q.size
    notes = []
    if args.rank is not None and args.rank != rank:
        if family == "A" and args.rank == q.size:
            notes.append(f"--rank {args.rank} read as the number of coordinates; "
                         f"using A_{rank} on {q.size} coordinates")
        else:
            raise UsageError(f"--rank {args.rank} is inconsistent with {q.size} coordinates "
                             f"for family {family}")
    if rank < 1:
        raise UsageError(f"family {family} needs at least {2 if family == 'A' else 1} coordinates")
    data = restricted_positive_roots(family, rank).with_multiplicities(args.mo, args.ml, args.ms)
    val = jacobian(args.curvature, q, data)
    for n_ in notes:
        print(f"note: {n_}", file=sys.stderr)
    _emit({"config": {"command": "jacobian", "family": family, "rank": rank,
                      "curvature": args.curvature, "q": q.tolist(),
                      "multiplicities": list(data.multiplicities)},
           "value": val.value, "log_value": val.log_value, "notes": notes})
    return EXIT_OK


def cmd_observables(args) -> int:
    from .roots import nanotube_observables
    obs = nanotube_observables(args.s, args.l, args.gamma, args.ml, args.ms)
    _emit({"config": {"command": "observables", "s": args.s, "l": args.l, "gamma": args.gamma,
                      "m_l": args.ml, "m_s": args.ms},
           **obs.as_dict(),
           "units": "s dimensionless; xi in the length units of l; mean_log_dg and "
                    "var_ratio dimensionless"})
    return EXIT_OK


# -- parser -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="symrmt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("catalog", help="list catalog entries")
    c.add_argument("--class", dest="cls", help="filter by expected class, e.g. Gin4")
    c.add_argument("--kinds", help="filter by symmetry kinds, e.g. PQC")
    c.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", help="check a spec or entry constructively")
    src = v.add_mutually_exclusive_group(required=True)
    src.add_argument("--entry", help="catalog id, e.g. 5, 18a, 24(-), 19'+")
    src.add_argument("--spec", help="path to a spec JSON file")
    v.add_argument("--half-size", type=int, default=2)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--out", help="also write verify.json into this directory")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="sampling campaign with CSV and JSON output")
    s.add_argument("--entry", required=True)
    s.add_argument("--n", type=int, default=None, help="matrix size (default: smallest-but-one)")
    s.add_argument("--sigma", type=float, default=None, help="default 1/sqrt(N)")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    s.add_argument("--tol", type=float, default=1e-7, help="spectral pairing tolerance")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")
    s.add_argument("--prefix", default=None, help="file name stem")
    s.set_defaults(func=cmd_sample)

    k = sub.add_parser("classify", help="fingerprint a spec and list matching entries")
    k.add_argument("spec")
    k.set_defaults(func=cmd_classify)

    j = sub.add_parser("jacobian", help="evaluate J0, J+ or J-")
    j.add_argument("--family", required=True, choices=["A", "B", "C", "D", "BC"])
    j.add_argument("--rank", type=int, default=None)
    j.add_argument("--mo", type=int, default=0)
    j.add_argument("--ml", type=int, default=0)
    j.add_argument("--ms", type=int, default=0)
    j.add_argument("--curvature", required=True, choices=["0", "+", "-"])
    j.add_argument("--q", required=True, help="comma-separated coordinates")
    j.set_defaults(func=cmd_jacobian)

    o = sub.add_parser("observables", help="conductance observables of a disordered wire")
    o.add_argument("--ml", type=float, required=True)
    o.add_argument("--ms", type=float, required=True)
    o.add_argument("--s", type=float, required=True, help="dimensionless length")
    o.add_argument("--gamma", type=float, required=True)
    o.add_argument("--l", type=float, default=1.0, help="mean free path")
    o.set_defaults(func=cmd_observables)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        for name in ("half_size", "samples", "n", "workers"):
            v = getattr(args, name, None)
            if v is not None and v <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive, got {v}")
        return args.func(args)
    except (UsageError, ContractError) as exc:
        print(f"symrmt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"symrmt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
