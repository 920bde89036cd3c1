"""Command line entry point: ``fermlap synth|verify|audit``.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .config import ConfigError, ProblemSpec, read_config
from .pauli import HermiticityError, ResourceCapError, dumps, restrict

log = logging.getLogger("fermlap")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


def parse_range(text: str) -> list[int]:
    """``"3"``, ``"2..8"`` or ``"1,2,4"``."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot read {text!r} as an integer range") from exc
    if not values:
        raise ConfigError(f"empty range {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermlap", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synth", "emit the Hamiltonian term list, manifest and layout"),
        ("verify", "compare against the brute-force reference and report spectra"),
        ("audit", "count gadget-mode terms over ranges of A, n, D"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value configuration file")
        p.add_argument("--A", dest="A", help="fermion count (audit accepts ranges like 2..6)")
        p.add_argument("--n", dest="n", help="bits per axis")
        p.add_argument("--D", dest="D", help="spatial dimension")
        p.add_argument("--mode", choices=("inline", "gadget"))
        p.add_argument("--code", choices=("brgc-direct", "binary+gray"))
        p.add_argument("--Q", help="penalty weight or 'auto'")
        p.add_argument("--potential", help="well:depth=0.2,site=0 | harmonic:strength=1 | "
                       "coulomb-softened:strength=1,softening=1 | file:PATH[:two-body]")
        p.add_argument("--include-diagonal", action="store_true", default=None)
        p.add_argument("--sweep", help="n=LO..HI: also write a scaling table")
        p.add_argument("--out-dir", default=None)
        p.add_argument("--seed", type=int)
        p.add_argument("--cap-qubits", type=int)
        p.add_argument("--plan", choices=("auto", "published", "complete"))
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "verify":
            p.add_argument("--steps", type=int, default=21, help="gap-flow schedule points")
            p.add_argument("--spectral-tol", type=float, default=5e-2)
            p.add_argument("--gap-tol", type=float, default=0.25)
            p.add_argument("--inject-fault", choices=("wrap-sign",), help=argparse.SUPPRESS)
    return parser


def _settings(args) -> dict:
    settings = read_config(args.config) if args.config else {}
    for key in ("A", "n", "D", "mode", "code", "Q", "potential", "include_diagonal",
                "sweep", "out_dir", "seed", "cap_qubits", "plan"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if isinstance(settings.get("Q"), str):
        settings["Q"] = None if settings["Q"] == "auto" else float(settings["Q"])
    return settings


def _spec(settings: dict) -> ProblemSpec:
    fields = {k: v for k, v in settings.items() if k not in ("sweep", "out_dir")}
    for key in ("A", "n", "D"):
        if key in fields:
            values = parse_range(fields[key])
            if len(values) != 1:
                raise ConfigError(f"{key} must be a single value for this command")
            fields[key] = values[0]
    return ProblemSpec(**fields)


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def coo_text(matrix, atol: float = 1e-14) -> str:
    """``row col value`` lines for the nonzero entries, row-major."""
    m = sp.coo_matrix(matrix)
    order = np.lexsort((m.col, m.row))
    lines = []
    for r, c, v in zip(m.row[order], m.col[order], m.data[order]):
        v = complex(v)
        if abs(v) <= atol:
            continue
        value = repr(v.real) if abs(v.imag) <= atol else f"{v.real!r}{v.imag:+}j"
        lines.append(f"{r} {c} {value}")
    return "\n".join(lines) + ("\n" if lines else "")


def _kv(rows) -> str:
    return "".join(f"{k}={v}\n" for k, v in rows)


def run_synthesize(settings: dict) -> int:
    from .hamiltonian import build_parts

    spec = _spec(settings)
    out = Path(settings.get("out_dir") or "out")
    parts = build_parts(spec)
    total = parts.total()
    _write(out, "terms.txt", dumps(total))
    _write(out, "manifest.txt", _kv(parts.manifest()))
    _write(out, "layout.txt", parts.layout.dump())
    gadget_lines = [g.report_line() for g in parts.gadgets]
    _write(out, "gadgets.txt", "\n".join(gadget_lines) + ("\n" if gadget_lines else ""))
    print(f"wrote {total.num_terms} terms on {parts.layout.num_qubits} qubits to {out}")
    return EXIT_OK


def _sweep_points(spec: ProblemSpec, sweep: str) -> list[tuple[int, int, int]]:
    key, _, rng = sweep.partition("=")
    key = key.strip()
    if key not in ("A", "n", "D"):
        raise ConfigError("sweep must look like n=2..4 (or A=, D=)")
    base = {"A": spec.A, "n": spec.n, "D": spec.D}
    points = []
    for v in parse_range(rng):
        base[key] = v
        points.append((base["A"], base["n"], base["D"]))
    return points


def run_verify(settings: dict, steps: int = 21, spectral_tol: float = 5e-2, gap_tol: float = 0.25,
               fault: str | None = None) -> int:
    from .hamiltonian import build_parts
    from .oracle import build_oracle, compare_subspace, gap_flow, penalized_spectrum, term_count_audit
    from .potential import parse_potential

    spec = _spec(settings)
    if spec.mode != "inline":
        raise ConfigError("verify runs in inline mode")
    if spec.A < 2:
        raise ConfigError("verify needs at least two fermions")
    out = Path(settings.get("out_dir") or "out")
    # caps first: both the synthesized operator and the reference grow fast
    num_qubits = spec.A * spec.n * spec.D
    if num_qubits > spec.cap_qubits:
        raise ResourceCapError(f"{num_qubits} qubits exceeds cap {spec.cap_qubits}")
    pot = parse_potential(spec.potential, spec.n, spec.D)
    oracle = build_oracle(spec.A, spec.n, spec.D, pot, spec.kinetic_coefficient,
                          spec.include_diagonal, spec.cap_states)
    parts = build_parts(spec, wrap_sign=-1 if fault == "wrap-sign" else 1)
    layout = parts.layout
    report_lines, kv = [], []
    checks = {}

    sub = compare_subspace(parts.kinetic + parts.potential, oracle, layout)
    _write(out, "reference.coo", coo_text(oracle.matrix))
    _write(out, "synthesized.coo", coo_text(restrict(parts.kinetic + parts.potential, parts.valid_indices())))
    checks["subspace"] = sub.passed
    report_lines += ["[subspace]"] + sub.lines()
    kv += [("subspace_max_error", f"{sub.max_error:.3e}"), ("subspace_pass", str(sub.passed).lower())]

    valid = parts.valid_indices()
    k = min(len(valid), 8)
    spec_report = penalized_spectrum(parts.kinetic + parts.potential, parts.penalty, parts.Q, k,
                                     layout.num_qubits, valid, cap_qubits=spec.cap_qubits, seed=spec.seed)
    reference = np.sort(oracle.eigenvalues())[:k]
    err = float(np.abs(spec_report.eigenvalues - reference).max())
    checks["spectrum"] = err <= spectral_tol
    report_lines += ["[spectrum]"] + spec_report.lines() + [f"reference={' '.join(f'{e:.12f}' for e in reference)}",
                                                             f"max_error={err:.3e}"]
    kv += [("Q", repr(float(parts.Q))), ("spectrum_max_error", f"{err:.3e}"),
           ("spectrum_pass", str(checks["spectrum"]).lower()),
           ("min_valid_weight", f"{float(spec_report.valid_weight.min()):.12f}")]

    if parts.potential.num_terms:
        T = parts.kinetic + parts.Q * parts.penalty
        flow = gap_flow(T, parts.potential, steps, layout.num_qubits, valid, cap_qubits=spec.cap_qubits)
        ok = flow.min_gap >= (1 - gap_tol) * flow.free_gap
        checks["gap_flow"] = ok
        _write(out, "gap_flow.txt", flow.table())
        report_lines += ["[gap_flow]", f"free_gap={flow.free_gap:.10f} min_gap={flow.min_gap:.10f} "
                         f"ground_degeneracy={flow.ground_degeneracy}"]
        kv += [("free_gap", f"{flow.free_gap:.10f}"), ("min_gap", f"{flow.min_gap:.10f}"),
               ("gap_flow_pass", str(ok).lower())]

    sweep = settings.get("sweep")
    if sweep:
        audit = term_count_audit(_sweep_points(spec, sweep))
        _write(out, "scaling.csv", audit.csv())

    passed = all(checks.values())
    kv.append(("pass", str(passed).lower()))
    _write(out, "report.txt", "\n".join(report_lines) + "\n")
    _write(out, "report.kv", _kv(kv))
    if not sub.passed:
        _write(out, "discrepancies.txt", "\n".join(sub.lines(limit=10_000)[1:]) + "\n")
    print(("PASS" if passed else "FAIL") + " " + " ".join(f"{k}={'ok' if v else 'fail'}" for k, v in checks.items()))
    if not passed and not sub.passed:
        for line in sub.lines(limit=10)[1:]:
            print("  " + line)
    return EXIT_OK if passed else EXIT_FAIL


def run_audit(settings: dict) -> int:
    from .oracle import term_count_audit

    A = parse_range(settings.get("A", 2))
    n = parse_range(settings.get("n", 2))
    D = parse_range(settings.get("D", 1))
    points = []
    for a, b, c in ((a, b, c) for a in A for b in n for c in D):
        if a > 1 << (b * c):
            print(f"skipping A={a} n={b} D={c}: more fermions than sites", file=sys.stderr)
            continue
        ProblemSpec(A=a, n=b, D=c, mode="gadget")
        points.append((a, b, c))
    if not points:
        raise ConfigError("no feasible (A, n, D) points in the requested ranges")
    plan = settings.get("plan", "published")
    report = term_count_audit(points, "published" if plan == "auto" else plan)
    out = Path(settings.get("out_dir") or "out")
    path = _write(out, "scaling.csv", report.csv())
    print(f"wrote {len(report.rows)} rows to {path}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        settings = _settings(args)
        if args.command == "synth":
            return run_synthesize(settings)
        if args.command == "verify":
            return run_verify(settings, args.steps, args.spectral_tol, args.gap_tol, args.inject_fault)
        return run_audit(settings)
    except (ConfigError, FileNotFoundError, ValueError, TypeError, HermiticityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceCapError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
