"""Command-line harness: generate matrices, run verification methods,
collect timings, and write CSV/console tables.

Exit codes: 0 all requested verifications succeeded, 1 at least one method
reported failed/inf/inconclusive, 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .approx import bsvd_decompose
from .errors import (
    MatrixMarketError,
    NonpositiveLowerBound,
    NotProvablyPositiveDefinite,
    NotVerifiablyNonsingular,
    OrthogonalityDefectTooLarge,
    PivotFailure,
    SvboundError,
)
from .ivlinalg import HERMITIAN, IntervalMatrix
from .matgen import FemProblem, GeneratorSpec, fem_assemble, generate
from .mmio import read_matrix_market, write_matrix_market
from .oracle import oracle_singular_values
from .rounding import get_backend
from .verify import (
    method_p,
    method_s1,
    method_s2,
    sigma_min_bound_from_enclosure,
    verify_all_singular_values,
)

__all__ = ["RunConfig", "MethodResult", "RunReport", "relative_error", "run", "main"]

CSV_COLUMNS = (
    "n", "nnz_a", "nnz_b", "method", "status",
    "sigma_min_lo", "sigma_min_hi", "inv_sigma_min_hi", "rel_err", "time_s",
    "alpha", "beta", "delta", "theta", "tau",
)

_FAILED = (NotProvablyPositiveDefinite, NotVerifiablyNonsingular,
           PivotFailure, OrthogonalityDefectTooLarge)


class InputError(SvboundError):
    """Bad run configuration or unreadable input (exit code 2)."""


def relative_error(lo: float, hi: float) -> float:
    """(hi - lo) / (hi + lo) for bounds 0 < lo <= hi of the same quantity."""
    if not lo > 0.0:
        raise NonpositiveLowerBound(f"lower bound {lo} is not positive")
    if hi < lo:
        raise ValueError("upper bound below lower bound")
    return (hi - lo) / (hi + lo)


def row_rel_err(sigma_min_hi, inv_sigma_min_hi):
    """The relative error recorded in reports, recomputable bit-exactly
    from the stored bounds."""
    if sigma_min_hi is None or inv_sigma_min_hi is None:
        return None
    if not sigma_min_hi > 0:
        return None
    lo = get_backend().div_down(1.0, sigma_min_hi)
    return relative_error(lo, inv_sigma_min_hi)


@dataclass(frozen=True)
class RunConfig:
    methods: tuple = ("d",)
    delta_variant: str = "D1"
    epsilon: float = 0.01
    epsilon_s1: float | None = None
    epsilon_s2: float | None = None
    reps: int = 1
    out: str | None = None
    gen_a: GeneratorSpec | None = None
    gen_b: GeneratorSpec | None = None
    fem: FemProblem | None = None
    file_a: str | None = None
    file_b: str | None = None
    svd_backend: str = "auto"

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method required")
        bad = set(m.lower() for m in self.methods) - {"p", "d", "s1", "s2"}
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")


@dataclass(frozen=True)
class MethodResult:
    method: str
    status: str
    sigma_min_lo: float | None = None
    sigma_min_hi: float | None = None
    inv_sigma_min_hi: float | None = None
    rel_err: float | None = None
    time_s: float | None = None
    alpha: float | None = None
    beta: float | None = None
    delta: float | None = None
    theta: float | None = None
    tau: float | None = None


@dataclass
class RunReport:
    n: int
    nnz_a: int
    nnz_b: int
    kappa_a: float | None = None
    kappa_b: float | None = None
    results: list = field(default_factory=list)

    @property
    def all_verified(self) -> bool:
        return all(r.status == "verified" for r in self.results)

    def rows(self):
        out = []
        for r in self.results:
            row = {
                "n": self.n, "nnz_a": self.nnz_a, "nnz_b": self.nnz_b,
                "method": r.method, "status": r.status,
            }
            for k in ("sigma_min_lo", "sigma_min_hi", "inv_sigma_min_hi",
                      "rel_err", "time_s", "alpha", "beta", "delta", "theta", "tau"):
                v = getattr(r, k)
                if v is None:
                    row[k] = "inf" if (k == "rel_err" and r.status == "inf") else ""
                else:
                    row[k] = repr(float(v))
            out.append(row)
        return out


def _resolve_matrices(cfg: RunConfig):
    if cfg.fem is not None:
        return fem_assemble(cfg.fem)
    if cfg.file_a or cfg.file_b:
        if not (cfg.file_a and cfg.file_b):
            raise InputError("both --mm-a and --mm-b are required for file input")
        try:
            a_mat, _ = read_matrix_market(cfg.file_a)
            b_mat, b_info = read_matrix_market(cfg.file_b)
        except (OSError, MatrixMarketError) as exc:
            raise InputError(str(exc)) from exc
        if b_info.symmetry == "general":
            raise InputError("B must use symmetric or hermitian storage")
        A = IntervalMatrix.from_point(a_mat)
        B = IntervalMatrix.from_point(b_mat, sym=HERMITIAN)
        return A, B
    if cfg.gen_a is None or cfg.gen_b is None:
        raise InputError("no input: give --fem, --mm-a/--mm-b, or --gen-a/--gen-b")
    if cfg.gen_b.kind not in ("shifted_sym", "spd_randsvd"):
        raise InputError("B generator must be shifted_sym or spd_randsvd")
    a_mat = generate(cfg.gen_a)
    b_mat = generate(cfg.gen_b)
    return IntervalMatrix.from_point(a_mat), IntervalMatrix.from_point(b_mat, sym=HERMITIAN)


def _run_method(name: str, A, B, cfg: RunConfig) -> MethodResult:
    name = name.lower()
    best = None
    outcome = None
    for _ in range(cfg.reps):
        t0 = time.perf_counter()
        try:
            if name == "p":
                outcome = ("bound", method_p(A, B))
            elif name == "d":
                factors = bsvd_decompose(A.mid(), B.mid(), svd_backend=cfg.svd_backend)
                enc = verify_all_singular_values(A, B, factors, cfg.delta_variant)
                outcome = ("enclosure", enc)
            elif name == "s1":
                outcome = ("bound", method_s1(A, B, cfg.epsilon_s1 or cfg.epsilon))
            else:
                outcome = ("bound", method_s2(A, B, cfg.epsilon_s2 or cfg.epsilon))
        except _FAILED as exc:
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
            return MethodResult(method=name.upper(), status="failed", time_s=best)
        except NonpositiveLowerBound:
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
            return MethodResult(method=name.upper(), status="inf", time_s=best)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)

    kind, obj = outcome
    if kind == "enclosure":
        bound = sigma_min_bound_from_enclosure(obj)
        status = "verified" if bound.inv_upper is not None else "inf"
        return MethodResult(
            method="D", status=status,
            sigma_min_lo=bound.lower, sigma_min_hi=bound.upper,
            inv_sigma_min_hi=bound.inv_upper,
            rel_err=row_rel_err(bound.upper, bound.inv_upper),
            time_s=best, alpha=obj.alpha, beta=obj.beta, delta=obj.delta,
        )
    b = obj
    inv_hi = b.inv_upper
    if inv_hi is None and b.lower > 0:
        inv_hi = get_backend().div_up(1.0, b.lower)
    return MethodResult(
        method=b.method, status=b.status,
        sigma_min_lo=b.lower if b.status == "verified" else None,
        sigma_min_hi=b.upper,
        inv_sigma_min_hi=inv_hi if b.status == "verified" else None,
        rel_err=row_rel_err(b.upper, inv_hi) if b.status == "verified" else None,
        time_s=best, theta=b.theta, tau=b.tau, delta=b.residual_delta,
    )


def run(cfg: RunConfig) -> RunReport:
    """Execute every configured method on the same matrices; timings are
    the best of ``reps`` sequential repetitions."""
    A, B = _resolve_matrices(cfg)
    report = RunReport(n=A.rows, nnz_a=A.nnz(), nnz_b=B.nnz())
    with np.errstate(all="ignore"):
        try:
            report.kappa_a = float(np.linalg.cond(A.mid(), 2))
            report.kappa_b = float(np.linalg.cond(B.mid(), 2))
        except np.linalg.LinAlgError:
            pass
    for name in cfg.methods:
        report.results.append(_run_method(name, A, B, cfg))
    if cfg.out:
        write_csv(report, cfg.out)
    return report


def write_csv(report: RunReport, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for row in report.rows():
            w.writerow(row)


def format_table(report: RunReport) -> str:
    head = f"n={report.n}  nnz(A)={report.nnz_a}  nnz(B)={report.nnz_b}"
    if report.kappa_a is not None:
        head += f"  cond2(A)~{report.kappa_a:.3g}  cond2(B)~{report.kappa_b:.3g}"
    cols = ("method", "status", "sigma_min_lo", "sigma_min_hi",
            "inv_sigma_min_hi", "rel_err", "time_s")
    lines = [head, "  ".join(f"{c:>16}" for c in cols)]
    for row in report.rows():
        cells = []
        for c in cols:
            v = row[c]
            if c in ("method", "status"):
                cells.append(f"{v:>16}")
            else:
                try:
                    cells.append(f"{float(v):>16.10g}")
                except (TypeError, ValueError):
                    cells.append(f"{v:>16}")
        lines.append("  ".join(cells))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument parsing


def _parse_fem(text: str) -> FemProblem:
    parts = text.split(",")
    if len(parts) not in (2, 3, 4):
        raise InputError("--fem expects m,R[,c_re[,c_im]]")
    try:
        m = int(parts[0])
        r = float(parts[1])
        cre = float(parts[2]) if len(parts) > 2 else 0.0
        cim = float(parts[3]) if len(parts) > 3 else 0.0
    except ValueError as exc:
        raise InputError(f"bad --fem value: {exc}") from exc
    return FemProblem(m, r, complex(cre, cim) if cim else cre)


def _add_input_args(p: argparse.ArgumentParser):
    p.add_argument("--mm-a", help="Matrix Market file for A")
    p.add_argument("--mm-b", help="Matrix Market file for B (symmetric/hermitian)")
    p.add_argument("--fem", help="FEM pair: m,R,c_re,c_im")
    p.add_argument("--gen-a", choices=("randn", "randsvd"), help="generator for A")
    p.add_argument("--gen-b", choices=("shifted_sym", "spd_randsvd"), help="generator for B")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--kappa-a", type=float)
    p.add_argument("--kappa-b", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--complex", action="store_true", dest="complex_entries")


def _input_kwargs(args) -> dict:
    fem = _parse_fem(args.fem) if args.fem else None
    gen_a = gen_b = None
    if args.gen_a or args.gen_b:
        if not (args.gen_a and args.gen_b):
            raise InputError("--gen-a and --gen-b go together")
        gen_a = GeneratorSpec(args.gen_a, n=args.n, kappa=args.kappa_a,
                              seed=args.seed, complex_entries=args.complex_entries)
        gen_b = GeneratorSpec(args.gen_b, n=args.n, kappa=args.kappa_b,
                              seed=args.seed + 1, complex_entries=args.complex_entries)
    return dict(gen_a=gen_a, gen_b=gen_b, fem=fem, file_a=args.mm_a, file_b=args.mm_b)


def _config_from_args(args, default_reps=1) -> RunConfig:
    return RunConfig(
        methods=tuple(m.strip() for m in args.method.split(",") if m.strip()),
        delta_variant=args.delta_variant.upper(),
        epsilon=args.epsilon,
        epsilon_s1=args.epsilon_s1,
        epsilon_s2=args.epsilon_s2,
        reps=args.reps if args.reps else default_reps,
        out=args.out,
        **_input_kwargs(args),
    )


def _cmd_verify(args, default_reps=1) -> int:
    cfg = _config_from_args(args, default_reps)
    report = run(cfg)
    print(format_table(report))
    return 0 if report.all_verified else 1


def _cmd_gen(args) -> int:
    if args.fem:
        if not (args.out_a and args.out_b):
            raise InputError("fem generation needs --out-a and --out-b")
        A, B = fem_assemble(_parse_fem(args.fem))
        write_matrix_market(A.mid(), args.out_a)
        write_matrix_market(B.mid(), args.out_b,
                            symmetry="symmetric" if not B.is_complex else "hermitian")
        print(f"wrote {args.out_a} and {args.out_b} (midpoint matrices)")
        return 0
    if not args.kind:
        raise InputError("--kind or --fem is required")
    if not args.out:
        raise InputError("--out is required")
    spec = GeneratorSpec(args.kind.replace("-", "_"), n=args.n, kappa=args.kappa,
                         seed=args.seed, complex_entries=args.complex_entries)
    M = generate(spec)
    sym = "general"
    if spec.kind in ("shifted_sym", "spd_randsvd"):
        sym = "hermitian" if np.iscomplexobj(M) else "symmetric"
    write_matrix_market(M, args.out, symmetry=sym)
    print(f"wrote {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    cfg = RunConfig(methods=("d",), **_input_kwargs(args))
    A, B = _resolve_matrices(cfg)
    sig = oracle_singular_values(A.mid(), B.mid(), precision_bits=args.bits)
    for s in sig:
        print(repr(float(s)))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(repr(float(s)) for s in sig) + "\n")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="svbound",
                                 description="verified singular-value bounds for R^-H A R^-1")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a test matrix / FEM pair")
    g.add_argument("--kind", choices=("randn", "shifted-sym", "randsvd", "spd-randsvd"))
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--kappa", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--complex", action="store_true", dest="complex_entries")
    g.add_argument("--fem", help="m,R,c_re,c_im")
    g.add_argument("--out")
    g.add_argument("--out-a")
    g.add_argument("--out-b")

    for name, reps in (("verify", 1), ("bench", 10)):
        v = sub.add_parser(name, help=f"run verification methods ({'timed, best-of-k' if name == 'bench' else 'single shot'})")
        _add_input_args(v)
        v.add_argument("--method", default="d", help="comma list from p,d,s1,s2")
        v.add_argument("--delta-variant", default="d1", choices=("d1", "d2", "d3", "D1", "D2", "D3"))
        v.add_argument("--epsilon", type=float, default=0.01)
        v.add_argument("--epsilon-s1", type=float)
        v.add_argument("--epsilon-s2", type=float)
        v.add_argument("--reps", type=int, default=reps)
        v.add_argument("--out", help="CSV output path")

    o = sub.add_parser("oracle", help="high-precision reference singular values")
    _add_input_args(o)
    o.add_argument("--bits", type=int, default=128)
    o.add_argument("--out")

    args = ap.parse_args(argv)
    try:
        if args.cmd == "gen":
            return _cmd_gen(args)
        if args.cmd == "oracle":
            return _cmd_oracle(args)
        return _cmd_verify(args, default_reps=1 if args.cmd == "verify" else 10)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, MatrixMarketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
