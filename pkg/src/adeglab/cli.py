"""Command-line entry point: every subcommand prints one JSON record."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import amplify as amp
from . import approx_lp as alp
from . import symmetrize as sym
from . import transforms as tr
from . import upper_bounds as ub
from .boolfn import TruthTable, make_named
from .errors import CapExceededError, CertificateError, DimensionMismatchError, PreconditionError
from .poly import linf_error, sign_represents
from .witness import WitnessUnavailable, verify, witness_from_measure

SCHEMA = "adeg-lab/1"

EXIT_OK = 0
EXIT_CERTIFICATE = 1
EXIT_PRECONDITION = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def rational(text: str) -> Fraction:
    """Parse "num/den" (or an integer) exactly."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def int_list(text: str) -> list:
    return [int(v) for v in text.split(",") if v.strip()] if text.strip() else []


def rational_list(text: str) -> list:
    return [rational(v) for v in text.split(",") if v.strip()] if text.strip() else []


# ---------------------------------------------------------------------------
# function selection


def _add_fn_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("function")
    g.add_argument("--fn", help="AND, OR, PARITY, ED, TWO_TO_ONE, ANDOR_TREE or READ_ONCE_DNF")
    g.add_argument("--table", type=Path, help="truth-table file (overrides --fn)")
    g.add_argument("--m", type=int)
    g.add_argument("--N", type=int)
    g.add_argument("--R", type=int)
    g.add_argument("--fanins", type=int_list)
    g.add_argument("--terms", type=int, help="number of terms for READ_ONCE_DNF")


def load_function(args) -> TruthTable:
    if args.table is not None:
        return TruthTable.from_text(args.table.read_text())
    if not args.fn:
        raise UsageError("one of --fn or --table is required")
    params = {}
    for key in ("m", "N", "R", "fanins"):
        if getattr(args, key, None) is not None:
            params[key] = getattr(args, key)
    if args.terms is not None:
        params["t"] = args.terms
    try:
        return make_named(args.fn, **params)
    except ValueError as exc:
        if isinstance(exc, DimensionMismatchError):
            raise
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands


def _measure_record(res, f, with_witness: bool) -> dict:
    out = res.to_json()
    if with_witness and res.kind in (alp.ADEG_EPS, alp.ODEG_EPS):
        try:
            psi = witness_from_measure(res, f)
            rep = verify(psi, f, res.d, None, res.kind == alp.ODEG_EPS)
            out["witness"] = psi.to_json()
            out["witness_report"] = rep.to_json()
        except WitnessUnavailable as exc:
            out["witness"] = None
            out["witness_note"] = str(exc)
    return out


def cmd_adeg(args):
    f = load_function(args)
    return _measure_record(alp.best_error(f, args.d, one_sided=False), f, args.witness)


def cmd_odeg(args):
    f = load_function(args)
    return _measure_record(alp.best_error(f, args.d, one_sided=True), f, args.witness)


def cmd_weight(args):
    f = load_function(args)
    return alp.approx_weight(f, args.d, args.eps).to_json()


def cmd_owweight(args):
    f = load_function(args)
    return alp.approx_weight(f, args.d, args.eps, one_sided_nonconstant=True).to_json()


def cmd_tweight(args):
    f = load_function(args)
    return alp.threshold_weight(f, args.d, node_budget=args.node_budget).to_json()


def cmd_hardest(args):
    f = load_function(args)
    return alp.hardest_distribution(f, args.d).to_json()


def cmd_amplify(args):
    f = load_function(args)
    res = amp.or_amplify(f, args.d, args.t)
    out = res.to_json()
    out["target_error"] = str(1 - Fraction(1, 2 ** args.t))
    if args.emit_witness:
        out["witness"] = res.witness.to_json()
    return out


def cmd_wamplify(args):
    f = load_function(args)
    return amp.weight_amplify(f, args.d, args.t, args.w).to_json()


def cmd_cascade(args):
    return {"stages": amp.cascade_depth3(args.M, args.t).to_json()}


def cmd_symmetrize(args):
    enc = sym.PropertyEncoding(args.N, args.R)
    if args.fn is None and args.table is None:
        f = make_named("ED", N=args.N, R=args.R)
    else:
        f = load_function(args)
    res = alp.best_error(f, args.d, one_sided=True)
    eps = res.value
    p = res.primal
    r = sym.one_sided_repair(p, f, enc, eps)
    err = linf_error(r, f)
    return {
        "N": args.N,
        "R": args.R,
        "d": args.d,
        "one_sided_error": str(eps),
        "repaired_error": str(err),
        "repaired_degree": r.degree,
        "degree_bound": enc.bits * args.d,
        "error_ok": err <= eps,
        "degree_ok": r.degree <= enc.bits * args.d,
        "repaired": r.to_json(),
    }


def cmd_krause(args):
    f = load_function(args)
    return tr.krause_distribution(f, args.d).to_json()


def cmd_patmat(args):
    f = load_function(args)
    M = tr.pattern_matrix(f)
    if args.matrix_out is not None:
        args.matrix_out.write_text(M.to_text())
    return {"rows": M.shape[0], "cols": M.shape[1], "matrix": M.to_text().splitlines()}


def _load_matrix(args) -> tr.CommMatrix:
    if args.matrix_file is not None:
        return tr.CommMatrix.from_text(args.matrix_file.read_text())
    if args.matrix is not None:
        return tr.named_matrix(args.matrix)
    if args.fn is not None or args.table is not None:
        return tr.pattern_matrix(load_function(args))
    raise UsageError("one of --matrix, --matrix-file or --fn is required")


def cmd_disc(args):
    M = _load_matrix(args)
    if args.mu == "uniform":
        mu = tr.Distribution.uniform(M.shape)
    else:
        masses = json.loads(Path(args.mu).read_text())
        mu = tr.Distribution([Fraction(v) for v in masses], M.shape)
    val = tr.discrepancy(M, mu, args.mode, seed=args.seed)
    out = {"mode": args.mode, "rows": M.shape[0], "cols": M.shape[1]}
    if args.mode == tr.SPECTRAL_UB:
        out.update(val)
    else:
        out["value"] = str(val)
    return out


def cmd_upperbounds(args):
    m, t = args.m, args.t
    eps = args.eps if args.eps is not None else Fraction(1, t + 1)
    r = ub.rational_and(m, t + 1)
    ptf = ub.or_of_rational_ptf(r, t)
    F = make_named("READ_ONCE_DNF", t=t, m=m)
    cptf = ub.cheb_or_of_and_ptf(m, t, eps)
    approx = ub.ptf_to_approx(cptf, F)
    out = {
        "m": m,
        "t": t,
        "rational_and": r.to_json(),
        "or_of_rational_ptf": {"degree": ptf.degree, "sign_ok": sign_represents(ptf, F)},
        "cheb_or_of_and_ptf": {"degree": cptf.degree, "sign_ok": sign_represents(cptf, F)},
        "ptf_to_approx_error": str(linf_error(approx, F)),
    }
    if args.metadata:
        out["metadata"] = ub.metadata_table(m, t, eps)
    return out


# ---------------------------------------------------------------------------
# report


def _report_cell(job):
    f_values, n, d = job
    f = TruthTable(n, f_values)
    try:
        two = alp.best_error(f, d).value
        one = alp.best_error(f, d, one_sided=True).value
    except (CapExceededError, PreconditionError) as exc:
        return {"d": d, "skipped": str(exc)}
    return {"d": d, "eps_star": two, "one_sided_eps_star": one}


def report_tradeoff(f: TruthTable, degrees, errors, workers: int = 1, sharp=None) -> dict:
    """Exact accuracy-versus-degree table; rows come back in the order of ``degrees``."""
    jobs = [(tuple(int(v) for v in f.values), f.n, d) for d in degrees]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_report_cell, jobs))
    else:
        cells = [_report_cell(j) for j in jobs]
    rows = []
    for cell in cells:
        row = {"d": cell["d"]}
        if "skipped" in cell:
            row["skipped"] = cell["skipped"]
        else:
            row["eps_star"] = str(cell["eps_star"])
            row["one_sided_eps_star"] = str(cell["one_sided_eps_star"])
            row["feasible"] = {str(e): cell["eps_star"] <= e for e in errors}
        rows.append(row)
    solved = sorted((c for c in cells if "skipped" not in c), key=lambda c: c["d"])
    monotone = all(a["eps_star"] >= b["eps_star"] for a, b in zip(solved, solved[1:]))
    frontier = {}
    for e in errors:
        ok = [c["d"] for c in solved if c["eps_star"] <= e]
        frontier[str(e)] = min(ok) if ok else None
    out = {"n": f.n, "rows": rows, "monotone_nonincreasing": monotone, "frontier": frontier}
    if sharp is not None:
        out["sharp_threshold"] = ub.sharp_threshold_rows(*sharp)
    return out


def cmd_report(args):
    f = load_function(args)
    sharp = None
    if args.fn and args.fn.upper().replace("-", "_") == "READ_ONCE_DNF" and args.sharp:
        sharp = (args.m, args.terms)
    return report_tradeoff(f, args.degrees, args.errors, args.workers, sharp)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adeglab", description="Exact approximate-degree toolkit")
    parser.add_argument("--out", type=Path, help="write the JSON record here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, fn=True):
        p = sub.add_parser(name, help=help_text)
        if fn:
            _add_fn_args(p)
        p.set_defaults(func=func)
        return p

    for name, func, text in (
        ("adeg", cmd_adeg, "best two-sided error at degree d"),
        ("odeg", cmd_odeg, "best one-sided error at degree d"),
    ):
        p = add(name, func, text)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--witness", action="store_true", help="include the dual witness and its report")

    for name, func, text in (
        ("weight", cmd_weight, "least weight of a degree-d eps-approximation"),
        ("owweight", cmd_owweight, "one-sided non-constant approximate weight"),
    ):
        p = add(name, func, text)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--eps", type=rational, required=True)

    p = add("tweight", cmd_tweight, "exact threshold weight at degree d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--node-budget", type=int)

    p = add("hardest-dist", cmd_hardest, "distribution minimizing the best degree-d correlation")
    p.add_argument("--d", type=int, required=True)

    p = add("amplify", cmd_amplify, "OR-composition dual witness")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--emit-witness", action="store_true")

    p = add("wamplify", cmd_wamplify, "weight-amplification dual witness")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--w", type=rational)

    p = add("cascade", cmd_cascade, "depth-3 AND-OR cascade", fn=False)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--t", type=int, required=True)

    p = add("symmetrize", cmd_symmetrize, "one-sided to two-sided repair for a symmetric property")
    p.add_argument("--d", type=int, required=True)

    p = add("krause", cmd_krause, "selector lift and its character correlations")
    p.add_argument("--d", type=int, required=True)

    p = add("patmat", cmd_patmat, "pattern matrix of a function")
    p.add_argument("--matrix-out", type=Path, help="also write the +/- grid here")

    p = add("disc", cmd_disc, "rectangle discrepancy of a matrix")
    p.add_argument("--matrix", help="named matrix: " + ", ".join(tr.NAMED_MATRICES))
    p.add_argument("--matrix-file", type=Path)
    p.add_argument("--mu", default="uniform", help="'uniform' or a JSON file of masses")
    p.add_argument("--mode", choices=tr.MODES, default=tr.EXACT)
    p.add_argument("--seed", type=int, default=0)

    p = add("upperbounds", cmd_upperbounds, "certified upper-bound constructions for OR_t(AND_m)", fn=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--eps", type=rational)
    p.add_argument("--metadata", action="store_true", help="emit the weight and degree table")

    p = add("report", cmd_report, "accuracy-versus-degree table")
    p.add_argument("--degrees", type=int_list, default=[])
    p.add_argument("--errors", type=rational_list, default=[])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--sharp", action="store_true", help="add the sharp-threshold comparison")
    return parser


def _emit(record: dict, out: Path | None):
    text = json.dumps(record, ensure_ascii=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"adeglab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, DimensionMismatchError) as exc:
        _emit({"schema": SCHEMA, "command": args.command, "error": type(exc).__name__, "message": str(exc)}, args.out)
        return EXIT_PRECONDITION
    except CertificateError as exc:
        _emit({"schema": SCHEMA, "command": args.command, "error": type(exc).__name__, "message": str(exc)}, args.out)
        return EXIT_CERTIFICATE
    record = {"schema": SCHEMA, "command": args.command}
    record.update(result)
    _emit(record, args.out)
    return EXIT_OK


def main():
    sys.exit(run())
