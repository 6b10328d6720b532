"""Command-line front end: ``stopred <command> [options]``.

Standard output carries the result document (JSON by default, CSV with
``--csv``) unless ``--out`` names a file; progress goes to standard error.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import reproduce as repro
from .bounds import (BoundReport, ensemble_bound, hierarchy_bound_xi1, hs_bound, sre_mean_spectrum, sv_bound,
                     u_single_row, xi2_bound)
from .codes import EnsembleSpec, LinearCode, MatrixFormatError, golay_extended, load_matrix, save_matrix
from .decoder import compare_decoders
from .estimator import epsilon_for_confidence, estimate_ensemble_spectrum, estimate_spectrum
from .gf2 import DEFAULT_ROW_SPACE_LIMIT, RowSpaceTooLargeError
from .greedy import audit_cover, greedy_extend
from .parallel import set_threads
from .report import (bounds_doc, comparison_doc, dumps, ensemble_doc, estimate_doc, fer_doc, greedy_doc,
                     profile_doc, spectrum_doc, spectrum_from_doc, to_csv)
from .stopping import DEFAULT_BUDGET, DECODERS, BudgetExceededError, fer, spectrum_exhaustive, undecodable_profile

BUILTIN = {"golay": golay_extended}


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------
# argument helpers

def count(text: str) -> int:
    """Non-negative integer that may be written as ``1e6``."""
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v < 0 or v != int(v):
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return int(v)


def fraction(text: str) -> Fraction:
    try:
        f = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rate: {text!r}")
    if not 0 < f < 1:
        raise argparse.ArgumentTypeError("rate must lie strictly between 0 and 1")
    return f


def p_grid(text: str) -> list[float]:
    try:
        a, b, s = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid is start:stop:step")
    if s <= 0 or a < 0 or b > 1 or a > b:
        raise argparse.ArgumentTypeError("need 0 <= start <= stop <= 1 and step > 0")
    steps = int(round((b - a) / s))
    return [round(a + k * s, 12) for k in range(steps + 1)]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--code", default="builtin:golay", help="builtin:golay or a matrix file")
    g.add_argument("--format", choices=("dense", "alist"), default="dense", help="matrix file format")
    g.add_argument("--d", type=int, help="minimum distance of the code, if known")
    g.add_argument("--out", help="write the result here instead of standard output")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json")
    fmt.add_argument("--csv", dest="output", action="store_const", const="csv")
    g.add_argument("--seed", type=int, help="random seed (a fresh one is printed when omitted)")
    g.add_argument("--threads", type=int, help="worker threads (default: STOPRED_THREADS or all cores)")
    g.add_argument("--force", action="store_true", help="lift the work budgets")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="stopred", description="Stopping redundancy bounds and tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", parents=[common], help="upper bounds on (hierarchical) stopping redundancy")
    b.add_argument("--n", type=int, help="code length (parameter mode, no matrix)")
    b.add_argument("--k", type=int, help="code dimension (parameter mode)")
    b.add_argument("--ell", type=int, action="append", help="hierarchy level (repeatable)")
    b.add_argument("--all-ell", action="store_true", help="every level 1..r")
    b.add_argument("--tau", choices=("1", "m"), default="m", help="seed rows: first row only or the whole matrix")
    b.add_argument("--rank-param", choices=("r", "m"), default="r", help="rank parameter in the bound")
    b.add_argument("--m", type=int, help="row count for --rank-param m in parameter mode")
    b.add_argument("--first-row-weight", type=int, help="weight of the seed row for --tau 1")
    b.add_argument("--spectrum", help="spectrum JSON (from 'spectrum') to use instead of enumeration")

    s = sub.add_parser("spectrum", parents=[common], help="coverable stopping-set counts")
    s.add_argument("--ell", type=int, required=True, help="largest set size")
    s.add_argument("--coverable", action="store_true", help="count only coverable stopping sets")
    s.add_argument("--estimate", action="store_true", help="Monte Carlo upper confidence limits")
    s.add_argument("--N", type=count, default=10**6, help="samples per size")
    e = s.add_mutually_exclusive_group()
    e.add_argument("--eps", type=float, help="per-size error probability")
    e.add_argument("--confidence", type=float, help="joint confidence over all sizes")

    g = sub.add_parser("greedy", parents=[common], help="greedy redundant parity-check matrix")
    g.add_argument("--ell", type=int, required=True)
    g.add_argument("--restarts", type=int, default=10)
    g.add_argument("--matrix-out", help="write the chosen matrix here (in --format)")
    g.add_argument("--audit", action="store_true", help="recheck coverage of the result exhaustively")

    p = sub.add_parser("profile", parents=[common], help="undecodable erasure patterns and FER")
    p.add_argument("--decoder", choices=DECODERS + ("both",), default="iterative")
    p.add_argument("--matrix", action="append", help="parity-check matrix file (repeatable; overrides --code)")
    p.add_argument("--w-max", type=int)
    p.add_argument("--exhaustive-to", type=int, help="enumerate weights up to this, sample above")
    p.add_argument("--samples", type=count, default=10**6)
    p.add_argument("--fer", action="store_true", help="emit FER(p) instead of pattern counts")
    p.add_argument("--p-grid", type=p_grid, default=p_grid("0.05:0.5:0.05"))
    p.add_argument("--compare", help="'it,ml': count decoder disagreements per weight")

    en = sub.add_parser("ensemble", parents=[common], help="ensemble-average bounds and estimates")
    en.add_argument("variant", choices=("sre", "gallager"))
    en.add_argument("--n", type=int, required=True)
    rm = en.add_mutually_exclusive_group()
    rm.add_argument("--rate", type=fraction)
    rm.add_argument("--m", type=int)
    en.add_argument("--J", type=int)
    en.add_argument("--K", type=int)
    en.add_argument("--analytic", action="store_true")
    en.add_argument("--estimate", action="store_true")
    en.add_argument("--N", type=count, default=10**5)
    ee = en.add_mutually_exclusive_group()
    ee.add_argument("--confidence", type=float)
    ee.add_argument("--eps", type=float)

    r = sub.add_parser("reproduce", parents=[common], help="recompute reference tables and diff")
    r.add_argument("--tables", default=",".join(repro.TABLES), help="comma-separated subset of I,II,IV,V")
    return parser


# ----------------------------------------------------------------------
# shared plumbing

def _progress(msg: str):
    print(msg, file=sys.stderr, flush=True)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        _progress(f"seed: {args.seed}")
    return args.seed


def _budget(args):
    return None if args.force else DEFAULT_BUDGET


def _load_code(source: str, fmt: str, d: int | None) -> LinearCode:
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        if name not in BUILTIN:
            raise UsageError(f"unknown builtin code {name!r}; available: {', '.join(BUILTIN)}")
        code = BUILTIN[name]()
        return code if d is None else LinearCode(code.H, d, code.name)
    path = Path(source)
    if not path.exists():
        raise UsageError(f"no such matrix file: {source}")
    code = load_matrix(path.read_bytes(), fmt, d)
    return LinearCode(code.H, d, path.name)


def _emit(args, doc: dict):
    text = to_csv(doc) if args.output == "csv" else dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# commands

def cmd_bounds(args) -> dict:
    reports = []
    if args.n is not None:
        if args.k is None:
            raise UsageError("--n needs --k")
        if args.d is None:
            raise UsageError("the closed-form bounds need --d")
        r = args.n - args.k
        if not 0 < r < args.n:
            raise UsageError("need 0 < k < n")
        params = {"n": args.n, "k": args.k, "d": args.d, "r": r}
        reports += _closed_forms(args.n, r, args.d)
        if args.first_row_weight is not None:
            ell = args.d - 1
            u = u_single_row(args.n, args.first_row_weight, ell)
            for R in dict.fromkeys([r] + ([args.m] if args.m else [])):
                rep = hierarchy_bound_xi1(u, R, 1, 1, ell)
                rep.params["first_row_weight"] = args.first_row_weight
                reports.append(rep)
        return bounds_doc(reports, params)

    code = _load_code(args.code, args.format, args.d)
    r, m, n = code.r, code.m, code.n
    params = {"code": code.name, "n": n, "m": m, "r": r, "d": code.d}
    if code.d is not None:
        reports += _closed_forms(n, r, code.d)
    if args.all_ell:
        levels = list(range(1, r + 1))
    elif args.ell:
        levels = sorted(set(args.ell))
    elif code.d is not None:
        levels = [code.d - 1]
    else:
        raise UsageError("give --ell, --all-ell or --d")
    if levels[0] < 1 or levels[-1] > r:
        raise UsageError(f"hierarchy levels must lie in 1..{r}")
    R = r if args.rank_param == "r" else m
    if args.tau == "1":
        row = code.H.row_masks()[0]
        w = args.first_row_weight or row.bit_count()
        for ell in levels:
            rep = hierarchy_bound_xi1(u_single_row(n, w, ell), R, 1, 1, ell)
            rep.params["first_row_weight"] = w
            reports.append(rep)
        return bounds_doc(reports, params)
    if args.spectrum:
        spectrum = spectrum_from_doc(json.loads(Path(args.spectrum).read_text()))
        if spectrum.ell < levels[-1]:
            raise UsageError(f"spectrum file covers sizes up to {spectrum.ell} only")
    else:
        _progress(f"enumerating stopping sets up to size {levels[-1]}")
        spectrum = spectrum_exhaustive(code.H, levels[-1], coverable_only=True, budget=_budget(args))
    for ell in levels:
        reports.append(hierarchy_bound_xi1(spectrum, R, m, r, ell))
        reports.append(xi2_bound(spectrum, m, ell))
    return bounds_doc(reports, params)


def _closed_forms(n: int, r: int, d: int) -> list:
    if d < 2:
        raise UsageError("d must be at least 2")
    return [BoundReport("sv", sv_bound(r, d), {}, {"r": r, "d": d}),
            BoundReport("hs", hs_bound(n, d, r), {}, {"n": n, "r": r, "d": d})]


def _epsilons(args, ell: int, default_conf: float | None = None) -> list[float]:
    if args.eps is not None:
        if not 0 < args.eps < 1:
            raise UsageError("--eps must lie in (0, 1)")
        return [args.eps] * ell
    conf = args.confidence if args.confidence is not None else default_conf
    if conf is None:
        return [0.001] * ell
    if not 0 < conf < 1:
        raise UsageError("--confidence must lie in (0, 1)")
    return [epsilon_for_confidence(conf, ell)] * ell


def cmd_spectrum(args) -> dict:
    if args.ell < 1:
        raise UsageError("--ell must be at least 1")
    code = _load_code(args.code, args.format, args.d)
    if args.estimate:
        if args.ell > code.r:
            raise UsageError(f"--ell must not exceed r = {code.r}")
        if args.N < 1:
            raise UsageError("--N must be positive")
        res = estimate_spectrum(code, args.ell, args.N, _epsilons(args, args.ell), _seed(args))
        return estimate_doc(res)
    if args.ell > code.n:
        raise UsageError(f"--ell must not exceed n = {code.n}")
    _progress(f"enumerating subsets of size up to {args.ell}")
    spectrum = spectrum_exhaustive(code.H, args.ell, coverable_only=args.coverable, budget=_budget(args))
    return spectrum_doc(spectrum)


def cmd_greedy(args) -> dict:
    code = _load_code(args.code, args.format, args.d)
    if not 1 <= args.ell <= code.r:
        raise UsageError(f"--ell must lie in 1..{code.r}")
    if args.restarts < 1:
        raise UsageError("--restarts must be positive")
    limit = 64 if args.force else DEFAULT_ROW_SPACE_LIMIT
    res = greedy_extend(code, args.ell, _seed(args), args.restarts, row_space_limit=limit,
                        budget=_budget(args), progress=True)
    doc = greedy_doc(res.log())
    if args.matrix_out:
        Path(args.matrix_out).write_bytes(save_matrix(res.matrix, args.format))
        _progress(f"wrote {res.row_count}-row matrix to {args.matrix_out}")
    if args.audit:
        left = audit_cover(res.matrix, args.ell)
        doc["audit_uncovered"] = left
        _progress(f"audit: {left} coverable stopping sets left uncovered")
    return doc


def _profile_codes(args) -> list[tuple[str, LinearCode]]:
    if args.matrix:
        return [(Path(p).name, _load_code(p, args.format, args.d)) for p in args.matrix]
    code = _load_code(args.code, args.format, args.d)
    return [(code.name or args.code, code)]


def cmd_profile(args) -> dict:
    codes = _profile_codes(args)
    if args.compare:
        if set(args.compare.split(",")) != {"it", "ml"}:
            raise UsageError("--compare takes 'it,ml'")
        label, code = codes[0]
        top = code.n if args.w_max is None else args.w_max
        ex = 8 if args.exhaustive_to is None else args.exhaustive_to
        seed = _seed(args) if ex < min(top, code.r) else (args.seed or 0)
        cmp = compare_decoders(code.H, range(top + 1), ex, args.samples, seed)
        _progress(f"{label}: {cmp.disagreements} disagreements")
        return comparison_doc(cmp)
    decoders = DECODERS if args.decoder == "both" else (args.decoder,)
    profiles, labels = [], []
    for label, code in codes:
        ex = args.exhaustive_to
        need_seed = ex is not None and ex < min(args.w_max or code.n, code.r)
        seed = _seed(args) if need_seed else (args.seed or 0)
        for dec in decoders:
            _progress(f"{label}: {dec} profile")
            profiles.append(undecodable_profile(code.H, dec, args.w_max, ex,
                                                args.samples if need_seed else 0, seed, _budget(args)))
            labels.append(f"{label}:{dec}")
    if args.fer:
        return fer_doc(args.p_grid, {lab: [fer(pr, p) for p in args.p_grid] for lab, pr in zip(labels, profiles)})
    return profile_doc(profiles, labels)


def cmd_ensemble(args) -> dict:
    n = args.n
    if args.variant == "sre":
        if args.m is not None:
            m = args.m
        elif args.rate is not None:
            if (args.rate * n).denominator != 1:
                raise UsageError("rate * n must be an integer")
            m = n - int(args.rate * n)
        else:
            raise UsageError("sre needs --rate or --m")
        ens = EnsembleSpec.sre(n, m)
    else:
        if args.J is None or args.K is None:
            raise UsageError("gallager needs --J and --K")
        if args.J < 1 or args.K < 1 or n % args.K:
            raise UsageError("gallager needs J, K >= 1 and K dividing n")
        ens = EnsembleSpec.gallager(n, args.J, args.K)
        m = ens.m
    ell = ens.r_max if args.variant == "gallager" else m
    if not (args.analytic or args.estimate):
        args.analytic = args.variant == "sre"
        args.estimate = args.variant == "gallager"
    if args.analytic and args.variant != "sre":
        raise UsageError("the analytic average is available for the sre ensemble only")
    row = {"variant": ens.variant, "n": n, "m": m, "J": ens.J or None, "K": ens.K or None,
           "ell": ell, "r_max": ens.r_max, "rho": None, "rho_hat": None}
    out = {}
    if args.analytic:
        rep = ensemble_bound(sre_mean_spectrum(n, m, ell), m, ell)
        row["rho"] = float(rep.value)
        out["analytic_witness"] = rep.witness
    if args.estimate:
        if ell > 64:
            raise UsageError("estimates support ell <= 64")
        eps = _epsilons(args, ell, default_conf=0.95)
        _progress(f"sampling {args.N} matrices per size 1..{ell}")
        res = estimate_ensemble_spectrum(ens, ell, args.N, eps, _seed(args))
        rep = ensemble_bound(res.u_hat, m, ell)
        row["rho_hat"] = float(rep.value)
        row["epsilon_percent"] = 100.0 * eps[0]
        row["confidence"] = res.confidence
        out["estimate"] = estimate_doc(res)
    return ensemble_doc([row], {"variant": ens.variant, "n": n, "m": m, "J": ens.J, "K": ens.K}) | out


def cmd_reproduce(args) -> tuple[dict, int]:
    tables = [t.strip() for t in args.tables.split(",") if t.strip()]
    bad = [t for t in tables if t not in repro.TABLES]
    if bad:
        raise UsageError(f"unknown tables {bad}; choose from {', '.join(repro.TABLES)}")
    cells = repro.run(tables, progress=_progress)
    doc = repro.reproduce_doc(cells)
    if args.output is None and not args.out:
        for c in cells:
            print(c.line())
        print(f"{doc['passed']} passed, {doc['failed']} failed")
    return doc, 1 if doc["failed"] else 0


COMMANDS = {"bounds": cmd_bounds, "spectrum": cmd_spectrum, "greedy": cmd_greedy, "profile": cmd_profile,
            "ensemble": cmd_ensemble}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    set_threads(args.threads)
    t0 = time.perf_counter()
    try:
        if args.command == "reproduce":
            doc, status = cmd_reproduce(args)
            if args.output is not None or args.out:
                _emit(args, doc)
            return status
        doc = COMMANDS[args.command](args)
    except (UsageError, MatrixFormatError, BudgetExceededError, RowSpaceTooLargeError, ValueError) as exc:
        hint = " (use --force to lift the limit)" if isinstance(exc, (BudgetExceededError, RowSpaceTooLargeError)) else ""
        print(f"stopred {args.command}: error: {exc}{hint}", file=sys.stderr)
        return 2
    _emit(args, doc)
    _progress(f"done in {time.perf_counter() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
