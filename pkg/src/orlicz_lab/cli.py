"""Command-line interface: ``orlicz-lab {analyze,build-psi,check,simulate,reproduce}``.

Every command writes ``report.json`` (validated against the bundled schema)
and its CSV curves into ``--out``.  Exit status is 0 on success, 1 when a
reproduce bundle misses a band, and 2 on malformed input or a failed
precondition.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import presets
from .criteria import dilation_condition, strongly_embedded_verdict
from .exceptions import OrliczLabError, InvariantViolation, NotInSpace, PreconditionError, RangeError
from .indices import index_at_infinity, index_at_zero
from .mc_sim import (CopySpec, coefficient_corpus, empirical_luxemburg, equicontinuity_modulus,
                     js_check, sample_copies, _threads)
from .measure_ops import function_from_dict
from .norms import fundamental_Lm, fundamental_seq
from .orlicz_core import (conjugate, delta2_constant, from_dict, p_convexity_check, to_dict)
from .report import RunConfig, build_report, write_csv, write_report
from .reproduce import BUNDLES, CHECKS
from .span_builder import build_psi


class InputError(Exception):
    """Malformed or inconsistent command-line input; reported as a diagnostic."""


def _load_json(path, what):
    if path is None:
        raise InputError(f"{what} is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} {path}: parse error at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{what} {path}: {exc.strerror}") from None


def _load_M(args):
    if args.spec is None and args.preset:
        return presets.get(args.preset).M
    try:
        return from_dict(_load_json(args.spec, "--spec"))
    except (InvariantViolation, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"--spec {args.spec}: {exc}") from None


def _load_f(args):
    if args.f_spec is None and args.preset:
        f = presets.get(args.preset).f
        if f is None:
            raise InputError(f"preset {args.preset!r} has no single function f")
        return f
    try:
        return function_from_dict(_load_json(args.f_spec, "--f-spec"))
    except (InvariantViolation, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"--f-spec {args.f_spec}: {exc}") from None


def _safe(fn, diagnostics, label):
    try:
        return fn()
    except (OrliczLabError, ValueError) as exc:
        diagnostics.append(f"{label}: {exc}")
        return None


# ---------------------------------------------------------------- commands

def cmd_analyze(args, cfg):
    M = _load_M(args)
    diag, files, res = [], [], {"spec": to_dict(M)}
    idx = {}
    for regime, fn in (("zero", index_at_zero), ("infinity", index_at_infinity)):
        est = _safe(lambda: fn(M, t_decades=args.decades), diag, f"indices at {regime}")
        if est is not None:
            idx[regime] = {"alpha": est[0].to_dict(), "beta": est[1].to_dict()}
    res["indices"] = idx
    d2 = {}
    for regime in ("at-zero", "at-infinity", "global"):
        r = _safe(lambda: delta2_constant(M, regime, args.decades), diag, f"delta2 {regime}")
        if r is not None:
            d2[regime] = {"value": r.value, "argmax": r.argmax, "unbounded": r.unbounded}
    res["delta2"] = d2
    u = np.logspace(-2, 2, 9)
    conj = [conjugate(M, x) for x in u]
    res["conjugate"] = {"u": u, "value": [c.value for c in conj], "status": [c.status for c in conj]}
    t = np.logspace(np.log10(args.tmin), np.log10(args.tmax), 61)
    phi = _safe(lambda: fundamental_Lm(M, t), diag, "fundamental function")
    res["fundamental"] = {"t": t, "phi": phi}
    cert = {}
    for p, concave in ((1.0, False), (2.0, True)):
        c = _safe(lambda: p_convexity_check(M, p, "at-zero", concave), diag, f"{p:g}-convexity")
        if c is not None:
            key = f"{'concave' if concave else 'convex'}_p{p:g}_at-zero"
            cert[key] = {"holds": c.holds, "C": c.C, "witness": list(c.witness)}
    res["p_convexity"] = cert
    if args.out:
        files.append(write_csv(os.path.join(args.out, "conjugate.csv"), ["u", "conjugate"],
                               [u, res["conjugate"]["value"]]))
        if phi is not None:
            files.append(write_csv(os.path.join(args.out, "fundamental.csv"), ["t", "phi_LM"], [t, phi]))
    return res, "ok", None, diag, files


def cmd_build_psi(args, cfg):
    M, f = _load_M(args), _load_f(args)
    try:
        psi = build_psi(M, f)
    except NotInSpace as exc:
        raise PreconditionError(str(exc)) from None
    diag, files = [], []
    a, b = index_at_zero(psi)
    n = 2.0 ** np.arange(21)
    res = {"psi": to_dict(psi), "alpha_zero": a.to_dict(), "beta_zero": b.to_dict(),
           "fundamental": {"n": n, "phi": [fundamental_seq(psi, k) for k in n]}}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "psi.json")
        with open(path, "w") as fh:
            json.dump(to_dict(psi), fh)
        files.append(path)
        u = np.logspace(np.log10(args.tmin), np.log10(args.tmax), 121)
        files.append(write_csv(os.path.join(args.out, "psi.csv"), ["u", "psi"], [u, psi(u)]))
    return res, "ok", None, diag, files


def cmd_check(args, cfg):
    M, f = _load_M(args), _load_f(args)
    psi = None
    if args.psi:
        psi = from_dict(_load_json(args.psi, "--psi"))
    v = strongly_embedded_verdict(M, f, psi)
    dil = dilation_condition(M, f, band=args.band)
    files = []
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        files.append(write_csv(os.path.join(args.out, "dilation.csv"), ["n", "LM_norm", "L1_norm"],
                               [dil.grid, dil.lhs, dil.rhs]))
    return {"verdict": v.to_dict(), "dilation": dil.to_dict()}, "ok", None, [], files


def cmd_simulate(args, cfg):
    name = args.preset
    files, res = [], {}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    if name == "rademacher":
        pre = presets.rademacher()
        batch = sample_copies(pre.copies, args.paths, args.seed)
        corpus = coefficient_corpus(args.corpus, pre.copies.count, args.seed)
        emp = [empirical_luxemburg(pre.M, a, batch) for a in corpus]
        exact = [float(np.linalg.norm(a)) for a in corpus]
        res["corpus"] = {"empirical": [e.value for e in emp], "se": [e.se for e in emp],
                         "exact": exact}
        if args.out:
            files.append(write_csv(os.path.join(args.out, "corpus.csv"),
                                   ["profile", "empirical", "bootstrap_se", "l2_norm"],
                                   [np.arange(len(corpus)), res["corpus"]["empirical"],
                                    res["corpus"]["se"], exact]))
        return res, "ok", None, [], files
    if name == "counterexample":
        pre = presets.counterexample()
        curve = equicontinuity_modulus(pre.M, None, pre.copies, 2.0 ** -np.arange(1, 17),
                                       ball_sample_size=args.ball_size, N=args.paths, seed=args.seed)
    else:
        M, f = _load_M(args), _load_f(args)
        try:
            psi = build_psi(M, f)
        except NotInSpace as exc:
            raise PreconditionError(str(exc)) from None
        corpus = coefficient_corpus(args.corpus, 16, args.seed)
        rep = js_check(M, f, corpus, N=args.paths, seed=args.seed, band=args.band)
        res["js"] = {**rep.to_dict(), "se": rep.se}
        if args.out:
            files.append(write_csv(os.path.join(args.out, "corpus.csv"),
                                   ["support", "empirical", "bootstrap_se", "disjoint_sum"],
                                   [rep.grid, rep.lhs, rep.se, rep.rhs]))
        curve = equicontinuity_modulus(M, psi, CopySpec.identical(f, 8), 2.0 ** -np.arange(1, 21),
                                       ball_sample_size=args.ball_size, N=args.paths, seed=args.seed)
    res["modulus"] = curve.to_dict()
    if args.out:
        files.append(write_csv(os.path.join(args.out, "modulus.csv"), ["delta", "modulus"],
                               [curve.delta, curve.modulus]))
    return res, "ok", None, [], files


def cmd_reproduce(args, cfg):
    if args.name not in BUNDLES:
        raise InputError(f"unknown example {args.name!r}; choose from {sorted(BUNDLES)}")
    checks = [CHECKS[k]() for k in BUNDLES[args.name]]
    for c in checks:
        print(c.line())
    status = "ok" if all(c.passed for c in checks) else "band-violation"
    return {"bundle": args.name}, status, [c.to_dict() for c in checks], [], []


COMMANDS = {"analyze": cmd_analyze, "build-psi": cmd_build_psi, "check": cmd_check,
            "simulate": cmd_simulate, "reproduce": cmd_reproduce}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="Orlicz function JSON file")
    common.add_argument("--f-spec", dest="f_spec", help="function-on-(0,1] JSON file")
    common.add_argument("--preset", choices=sorted(presets.PRESETS), help="named parameter set")
    common.add_argument("--out", help="output directory for report.json and CSV files")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--paths", type=int, default=100_000, help="Monte Carlo paths")
    common.add_argument("--decades", type=int, default=12, help="decades used for index fits")
    common.add_argument("--tmin", type=float, default=1e-12, help="lower end of sampled t-grids")
    common.add_argument("--tmax", type=float, default=1.0, help="upper end of sampled t-grids")
    common.add_argument("--band", type=float, default=10.0, help="ratio band for equivalences")

    p = argparse.ArgumentParser(prog="orlicz-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="indices, doubling constants, conjugate samples")
    sub.add_parser("build-psi", parents=[common], help="tabulate psi for a pair (M, f)")
    c = sub.add_parser("check", parents=[common], help="strong embedding and equicontinuity verdicts")
    c.add_argument("--psi", help="previously built psi JSON file")
    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo norms and moduli")
    s.add_argument("--corpus", type=int, default=50, help="number of coefficient profiles")
    s.add_argument("--ball-size", type=int, default=16, help="directions per unit-ball family")
    r = sub.add_parser("reproduce", parents=[common], help="run a worked example with its bands")
    r.add_argument("name", help="example1, example2, l2-theorem or counterexample")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, args.spec, args.f_spec, args.preset, args.out, args.seed,
                    args.paths, args.decades, args.tmin, args.tmax, args.band, _threads())
    try:
        if args.tmin <= 0 or args.tmax <= args.tmin:
            raise InputError("need 0 < --tmin < --tmax")
        if args.command == "simulate" and not (args.preset or (args.spec and args.f_spec)):
            raise InputError("simulate needs --preset or both --spec and --f-spec")
        results, status, checks, diag, files = COMMANDS[args.command](args, cfg)
    except (InputError, PreconditionError, InvariantViolation, RangeError) as exc:
        kind = "precondition" if isinstance(exc, PreconditionError) else "input"
        doc = build_report(cfg, {}, "error", diagnostics=[f"{kind}: {exc}"])
        if args.out:
            write_report(doc, args.out)
        print(f"orlicz-lab: {kind} error: {exc}", file=sys.stderr)
        return 2
    doc = build_report(cfg, results, status, checks, diag, files)
    if args.out:
        path = write_report(doc, args.out)
        print(f"report written to {path}")
    else:
        print(json.dumps(doc, indent=2, sort_keys=True))
    return 1 if status == "band-violation" else 0


if __name__ == "__main__":
    sys.exit(main())
