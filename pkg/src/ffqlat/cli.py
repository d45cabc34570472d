"""Command line interface: ``ffqlat <command> [options]``.

Exit codes: 0 success (or the checked claim holds), 1 claim violated or
answer negative, 2 work budget exceeded, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys

from .errors import BudgetExceeded, FFQLatError, InsufficientBound
from .io import atomic_write, field_from, load_form, load_json, poly_from, systems_from_json

EXIT_OK, EXIT_CLAIM, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


def _field(args):
    return field_from(None, args.q, args.field_modulus) if args.q else None


def _form(args, path):
    return load_form(path, _field(args))


def _emit(args, obj):
    text = json.dumps(obj, sort_keys=True) + "\n"
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _gram_text(L):
    return [[str(e) for e in r] for r in L.gram.entries]


def _matrix_ints(U):
    return [[e.to_ints() for e in r] for r in U.entries]


def _patterns(text):
    if not text:
        return None
    return [tuple(int(x) for x in p.split(",")) for p in text.split(";") if p.strip()]


# -- commands ----------------------------------------------------------------------------

def cmd_reduce(args):
    from .qform import reduce, successive_minima

    L = _form(args, args.form)
    S, U = reduce(L)
    _emit(args, {"reduced": S.to_json(), "reduced_text": _gram_text(S), "U": _matrix_ints(U),
                 "minima": list(successive_minima(S))})
    return EXIT_OK


def cmd_minima(args):
    from .qform import successive_minima
    from .spectrum import dim_series, minima_from_dims

    L = _form(args, args.form)
    mu = list(successive_minima(L))
    out = {"minima": mu}
    if args.check:
        dims = dim_series(L, max(mu) + 2, args.budget)
        out["minima_from_spectrum"] = list(minima_from_dims(dims, L.n))
    _emit(args, out)
    return EXIT_OK if out.get("minima_from_spectrum", mu) == mu else EXIT_CLAIM


def cmd_spectrum(args):
    from .qform import reduce
    from .spectrum import SpectrumCache, enumerate_spectrum

    L = reduce(_form(args, args.form))[0]
    if args.cache:
        S = SpectrumCache(args.cache).get(L, args.bound, args.budget)
    else:
        S = enumerate_spectrum(L, args.bound, args.budget)
    _emit(args, S.to_json(L.content_hash()))
    return EXIT_OK


def cmd_isometric(args):
    from .isometry import isometric

    L, L2 = _form(args, args.a), _form(args, args.b)
    w = isometric(L, L2, genus_check=args.genus_check)
    out = {"isometric": w is not None}
    if w is not None and args.witness:
        out["U"] = _matrix_ints(w.full)
        out["C_reduced"] = [list(r) for r in w.U]
    _emit(args, out)
    return EXIT_OK if w is not None else EXIT_CLAIM


def cmd_auto(args):
    from .isometry import automorphism_group

    G = automorphism_group(_form(args, args.form))
    out = {"order": len(G)}
    if args.elements:
        out["elements"] = [[list(r) for r in C] for C in G]
    _emit(args, out)
    return EXIT_OK


def _symbol_json(sym):
    monic, cls, syms, inf = sym
    return {"det_monic": monic.to_ints(), "det_class": cls,
            "local": [s.to_json() for s in syms], "infinity": list(inf)}


def cmd_genus(args):
    from .localdata import genus_symbol

    L, L2 = _form(args, args.a), _form(args, args.b)
    s1, s2 = genus_symbol(L), genus_symbol(L2)
    _emit(args, {"a": _symbol_json(s1), "b": _symbol_json(s2), "same_genus": s1 == s2})
    return EXIT_OK


def cmd_local(args):
    from .localdata import audibility_experiment

    L = _form(args, args.form)
    pi = poly_from(L.F, args.prime)
    res = audibility_experiment(L, pi, args.kmax, budget=args.budget)
    _emit(args, res)
    return EXIT_OK if res["magnitudes_match"] else EXIT_CLAIM


def cmd_theta(args):
    from .theta import ThetaPoint, theta_eval

    L = _form(args, args.form)
    z = ThetaPoint.canonical(L.F, args.m, poly_from(L.F, args.x), args.shift)
    v = theta_eval(L, z, args.method, args.budget)
    c = v.to_complex()
    _emit(args, {"m": args.m, "x": args.x, "shift": args.shift, "value": v.to_json(),
                 "complex": [c.real, c.imag]})
    return EXIT_OK


def cmd_check_fe(args):
    from .qform import reduce
    from .spectrum import enumerate_spectrum
    from .theta import (functional_equation_sides, random_canonical_point, theta_eval,
                        theta_from_spectrum)

    L = reduce(_form(args, args.form))[0]
    rng = random.Random(args.seed)
    rows, worst, exact = [], 0.0, True
    for i in range(args.trials):
        m = rng.randint(1, args.max_m)
        z = random_canonical_point(L.F, m, args.max_deg, rng)
        lhs, rhs = functional_equation_sides(L, z, budget=args.budget)
        res = abs(lhs - rhs)
        c = z.cutoff()
        th = theta_eval(L, z, budget=args.budget)
        S = enumerate_spectrum(L, max(c, 0), args.budget)
        same = th == theta_from_spectrum(S, z)
        worst, exact = max(worst, res), exact and same
        rows.append({"trial": i, "m": m, "x": {str(k): v for k, v in sorted(z.x.terms.items())},
                     "residual": res, "fourier_exact": same})
    out = {"trials": args.trials, "max_residual": worst, "tol": args.tol,
           "fourier_exact": exact, "samples": rows}
    _emit(args, out)
    return EXIT_OK if worst < args.tol and exact else EXIT_CLAIM


def cmd_gauss(args):
    from .fieldsums import FqQuadSpace, gauss_sum

    d = load_json(args.matrix)
    F = field_from(d.get("field"), args.q, args.field_modulus) if isinstance(d, dict) else _field(args)
    if F is None:
        raise ValueError("gauss needs --q or a field in the JSON")
    M = d["matrix"] if isinstance(d, dict) else d
    W = FqQuadSpace(F, [[int(x) for x in r] for r in M])
    direct = gauss_sum(W, "direct", args.budget)
    closed = gauss_sum(W, "closed")
    c = direct.to_complex()
    _emit(args, {"value": direct.to_json(), "complex": [c.real, c.imag], "rank": W.rank,
                 "det_class": W.det_class(), "closed_form_agrees": direct == closed})
    return EXIT_OK if direct == closed else EXIT_CLAIM


def cmd_carlitz(args):
    from .fieldsums import bruteforce_isospectral, carlitz_isospectral

    F, (P1, P2) = systems_from_json(load_json(args.systems), _field(args))
    if F is None:
        raise ValueError("carlitz needs --q or a field in the JSON")
    iso = carlitz_isospectral(P1, P2, args.budget)
    out = {"isospectral": iso}
    if args.check:
        out["bruteforce"] = bruteforce_isospectral(P1, P2, args.budget)
    _emit(args, out)
    if args.check and out["bruteforce"] != iso:
        return EXIT_CLAIM
    return EXIT_OK if iso else EXIT_CLAIM


def cmd_enumerate(args):
    from .harness import enumerate_reduced_forms

    F = _field(args)
    if F is None:
        raise ValueError("enumerate needs --q")
    count = 0
    lines = []
    for L in enumerate_reduced_forms(F, args.rank, args.max_mu, args.budget, _patterns(args.patterns)):
        count += 1
        if not args.count:
            lines.append(json.dumps(L.to_json(), sort_keys=True))
    if args.count:
        text = f"{count}\n"
    else:
        text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _config(args, rank):
    from .harness import SearchConfig

    if not args.q:
        raise ValueError("--q is required")
    return SearchConfig(q=args.q, rank=rank, max_mu3=args.max_mu, patterns=_patterns(args.patterns),
                        initial_bound=args.initial_bound, cap_extra=args.cap_extra,
                        budget=args.budget, max_forms=args.max_forms, seed=args.seed,
                        checkpoint=args.checkpoint, output=args.out, jobs=args.jobs,
                        field_modulus=args.field_modulus)


def _run_sweep(args, fn, rank):
    from .report import summary_tsv, write_report

    rep = fn(_config(args, rank))
    if args.out:
        write_report(rep, args.out, figures=not args.no_figures)
    sys.stdout.write(summary_tsv(rep))
    sys.stdout.write(rep.findings_jsonl())
    return EXIT_OK if rep.holds() else EXIT_CLAIM


def cmd_verify(args):
    from .harness import verify_theorems

    return _run_sweep(args, verify_theorems, 3)


def cmd_search(args):
    from .harness import search_isospectral

    rc = _run_sweep(args, search_isospectral, args.rank)
    return rc


# -- parser ------------------------------------------------------------------------------

def _modulus(text):
    return [int(x) for x in text.split(",")]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--q", type=int, help="field order (if the JSON carries no field)")
    g.add_argument("--field-modulus", type=_modulus, default=None,
                   help="comma separated little-endian modulus for F_{p^e}")
    g.add_argument("--budget", type=int, default=20_000_000, help="work budget per enumeration")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--checkpoint", default=None)
    g.add_argument("--out", default=None, help="output file (directory for verify/search)")
    g.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ffqlat", description="Definite quadratic lattices over F_q[t]")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("reduce", cmd_reduce, "reduce a Gram matrix")
    sp.add_argument("--form", required=True)
    sp = add("minima", cmd_minima, "successive minima")
    sp.add_argument("--form", required=True)
    sp.add_argument("--check", action="store_true", help="also recover them from the spectrum")
    sp = add("spectrum", cmd_spectrum, "representation numbers up to a degree bound")
    sp.add_argument("--form", required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--cache", default=None, help="spectrum cache directory")
    sp = add("isometric", cmd_isometric, "decide isometry (exit 0 yes, 1 no)")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--witness", action="store_true")
    sp.add_argument("--genus-check", action="store_true")
    sp = add("auto", cmd_auto, "automorphism group")
    sp.add_argument("--form", required=True)
    sp.add_argument("--elements", action="store_true")
    sp = add("genus", cmd_genus, "genus symbols of two forms")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp = add("local", cmd_local, "local averages at a prime and the Jordan data they reveal")
    sp.add_argument("--form", required=True)
    sp.add_argument("--prime", required=True)
    sp.add_argument("--kmax", type=int, default=4)
    sp = add("theta", cmd_theta, "exact theta value at (t^-m, x t^shift)")
    sp.add_argument("--form", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--shift", type=int, default=0)
    sp.add_argument("--method", choices=["auto", "vectors", "gauss"], default="auto")
    sp = add("check-fe", cmd_check_fe, "functional equation on random points")
    sp.add_argument("--form", required=True)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--max-m", type=int, default=3)
    sp.add_argument("--max-deg", type=int, default=2)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp = add("gauss", cmd_gauss, "Gauss sum of a form over F_q")
    sp.add_argument("--matrix", required=True)
    sp = add("carlitz", cmd_carlitz, "isospectrality of two systems of F_q-forms")
    sp.add_argument("--systems", required=True)
    sp.add_argument("--check", action="store_true", help="cross-check by brute force")
    sp = add("enumerate", cmd_enumerate, "definite reduced forms with bounded minima")
    sp.add_argument("--rank", type=int, default=3)
    sp.add_argument("--max-mu", type=int, default=1)
    sp.add_argument("--patterns", default=None, help='e.g. "0,1,1;1,1,2"')
    sp.add_argument("--count", action="store_true")
    for name, fn, h in (("verify", cmd_verify, "check that isospectral ternary forms are isometric"),
                        ("search", cmd_search, "search for isospectral non-isometric forms")):
        sp = add(name, fn, h)
        if name == "search":
            sp.add_argument("--rank", type=int, default=3)
        sp.add_argument("--max-mu", type=int, default=2)
        sp.add_argument("--patterns", default=None)
        sp.add_argument("--initial-bound", type=int, default=None)
        sp.add_argument("--cap-extra", type=int, default=2)
        sp.add_argument("--max-forms", type=int, default=50_000_000)
        sp.add_argument("--no-figures", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except (BudgetExceeded, InsufficientBound) as e:
        print(f"budget: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (FFQLatError, ValueError, KeyError, TypeError, OSError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
