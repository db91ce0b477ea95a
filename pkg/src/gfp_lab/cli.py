"""``gfp-lab`` command line.

Exit codes: 0 success, 2 usage error or violated precondition, 1 anything else.
Rationals are printed as ``"num/den"`` strings, reals with shortest
round-trip ``repr`` digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from . import gfp, markov, ortho, roots, spectral
from .errors import GfpError
from .polycore import as_fraction

OK, INTERNAL, USAGE = 0, 1, 2


@dataclass
class Table:
    header: list[str]
    rows: list[list[Any]]


class UsageError(Exception):
    pass


# serialization -------------------------------------------------------------------

def _plain(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _cell(v) -> str:
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def _emit(result, fmt: str, out) -> None:
    if isinstance(result, Table):
        if fmt == "json":
            out.write(json.dumps([dict(zip(result.header, map(_plain, r))) for r in result.rows],
                                 indent=2) + "\n")
            return
        rows = [result.header] + [[_cell(v) for v in r] for r in result.rows]
    else:
        if fmt == "json":
            out.write(json.dumps(_plain(result), indent=2) + "\n")
            return
        rows = [["key", "value"]] + [[k, _cell(v)] for k, v in result.items()]
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        out.write(buf.getvalue())
    else:
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        for r in rows:
            out.write("  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip() + "\n")


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _family(args) -> gfp.GfpFamily:
    if args.family_file:
        try:
            text = Path(args.family_file).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.family_file}: {exc}") from exc
    else:
        text = args.family
    try:
        return gfp.resolve_family(text)
    except GfpError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        # unknown name, malformed JSON or bad coefficient strings
        raise UsageError(str(exc).strip('"')) from exc


def _chain(args):
    if args.k is not None:
        return markov.generator_from_lucas(args.c, args.k)
    if args.h is None:
        raise UsageError("one of --h (discrete) or --k (continuous) is required")
    return markov.walk_from_lucas(args.c, args.h)


# subcommands -------------------------------------------------------------------

def cmd_registry(args):
    fams = gfp.registry() if args.all else gfp.registry_table1()
    return Table(["name", "kind", "d", "g", "p0", "p1"],
                 [[f.name, f.kind.value, str(f.d), str(f.g),
                   "" if f.p0 is None else f.p0, "" if f.p1 is None else str(f.p1)] for f in fams])


def cmd_generate(args):
    f = _family(args)
    seq = gfp.generate(f, args.n)
    return {"family": gfp.family_to_json(f), "terms": [t.to_strings() for t in seq.terms]}


def cmd_expand(args):
    f = _family(args)
    rec = gfp.term(f, args.n)
    exp = gfp.expand(f, args.n)
    return {"family": gfp.family_to_json(f), "n": args.n, "recurrence": rec.to_strings(),
            "expansion": exp.to_strings(), "equal": rec == exp}


def cmd_binet(args):
    f = _family(args)
    parts = gfp.binet_parts(f, args.x)
    return {"family": gfp.family_to_json(f), "n": args.n, "x": args.x,
            "binet": gfp.binet_eval(f, args.n, args.x),
            "recurrence": gfp.term(f, args.n)(args.x),
            "a": parts.a_val, "b": parts.b_val, "disc": parts.disc}


def cmd_roots(args):
    f = _family(args)
    rs = roots.gfp_roots(f, args.n, args.tol)
    return {"family": gfp.family_to_json(f), "n": args.n, "roots": rs.as_records()}


def cmd_classify(args):
    f = _family(args)
    v = ortho.classify(f, args.n, args.tol)
    out = {"family": gfp.family_to_json(f), "verdict": v.verdict.value,
           "criterion": v.criterion, "reason": v.reason, "max_offdiag": v.max_offdiag}
    if v.weight is not None:
        out["weight"] = {"kind": v.weight.density_kind.value, "G": v.weight.big_g,
                         "support": list(v.weight.support),
                         "normalization": v.weight.normalization}
    return out


def cmd_gram(args):
    f = _family(args)
    w = ortho.build_weight(f)
    gm = ortho.gram(f, w, args.n)
    idx = list(gm.indices)
    return Table(["index"] + [str(i) for i in idx],
                 [[i] + [float(v) for v in row] for i, row in zip(idx, gm.entries)])


def _chain_record(ch) -> dict:
    if isinstance(ch, markov.DiscreteChain):
        return {"type": "discrete", "c": ch.c, "h": ch.h, "p0": ch.p0, "r0": ch.r0,
                "q0": ch.q0, "p": ch.p, "r": ch.r, "q": ch.q}
    return {"type": "continuous", "c": ch.c, "k": ch.k, "lambda0": ch.lam0,
            "lambda": ch.lam, "mu0": ch.mu0, "mu": ch.mu, "beta0": ch.beta0, "beta": ch.beta}


def _verdict_record(v: markov.ErgodicityVerdict) -> dict:
    return {"chain_kind": v.chain_kind.value, "verdict": v.verdict.value,
            "series": "Divergent" if v.series_value is None else v.series_value,
            "ratio": v.ratio, "sufficient_window": v.sufficient_window}


def _chain_report(ch, rows: int) -> dict:
    pc = markov.potential_coefficients(ch, rows)
    return {"chain": _chain_record(ch), "matrix": ch.matrix_exact(rows),
            "pi": list(pc.pi), "ergodicity": _verdict_record(markov.ergodicity(ch, rows))}


def cmd_walk(args):
    return _chain_report(markov.walk_from_lucas(args.c, args.h), args.rows)


def cmd_generator(args):
    return _chain_report(markov.generator_from_lucas(args.c, args.k), args.rows)


def cmd_ergodicity(args):
    return _verdict_record(markov.ergodicity(_chain(args), args.rows))


def cmd_km(args):
    ch = _chain(args)
    results = []
    if isinstance(ch, markov.DiscreteChain):
        if args.n is None:
            raise UsageError("--n is required for a discrete chain")
        n = args.n
        results.append(spectral.km_discrete(ch, args.i, args.j, n))
        if args.oracle == "power":
            size = max(spectral.DISCRETE_TRUNCATION, max(args.i, args.j) + n + 1)
            val = float(spectral.power_oracle(ch, size, n, max(args.i, args.j))[args.i, args.j])
            results.append(spectral.TransitionResult(args.i, args.j, n, val, spectral.Method.MATRIX_POWER))
        elif args.oracle == "mc":
            emp = spectral.mc_simulate(ch, args.i, n, args.trials, args.seed)
            results.append(emp.result(args.j))
        elif args.oracle == "expm":
            raise UsageError("--oracle expm applies to continuous generators only")
    else:
        if args.t is None:
            raise UsageError("--t is required for a continuous generator")
        results.append(spectral.km_continuous(ch, args.i, args.j, args.t))
        if args.oracle == "expm":
            val = float(spectral.expm_oracle(ch, args.t)[args.i, args.j])
            results.append(spectral.TransitionResult(args.i, args.j, args.t, val,
                                                     spectral.Method.MATRIX_EXPONENTIAL))
        elif args.oracle is not None:
            raise UsageError(f"--oracle {args.oracle} applies to discrete chains only")
    return Table(["i", "j", "horizon", "value", "method", "error_bar"],
                 [[r.i, r.j, r.horizon, r.value, r.method.value, r.error_bar] for r in results])


def cmd_simulate(args):
    ch = markov.walk_from_lucas(args.c, args.h)
    emp = spectral.mc_simulate(ch, args.i, args.n, args.trials, args.seed)
    return Table(["state", "count", "frequency", "stderr"], [list(r) for r in emp.rows()])


# parser -------------------------------------------------------------------

def _add_family(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--family", help="registry name or inline JSON family spec")
    g.add_argument("--family-file", help="path to a JSON family spec")


def _add_chain(p, continuous=True):
    p.add_argument("--c", type=_rational, required=True, help="slope of d(x) = c x + ...")
    if continuous:
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--h", type=_rational, help="discrete chain: d(x) = c x + h")
        g.add_argument("--k", type=_rational, help="continuous generator: g = -k/4")
    else:
        p.add_argument("--h", type=_rational, required=True, help="d(x) = c x + h")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gfp-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, fn, help_, fmt="json"):
        p = sub.add_parser(name, help=help_, description=help_)
        p.set_defaults(func=fn)
        p.add_argument("--format", choices=["json", "csv", "table"], default=fmt,
                       help=f"output format (default {fmt})")
        return p

    p = add("registry", cmd_registry, "list the registered families")
    p.add_argument("--all", action="store_true", help="include the Jacobsthal pair as well")

    p = add("generate", cmd_generate, "terms G_0..G_n by the recurrence")
    _add_family(p)
    p.add_argument("--n", type=int, required=True, help="last index")

    p = add("expand", cmd_expand, "binomial closed form of G_n, compared with the recurrence")
    _add_family(p)
    p.add_argument("--n", type=int, required=True, help="index")

    p = add("binet", cmd_binet, "Binet evaluation of G_n at a complex point")
    _add_family(p)
    p.add_argument("--n", type=int, required=True, help="index")
    p.add_argument("--x", type=_complex, required=True, help="evaluation point, e.g. 0.5+1j")

    p = add("roots", cmd_roots, "roots of G_n from the classical root lattice")
    _add_family(p)
    p.add_argument("--n", type=int, required=True, help="index")
    p.add_argument("--tol", type=float, default=1e-8, help="residual tolerance (default 1e-8)")

    p = add("classify", cmd_classify, "orthogonality verdict with certifying weight")
    _add_family(p)
    p.add_argument("--n", type=int, default=10, help="largest index in the Gram check (default 10)")
    p.add_argument("--tol", type=float, default=1e-8, help="off-diagonal tolerance (default 1e-8)")

    p = add("gram", cmd_gram, "Gram matrix under the Chebyshev-substitution weight", fmt="csv")
    _add_family(p)
    p.add_argument("--n", type=int, default=10, help="largest index (default 10)")

    p = add("walk", cmd_walk, "discrete random walk induced by d = c x + h")
    _add_chain(p, continuous=False)
    p.add_argument("--rows", type=int, default=5, help="matrix rows and pi terms shown (default 5)")

    p = add("generator", cmd_generator, "continuous-time generator induced by d = c x + (k+4)/4")
    p.add_argument("--c", type=_rational, required=True, help="slope (negative)")
    p.add_argument("--k", type=_rational, required=True, help="g = -k/4")
    p.add_argument("--rows", type=int, default=5, help="matrix rows and pi terms shown (default 5)")

    p = add("ergodicity", cmd_ergodicity, "ergodicity verdict from the potential coefficients")
    _add_chain(p)
    p.add_argument("--rows", type=int, default=20, help="pi terms computed (default 20)")

    p = add("km", cmd_km, "Karlin-McGregor transition probability, optionally with an oracle")
    _add_chain(p)
    p.add_argument("--i", type=int, default=0, help="start state (default 0)")
    p.add_argument("--j", type=int, default=0, help="end state (default 0)")
    p.add_argument("--n", type=int, help="steps (discrete)")
    p.add_argument("--t", type=float, help="time (continuous)")
    p.add_argument("--oracle", choices=["power", "mc", "expm"], help="independent check to add")
    p.add_argument("--trials", type=int, default=1_000_000, help="Monte Carlo trials (default 1e6)")
    p.add_argument("--seed", type=int, default=42, help="Monte Carlo seed (default 42)")

    p = add("simulate", cmd_simulate, "Monte Carlo end-state distribution of the discrete walk", fmt="csv")
    p.add_argument("--c", type=_rational, default=Fraction(16), help="slope (default 16)")
    p.add_argument("--h", type=_rational, default=Fraction(-14), help="intercept (default -14)")
    p.add_argument("--i", type=int, default=0, help="start state (default 0)")
    p.add_argument("--n", type=int, default=10, help="steps (default 10)")
    p.add_argument("--trials", type=int, default=1_000_000, help="number of walks (default 1e6)")
    p.add_argument("--seed", type=int, default=42, help="seed (default 42)")
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except (GfpError, UsageError) as exc:
        print(f"gfp-lab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"gfp-lab {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL
    _emit(result, args.format, out)
    return OK


if __name__ == "__main__":
    sys.exit(main())
