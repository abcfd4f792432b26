"""Command-line front end: every operation as a file-based subcommand.

Each subcommand is a pure input -> output transform.  Output JSON embeds
a run manifest (subcommand, input digests, seed, version, wall clock) so
identical manifests imply identical outputs.  Exit codes: 0 success,
2 validation failure, 3 numerical failure, 64 usage error.
"""

import argparse
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .barycenter import Barycenter, solve_barycenter
from .constraints import ConstraintSystem, positivize, validate
from .diagnostics import (
    BoxLaw,
    InstanceRecipe,
    SamplerConfig,
    TableLaw,
    clt_experiment,
    marginal_experiment,
    random_instance,
)
from .errors import (
    DenominatorTooSmall,
    DimensionTooLarge,
    DomainViolation,
    EmptyInterior,
    GramSingular,
    NotCompact,
    NotPositivized,
    PartitionNotFound,
    PolycltError,
    QuadratureBudgetExceeded,
    RankDeficient,
    SigmaZero,
    SupportViolation,
)
from .fourier import QuadConfig, bartlett_cf, gamma_box_probability, mixture_box_probability
from .samplers import dirichlet_exact, hit_and_run
from .standardize import (
    assumption_report,
    property_a_partition,
    standardize,
    weight_spec,
)

log = logging.getLogger("polyclt")

_VALIDATION_ERRORS = (
    NotCompact,
    EmptyInterior,
    RankDeficient,
    NotPositivized,
    DomainViolation,
    SupportViolation,
    ValueError,
)
_NUMERICAL_ERRORS = (
    QuadratureBudgetExceeded,
    DenominatorTooSmall,
    GramSingular,
    SigmaZero,
    PartitionNotFound,
    DimensionTooLarge,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems as exit code 64."""

    def error(self, message):
        raise _UsageError(message)


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _manifest(args, inputs, t0):
    return {
        "subcommand": args.cmd,
        "inputs": {p: _digest(p) for p in inputs if p},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "wall_clock_s": time.monotonic() - t0,
    }


def _emit(payload, args):
    # json floats use repr: shortest exact double round-trip
    text = json.dumps(payload, indent=2)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_instance(args):
    if args.input:
        return ConstraintSystem.from_json(args.input), [args.input]
    if args.input_a and args.input_b:
        return ConstraintSystem.from_csv(args.input_a, args.input_b), [
            args.input_a,
            args.input_b,
        ]
    raise _UsageError("provide --input (JSON) or --input-a/--input-b (CSV)")


def _parse_vector(text):
    """Comma-separated numbers, or @path to a one-line CSV file."""
    if text.startswith("@"):
        return np.loadtxt(text[1:], delimiter=",", ndmin=1)
    return np.asarray([float(v) for v in text.split(",")], dtype=float)


def _parse_box(text):
    """Semicolon-separated lo,hi pairs, or a JSON file {"lo": [...], "hi": [...]}.

    'inf' is allowed as an upper bound in both forms.
    """
    if os.path.exists(text):
        with open(text) as fh:
            d = json.load(fh)
        return list(zip((float(v) for v in d["lo"]), (float(v) for v in d["hi"])))
    box = []
    for part in text.split(";"):
        lo, hi = part.split(",")
        box.append((float(lo), float(hi)))
    return box


def _parse_law(text):
    kind, _, rest = text.partition(":")
    if kind == "box":
        lo, hi = (float(v) for v in rest.split(","))
        return BoxLaw(lo, hi)
    if kind == "table":
        # table:p11 p21|p12 p22|... columns separated by '|'
        cols = [[float(v) for v in col.split()] for col in rest.split("|")]
        return TableLaw(np.asarray(cols, dtype=float).T)
    raise _UsageError(f"unknown column law {text!r}")


_SAMPLER_ALIASES = {"hitrun": "hit_and_run", "dirichlet": "dirichlet_exact"}


def _sampler_cfg(args):
    kind = getattr(args, "sampler", "hit_and_run")
    return SamplerConfig(
        kind=_SAMPLER_ALIASES.get(kind, kind),
        count=args.count,
        seed=args.seed,
        burn_in=args.burn_in,
        thin=args.thin,
        jobs=args.jobs,
    )


def _quad_cfg(args):
    return QuadConfig(tol=args.tol) if args.tol else QuadConfig()


def _solved(cs):
    pcs = positivize(cs)
    bc = solve_barycenter(pcs)
    return pcs, bc, standardize(pcs, bc)


def _write_csv(path, arr):
    np.savetxt(path, np.atleast_2d(arr), delimiter=",")


def _cmd_validate(args, t0):
    cs, inputs = _load_instance(args)
    rep = validate(cs)
    payload = {"report": rep.to_dict(), "manifest": _manifest(args, inputs, t0)}
    _emit(payload, args)
    return 0 if rep.ok else 2


def _cmd_positivize(args, t0):
    cs, inputs = _load_instance(args)
    out = positivize(cs)
    payload = {"instance": out.to_dict(), "manifest": _manifest(args, inputs, t0)}
    _emit(payload, args)
    return 0


def _cmd_barycenter(args, t0):
    cs, inputs = _load_instance(args)
    pcs = positivize(cs)
    bc = solve_barycenter(pcs, tol=args.tol or 1e-10, max_iter=args.max_iter)
    payload = {"barycenter": bc.to_dict(), "manifest": _manifest(args, inputs, t0)}
    _emit(payload, args)
    return 0 if bc.converged else 3


def _cmd_standardize(args, t0):
    cs, inputs = _load_instance(args)
    pcs = positivize(cs)
    if args.barycenter:
        with open(args.barycenter) as fh:
            d = json.load(fh).get("barycenter")
        bc = Barycenter(
            w=np.asarray(d["w"], dtype=float),
            lambda0=np.asarray(d["lambda0"], dtype=float),
            dual_value=d["dual_value"],
            centering_residual=d["residual"],
            iterations=d["iterations"],
            converged=d.get("converged", True),
        )
        inputs = inputs + [args.barycenter]
    else:
        bc = solve_barycenter(pcs)
    ss = standardize(pcs, bc)
    payload = {
        "w": bc.w.tolist(),
        "lambda0": bc.lambda0.tolist(),
        "a_tilde": ss.a_tilde.tolist(),
        "a_hat": ss.a_hat.tolist(),
        "b_hat": ss.b_hat.tolist(),
        "a_hat_max": ss.max_entry,
    }
    if args.weights:
        wspec = weight_spec(ss, bc, _parse_vector(args.weights))
        payload["sigma"] = wspec.sigma
        payload["lambda_hat_max"] = wspec.max_lambda_hat
    payload["manifest"] = _manifest(args, inputs, t0)
    _emit(payload, args)
    return 0


def _cmd_check(args, t0):
    cs, inputs = _load_instance(args)
    _, bc, ss = _solved(cs)
    wspec = weight_spec(ss, bc, _parse_vector(args.weights)) if args.weights else None
    rep = assumption_report(ss, wspec)
    payload = {"assumptions": rep.to_dict()}
    if args.K:
        part = property_a_partition(ss, args.K, epsilon=args.epsilon)
        payload["partition"] = {
            "K": part.K,
            "subsets": part.subsets,
            "det_lower_bounds": part.det_lower_bounds.tolist(),
            "epsilon_achieved": part.epsilon_achieved,
        }
    payload["manifest"] = _manifest(args, inputs, t0)
    _emit(payload, args)
    return 0


def _cmd_sample(args, t0):
    cs, inputs = _load_instance(args)
    pcs = positivize(cs)
    bc = solve_barycenter(pcs)
    if _SAMPLER_ALIASES.get(args.sampler, args.sampler) == "dirichlet_exact":
        chain = dirichlet_exact(
            pcs.n, float(pcs.A[0, 0]), float(pcs.b[0]), count=args.count, seed=args.seed
        )
    else:
        chain = hit_and_run(
            pcs, x0=bc.center, count=args.count, seed=args.seed,
            burn_in=args.burn_in, thin=args.thin, jobs=args.jobs,
        )
    payload = {
        "points": chain.points.tolist(),
        "sampler": chain.sampler_kind,
        "burn_in": chain.burn_in,
        "thin": chain.thin,
        "manifest": _manifest(args, inputs, t0),
    }
    if args.csv:
        _write_csv(args.csv, chain.points)
        payload.pop("points")
        payload["csv"] = args.csv
    _emit(payload, args)
    return 0


def _load_points(path):
    if path.endswith(".csv"):
        return np.loadtxt(path, delimiter=",", ndmin=2)
    with open(path) as fh:
        return np.asarray(json.load(fh)["points"], dtype=float)


def _cmd_clt(args, t0):
    cs, inputs = _load_instance(args)
    lam = _parse_vector(args.weights)
    pts = None
    if args.samples:
        pts = _load_points(args.samples)
        inputs = inputs + [args.samples]
    rep = clt_experiment(cs, lam, _sampler_cfg(args), points=pts)
    payload = {"clt": rep.to_dict(), "manifest": _manifest(args, inputs, t0)}
    if args.csv:
        _write_csv(args.csv, rep.values)
        payload["csv"] = args.csv
    _emit(payload, args)
    return 0


def _cmd_marginal(args, t0):
    cs, inputs = _load_instance(args)
    coords = [int(v) for v in args.coords.split(",")]
    pcs = positivize(cs)
    bc = solve_barycenter(pcs)
    pts = None
    if args.samples:
        pts = _load_points(args.samples)
        inputs = inputs + [args.samples]
    rep = marginal_experiment(pcs, bc, coords, _sampler_cfg(args), points=pts)
    payload = {"marginal": rep.to_dict(), "manifest": _manifest(args, inputs, t0)}
    _emit(payload, args)
    return 0


def _cmd_charfn(args, t0):
    cs, inputs = _load_instance(args)
    _, bc, ss = _solved(cs)
    wspec = weight_spec(ss, bc, _parse_vector(args.weights))
    rows = []
    for t in (float(v) for v in args.t.split(",")):
        ev = bartlett_cf(ss, wspec, t, _quad_cfg(args))
        rows.append({
            "t": t,
            "value_re": ev.value.real,
            "value_im": ev.value.imag,
            "abs_error_estimate": ev.abs_error_estimate,
            "quad_points": ev.quad_points,
            "truncation_radius": ev.truncation_radius,
            "gaussian_limit": float(np.exp(-0.5 * t * t * wspec.sigma ** 2)),
        })
    payload = {
        "sigma": wspec.sigma,
        "values": rows,
        "manifest": _manifest(args, inputs, t0),
    }
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("t,re,im,err,gaussian_limit\n")
            for r in rows:
                fh.write(f"{r['t']!r},{r['value_re']!r},{r['value_im']!r},"
                         f"{r['abs_error_estimate']!r},{r['gaussian_limit']!r}\n")
        payload["csv"] = args.csv
    _emit(payload, args)
    return 0


def _cmd_mixture(args, t0):
    cs, inputs = _load_instance(args)
    pcs = positivize(cs)
    bc = solve_barycenter(pcs)
    ev = mixture_box_probability(pcs, bc, _parse_box(args.box), _quad_cfg(args))
    payload = {
        "probability": float(np.real(ev.value)),
        "abs_error_estimate": ev.abs_error_estimate,
        "quad_points": ev.quad_points,
        "truncation_radius": ev.truncation_radius,
        "manifest": _manifest(args, inputs, t0),
    }
    _emit(payload, args)
    return 0


def _cmd_gammabox(args, t0):
    cs, inputs = _load_instance(args)
    pcs = positivize(cs)
    bc = solve_barycenter(pcs)
    quad = QuadConfig(tol=args.tol) if args.tol else None
    val = gamma_box_probability(pcs, bc, args.gamma, _parse_box(args.box), quad)
    payload = {
        "gamma": args.gamma,
        "probability": val,
        "manifest": _manifest(args, inputs, t0),
    }
    _emit(payload, args)
    return 0


def _cmd_gen(args, t0):
    recipe = InstanceRecipe(
        m=args.m, n=args.n, column_law=_parse_law(args.law),
        v=_parse_vector(args.v), seed=args.seed,
    )
    cs, lam0 = random_instance(recipe)
    payload = {
        "instance": cs.to_dict(),
        "exact_lambda0": lam0.tolist(),
        "manifest": _manifest(args, [], t0),
    }
    _emit(payload, args)
    return 0


_HANDLERS = {
    "validate": _cmd_validate,
    "positivize": _cmd_positivize,
    "barycenter": _cmd_barycenter,
    "standardize": _cmd_standardize,
    "check": _cmd_check,
    "sample": _cmd_sample,
    "clt": _cmd_clt,
    "marginal": _cmd_marginal,
    "charfn": _cmd_charfn,
    "mixture": _cmd_mixture,
    "gammabox": _cmd_gammabox,
    "gen": _cmd_gen,
}


def _add_instance_flags(p):
    p.add_argument("--input", help="instance JSON file")
    p.add_argument("--input-a", help="headerless CSV matrix for A")
    p.add_argument("--input-b", help="one-line CSV file for b")
    p.add_argument("--output", help="write output JSON here instead of stdout")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for sampler chains; output is identical for any value")


def build_parser():
    parser = _Parser(prog="polyclt", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd")

    for name in ("validate", "positivize"):
        p = sub.add_parser(name)
        _add_instance_flags(p)

    p = sub.add_parser("barycenter")
    _add_instance_flags(p)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=200)

    p = sub.add_parser("standardize")
    _add_instance_flags(p)
    p.add_argument("--lambda", dest="weights", help="weight vector (comma list or @csv)")
    p.add_argument("--barycenter", help="reuse a saved barycenter JSON")

    p = sub.add_parser("check")
    _add_instance_flags(p)
    p.add_argument("--lambda", dest="weights")
    p.add_argument("--K", type=int, default=0, help="request a K-subset partition")
    p.add_argument("--epsilon", type=float, default=0.05)

    p = sub.add_parser("sample")
    _add_instance_flags(p)
    p.add_argument("--sampler", "--method", dest="sampler",
                   choices=("hit_and_run", "dirichlet_exact", "hitrun", "dirichlet"),
                   default="hit_and_run")
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--csv", help="also write points as CSV")

    for name in ("clt", "marginal"):
        p = sub.add_parser(name)
        _add_instance_flags(p)
        p.add_argument("--sampler", "--method", dest="sampler",
                       choices=("hit_and_run", "dirichlet_exact", "hitrun", "dirichlet"),
                       default="hit_and_run")
        p.add_argument("--count", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--burn-in", type=int, default=None)
        p.add_argument("--thin", type=int, default=None)
        p.add_argument("--samples", help="reuse points from a sample run (JSON or CSV)")
        if name == "clt":
            p.add_argument("--lambda", dest="weights", required=True)
            p.add_argument("--csv", help="write per-sample standardized values as CSV")
        else:
            p.add_argument("--coords", required=True, help="comma list of coordinates")

    p = sub.add_parser("charfn")
    _add_instance_flags(p)
    p.add_argument("--lambda", dest="weights", required=True)
    p.add_argument("--t", required=True, help="comma list of frequencies")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--csv", help="write (t, re, im, err, gaussian_limit) rows")

    p = sub.add_parser("mixture")
    _add_instance_flags(p)
    p.add_argument("--box", required=True, help="semicolon-separated lo,hi pairs")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("gammabox")
    _add_instance_flags(p)
    p.add_argument("--box", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("gen")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--law", required=True, help="box:lo,hi or table:u11 u21|u12 u22|...")
    p.add_argument("--v", required=True, help="comma list, the dual direction")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.add_argument("--jobs", type=int, default=1)

    return parser


def main(argv=None):
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("POLYCLT_LOG", "error"), logging.ERROR
    )
    logging.basicConfig(level=level)
    parser = build_parser()
    t0 = time.monotonic()
    try:
        args = parser.parse_args(argv)
        if not args.cmd:
            parser.print_usage(sys.stderr)
            return 64
        log.info("running %s", args.cmd)
        return _HANDLERS[args.cmd](args, t0)
    except _UsageError as exc:
        print(f"polyclt: {exc}", file=sys.stderr)
        return 64
    except _VALIDATION_ERRORS as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except _NUMERICAL_ERRORS + (PolycltError, np.linalg.LinAlgError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
