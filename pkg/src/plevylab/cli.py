"""Command line surface: every operation as a subcommand with reproducible
seeds and machine-readable output (CSV by default, JSON via --format).

Exit codes: 0 success, 1 usage error, 2 numerical failure or a sweep that
diverged unexpectedly.  Output for identical (argv, seed) is byte-identical;
the PLEVYLAB_THREADS environment variable controls worker threads without
changing results.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import functionals as emod
from . import fields as fmod
from . import geometry as gmod
from . import kernels as kmod
from . import sweep as smod
from .constants import compute_kdp, kdp_mc
from .quadrature import QuadratureError

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(USAGE_ERROR)


def _emit(lines, args):
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows):
    out = [",".join(header)]
    out.extend(",".join(str(c) for c in row) for row in rows)
    return out


def _json_rows(header, rows):
    payload = [dict(zip(header, row)) for row in rows]
    return [json.dumps(payload, sort_keys=True, separators=(",", ":"))]


def _rows_out(header, rows, args):
    if args.format == "json":
        _emit(_json_rows(header, rows), args)
    else:
        _emit(_csv(header, rows), args)


def _load_config(path):
    spec = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            spec[key.strip()] = val.strip()
    return spec


def _merged_spec(args, keys):
    """Config file values merged under explicit flags."""
    spec = {}
    if getattr(args, "config", None):
        spec.update(_load_config(args.config))
    for key in keys:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            spec[key] = str(val)
    return spec


def _kernel_spec(args):
    keys = ("family", "d", "p", "eps", "beta", "eps0", "base_eps")
    return _merged_spec(args, keys)


def _domain_from(args):
    name = args.domain
    if name == "interval":
        return gmod.interval(args.xa, args.xb)
    if name == "slit-interval":
        return gmod.slit_interval()
    if name == "ball":
        return gmod.Ball(args.radius, int(args.d or 2))
    if name == "slit-ball":
        return gmod.SlitBall(args.radius, int(args.d or 2))
    raise SystemExit(USAGE_ERROR)


def _field_from(args):
    name = args.field
    d = int(args.d or 1)
    if name == "linear":
        return fmod.Linear(tuple([1.0] * d))
    if name == "gaussian":
        return fmod.Gaussian(d)
    if name == "tent":
        return fmod.Tent(d)
    if name == "bump":
        return fmod.SmoothBump(d, args.bump_radius)
    if name == "sign-jump":
        return fmod.SignJump(d)
    raise SystemExit(USAGE_ERROR)


def _cmd_constant(args):
    header = ("d", "p", "value_mean", "value_closed", "value_mc",
              "mc_stderr", "value_variant", "discrepancy")
    rows = []
    for d in args.d_list:
        for p in args.p_list:
            k = compute_kdp(d, p)
            mc, se = kdp_mc(d, p, n=args.n, seed=args.seed)
            rows.append((d, repr(p), repr(k.value_mean),
                         repr(k.value_closed), repr(mc), repr(se),
                         repr(k.value_variant), repr(k.discrepancy)))
    _rows_out(header, rows, args)
    return 0


def _cmd_kernel_check(args):
    spec = _kernel_spec(args)
    fam = kmod.family_from_spec(spec)
    grid = [float(args.eps)] if args.eps is not None else fam.default_grid()
    header = ("family", "d", "p", "eps", "normalization", "mass_outside_0.1",
              "mass_outside_0.5", "moment_beta_p_plus_1")
    rows = []
    for eps in grid:
        kern = fam.kernel(eps)
        rows.append((fam.kind, fam.dim, repr(fam.p_exp), repr(eps),
                     repr(kmod.normalization(kern)),
                     repr(kmod.mass_outside(kern, 0.1)),
                     repr(kmod.mass_outside(kern, 0.5)),
                     repr(kmod.weighted_moment(kern, fam.p_exp + 1.0, 1.0))))
    _rows_out(header, rows, args)
    return 0


def _cmd_energy(args):
    spec = _kernel_spec(args)
    kern = kmod.kernel_from_spec(spec)
    dom = _domain_from(args)
    fld = _field_from(args)
    est = emod.energy(fld, dom, kern, mode=args.mode, n=args.n,
                      seed=args.seed)
    header = ("family", "d", "p", "eps", "value", "stderr", "n", "mode",
              "seed")
    rows = [(spec.get("family"), spec.get("d"), spec.get("p"),
             spec.get("eps"), repr(est.value), repr(est.stderr),
             est.n_samples, est.mode, args.seed)]
    _rows_out(header, rows, args)
    return 0


def _cmd_generator(args):
    spec = _kernel_spec(args)
    fam = kmod.family_from_spec(spec)
    fld = _field_from(args)
    point = np.zeros(fld.dim) if args.point is None \
        else np.array([float(v) for v in args.point.split(",")])
    grid = [float(args.eps)] if args.eps is not None else fam.default_grid()
    header = ("family", "d", "p", "eps", "value")
    rows = []
    for eps in grid:
        val = emod.generator(fld, point, fam.kernel(eps))
        rows.append((fam.kind, fam.dim, repr(fam.p_exp), repr(eps),
                     repr(val)))
    _rows_out(header, rows, args)
    return 0


def _run_cases(cases, args):
    reports = [smod.run_sweep(c) for c in cases]
    if args.format == "json":
        _emit([smod.suite_json(cases, reports, args.seed)], args)
    else:
        _emit(smod.suite_csv(cases, reports).splitlines(), args)
    return 0 if all(r.ok for r in reports) else NUMERICAL_ERROR


def _cmd_sweep(args):
    all_cases = {c.case_id: c for c in smod.builtin_suite(
        seed=args.seed, n_samples=args.n)}
    if args.case not in all_cases:
        sys.stderr.write("error: unknown case %r; known: %s\n"
                         % (args.case, ", ".join(sorted(all_cases))))
        return USAGE_ERROR
    return _run_cases([all_cases[args.case]], args)


def _cmd_suite(args):
    return _run_cases(smod.builtin_suite(seed=args.seed, n_samples=args.n),
                      args)


def _cmd_counterexample(args):
    cases = [c for c in smod.builtin_suite(seed=args.seed, n_samples=args.n)
             if c.case_id.startswith("counterexample")]
    return _run_cases(cases, args)


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=emod.DEFAULT_SEED,
                     help="deterministic seed (fixed default, never "
                          "time-based)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--output", default=None, help="write to file instead "
                                                    "of stdout")
    sub.add_argument("--config", default=None,
                     help="key=value file merged under explicit flags")


def _add_kernel_flags(sub):
    sub.add_argument("--family", default="stable",
                     choices=("stable", "rescaled", "truncated_power",
                              "smoothed_power", "log_limit"))
    sub.add_argument("--d", default=None)
    sub.add_argument("--p", default=None)
    sub.add_argument("--eps", default=None)
    sub.add_argument("--beta", default=None)
    sub.add_argument("--eps0", default=None)
    sub.add_argument("--base-eps", dest="base_eps", default=None)


def build_parser():
    parser = _Parser(prog="plevylab",
                     description="nonlocal energy laboratory for "
                                 "concentrated p-Levy kernels")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("constant", help="the sphere moment constant, "
                                         "three routes")
    p.add_argument("--d", dest="d_list", type=int, action="append",
                   required=True)
    p.add_argument("--p", dest="p_list", type=float, action="append",
                   required=True)
    p.add_argument("--n", type=int, default=1_000_000)
    _add_common(p)
    p.set_defaults(func=_cmd_constant)

    p = subs.add_parser("kernel-check", help="normalization and tail mass "
                                             "along a family grid")
    _add_kernel_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_kernel_check)

    p = subs.add_parser("energy", help="one pair-energy estimate")
    _add_kernel_flags(p)
    p.add_argument("--field", default="linear",
                   choices=("linear", "gaussian", "tent", "bump",
                            "sign-jump"))
    p.add_argument("--domain", default="interval",
                   choices=("interval", "slit-interval", "ball",
                            "slit-ball"))
    p.add_argument("--xa", type=float, default=0.0)
    p.add_argument("--xb", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--bump-radius", dest="bump_radius", type=float,
                   default=1.0)
    p.add_argument("--mode", choices=(emod.MODE_MC, emod.MODE_DET),
                   default=emod.MODE_MC)
    p.add_argument("--n", type=int, default=emod.DEFAULT_N_SAMPLES)
    _add_common(p)
    p.set_defaults(func=_cmd_energy)

    p = subs.add_parser("generator", help="symmetrized difference operator "
                                          "along a family grid (p = 2)")
    _add_kernel_flags(p)
    p.add_argument("--field", default="gaussian",
                   choices=("linear", "gaussian", "bump"))
    p.add_argument("--point", default=None,
                   help="comma separated coordinates (default origin)")
    _add_common(p)
    p.set_defaults(func=_cmd_generator)

    p = subs.add_parser("sweep", help="run one built-in case by id")
    p.add_argument("--case", required=True)
    p.add_argument("--n", type=int, default=emod.DEFAULT_N_SAMPLES)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = subs.add_parser("suite", help="run the full verification suite")
    p.add_argument("--n", type=int, default=emod.DEFAULT_N_SAMPLES)
    _add_common(p)
    p.set_defaults(func=_cmd_suite)

    p = subs.add_parser("counterexample", help="run the slit-domain "
                                               "counterexample cases")
    p.add_argument("--n", type=int, default=emod.DEFAULT_N_SAMPLES)
    _add_common(p)
    p.set_defaults(func=_cmd_counterexample)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_ERROR
    try:
        return args.func(args)
    except (QuadratureError, emod.EnergyError, kmod.KernelError,
            fmod.FieldError, gmod.DomainError) as exc:
        sys.stderr.write("numerical failure: %s\n" % exc)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
