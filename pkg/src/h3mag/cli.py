"""Command-line front end.

Subcommands: ``simulate``, ``closed-form``, ``verify``, ``selftest``,
``ledger`` and ``gallery``. Options can also come from a JSON file given with
``--config``; its keys are the long option names with dashes replaced by
underscores, plus ``schema_version``. Command-line flags win over the file.

Exit codes: 0 success, 2 bad configuration, 3 integration failure,
4 domain violation, 5 verification or self-test failure.
"""

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import closedform as cf
from . import export, verify
from .closedform import ClosedFormSpec, DomainViolation, FamilyId
from .dynamics import State, SystemKind
from .geometry import ModelParams
from .integrate import METHODS, IntegrationError, IntegratorConfig, integrate

log = logging.getLogger("h3mag")

EXIT_OK, EXIT_CONFIG, EXIT_INTEGRATION, EXIT_DOMAIN, EXIT_VERIFY = 0, 2, 3, 4, 5


class ConfigError(ValueError):
    pass


def _add_curve(p):
    p.add_argument("--family", type=str.upper, choices=[f.value for f in FamilyId])
    p.add_argument("--variant", choices=cf.VARIANTS, default="corrected")
    p.add_argument("--c", type=float, default=None)
    for k in range(1, 6):
        p.add_argument(f"--c{k}", type=float, default=0.0)
    p.add_argument("--branch", type=int, choices=(1, -1), default=1)


def _add_grid(p, t0=0.0, t1=1.0, samples=101):
    p.add_argument("--t0", type=float, default=t0)
    p.add_argument("--t1", type=float, default=t1)
    p.add_argument("--samples", type=int, default=samples,
                   help="number of output rows, both ends included")


def _add_output(p, formats=("csv", "json")):
    p.add_argument("--out", default=None, help="output file; stdout when omitted")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="h3mag", description=__doc__.split("\n")[0])
    ap.add_argument("--config", default=None, help="JSON file with option values")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate a geodesic or Killing magnetic system")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--system", choices=("geodesic", "k1", "k2", "k3", "k4"), default=None)
    p.add_argument("--state", default=None,
                   help="initial state x,y,z,vx,vy,vz; otherwise taken from --family, "
                        "otherwise drawn from --seed")
    _add_curve(p)
    _add_grid(p)
    p.add_argument("--method", choices=METHODS, default="embedded-45")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("closed-form", help="evaluate a closed-form curve on a grid")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    _add_curve(p)
    _add_grid(p)
    _add_output(p)

    p = sub.add_parser("verify", help="residual oracle and integration cross-check")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    _add_curve(p)
    p.add_argument("--all", action="store_true", help="every family (the default)")
    p.add_argument("--both", action="store_true", help="check printed and corrected variants")
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--t1", type=float, default=None)
    p.add_argument("--samples", type=int, default=verify.DEFAULT_POINTS)
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.add_argument("--out", default=None, help="JSON report file")

    p = sub.add_parser("selftest", help="geometric and contact identity checks")
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.add_argument("--out", default=None)

    p = sub.add_parser("ledger", help="verdicts on the published formulas")
    p.add_argument("--variant", choices=cf.VARIANTS, default="printed")
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("gallery", help="export the figure datasets")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--samples", type=int, default=401)
    return ap


def _subparser(ap, name):
    for action in ap._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _load_config(path, sub):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.pop("schema_version", export.SCHEMA_VERSION)
    if version != export.SCHEMA_VERSION:
        raise ConfigError(f"unsupported config schema_version {version!r}")
    allowed = {a.dest for a in sub._actions if a.dest != "help"}
    aliases = {"lambda": "lam"}
    out = {}
    for key, value in data.items():
        dest = aliases.get(key, key.replace("-", "_"))
        if dest not in allowed:
            raise ConfigError(f"unknown config key {key!r}")
        out[dest] = value
    return out


def parse_args(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.config:
        sub = _subparser(ap, args.command)
        sub.set_defaults(**_load_config(args.config, sub))
        args = ap.parse_args(argv)
    return args


def _grid(args):
    if args.samples < 2:
        raise ConfigError("--samples must be at least 2")
    if not (math.isfinite(args.t0) and math.isfinite(args.t1)) or args.t0 == args.t1:
        raise ConfigError("--t0 and --t1 must be finite and different")
    return np.linspace(args.t0, args.t1, args.samples)


def _spec(args, family=None, lam=None):
    fam = family or args.family
    if fam is None:
        raise ConfigError("--family is required")
    return ClosedFormSpec(FamilyId.parse(fam), args.variant, args.lam if lam is None else lam,
                          c=args.c, c1=args.c1, c2=args.c2, c3=args.c3, c4=args.c4,
                          c5=args.c5, branch=args.branch)


def _initial_state(args):
    if args.state is not None:
        try:
            vals = [float(v) for v in args.state.split(",")]
        except ValueError as exc:
            raise ConfigError(f"bad --state: {exc}") from exc
        if len(vals) != 6:
            raise ConfigError("--state needs six comma-separated numbers")
        return State(*vals), None
    if args.family is not None:
        spec = _spec(args)
        return cf.to_initial_state(spec, args.t0), spec
    rng = np.random.default_rng(args.seed)
    return State(*rng.uniform(-1, 1, 6)), None


def cmd_simulate(args):
    s0, spec = _initial_state(args)
    if args.system is not None:
        sys_kind = SystemKind.parse(args.system)
    elif spec is not None:
        sys_kind = spec.system
    else:
        raise ConfigError("--system is required unless --family is given")
    p = ModelParams(spec.lam if spec is not None else args.lam)
    if args.samples < 2:
        raise ConfigError("--samples must be at least 2")
    try:
        cfg = IntegratorConfig(method=args.method, step=args.step, rel_tol=args.rtol,
                               abs_tol=args.atol, t_start=args.t0, t_end=args.t1,
                               sample_every=abs(args.t1 - args.t0) / (args.samples - 1))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    traj = integrate(p, sys_kind, s0, cfg)
    rows = export.trajectory_rows(traj)
    if args.format == "csv":
        text = export.csv_text(export.TRAJECTORY_COLUMNS, rows)
    else:
        text = export.rows_json("trajectory", export.TRAJECTORY_COLUMNS, rows,
                                system=sys_kind.name, lam=p.lam, method=cfg.method,
                                diagnostics=vars(traj.diagnostics).copy())
    export.write_atomic(args.out, text)
    log.info("simulate: %d rows, speed2 drift %.3g", len(rows), traj.diagnostics.speed2_drift)
    return EXIT_OK


def _curve_text(spec, ts, fmt):
    pts = cf.eval_array(spec, ts)
    rows = np.column_stack([ts, pts])
    if fmt == "csv":
        return export.csv_text(export.CURVE_COLUMNS, rows)
    return export.rows_json("curve", export.CURVE_COLUMNS, rows, spec=spec.as_dict())


def cmd_closed_form(args):
    spec = _spec(args)
    export.write_atomic(args.out, _curve_text(spec, _grid(args), args.format))
    return EXIT_OK


def _verify_specs(args):
    variants = cf.VARIANTS if args.both else (args.variant,)
    custom = any(getattr(args, f"c{k}") != 0.0 for k in range(1, 6)) or args.c is not None
    fams = [FamilyId.parse(args.family)] if args.family and not args.all else list(FamilyId)
    specs = []
    for fam in fams:
        for var in variants:
            if custom and len(fams) == 1:
                specs.append(_spec(args, fam.value).replace(variant=var))
            else:
                specs.append(verify.reference_spec(fam, var, args.lam))
    return specs


def cmd_verify(args):
    specs = _verify_specs(args)
    reports, worst_corrected = [], []
    lines = [f"{'family':7s} {'variant':9s} {'class':5s} {'max residual':>12s} "
             f"{'fi drift':>9s} {'speed2':>9s} {'integration':>11s}"]
    for spec in specs:
        t0, t1 = cf.natural_span(spec)
        t0 = t0 if args.t0 is None else args.t0
        t1 = t1 if args.t1 is None else args.t1
        rep = verify.ode_residual(spec, (t0, t1, args.samples), args.tol)
        dev = verify.compare_with_integration(spec, (t0, t0 + 1.0))
        ok = rep.passed and dev < 1e-5
        if spec.variant == "corrected" and not ok:
            worst_corrected.append(spec.family.value)
        d = rep.as_dict()
        d["integration_deviation"] = dev
        reports.append(d)
        lines.append(f"{spec.family.value:7s} {spec.variant:9s} {rep.classification:5s} "
                     f"{max(rep.residuals):12.3e} {rep.fi_drift:9.2e} {rep.speed2_drift:9.2e} "
                     f"{dev:11.3e}")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        doc = {"schema_version": export.SCHEMA_VERSION, "kind": "residual_reports",
               "tol": args.tol, "reports": reports}
        export.write_atomic(args.out, export.json_text(doc))
    if worst_corrected:
        log.error("corrected variants failed: %s", ", ".join(worst_corrected))
        return EXIT_VERIFY
    return EXIT_OK


def cmd_selftest(args):
    if args.samples < 1:
        raise ConfigError("--samples must be at least 1")
    reports, failed = [], []
    for lam in args.lam:
        rep = verify.structure_selftest(ModelParams(lam), args.samples, args.seed)
        fails = rep.failures(args.tol)
        d = rep.as_dict()
        d["failures"] = fails
        reports.append(d)
        failed += [f"lambda={lam}: {f}" for f in fails]
    doc = {"schema_version": export.SCHEMA_VERSION, "kind": "structure_reports",
           "tol": args.tol, "passed": not failed, "reports": reports}
    export.write_atomic(args.out, export.json_text(doc))
    if failed:
        log.error("self-test failures: %s", "; ".join(failed))
        return EXIT_VERIFY
    return EXIT_OK


def cmd_ledger(args):
    entries = verify.errata_ledger(args.tol, args.variant, args.seed)
    doc = {"schema_version": export.SCHEMA_VERSION, "kind": "errata_ledger",
           "variant": args.variant, "tol": args.tol,
           "entries": [e.as_dict() for e in entries]}
    export.write_atomic(args.out, export.json_text(doc))
    return EXIT_OK


# constants as given in the figure captions; the two K1 captions disagree on
# which constants are set, so each assignment is exported for both families
GALLERY = [
    ("tk1_1", dict(family="TK1_1", lam=1.0, c1=1.0, c2=1.0, c3=1.0), (0.0, 4.0)),
    ("tk1_2", dict(family="TK1_2", lam=1.0, c1=1.0, c2=1.0), (0.0, 4.0)),
    ("tk1_1_alt", dict(family="TK1_1", lam=1.0, c1=1.0, c2=1.0), (0.0, 4.0)),
    ("tk1_2_alt", dict(family="TK1_2", lam=1.0, c1=1.0, c2=1.0, c3=1.0), (0.0, 4.0)),
    ("tk1_3", dict(family="TK1_3", lam=1.0, c=math.sqrt(2), c1=1.0, c2=1.0, c3=1.0), (0.0, 4.0)),
    ("tk2", dict(family="TK2", lam=1.0, c1=2.0, c2=1.0), (0.0, 4.0)),
    ("tk3", dict(family="TK3", lam=1.0, c1=1.0, c2=1.0, c3=1.0, c4=1.0), (0.0, 4.0)),
    # the printed curve has its pole at t = 0 for c1 = 0, so stay left of it
    ("tk4", dict(family="TK4", lam=1.0, c1=0.0, c2=0.0), (-3.0, -0.05)),
]


def _gallery_flags(name, spec):
    flags = []
    if spec.family is FamilyId.TK4 and spec.c1 == 0.0:
        flags.append("corrected K4 curve of radius c1 = 0 is the rest point (0, 0, c2)")
    if spec.family is FamilyId.TK3:
        flags.append(f"exponent sqrt(2 lam c1 - 1)/lam = "
                     f"{math.sqrt(2 * spec.lam * spec.c1 - 1) / spec.lam!r}")
    if name.endswith("_alt"):
        flags.append("constants from the other K1 caption")
    return flags


def cmd_gallery(args):
    if args.samples < 2:
        raise ConfigError("--samples must be at least 2")
    os.makedirs(os.path.join(args.out, "printed"), exist_ok=True)
    manifest, violations = [], []
    for name, consts, (t0, t1) in GALLERY:
        ts = np.linspace(t0, t1, args.samples)
        for variant, folder in (("corrected", ""), ("printed", "printed")):
            entry = {"name": name, "variant": variant, "grid": [t0, t1, args.samples],
                     "file": os.path.join(folder, f"{name}.csv") if folder else f"{name}.csv"}
            try:
                spec = ClosedFormSpec(variant=variant, **consts)
                entry["spec"] = spec.as_dict()
                entry["flags"] = _gallery_flags(name, spec)
                text = _curve_text(spec, ts, "csv")
            except DomainViolation as exc:
                entry["error"] = str(exc)
                violations.append(f"{name}/{variant}: {exc}")
                manifest.append(entry)
                continue
            export.write_atomic(os.path.join(args.out, entry["file"]), text)
            manifest.append(entry)
    doc = {"schema_version": export.SCHEMA_VERSION, "kind": "gallery", "datasets": manifest}
    export.write_atomic(os.path.join(args.out, "manifest.json"), export.json_text(doc))
    if violations:
        for v in violations:
            log.error("%s", v)
        return EXIT_DOMAIN
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "closed-form": cmd_closed_form, "verify": cmd_verify,
            "selftest": cmd_selftest, "ledger": cmd_ledger, "gallery": cmd_gallery}


def _setup_logging():
    level = os.environ.get("H3MAG_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"h3mag: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"h3mag: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainViolation as exc:
        print(f"h3mag: DomainViolation: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except IntegrationError as exc:
        print(f"h3mag: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except ValueError as exc:
        print(f"h3mag: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
