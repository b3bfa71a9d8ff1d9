"""Command-line front end.

Every run writes its outputs plus ``config.txt`` (the fully resolved
configuration) into ``--out``. Exit status: 0 success, 1 invalid input or
domain error, 2 I/O error. A failed range test is a result, not an error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

log = logging.getLogger("attcone")

SUBCOMMANDS = ("phantom", "forward", "apply-L", "range-check", "invert", "roundtrip",
               "verify-identities")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--config", metavar="FILE", help="key = value config file (flags override it)")
    g.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    g.add_argument("--mu", type=float, help="attenuation coefficient (> 0)")
    g.add_argument("--psi", type=float, help="cone half-opening angle in radians, in (0, pi/2)")
    g.add_argument("--dim", type=int, help="spatial dimension n (grids have n+1 axes)")
    g.add_argument("--grid", metavar="N[,N...]", help="samples per axis")
    g.add_argument("--extent", metavar="LO,HI[,...]", help="box, one LO,HI pair or one per axis")
    g.add_argument("--pad", type=float, metavar="F", help="lateral pad factor of the working grid")
    g.add_argument("--eps-support", type=float, help="relative support threshold (default 1e-6)")
    g.add_argument("--moment-tol", type=float, help="moment residual tolerance (default 1e-4)")
    g.add_argument("--threads", type=int, metavar="N", help="worker threads (results do not depend on N)")
    g.add_argument("--slice", action="append", default=[], metavar="AXIS=VALUE",
                   help="also write a CSV slice of the main output; repeatable")
    g.add_argument("--input", metavar="FILE", help="CRTF data to use instead of generating it")
    return p


def build_parser():
    parser = _Parser(prog="attcone", description="Attenuated cone transform toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()

    sub.add_parser("phantom", parents=[common], help="sample the phantom to CRTF")

    p = sub.add_parser("forward", parents=[common], help="cone or auxiliary transform of the phantom")
    p.add_argument("--method", choices=("direct", "spectral"))
    p.add_argument("--transform", choices=("cone", "aux"))
    p.add_argument("--full", action="store_true",
                   help="keep the padded working grid (spectral only); needed for range-check/invert input")

    p = sub.add_parser("apply-L", parents=[common], help="apply a power of L to --input")
    p.add_argument("--power", type=int)
    p.add_argument("--scheme", choices=("spectral", "fd"), default="spectral")

    for name, helptext in (("range-check", "run a range test"), ("invert", "reconstruct f"),
                           ("roundtrip", "forward transform, reconstruct, report the error")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--theorem", choices=("c-odd", "c-even", "a-odd", "a-even"))
        p.add_argument("--transform", choices=("cone", "aux"))
        if name != "range-check":
            p.add_argument("--rule", choices=("trapezoid", "linear", "cubic"))
            p.add_argument("--integration", choices=("top-down", "bottom-up", "auto"),
                           default="top-down")

    sub.add_parser("verify-identities", parents=[common], help="special-function identity sweep")
    return parser


def _flag_mapping(args):
    m = {}
    for flag, key in (("mu", "params.mu"), ("psi", "params.psi"), ("dim", "params.n"),
                      ("pad", "pad.lateral"), ("eps_support", "tolerances.eps_support"),
                      ("moment_tol", "tolerances.moment_tol"), ("method", "method"),
                      ("transform", "transform"), ("theorem", "theorem"), ("power", "power"),
                      ("rule", "rule"), ("input", "input")):
        value = getattr(args, flag, None)
        if value is not None:
            m[key] = value
    if args.grid is not None:
        m["grid.dims"] = args.grid
    if args.extent is not None:
        m["grid.extent"] = args.extent
    return m


def resolve_config(args):
    from . import config

    mapping = config.load(args.config) if args.config else {}
    mapping.update(_flag_mapping(args))
    return config.ExperimentConfig.resolve(mapping)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (tuple, list)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def write_report(path, row):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(row))
        w.writerow([_fmt(v) for v in row.values()])


def _axis_names(ndim):
    return [f"x{i + 1}" for i in range(ndim - 1)] + ["z"]


def _parse_slice(text, ndim):
    if "=" not in text:
        raise ValueError(f"--slice expects AXIS=VALUE, got {text!r}")
    axis, value = text.split("=", 1)
    names = _axis_names(ndim)
    axis = axis.strip()
    idx = names.index(axis) if axis in names else int(axis)
    if not 0 <= idx < ndim:
        raise ValueError(f"slice axis {axis!r} out of range")
    return idx, float(value)


def write_slice_csv(path, field, slices):
    """Coordinates and values of ``field`` restricted to the nearest grid planes."""
    spec = field.spec
    index = [slice(None)] * spec.ndim
    for text in slices:
        ax, value = _parse_slice(text, spec.ndim)
        i = int(round((value - spec.origin[ax]) / spec.spacing[ax]))
        index[ax] = min(max(i, 0), spec.dims[ax] - 1)
    vals = field.values[tuple(index)]
    coords = [spec.axis(a)[index[a]] for a in range(spec.ndim)]
    grids = np.meshgrid(*[np.atleast_1d(c) for c in coords], indexing="ij")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_axis_names(spec.ndim) + ["value"])
        flat = [g.ravel() for g in grids]
        for j, v in enumerate(np.ravel(vals)):
            w.writerow([repr(float(c[j])) for c in flat] + [repr(float(v))])


def _emit_field(out, name, field, args):
    from . import crtf

    path = out / f"{name}.crtf"
    crtf.write(path, field)
    print(f"wrote {path}")
    if args.slice:
        spath = out / f"{name}_slice.csv"
        write_slice_csv(spath, field, args.slice)
        print(f"wrote {spath}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _data(cfg, transform):
    """Range data ``g`` and, when generated, the sampled truth on the working grid."""
    from . import crtf, pipeline

    if cfg.input:
        return crtf.read(cfg.input), None
    _, f, g = pipeline.range_data(cfg.phantom, cfg.params, cfg.grid, transform, cfg.lateral)
    return g, f


def cmd_phantom(cfg, args, out):
    from .phantoms import sample

    _emit_field(out, "phantom", sample(cfg.phantom, cfg.grid), args)


def cmd_forward(cfg, args, out):
    from . import pipeline

    g = pipeline.forward(cfg.phantom, cfg.params, cfg.grid, cfg.method, cfg.transform,
                         cfg.lateral, full=args.full)
    _emit_field(out, "forward", g, args)


def cmd_apply_L(cfg, args, out):
    from . import crtf
    from .rangeops import L_apply_fd, L_apply_spectral

    if not cfg.input:
        raise ValueError("apply-L needs --input")
    g = crtf.read(cfg.input)
    if args.scheme == "fd":
        h = g
        for _ in range(cfg.power):
            h = L_apply_fd(h, cfg.params)
    else:
        h = L_apply_spectral(g, cfg.params, cfg.power, eps_support=cfg.eps_support)
    _emit_field(out, "apply_L", h, args)


def _theorem(cfg):
    from .pipeline import theorem_for

    return cfg.theorem or theorem_for(cfg.params, cfg.transform)


def cmd_range_check(cfg, args, out):
    from .pipeline import transform_for
    from .rangeops import RangeTolerances, check_range

    theorem = _theorem(cfg)
    g, _ = _data(cfg, transform_for(theorem))
    tol = RangeTolerances.around(cfg.phantom, g.spec, eps_support=cfg.eps_support,
                                 moment_tol=cfg.moment_tol)
    report = check_range(g, theorem, cfg.params, tol)
    path = out / "range_report.csv"
    write_report(path, report.to_dict())
    print(f"{theorem}: passed={_fmt(report.passed)} support_ok={_fmt(report.support_ok)} "
          f"moment_residual={report.moment_residual:.3e}")
    print(f"wrote {path}")


def _invert(cfg, args, g):
    from .inversion import INVERTERS

    theorem = _theorem(cfg)
    kw = {}
    if theorem.startswith("c"):
        kw = dict(method=args.integration, rule=cfg.rule)
    return theorem, INVERTERS[theorem](g, cfg.params, eps_support=cfg.eps_support, **kw)


def cmd_invert(cfg, args, out):
    from .fields import crop, rel_l2
    from .pipeline import transform_for

    theorem = _theorem(cfg)
    g, f_work = _data(cfg, transform_for(theorem))
    _, res = _invert(cfg, args, g)
    f_hat, err = res.f_hat, None
    if f_work is not None:
        f_hat = crop(f_hat, cfg.grid)
        err = rel_l2(f_hat, crop(f_work, cfg.grid))
    _emit_field(out, "invert", f_hat, args)
    row = dict(theorem=theorem, method=res.diagnostics.get("method", "multiplier"),
               rel_l2_error="" if err is None else err,
               boundary_level=res.diagnostics["boundary_level"])
    write_report(out / "invert_report.csv", row)


def cmd_roundtrip(cfg, args, out):
    from . import pipeline

    theorem = _theorem(cfg)
    kw = dict(method=args.integration, rule=cfg.rule) if theorem.startswith("c") else {}
    res = pipeline.roundtrip(cfg.phantom, cfg.params, cfg.grid, theorem, cfg.lateral,
                             eps_support=cfg.eps_support, **kw)
    _emit_field(out, "roundtrip", res.f_hat, args)
    d = res.diagnostics
    row = dict(theorem=theorem, rel_l2_error=res.rel_l2_error,
               method=d.get("method", "multiplier"), rule=d.get("rule", ""),
               boundary_level=d["boundary_level"],
               working_dims="x".join(str(v) for v in d["working_dims"]))
    path = out / "roundtrip_report.csv"
    write_report(path, row)
    print(f"{theorem}: rel_l2_error={res.rel_l2_error:.3e}")
    print(f"wrote {path}")


def cmd_verify_identities(cfg, args, out):
    from .special import identity_sweep

    rows = identity_sweep()
    path = out / "identities.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(rows[0]))
        for r in rows:
            w.writerow([_fmt(v) for v in r.values()])
    for name in ("funk_hecke", "laplace_hankel_a", "laplace_hankel_b"):
        worst = max(r["rel_error"] for r in rows if r["identity"] == name)
        print(f"{name}: max rel_error {worst:.2e}")
    print(f"wrote {path}")


COMMANDS = {"phantom": cmd_phantom, "forward": cmd_forward, "apply-L": cmd_apply_L,
            "range-check": cmd_range_check, "invert": cmd_invert, "roundtrip": cmd_roundtrip,
            "verify-identities": cmd_verify_identities}


def _attach_negative_values(argv):
    # argparse reads "--extent -2,2" as two options; glue such values on
    out = []
    for tok in argv:
        if out and out[-1] in _VALUE_FLAGS and tok.startswith("-") and tok[1:2].isdigit():
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


_VALUE_FLAGS = ("--extent", "--slice")


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    if args.threads is not None:
        if args.threads < 1:
            parser.error("--threads must be >= 1")
        # numba sizes its pool from the environment when first imported
        os.environ.setdefault("NUMBA_NUM_THREADS", str(args.threads))
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")

    from . import threads

    try:
        if args.threads is not None:
            threads.set_threads(args.threads)
        cfg = resolve_config(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.txt").write_text(cfg.to_text(), encoding="utf-8")
        COMMANDS[args.command](cfg, args, out)
    except OSError as exc:
        print(f"attcone: I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"attcone: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
