"""Command-line front end: ``forward``, ``disk-verify`` and ``image``.

Exit status: 0 success, 1 numerical failure, 2 usage error, 3 I/O error.
"""

import argparse
import os
import sys

from . import forward as fw
from . import ldsm
from .disk import DiskScatterer, ResonanceError, TruncationError, disk_far_field_matrix, table1_error
from .geometry import DegenerateCurveError, preset_curve, read_fourier_curve
from .linops import NumericalFailure

EXIT_NUMERICAL = 1
EXIT_USAGE = 2
EXIT_IO = 3

SCHEMES = {"equi": "equispaced100", "sv": "singular_values", "gauss": "gauss32"}

DEFAULTS = {
    "shape": "circle",
    "k": 2.0,
    "n_re": 4.0,
    "n_im": 1.0,
    "eta_re": 2.0,
    "eta_im": 1.0,
    "nf": 128,
    "dirs": 64,
    "radius": 1.0,
    "delta": 0.10,
    "seed": 0,
    "scheme": "gauss",
    "degree": 4,
    "beta_frac": 0.9,
    "grid": "-3,3,-3,3,100",
    "exponent": 4,
    "out": None,
    "input": None,
    "k_list": "2,4,6",
    "nf_list": "10,20,40,80",
}


class UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _int_list(text):
    values = _float_list(text)
    if any(v != int(v) for v in values):
        raise UsageError(f"expected integers, got {text!r}")
    return [int(v) for v in values]


def parse_grid(text):
    """``x0,x1,y0,y1,res`` -> ((x0, x1, y0, y1), res)."""
    values = _float_list(text)
    if len(values) != 5 or values[4] != int(values[4]):
        raise UsageError(f"--grid needs x0,x1,y0,y1,res; got {text!r}")
    x0, x1, y0, y1, res = values
    if not (x1 > x0 and y1 > y0 and res >= 2):
        raise UsageError("--grid needs x0 < x1, y0 < y1 and res >= 2")
    return (x0, x1, y0, y1), int(res)


def read_config(path):
    """``key = value`` lines; '#' starts a comment; keys use - or _."""
    config = {}
    with open(path) as fh:
        for number, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{number}: expected 'key = value'")
            key = key.strip().replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"{path}:{number}: unknown key {key!r}")
            config[key] = value.strip()
    return config


def _resolve(args):
    """Merge flags over config file over built-in defaults."""
    config = read_config(args.config) if args.config else {}
    merged = {}
    for key, default in DEFAULTS.items():
        value = getattr(args, key, None)
        if value is None:
            value = config.get(key, default)
            if value is not None and default is not None and not isinstance(value, type(default)):
                try:
                    value = type(default)(value)
                except ValueError:
                    raise UsageError(f"bad value for {key}: {value!r}") from None
        merged[key] = value
    return argparse.Namespace(**merged)


def make_curve(spec):
    """Preset name, ``circle:R`` or the path of a Fourier curve file."""
    if os.path.isfile(spec):
        try:
            return read_fourier_curve(spec)
        except DegenerateCurveError as exc:
            raise UsageError(str(exc)) from None
        except ValueError as exc:
            raise OSError(f"{spec}: {exc}") from None
    name, _, param = spec.partition(":")
    try:
        radius = float(param) if param else 1.0
        return preset_curve(name, radius)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def make_medium(opts):
    try:
        return fw.Medium(opts.k, complex(opts.n_re, opts.n_im), complex(opts.eta_re, opts.eta_im))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_forward(opts, out=None):
    curve = make_curve(opts.shape)
    medium = make_medium(opts)
    if opts.out is None:
        raise UsageError("forward needs --out")
    if opts.nf < 1 or opts.dirs < 2:
        raise UsageError("need --nf >= 1 and --dirs >= 2")
    if medium.n == 1 and medium.eta == 0:
        print("warning: n = 1 and eta = 0, the scatterer is invisible; "
              "expect a far field at discretization-error level", file=sys.stderr)
    disc = fw.Discretization(opts.nf)
    solver = fw.ScatteringSolver(curve, medium, disc)
    ff = fw.far_field_matrix(curve, medium, disc, opts.dirs, solver=solver)
    fw.write_far_field(opts.out, ff)
    fsharp = ldsm.build_fsharp(ff)
    print(f"shape={curve.name} k={medium.k:g} n={medium.n} eta={medium.eta} "
          f"nf={disc.nf} nodes={3 * disc.nf} dirs={opts.dirs}", file=out)
    print(f"pivot_ratio={solver.pivot_ratio:.3e} "
          f"residual={solver.residual(fw.directions(1)):.3e}", file=out)
    print(f"lambda1={fsharp.lambda1:.10g}", file=out)
    print(f"wrote {opts.out}", file=out)
    return 0


def disk_verify_rows(k_list, nf_list, radius, n, eta, n_dirs=64):
    """Yield ``(k, nf, eps)`` with ``eps = None`` where the oracle fails."""
    for k in k_list:
        disk = DiskScatterer(radius, fw.Medium(k, n, eta))
        try:
            analytic = disk_far_field_matrix(disk, n_dirs)
        except (ResonanceError, TruncationError):
            analytic = None
        for nf in nf_list:
            if analytic is None:
                yield k, nf, None
                continue
            ff = fw.far_field_matrix(preset_curve("circle", radius), disk.medium,
                                     fw.Discretization(nf), n_dirs)
            yield k, nf, table1_error(ff, disk, analytic)


def cmd_disk_verify(opts, out=None):
    k_list = _float_list(opts.k_list)
    nf_list = _int_list(opts.nf_list)
    if not k_list or not nf_list:
        raise UsageError("need at least one k and one Nf")
    medium = make_medium(argparse.Namespace(**{**vars(opts), "k": k_list[0]}))
    if not opts.radius > 0:
        raise UsageError("disk radius must be positive")
    rows = list(disk_verify_rows(k_list, nf_list, opts.radius, medium.n, medium.eta, opts.dirs))
    table = {(k, nf): eps for k, nf, eps in rows}
    header = "Nf".rjust(6) + "".join(f"k={k:g}".rjust(14) for k in k_list)
    print(header, file=out)
    for nf in nf_list:
        cells = "".join(
            ("NA" if table[k, nf] is None else f"{table[k, nf]:.5g}").rjust(14) for k in k_list
        )
        print(f"{nf:6d}{cells}", file=out)
    lines = ["k,Nf,eps"] + [
        f"{k:g},{nf},{'NA' if eps is None else format(eps, '.17g')}" for k, nf, eps in rows
    ]
    if opts.out:
        with open(opts.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        print(file=out)
        print("\n".join(lines), file=out)
    return 0


def cmd_image(opts, out=None):
    if opts.input is None:
        raise UsageError("image needs --input FILE")
    if opts.out is None:
        raise UsageError("image needs --out PREFIX")
    scheme = SCHEMES.get(opts.scheme)
    if scheme is None:
        raise UsageError(f"--scheme must be one of {', '.join(SCHEMES)}")
    if opts.exponent not in (2, 4):
        raise UsageError("--exponent must be 2 or 4")
    if not 0.0 <= opts.delta < 1.0:
        raise UsageError("--delta must lie in [0, 1)")
    if not 0.0 < opts.beta_frac < 1.0:
        raise UsageError("--beta-frac must lie in (0, 1)")
    if opts.degree < 1:
        raise UsageError("--degree must be positive")
    region, res = parse_grid(opts.grid)
    try:
        ff = fw.read_far_field(opts.input)
    except ValueError as exc:
        raise OSError(str(exc)) from None
    rec = ldsm.reconstruct(
        ff, opts.delta, opts.seed, scheme, opts.degree, opts.beta_frac, region, res, opts.exponent
    )
    csv_path, pgm_path = f"{opts.out}.csv", f"{opts.out}.pgm"
    ldsm.write_grid_csv(csv_path, rec.grid)
    ldsm.write_grid_pgm(pgm_path, rec.grid)
    print(f"lambda1={rec.fsharp.lambda1:.10g} beta={rec.beta:.6g} r={rec.r} "
          f"node_residual={rec.polynomial.node_residual:.3e}", file=out)
    print(f"wrote {csv_path} {pgm_path}", file=out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="scatterkit", description="Conductive-boundary scattering and Landweber imaging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, single_k=True):
        p.add_argument("--config", help="key = value file; flags override it")
        if single_k:
            p.add_argument("--k", type=float, help="wavenumber")
        p.add_argument("--n-re", dest="n_re", type=float)
        p.add_argument("--n-im", dest="n_im", type=float)
        p.add_argument("--eta-re", dest="eta_re", type=float)
        p.add_argument("--eta-im", dest="eta_im", type=float)
        p.add_argument("--dirs", type=int, help="number of directions (default 64)")
        p.add_argument("--out")

    p = sub.add_parser("forward", help="compute a far-field matrix file")
    common(p)
    p.add_argument("--shape", help="circle, circle:R, kite, peanut or a curve file")
    p.add_argument("--nf", type=int, help="number of faces (3 nodes each)")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("disk-verify", help="far-field error against the disk series")
    common(p, single_k=False)
    p.set_defaults(func=cmd_disk_verify)
    p.add_argument("--k", "--k-list", dest="k_list", help="comma-separated wavenumbers")
    p.add_argument("--nf", "--nf-list", dest="nf_list", help="comma-separated face counts")
    p.add_argument("--radius", type=float)

    p = sub.add_parser("image", help="Landweber direct sampling image from a far-field file")
    common(p)
    p.add_argument("--input", help="far-field file written by 'forward'")
    p.add_argument("--delta", type=float, help="relative noise level")
    p.add_argument("--seed", type=int)
    p.add_argument("--scheme", choices=sorted(SCHEMES))
    p.add_argument("--degree", type=int)
    p.add_argument("--beta-frac", dest="beta_frac", type=float)
    p.add_argument("--grid", help="x0,x1,y0,y1,res")
    p.add_argument("--exponent", type=int, choices=(2, 4))
    p.set_defaults(func=cmd_image)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad flags
    try:
        opts = _resolve(args)
        return args.func(opts)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (fw.ForwardFailure, NumericalFailure, ResonanceError, TruncationError,
            ldsm.FitError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
