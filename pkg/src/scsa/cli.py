"""Command-line front end.

    scsa generate    --grid 0,12,1201 --snr 11 --seed 0 --out run/
    scsa denoise     --in run/noisy.csv --h 0.4 --out run/
    scsa sweep       --in run/noisy.csv --clean run/clean.csv --h-grid 0.2:0.1:2.0 --out run/
    scsa bound       --in run/noisy.csv --h 0.4 --sigma 0.094 --gaussian --out run/
    scsa nh-profile  --in run/clean.csv --h-grid 0.2:0.1:2.0 --out run/

Every command writes into the ``--out`` directory and records its full
configuration, a hash of it, and checksums of its inputs in a JSON manifest.
Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._io import atomic_write_json, atomic_write_text, sha256_file
from .core import assemble, negative_spectrum, nh_profile, reconstruct, scsa
from .errors import DomainError, NumericError
from .noise import bound_report, chebyshev_bound, three_sigma_bound
from .operators import make_d2
from .selection import butterworth2, select_h, sweep
from .signals import NoiseModel, add_noise, make_grid, read_csv, sech2_signal, snr_db, write_csv

log = logging.getLogger("scsa")

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def parse_grid(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"--grid expects a,b,M, got {text!r}")
    try:
        a, b, M = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return a, b, M


def parse_h_grid(text):
    """``start:step:stop`` (inclusive) or a single value."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError("expected start:step:stop")
        start, step, stop = (float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --h-grid {text!r}: {exc}") from None
    if not step > 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad --h-grid {text!r}: need step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _config_hash(config):
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()


def _manifest(command, config, inputs=(), **extra):
    manifest = {
        "tool": "scsa",
        "version": __version__,
        "command": command,
        "config": config,
        "config_hash": _config_hash(config),
        "inputs": {Path(p).name: sha256_file(p) for p in inputs},
    }
    manifest.update(extra)
    return manifest


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _d2_for(signal, scheme):
    return make_d2(scheme, signal.grid.M, signal.grid.dx)


def cmd_generate(args):
    a, b, M = args.grid
    grid = make_grid(a, b, M)
    if args.snr is not None and args.sigma is not None:
        raise DomainError("give either --snr or --sigma, not both")
    target = args.snr if args.sigma is None else None
    variance = 1.0 if args.sigma is None else args.sigma**2
    model = NoiseModel(mean=args.mu, variance=variance, seed=args.seed)
    clean = sech2_signal(grid, args.center)
    noisy, noise = add_noise(clean, model, target)
    config = {
        "grid": [grid.a, grid.b, grid.M],
        "center": args.center,
        "snr_db": target,
        "sigma": args.sigma,
        "mu": args.mu,
        "seed": args.seed,
    }
    out = _out_dir(args)
    write_csv(clean, out / "clean.csv")
    write_csv(noisy, out / "noisy.csv")
    write_csv(noise, out / "noise.csv")
    realized = snr_db(clean, noise) if np.any(noise.values) else None
    atomic_write_json(out / "manifest.json", _manifest(
        "generate", config,
        realized_snr_db=realized,
        dx=grid.dx,
        noise_std=float(np.std(noise.values)),
    ))
    return EXIT_OK


def cmd_denoise(args):
    signal = read_csv(args.input)
    d2 = _d2_for(signal, args.scheme)
    spec = negative_spectrum(assemble(args.h, d2, signal), method=args.method)
    est = reconstruct(spec)
    out = _out_dir(args)
    write_csv(est, out / "reconstruction.csv")
    config = {"h": args.h, "scheme": d2.scheme, "method": args.method}
    record = spec.to_record()
    record["max_normalization_residual"] = float(np.max(np.abs(spec.normalization_residuals()), initial=0.0))
    inputs = [args.input]
    if args.clean:
        clean = read_csv(args.clean)
        record["relative_error_vs_clean"] = float(
            np.linalg.norm(clean.values - est.values) / np.linalg.norm(clean.values)
        )
        inputs.append(args.clean)
    atomic_write_json(out / "spectrum.json", _manifest("denoise", config, inputs, spectrum=record))
    return EXIT_OK


def _cheb_from_args(args):
    if args.sigma is None:
        return None
    if args.gaussian:
        if args.mu != 0.0:
            raise DomainError("--gaussian uses the zero-mean three-sigma rule; drop --mu")
        return three_sigma_bound(args.sigma)
    return chebyshev_bound(args.mu, args.sigma, args.gamma)


def cmd_sweep(args):
    noisy = read_csv(args.input)
    clean = read_csv(args.clean) if args.clean else None
    d2 = _d2_for(noisy, args.scheme)
    cheb = _cheb_from_args(args)
    result = sweep(
        noisy, d2, args.h_grid, butterworth2(args.wc), clean=clean,
        bound_B=None if cheb is None else cheb.B,
        clean_side=args.clean_side and clean is not None, method=args.method,
    )
    selection = select_h(result)
    out = _out_dir(args)
    if args.format == "csv":
        result.write_csv(out / "sweep.csv")
    else:
        table = {name: (None if col is None else [None if (isinstance(v, float) and math.isnan(v)) else v
                                                  for v in np.asarray(col).tolist()])
                 for name, col in result.columns()}
        atomic_write_json(out / "sweep_table.json", table)
    config = {
        "h_grid": [float(h) for h in result.h_grid],
        "scheme": d2.scheme,
        "wc": args.wc,
        "method": args.method,
        "bound": None if cheb is None else {"B": cheb.B, "p": cheb.p, "rule": cheb.rule},
        "clean_side": bool(args.clean_side),
    }
    inputs = [args.input] + ([args.clean] if args.clean else [])
    summary = {
        "recommended_h": selection.recommended_h,
        "local_minima": selection.local_minima,
        "no_interior_minimum": selection.no_interior_minimum,
        "N_h": {f"{h:g}": int(n) for h, n in zip(result.h_grid, result.n_h)},
        "failures": {f"{h:g}": msg for h, msg in result.failures.items()},
    }
    if result.true_error is not None:
        summary["true_error_argmin"] = float(result.h_grid[int(np.nanargmin(result.true_error))])
    atomic_write_json(out / "sweep.json", _manifest("sweep", config, inputs, summary=summary))
    return EXIT_OK


def cmd_bound(args):
    if args.sigma is None:
        raise DomainError("bound needs --sigma")
    noisy = read_csv(args.input)
    d2 = _d2_for(noisy, args.scheme)
    cheb = _cheb_from_args(args)
    noisy_est, noisy_spec = scsa(noisy, d2, args.h, args.method)
    clean_spec = empirical = None
    inputs = [args.input]
    if args.clean:
        clean = read_csv(args.clean)
        clean_est, clean_spec = scsa(clean, d2, args.h, args.method)
        empirical = np.linalg.norm(noisy_est.values - clean_est.values)
        inputs.append(args.clean)
    report = bound_report(noisy_spec, cheb, clean_spec, empirical)
    config = {"h": args.h, "scheme": d2.scheme, "sigma": args.sigma, "mu": args.mu,
              "gamma": args.gamma, "gaussian": bool(args.gaussian), "method": args.method}
    atomic_write_json(Path(_out_dir(args)) / "bound.json", _manifest("bound", config, inputs, report=report))
    return EXIT_OK


def cmd_nh_profile(args):
    signal = read_csv(args.input)
    d2 = _d2_for(signal, args.scheme)
    profile = nh_profile(signal, d2, args.h_grid, method=args.method)
    out = _out_dir(args)
    config = {"h_grid": [h for h, _ in profile], "scheme": d2.scheme, "method": args.method}
    if args.format == "csv":
        atomic_write_text(out / "nh_profile.csv", "h,N_h\n" + "".join(f"{h:.17g},{n}\n" for h, n in profile))
    else:
        atomic_write_json(out / "nh_profile.json", [{"h": h, "N_h": n} for h, n in profile])
    atomic_write_json(out / "nh_profile_manifest.json", _manifest("nh-profile", config, [args.input]))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="scsa", description="Semi-classical signal analysis toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--in", dest="input", required=True, help="input signal CSV (x,value)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--scheme", choices=["fourier", "fd"], default="fourier")
        p.add_argument("--method", choices=["lapack", "ql"], default="lapack", help="eigensolver backend")

    def noise_opts(p):
        p.add_argument("--sigma", type=float)
        p.add_argument("--mu", type=float, default=0.0)
        p.add_argument("--gamma", type=float, default=3.0)
        p.add_argument("--gaussian", action="store_true", help="three-sigma rule (p=0.997) instead of Chebyshev")

    p = sub.add_parser("generate", help="write clean, noisy and noise CSVs for the sech^2 test signal")
    p.add_argument("--out", required=True)
    p.add_argument("--grid", type=parse_grid, default=(0.0, 12.0, 1201))
    p.add_argument("--center", type=float, default=6.0)
    p.add_argument("--snr", type=float, default=None, help="target SNR in dB (default 11 unless --sigma)")
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("denoise", help="SCSA reconstruction at a fixed h")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--clean", help="optional clean reference for error reporting")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("sweep", help="h sweep with filtered-residual selection")
    common(p)
    p.add_argument("--clean")
    p.add_argument("--h-grid", type=parse_h_grid, default=parse_h_grid("0.2:0.1:2.0"))
    p.add_argument("--wc", type=float, default=0.01)
    p.add_argument("--clean-side", action="store_true", help="also reconstruct the clean signal at each h")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    noise_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound", help="a-posteriori noise error bound at a fixed h")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--clean")
    noise_opts(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("nh-profile", help="number of bound states across an h grid")
    common(p)
    p.add_argument("--h-grid", type=parse_h_grid, default=parse_h_grid("0.2:0.1:2.0"))
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_nh_profile)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "generate" and args.snr is None and args.sigma is None:
        args.snr = 11.0
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"scsa: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NumericError as exc:
        print(f"scsa: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"scsa: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
