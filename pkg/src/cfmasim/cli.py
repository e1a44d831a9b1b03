"""Command-line entry point: ``cfmasim <subcommand> ...``."""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import gf2_codes, rate_region, simharness
from .modulation import ModulationSpec

EXIT_OK, EXIT_VALIDATION, EXIT_PRECISION = 0, 2, 3


def _gains(text):
    return tuple(simharness._parse_complex(t) for t in text.split(","))


def _spec(args):
    return ModulationSpec(args.family, 1.0, args.L, args.theta)


def _add_constellation(p):
    p.add_argument("--gains", type=_gains, required=True, help="comma list, complex as a+bi")
    p.add_argument("--family", choices=("bpsk", "pam", "qam"), default="bpsk")
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--coeffs", type=lambda s: tuple(int(t) for t in s.split(",")), default=(1, 1))
    p.add_argument("--nodes", type=int, default=None, help="Gauss-Hermite order per axis")


def _est(args):
    return rate_region.EntropyEstimator(nodes=args.nodes)


def cmd_region(args):
    spec = _spec(args)
    if args.csv:
        sys.stdout.write(rate_region.region_csv(args.power_db, args.gains, spec, args.coeffs, _est(args)))
        return EXIT_OK
    for pdb in args.power_db:
        r = rate_region.region_report(10 ** (pdb / 10), args.gains, spec, args.coeffs, _est(args))
        e = r.entropies
        print(f"P = {pdb:g} dB")
        for name, pt in (("A", r.A), ("B", r.B), ("A'", r.Ap), ("B'", r.Bp)):
            print(f"  {name:<3}({pt.R1:.6f}, {pt.R2:.6f})")
        print(f"  H(S|Y) = {e.HS_Y:.6f}  H(X1,X2|Y,S) = {e.H12_YS:.6f}  H(X1,X2|Y) = {e.H12_Y:.6f}")
        print(f"  H(X1|Y) = {e.H1_Y:.6f}  H(X2|Y) = {e.H2_Y:.6f}  error bound = {e.err:.2e}")
        print(f"  dominant face: A' {r.faces['A']}, B' {r.faces['B']}")
    return EXIT_OK


def cmd_minpower(args):
    target = args.rate[0] if len(args.gains) == 1 else tuple(args.rate)
    p = rate_region.min_power_db(target, args.gains, _spec(args), args.coeffs, _est(args))
    print(f"{p:.4f}")
    return EXIT_OK


def cmd_merge(args):
    H = gf2_codes.parse_alist(Path(args.input).read_text())
    pair = gf2_codes.build_nested_pair(H, args.merges, args.seed, allow_xor=args.xor_ok)
    text = gf2_codes.write_alist(pair.H_super)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    r_sup, r_sub = pair.rates
    print(f"rates: super {r_sup:.6f}, sub {r_sub:.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_ber(args):
    cfg = simharness.parse_config(Path(args.config).read_text())
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    res = simharness.run_sweep(cfg, compute_bound=not args.no_bound)
    if args.output:
        Path(args.output).write_text(res.csv, newline="")
    else:
        sys.stdout.write(res.csv)
    if res.bound_db is not None:
        print(f"theoretical bound: {res.bound_db:.4f} dB", file=sys.stderr)
    return EXIT_OK


def cmd_encode_decode(args):
    cfg = simharness.parse_config(Path(args.config).read_text())
    sc = simharness.build_scenario(cfg)
    p = args.power_db if args.power_db is not None else (cfg.powers_db[0] if cfg.powers_db else 10.0)
    errs = simharness.run_trial(sc, p, args.trial, noise=not args.noise_off)
    for stage, e in errs.items():
        print(f"{stage}: {e} bit errors")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="cfmasim", description="Compute-forward multiple access simulator")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("region", help="MAC and compute-forward rate points")
    _add_constellation(p)
    p.add_argument("--power-db", type=float, nargs="+", required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("minpower", help="smallest power reaching a rate pair")
    _add_constellation(p)
    p.add_argument("--rate", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_minpower)

    p = sub.add_parser("merge", help="enlarge an alist code by merging checks")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--merges", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--xor-ok", action="store_true", help="allow merges of overlapping checks")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("ber", help="BER sweep from a config file")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-bound", action="store_true", help="skip the theoretical bound search")
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("encode-decode", help="one block through the configured chain")
    p.add_argument("config")
    p.add_argument("--power-db", type=float)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--noise-off", action="store_true")
    p.set_defaults(func=cmd_encode_decode)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except rate_region.PrecisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
