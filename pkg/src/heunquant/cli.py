"""Command-line entry point: ``python3 -m heunquant <command> ...``.

Commands: roots, spectrum, shoot, fit, growth. Results go to stdout; with
``--out FILE`` or ``--results-dir DIR`` they are also written to disk
(existing files are kept unless ``--force``). Exit codes: 0 success,
2 invalid configuration, 3 no admissible root / bracket, 4 rank-deficient fit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .charpoly import Mode, QuantizationProblem, build_charpoly
from .core import ModifiedBCHParams, PhysicalParams, to_fraction
from .errors import (DegreeZero, HeunQuantError, NoAdmissibleRoot, RankDeficient,
                     SameClassification, TooFewPoints)

EXIT_OK, EXIT_CONFIG, EXIT_NOROOT, EXIT_RANK = 0, 2, 3, 4


class ConfigError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def read_config(path: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _add_fixed(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("fixed parameters (rationals as p/q)")
    g.add_argument("--mode", default="c", help="c (quantize c-tilde), B (quantize bold B) or tension "
                   "(quantize b/m^2); default c")
    g.add_argument("--a", type=_frac, help="a-tilde, Coulomb strength (mode c)")
    g.add_argument("--b", type=_frac, help="b-tilde, linear strength (mode c)")
    g.add_argument("--A", type=_frac, help="bold A = a/sqrt(c), dimensionless (mode B)")
    g.add_argument("--m", type=_frac, help="quark mass in the units of b (mode tension); default 1")


def _add_output(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("output")
    g.add_argument("--out", help="also write the result to this file")
    g.add_argument("--results-dir", help="also write one file per (command, tag) into this directory")
    g.add_argument("--force", action="store_true", help="overwrite existing output files")
    g.add_argument("--config", help="key = value file providing defaults for these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heunquant", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("roots", help="real roots of one characteristic polynomial")
    _add_fixed(r)
    r.add_argument("--N", type=int, required=False, help="radial node number N >= 0")
    r.add_argument("--L", type=int, default=0, help="angular momentum L >= 0; default 0")
    r.add_argument("--K", type=int, default=0, help="root index for mode tension (0 = smallest); default 0")
    r.add_argument("--all", action="store_true", help="list every real root instead of the selected one")
    r.add_argument("--json", action="store_true", help="emit the RootSet as JSON")
    r.add_argument("--precision", type=float, default=1e-12,
                   help="enclosure half-width (same units as the root); default 1e-12")
    _add_output(r)

    s = sub.add_parser("spectrum", help="spectrum grid over (N, L) as CSV")
    _add_fixed(s)
    s.add_argument("--Nmin", type=int, default=0, help="smallest N; default 0")
    s.add_argument("--Nmax", type=int, default=10, help="largest N; default 10")
    s.add_argument("--Lmax", type=int, help="cap on L (L runs 0..min(N, Lmax)); default N")
    s.add_argument("--K", type=int, default=0, help="root index for mode tension; default 0")
    s.add_argument("--table5", action="store_true",
                   help="emit the gap table (root at L=N minus root at L=0) for N=10..20")
    s.add_argument("--curvature", action="store_true",
                   help="emit curvature classes of the c, B and A spectra over 0<=N<=L+5")
    s.add_argument("--precision", type=float, default=1e-12, help="root half-width; default 1e-12")
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="parallel worker processes; default: all CPUs")
    _add_output(s)

    h = sub.add_parser("shoot", help="shooting runs for the rho (or xi) equation")
    h.add_argument("--fig", type=int, choices=[1, 2, 3, 4], help="reproduce a figure's trajectory family")
    h.add_argument("--a", type=_frac, default=Fraction(2, 5), help="a-tilde; default 2/5")
    h.add_argument("--b", type=_frac, default=Fraction(1), help="b-tilde; default 1")
    h.add_argument("--c", type=_frac, default=Fraction(5, 2), help="c-tilde; default 5/2")
    h.add_argument("--L", type=int, default=0, help="angular momentum; default 0")
    h.add_argument("--E", type=_frac, help="trial energy E-tilde for a single trajectory")
    h.add_argument("--bisect", action="store_true", help="bisect the energy between --E-lo and --E-hi")
    h.add_argument("--E-lo", type=_frac, help="lower bracket energy (default: scan 5..12)")
    h.add_argument("--E-hi", type=_frac, help="upper bracket energy")
    h.add_argument("--max-iter", type=int, default=60, help="bisection steps; default 60")
    h.add_argument("--digits", type=int, default=0,
                   help="mpmath working digits (0 = double precision); default 0")
    h.add_argument("--ic", choices=["flat", "series"], default="flat",
                   help="initial conditions: y(0)=1, y'(0)=0 (flat) or Frobenius series; default flat")
    h.add_argument("--variable", choices=["rho", "xi"], default="rho",
                   help="integrate in rho, or in xi = rho^2 (needs a = b = 0); default rho")
    h.add_argument("--rho-max", type=float, default=8.0, help="end of integration (dimensionless); default 8")
    h.add_argument("--window", type=float, default=6.0, help="flatness window end; default 6")
    _add_output(h)

    f = sub.add_parser("fit", help="least-squares surface fits over root tables")
    _add_fixed(f)
    f.add_argument("--paper-model", action="store_true",
                   help="fix exponents and denominator constants at the reference values")
    f.add_argument("--exponents", help="comma list like p=9/10,q=3/5,w=11/10,t=8/5")
    f.add_argument("--table", help="CSV with N,L,value rows to fit instead of computing the grid")
    f.add_argument("--Nmax", type=int, help="largest N of the grid; default 20 (c), 22 (B), 25 (tension)")
    f.add_argument("--K", type=int, default=0, help="root index for mode tension; default 0")
    f.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="parallel workers; default all CPUs")
    _add_output(f)

    g = sub.add_parser("growth", help="large-z growth check for non-terminating series")
    g.add_argument("--mu", type=_frac, default=Fraction(-2), help="mu; default -2")
    g.add_argument("--eps", type=_frac, default=Fraction(-1), help="epsilon; default -1")
    g.add_argument("--nu", type=_frac, default=Fraction(2), help="nu; default 2")
    g.add_argument("--omega", type=_frac, default=Fraction(1), help="omega; default 1")
    g.add_argument("--Omega", type=_frac, default=Fraction(1), help="Omega; default 1")
    g.add_argument("--z-lo", type=float, default=2.0, help="window start; default 2")
    g.add_argument("--z-hi", type=float, default=12.0, help="window end; default 12")
    g.add_argument("--n-terms", type=int, default=2, help="outer shells of the amplitude sum; default 2")
    g.add_argument("--i-max", type=int, default=100, help="inner index cut-off; default 100")
    _add_output(g)
    return parser


def _fixed(args, mode: Mode) -> Dict[str, Fraction]:
    given = {k: getattr(args, k) for k in ("a", "b", "A", "m") if getattr(args, k, None) is not None}
    if mode is Mode.QuantizeTension and "m" not in given:
        given["m"] = Fraction(1)
    extra = set(given) - set(mode.fixed_keys)
    if extra:
        raise ConfigError(f"mode {mode.value} does not take {sorted(extra)}")
    missing = [k for k in mode.fixed_keys if k not in given]
    if missing:
        raise ConfigError(f"mode {mode.value} needs --{' --'.join(missing)}")
    return given


def _emit(args, text: str, tag: str, ext: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    targets = []
    if getattr(args, "out", None):
        targets.append(Path(args.out))
    if getattr(args, "results_dir", None):
        targets.append(Path(args.results_dir) / f"{args.command}_{tag}.{ext}")
    for path in targets:
        if path.exists() and not args.force:
            raise ConfigError(f"{path} exists; pass --force to overwrite")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n")


def _tag(mode: Mode, fixed: Dict) -> str:
    return mode.value + "_" + "_".join(f"{k}{str(v).replace('/', 'o')}" for k, v in fixed.items())


def cmd_roots(args) -> int:
    from .rootfind import decimal_string, find_roots
    from .spectrum import select_index
    if args.N is None:
        raise ConfigError("--N is required")
    mode = Mode.parse(args.mode)
    fixed = _fixed(args, mode)
    q = QuantizationProblem(mode, args.N, args.L, fixed)
    poly = build_charpoly(q)
    rs = find_roots(poly, precision=args.precision)
    tag = f"{_tag(mode, fixed)}_N{args.N}_L{args.L}"
    if args.json:
        _emit(args, rs.to_json(), tag, "json")
        return EXIT_OK
    if args.all:
        lines = [f"# {len(rs)} real roots of d_(N+1) in {mode.variable}, N={args.N} L={args.L}"]
        lines += [f"{i} {decimal_string(r.midpoint, 12)} {r.multiplicity}" for i, r in enumerate(rs.roots)]
        _emit(args, "\n".join(lines), tag + "_all", "txt")
        return EXIT_OK
    idx = select_index(mode, rs, args.K)
    _emit(args, decimal_string(rs.roots[idx].midpoint, 12), tag, "txt")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    from .fitting import curvature_report
    from .spectrum import enumerate_spectrum, fmt12, gap_table, spectrum_csv
    mode = Mode.parse(args.mode)
    if args.curvature:
        rows = curvature_report()
        text = "L,c,B,A,A_slope\n" + "".join(
            f"{r['L']},{r['c']},{r['B']},{r['A']},{fmt12(r['A_slope'])}\n" for r in rows)
        _emit(args, text, "curvature", "csv")
        return EXIT_OK
    fixed = _fixed(args, mode)
    if args.table5:
        if mode is not Mode.QuantizeC:
            raise ConfigError("--table5 needs --mode c")
        rows = gap_table(fixed, range(10, 21))
        text = "N,gap\n" + "".join(f"{n},{fmt12(g)}\n" for n, g in rows)
        _emit(args, text, "table5_" + _tag(mode, fixed), "csv")
        return EXIT_OK
    if args.Nmax < args.Nmin or args.Nmin < 0:
        raise ConfigError(f"empty N range {args.Nmin}..{args.Nmax}")
    skipped: List = []
    entries = enumerate_spectrum(mode, fixed, range(args.Nmin, args.Nmax + 1), K=args.K,
                                 L_max=args.Lmax, precision=args.precision,
                                 workers=args.workers, skipped=skipped)
    for N, L, why in skipped:
        print(f"skipped N={N} L={L}: {why}", file=sys.stderr)
    _emit(args, spectrum_csv(entries), f"{_tag(mode, fixed)}_N{args.Nmin}-{args.Nmax}", "csv")
    return EXIT_OK


def cmd_shoot(args) -> int:
    from .shooting import (ICMode, ShootingConfig, bisect_energy, figure_runs, integrate,
                           scan_for_bracket)
    if args.fig:
        from .rootfind import decimal_string
        lines = ["label,E,classification,blowup_rho,end_value"]
        for label, cfg in figure_runs(args.fig):
            traj = integrate(cfg)
            lines.append(f"{label},{decimal_string(cfg.E_trial, 40)},{traj.classification.value},"
                         f"{'' if traj.blowup_rho is None else format(traj.blowup_rho, '.6g')},"
                         f"{format(traj.end_value, '.6g')}")
            if args.results_dir:
                path = Path(args.results_dir) / f"shoot_{label}.csv"
                if path.exists() and not args.force:
                    raise ConfigError(f"{path} exists; pass --force to overwrite")
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(traj.to_csv())
        sys.stdout.write("\n".join(lines) + "\n")
        if args.out:
            out = Path(args.out)
            if out.exists() and not args.force:
                raise ConfigError(f"{out} exists; pass --force to overwrite")
            out.write_text("\n".join(lines) + "\n")
        return EXIT_OK
    if args.variable == "xi" and (args.a != 0 or args.b != 0):
        raise ConfigError("--variable xi needs --a 0 --b 0")
    cfg = ShootingConfig(params=PhysicalParams(a=args.a, b=args.b, c=args.c, L=args.L, E=0),
                         E_trial=args.E if args.E is not None else 0,
                         ic_mode=ICMode(args.ic), variable=args.variable, rho_max=args.rho_max,
                         flat_window=args.window, dps=args.digits or None)
    tag = f"a{args.a}_b{args.b}_c{args.c}".replace("/", "o")
    if args.bisect:
        if (args.E_lo is None) != (args.E_hi is None):
            raise ConfigError("give both --E-lo and --E-hi, or neither")
        if args.E_lo is None:
            lo, hi = scan_for_bracket(cfg, 5, 12)
        else:
            lo, hi = args.E_lo, args.E_hi
        rep = bisect_energy(cfg, lo, hi, max_iter=args.max_iter, reach_tol=0.1)
        digits = max(15, min(40, args.digits or 15))
        _emit(args, rep.to_json(digits), "bisect_" + tag, "json")
        return EXIT_OK
    if args.E is None:
        raise ConfigError("--E, --bisect or --fig is required")
    traj = integrate(cfg)
    print(f"# classification={traj.classification.value}", file=sys.stderr)
    _emit(args, traj.to_csv(), f"{tag}_E{args.E}".replace("/", "o"), "csv")
    return EXIT_OK


def _read_table(path: str):
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line or line[0].isalpha():
            continue
        n, l, v = (x.strip() for x in line.split(",")[:3])
        rows.append((int(n), int(l), float(v)))
    return rows


def _parse_exponents(text: str) -> Dict[str, Fraction]:
    out = {}
    for item in text.split(","):
        k, v = item.split("=")
        out[k.strip()] = to_fraction(v.strip())
    return out


def cmd_fit(args) -> int:
    from .fitting import (REFERENCE_COEFFS, REFERENCE_MODELS, TENSION_KEYS, TENSION_TABLE, Family, fit,
                          grid_table, reference_model_key, tension_table)
    mode = Mode.parse(args.mode)
    fixed = _fixed(args, mode)
    family = {Mode.QuantizeC: Family.CfitRational, Mode.QuantizeB: Family.BfitRational,
              Mode.QuantizeTension: Family.TensionFit}[mode]
    exps: Dict = {}
    key = reference_model_key(mode, fixed)
    if family is not Family.TensionFit:
        if args.exponents:
            exps = _parse_exponents(args.exponents)
        elif args.paper_model:
            if key not in REFERENCE_MODELS:
                raise ConfigError(f"no reference surface for {mode.value} with {fixed}")
            exps = REFERENCE_MODELS[key]
        else:
            raise ConfigError("give --paper-model or --exponents")
    if args.table:
        table = _read_table(args.table)
        spec = f"table {args.table}"
    elif family is Family.TensionFit:
        nmax = args.Nmax or 25
        table = tension_table(args.K, nmax, fixed["m"], workers=args.workers)
        spec = f"tension K={args.K} {2 * args.K + 1}<=N<={nmax} 0<=L<=N"
    else:
        nmax = args.Nmax or (20 if mode is Mode.QuantizeC else 22)
        table = grid_table(mode, fixed, nmax, workers=args.workers)
        spec = f"{mode.value} 0<=N<={nmax} 0<=L<=N"
    model = fit(table, family, exps, K=args.K, grid_spec=spec)
    doc = json.loads(model.to_json())
    if family is Family.TensionFit and args.K in TENSION_TABLE:
        doc["reference"] = dict(zip(TENSION_KEYS, TENSION_TABLE[args.K]))
    elif key in REFERENCE_COEFFS and args.paper_model:
        doc["reference"] = REFERENCE_COEFFS[key]
    _emit(args, json.dumps(doc, sort_keys=True), f"{_tag(mode, fixed)}_K{args.K}", "json")
    return EXIT_OK


def cmd_growth(args) -> int:
    from .asymptotics import amplitude_truncated, verify_growth
    p = ModifiedBCHParams.from_omega(args.mu, args.eps, args.nu, args.omega, args.Omega)
    rep = verify_growth(p, args.z_lo, args.z_hi)
    rep.A_truncated, rep.tail_estimate = amplitude_truncated(p, args.n_terms, args.i_max)
    _emit(args, rep.to_json(), "growth", "json")
    return EXIT_OK


COMMANDS = {"roots": cmd_roots, "spectrum": cmd_spectrum, "shoot": cmd_shoot, "fit": cmd_fit,
            "growth": cmd_growth}


def _apply_config(parser: argparse.ArgumentParser, argv: List[str]) -> List[str]:
    """Turn ``--config FILE`` entries into flags placed before the explicit ones."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ConfigError("--config needs a path")
    cfg = read_config(argv[i + 1])
    rest = argv[:i] + argv[i + 2:]
    if not rest:
        raise ConfigError("a command is required")
    injected = []
    for k, v in cfg.items():
        flag = "--" + k.replace("_", "-")
        if v.lower() in ("true", "yes", "on"):
            injected.append(flag)
        elif v.lower() in ("false", "no", "off"):
            continue
        else:
            injected += [flag, v]
    return rest[:1] + injected + rest[1:]


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_CONFIG
    except (NoAdmissibleRoot, DegreeZero, SameClassification) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOROOT
    except (RankDeficient, TooFewPoints) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANK
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HeunQuantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
