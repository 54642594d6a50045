"""Command-line interface: ``raystat <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 computation failure (including a
failed verification check).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from sympy import isprime

from .algebra import MP

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2
DEFAULT_OUT = "raystat-out"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Validated command-line settings."""

    command: str
    m_f: int = 1
    ells: list[int] = field(default_factory=lambda: [3])
    X: int | None = None
    sign: str = "+"
    D: int | None = None
    out: Path = Path(DEFAULT_OUT)
    threads: int = 1
    checkpoint: int = 10_000
    precision: int = 50
    samples: int = 64
    suite: str = "oracles"
    csv: bool = False

    @property
    def ell(self) -> int:
        return self.ells[0]

    def validate(self) -> None:
        for ell in self.ells:
            if ell == 2 or not isprime(ell):
                raise UsageError(f"ell must be an odd prime, got {ell}")
        if self.m_f < 1:
            raise UsageError("--m must be a positive integer")
        if self.X is not None and self.X < 1:
            raise UsageError("--X must be at least 1")
        if self.sign not in ("+", "-"):
            raise UsageError("--sign must be + or -")
        if self.threads < 1 or self.checkpoint < 1 or self.precision < 15:
            raise UsageError("--threads and --checkpoint must be positive, --precision at least 15")
        if self.command in ("survey", "compare") and self.X is None:
            raise UsageError(f"{self.command} needs --X")
        if self.command == "field" and self.D is None:
            raise UsageError("field needs --D")
        if self.command == "geodesic" and self.D is None and self.X is None:
            raise UsageError("geodesic needs --D or --X")


def _parse_S(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--S expects a comma-separated list of primes, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--l", type=int, help="odd prime ell (default 3)")
    common.add_argument("--S", help="comma-separated odd primes; overrides --l")
    common.add_argument("--m", type=int, default=1, help="finite modulus m_f (default 1)")
    common.add_argument("--X", type=int, help="conductor bound: fields with |D| < X")
    common.add_argument("--sign", choices=["+", "-"], default="+")
    common.add_argument("--D", type=int, help="fundamental discriminant")
    common.add_argument("--out", help=f"output directory (default $RAYSTAT_OUT or ./{DEFAULT_OUT})")
    common.add_argument("--threads", type=int, default=1, help="worker processes for surveys")
    common.add_argument("--checkpoint", type=int, default=10_000, help="fields between survey checkpoints")
    common.add_argument("--precision", type=int, default=50, help="decimal digits for real numbers")

    p = _Parser(prog="raystat", description="Ray class group statistics of quadratic fields.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("predict", parents=[common], help="predicted averages per splitting signature")
    s = sub.add_parser("survey", parents=[common], help="enumerate fields and record observables")
    s.add_argument("--csv", action="store_true", help=argparse.SUPPRESS)
    c = sub.add_parser("compare", parents=[common], help="compare a finished survey with predictions")
    c.add_argument("--csv", action="store_true", help="also write compare.csv")
    sub.add_parser("field", parents=[common], help="inspect a single field")
    g = sub.add_parser("geodesic", parents=[common], help="closed geodesics of the narrow classes")
    g.add_argument("--samples", type=int, default=64, help="points per geodesic")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", choices=["oracles", "survey", "all"], default="oracles")
    return p


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    ells = _parse_S(ns.S) if ns.S else [ns.l if ns.l is not None else 3]
    if not ells:
        raise UsageError("--S is empty")
    out = ns.out or os.environ.get("RAYSTAT_OUT") or DEFAULT_OUT
    cfg = RunConfig(
        command=ns.command,
        m_f=ns.m,
        ells=ells,
        X=ns.X,
        sign=ns.sign,
        D=ns.D,
        out=Path(out),
        threads=ns.threads,
        checkpoint=ns.checkpoint,
        precision=ns.precision,
        samples=getattr(ns, "samples", 64),
        suite=getattr(ns, "suite", "oracles"),
        csv=getattr(ns, "csv", False),
    )
    cfg.validate()
    return cfg


def _survey_dir(cfg: RunConfig) -> Path:
    sign = "pos" if cfg.sign == "+" else "neg"
    return cfg.out / f"survey_{sign}_X{cfg.X}_m{cfg.m_f}_l{cfg.ell}"


def _frac(d: dict) -> Fraction:
    return Fraction(d["num"], d["den"])


def _fmt(q) -> str:
    return f"{q} ~ {float(q):.6f}"


# ---------------------------------------------------------------------------
# Subcommands


def cmd_predict(cfg: RunConfig) -> int:
    from .predictions import prediction_report

    cfg.out.mkdir(parents=True, exist_ok=True)
    for ell in cfg.ells:
        rep = prediction_report(ell, cfg.m_f)
        print(f"m_f = {cfg.m_f}, ell = {ell}")
        print(f"  Av+({ell}) = {_fmt(rep.av_plus)}")
        for k, v in rep.s_local.items():
            print(f"  local factor at {k}: {v}")
        print(f"  {'signature':<22}{'density':>10}{'U_+':>14}{'U_-':>14}{'Av+ fixed R':>14}{'E[#Pic[l]]':>12}")
        for row in rep.signatures:
            dens = str(_frac(row["density"]))
            avg = str(_frac(row["av_plus_fixed_R"]))
            arak = str(_frac(row["expected_arakelov_torsion"]))
            up = "x".join(f"Z/{d}" for d in row["U_plus"]) or "0"
            um = "x".join(f"Z/{d}" for d in row["U_minus"]) or "0"
            print(f"  {row['signature']:<22}{dens:>10}{up:>14}{um:>14}{avg:>14}{arak:>12}")
        path = cfg.out / f"predict_m{cfg.m_f}_l{ell}.json"
        path.write_text(rep.to_json() + "\n")
        print(f"  written {path}")
    return EXIT_OK


def cmd_survey(cfg: RunConfig) -> int:
    from .empirics import survey

    d = _survey_dir(cfg)
    s = survey(cfg.X, cfg.sign, cfg.m_f, cfg.ell, d, threads=cfg.threads, checkpoint=cfg.checkpoint)
    print(f"fields {s.records} (averaged {s.count}, excluded {s.excluded}, errors {s.errors})")
    print(f"mean #Cl[{cfg.ell}] = {s.mean_cl_ell():.6f}")
    print(f"mean #Cl({cfg.m_f})[{cfg.ell}] = {s.mean_ray_ell():.6f}")
    print(f"written {d}")
    return EXIT_FAILURE if s.errors else EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    from .empirics import compare, export_csv, load_stats
    from .predictions import prediction_report

    d = _survey_dir(cfg)
    stats = load_stats(d / "stats.json")
    report = prediction_report(cfg.ell, cfg.m_f) if cfg.sign == "+" else None
    cmp = compare(stats, report)
    (d / "compare.json").write_text(json.dumps(cmp.to_dict(), indent=2) + "\n")
    if cfg.csv:
        export_csv(cmp, d / "compare.csv")
    print(f"{'quantity':<20}{'signature':<26}{'observed':>12}{'predicted':>12}{'rel dev':>10}{'n':>9}")
    for r in cmp.rows:
        pred = "" if r.predicted is None else f"{r.predicted:.5f}"
        rel = "" if r.rel_dev is None else f"{r.rel_dev:+.4f}"
        print(f"{r.quantity:<20}{r.signature:<26}{r.observed:>12.5f}{pred:>12}{rel:>10}{r.n:>9}")
    print(f"written {d / 'compare.json'}")
    return EXIT_OK


def cmd_field(cfg: RunConfig) -> int:
    from .predictions import SplittingSignature
    from .quadfield import ClassGroupComputation, fundamental_unit, is_fundamental, totally_positive_unit
    from .rayclass import MinusOrbits, Modulus, ray_class_data, residue_units, unit_image

    D, m, ell = cfg.D, cfg.m_f, cfg.ell
    if not is_fundamental(D):
        raise UsageError(f"{D} is not a fundamental discriminant")
    cg = ClassGroupComputation(D)
    print(f"D = {D}, m_f = {m}, ell = {ell}")
    print(f"splitting signature: {SplittingSignature.of_field(D, m).code}")
    print(f"Cl = {cg.group}")
    if D > 0:
        eps = fundamental_unit(D)
        print(f"Cl+ (narrow) = {cg.narrow_group}")
        print(f"eps = {eps} (norm {eps.norm:+d}), eps+ = {totally_positive_unit(D)}")
    units = residue_units(D, m) if m > 1 else None
    ray = ray_class_data(D, Modulus(m), cg, units)
    print(f"Cl({m}) = {ray.group}")
    print(f"#Cl({m})[{ell}] = {ray.group.torsion_size(ell)}")
    if D > 0:
        narrow = ray_class_data(D, Modulus(m, True), cg, units)
        print(f"Cl({m} oo) = {narrow.group}")
    if m > 1:
        print(f"(O/{m})^x = {units.group}")
        if D > 0:
            img = unit_image(D, m, ell, units)
            orbits = MinusOrbits(D, m, ell)
            coords = ",".join(map(str, img.coordinates)) or "-"
            label = orbits.label(img.coordinates) if img.minus_dim else 0
            size = len(orbits.orbits[label])
            kind = "trivial" if img.is_trivial else "nontrivial"
            print(
                f"unit image in U_-/U_-^{ell} (dim {img.minus_dim}): ({coords}), {kind}; "
                f"orbit {label} of size {size}/{orbits.minus_order}"
            )
    return EXIT_OK


def cmd_geodesic(cfg: RunConfig) -> int:
    from .geodesics import form_to_geodesic, narrow_class_forms
    from .quadfield import fundamental_discriminants, is_fundamental

    if cfg.D is not None:
        if cfg.D <= 0 or not is_fundamental(cfg.D):
            raise UsageError("--D must be a positive fundamental discriminant")
        Ds = [cfg.D]
        path = cfg.out / f"geodesics_D{cfg.D}.jsonl"
    else:
        Ds = list(fundamental_discriminants(cfg.X, "+"))
        path = cfg.out / f"geodesics_X{cfg.X}.jsonl"
    cfg.out.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w") as fh:
        for D in Ds:
            for f in narrow_class_forms(D):
                arc = form_to_geodesic(f, cfg.samples)
                fh.write(arc.to_json() + "\n")
                n += 1
                if len(Ds) == 1:
                    e1, e2 = (e.number for e in arc.endpoints)
                    print(f"form {tuple(f)}: endpoints {e1}, {e2}; length {MP.nstr(arc.length, 15)}")
    print(f"{n} geodesics written to {path}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from . import verify

    results = []
    if cfg.suite in ("oracles", "all"):
        for check in (
            verify.check_class_groups,
            verify.check_units,
            verify.check_order_identity,
            verify.check_hom_ext,
            verify.check_local_factors,
            verify.check_elltorsexp,
            verify.check_geodesics,
        ):
            r = check()
            print(r.line(), flush=True)
            results.append(r)
    if cfg.suite in ("survey", "all"):
        d = cfg.out / "survey_verify"
        stats = verify.ensure_survey(d, threads=cfg.threads)
        for check in (verify.check_survey_trends, verify.check_splitting, verify.check_unit_orbits):
            r = check(d, stats)
            print(r.line(), flush=True)
            results.append(r)
    hard = [r for r in results if not r.passed and not r.soft]
    print(f"{len(results) - len(hard)}/{len(results)} checks without hard failure")
    return EXIT_FAILURE if hard else EXIT_OK


COMMANDS = {
    "predict": cmd_predict,
    "survey": cmd_survey,
    "compare": cmd_compare,
    "field": cmd_field,
    "geodesic": cmd_geodesic,
    "verify": cmd_verify,
}


def run(argv: Sequence[str]) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    saved, MP.dps = MP.dps, cfg.precision
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"raystat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, RuntimeError, ValueError, OSError) as exc:
        print(f"raystat: computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        MP.dps = saved


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
