"""Verification suites: brute-force oracle equivalence and survey trend checks.

Each check returns a :class:`CheckResult`.  The oracle suite is exact and
hard-fails.  The survey suite reads (or produces) one survey at X = 10^6;
its trend check is soft and only reported.
"""

from __future__ import annotations

import hashlib
import math
import random
import shutil
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable

from . import oracles
from .algebra import MP, C2FinAbGroup, FinAbGroup, c2_ext_size, c2_hom_size
from .extensions import ConcreteModule, ext_count, hom_count
from .predictions import (
    SplittingSignature,
    all_signatures,
    av_plus,
    build_UR,
    density_pR,
    elltorsexp_closed,
    elltorsexp_series,
    s_local,
    s_local_derived,
)
from .quadfield import (
    ClassGroupComputation,
    fundamental_discriminants,
    fundamental_unit,
)
from .rayclass import Modulus, SplittingType, ray_class_data, residue_units

SURVEY_X = 10**6
SURVEY_M = 7
SURVEY_ELL = 3
SOURCE_MODULES = ("algebra", "quadfield", "rayclass", "predictions", "empirics")


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    soft: bool = False

    def line(self) -> str:
        tag = "PASS" if self.passed else ("WARN" if self.soft else "FAIL")
        return f"[{tag}] {self.number:>2} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, str]], soft: bool = False) -> CheckResult:
    t = time.perf_counter()
    ok, detail = fn()
    return CheckResult(number, name, ok, detail, time.perf_counter() - t, soft)


def _discriminants(X: int, signs: Iterable[str] = ("+", "-")) -> list[int]:
    return [D for s in signs for D in fundamental_discriminants(X, s)]


# ---------------------------------------------------------------------------
# Oracle suite


def check_class_groups(X: int = 5000) -> CheckResult:
    def run():
        bad = []
        Ds = _discriminants(X)
        for D in Ds:
            cg = ClassGroupComputation(D)
            if cg.group != oracles.OracleClassGroup(D).structure():
                bad.append(D)
            elif D > 0 and cg.narrow_order != oracles.oracle_narrow_class_number(D):
                bad.append(D)
        return not bad, f"{len(Ds)} fields, mismatches {bad[:5]}"

    return _timed(1, "class groups vs reduced-ideal oracle", run)


def check_units(X: int = 5000) -> CheckResult:
    def run():
        bad = []
        Ds = list(fundamental_discriminants(X, "+"))
        for D in Ds:
            u = fundamental_unit(D)
            if u.norm not in (1, -1) or not oracles.oracle_unit_check(D, u.x, u.y):
                bad.append(D)
        return not bad, f"{len(Ds)} fields, mismatches {bad[:5]}"

    return _timed(2, "fundamental units vs Pell search", run)


def check_order_identity(X: int = 2000, moduli: tuple[int, ...] = (3, 5, 7, 9, 15, 21)) -> CheckResult:
    """#Cl(m) * #image(O^x) = h * #(O/m)^x * 2^r with every right-hand factor from an oracle."""

    def run():
        bad = []
        cases = 0
        for D in _discriminants(X):
            h = oracles.OracleClassGroup(D).order
            cg = ClassGroupComputation(D)
            unit = None
            if D > 0:
                u = fundamental_unit(D)
                unit = (u.x, u.y)
            for m in moduli:
                units = residue_units(D, m)
                gens = oracles.oracle_unit_residues(D, m, unit)
                count = oracles.residue_unit_count(D, m)
                for narrow in (False, True) if D > 0 else (False,):
                    res = ray_class_data(D, Modulus(m, narrow), cg, units)
                    used = gens if narrow else [(g, (1, 1)) for g, _ in gens]
                    image = oracles.residue_signed_subgroup_size(D, m, used)
                    lhs = res.group.order * image
                    rhs = h * count * (4 if narrow else 1)
                    cases += 1
                    if lhs != rhs or not res.order_identity_holds:
                        bad.append((D, m, narrow))
        return not bad, f"{cases} cases, mismatches {bad[:5]}"

    return _timed(3, "ray class order identity", run)


def _odd_modules(max_order: int) -> list[C2FinAbGroup]:
    from .algebra import s_groups

    odd_primes = [p for p in range(3, max_order + 1, 2) if all(p % q for q in range(3, p, 2))]
    groups = list(s_groups(odd_primes, max_order))
    out = []
    for P in groups:
        for M in groups:
            if P.order * M.order <= max_order:
                out.append(C2FinAbGroup(P, M))
    return out


def check_hom_ext(max_order: int = 81) -> CheckResult:
    """#Hom_C2(A, B) = #Ext^1_C2(A, B) for odd C2-modules with #A * #B <= max_order."""

    def run():
        mods = _odd_modules(max_order)
        bad = []
        pairs = 0
        for A in mods:
            for B in mods:
                if A.order * B.order > max_order:
                    continue
                CA, CB = ConcreteModule.from_c2(A), ConcreteModule.from_c2(B)
                h = hom_count(CA, CB)
                e = ext_count(CA, CB)
                pairs += 1
                if not (h == e == c2_hom_size(A, B) == c2_ext_size(A, B)):
                    bad.append((str(A), str(B), h, e))
        return not bad, f"{pairs} module pairs, mismatches {bad[:3]}"

    return _timed(4, "Hom/Ext cardinality identity", run)


def check_local_factors() -> CheckResult:
    def run():
        bad = []
        primes = [p for p in range(3, 100) if all(p % q for q in range(2, p))] + [2]
        for ell in (3, 5, 7):
            for p in primes:
                for k in (1, 2, 3):
                    if s_local(p, k, ell) != s_local_derived(p, k, ell):
                        bad.append((p, k, ell))
        targets = {7: Fraction(39, 8), 3: Fraction(3, 2), 1: Fraction(4, 3)}
        got = {m: av_plus(3, m) for m in targets}
        ok = not bad and got == targets
        return ok, f"local mismatches {bad[:5]}; av_plus(3, m) = {', '.join(f'{m}: {v}' for m, v in got.items())}"

    return _timed(5, "local averages re-derived from U_R", run)


def check_elltorsexp(moduli: tuple[int, ...] = (1, 3, 7, 9, 21, 63), ell: int = 3, max_exp: int = 6) -> CheckResult:
    """Closed form for E[#B[ell]] against the truncated series, on elementary U_R."""

    def run():
        worst = 0.0
        shapes = {}
        for m in moduli:
            for sig, _ in all_signatures(m):
                U = build_UR(sig, m, ell)
                if U.plus_size != ell**U.plus_dim or U.minus_size != ell**U.minus_dim:
                    continue
                shapes[(U.plus_dim, U.minus_dim)] = elltorsexp_closed(U)
        for (pd, md), closed in sorted(shapes.items()):
            series = elltorsexp_series(pd, md, ell, max_exp)
            worst = max(worst, float(abs(series - closed) / closed))
        return worst < 0.01, f"{len(shapes)} (dim U+, dim U-) shapes, worst relative gap {worst:.2e}"

    return _timed(6, "ell-torsion expectation series", run)


def check_geodesics(X: int = 1000, pairs: int = 100, tol: float = 1e-9, seed: int = 1) -> CheckResult:
    from .geodesics import (
        ClosedGeodesic,
        arc_length_integral,
        component_distance,
        geodesic_length,
        narrow_class_forms,
    )
    from .quadfield import totally_positive_unit

    def run():
        rng = random.Random(seed)
        worst_len = worst_iso = 0.0
        classes = 0
        for D in fundamental_discriminants(X, "+"):
            L = geodesic_length(D)
            log_eps = totally_positive_unit(D).log(MP)
            for f in narrow_class_forms(D):
                classes += 1
                worst_len = max(worst_len, float(abs(arc_length_integral(f) - L)))
                geo = ClosedGeodesic(f)
                for _ in range(pairs):
                    u1 = MP.exp(rng.random() * log_eps)
                    u2 = MP.exp(rng.random() * log_eps)
                    d = geo.distance(u1, u2)
                    worst_iso = max(worst_iso, float(abs(d - component_distance(u1, u2, D, log_eps))))
        ok = worst_len < tol and worst_iso < tol
        return ok, f"{classes} classes; worst length error {worst_len:.1e}, worst isometry error {worst_iso:.1e}"

    return _timed(10, "closed geodesics", run)


# ---------------------------------------------------------------------------
# Survey suite


def source_fingerprint() -> str:
    """Hash of the modules that determine survey output."""
    h = hashlib.sha256()
    here = Path(__file__).parent
    for name in SOURCE_MODULES:
        h.update((here / f"{name}.py").read_bytes())
    return h.hexdigest()[:16]


def ensure_survey(out_dir: str | Path, X: int = SURVEY_X, m_f: int = SURVEY_M, ell: int = SURVEY_ELL, threads: int = 1):
    """Return survey stats from out_dir, running the survey if no matching output exists."""
    from .empirics import SurveyParams, load_stats, survey

    out = Path(out_dir)
    stats_path = out / "stats.json"
    stamp = out / "fingerprint"
    want = SurveyParams(X, "+", m_f, ell)
    current = source_fingerprint()
    if stamp.exists() and stamp.read_text().strip() == current:
        if stats_path.exists() and (out / "records.jsonl").exists():
            stats = load_stats(stats_path)
            if stats.params == want:
                return stats
    else:
        # output of other code: start over rather than resume it
        shutil.rmtree(out / "parts", ignore_errors=True)
        out.mkdir(parents=True, exist_ok=True)
        stamp.write_text(current + "\n")
    return survey(X, "+", m_f, ell, out, threads=threads)


def _trend(records_path: Path, stats, key: str, Xs: tuple[int, ...]) -> list[float]:
    from .empirics import stats_from_records

    means = []
    for X in Xs:
        s = stats_from_records(records_path, stats.params, X)
        means.append(s.mean_cl_ell() if key == "cl" else s.mean_ray_ell())
    return means


def check_survey_trends(out_dir: str | Path, stats=None) -> CheckResult:
    """Mean #Cl[3] and #Cl(7)[3] at X in {10^4, 10^5, 10^6}."""

    def run():
        s = stats or ensure_survey(out_dir)
        recs = Path(out_dir) / "records.jsonl"
        Xs = (10**4, 10**5, 10**6)
        cl = _trend(recs, s, "cl", Xs)
        ray = _trend(recs, s, "ray", Xs)
        target = float(av_plus(3, 7))
        dev = [abs(r - target) / target for r in ray]
        ok_cl = 1.20 <= cl[-1] <= 4 / 3 and cl[0] < cl[1] < cl[2]
        ok_ray = dev[-1] < 0.20 and dev[2] < dev[1]
        detail = (
            "mean #Cl[3] " + ", ".join(f"{v:.4f}" for v in cl)
            + "; mean #Cl(7)[3] " + ", ".join(f"{v:.4f}" for v in ray)
            + f" (relative deviation from 39/8: {dev[1]:.3f} -> {dev[2]:.3f})"
        )
        return ok_cl and ok_ray, detail

    return _timed(7, "desk-scale survey trends", run, soft=True)


def check_splitting(out_dir: str | Path, stats=None) -> CheckResult:
    def run():
        s = stats or ensure_survey(out_dir)
        N = s.records - s.errors
        band = 3 / math.sqrt(N)
        worst = 0.0
        ok = True
        parts = []
        for p in (3, 5, 7):
            counts = s.splitting[str(p)]
            for kind, st in (("S", SplittingType.SPLIT), ("I", SplittingType.INERT), ("R", SplittingType.RAMIFIED)):
                obs = sum(v for k, v in counts.items() if k[0] == kind) / N
                gap = abs(obs - float(density_pR(p, st)))
                worst = max(worst, gap)
                ok &= gap < band
            parts.append(f"{p}: " + "/".join(f"{sum(v for k, v in counts.items() if k[0] == c) / N:.4f}" for c in "SIR"))
        return ok, f"N={N}, band {band:.2e}, worst gap {worst:.2e}; " + "; ".join(parts)

    return _timed(8, "splitting frequencies", run)


def check_unit_orbits(out_dir: str | Path, stats=None, signature: str = "7:S", sigmas: float = 3.0) -> CheckResult:
    from .empirics import multinomial_within

    def run():
        s = stats or ensure_survey(out_dir)
        sig = s.signatures[signature]
        sizes = s.orbit_sizes[signature]
        probs = {k: size / order for k, (size, order) in sizes.items()}
        counts = dict(sig["unit_hist"])
        # labels are "refD:orbit"; each reference ring is tested on its own fields
        res = {}
        for ref in sorted({k.split(":")[0] for k in probs}):
            group = {k: v for k, v in counts.items() if k.split(":")[0] == ref}
            res.update(multinomial_within(group, {k: v for k, v in probs.items() if k.split(":")[0] == ref}, sigmas))
        stray = sorted(set(counts) - set(probs))
        ok = all(v[2] for v in res.values()) and not stray
        N = sum(counts.values())
        cells = "; ".join(
            f"{k}: {obs}/{n} = {obs / n:.4f} vs {probs[k]:.4f}"
            for k, (obs, exp, _) in sorted(res.items())
            for n in [round(exp / probs[k])]
        )
        return ok, f"{signature} fields {N}; {cells}" + (f"; unexpected labels {stray}" if stray else "")

    return _timed(9, "unit image orbit equidistribution", run)


def oracle_suite() -> list[CheckResult]:
    return [
        check_class_groups(),
        check_units(),
        check_order_identity(),
        check_hom_ext(),
        check_local_factors(),
        check_elltorsexp(),
        check_geodesics(),
    ]


def survey_suite(out_dir: str | Path, threads: int = 1) -> list[CheckResult]:
    stats = ensure_survey(out_dir, threads=threads)
    return [
        check_survey_trends(out_dir, stats),
        check_splitting(out_dir, stats),
        check_unit_orbits(out_dir, stats),
    ]
