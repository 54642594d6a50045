"""Surveys of quadratic fields by conductor, with resumable persistence.

A survey walks the fundamental discriminants with |D| < X in ascending
order, writes one JSON line per field and keeps running totals that can be
merged across disjoint discriminant ranges.  Totals are checkpointed
together with the byte length of the record file, so an interrupted run
resumes by cutting the record file back to that length.
"""

from __future__ import annotations

import csv
import json
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Iterator

from .algebra import MP
from .predictions import (
    SplittingSignature,
    av_plus,
    av_plus_fixed_R,
    build_UR,
    density_pR,
    joint_dimension_prob,
    REPRESENTATIVE_SEARCH_LIMIT,
)
from .quadfield import ClassGroupComputation, fundamental_discriminants
from .rayclass import (
    EllQuotient,
    MinusOrbits,
    Modulus,
    ResidueRing,
    SplittingType,
    local_variant,
    ray_ell_part,
    residue_units,
    span_dimension,
    splitting_type,
    unit_generator_residues,
)

FORMAT_VERSION = 1
DEFAULT_CHECKPOINT = 10_000
SPLITTING_PRIMES = (3, 5, 7)
EXCLUDED = (-3, -4)


class SurveyFileError(ValueError):
    """A record or stats file is corrupt or belongs to a different survey."""


@dataclass(frozen=True)
class SurveyParams:
    X: int
    sign: str
    m_f: int
    ell: int

    def __post_init__(self) -> None:
        if self.X < 1 or self.m_f < 1:
            raise ValueError("X and m_f must be positive")
        if self.sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        if self.ell < 3 or self.ell % 2 == 0 or any(self.ell % q == 0 for q in range(3, math.isqrt(self.ell) + 1, 2)):
            raise ValueError("ell must be an odd prime")

    def to_dict(self) -> dict:
        return {"X": self.X, "sign": self.sign, "m_f": self.m_f, "ell": self.ell}

    @classmethod
    def from_dict(cls, d: dict) -> "SurveyParams":
        return cls(int(d["X"]), str(d["sign"]), int(d["m_f"]), int(d["ell"]))

    def compatible(self, other: "SurveyParams") -> bool:
        """Same family and modulus; X may differ."""
        return (self.sign, self.m_f, self.ell) == (other.sign, other.m_f, other.ell)

    @property
    def splitting_primes(self) -> tuple[int, ...]:
        return tuple(sorted(set(SPLITTING_PRIMES) | {p for p, _ in Modulus(self.m_f).factors()}))


# ---------------------------------------------------------------------------
# Per-field observation


def _local_tag(p: int, D: int) -> str:
    t = splitting_type(p, D).code
    v = local_variant(p, D)
    return t + ("+" if v > 0 else "-" if v < 0 else "")


class FieldObserver:
    """Computes records for one survey, caching residue-ring data by ring shape.

    Caches live on the instance, so separate workers share nothing.
    """

    def __init__(self, params: SurveyParams):
        self.params = params
        self._units: dict[tuple, Any] = {}
        self._refs: dict[str, dict[int, MinusOrbits]] = {}
        self._iso: dict[tuple, tuple[int, tuple[int, int]]] = {}

    def _unit_data(self, D: int):
        key = ResidueRing(D, self.params.m_f).key
        if key not in self._units:
            units = residue_units(D, self.params.m_f)
            self._units[key] = (units, EllQuotient(units, self.params.ell))
        return self._units[key]

    def _reference(self, sig: SplittingSignature, ring: ResidueRing) -> tuple[int, tuple[int, int]]:
        """Smallest real D of this signature whose ring O/m is isomorphic to ``ring``.

        The choice depends only on the isomorphism class, never on the order in
        which fields arrive, so labels agree across workers.
        """
        m, ell = self.params.m_f, self.params.ell
        refs = self._refs.setdefault(sig.code, {})
        for D in fundamental_discriminants(REPRESENTATIVE_SEARCH_LIMIT, "+"):
            if not sig.matches(D):
                continue
            cand = ResidueRing(D, m)
            isos = [(0, 1)] if cand.key == ring.key else ring.isomorphisms_to(cand)
            if isos:
                if D not in refs:
                    refs[D] = MinusOrbits(D, m, ell)
                return D, isos[0]
        raise ValueError(f"no reference ring below {REPRESENTATIVE_SEARCH_LIMIT} for {sig.code}")

    def _orbit_label(self, D: int, sig: SplittingSignature, eps_res) -> tuple[str, int]:
        ring = ResidueRing(D, self.params.m_f)
        key = (sig.code, ring.key)
        if key not in self._iso:
            self._iso[key] = self._reference(sig, ring)
        ref_D, y = self._iso[key]
        ref = self._refs[sig.code][ref_D]
        image = ring.apply_hom(y, eps_res, ref.ring)
        return f"{ref_D}:{ref.label_residue(image)}", ref.minus_order

    def orbit_sizes(self, sig_code: str) -> dict[str, tuple[int, int]]:
        """Orbit label -> (orbit size, #U_-) for the reference rings seen so far."""
        out = {}
        for ref_D, ref in sorted(self._refs.get(sig_code, {}).items()):
            for k, orb in enumerate(ref.orbits):
                out[f"{ref_D}:{k}"] = (len(orb), ref.minus_order)
        return out

    def observe(self, D: int) -> dict:
        p = self.params
        m, ell = p.m_f, p.ell
        sig = SplittingSignature.of_field(D, m)
        rec: dict[str, Any] = {
            "D": D,
            "sign": "+" if D > 0 else "-",
            "signature": sig.code,
            "local": {str(q): _local_tag(q, D) for q in p.splitting_primes},
            "flagged": D in EXCLUDED,
        }
        try:
            cg = ClassGroupComputation(D)
            G = cg.group
            rec["class_group"] = G.to_json()
            rec["cl_ell"] = G.torsion_size(ell)
            j = G.rank(ell) + (1 if D > 0 else 0)
            rec["j"] = j
            if D > 0:
                rec["narrow_differs"] = cg.narrow_order != G.order
            unit_data = unit_generator_residues(D, m) if m > 1 else None
            if D > 0:
                rec["eps_norm"] = unit_generator_residues(D, 1)[1][1][1]
            if m == 1:
                rec["ray_ell"] = rec["cl_ell"]
                rec["w"] = 0 if D > 0 else None
                rec["unit_class"] = None
            else:
                units, Q = self._unit_data(D)
                e = ray_ell_part(D, Modulus(m), ell, cg, units, unit_data)
                if not e.order_identity_holds:
                    raise ArithmeticError("order identity failed")
                rec["ray_ell"] = e.ell_torsion(ell)
                if D > 0:
                    eps_res = unit_data[1][0]
                    vecs = [Q.minus_part(Q.of_residue(eps_res))]
                    for alpha in e.alphas:
                        v = Q.of_residue(alpha.omega_coords(m))
                        if any(Q.plus_part(v)):
                            raise ArithmeticError("relation generator has a plus component")
                        vecs.append(Q.minus_part(v))
                    rec["w"] = span_dimension(vecs, ell)
                    rec["unit_class"], _ = self._orbit_label(D, sig, eps_res)
                else:
                    rec["w"] = None
                    rec["unit_class"] = None
        except Exception as exc:  # recorded, never dropped
            rec["flagged"] = True
            rec["error"] = f"{type(exc).__name__}: {exc}"
        return rec


def observe_field(D: int, m_f: int = 1, ell: int = 3) -> dict:
    """Single-field record, as written by a survey."""
    return FieldObserver(SurveyParams(abs(D) + 1, "+" if D > 0 else "-", m_f, ell)).observe(D)


# ---------------------------------------------------------------------------
# Statistics


def _empty_sig() -> dict:
    return {"count": 0, "sum_cl_ell": 0, "sum_ray_ell": 0, "eps_norm_minus": 0, "unit_hist": {}, "jw_hist": {}}


@dataclass
class SurveyStats:
    """Mergeable totals over a set of fields."""

    params: SurveyParams
    lo: int | None = None  # covered |D| range [lo, hi)
    hi: int | None = None
    records: int = 0
    count: int = 0  # fields entering the averages
    excluded: int = 0
    errors: int = 0
    sum_cl_ell: int = 0
    sum_ray_ell: int = 0
    sum_ray_ell_sq: int = 0
    signatures: dict[str, dict] = field(default_factory=dict)
    splitting: dict[str, dict[str, int]] = field(default_factory=dict)
    orbit_sizes: dict[str, dict[str, list[int]]] = field(default_factory=dict)

    @classmethod
    def empty(cls, params: SurveyParams) -> "SurveyStats":
        return cls(params)

    def add(self, rec: dict) -> None:
        self.records += 1
        if "error" in rec:
            self.errors += 1
            return
        for q, tag in rec["local"].items():
            c = self.splitting.setdefault(q, {})
            c[tag] = c.get(tag, 0) + 1
        if rec["flagged"]:
            self.excluded += 1
            return
        self.count += 1
        self.sum_cl_ell += rec["cl_ell"]
        self.sum_ray_ell += rec["ray_ell"]
        self.sum_ray_ell_sq += rec["ray_ell"] ** 2
        s = self.signatures.setdefault(rec["signature"], _empty_sig())
        s["count"] += 1
        s["sum_cl_ell"] += rec["cl_ell"]
        s["sum_ray_ell"] += rec["ray_ell"]
        if rec.get("eps_norm") == -1:
            s["eps_norm_minus"] += 1
        if rec.get("unit_class") is not None:
            h = s["unit_hist"]
            h[rec["unit_class"]] = h.get(rec["unit_class"], 0) + 1
        if rec.get("w") is not None:
            key = f"{rec['j']},{rec['w']}"
            s["jw_hist"][key] = s["jw_hist"].get(key, 0) + 1

    def mean_cl_ell(self) -> float:
        return self.sum_cl_ell / self.count if self.count else math.nan

    def mean_ray_ell(self) -> float:
        return self.sum_ray_ell / self.count if self.count else math.nan

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "range": [self.lo, self.hi],
            "records": self.records,
            "count": self.count,
            "excluded": self.excluded,
            "errors": self.errors,
            "sum_cl_ell": self.sum_cl_ell,
            "sum_ray_ell": self.sum_ray_ell,
            "sum_ray_ell_sq": self.sum_ray_ell_sq,
            "signatures": {k: self.signatures[k] for k in sorted(self.signatures)},
            "splitting": {k: dict(sorted(v.items())) for k, v in sorted(self.splitting.items(), key=lambda kv: int(kv[0]))},
            "orbit_sizes": self.orbit_sizes,
            "observed": {"mean_cl_ell": self.mean_cl_ell(), "mean_ray_ell": self.mean_ray_ell()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SurveyStats":
        lo, hi = d["range"]
        return cls(
            SurveyParams.from_dict(d["params"]),
            lo,
            hi,
            d["records"],
            d["count"],
            d["excluded"],
            d["errors"],
            d["sum_cl_ell"],
            d["sum_ray_ell"],
            d["sum_ray_ell_sq"],
            d["signatures"],
            d["splitting"],
            d.get("orbit_sizes", {}),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SurveyStats) and self.to_dict() == other.to_dict()


def merge(a: SurveyStats, b: SurveyStats) -> SurveyStats:
    """Combine totals of two surveys of the same family over disjoint ranges."""
    if not a.params.compatible(b.params):
        raise SurveyFileError(f"incompatible surveys {a.params} and {b.params}")
    if a.records == 0 and a.lo is None:
        return SurveyStats.from_dict(json.loads(json.dumps(b.to_dict())))
    if b.records == 0 and b.lo is None:
        return SurveyStats.from_dict(json.loads(json.dumps(a.to_dict())))
    out = SurveyStats(a.params if a.params.X >= b.params.X else b.params)
    out.lo = min(a.lo, b.lo)
    out.hi = max(a.hi, b.hi)
    for name in ("records", "count", "excluded", "errors", "sum_cl_ell", "sum_ray_ell", "sum_ray_ell_sq"):
        setattr(out, name, getattr(a, name) + getattr(b, name))
    for src in (a, b):
        for code, s in src.signatures.items():
            t = out.signatures.setdefault(code, _empty_sig())
            for k in ("count", "sum_cl_ell", "sum_ray_ell", "eps_norm_minus"):
                t[k] += s[k]
            for hk in ("unit_hist", "jw_hist"):
                for key, v in s[hk].items():
                    t[hk][key] = t[hk].get(key, 0) + v
        for q, c in src.splitting.items():
            t = out.splitting.setdefault(q, {})
            for tag, v in c.items():
                t[tag] = t.get(tag, 0) + v
        for code, sizes in src.orbit_sizes.items():
            out.orbit_sizes.setdefault(code, {}).update(sizes)
    for code in out.signatures:
        s = out.signatures[code]
        s["unit_hist"] = dict(sorted(s["unit_hist"].items()))
        s["jw_hist"] = dict(sorted(s["jw_hist"].items()))
    return out


# ---------------------------------------------------------------------------
# Persistence


def _dump_record(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n"


def _write_json_atomic(path: Path, obj: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SurveyFileError(f"{path}: corrupt JSON at line {exc.lineno} column {exc.colno}") from exc


def load_stats(path: str | os.PathLike) -> SurveyStats:
    d = _load_json(Path(path))
    try:
        return SurveyStats.from_dict(d["stats"] if "stats" in d else d)
    except (KeyError, TypeError, ValueError) as exc:
        raise SurveyFileError(f"{path}: not a survey stats file ({exc})") from exc


def run_range(
    params: SurveyParams,
    lo: int,
    hi: int,
    records_path: str | os.PathLike,
    state_path: str | os.PathLike,
    checkpoint: int = DEFAULT_CHECKPOINT,
    max_fields: int | None = None,
) -> SurveyStats:
    """Process fundamental discriminants with lo <= |D| < hi, resuming if state exists.

    ``max_fields`` stops early after that many new fields (used to
    simulate interruption); the state then records where to continue.
    """
    records_path, state_path = Path(records_path), Path(state_path)
    if state_path.exists():
        state = _load_json(state_path)
        if SurveyParams.from_dict(state["params"]) != params or state["range"] != [lo, hi]:
            raise SurveyFileError(f"{state_path}: state belongs to a different survey range")
        stats = SurveyStats.from_dict(state["stats"])
        nxt, offset = state["next"], state["records_offset"]
        if state["complete"]:
            return stats
        size = records_path.stat().st_size if records_path.exists() else 0
        if size < offset:
            raise SurveyFileError(f"{records_path}: {size} bytes, checkpoint expects at least {offset}")
    else:
        stats = SurveyStats(params, lo, hi)
        nxt, offset = lo, 0
    observer = FieldObserver(params)
    mode = "r+b" if records_path.exists() else "wb"
    with open(records_path, mode) as fh:
        fh.truncate(offset)
        fh.seek(offset)
        since = done = 0

        def commit(next_abs: int, complete: bool) -> None:
            fh.flush()
            stats.orbit_sizes.update(_orbit_snapshot(observer, stats))
            _write_json_atomic(
                state_path,
                {
                    "version": FORMAT_VERSION,
                    "params": params.to_dict(),
                    "range": [lo, hi],
                    "next": next_abs,
                    "records_offset": fh.tell(),
                    "complete": complete,
                    "stats": stats.to_dict(),
                },
            )

        for D in fundamental_discriminants(hi, params.sign, start=nxt):
            rec = observer.observe(D)
            fh.write(_dump_record(rec).encode())
            stats.add(rec)
            since += 1
            done += 1
            if since >= checkpoint:
                commit(abs(D) + 1, False)
                since = 0
            if max_fields is not None and done >= max_fields:
                commit(abs(D) + 1, False)
                return stats
        commit(hi, True)
    return stats


def _orbit_snapshot(observer: FieldObserver, stats: SurveyStats) -> dict:
    out = {}
    for code in stats.signatures:
        sizes = observer.orbit_sizes(code)
        if sizes:
            out[code] = {k: list(v) for k, v in sorted(sizes.items())}
    return out


def resume(state_path: str | os.PathLike, checkpoint: int = DEFAULT_CHECKPOINT) -> SurveyStats:
    """Continue the range recorded in a state file (records file alongside, same stem)."""
    state_path = Path(state_path)
    state = _load_json(state_path)
    params = SurveyParams.from_dict(state["params"])
    lo, hi = state["range"]
    return run_range(params, lo, hi, state_path.with_suffix(".jsonl"), state_path, checkpoint)


def _chunks(lo: int, hi: int, n: int) -> list[tuple[int, int]]:
    n = max(1, min(n, hi - lo))
    edges = [lo + (hi - lo) * i // n for i in range(n + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def _run_chunk(args) -> dict:
    params, lo, hi, parts, checkpoint = args
    stem = Path(parts) / f"part-{lo:09d}-{hi:09d}"
    return run_range(params, lo, hi, stem.with_suffix(".jsonl"), stem.with_suffix(".json"), checkpoint).to_dict()


def survey(
    X: int,
    sign: str,
    m_f: int,
    ell: int,
    out_dir: str | os.PathLike,
    threads: int = 1,
    checkpoint: int = DEFAULT_CHECKPOINT,
    chunks: int | None = None,
) -> SurveyStats:
    """Survey all fundamental discriminants with |D| < X.

    Work is split into discriminant ranges, each resumable on its own.
    The final record file is the concatenation of the ranges in order, so
    it does not depend on the number of workers.
    """
    params = SurveyParams(X, sign, m_f, ell)
    out = Path(out_dir)
    parts = out / "parts"
    parts.mkdir(parents=True, exist_ok=True)
    ranges = _chunks(1, X, chunks or max(1, 4 * threads if threads > 1 else 1))
    jobs = [(params, a, b, str(parts), checkpoint) for a, b in ranges]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]
    total = SurveyStats.empty(params)
    for r in results:
        total = merge(total, SurveyStats.from_dict(r))
    total.params = params
    with open(out / "records.jsonl", "wb") as fh:
        for a, b in ranges:
            with open(parts / f"part-{a:09d}-{b:09d}.jsonl", "rb") as src:
                while chunk := src.read(1 << 20):
                    fh.write(chunk)
    _write_json_atomic(out / "stats.json", total.to_dict())
    return total


def read_records(path: str | os.PathLike) -> Iterator[dict]:
    with open(path) as fh:
        for n, line in enumerate(fh, start=1):
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise SurveyFileError(f"{path}: corrupt record on line {n}") from exc


def stats_from_records(
    records: Iterable[dict] | str | os.PathLike,
    params: SurveyParams,
    X_max: int | None = None,
    orbit_sizes: dict | None = None,
) -> SurveyStats:
    """Re-aggregate records, optionally keeping only |D| < X_max."""
    if isinstance(records, (str, os.PathLike)):
        records = read_records(records)
    X = params.X if X_max is None else min(X_max, params.X)
    out = SurveyStats(SurveyParams(X, params.sign, params.m_f, params.ell), 1, X)
    for rec in records:
        if abs(rec["D"]) < X:
            out.add(rec)
    if orbit_sizes:
        out.orbit_sizes = {k: v for k, v in orbit_sizes.items() if k in out.signatures}
    return out


# ---------------------------------------------------------------------------
# Comparison with predictions


@dataclass
class ComparisonRow:
    quantity: str
    signature: str
    observed: float
    predicted: float | None
    n: int
    predicted_exact: Fraction | None = None

    @property
    def abs_dev(self) -> float | None:
        return None if self.predicted is None else self.observed - self.predicted

    @property
    def rel_dev(self) -> float | None:
        if self.predicted in (None, 0):
            return None
        return (self.observed - self.predicted) / self.predicted

    def to_dict(self) -> dict:
        d = {
            "quantity": self.quantity,
            "signature": self.signature,
            "observed": self.observed,
            "predicted": self.predicted,
            "abs_dev": self.abs_dev,
            "rel_dev": self.rel_dev,
            "n": self.n,
        }
        if self.predicted_exact is not None:
            d["predicted_exact"] = {"num": self.predicted_exact.numerator, "den": self.predicted_exact.denominator}
        return d


@dataclass
class ComparisonReport:
    params: SurveyParams
    rows: list[ComparisonRow]

    def find(self, quantity: str, signature: str = "all") -> list[ComparisonRow]:
        return [r for r in self.rows if r.quantity == quantity and r.signature == signature]

    def to_dict(self) -> dict:
        return {"params": self.params.to_dict(), "rows": [r.to_dict() for r in self.rows]}


def _sig_from_code(code: str, m: int) -> SplittingSignature:
    from .predictions import LocalType

    parts = []
    if code != "trivial":
        for item, (p, k) in zip(code.split(","), Modulus(m).factors()):
            tag = item.split(":")[1]
            kind = {"S": SplittingType.SPLIT, "I": SplittingType.INERT, "R": SplittingType.RAMIFIED}[tag[0]]
            variant = 1 if tag.endswith("+") else -1 if tag.endswith("-") else 0
            parts.append(LocalType(p, k, kind, variant))
    return SplittingSignature(tuple(parts))


def compare(stats: SurveyStats, report: Any = None) -> ComparisonReport:
    """Observed versus predicted values, overall and per splitting signature.

    Predictions exist for real fields; for imaginary surveys only the
    observed columns are filled.  ``report`` may be a PredictionReport whose
    modulus and ell must match the survey.
    """
    p = stats.params
    if report is not None and (report.m_f, report.ell) != (p.m_f, p.ell):
        raise ValueError("prediction report does not match the survey parameters")
    real = p.sign == "+"
    rows: list[ComparisonRow] = []
    N = stats.count

    def add(q, sig, obs, pred_exact, n, pred_float=None):
        pred = float(pred_exact) if pred_exact is not None else pred_float
        rows.append(ComparisonRow(q, sig, obs, pred, n, pred_exact))

    add("mean_cl_ell", "all", stats.mean_cl_ell(), av_plus(p.ell, 1) if real else None, N)
    add("mean_ray_ell", "all", stats.mean_ray_ell(), av_plus(p.ell, p.m_f) if real else None, N)
    total = stats.records - stats.errors
    for q, counts in sorted(stats.splitting.items(), key=lambda kv: int(kv[0])):
        qi = int(q)
        for kind in ("S", "I", "R"):
            obs = sum(v for k, v in counts.items() if k[0] == kind) / total if total else math.nan
            st = {"S": SplittingType.SPLIT, "I": SplittingType.INERT, "R": SplittingType.RAMIFIED}[kind]
            add("splitting_frequency", f"{q}:{kind}", obs, density_pR(qi, st), total)
        if qi == 3:
            obs = counts.get("R-", 0) / total if total else math.nan
            add("splitting_frequency", "3:R-", obs, Fraction(1, 8), total)
    for code, s in sorted(stats.signatures.items()):
        n = s["count"]
        sig = _sig_from_code(code, p.m_f)
        add("signature_frequency", code, n / N if N else math.nan, sig.density, N)
        if not real:
            add("mean_ray_ell", code, s["sum_ray_ell"] / n, None, n)
            continue
        add("mean_ray_ell", code, s["sum_ray_ell"] / n, av_plus_fixed_R(sig, p.m_f, p.ell), n)
        U = build_UR(sig, p.m_f, p.ell)
        sizes = stats.orbit_sizes.get(code, {})
        for label, (size, minus_order) in sorted(sizes.items()):
            obs = s["unit_hist"].get(label, 0) / n
            add("unit_orbit", f"{code}|{label}", obs, Fraction(size, minus_order), n)
        for key in sorted(s["jw_hist"], key=lambda k: tuple(map(int, k.split(",")))):
            j, w = map(int, key.split(","))
            pred = joint_dimension_prob(j, w, U.minus_dim, p.ell) if w <= U.minus_dim else MP.mpf(0)
            add("rank_image", f"{code}|j={j},w={w}", s["jw_hist"][key] / n, None, n, float(pred))
    return ComparisonReport(p, rows)


def export_csv(report: ComparisonReport, path: str | os.PathLike) -> None:
    cols = ["quantity", "signature", "observed", "predicted", "abs_dev", "rel_dev", "n"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in report.rows:
            d = r.to_dict()
            w.writerow(["" if d[c] is None else d[c] for c in cols])


def multinomial_within(counts: dict[str, int], probs: dict[str, float], sigmas: float = 3.0) -> dict[str, tuple[float, float, bool]]:
    """Per-cell check: |observed - N p| <= sigmas * sqrt(N p (1-p))."""
    N = sum(counts.values())
    out = {}
    for k, pk in probs.items():
        obs = counts.get(k, 0)
        sd = math.sqrt(N * pk * (1 - pk))
        out[k] = (obs, N * pk, abs(obs - N * pk) <= sigmas * sd)
    return out
