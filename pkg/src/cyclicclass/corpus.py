"""Embedded class-number tables, their document format, and the replay runner.

Corpus documents are JSON Lines.  The first record is a header::

    {"schema_version": 1, "document": "cyclic-class-corpus"}

and every later record is one table row::

    {"id": "cyclotomic-59", "kind": "CyclotomicMinus", "conductor": 59,
     "degree": 58, "factors": ["3", "2.29+1", "2^3.29+1"],
     "quad": {"disc": -59, "h": 3},
     "expected": {"3": ["quadratic:confirmed"], "59": ["witness:29"],
                  "233": ["witness:29"]},
     "provenance": "relative class numbers of Q(zeta_59)"}

Blank lines and lines starting with ``#`` are ignored.  Factors use the
grammar of :mod:`cyclicclass.expressions`, or the coefficient form
``{"terms": [[2, 3], [29, 1]], "plus_one": true}``; add
``"composite": true`` when the printed factor is not prime.  Optional
fields are ``structure`` (prime -> Cyclic/NonCyclic/Unknown), ``quad``
(``{"disc", "h"}`` or ``{"disc", "divisible_by"}``), ``discriminant``,
``totally_real``, ``flags`` (conjectured, partial, uncertain), ``notes``
and, for CycloConstruction rows, ``construction`` with p, a, b and the
expected t1, n and phi.

Expected labels per prime are the admissible case labels (``degree``,
``witness:3,5``, ``quadratic:confirmed``...) or one of ``inapplicable``,
``inferred_noncyclic`` and ``gamma_violation``.
"""

from __future__ import annotations

import enum
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Mapping

from .arith import Factorization, euler_phi, factorize, is_prime
from .bounds import quadratic_subfield_discriminant
from .classifier import (
    DegreeViolatesGammaConstraint,
    ExtensionProfile,
    QuadraticData,
    Structure,
    classify_prime,
)
from .cyclotomic import HypothesisViolation, LemmaViolation, build_instance, verify_prediction
from .errors import CyclicClassError
from .expressions import ExpressionEvalError, FactorExpr, parse_factor

__all__ = [
    "SCHEMA_VERSION",
    "Kind",
    "Construction",
    "CorpusEntry",
    "PrimeResult",
    "CheckResult",
    "EntryResult",
    "ReplayReport",
    "SchemaError",
    "PrimalityMismatch",
    "ExpressionEvalError",
    "load_corpus",
    "loads_corpus",
    "replay",
    "emit_report",
    "parse_report",
]

SCHEMA_VERSION = 1
CORPUS_DOCUMENT = "cyclic-class-corpus"
REPORT_DOCUMENT = "replay-report"

INAPPLICABLE = "inapplicable"
INFERRED = "inferred_noncyclic"
GAMMA = "gamma_violation"
_SPECIAL = {INAPPLICABLE, INFERRED, GAMMA}


class SchemaError(CyclicClassError):
    def __init__(self, message: str, line: int | None = None, field_name: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field_name is not None:
            where.append(f"field {field_name!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.field = field_name


class PrimalityMismatch(CyclicClassError):
    """A factor expression that should be prime is composite."""


class Kind(enum.Enum):
    CYCLOTOMIC_MINUS = "CyclotomicMinus"
    REAL_CYCLOTOMIC_CONJECTURED = "RealCyclotomicConjectured"
    CUBIC_TOTALLY_REAL = "CubicTotallyReal"
    REAL_CYCLIC_CONDUCTOR = "RealCyclicConductor"
    QUINTIC_NOTE = "QuinticNote"
    DECIMIC_IMAGINARY = "DecimicImaginary"
    CYCLO_CONSTRUCTION = "CycloConstruction"


_FLAGS = {"conjectured", "partial", "uncertain"}
_KEYS = {
    "id", "kind", "conductor", "degree", "factors", "structure", "quad", "expected",
    "provenance", "notes", "flags", "discriminant", "totally_real", "construction",
}


@dataclass(frozen=True)
class Construction:
    p: int
    a: int
    b: int
    t1: int
    n: int
    phi: int


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    kind: Kind
    conductor: int | None
    degree: int
    factors: tuple[FactorExpr, ...]
    class_number: Factorization
    structure: Mapping[int, Structure] = field(default_factory=dict)
    quad: QuadraticData | None = None
    expected: Mapping[int, tuple[str, ...]] = field(default_factory=dict)
    provenance: str = ""
    notes: str = ""
    flags: frozenset[str] = frozenset()
    discriminant: int | None = None
    totally_real: bool | None = None
    construction: Construction | None = None

    @property
    def conjectured(self) -> bool:
        return "conjectured" in self.flags

    def profile(self) -> ExtensionProfile:
        return ExtensionProfile(
            degree=factorize(self.degree),
            class_number=self.class_number,
            structure=dict(self.structure),
            quadratic=self.quad,
            totally_real=self.totally_real,
        )


# --- loading ---------------------------------------------------------------


def _require(record: dict, key: str, kind: type, line: int):
    if key not in record:
        raise SchemaError("missing required field", line, key)
    value = record[key]
    if not isinstance(value, kind):
        raise SchemaError(f"expected {kind.__name__}, got {value!r}", line, key)
    return value


def _positive_int(value, line: int, key: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise SchemaError(f"expected a positive integer, got {value!r}", line, key)
    return value


def _parse_factor_item(item, line: int) -> FactorExpr:
    if isinstance(item, int) and not isinstance(item, bool):
        return parse_factor(str(item))
    if isinstance(item, str):
        return parse_factor(item)
    if isinstance(item, dict):
        composite = bool(item.get("composite", False))
        if "expr" in item:
            return parse_factor(str(item["expr"]), composite)
        if "terms" in item:
            try:
                terms = tuple((int(b), int(e)) for b, e in item["terms"])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"bad coefficient list {item['terms']!r}", line, "factors") from exc
            if not terms or any(b < 1 or e < 1 for b, e in terms):
                raise ExpressionEvalError(f"non-positive coefficients in {item['terms']!r}")
            expr = FactorExpr(terms, bool(item.get("plus_one", False)), int(item.get("power", 1)), composite)
            if expr.base < 2 or expr.power < 1:
                raise ExpressionEvalError(f"factor {item!r} evaluates below 2")
            return expr
    raise SchemaError(f"cannot read factor {item!r}", line, "factors")


def _class_number(factors: Iterable[FactorExpr], entry_id: str, kind: Kind) -> Factorization:
    merged: dict[int, int] = {}
    seen: set[int] = set()
    for f in factors:
        base = f.base
        if f.composite:
            if is_prime(base):
                raise PrimalityMismatch(f"{entry_id}: {f.text()} = {base} is marked composite but is prime")
            parts = factorize(base)
        else:
            if not is_prime(base):
                raise PrimalityMismatch(f"{entry_id}: {f.text()} = {base} is not prime")
            if kind is Kind.CYCLOTOMIC_MINUS and base in seen:
                raise SchemaError(f"{entry_id}: prime {base} repeated without a printed exponent")
            seen.add(base)
            parts = Factorization(base, ((base, 1),))
        for p, e in parts:
            merged[p] = merged.get(p, 0) + e * f.power
    return Factorization.from_dict(merged)


def _parse_structure(raw, line: int) -> dict[int, Structure]:
    if not isinstance(raw, dict):
        raise SchemaError("expected an object", line, "structure")
    out = {}
    for k, v in raw.items():
        try:
            out[int(k)] = Structure(v)
        except ValueError as exc:
            raise SchemaError(f"bad structure entry {k!r}: {v!r}", line, "structure") from exc
    return out


def _parse_quad(raw, line: int) -> QuadraticData:
    if not isinstance(raw, dict) or "disc" not in raw:
        raise SchemaError("expected {disc, h} or {disc, divisible_by}", line, "quad")
    try:
        return QuadraticData(
            int(raw["disc"]),
            int(raw["h"]) if raw.get("h") is not None else None,
            frozenset(int(x) for x in raw.get("divisible_by", ())),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(str(exc), line, "quad") from exc


def _parse_expected(raw, line: int) -> dict[int, tuple[str, ...]]:
    if not isinstance(raw, dict):
        raise SchemaError("expected an object", line, "expected")
    out = {}
    for k, v in raw.items():
        if isinstance(v, str):
            v = [v]
        if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
            raise SchemaError(f"labels for {k} must be strings", line, "expected")
        if any(x in _SPECIAL for x in v) and len(v) != 1:
            raise SchemaError(f"{v} mixes a status with case labels", line, "expected")
        try:
            out[int(k)] = tuple(v)
        except ValueError as exc:
            raise SchemaError(f"prime key {k!r} is not an integer", line, "expected") from exc
    return out


def _check_degree(entry: CorpusEntry, line: int) -> None:
    if "uncertain" in entry.flags:
        return
    n, g, kind = entry.conductor, entry.degree, entry.kind
    if kind in (Kind.CYCLOTOMIC_MINUS, Kind.CYCLO_CONSTRUCTION):
        expect = euler_phi(factorize(n))
    elif kind is Kind.REAL_CYCLOTOMIC_CONJECTURED:
        expect = euler_phi(factorize(n)) // 2
    elif kind is Kind.CUBIC_TOTALLY_REAL:
        expect = 3
        if entry.discriminant is not None and entry.discriminant != n * n:
            raise SchemaError(f"discriminant {entry.discriminant} is not {n}^2", line, "discriminant")
    elif kind is Kind.QUINTIC_NOTE:
        expect = 5
    elif kind is Kind.DECIMIC_IMAGINARY:
        expect = 10
    else:
        expect = g
    if g != expect:
        raise SchemaError(f"degree {g} does not match {expect} for conductor {n}", line, "degree")
    if n is not None and kind is not Kind.QUINTIC_NOTE and euler_phi(factorize(n)) % g:
        raise SchemaError(f"degree {g} does not divide phi({n})", line, "degree")
    if kind is Kind.CYCLOTOMIC_MINUS and entry.quad is not None and is_prime(n):
        if entry.quad.discriminant != quadratic_subfield_discriminant(n):
            raise SchemaError(
                f"quadratic discriminant {entry.quad.discriminant} is not p* for p={n}", line, "quad"
            )


def _parse_entry(record: dict, line: int) -> CorpusEntry:
    unknown = set(record) - _KEYS
    if unknown:
        raise SchemaError(f"unknown fields {sorted(unknown)}", line)
    entry_id = _require(record, "id", str, line)
    try:
        kind = Kind(_require(record, "kind", str, line))
    except ValueError as exc:
        raise SchemaError(f"unknown kind {record['kind']!r}", line, "kind") from exc
    conductor = record.get("conductor")
    if conductor is not None:
        conductor = _positive_int(conductor, line, "conductor")
    elif kind is not Kind.QUINTIC_NOTE:
        raise SchemaError("missing required field", line, "conductor")
    degree = _positive_int(record.get("degree"), line, "degree")
    raw_factors = _require(record, "factors", list, line)
    if not raw_factors:
        raise SchemaError("at least one factor is needed", line, "factors")
    factors = tuple(_parse_factor_item(item, line) for item in raw_factors)
    flags = frozenset(record.get("flags", ()))
    if flags - _FLAGS:
        raise SchemaError(f"unknown flags {sorted(flags - _FLAGS)}", line, "flags")
    construction = None
    if kind is Kind.CYCLO_CONSTRUCTION:
        raw = _require(record, "construction", dict, line)
        try:
            construction = Construction(**{k: int(raw[k]) for k in ("p", "a", "b", "t1", "n", "phi")})
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"construction needs p, a, b, t1, n, phi: {exc}", line, "construction") from exc
    elif "construction" in record:
        raise SchemaError("only CycloConstruction rows carry a construction", line, "construction")
    entry = CorpusEntry(
        id=entry_id,
        kind=kind,
        conductor=conductor,
        degree=degree,
        factors=factors,
        class_number=_class_number(factors, entry_id, kind),
        structure=_parse_structure(record.get("structure", {}), line),
        quad=_parse_quad(record["quad"], line) if record.get("quad") is not None else None,
        expected=_parse_expected(record.get("expected", {}), line),
        provenance=str(record.get("provenance", "")),
        notes=str(record.get("notes", "")),
        flags=flags,
        discriminant=record.get("discriminant"),
        totally_real=record.get("totally_real"),
        construction=construction,
    )
    _check_degree(entry, line)
    try:
        entry.profile()
    except ValueError as exc:
        raise SchemaError(f"{entry_id}: {exc}", line) from exc
    return entry


def loads_corpus(text: str) -> list[CorpusEntry]:
    return load_corpus(io.StringIO(text))


def load_corpus(source: str | os.PathLike | IO[str] | None = None) -> list[CorpusEntry]:
    """Read and validate a corpus document; the embedded one when ``source`` is None."""
    if source is None:
        text = resources.files("cyclicclass").joinpath("data/corpus.jsonl").read_text("utf-8")
        stream: IO[str] = io.StringIO(text)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            stream = io.StringIO(fh.read())
    else:
        stream = source
    entries: list[CorpusEntry] = []
    header_seen = False
    ids: set[str] = set()
    for lineno, raw in enumerate(stream, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            record = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", lineno) from exc
        if not isinstance(record, dict):
            raise SchemaError("each record must be an object", lineno)
        if not header_seen:
            if record.get("document") != CORPUS_DOCUMENT:
                raise SchemaError("first record must be the corpus header", lineno, "document")
            if record.get("schema_version") != SCHEMA_VERSION:
                raise SchemaError(
                    f"unsupported schema_version {record.get('schema_version')!r}", lineno, "schema_version"
                )
            header_seen = True
            continue
        entry = _parse_entry(record, lineno)
        if entry.id in ids:
            raise SchemaError(f"duplicate id {entry.id!r}", lineno, "id")
        ids.add(entry.id)
        entries.append(entry)
    return entries


# --- replay ------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeResult:
    prime: int
    exponent: int
    status: str
    labels: tuple[str, ...]
    expected: tuple[str, ...]
    agree: bool


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: str
    actual: str
    agree: bool


@dataclass(frozen=True)
class EntryResult:
    """``outcome`` is agree, disagree or warning (a mismatch on a conjectured row)."""

    id: str
    kind: str
    outcome: str
    primes: tuple[PrimeResult, ...] = ()
    checks: tuple[CheckResult, ...] = ()
    message: str = ""


@dataclass(frozen=True)
class ReplayReport:
    entries: tuple[EntryResult, ...] = ()

    def count(self, outcome: str) -> int:
        return sum(1 for e in self.entries if e.outcome == outcome)

    @property
    def ok(self) -> bool:
        return self.count("disagree") == 0

    def inapplicable(self) -> list[tuple[str, int]]:
        return [(e.id, p.prime) for e in self.entries for p in e.primes if p.status == INAPPLICABLE]


def _status(verdict) -> str:
    if not verdict.applicable:
        return INAPPLICABLE
    if verdict.inferred_noncyclic:
        return INFERRED
    if verdict.contradiction:
        return "contradiction"
    if verdict.structure is Structure.UNKNOWN:
        return "conditional"
    return "applies"


def _agrees(status: str, labels: tuple[str, ...], expected: tuple[str, ...]) -> bool:
    if expected == (INAPPLICABLE,):
        # an unproved cyclicity hypothesis is exactly what "cannot conclude" means
        return status in (INAPPLICABLE, "conditional")
    if expected in ((INFERRED,), (GAMMA,)):
        return status == expected[0]
    return status in ("applies", "conditional") and set(labels) == set(expected)


def _replay_classification(entry: CorpusEntry) -> tuple[PrimeResult, ...]:
    profile = entry.profile()
    results = []
    for p, e in entry.class_number:
        expected = entry.expected.get(p, ())
        try:
            verdict = classify_prime(profile, p)
        except DegreeViolatesGammaConstraint:
            status, labels = GAMMA, ()
        else:
            status, labels = _status(verdict), tuple(verdict.labels())
        results.append(PrimeResult(p, e, status, labels, expected, bool(expected) and _agrees(status, labels, expected)))
    for p in sorted(set(entry.expected) - set(entry.class_number.primes)):
        results.append(PrimeResult(p, 0, "absent", (), entry.expected[p], False))
    return tuple(results)


def _replay_construction(entry: CorpusEntry) -> tuple[CheckResult, ...]:
    c = entry.construction
    assert c is not None
    try:
        inst = build_instance(c.p, c.a, c.b)
    except (HypothesisViolation, LemmaViolation) as exc:
        return (CheckResult("build", "ok", str(exc), False),)
    checks = [
        CheckResult("t1", str(c.t1), str(inst.t1), inst.t1 == c.t1),
        CheckResult("n", str(c.n), str(inst.n), inst.n == c.n and entry.conductor == c.n),
        CheckResult("phi", str(c.phi), str(inst.phi_n), inst.phi_n == c.phi),
        CheckResult(
            "congruences",
            "all 1 mod p",
            " ".join(f"{k.q}:{k.q_mod_p}" for k in inst.congruence_checks) or "incomplete",
            inst.p_th_power_ideal,
        ),
        CheckResult(
            "prediction",
            inst.prediction,
            f"h- = {entry.class_number}",
            verify_prediction(inst, entry.class_number.value, relative=True),
        ),
    ]
    return tuple(checks)


def _replay_entry(entry: CorpusEntry) -> EntryResult:
    primes: tuple[PrimeResult, ...] = ()
    checks: tuple[CheckResult, ...] = ()
    message = ""
    if entry.kind is Kind.CYCLO_CONSTRUCTION:
        checks = _replay_construction(entry)
        good = all(c.agree for c in checks)
    else:
        primes = _replay_classification(entry)
        good = all(p.agree for p in primes)
        if not entry.expected:
            message = "no expectations recorded"
            good = False
    if good:
        outcome = "agree"
    elif entry.conjectured:
        outcome = "warning"
        message = message or "conjectured value disagrees; reported, not counted"
    else:
        outcome = "disagree"
    return EntryResult(entry.id, entry.kind.value, outcome, primes, checks, message)


def replay(entries: Iterable[CorpusEntry], workers: int | None = None) -> ReplayReport:
    """Check every entry against the classifier or the construction.

    ``workers`` > 1 spreads entries over processes; output is sorted by id
    either way, so it does not depend on scheduling.
    """
    entries = list(entries)
    if workers and workers > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replay_entry, entries))
    else:
        results = [_replay_entry(e) for e in entries]
    return ReplayReport(tuple(sorted(results, key=lambda r: r.id)))


# --- report serialization ---------------------------------------------------


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _entry_record(e: EntryResult) -> dict:
    return {
        "id": e.id,
        "kind": e.kind,
        "outcome": e.outcome,
        "message": e.message,
        "primes": [
            {
                "prime": p.prime,
                "exponent": p.exponent,
                "status": p.status,
                "labels": list(p.labels),
                "expected": list(p.expected),
                "agree": p.agree,
            }
            for p in e.primes
        ],
        "checks": [
            {"name": c.name, "expected": c.expected, "actual": c.actual, "agree": c.agree} for c in e.checks
        ],
    }


def _header(report: ReplayReport) -> dict:
    return {
        "document": REPORT_DOCUMENT,
        "schema_version": SCHEMA_VERSION,
        "entries": len(report.entries),
        "agree": report.count("agree"),
        "disagree": report.count("disagree"),
        "warning": report.count("warning"),
    }


def emit_report(report: ReplayReport, format: str = "text") -> str:
    if format == "machine":
        lines = [_dumps(_header(report))] + [_dumps(_entry_record(e)) for e in report.entries]
        return "\n".join(lines) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")
    h = _header(report)
    lines = [
        f"replay-report v{SCHEMA_VERSION}: {h['entries']} entries, {h['agree']} agree, "
        f"{h['disagree']} disagree, {h['warning']} warning"
    ]
    for e in report.entries:
        lines.append(f"{e.outcome:<9} {e.id} ({e.kind})" + (f"  {e.message}" if e.message else ""))
        for p in e.primes:
            power = f"{p.prime}^{p.exponent}" if p.exponent > 1 else str(p.prime)
            detail = " ".join(p.labels) or "-"
            line = f"    {power:<24} {p.status:<18} {detail}"
            if not p.agree:
                line += f"   expected: {' '.join(p.expected) or '-'}"
            lines.append(line)
        for c in e.checks:
            mark = "ok" if c.agree else "FAIL"
            lines.append(f"    {c.name:<12} {mark:<4} expected {c.expected}; got {c.actual}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> ReplayReport:
    """Inverse of ``emit_report(report, "machine")``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SchemaError("empty report document")
    try:
        header = json.loads(lines[0])
        records = [json.loads(ln) for ln in lines[1:]]
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}") from exc
    if header.get("document") != REPORT_DOCUMENT or header.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError("not a replay report of a supported version", 1)
    if header.get("entries") != len(records):
        raise SchemaError(f"header announces {header.get('entries')} entries, found {len(records)}", 1)
    entries = []
    for r in records:
        entries.append(
            EntryResult(
                id=r["id"],
                kind=r["kind"],
                outcome=r["outcome"],
                message=r.get("message", ""),
                primes=tuple(
                    PrimeResult(
                        p["prime"], p["exponent"], p["status"], tuple(p["labels"]), tuple(p["expected"]), p["agree"]
                    )
                    for p in r["primes"]
                ),
                checks=tuple(CheckResult(c["name"], c["expected"], c["actual"], c["agree"]) for c in r["checks"]),
            )
        )
    return ReplayReport(tuple(entries))
