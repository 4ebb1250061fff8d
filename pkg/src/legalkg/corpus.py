"""
Data model and file ingestion for case documents and the law corpus.

A case record mirrors the layout of a published Vietnamese judgment: a block
of metadata (number, type, level, date, court, domain) followed by the body,
which is split into four parts::

    introduction   parties, court, case header
    content        NỘI DUNG VỤ ÁN        claims of the parties
    judgment       NHẬN ĐỊNH CỦA TÒA ÁN  the court's analysis
    decision       QUYẾT ĐỊNH            the ruling and the laws it rests on

All three record kinds are exchanged as JSONL (one object per line, UTF-8).
Text is NFC-normalized on the way in so that Vietnamese diacritics compare
equal regardless of how the source composed them.
"""

from __future__ import annotations

import datetime as dt
import json
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import CorpusError

CASE_NUMBER_RE = re.compile(r"^\d+/\d{4}/[A-Za-z]+(-[A-Za-z]+)?$")
SECTION_NAMES = ("introduction", "content", "judgment", "decision")


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


class DocumentType(str, Enum):
    VERDICT = "verdict"
    DECISION = "decision"


class CaseLevel(str, Enum):
    TRIAL = "trial"
    APPELLATE = "appellate"
    CASSATION_REOPENING = "cassation_reopening"


@dataclass(frozen=True)
class SectionSet:
    introduction: str = ""
    content: str = ""
    judgment: str = ""
    decision: str = ""

    def get(self, name: str) -> str:
        if name not in SECTION_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def full_text(self) -> str:
        return "".join(getattr(self, name) for name in SECTION_NAMES)

    def is_blank(self) -> bool:
        return not any(getattr(self, name).strip() for name in SECTION_NAMES)

    def to_dict(self) -> dict[str, str]:
        return {name: getattr(self, name) for name in SECTION_NAMES}


@dataclass(frozen=True)
class CaseRecord:
    case_id: str
    sections: SectionSet
    case_number: str = ""
    document_type: DocumentType | None = None
    case_level: CaseLevel | None = None
    date: dt.date | None = None
    court_name: str = ""
    domain_name: str = ""
    subdomain: str = ""
    raw_text: str | None = None

    def __post_init__(self):
        if not self.case_id:
            raise CorpusError("missing case_id")
        if self.case_number and not CASE_NUMBER_RE.match(self.case_number):
            raise CorpusError(f"case {self.case_id}: malformed case_number {self.case_number!r}")
        if self.sections.is_blank():
            raise CorpusError(f"case {self.case_id}: all sections are empty")

    @property
    def full_text(self) -> str:
        return self.sections.full_text()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "case_id": self.case_id,
            "case_number": self.case_number,
            "document_type": self.document_type.value if self.document_type else None,
            "case_level": self.case_level.value if self.case_level else None,
            "date": self.date.isoformat() if self.date else None,
            "court_name": self.court_name,
            "domain_name": self.domain_name,
            "subdomain": self.subdomain,
            "sections": self.sections.to_dict(),
        }
        if self.raw_text is not None:
            out["raw_text"] = self.raw_text
        return out


@dataclass(frozen=True)
class LawEntry:
    law_id: str
    law_name: str
    year: int | None = None
    aliases: tuple[str, ...] = ()
    body: str = ""

    def __post_init__(self):
        if not self.law_id:
            raise CorpusError("missing law_id")
        if not self.law_name.strip():
            raise CorpusError(f"law {self.law_id}: empty law_name")
        if self.year is not None and not 1900 <= self.year <= 2100:
            raise CorpusError(f"law {self.law_id}: year {self.year} outside [1900, 2100]")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "law_id": self.law_id,
            "law_name": self.law_name,
            "year": self.year,
            "aliases": list(self.aliases),
        }
        if self.body:
            out["body"] = self.body
        return out


@dataclass(frozen=True)
class GoldLabel:
    case_id: str
    gold_laws: frozenset[str]

    def to_dict(self) -> dict[str, Any]:
        return {"case_id": self.case_id, "gold_laws": sorted(self.gold_laws)}


# ---------------------------------------------------------------------------
# Section segmentation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectionMarkerConfig:
    """Header patterns that open the content, judgment and decision parts.

    Patterns are matched in MULTILINE mode; each one is searched for only
    after the point where the previous part began.
    """

    content: str = r"^[ \t]*NỘI DUNG VỤ ÁN\b"
    judgment: str = r"^[ \t]*NHẬN ĐỊNH CỦA TÒA ÁN\b"
    decision: str = r"^[ \t]*QUYẾT ĐỊNH[ \t]*:?[ \t]*$"

    def compiled(self) -> list[tuple[str, re.Pattern]]:
        return [
            (name, re.compile(nfc(getattr(self, name)), re.MULTILINE))
            for name in ("content", "judgment", "decision")
        ]


DEFAULT_MARKERS = SectionMarkerConfig()


def segment_sections(raw_text: str, markers: SectionMarkerConfig = DEFAULT_MARKERS) -> SectionSet:
    """Split a judgment body into its four parts.

    Each part starts at its marker (the marker text belongs to the part it
    opens), so concatenating the parts gives back ``raw_text`` unchanged. A
    marker that cannot be found leaves its part empty and its text with the
    part before it.
    """
    starts: dict[str, int] = {}
    cursor = 0
    for name, pattern in markers.compiled():
        m = pattern.search(raw_text, cursor)
        if m is not None:
            starts[name] = m.start()
            cursor = max(m.end(), m.start() + 1)

    parts = {name: "" for name in SECTION_NAMES}
    bounds = [("introduction", 0)] + sorted(starts.items(), key=lambda kv: kv[1])
    for i, (name, begin) in enumerate(bounds):
        end = bounds[i + 1][1] if i + 1 < len(bounds) else len(raw_text)
        parts[name] = raw_text[begin:end]
    return SectionSet(**parts)


# ---------------------------------------------------------------------------
# JSONL ingestion
# ---------------------------------------------------------------------------

def _iter_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON ({exc.msg})", line=lineno) from None
            if not isinstance(obj, dict):
                raise CorpusError("expected a JSON object", line=lineno)
            yield lineno, obj


def _text(obj: dict, key: str, lineno: int) -> str:
    value = obj.get(key)
    if value is None:
        return ""
    if not isinstance(value, str):
        raise CorpusError(f"{key} must be a string", line=lineno)
    return nfc(value)


def _enum(cls, obj: dict, key: str, lineno: int):
    value = obj.get(key)
    if value in (None, ""):
        return None
    try:
        return cls(str(value).lower())
    except ValueError:
        allowed = ", ".join(m.value for m in cls)
        raise CorpusError(f"{key} {value!r} not one of {allowed}", line=lineno) from None


def case_from_dict(obj: dict, lineno: int = 0,
                   markers: SectionMarkerConfig = DEFAULT_MARKERS) -> CaseRecord:
    line = lineno or None
    case_id = obj.get("case_id")
    if case_id in (None, ""):
        raise CorpusError("missing case_id", line=line)
    case_id = nfc(str(case_id))

    raw_text = obj.get("raw_text")
    if raw_text is not None:
        raw_text = nfc(raw_text)
    sections_obj = obj.get("sections")
    if sections_obj is not None:
        if not isinstance(sections_obj, dict):
            raise CorpusError("sections must be an object", line=line)
        unknown = set(sections_obj) - set(SECTION_NAMES)
        if unknown:
            raise CorpusError(f"unknown section(s) {sorted(unknown)}", line=line)
        sections = SectionSet(**{k: _text(sections_obj, k, lineno) for k in SECTION_NAMES})
    elif raw_text:
        sections = segment_sections(raw_text, markers)
    else:
        raise CorpusError(f"case {case_id}: needs sections or raw_text", line=line)

    date = None
    if obj.get("date"):
        try:
            date = dt.date.fromisoformat(str(obj["date"]))
        except ValueError:
            raise CorpusError(f"case {case_id}: bad date {obj['date']!r}", line=line) from None

    try:
        return CaseRecord(
            case_id=case_id,
            sections=sections,
            case_number=_text(obj, "case_number", lineno).strip(),
            document_type=_enum(DocumentType, obj, "document_type", lineno),
            case_level=_enum(CaseLevel, obj, "case_level", lineno),
            date=date,
            court_name=_text(obj, "court_name", lineno).strip(),
            domain_name=_text(obj, "domain_name", lineno).strip(),
            subdomain=_text(obj, "subdomain", lineno).strip(),
            raw_text=raw_text,
        )
    except CorpusError as exc:
        if exc.line is None and line is not None:
            raise CorpusError(str(exc), line=line) from None
        raise


def law_from_dict(obj: dict, lineno: int = 0) -> LawEntry:
    line = lineno or None
    law_id = obj.get("law_id")
    if law_id in (None, ""):
        raise CorpusError("missing law_id", line=line)
    year = obj.get("year")
    if year is not None:
        if isinstance(year, bool) or not isinstance(year, (int, str)) or not str(year).isdigit():
            raise CorpusError(f"law {law_id}: year must be an integer", line=line)
        year = int(year)
    aliases = obj.get("aliases") or []
    if not isinstance(aliases, list) or not all(isinstance(a, str) for a in aliases):
        raise CorpusError(f"law {law_id}: aliases must be a list of strings", line=line)
    try:
        return LawEntry(
            law_id=nfc(str(law_id)),
            law_name=_text(obj, "law_name", lineno).strip(),
            year=year,
            aliases=tuple(nfc(a) for a in aliases),
            body=_text(obj, "body", lineno),
        )
    except CorpusError as exc:
        raise CorpusError(str(exc), line=line) from None


def _check_unique(items: Iterable[tuple[int, str]], what: str) -> None:
    seen: dict[str, int] = {}
    for lineno, key in items:
        if key in seen:
            raise CorpusError(f"duplicate {what} {key!r} (first seen on line {seen[key]})", line=lineno)
        seen[key] = lineno


def load_cases(path: str | Path, markers: SectionMarkerConfig = DEFAULT_MARKERS) -> list[CaseRecord]:
    """Read a cases.jsonl file; records keep their file order."""
    rows = [(lineno, case_from_dict(obj, lineno, markers)) for lineno, obj in _iter_jsonl(path)]
    _check_unique(((n, c.case_id) for n, c in rows), "case_id")
    return [c for _, c in rows]


def load_laws(path: str | Path) -> list[LawEntry]:
    rows = [(lineno, law_from_dict(obj, lineno)) for lineno, obj in _iter_jsonl(path)]
    _check_unique(((n, law.law_id) for n, law in rows), "law_id")
    return [law for _, law in rows]


def load_gold(path: str | Path, laws: Iterable[LawEntry] | None = None) -> dict[str, frozenset[str]]:
    """Read gold.jsonl into ``case_id -> set of law_id``.

    When ``laws`` is given every referenced law id must exist in it.
    """
    known = {law.law_id for law in laws} if laws is not None else None
    gold: dict[str, frozenset[str]] = {}
    for lineno, obj in _iter_jsonl(path):
        case_id = obj.get("case_id")
        if case_id in (None, ""):
            raise CorpusError("missing case_id", line=lineno)
        if case_id in gold:
            raise CorpusError(f"duplicate case_id {case_id!r}", line=lineno)
        ids = obj.get("gold_laws")
        if not isinstance(ids, list):
            raise CorpusError(f"case {case_id}: gold_laws must be a list", line=lineno)
        ids = frozenset(nfc(str(x)) for x in ids)
        if known is not None:
            missing = sorted(ids - known)
            if missing:
                raise CorpusError(f"case {case_id}: unknown law id(s) {missing}", line=lineno)
        gold[nfc(str(case_id))] = ids
    return gold


def dump_jsonl(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")


def save_cases(cases: Iterable[CaseRecord], path: str | Path) -> None:
    dump_jsonl((c.to_dict() for c in cases), path)


def save_laws(laws: Iterable[LawEntry], path: str | Path) -> None:
    dump_jsonl((law.to_dict() for law in laws), path)


def save_gold(gold: dict[str, frozenset[str]] | Iterable[GoldLabel], path: str | Path) -> None:
    if isinstance(gold, dict):
        gold = [GoldLabel(cid, frozenset(ids)) for cid, ids in gold.items()]
    dump_jsonl((g.to_dict() for g in gold), path)
