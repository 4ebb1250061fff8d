"""
Pattern-based extraction of case attributes and case->law citations.

Court, domain and case attributes come from the record's metadata, falling
back to header lines in the introduction. Laws are found in two steps:
sentences that look like citations are pulled out with cue patterns, then
each sentence is linked to the law corpus by token containment of the law
name. Citations in judgments usually drop the enactment year
("Luật Hôn nhân và Gia đình" for "Luật Hôn nhân và gia đình 2014"), so year
tokens are ignored when scoring and ties prefer the most recent law.
"""

from __future__ import annotations

import datetime as dt
import json
import re
import unicodedata
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import CaseRecord, LawEntry, SECTION_NAMES, nfc
from .errors import CorpusError, ExtractionError


class CourtLevel(str, Enum):
    SUPREME = "supreme"
    HIGH = "high"
    PROVINCIAL = "provincial"
    DISTRICT = "district"
    UNKNOWN = "unknown"


# Checked in order; the first rule that fires wins.
_LEVEL_RULES = (
    (CourtLevel.SUPREME, re.compile(r"\btối cao\b")),
    (CourtLevel.HIGH, re.compile(r"\bcấp cao\b")),
    (CourtLevel.DISTRICT, re.compile(r"\b(?:huyện|quận|thị xã)\b|\bthành phố [^,]+,\s*tỉnh\b")),
    (CourtLevel.PROVINCIAL, re.compile(r"\b(?:tỉnh|thành phố|tp)\b")),
)


def court_level(court_name: str) -> CourtLevel:
    """Classify a court by the administrative keywords in its name."""
    name = nfc(court_name).casefold()
    for level, pattern in _LEVEL_RULES:
        if pattern.search(name):
            return level
    return CourtLevel.UNKNOWN


_CASE_NUMBER = re.compile(r"(?<![\d/])(\d+)/(\d{4})/([A-Za-z]+(?:-[A-Za-z]+)?)\b")


@dataclass(frozen=True)
class CaseNumber:
    serial: int
    year: int
    code: str

    def __str__(self) -> str:
        return f"{self.serial}/{self.year}/{self.code}"


def parse_case_number(text: str) -> CaseNumber | None:
    m = _CASE_NUMBER.search(text)
    if m is None:
        return None
    return CaseNumber(int(m.group(1)), int(m.group(2)), m.group(3))


# Introduction header patterns (MULTILINE | IGNORECASE).
_COURT_LINE = re.compile(r"^[ \t]*(t(?:òa|oà)[ \t]+án[ \t]+nhân[ \t]+dân\b[^\n]*?)[ \t]*$",
                         re.MULTILINE | re.IGNORECASE)
_DATE = re.compile(r"\bngày[ \t]+(\d{1,2})[ \t]+tháng[ \t]+(\d{1,2})[ \t]+năm[ \t]+(\d{4})\b",
                   re.IGNORECASE)
_DOMAIN_LINE = re.compile(r"^[ \t]*lĩnh vực[ \t]*:[ \t]*(.+?)[ \t]*$", re.MULTILINE | re.IGNORECASE)
_SUBDOMAIN_LINE = re.compile(r"^[ \t]*(?:quan hệ pháp luật|về việc|v/v)[ \t]*:?[ \t]*(.+?)[ \t]*$",
                             re.MULTILINE | re.IGNORECASE)


@dataclass(frozen=True)
class CaseMeta:
    court_name: str
    court_level: CourtLevel
    domain_name: str
    subdomain: str
    case_number: CaseNumber | None
    date: dt.date | None


def _first(pattern: re.Pattern, text: str) -> str:
    m = pattern.search(text)
    return m.group(1).strip() if m else ""


def extract_meta(case: CaseRecord) -> CaseMeta:
    """Case attributes, metadata first, introduction headers as fallback."""
    intro = case.sections.introduction
    has_meta = any([case.court_name, case.domain_name, case.subdomain, case.case_number, case.date])
    if not has_meta and not intro.strip():
        raise ExtractionError(f"case {case.case_id}: no metadata source")

    court_name = case.court_name or _first(_COURT_LINE, intro)
    domain_name = case.domain_name or _first(_DOMAIN_LINE, intro)
    subdomain = case.subdomain or _first(_SUBDOMAIN_LINE, intro)
    number = parse_case_number(case.case_number or intro)

    date = case.date
    if date is None:
        m = _DATE.search(intro)
        if m:
            try:
                date = dt.date(int(m.group(3)), int(m.group(2)), int(m.group(1)))
            except ValueError:
                date = None
    return CaseMeta(
        court_name=court_name,
        court_level=court_level(court_name) if court_name else CourtLevel.UNKNOWN,
        domain_name=domain_name,
        subdomain=subdomain,
        case_number=number,
        date=date,
    )


# ---------------------------------------------------------------------------
# Citation sentences
# ---------------------------------------------------------------------------

DEFAULT_CUES = (
    r"(?i:\bđiều[ \t]+\d+)",
    r"(?i:\bkhoản[ \t]+\d+)",
    r"(?i:\bđiểm[ \t]+[a-zđ]\b)",
    r"(?i:\bbộ[ \t]+luật\b)",
    r"\bLuật\b",
)
_SENTENCE_SPLIT = re.compile(r"[.;\n]")


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_SPLIT.split(text) if s.strip()]


def extract_citation_sentences(text: str, cues: Sequence[str] = DEFAULT_CUES) -> list[str]:
    """Sentences (split on '.', ';' and newlines) that contain a citation cue."""
    if not text:
        return []
    pattern = re.compile("|".join(f"(?:{c})" for c in cues))
    return [s for s in split_sentences(nfc(text)) if pattern.search(s)]


# ---------------------------------------------------------------------------
# Law matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LawMatchConfig:
    score_threshold: float = 0.6
    lowercase: bool = True
    strip_punctuation: bool = True
    strip_years: bool = True
    tie_break: str = "latest_year"  # or "lexicographic"

    def __post_init__(self):
        if not 0.0 <= self.score_threshold <= 1.0:
            raise ValueError("score_threshold must be in [0, 1]")
        if self.tie_break not in ("latest_year", "lexicographic"):
            raise ValueError(f"unknown tie_break {self.tie_break!r}")


_YEAR = re.compile(r"^(?:19|20)\d\d$|^2100$")
_WORD = re.compile(r"[^\W_]+")


def normalize_tokens(text: str, cfg: LawMatchConfig = LawMatchConfig()) -> list[str]:
    text = nfc(text)
    if cfg.lowercase:
        text = unicodedata.normalize("NFC", text.casefold())
    tokens = _WORD.findall(text) if cfg.strip_punctuation else text.split()
    if cfg.strip_years:
        tokens = [t for t in tokens if not _YEAR.match(t)]
    return tokens


class LawMatcher:
    """Law corpus prepared for repeated sentence matching.

    Each law contributes one token set per surface form (its name and every
    alias); a law's score for a sentence is its best surface form's
    containment ``|T(sentence) & T(form)| / |T(form)|``.
    """

    def __init__(self, laws: Sequence[LawEntry], cfg: LawMatchConfig = LawMatchConfig()):
        if not laws:
            raise ExtractionError("law corpus is empty")
        self.cfg = cfg
        self.laws = list(laws)
        self.by_id = {law.law_id: law for law in self.laws}
        self._forms: list[tuple[int, frozenset[str]]] = []
        self._postings: dict[str, list[int]] = {}
        for li, law in enumerate(self.laws):
            for surface in (law.law_name, *law.aliases):
                tokens = frozenset(normalize_tokens(surface, cfg))
                if not tokens:
                    continue
                fi = len(self._forms)
                self._forms.append((li, tokens))
                for t in tokens:
                    self._postings.setdefault(t, []).append(fi)

    def _rank_key(self, li: int):
        law = self.laws[li]
        if self.cfg.tie_break == "latest_year":
            return (-(law.year if law.year is not None else -1), law.law_id)
        return (law.law_name, law.law_id)

    def _per_law(self, sentence: str) -> dict[int, tuple[int, int]]:
        """Best (hits, form size) per law index; compared exactly by cross-multiplying."""
        tokens = set(normalize_tokens(sentence, self.cfg))
        hits: dict[int, int] = {}
        for t in tokens:
            for fi in self._postings.get(t, ()):
                hits[fi] = hits.get(fi, 0) + 1
        best: dict[int, tuple[int, int]] = {}
        for fi, n in hits.items():
            li, form = self._forms[fi]
            d = len(form)
            cur = best.get(li)
            if cur is None or n * cur[1] > cur[0] * d:
                best[li] = (n, d)
        return best

    def scores(self, sentence: str) -> dict[str, Fraction]:
        """Exact containment score for every law sharing a token with the sentence."""
        return {self.laws[li].law_id: Fraction(n, d) for li, (n, d) in self._per_law(sentence).items()}

    def match(self, sentence: str) -> tuple[str, float] | None:
        per_law = self._per_law(sentence)
        if not per_law:
            return None
        tn, td = next(iter(per_law.values()))
        for n, d in per_law.values():
            if n * td > tn * d:
                tn, td = n, d
        if Fraction(tn, td) < Fraction(self.cfg.score_threshold):
            return None
        winner = min((li for li, (n, d) in per_law.items() if n * td == tn * d), key=self._rank_key)
        return self.laws[winner].law_id, tn / td


def match_law(sentence: str, laws: Sequence[LawEntry] | LawMatcher,
              cfg: LawMatchConfig = LawMatchConfig()) -> tuple[str, float] | None:
    """Best law for a citation sentence, or None below the score threshold."""
    matcher = laws if isinstance(laws, LawMatcher) else LawMatcher(laws, cfg)
    return matcher.match(sentence)


# ---------------------------------------------------------------------------
# Per-case extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CitationMatch:
    sentence: str
    law_id: str | None
    score: float


@dataclass(frozen=True)
class ExtractionRecord:
    case_id: str
    court_name: str
    court_level: CourtLevel
    domain_name: str
    subdomain: str
    cited_laws: frozenset[str]
    citation_sentences: tuple[CitationMatch, ...] = ()
    case_number: str = ""
    date: dt.date | None = None

    @property
    def citation_counts(self) -> dict[str, int]:
        """Number of citation sentences linked to each cited law."""
        counts: dict[str, int] = {}
        for c in self.citation_sentences:
            if c.law_id is not None:
                counts[c.law_id] = counts.get(c.law_id, 0) + 1
        return counts

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "court_name": self.court_name,
            "court_level": self.court_level.value,
            "domain_name": self.domain_name,
            "subdomain": self.subdomain,
            "case_number": self.case_number,
            "date": self.date.isoformat() if self.date else None,
            "cited_laws": sorted(self.cited_laws),
            "citation_sentences": [
                {"sentence": c.sentence, "law_id": c.law_id, "score": c.score}
                for c in self.citation_sentences
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict, lineno: int | None = None) -> "ExtractionRecord":
        try:
            matches = tuple(
                CitationMatch(c["sentence"], c.get("law_id"), float(c.get("score", 0.0)))
                for c in obj.get("citation_sentences", [])
            )
            return cls(
                case_id=obj["case_id"],
                court_name=obj.get("court_name", ""),
                court_level=CourtLevel(obj.get("court_level", "unknown")),
                domain_name=obj.get("domain_name", ""),
                subdomain=obj.get("subdomain", ""),
                cited_laws=frozenset(obj.get("cited_laws", [])),
                citation_sentences=matches,
                case_number=obj.get("case_number") or "",
                date=dt.date.fromisoformat(obj["date"]) if obj.get("date") else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusError(f"bad extraction record ({exc})", line=lineno) from None


def extract_all(case: CaseRecord, laws: Sequence[LawEntry] | LawMatcher,
                cfg: LawMatchConfig = LawMatchConfig(),
                cues: Sequence[str] = DEFAULT_CUES) -> ExtractionRecord:
    """Attributes plus every law cited anywhere in the case body."""
    matcher = laws if isinstance(laws, LawMatcher) else LawMatcher(laws, cfg)
    meta = extract_meta(case)
    matches: list[CitationMatch] = []
    for name in SECTION_NAMES:
        for sentence in extract_citation_sentences(case.sections.get(name), cues):
            hit = matcher.match(sentence)
            if hit is None:
                matches.append(CitationMatch(sentence, None, 0.0))
            else:
                matches.append(CitationMatch(sentence, hit[0], hit[1]))
    return ExtractionRecord(
        case_id=case.case_id,
        court_name=meta.court_name,
        court_level=meta.court_level,
        domain_name=meta.domain_name,
        subdomain=meta.subdomain,
        cited_laws=frozenset(m.law_id for m in matches if m.law_id is not None),
        citation_sentences=tuple(matches),
        case_number=str(meta.case_number) if meta.case_number else "",
        date=meta.date,
    )


def save_records(records: Iterable[ExtractionRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False))
            fh.write("\n")


def load_records(path: str | Path) -> list[ExtractionRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed JSON ({exc.msg})", line=lineno) from None
            out.append(ExtractionRecord.from_dict(obj, lineno))
    return out
