import json
import unicodedata

import pytest
from hypothesis import given, strategies as st

from legalkg.corpus import (
    CaseLevel,
    DocumentType,
    SectionMarkerConfig,
    load_cases,
    load_gold,
    load_laws,
    save_cases,
    save_laws,
    segment_sections,
)
from legalkg.errors import CorpusError


def _write(path, rows):
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")
    return path


def _case(case_id, **extra):
    row = {
        "case_id": case_id,
        "case_number": "577/2022/HC-PT",
        "document_type": "verdict",
        "case_level": "appellate",
        "date": "2022-05-01",
        "court_name": "Tòa án nhân dân TP Hà Nội",
        "domain_name": "Hành chính",
        "subdomain": "",
        "sections": {"introduction": "a", "content": "b", "judgment": "c", "decision": "d"},
    }
    row.update(extra)
    return row


def test_load_cases_empty(tmp_path):
    assert load_cases(_write(tmp_path / "c.jsonl", [])) == []


def test_load_cases_preserves_order(tmp_path):
    cases = load_cases(_write(tmp_path / "c.jsonl", [_case("b"), _case("a")]))
    assert [c.case_id for c in cases] == ["b", "a"]
    assert cases[0].document_type is DocumentType.VERDICT
    assert cases[0].case_level is CaseLevel.APPELLATE
    assert cases[0].date.isoformat() == "2022-05-01"


def test_missing_case_id_reports_line(tmp_path):
    rows = [_case("a"), _case("b"), {k: v for k, v in _case("x").items() if k != "case_id"}]
    with pytest.raises(CorpusError, match=r"^line 3: missing case_id$"):
        load_cases(_write(tmp_path / "c.jsonl", rows))


def test_malformed_json_line(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(json.dumps(_case("a")) + "\n{not json\n", encoding="utf-8")
    with pytest.raises(CorpusError, match="line 2"):
        load_cases(p)


def test_duplicate_case_id(tmp_path):
    with pytest.raises(CorpusError, match="duplicate case_id 'a'"):
        load_cases(_write(tmp_path / "c.jsonl", [_case("a"), _case("a")]))


@pytest.mark.parametrize("number", ["577/2022", "x/2022/HC", "5/22/HC-PT", "5/2022/HC-PT-X"])
def test_bad_case_number(tmp_path, number):
    with pytest.raises(CorpusError, match="case_number"):
        load_cases(_write(tmp_path / "c.jsonl", [_case("a", case_number=number)]))


def test_all_sections_empty_rejected(tmp_path):
    row = _case("a", sections={"introduction": " ", "content": "", "judgment": "", "decision": ""})
    with pytest.raises(CorpusError, match="empty"):
        load_cases(_write(tmp_path / "c.jsonl", [row]))


def test_raw_text_is_segmented(tmp_path):
    row = _case("a")
    del row["sections"]
    row["raw_text"] = "Mở đầu\nNỘI DUNG VỤ ÁN\nx\nNHẬN ĐỊNH CỦA TÒA ÁN\ny\nQUYẾT ĐỊNH\nz\n"
    (case,) = load_cases(_write(tmp_path / "c.jsonl", [row]))
    assert case.sections.introduction == "Mở đầu\n"
    assert case.sections.decision == "QUYẾT ĐỊNH\nz\n"


def test_nfc_normalization_on_ingest(tmp_path):
    decomposed = unicodedata.normalize("NFD", "Tòa án nhân dân tỉnh Bắc Ninh")
    (case,) = load_cases(_write(tmp_path / "c.jsonl", [_case("a", court_name=decomposed)]))
    assert case.court_name == "Tòa án nhân dân tỉnh Bắc Ninh"


def test_case_round_trip(tmp_path, small_corpus):
    p = tmp_path / "c.jsonl"
    save_cases(small_corpus.cases, p)
    loaded = load_cases(p)
    assert loaded == small_corpus.cases
    q = tmp_path / "c2.jsonl"
    save_cases(loaded, q)
    assert p.read_bytes() == q.read_bytes()


def test_load_laws(tmp_path):
    assert load_laws(_write(tmp_path / "l.jsonl", [])) == []
    rows = [{"law_id": f"L{i}", "law_name": f"Luật số {i}", "year": 2000, "aliases": []} for i in range(225)]
    laws = load_laws(_write(tmp_path / "l.jsonl", rows))
    assert len(laws) == 225
    assert len({law.law_id for law in laws}) == 225


def test_duplicate_law_id(tmp_path):
    rows = [{"law_id": "L1", "law_name": "A"}, {"law_id": "L1", "law_name": "B"}]
    with pytest.raises(CorpusError, match="line 2: duplicate law_id"):
        load_laws(_write(tmp_path / "l.jsonl", rows))


@pytest.mark.parametrize("row, msg", [
    ({"law_id": "L1", "law_name": "  "}, "empty law_name"),
    ({"law_id": "L1", "law_name": "A", "year": 1800}, "outside"),
    ({"law_id": "L1", "law_name": "A", "year": "abc"}, "integer"),
    ({"law_name": "A"}, "missing law_id"),
])
def test_law_validation(tmp_path, row, msg):
    with pytest.raises(CorpusError, match=msg):
        load_laws(_write(tmp_path / "l.jsonl", [row]))


def test_law_round_trip(tmp_path, small_corpus):
    p = tmp_path / "l.jsonl"
    save_laws(small_corpus.laws, p)
    assert load_laws(p) == small_corpus.laws


def test_gold_unknown_law(tmp_path, small_corpus):
    p = _write(tmp_path / "g.jsonl", [{"case_id": "c", "gold_laws": ["nope"]}])
    with pytest.raises(CorpusError, match="unknown law"):
        load_gold(p, small_corpus.laws)


# -- segmentation ----------------------------------------------------------------

FULL = (
    "TÒA ÁN NHÂN DÂN TỈNH BẮC NINH\nBản án số 1/2020/DS-ST\n"
    "NỘI DUNG VỤ ÁN\nNguyên đơn trình bày.\n"
    "NHẬN ĐỊNH CỦA TÒA ÁN\nXét thấy.\n"
    "QUYẾT ĐỊNH\nCăn cứ Điều 5 của Bộ luật Dân sự.\n"
)


def test_segment_all_markers():
    s = segment_sections(FULL)
    assert all(s.to_dict().values())
    assert s.full_text() == FULL
    assert s.content.startswith("NỘI DUNG VỤ ÁN")
    assert s.decision.startswith("QUYẾT ĐỊNH")


def test_segment_no_markers():
    s = segment_sections("chỉ có một đoạn văn")
    assert s.introduction == "chỉ có một đoạn văn"
    assert s.content == s.judgment == s.decision == ""


def test_segment_missing_middle_marker_stays_with_previous():
    text = FULL.replace("NHẬN ĐỊNH CỦA TÒA ÁN\n", "")
    s = segment_sections(text)
    assert s.judgment == ""
    assert "Xét thấy." in s.content
    assert s.full_text() == text


def test_decision_word_inside_sentence_is_not_a_marker():
    text = "Mở đầu\nNỘI DUNG VỤ ÁN\nCó quyết định số 5 QUYẾT ĐỊNH hành chính.\n"
    assert segment_sections(text).decision == ""


def test_custom_markers():
    markers = SectionMarkerConfig(content=r"^II\.", judgment=r"^III\.", decision=r"^IV\.")
    s = segment_sections("I. a\nII. b\nIII. c\nIV. d", markers)
    assert (s.introduction, s.content, s.judgment, s.decision) == ("I. a\n", "II. b\n", "III. c\n", "IV. d")


def test_generated_cases_round_trip_through_segmentation(small_corpus):
    for case in small_corpus.cases:
        assert segment_sections(case.full_text) == case.sections


_chunk = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=40)


@given(_chunk, _chunk, _chunk, _chunk, st.lists(st.booleans(), min_size=3, max_size=3))
def test_segmentation_is_a_partition(a, b, c, d, present):
    headers = ["\nNỘI DUNG VỤ ÁN\n", "\nNHẬN ĐỊNH CỦA TÒA ÁN\n", "\nQUYẾT ĐỊNH\n"]
    text = a + "".join((h if keep else "") + body for h, keep, body in zip(headers, present, (b, c, d)))
    s = segment_sections(text)
    assert s.full_text() == text
