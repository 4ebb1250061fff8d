"""
Deterministic synthetic corpus of Vietnamese-style judgments.

Stands in for the crawled court portal. Each generated case carries the four
canonical body parts, a court header in its introduction, and citation
sentences of the form ``Điều N của <law name>`` in its decision (and some in
its judgment). The laws a case cites are emitted as gold labels.

Cases are generated in paraphrase groups: members of a group tell the same
story in reshuffled, lightly reworded text and cite the same laws, so a
case held out for querying has near-duplicates left in the graph.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .corpus import CaseLevel, CaseRecord, DocumentType, LawEntry, SectionSet
from .errors import CorpusError

SYLLABLES = (
    "an ba bảo bình bố cao chánh chấp chi chính chủ chứng công cư cứu dân danh "
    "dịch doanh dụng đai đạo đất đầu địa điện đình định đổi đồng đơn gia giá giao "
    "giám hàng hành hạn hiện hình hóa hòa hộ học hôn hợp huy kế khai khoa khoán "
    "kiểm kinh lao lập lệ lợi lực luận lương lý mại minh môi mua năng nghĩa nghiệp "
    "ngân nhà nhân nước phạm pháp phân phí phòng phối quan quản quốc quy quyền sản "
    "sát sinh sở sự tài tế thẩm thanh thành thế thi thị thổ thông thu thuế thuận "
    "thương tích tiền tín tổ tố toán trị trọng trung tư tục văn vận việc viên vụ "
    "xây xã xử y"
).split()

# Syllables that appear in citation filler text; kept out of law names so a
# law name can never be covered by another law's citation sentence.
FILLER = frozenset(
    "điều khoản điểm của các và theo căn cứ quy định tại bộ luật hội đồng xét xử "
    "thấy yêu cầu là có cơ sở tuyên chấp nhận một phần ông".split()
)

PROVINCES = (
    "Hà Nội", "Hải Phòng", "Đà Nẵng", "Cần Thơ", "Bắc Ninh", "Nam Định", "Thái Bình",
    "Nghệ An", "Thanh Hóa", "Quảng Ninh", "Lâm Đồng", "Khánh Hòa", "Bình Dương",
    "Đồng Nai", "Long An", "Tiền Giang", "An Giang", "Kiên Giang", "Cà Mau", "Sóc Trăng",
    "Hà Tĩnh", "Quảng Bình", "Quảng Nam", "Gia Lai", "Đắk Lắk", "Phú Thọ", "Lào Cai",
    "Yên Bái", "Hòa Bình", "Ninh Bình", "Hưng Yên", "Hải Dương", "Vĩnh Phúc", "Thái Nguyên",
    "Bắc Giang", "Lạng Sơn", "Cao Bằng", "Tây Ninh", "Bến Tre", "Vĩnh Long",
)
CITIES = frozenset({"Hà Nội", "Hải Phòng", "Đà Nẵng", "Cần Thơ"})

# (domain name, case-number code)
BASE_DOMAINS = (
    ("Hình sự", "HS"),
    ("Dân sự", "DS"),
    ("Hôn nhân và gia đình", "HNGD"),
    ("Hành chính", "HC"),
    ("Kinh doanh thương mại", "KDTM"),
    ("Lao động", "LD"),
)
LEVEL_SUFFIX = {
    CaseLevel.TRIAL: "ST",
    CaseLevel.APPELLATE: "PT",
    CaseLevel.CASSATION_REOPENING: "GDT",
}
SURNAMES = "Nguyễn Trần Lê Phạm Hoàng Phan Vũ Đặng Bùi Đỗ Hồ Ngô Dương Lý".split()
GIVEN = "An Bình Chi Dũng Giang Hà Hải Hạnh Hùng Hương Khoa Lan Linh Minh Nam Phong Quân Sơn Thảo Trang Tuấn Vy".split()


@dataclass(frozen=True)
class GeneratorParams:
    cases: int = 100
    laws: int = 225
    domains: int = 6
    courts: int = 40
    mean_citations: float = 3.96
    noise: float = 0.0
    group_size: int = 4
    domain_law_pool: int = 12
    domain_affinity: float = 0.85

    def validate(self) -> None:
        if self.cases < 0:
            raise CorpusError("cases must be >= 0")
        if self.cases > 0 and self.laws <= 0:
            raise CorpusError("laws must be > 0")
        if self.cases > 0 and self.domains <= 0:
            raise CorpusError("domains must be > 0")
        if self.cases > 0 and self.courts <= 0:
            raise CorpusError("courts must be > 0")
        if self.mean_citations < 1:
            raise CorpusError("mean_citations must be >= 1")
        if not 0.0 <= self.noise <= 1.0:
            raise CorpusError("noise must be in [0, 1]")
        if self.group_size < 1:
            raise CorpusError("group_size must be >= 1")
        if not 0.0 <= self.domain_affinity <= 1.0:
            raise CorpusError("domain_affinity must be in [0, 1]")


@dataclass(frozen=True)
class SyntheticCorpus:
    cases: list[CaseRecord]
    laws: list[LawEntry]
    gold: dict[str, frozenset[str]]
    groups: dict[str, int]


def _word(rng: np.random.Generator, n: int = 2, exclude=frozenset()) -> str:
    pool = [s for s in SYLLABLES if s not in exclude] if exclude else SYLLABLES
    return " ".join(pool[i] for i in rng.choice(len(pool), size=n, replace=False))


def _make_laws(rng: np.random.Generator, n: int) -> list[LawEntry]:
    """Law names whose year-less token sets form an antichain under inclusion."""
    laws: list[LawEntry] = []
    token_sets: list[frozenset[str]] = []
    attempts = 0
    while len(laws) < n:
        attempts += 1
        if attempts > 200 * (n + 10):
            raise CorpusError(f"could not generate {n} distinct law names")
        prefix = "Bộ luật" if rng.random() < 0.15 else "Luật"
        topic = _word(rng, int(rng.integers(2, 5)), exclude=FILLER)
        tokens = frozenset(topic.split())
        if any(tokens <= other or other <= tokens for other in token_sets):
            continue
        year = int(rng.integers(1995, 2023))
        name = f"{prefix} {topic[0].upper()}{topic[1:]} {year}"
        token_sets.append(tokens)
        laws.append(LawEntry(law_id=f"L{len(laws) + 1:04d}", law_name=name, year=year))
    return laws


def _make_courts(rng: np.random.Generator, n: int) -> list[str]:
    names = ["Tòa án nhân dân tối cao"]
    names += [f"Tòa án nhân dân cấp cao tại {city}" for city in ("Hà Nội", "Đà Nẵng", "Thành phố Hồ Chí Minh")]
    for p in PROVINCES:
        names.append(f"Tòa án nhân dân {'thành phố' if p in CITIES else 'tỉnh'} {p}")
    seen = set(names)
    attempts = 0
    while len(names) < n:
        attempts += 1
        if attempts > 100 * n:
            raise CorpusError(f"could not generate {n} distinct court names")
        p = PROVINCES[int(rng.integers(len(PROVINCES)))]
        kind = "quận" if p in CITIES and rng.random() < 0.5 else "huyện"
        place = _word(rng, 2).title()
        name = f"Tòa án nhân dân {kind} {place}, {'thành phố' if p in CITIES else 'tỉnh'} {p}"
        if name not in seen:
            seen.add(name)
            names.append(name)
    # Order is shuffled so small corpora still mix court levels.
    order = rng.permutation(len(names))
    return [names[i] for i in order[:n]]


def _make_domains(rng: np.random.Generator, n: int) -> list[tuple[str, str, list[str]]]:
    out = []
    seen = set()
    i = 0
    while len(out) < n:
        base, code = BASE_DOMAINS[i % len(BASE_DOMAINS)]
        name = base if i < len(BASE_DOMAINS) else f"{base} - {_word(rng, 2)}"
        i += 1
        if name in seen:
            continue
        seen.add(name)
        subdomains = [f"Tranh chấp {_word(rng, 2)}" if code != "HS" else f"Tội {_word(rng, 2)}"
                      for _ in range(3)]
        out.append((name, code, subdomains))
    return out


def _citation_sentence(rng: np.random.Generator, law_name: str, with_year: bool = False) -> str:
    articles = sorted({int(x) for x in rng.integers(1, 300, size=int(rng.integers(1, 4)))})
    if len(articles) == 1:
        head = f"Điều {articles[0]}"
    else:
        head = "các điều " + ", ".join(map(str, articles[:-1])) + f" và {articles[-1]}"
    if rng.random() < 0.3:
        head = f"khoản {int(rng.integers(1, 6))} " + head
    if not with_year:
        law_name = law_name.rsplit(" ", 1)[0]
    return f"Căn cứ {head} của {law_name}"


def _degrade(law_name: str) -> str:
    """Drop most of a law name so the citation no longer identifies it."""
    tokens = law_name.rsplit(" ", 1)[0].split()
    keep = max(1, len(tokens) // 3)
    return " ".join(tokens[:keep])


def _party(rng: np.random.Generator) -> str:
    return (f"{SURNAMES[int(rng.integers(len(SURNAMES)))]} Văn "
            f"{GIVEN[int(rng.integers(len(GIVEN)))]}")


def _story(rng: np.random.Generator, domain_words: list[str], n_sentences: int) -> list[list[str]]:
    sentences = []
    for _ in range(n_sentences):
        words = [_word(rng, 2) for _ in range(int(rng.integers(4, 8)))]
        words += [domain_words[int(rng.integers(len(domain_words)))] for _ in range(2)]
        rng.shuffle(words)
        sentences.append(words)
    return sentences


def _paraphrase(rng: np.random.Generator, story: list[list[str]]) -> list[str]:
    """Reorder and lightly drop words from a shared story."""
    out = []
    order = rng.permutation(len(story))
    for i in order:
        words = [w for w in story[i] if rng.random() > 0.15] or story[i][:1]
        out.append(" ".join(words).capitalize() + ".")
    return out


def generate_corpus(seed: int, params: GeneratorParams | None = None) -> SyntheticCorpus:
    """Generate cases, laws and gold labels as a pure function of (seed, params)."""
    params = params or GeneratorParams()
    params.validate()
    rng = np.random.default_rng(seed)

    laws = _make_laws(rng, params.laws) if params.laws > 0 else []
    if params.cases == 0:
        return SyntheticCorpus(cases=[], laws=laws, gold={}, groups={})

    courts = _make_courts(rng, params.courts)
    domains = _make_domains(rng, params.domains)
    domain_words = [[_word(rng, 2) for _ in range(15)] for _ in domains]
    pool_size = min(params.domain_law_pool, len(laws))
    domain_pools = [sorted(rng.choice(len(laws), size=pool_size, replace=False).tolist())
                    for _ in domains]

    cases: list[CaseRecord] = []
    gold: dict[str, frozenset[str]] = {}
    groups: dict[str, int] = {}
    serial_by_year: dict[int, int] = {}
    group_id = -1
    while len(cases) < params.cases:
        group_id += 1
        d_idx = int(rng.integers(len(domains)))
        domain_name, code, subdomains = domains[d_idx]
        subdomain = subdomains[int(rng.integers(len(subdomains)))]
        n_cite = 1 + int(rng.poisson(params.mean_citations - 1))
        n_cite = min(n_cite, len(laws))
        cited: list[int] = []
        while len(cited) < n_cite:
            if rng.random() < params.domain_affinity:
                pick = domain_pools[d_idx][int(rng.integers(pool_size))]
            else:
                pick = int(rng.integers(len(laws)))
            if pick not in cited:
                cited.append(pick)
        story = _story(rng, domain_words[d_idx], int(rng.integers(6, 10)))
        plaintiff, defendant = _party(rng), _party(rng)

        for _ in range(min(params.group_size, params.cases - len(cases))):
            idx = len(cases) + 1
            case_id = f"C{idx:06d}"
            court = courts[int(rng.integers(len(courts)))]
            level = list(CaseLevel)[int(rng.choice(3, p=[0.6, 0.3, 0.1]))]
            doc_type = DocumentType.VERDICT if rng.random() < 0.8 else DocumentType.DECISION
            date = dt.date(2015, 1, 1) + dt.timedelta(days=int(rng.integers(0, 9 * 365)))
            serial_by_year[date.year] = serial_by_year.get(date.year, 0) + 1
            number = f"{serial_by_year[date.year]}/{date.year}/{code}-{LEVEL_SUFFIX[level]}"

            intro = (
                f"{court}\n"
                f"Bản án số: {number}\n"
                f"Ngày {date.day} tháng {date.month} năm {date.year}\n"
                f"Lĩnh vực: {domain_name}\n"
                f"Quan hệ pháp luật: {subdomain}\n"
                f"Nguyên đơn: ông {plaintiff}. Bị đơn: ông {defendant}.\n"
            )
            content = "NỘI DUNG VỤ ÁN\n" + " ".join(_paraphrase(rng, story)) + "\n"

            # Decisions cite full names; judgments drop the year.
            decided, judged = [], []
            for i in cited:
                name = laws[i].law_name
                if params.noise > 0 and rng.random() < params.noise:
                    name = _degrade(name) + " 2000"
                decided.append(_citation_sentence(rng, name, with_year=True))
                if rng.random() < 0.4:
                    judged.append(_citation_sentence(rng, name))
            if params.noise > 0 and rng.random() < params.noise:
                distractor = laws[int(rng.integers(len(laws)))].law_name.rsplit(" ", 1)[0]
                content += f"Bị đơn cho rằng cần áp dụng {distractor}.\n"

            judgment = (
                "NHẬN ĐỊNH CỦA TÒA ÁN\n"
                + " ".join(_paraphrase(rng, story[: max(2, len(story) // 2)]))
                + "\n"
                + "".join(f"{s}. Hội đồng xét xử xét thấy yêu cầu là có cơ sở.\n" for s in judged)
            )
            decision = (
                "QUYẾT ĐỊNH\n"
                + "".join(f"{s};\n" for s in decided)
                + f"Tuyên xử: chấp nhận một phần yêu cầu của ông {plaintiff}.\n"
            )
            cases.append(CaseRecord(
                case_id=case_id,
                sections=SectionSet(intro, content, judgment, decision),
                case_number=number,
                document_type=doc_type,
                case_level=level,
                date=date,
                court_name=court,
                domain_name=domain_name,
                subdomain=subdomain,
            ))
            gold[case_id] = frozenset(laws[i].law_id for i in cited)
            groups[case_id] = group_id

    return SyntheticCorpus(cases=cases, laws=laws, gold=gold, groups=groups)
