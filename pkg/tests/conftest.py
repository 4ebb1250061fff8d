import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from legalkg.synth import GeneratorParams, generate_corpus  # noqa: E402

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _ACCEPTANCE.get(n, (title, "PASS"))[1]
        status = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _ACCEPTANCE[n] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {title}")


@pytest.fixture(scope="session")
def small_corpus():
    return generate_corpus(3, GeneratorParams(cases=60, laws=40, domains=4, courts=12))


@pytest.fixture(scope="session")
def six_laws():
    from legalkg.corpus import LawEntry

    names = [
        ("Luật Thi hành án dân sự sửa đổi 2014", 2014),
        ("Luật thi hành án dân sự 2008", 2008),
        ("Luật tổ chức Tòa án nhân dân 2014", 2014),
        ("Luật thi hành án hình sự 2010", 2010),
        ("Bộ luật Tố tụng dân sự 2004", 2004),
        ("Luật Hôn nhân và gia đình 2014", 2014),
    ]
    return [LawEntry(f"T{i + 1}", name, year) for i, (name, year) in enumerate(names)]
